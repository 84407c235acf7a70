//! Linear recursions shared by the structural game and the estimated VAR.
//!
//! Both [`crate::normgame::GroupGame::simulate`] and [`crate::var::forecast`]
//! step through [`affine_step`], so a one-lag VAR built from a game reproduces
//! the game's trajectory bit for bit.

use nalgebra::{DMatrix, DVector};

/// `constants + Σ_l lags[l] · recent[l]`, where `recent[0]` is the most recent
/// state. Accumulation order is fixed: constant, then lag 1 columns in order,
/// then lag 2, and so on.
pub fn affine_step(constants: &DVector<f64>, lags: &[DMatrix<f64>], recent: &[&DVector<f64>]) -> DVector<f64> {
    debug_assert_eq!(lags.len(), recent.len());
    let k = constants.len();
    DVector::from_fn(k, |i, _| {
        let mut acc = constants[i];
        for (m, x) in lags.iter().zip(recent) {
            for j in 0..k {
                acc += m[(i, j)] * x[j];
            }
        }
        acc
    })
}

/// Largest eigenvalue modulus of a square matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    // Nilpotent companions of zero lags would otherwise report Schur round-off.
    if m.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Stacks lag matrices into the `kp × kp` companion form `[[Π₁ … Π_p], [I 0]]`.
pub fn companion(lags: &[DMatrix<f64>]) -> DMatrix<f64> {
    let p = lags.len();
    if p == 0 {
        return DMatrix::zeros(0, 0);
    }
    let k = lags[0].nrows();
    let mut c = DMatrix::zeros(k * p, k * p);
    for (l, m) in lags.iter().enumerate() {
        c.view_mut((0, l * k), (k, k)).copy_from(m);
    }
    for i in 0..k * (p - 1) {
        c[(k + i, i)] = 1.0;
    }
    c
}
