use nalgebra::DMatrix;

use super::{Panel, VarError};

/// Targets `Y` ((T−p) × k) and regressors `Z` ((T−p) × (1 + k·p), or k·p
/// without a constant).
#[derive(Debug, Clone, PartialEq)]
pub struct LagMatrices {
    pub y: DMatrix<f64>,
    pub z: DMatrix<f64>,
}

/// Row `t` of `Z` is `[1, X_{t−1}, …, X_{t−p}]`, variables in panel order within
/// each lag block. The first `p` panel rows only serve as initial conditions.
pub fn build_lag_matrix(panel: &Panel, p: usize, with_constant: bool) -> Result<LagMatrices, VarError> {
    let (t, k) = (panel.len(), panel.k());
    if t <= p {
        return Err(VarError::InsufficientSample { rows: t, needed: p + 1 });
    }
    let n = t - p;
    let offset = usize::from(with_constant);
    let x = panel.matrix();
    let y = x.rows(p, n).into_owned();
    let mut z = DMatrix::zeros(n, offset + k * p);
    for row in 0..n {
        if with_constant {
            z[(row, 0)] = 1.0;
        }
        for lag in 1..=p {
            for j in 0..k {
                z[(row, offset + (lag - 1) * k + j)] = x[(row + p - lag, j)];
            }
        }
    }
    Ok(LagMatrices { y, z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::period::Period;

    fn panel(data: &[&[f64]]) -> Panel {
        let k = data[0].len();
        let flat: Vec<f64> = data.iter().flat_map(|r| r.iter().copied()).collect();
        let m = DMatrix::from_row_slice(data.len(), k, &flat);
        let names = (0..k).map(|i| format!("x{}", i + 1)).collect();
        Panel::from_matrix(names, Period::parse("2000-Q1").unwrap(), &m).unwrap()
    }

    #[test]
    fn scalar_one_lag() {
        let lm = build_lag_matrix(&panel(&[&[1.0], &[2.0], &[3.0]]), 1, true).unwrap();
        assert_eq!(lm.y, DMatrix::from_column_slice(2, 1, &[2.0, 3.0]));
        assert_eq!(lm.z, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]));
    }

    #[test]
    fn shapes_two_vars_two_lags() {
        let p = panel(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0], &[7.0, 8.0], &[9.0, 10.0]]);
        let lm = build_lag_matrix(&p, 2, true).unwrap();
        assert_eq!(lm.y.shape(), (3, 2));
        assert_eq!(lm.z.shape(), (3, 5));
    }

    #[test]
    fn hand_built_layout() {
        // Four rows, k = 2, p = 1: Z rows are [1, x1_{t-1}, x2_{t-1}].
        let p = panel(&[&[1.0, 10.0], &[2.0, 20.0], &[3.0, 30.0], &[4.0, 40.0]]);
        let lm = build_lag_matrix(&p, 1, true).unwrap();
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(3, 3, &[
            1.0, 1.0, 10.0,
            1.0, 2.0, 20.0,
            1.0, 3.0, 30.0,
        ]);
        assert_eq!(lm.z, want);
        let lm2 = build_lag_matrix(&p, 2, false).unwrap();
        #[rustfmt::skip]
        let want2 = DMatrix::from_row_slice(2, 4, &[
            2.0, 20.0, 1.0, 10.0,
            3.0, 30.0, 2.0, 20.0,
        ]);
        assert_eq!(lm2.z, want2);
    }

    #[test]
    fn too_short() {
        let p = panel(&[&[1.0], &[2.0]]);
        assert_eq!(build_lag_matrix(&p, 2, true), Err(VarError::InsufficientSample { rows: 2, needed: 3 }));
    }
}
