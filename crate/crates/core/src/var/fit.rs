use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::stats::p_value_t;
use super::{build_lag_matrix, Panel, VarError, MAX_LAGS};
use crate::dynamics::{affine_step, companion, spectral_radius};
use crate::period::Period;

/// Smallest accepted reciprocal condition number of `Z'Z`.
pub const RCOND_MIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarSpec {
    pub k: usize,
    pub p: usize,
    pub with_constant: bool,
}

impl VarSpec {
    /// Regressors per equation.
    pub fn regressors(&self) -> usize {
        usize::from(self.with_constant) + self.k * self.p
    }
}

/// Constant vector plus one `k × k` matrix per lag.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub constants: DVector<f64>,
    pub lags: Vec<DMatrix<f64>>,
}

impl Coefficients {
    pub fn new(constants: DVector<f64>, lags: Vec<DMatrix<f64>>) -> Self {
        Coefficients { constants, lags }
    }

    fn zeros(k: usize, p: usize) -> Self {
        Coefficients { constants: DVector::zeros(k), lags: vec![DMatrix::zeros(k, k); p] }
    }

    /// Splits an `m × k` OLS coefficient block (one column per equation).
    fn from_block(b: &DMatrix<f64>, spec: &VarSpec) -> Self {
        let off = usize::from(spec.with_constant);
        let mut out = Coefficients::zeros(spec.k, spec.p);
        for z in 0..spec.k {
            if spec.with_constant {
                out.constants[z] = b[(0, z)];
            }
            for x in 0..spec.p {
                for y in 0..spec.k {
                    out.lags[x][(z, y)] = b[(off + x * spec.k + y, z)];
                }
            }
        }
        out
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Coefficients { constants: self.constants.map(&f), lags: self.lags.iter().map(|m| m.map(&f)).collect() }
    }

    fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Coefficients {
            constants: self.constants.zip_map(&other.constants, &f),
            lags: self.lags.iter().zip(&other.lags).map(|(a, b)| a.zip_map(b, &f)).collect(),
        }
    }

    pub fn companion_radius(&self) -> f64 {
        // All-zero lags give a nilpotent companion with radius exactly 0.
        if self.lags.iter().all(|m| m.iter().all(|&x| x == 0.0)) {
            return 0.0;
        }
        spectral_radius(&companion(&self.lags))
    }

    /// Iterates the deterministic recursion from `history` (oldest first, exactly `p` rows).
    pub fn forecast(&self, history: &[DVector<f64>], h: usize) -> Result<Vec<DVector<f64>>, VarError> {
        let p = self.lags.len();
        if history.len() != p {
            return Err(VarError::Dimension(format!("history has {} rows, expected {p}", history.len())));
        }
        let k = self.constants.len();
        if let Some(row) = history.iter().find(|r| r.len() != k) {
            return Err(VarError::Dimension(format!("history row has {} values, expected {k}", row.len())));
        }
        let mut window: Vec<DVector<f64>> = history.to_vec();
        let mut out = Vec::with_capacity(h);
        for _ in 0..h {
            let recent: Vec<&DVector<f64>> = window.iter().rev().take(p).collect();
            let next = affine_step(&self.constants, &self.lags, &recent);
            window.push(next.clone());
            out.push(next);
        }
        Ok(out)
    }
}

/// Estimated VAR with OLS inference.
#[derive(Debug, Clone, PartialEq)]
pub struct VarFit {
    pub spec: VarSpec,
    pub variable_names: Vec<String>,
    pub coefficients: Coefficients,
    pub se: Coefficients,
    pub tstat: Coefficients,
    pub pvalue: Coefficients,
    /// Residual covariance `E'E / dof`.
    pub sigma: DMatrix<f64>,
    pub residuals: DMatrix<f64>,
    /// Observations used in estimation, `T − p`.
    pub t_eff: usize,
    /// Residual degrees of freedom, `t_eff − regressors`.
    pub dof: usize,
    /// Reciprocal condition number of `Z'Z`.
    pub rcond: f64,
    /// First and last target periods.
    pub sample: Option<(Period, Period)>,
}

/// Equation-by-equation OLS with a constant and `p` lags.
pub fn estimate_ols(panel: &Panel, p: usize) -> Result<VarFit, VarError> {
    VarFit::estimate(panel, p, true)
}

impl VarFit {
    pub fn estimate(panel: &Panel, p: usize, with_constant: bool) -> Result<VarFit, VarError> {
        if p == 0 || p > MAX_LAGS {
            return Err(VarError::BadLagOrder(p));
        }
        let spec = VarSpec { k: panel.k(), p, with_constant };
        let m = spec.regressors();
        // At least one residual degree of freedom after the first p rows.
        let needed = p + m + 1;
        if panel.len() < needed {
            return Err(VarError::InsufficientSample { rows: panel.len(), needed });
        }
        let lm = build_lag_matrix(panel, p, with_constant)?;
        let (n, k) = (lm.y.nrows(), spec.k);

        let sv = lm.z.clone().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        let rcond = if smax > 0.0 { (smin / smax).powi(2) } else { 0.0 };
        if rcond.is_nan() || rcond < RCOND_MIN {
            return Err(VarError::SingularDesign { rcond, min: RCOND_MIN });
        }

        let qr = lm.z.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        let qty = q.transpose() * &lm.y;
        let b = r
            .solve_upper_triangular(&qty)
            .ok_or(VarError::SingularDesign { rcond, min: RCOND_MIN })?;
        let residuals = &lm.y - &lm.z * &b;
        let dof = n - m;
        let sigma = {
            let s = residuals.transpose() * &residuals / dof as f64;
            (&s + s.transpose()) * 0.5
        };

        // diag((Z'Z)^-1) = row norms² of R^-1.
        let r_inv = r
            .solve_upper_triangular(&DMatrix::identity(m, m))
            .ok_or(VarError::SingularDesign { rcond, min: RCOND_MIN })?;
        let xtx_inv_diag: Vec<f64> = (0..m).map(|j| r_inv.row(j).norm_squared()).collect();
        let mut se_block = DMatrix::zeros(m, k);
        for z in 0..k {
            for j in 0..m {
                se_block[(j, z)] = (sigma[(z, z)] * xtx_inv_diag[j]).sqrt();
            }
        }

        let coefficients = Coefficients::from_block(&b, &spec);
        let se = Coefficients::from_block(&se_block, &spec);
        let tstat = coefficients.zip_map(&se, |c, s| if s > 0.0 { c / s } else { 0.0 });
        let pvalue = tstat.map(|t| p_value_t(t, dof as f64));
        let (pvalue, tstat) = if with_constant {
            (pvalue, tstat)
        } else {
            // Absent constants report t = 0, p = 1.
            let mut pv = pvalue;
            pv.constants.fill(1.0);
            (pv, tstat)
        };
        let sample = match (panel.rows.get(p), panel.rows.last()) {
            (Some(a), Some(b)) => Some((a.0, b.0)),
            _ => None,
        };
        Ok(VarFit {
            spec,
            variable_names: panel.variable_names.clone(),
            coefficients,
            se,
            tstat,
            pvalue,
            sigma,
            residuals,
            t_eff: n,
            dof,
            rcond,
            sample,
        })
    }

    /// Spectral radius of the companion matrix.
    pub fn stability_radius(&self) -> f64 {
        self.coefficients.companion_radius()
    }

    pub fn is_stable(&self) -> bool {
        self.stability_radius() < 1.0
    }

    pub fn to_json(&self) -> FitJson {
        let c = |m: &Coefficients| CoefJson {
            constants: m.constants.iter().copied().collect(),
            lags: m.lags.iter().map(rows_of).collect(),
        };
        FitJson {
            variables: self.variable_names.clone(),
            k: self.spec.k,
            p: self.spec.p,
            with_constant: self.spec.with_constant,
            t_eff: self.t_eff,
            dof: self.dof,
            rcond: self.rcond,
            stability_radius: self.stability_radius(),
            sample_start: self.sample.map(|s| s.0.to_string()),
            sample_end: self.sample.map(|s| s.1.to_string()),
            value: c(&self.coefficients),
            se: c(&self.se),
            tstat: c(&self.tstat),
            pvalue: c(&self.pvalue),
            sigma: rows_of(&self.sigma),
        }
    }
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Serialized fit. In `lags[x][z][y]`, `z` is the affected variable and `y` the affecting one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitJson {
    pub variables: Vec<String>,
    pub k: usize,
    pub p: usize,
    pub with_constant: bool,
    pub t_eff: usize,
    pub dof: usize,
    pub rcond: f64,
    pub stability_radius: f64,
    pub sample_start: Option<String>,
    pub sample_end: Option<String>,
    pub value: CoefJson,
    pub se: CoefJson,
    pub tstat: CoefJson,
    pub pvalue: CoefJson,
    pub sigma: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefJson {
    pub constants: Vec<f64>,
    pub lags: Vec<Vec<Vec<f64>>>,
}

impl CoefJson {
    pub fn to_coefficients(&self) -> Result<Coefficients, VarError> {
        let k = self.constants.len();
        let mut lags = Vec::with_capacity(self.lags.len());
        for m in &self.lags {
            if m.len() != k || m.iter().any(|r| r.len() != k) {
                return Err(VarError::Dimension(format!("lag matrix is not {k}x{k}")));
            }
            let flat: Vec<f64> = m.iter().flatten().copied().collect();
            lags.push(DMatrix::from_row_slice(k, k, &flat));
        }
        Ok(Coefficients::new(DVector::from_vec(self.constants.clone()), lags))
    }
}

/// Spectral radius of the fit's companion matrix.
pub fn stability(fit: &VarFit) -> f64 {
    fit.stability_radius()
}

/// `h`-step deterministic forecast from the last `p` observations (oldest first).
pub fn forecast(fit: &VarFit, history: &[DVector<f64>], h: usize) -> Result<Vec<DVector<f64>>, VarError> {
    fit.coefficients.forecast(history, h)
}
