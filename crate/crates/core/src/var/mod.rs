//! Vector autoregression over balanced attention panels.
//!
//! `X_t = c + Π_1 X_{t-1} + … + Π_p X_{t-p} + ε_t`, estimated equation by
//! equation with OLS. Coefficient matrices follow the `ARx(y,z)` convention:
//! `lags[x-1][(z, y)]` is the effect of variable `y` at lag `x` on variable `z`.

mod fit;
mod lag;
mod panel;
mod stats;
mod table;

use thiserror::Error;

pub use fit::{estimate_ols, forecast, stability, Coefficients, FitJson, VarFit, VarSpec, RCOND_MIN};
pub use lag::{build_lag_matrix, LagMatrices};
pub use panel::Panel;
pub use stats::{p_value_t, stars, t_quantile};
pub use table::{format_num, format_table, render_csv, render_latex, render_text, significance_summary, TableRow};

/// Largest lag order accepted by the estimator.
pub const MAX_LAGS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarError {
    #[error("insufficient sample: {rows} rows, need at least {needed}")]
    InsufficientSample { rows: usize, needed: usize },
    #[error("singular design: reciprocal condition of Z'Z is {rcond:e} (< {min:e})")]
    SingularDesign { rcond: f64, min: f64 },
    #[error("lag order {0} outside 1..={MAX_LAGS}")]
    BadLagOrder(usize),
    #[error("panel is not balanced: {0}")]
    Unbalanced(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value in panel at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}
