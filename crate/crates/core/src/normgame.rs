//! Linear-quadratic game of norm transmission between groups.
//!
//! A member of group `i` chooses an action `a_i` each period to maximize
//!
//! ```text
//! U_i(a_i, a_prev) = a_i · (b_i + Σ_j λ_ij · a_prev_j) − (c_i / 2) · a_i²
//! ```
//!
//! where `b_i` is intrinsic interest, `c_i > 0` the marginal cost slope and
//! `λ_ij` how much group `i` cares about group `j`'s previous action. The best
//! response is linear, `a_i = (b_i + Σ_j λ_ij a_prev_j) / c_i`, so the group
//! dynamics are a one-lag VAR with constants `b/c` and coefficients `λ_ij/c_i`.
//! Only these ratios are identified from data.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{affine_step, spectral_radius};

/// Magnitude beyond which a trajectory is flagged as diverged.
pub const DIVERGENCE_BOUND: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("group {group}: cost slope c must be positive and finite, got {value}")]
    NonPositiveCost { group: usize, value: f64 },
    #[error("non-finite parameter in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("game has no groups")]
    Empty,
    #[error("fixed-point system is singular (spectral radius {radius})")]
    SingularSystem { radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupGame {
    pub group_names: Vec<String>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    /// Row `i` holds group `i`'s weights on every group's lagged action.
    pub lambda: DMatrix<f64>,
}

/// On-disk layout: `{groups, b, c, lambda}` with `lambda` as a list of rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameConfig {
    pub groups: Vec<String>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub lambda: Vec<Vec<f64>>,
}

impl GroupGame {
    pub fn new(
        group_names: Vec<String>,
        b: DVector<f64>,
        c: DVector<f64>,
        lambda: DMatrix<f64>,
    ) -> Result<Self, GameError> {
        let r = group_names.len();
        if r == 0 {
            return Err(GameError::Empty);
        }
        if b.len() != r || c.len() != r || lambda.shape() != (r, r) {
            return Err(GameError::Dimension(format!(
                "{r} groups but b has {}, c has {}, lambda is {}x{}",
                b.len(),
                c.len(),
                lambda.nrows(),
                lambda.ncols()
            )));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(GameError::NonFinite("b"));
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(GameError::NonFinite("lambda"));
        }
        if let Some((group, &value)) = c.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(GameError::NonPositiveCost { group, value });
        }
        Ok(GroupGame { group_names, b, c, lambda })
    }

    /// A game with default group names `g1..gR`.
    pub fn unnamed(b: DVector<f64>, c: DVector<f64>, lambda: DMatrix<f64>) -> Result<Self, GameError> {
        let names = (1..=b.len()).map(|i| format!("g{i}")).collect();
        GroupGame::new(names, b, c, lambda)
    }

    pub fn from_config(cfg: &GameConfig) -> Result<Self, GameError> {
        let r = cfg.groups.len();
        if cfg.lambda.len() != r || cfg.lambda.iter().any(|row| row.len() != r) {
            return Err(GameError::Dimension(format!("lambda must be {r}x{r}")));
        }
        let flat: Vec<f64> = cfg.lambda.iter().flatten().copied().collect();
        GroupGame::new(
            cfg.groups.clone(),
            DVector::from_vec(cfg.b.clone()),
            DVector::from_vec(cfg.c.clone()),
            DMatrix::from_row_slice(r, r, &flat),
        )
    }

    pub fn to_config(&self) -> GameConfig {
        GameConfig {
            groups: self.group_names.clone(),
            b: self.b.iter().copied().collect(),
            c: self.c.iter().copied().collect(),
            lambda: self.lambda.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
    }

    pub fn groups(&self) -> usize {
        self.group_names.len()
    }

    pub fn utility(&self, i: usize, a_i: f64, a_prev: &DVector<f64>) -> f64 {
        let mut pull = self.b[i];
        for j in 0..self.groups() {
            pull += self.lambda[(i, j)] * a_prev[j];
        }
        a_i * pull - 0.5 * self.c[i] * a_i * a_i
    }

    /// Utility-maximizing actions given last period's actions.
    pub fn best_response(&self, a_prev: &DVector<f64>) -> DVector<f64> {
        let (constants, pi1) = self.to_var_params();
        affine_step(&constants, std::slice::from_ref(&pi1), &[a_prev])
    }

    /// Iterates the best response `steps` times from `a0` under naive
    /// expectations (everyone expects last period's actions to repeat).
    pub fn simulate(&self, a0: &DVector<f64>, steps: usize) -> Trajectory {
        let (constants, pi1) = self.to_var_params();
        let lags = std::slice::from_ref(&pi1);
        let mut actions = Vec::with_capacity(steps + 1);
        actions.push(a0.clone());
        let mut diverged = false;
        for _ in 0..steps {
            let next = affine_step(&constants, lags, &[actions.last().unwrap()]);
            if next.iter().any(|x| !x.is_finite()) {
                diverged = true;
                break;
            }
            let escaped = next.iter().any(|x| x.abs() > DIVERGENCE_BOUND);
            actions.push(next);
            if escaped {
                diverged = true;
                break;
            }
        }
        Trajectory { actions, diverged }
    }

    /// Cost-scaled interaction matrix `diag(1/c) · λ`.
    pub fn interaction_matrix(&self) -> DMatrix<f64> {
        self.to_var_params().1
    }

    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.interaction_matrix())
    }

    /// Fixed point `a* = diag(1/c)(b + λ a*)`, or the divergent classification
    /// when the cost-scaled interaction matrix has spectral radius ≥ 1.
    pub fn steady_state(&self) -> Result<SteadyState, GameError> {
        let (constants, m) = self.to_var_params();
        let radius = spectral_radius(&m);
        let r = self.groups();
        let system = DMatrix::identity(r, r) - &m;
        let solved = system.lu().solve(&constants);
        if radius < 1.0 {
            return match solved {
                Some(point) => Ok(SteadyState::Stable { point, radius }),
                None => Err(GameError::SingularSystem { radius }),
            };
        }
        match solved {
            Some(_) => Ok(SteadyState::Divergent { radius }),
            None => Err(GameError::SingularSystem { radius }),
        }
    }

    /// One-lag VAR form: constants `b_i / c_i` and coefficients `λ_ij / c_i`.
    pub fn to_var_params(&self) -> (DVector<f64>, DMatrix<f64>) {
        let r = self.groups();
        let constants = DVector::from_fn(r, |i, _| self.b[i] / self.c[i]);
        let pi1 = DMatrix::from_fn(r, r, |i, j| self.lambda[(i, j)] / self.c[i]);
        (constants, pi1)
    }

    /// Game with unit costs whose VAR form is `(constants, pi1)`.
    pub fn from_var_params(constants: &DVector<f64>, pi1: &DMatrix<f64>) -> Result<Self, GameError> {
        if !pi1.is_square() || pi1.nrows() != constants.len() {
            return Err(GameError::Dimension(format!(
                "constants has {} entries but Pi1 is {}x{}",
                constants.len(),
                pi1.nrows(),
                pi1.ncols()
            )));
        }
        let r = constants.len();
        GroupGame::unnamed(constants.clone(), DVector::from_element(r, 1.0), pi1.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SteadyState {
    Stable { point: DVector<f64>, radius: f64 },
    Divergent { radius: f64 },
}

impl SteadyState {
    pub fn radius(&self) -> f64 {
        match self {
            SteadyState::Stable { radius, .. } | SteadyState::Divergent { radius } => *radius,
        }
    }

    pub fn point(&self) -> Option<&DVector<f64>> {
        match self {
            SteadyState::Stable { point, .. } => Some(point),
            SteadyState::Divergent { .. } => None,
        }
    }
}

/// Actions at `t = 0..=T`; `actions[0]` is the initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub actions: Vec<DVector<f64>>,
    /// Set when some action left `±DIVERGENCE_BOUND`; the trajectory stops there.
    pub diverged: bool,
}

impl Trajectory {
    pub fn last(&self) -> &DVector<f64> {
        self.actions.last().expect("trajectory holds the initial condition")
    }
}
