//! Corpus-to-coefficient toolkit.
//!
//! The crate turns dated document collections into keyword-attention series,
//! normalizes them into mean-100 indices, estimates vector autoregressions on
//! the resulting panels, and links the estimates to a linear-quadratic game of
//! norm transmission between groups.
//!
//! Module map:
//! - [`corpus`]: phrase matching and per-period mention counts.
//! - [`index`]: standardization, averaging and mean-100 rescaling.
//! - [`normgame`]: utilities, best responses, simulation and steady states.
//! - [`var`]: lag matrices, OLS with inference, stability, forecasts, tables.
//! - [`exec`]: parallel / sequential execution switch used by the hot loops.

pub mod corpus;
pub mod dynamics;
pub mod exec;
pub mod index;
pub mod io;
pub mod normgame;
pub mod period;
pub mod var;

pub use corpus::{Document, MatchMode, MentionRow, MentionSeries, PhraseSet};
pub use exec::Execution;
pub use index::{IndexSeries, ShareSeries, Window};
pub use normgame::{GroupGame, SteadyState, Trajectory};
pub use period::{Granularity, Period};
pub use var::{Panel, VarFit, VarSpec};
