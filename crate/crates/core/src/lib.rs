//! Aggregation of crowd forecasts with shared-information bias correction.
//!
//! Each judge reports an estimate `f_j` of the target and a prediction `g_j`
//! of what the other judges will say. When judges share information, the
//! simple mean `f̄` is biased toward that shared information, and the gap
//! `f̄ - ḡ` points away from it. The pivot family `f̄ + ψ(f̄ - ḡ)` uses that
//! gap to correct the bias; `ψ = 1` is the minimal pivot and `ψ = 2` the
//! neutral pivot, the most aggressive member that never loses to the simple
//! mean in large crowds.
//!
//! Modules:
//! - [`panel`]: panels, trials, experiment sets and their validation.
//! - [`aggregators`]: every point estimator, dispatched through [`MethodId`].
//! - [`simulator`]: the generative crowd model used for Monte Carlo checks.
//! - [`theory`]: closed-form expected squared errors and dominance results.
//! - [`evaluation`]: RMSE tables, oracle pivot, Wilcoxon tests, bootstrap curves.
//! - [`io`]: CSV ingestion and output, SVG charts.

pub mod aggregators;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod panel;
mod rng;
pub mod simulator;
pub mod theory;

pub use aggregators::{aggregate, MethodId};
pub use error::{Error, Result};
pub use panel::{summarize, ExperimentSet, Panel, PanelSummary, TaskKind, Trial};
