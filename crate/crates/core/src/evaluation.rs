//! Empirical evaluation of aggregation methods on experiment sets.

pub mod bootstrap;
pub mod wilcoxon;

use log::warn;

use crate::aggregators::{aggregate_many, pivot, winsorize_unit, MethodId};
use crate::error::{Error, Result};
use crate::panel::{sum_of, ExperimentSet, TaskKind};

pub use bootstrap::{bootstrap_curves, BootstrapCurve};
pub use wilcoxon::{wilcoxon_signed_rank, WilcoxonMethod, WilcoxonResult};

/// Significance threshold for the markers in the results table.
pub const SIGNIFICANCE_LEVEL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: MethodId,
    /// `estimate - truth` per trial, after Winsorization on unit-interval
    /// tasks; `None` where the method failed on that trial.
    pub per_trial_error: Vec<Option<f64>>,
    /// Root mean squared error over the trials that succeeded; NaN if none did.
    pub rmse: f64,
}

impl MethodResult {
    pub fn n_trials(&self) -> usize {
        self.per_trial_error.iter().flatten().count()
    }

    pub fn excluded(&self) -> usize {
        self.per_trial_error.len() - self.n_trials()
    }
}

pub(crate) fn rmse(errors: impl IntoIterator<Item = f64>) -> f64 {
    let squares: Vec<f64> = errors.into_iter().map(|e| e * e).collect();
    if squares.is_empty() {
        f64::NAN
    } else {
        (sum_of(&squares) / squares.len() as f64).sqrt()
    }
}

pub(crate) fn finalize(estimate: f64, kind: TaskKind) -> f64 {
    match kind {
        TaskKind::UnitInterval => winsorize_unit(estimate),
        TaskKind::Continuous => estimate,
    }
}

/// Per-trial errors and RMSE of each method on the set.
pub fn evaluate(set: &ExperimentSet, methods: &[MethodId]) -> Result<Vec<MethodResult>> {
    if methods.is_empty() {
        return Err(Error::param("no methods to evaluate"));
    }
    let kind = set.kind();
    let mut errors = vec![Vec::with_capacity(set.trials().len()); methods.len()];
    for trial in set.trials() {
        for (k, est) in aggregate_many(methods, trial.panel()).into_iter().enumerate() {
            let err = match est {
                Ok(x) => Some(finalize(x, kind) - trial.truth()),
                Err(e) => {
                    warn!(
                        "{}: {} failed on trial {}: {e}",
                        set.name(),
                        methods[k],
                        trial.id()
                    );
                    None
                }
            };
            errors[k].push(err);
        }
    }
    Ok(methods
        .iter()
        .zip(errors)
        .map(|(&method, per_trial_error)| MethodResult {
            method,
            rmse: rmse(per_trial_error.iter().flatten().copied()),
            per_trial_error,
        })
        .collect())
}

/// Wilcoxon test of `baseline` against `challenger` over trials where both
/// produced an estimate. Small p means the baseline is worse.
pub fn compare(baseline: &MethodResult, challenger: &MethodResult) -> Result<WilcoxonResult> {
    let (a, b): (Vec<f64>, Vec<f64>) = baseline
        .per_trial_error
        .iter()
        .zip(&challenger.per_trial_error)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip();
    wilcoxon_signed_rank(&a, &b)
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub result: MethodResult,
    /// Simple mean vs this method.
    pub vs_mean: WilcoxonResult,
    /// Minimal pivot vs this method.
    pub vs_minimal_pivot: WilcoxonResult,
}

impl ResultRow {
    pub fn beats_mean(&self) -> bool {
        !self.vs_mean.degenerate && self.vs_mean.p_value < SIGNIFICANCE_LEVEL
    }

    pub fn beats_minimal_pivot(&self) -> bool {
        !self.vs_minimal_pivot.degenerate && self.vs_minimal_pivot.p_value < SIGNIFICANCE_LEVEL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub rows: Vec<ResultRow>,
}

/// [`evaluate`] plus significance tests against the simple mean and the
/// minimal pivot, whether or not those two were requested.
pub fn evaluate_with_significance(
    set: &ExperimentSet,
    methods: &[MethodId],
) -> Result<ExperimentReport> {
    let results = evaluate(set, methods)?;
    let baselines = evaluate(set, &[MethodId::Mean, MethodId::MinimalPivot])?;
    let rows = results
        .into_iter()
        .map(|result| {
            Ok(ResultRow {
                vs_mean: compare(&baselines[0], &result)?,
                vs_minimal_pivot: compare(&baselines[1], &result)?,
                result,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentReport {
        experiment: set.name().to_string(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub psi_o: f64,
    /// RMSE of `pivot(psi_o)` on raw estimates.
    pub rmse_at_psi_o: f64,
    /// Same, after Winsorization; only for unit-interval sets.
    pub rmse_winsorized: Option<f64>,
}

/// Least-squares optimal pivot weight given the truth:
/// `ψ_O = Σ (f̄ - ḡ)(θ - f̄) / Σ (f̄ - ḡ)²` over all trials of the set.
pub fn oracle_psi(set: &ExperimentSet) -> Result<OracleResult> {
    let summaries: Vec<_> = set
        .trials()
        .iter()
        .map(|t| (t.panel().summary(), t.truth()))
        .collect();
    let cross: Vec<f64> = summaries.iter().map(|(s, th)| s.gap * (th - s.f_bar)).collect();
    let squares: Vec<f64> = summaries.iter().map(|(s, _)| s.gap * s.gap).collect();
    let (num, den) = (sum_of(&cross), sum_of(&squares));
    if den == 0.0 {
        return Err(Error::Degenerate(format!(
            "{}: every trial has f̄ = ḡ, so the oracle pivot is undefined",
            set.name()
        )));
    }
    let psi_o = num / den;
    let raw_estimates: Vec<(f64, f64)> = summaries
        .iter()
        .map(|(s, th)| (s.f_bar + psi_o * s.gap, *th))
        .collect();
    let rmse_at_psi_o = rmse(raw_estimates.iter().map(|(e, th)| e - th));
    let rmse_winsorized = (set.kind() == TaskKind::UnitInterval)
        .then(|| rmse(raw_estimates.iter().map(|(e, th)| winsorize_unit(*e) - th)));
    Ok(OracleResult {
        psi_o,
        rmse_at_psi_o,
        rmse_winsorized,
    })
}

/// Raw (un-Winsorized) RMSE of `pivot(psi)` on the set.
pub fn pivot_rmse(set: &ExperimentSet, psi: f64) -> Result<f64> {
    let errs = set
        .trials()
        .iter()
        .map(|t| Ok(pivot(psi, &t.panel().summary())? - t.truth()))
        .collect::<Result<Vec<_>>>()?;
    Ok(rmse(errs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::{Panel, Trial};

    fn trial(id: &str, f: &[f64], g: &[f64], truth: f64, kind: TaskKind) -> Trial {
        Trial::new(id, Panel::new(f.to_vec(), g.to_vec()).unwrap(), truth, kind).unwrap()
    }

    #[test]
    fn single_trial_mean_exact() {
        let set = ExperimentSet::new(
            "x",
            vec![trial("a", &[1.0, 2.0, 3.0], &[0.0; 3], 2.0, TaskKind::Continuous)],
        )
        .unwrap();
        let res = evaluate(&set, &[MethodId::Mean]).unwrap();
        assert_eq!(res[0].per_trial_error, vec![Some(0.0)]);
        assert_eq!(res[0].rmse, 0.0);
    }

    #[test]
    fn unit_interval_outputs_are_clamped() {
        // f̄ = 0.9, ḡ = 0.7 -> neutral pivot 1.3 -> clamped to 1.
        let set = ExperimentSet::new(
            "x",
            vec![trial("a", &[0.9], &[0.7], 1.0, TaskKind::UnitInterval)],
        )
        .unwrap();
        let res = evaluate(&set, &[MethodId::NeutralPivot]).unwrap();
        assert_eq!(res[0].per_trial_error, vec![Some(0.0)]);
    }

    #[test]
    fn continuous_outputs_are_not_clamped() {
        let set = ExperimentSet::new(
            "x",
            vec![trial("a", &[0.9], &[0.7], 1.0, TaskKind::Continuous)],
        )
        .unwrap();
        let res = evaluate(&set, &[MethodId::NeutralPivot]).unwrap();
        assert!((res[0].per_trial_error[0].unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn oracle_single_term() {
        // gap 2, θ - f̄ = 6 -> ψ_O = 12 / 4
        let set = ExperimentSet::new(
            "x",
            vec![trial("a", &[10.0], &[8.0], 16.0, TaskKind::Continuous)],
        )
        .unwrap();
        let o = oracle_psi(&set).unwrap();
        assert_eq!(o.psi_o, 3.0);
        assert_eq!(o.rmse_at_psi_o, 0.0);
        assert_eq!(o.rmse_winsorized, None);
    }

    #[test]
    fn oracle_degenerate_set() {
        let set = ExperimentSet::new(
            "x",
            vec![trial("a", &[1.0, 2.0], &[2.0, 1.0], 3.0, TaskKind::Continuous)],
        )
        .unwrap();
        assert!(matches!(oracle_psi(&set), Err(Error::Degenerate(_))));
    }

    #[test]
    fn oracle_reports_winsorized_rmse_for_unit_tasks() {
        let set = ExperimentSet::new(
            "x",
            vec![
                trial("a", &[0.9], &[0.7], 1.0, TaskKind::UnitInterval),
                trial("b", &[0.2], &[0.3], 0.0, TaskKind::UnitInterval),
            ],
        )
        .unwrap();
        let o = oracle_psi(&set).unwrap();
        assert!(o.rmse_winsorized.unwrap() <= o.rmse_at_psi_o + 1e-12);
    }

    #[test]
    fn significance_rows_cover_every_method() {
        let trials: Vec<Trial> = (0..12)
            .map(|i| {
                let x = i as f64;
                trial(
                    &format!("t{i}"),
                    &[x, x + 1.0, x + 2.0],
                    &[x - 1.0, x, x + 1.0],
                    x + 4.0,
                    TaskKind::Continuous,
                )
            })
            .collect();
        let set = ExperimentSet::new("x", trials).unwrap();
        let report = evaluate_with_significance(&set, &MethodId::standard_set()).unwrap();
        assert_eq!(report.rows.len(), 6);
        let mean_row = &report.rows[0];
        assert!(mean_row.vs_mean.degenerate && !mean_row.beats_mean());
        let np_row = report.rows.iter().find(|r| r.result.method == MethodId::NeutralPivot).unwrap();
        assert!(np_row.beats_mean());
        assert!(np_row.beats_minimal_pivot());
    }
}
