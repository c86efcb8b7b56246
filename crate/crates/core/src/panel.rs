//! Panels of paired judge reports, trials with known truth, and experiment sets.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Paired individual estimates `f` and peer predictions `g` for one question.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    f: Vec<f64>,
    g: Vec<f64>,
    judge_ids: Option<Vec<String>>,
}

impl Panel {
    pub fn new(f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        validate_reports(&f, &g)?;
        Ok(Self {
            f,
            g,
            judge_ids: None,
        })
    }

    pub fn with_judge_ids(f: Vec<f64>, g: Vec<f64>, judge_ids: Vec<String>) -> Result<Self> {
        validate_reports(&f, &g)?;
        if judge_ids.len() != f.len() {
            return Err(Error::LabelCount {
                expected: f.len(),
                got: judge_ids.len(),
            });
        }
        Ok(Self {
            f,
            g,
            judge_ids: Some(judge_ids),
        })
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn judge_ids(&self) -> Option<&[String]> {
        self.judge_ids.as_deref()
    }

    /// Number of judges `J`; never zero.
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Build a new panel from the judges at `indices` (repeats allowed).
    /// Labels are dropped because resampled judges are no longer unique.
    pub fn resample(&self, indices: &[usize]) -> Result<Panel> {
        let f = indices.iter().map(|&i| self.f[i]).collect();
        let g = indices.iter().map(|&i| self.g[i]).collect();
        Panel::new(f, g)
    }

    pub fn summary(&self) -> PanelSummary {
        summarize(self)
    }
}

/// Means of the two report sequences and their gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelSummary {
    pub f_bar: f64,
    pub g_bar: f64,
    /// `f_bar - g_bar`.
    pub gap: f64,
    pub size: usize,
}

impl PanelSummary {
    pub fn from_means(f_bar: f64, g_bar: f64, size: usize) -> Self {
        Self {
            f_bar,
            g_bar,
            gap: f_bar - g_bar,
            size,
        }
    }
}

pub fn summarize(panel: &Panel) -> PanelSummary {
    PanelSummary::from_means(mean_of(&panel.f), mean_of(&panel.g), panel.len())
}

/// Arithmetic mean that does not depend on the order of `xs`: values are
/// summed in sorted order with Neumaier compensation.
pub(crate) fn mean_of(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    mean_of_sorted(&sorted)
}

pub(crate) fn mean_of_sorted(sorted: &[f64]) -> f64 {
    sum_of_sorted(sorted) / sorted.len() as f64
}

/// Sum that depends only on the multiset of values, not their order.
pub(crate) fn sum_of(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sum_of_sorted(&sorted)
}

fn sum_of_sorted(sorted: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &x in sorted {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskKind {
    Continuous,
    /// Probabilities or binary outcomes; truth and outputs live in `[0, 1]`.
    UnitInterval,
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskKind::Continuous => "continuous",
            TaskKind::UnitInterval => "unit",
        })
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "continuous" => Ok(TaskKind::Continuous),
            "unit" => Ok(TaskKind::UnitInterval),
            other => Err(Error::param(format!(
                "unknown task kind {other:?} (expected \"continuous\" or \"unit\")"
            ))),
        }
    }
}

/// A panel together with the true value it was trying to estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    id: String,
    panel: Panel,
    truth: f64,
    kind: TaskKind,
}

impl Trial {
    pub fn new(id: impl Into<String>, panel: Panel, truth: f64, kind: TaskKind) -> Result<Self> {
        validate_trial(panel.f(), panel.g(), truth, kind)?;
        Ok(Self {
            id: id.into(),
            panel,
            truth,
            kind,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn panel(&self) -> &Panel {
        &self.panel
    }

    pub fn truth(&self) -> f64 {
        self.truth
    }

    pub fn kind(&self) -> TaskKind {
        self.kind
    }
}

/// Check the raw parts of a trial, reporting the first violated invariant.
pub fn validate_trial(f: &[f64], g: &[f64], truth: f64, kind: TaskKind) -> Result<()> {
    validate_reports(f, g)?;
    if !truth.is_finite() {
        return Err(Error::NonFiniteTruth { truth });
    }
    if kind == TaskKind::UnitInterval && !(0.0..=1.0).contains(&truth) {
        return Err(Error::TruthOutOfRange { truth });
    }
    Ok(())
}

fn validate_reports(f: &[f64], g: &[f64]) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            f_len: f.len(),
            g_len: g.len(),
        });
    }
    if f.is_empty() {
        return Err(Error::EmptyPanel);
    }
    for (field, xs) in [("estimate", f), ("peer estimate", g)] {
        if let Some((index, &value)) = xs.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::NonFinite {
                field,
                index,
                value,
            });
        }
    }
    Ok(())
}

/// Named collection of trials sharing one task kind.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSet {
    name: String,
    trials: Vec<Trial>,
}

impl ExperimentSet {
    pub fn new(name: impl Into<String>, trials: Vec<Trial>) -> Result<Self> {
        let name = name.into();
        let Some(first) = trials.first() else {
            return Err(Error::InvalidExperiment {
                name,
                reason: "no trials".into(),
            });
        };
        let kind = first.kind();
        if let Some(odd) = trials.iter().find(|t| t.kind() != kind) {
            return Err(Error::InvalidExperiment {
                reason: format!(
                    "trial {:?} is {} but the set is {}",
                    odd.id(),
                    odd.kind(),
                    kind
                ),
                name,
            });
        }
        Ok(Self { name, trials })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn trials(&self) -> &[Trial] {
        &self.trials
    }

    pub fn kind(&self) -> TaskKind {
        self.trials[0].kind()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn summarize_identical_sequences() {
        let p = Panel::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(
            summarize(&p),
            PanelSummary {
                f_bar: 2.0,
                g_bar: 2.0,
                gap: 0.0,
                size: 3
            }
        );
    }

    #[test]
    fn summarize_constant_panels() {
        let p = Panel::new(vec![10.0, 10.0], vec![8.0, 8.0]).unwrap();
        let s = summarize(&p);
        assert_eq!((s.f_bar, s.g_bar, s.gap, s.size), (10.0, 8.0, 2.0, 2));
    }

    #[test]
    fn empty_panel_rejected() {
        assert!(matches!(Panel::new(vec![], vec![]), Err(Error::EmptyPanel)));
    }

    #[test]
    fn validate_trial_cases() {
        assert!(validate_trial(&[1.0, 2.0], &[1.5, 2.5], 3.0, TaskKind::Continuous).is_ok());
        assert!(matches!(
            validate_trial(&[1.0, 2.0, 3.0], &[1.0, 2.0], 0.0, TaskKind::Continuous),
            Err(Error::LengthMismatch { f_len: 3, g_len: 2 })
        ));
        assert!(matches!(
            validate_trial(&[0.5], &[0.5], 1.3, TaskKind::UnitInterval),
            Err(Error::TruthOutOfRange { .. })
        ));
        assert!(matches!(
            validate_trial(&[0.5, f64::NAN], &[0.5, 0.1], 0.3, TaskKind::UnitInterval),
            Err(Error::NonFinite {
                field: "estimate",
                index: 1,
                ..
            })
        ));
        assert!(matches!(
            validate_trial(&[0.5], &[f64::INFINITY], 0.3, TaskKind::Continuous),
            Err(Error::NonFinite {
                field: "peer estimate",
                ..
            })
        ));
        assert!(matches!(
            validate_trial(&[0.5], &[0.5], f64::NAN, TaskKind::Continuous),
            Err(Error::NonFiniteTruth { .. })
        ));
    }

    #[test]
    fn label_count_must_match() {
        let err = Panel::with_judge_ids(vec![1.0], vec![1.0], vec![]).unwrap_err();
        assert!(matches!(err, Error::LabelCount { expected: 1, got: 0 }));
    }

    #[test]
    fn experiment_set_rejects_mixed_kinds() {
        let p = Panel::new(vec![0.5], vec![0.5]).unwrap();
        let a = Trial::new("a", p.clone(), 0.5, TaskKind::UnitInterval).unwrap();
        let b = Trial::new("b", p, 0.5, TaskKind::Continuous).unwrap();
        assert!(ExperimentSet::new("x", vec![a.clone(), b]).is_err());
        assert!(ExperimentSet::new("x", vec![]).is_err());
        assert_eq!(
            ExperimentSet::new("x", vec![a]).unwrap().kind(),
            TaskKind::UnitInterval
        );
    }

    fn reports() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..40).prop_flat_map(|n| {
            (
                prop::collection::vec(-1e3..1e3_f64, n),
                prop::collection::vec(-1e3..1e3_f64, n),
            )
        })
    }

    proptest! {
        #[test]
        fn summarize_is_permutation_invariant((f, g) in reports(), rot in 0usize..40) {
            let p = Panel::new(f.clone(), g.clone()).unwrap();
            let mut idx: Vec<usize> = (0..f.len()).collect();
            idx.rotate_left(rot % f.len());
            idx.reverse();
            let q = p.resample(&idx).unwrap();
            prop_assert_eq!(summarize(&p), summarize(&q));
        }

        #[test]
        fn equal_reports_have_zero_gap(f in prop::collection::vec(-1e3..1e3_f64, 1..40)) {
            let p = Panel::new(f.clone(), f).unwrap();
            prop_assert_eq!(summarize(&p).gap, 0.0);
        }

        #[test]
        fn shift_moves_means_not_gap((f, g) in reports(), c in -100.0..100.0_f64) {
            let s = summarize(&Panel::new(f.clone(), g.clone()).unwrap());
            let shifted = Panel::new(
                f.iter().map(|x| x + c).collect(),
                g.iter().map(|x| x + c).collect(),
            ).unwrap();
            let t = summarize(&shifted);
            prop_assert!((t.f_bar - s.f_bar - c).abs() < 1e-9);
            prop_assert!((t.g_bar - s.g_bar - c).abs() < 1e-9);
            prop_assert!((t.gap - s.gap).abs() < 1e-9);
        }
    }
}
