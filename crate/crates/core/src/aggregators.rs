//! Point estimators for a single panel.
//!
//! None of these clamp their output. Unit-interval tasks are Winsorized by the
//! evaluation layer after aggregation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::{mean_of_sorted, Panel, PanelSummary};

/// An aggregation method.
///
/// Text form: `mean`, `median`, `trimmed:<fraction>`, `pivot:<psi>`, `mp`,
/// `np`, `so`, `gpe:p=<p>,w=<w>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MethodId {
    Mean,
    Median,
    Trimmed(f64),
    Pivot(f64),
    MinimalPivot,
    NeutralPivot,
    GlobalPosterior { p: f64, w: f64 },
    SurprisingOvershoot,
}

impl MethodId {
    /// The methods reported in the standard results table, in column order.
    pub fn standard_set() -> Vec<MethodId> {
        vec![
            MethodId::Mean,
            MethodId::Median,
            MethodId::Trimmed(0.1),
            MethodId::MinimalPivot,
            MethodId::SurprisingOvershoot,
            MethodId::NeutralPivot,
        ]
    }

    /// The `ψ` of pivot-family members, if this is one.
    pub fn pivot_psi(&self) -> Option<f64> {
        match *self {
            MethodId::Pivot(psi) => Some(psi),
            MethodId::MinimalPivot => Some(1.0),
            MethodId::NeutralPivot => Some(2.0),
            _ => None,
        }
    }

    fn check(self) -> Result<Self> {
        match self {
            MethodId::Trimmed(t) if !(0.0..0.5).contains(&t) => Err(Error::param(format!(
                "trim fraction {t} outside [0, 0.5)"
            ))),
            MethodId::Pivot(psi) if !(psi >= 0.0 && psi.is_finite()) => {
                Err(Error::param(format!("pivot psi {psi} must be finite and >= 0")))
            }
            MethodId::GlobalPosterior { p, w }
                if !(p > 0.0 && p <= 1.0 && w > 0.0 && w <= 1.0) =>
            {
                Err(Error::param(format!(
                    "gpe needs p and w in (0, 1], got p={p}, w={w}"
                )))
            }
            ok => Ok(ok),
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodId::Mean => f.write_str("mean"),
            MethodId::Median => f.write_str("median"),
            MethodId::Trimmed(t) => write!(f, "trimmed:{t}"),
            MethodId::Pivot(psi) => write!(f, "pivot:{psi}"),
            MethodId::MinimalPivot => f.write_str("mp"),
            MethodId::NeutralPivot => f.write_str("np"),
            MethodId::GlobalPosterior { p, w } => write!(f, "gpe:p={p},w={w}"),
            MethodId::SurprisingOvershoot => f.write_str("so"),
        }
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |v: &str, what: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::param(format!("bad {what} {v:?} in method {s:?}")))
        };
        let method = match s {
            "mean" => MethodId::Mean,
            "median" => MethodId::Median,
            "mp" => MethodId::MinimalPivot,
            "np" => MethodId::NeutralPivot,
            "so" => MethodId::SurprisingOvershoot,
            _ => {
                if let Some(v) = s.strip_prefix("trimmed:") {
                    MethodId::Trimmed(num(v, "trim fraction")?)
                } else if let Some(v) = s.strip_prefix("pivot:") {
                    MethodId::Pivot(num(v, "psi")?)
                } else if let Some(v) = s.strip_prefix("gpe:") {
                    let (mut p, mut w) = (None, None);
                    for part in v.split(',') {
                        match part.trim().split_once('=') {
                            Some(("p", x)) => p = Some(num(x, "p")?),
                            Some(("w", x)) => w = Some(num(x, "w")?),
                            _ => return Err(Error::param(format!("bad gpe term {part:?}"))),
                        }
                    }
                    match (p, w) {
                        (Some(p), Some(w)) => MethodId::GlobalPosterior { p, w },
                        _ => return Err(Error::param(format!("gpe needs p and w: {s:?}"))),
                    }
                } else {
                    return Err(Error::param(format!("unknown method {s:?}")));
                }
            }
        };
        method.check()
    }
}

impl TryFrom<String> for MethodId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MethodId> for String {
    fn from(m: MethodId) -> String {
        m.to_string()
    }
}

/// Parse a comma-separated method list. The comma inside `gpe:p=..,w=..` is
/// recognised and does not split the entry.
pub fn parse_method_list(s: &str) -> Result<Vec<MethodId>> {
    let mut items: Vec<String> = Vec::new();
    for tok in s.split(',').map(str::trim) {
        match items.last_mut() {
            Some(prev) if tok.starts_with("w=") && prev.starts_with("gpe:") => {
                prev.push(',');
                prev.push_str(tok);
            }
            _ => items.push(tok.to_string()),
        }
    }
    if items.iter().all(|t| t.is_empty()) {
        return Err(Error::param("empty method list"));
    }
    items.iter().map(|t| t.parse()).collect()
}

/// Apply `method` to a panel.
pub fn aggregate(method: MethodId, panel: &Panel) -> Result<f64> {
    Prepared::new(panel).apply(method)
}

/// Apply several methods to one panel, sharing the sort and the means.
pub fn aggregate_many(methods: &[MethodId], panel: &Panel) -> Vec<Result<f64>> {
    let prepared = Prepared::new(panel);
    methods.iter().map(|&m| prepared.apply(m)).collect()
}

struct Prepared<'a> {
    panel: &'a Panel,
    sorted_f: Vec<f64>,
    summary: PanelSummary,
}

impl<'a> Prepared<'a> {
    fn new(panel: &'a Panel) -> Self {
        let mut sorted_f = panel.f().to_vec();
        sorted_f.sort_unstable_by(f64::total_cmp);
        Self {
            panel,
            sorted_f,
            summary: panel.summary(),
        }
    }

    fn apply(&self, method: MethodId) -> Result<f64> {
        let method = method.check()?;
        let s = &self.summary;
        let est = match method {
            MethodId::Mean => s.f_bar,
            MethodId::Median => median_sorted(&self.sorted_f),
            MethodId::Trimmed(t) => trimmed_sorted(t, &self.sorted_f),
            MethodId::Pivot(_) | MethodId::MinimalPivot | MethodId::NeutralPivot => {
                pivot(method.pivot_psi().unwrap_or_default(), s)?
            }
            MethodId::GlobalPosterior { p, w } => global_posterior_pivot(p, w, s)?,
            MethodId::SurprisingOvershoot => {
                overshoot_sorted(&self.sorted_f, self.panel.g(), s.f_bar)
            }
        };
        Ok(est)
    }
}

/// Member of the pivot class: `f̄ + ψ(f̄ - ḡ)`.
pub fn pivot(psi: f64, summary: &PanelSummary) -> Result<f64> {
    if psi.is_nan() || psi < 0.0 || psi.is_infinite() {
        return Err(Error::param(format!("pivot psi {psi} must be finite and >= 0")));
    }
    Ok(summary.f_bar + psi * summary.gap)
}

/// Large-crowd approximation of the global posterior expectation when the
/// maven share `p` and private-information weight `w` are known:
/// `f̄ + (f̄ - ḡ) / (p w)`.
pub fn global_posterior_pivot(p: f64, w: f64, summary: &PanelSummary) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&w) {
        return Err(Error::param(format!(
            "p and w must lie in (0, 1], got p={p}, w={w}"
        )));
    }
    let pw = p * w;
    if pw == 0.0 {
        return Err(Error::Singularity(format!("p*w = 0 (p={p}, w={w})")));
    }
    Ok(summary.f_bar + summary.gap / pw)
}

pub fn mean(f: &[f64]) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::EmptyPanel);
    }
    Ok(crate::panel::mean_of(f))
}

pub fn median(f: &[f64]) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::EmptyPanel);
    }
    let mut sorted = f.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(median_sorted(&sorted))
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Mean after removing `floor(trim_fraction * J)` values from each tail.
pub fn trimmed_mean(trim_fraction: f64, f: &[f64]) -> Result<f64> {
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(Error::param(format!(
            "trim fraction {trim_fraction} outside [0, 0.5)"
        )));
    }
    if f.is_empty() {
        return Err(Error::EmptyPanel);
    }
    let mut sorted = f.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(trimmed_sorted(trim_fraction, &sorted))
}

fn trimmed_sorted(trim_fraction: f64, sorted: &[f64]) -> f64 {
    let n = sorted.len();
    // k < n/2 whenever trim_fraction < 0.5, so something always survives.
    let k = (trim_fraction * n as f64).floor() as usize;
    mean_of_sorted(&sorted[k..n - k])
}

/// Surprising-overshoot estimate `Q̂(1 - p̂)`, where `p̂` is the share of
/// peer predictions strictly above `f̄` and `Q̂(q)` is the smallest report
/// whose empirical CDF strictly exceeds `q`. When no peer prediction
/// overshoots, the candidate set is empty and the largest report is returned.
/// The result is always one of the reports.
pub fn surprising_overshoot(panel: &Panel) -> f64 {
    let mut sorted = panel.f().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    overshoot_sorted(&sorted, panel.g(), panel.summary().f_bar)
}

fn overshoot_sorted(sorted_f: &[f64], g: &[f64], f_bar: f64) -> f64 {
    let n = sorted_f.len();
    let overshoots = g.iter().filter(|&&gj| gj > f_bar).count();
    // F̂(v) > 1 - k/J  <=>  #{f <= v} > J - k; the smallest such report is the
    // order statistic at zero-based index J - k.
    let idx = if overshoots == 0 { n - 1 } else { n - overshoots };
    sorted_f[idx]
}

/// Clamp to `[0, 1]`.
pub fn winsorize_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}
