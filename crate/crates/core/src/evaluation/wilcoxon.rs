//! Paired Wilcoxon signed-rank test on per-trial absolute errors.
//!
//! The alternative is one-sided: method `a` has larger absolute errors than
//! method `b`. Zero differences are dropped and tied magnitudes get average
//! ranks. Up to [`EXACT_LIMIT`] remaining pairs the null distribution is
//! enumerated exactly; beyond that a tie-corrected normal approximation with
//! continuity correction is used.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest number of nonzero pairs for which the exact distribution is used.
pub const EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// One-sided p-value for "a worse than b".
    pub p_value: f64,
    /// Sum of ranks of the positive differences.
    pub statistic: f64,
    /// Pairs remaining after zero differences are dropped.
    pub n_used: usize,
    pub method: WilcoxonMethod,
    /// Every difference was zero; `p_value` is 1.
    pub degenerate: bool,
}

pub fn wilcoxon_signed_rank(errors_a: &[f64], errors_b: &[f64]) -> Result<WilcoxonResult> {
    if errors_a.len() != errors_b.len() {
        return Err(Error::LengthMismatch {
            f_len: errors_a.len(),
            g_len: errors_b.len(),
        });
    }
    if errors_a.is_empty() {
        return Err(Error::param("Wilcoxon test needs at least one pair"));
    }
    let diffs: Vec<f64> = errors_a
        .iter()
        .zip(errors_b)
        .map(|(a, b)| a.abs() - b.abs())
        .collect();
    if let Some(d) = diffs.iter().find(|d| !d.is_finite()) {
        return Err(Error::param(format!("non-finite error difference {d}")));
    }
    let method = if diffs.iter().filter(|&&d| d != 0.0).count() <= EXACT_LIMIT {
        WilcoxonMethod::Exact
    } else {
        WilcoxonMethod::NormalApprox
    };
    Ok(signed_rank_test(&diffs, method))
}

/// Run the test on raw paired differences with a chosen null distribution.
pub fn signed_rank_test(diffs: &[f64], method: WilcoxonMethod) -> WilcoxonResult {
    let ranked = rank_nonzero(diffs);
    let n_used = ranked.len();
    if n_used == 0 {
        return WilcoxonResult {
            p_value: 1.0,
            statistic: 0.0,
            n_used,
            method,
            degenerate: true,
        };
    }
    // Ranks are doubled so that average ranks of ties stay integral.
    let observed2: u64 = ranked.iter().filter(|r| r.positive).map(|r| r.rank2).sum();
    let statistic = observed2 as f64 / 2.0;
    let p_value = match method {
        WilcoxonMethod::Exact => exact_upper_tail(&ranked, observed2),
        WilcoxonMethod::NormalApprox => normal_upper_tail(&ranked, statistic),
    };
    WilcoxonResult {
        p_value,
        statistic,
        n_used,
        method,
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy)]
struct Ranked {
    rank2: u64,
    positive: bool,
    tie_size: usize,
}

fn rank_nonzero(diffs: &[f64]) -> Vec<Ranked> {
    let mut nz: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
    nz.sort_unstable_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut out = Vec::with_capacity(nz.len());
    let mut i = 0;
    while i < nz.len() {
        let mut k = i;
        while k + 1 < nz.len() && nz[k + 1].abs() == nz[i].abs() {
            k += 1;
        }
        // positions i..=k hold ranks i+1..=k+1; doubled average is i+k+2
        let rank2 = (i + k + 2) as u64;
        for &d in &nz[i..=k] {
            out.push(Ranked {
                rank2,
                positive: d > 0.0,
                tie_size: k - i + 1,
            });
        }
        i = k + 1;
    }
    out
}

/// `P(W+ >= observed)` over the `2^n` equally likely sign assignments.
fn exact_upper_tail(ranked: &[Ranked], observed2: u64) -> f64 {
    let total: u64 = ranked.iter().map(|r| r.rank2).sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for r in ranked {
        let step = r.rank2 as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + step] += counts[s];
            }
        }
        reach += step;
    }
    let hits: u64 = counts[observed2 as usize..].iter().sum();
    hits as f64 / (1u64 << ranked.len()) as f64
}

fn normal_upper_tail(ranked: &[Ranked], statistic: f64) -> f64 {
    let n = ranked.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    // Each tie group contributes (t³ - t)/48 once; members share tie_size.
    let tie_adjust: f64 = ranked
        .iter()
        .map(|r| {
            let t = r.tie_size as f64;
            (t * t * t - t) / (48.0 * t)
        })
        .sum();
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_adjust;
    let z = (statistic - mean - 0.5) / var.sqrt();
    (0.5 * erfc(z / std::f64::consts::SQRT_2)).clamp(0.0, 1.0)
}
