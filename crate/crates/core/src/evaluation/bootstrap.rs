//! Crowd-size curves by resampling judges.
//!
//! For each target size and replication, every trial's judges are resampled
//! with replacement (estimate and peer estimate stay paired), every method is
//! applied, and the RMSE across trials is recorded. Curves report the mean
//! RMSE over replications.
//!
//! The generator for (size, trial, replication) is derived from the seed and
//! those three values only, so results are reproducible bit for bit and do
//! not depend on thread scheduling or on which other sizes were requested.

use rand::Rng;
use rayon::prelude::*;

use crate::aggregators::{aggregate_many, MethodId};
use crate::error::{Error, Result};
use crate::evaluation::finalize;
use crate::panel::ExperimentSet;
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapCurve {
    pub experiment: String,
    pub methods: Vec<MethodId>,
    /// Strictly increasing.
    pub sizes: Vec<usize>,
    /// `mean_rmse[method][size]`.
    pub mean_rmse: Vec<Vec<f64>>,
    /// `mean_rmse` divided by the neutral pivot's at the same size. The
    /// neutral pivot's own entry is exactly 1.
    pub ratio_to_np: Vec<Vec<f64>>,
    /// Replications dropped because the method failed on some resample.
    pub skipped: Vec<Vec<usize>>,
    pub replications: usize,
    pub seed: u64,
}

pub fn bootstrap_curves(
    set: &ExperimentSet,
    methods: &[MethodId],
    sizes: &[usize],
    replications: usize,
    seed: u64,
) -> Result<BootstrapCurve> {
    if methods.is_empty() {
        return Err(Error::param("no methods to bootstrap"));
    }
    if replications == 0 {
        return Err(Error::param("bootstrap needs at least one replication"));
    }
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::param("crowd sizes must be >= 1"));
    }
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();

    let mut all_methods = methods.to_vec();
    let np = match methods.iter().position(|&m| m == MethodId::NeutralPivot) {
        Some(i) => i,
        None => {
            all_methods.push(MethodId::NeutralPivot);
            all_methods.len() - 1
        }
    };
    let n_methods = all_methods.len();

    let mut mean_rmse = vec![Vec::with_capacity(sizes.len()); n_methods];
    let mut skipped = vec![Vec::with_capacity(sizes.len()); n_methods];
    for &size in &sizes {
        let per_rep: Vec<Vec<Option<f64>>> = (0..replications)
            .into_par_iter()
            .map(|rep| replicate(set, &all_methods, size, rep, seed))
            .collect::<Result<_>>()?;
        for k in 0..n_methods {
            let ok: Vec<f64> = per_rep.iter().filter_map(|r| r[k]).collect();
            skipped[k].push(replications - ok.len());
            mean_rmse[k].push(if ok.is_empty() {
                f64::NAN
            } else {
                ok.iter().sum::<f64>() / ok.len() as f64
            });
        }
    }

    let ratio_to_np = (0..n_methods)
        .map(|k| {
            (0..sizes.len())
                .map(|s| {
                    if k == np {
                        1.0
                    } else {
                        mean_rmse[k][s] / mean_rmse[np][s]
                    }
                })
                .collect()
        })
        .collect::<Vec<Vec<f64>>>();

    let keep = methods.len();
    Ok(BootstrapCurve {
        experiment: set.name().to_string(),
        methods: methods.to_vec(),
        sizes,
        mean_rmse: mean_rmse.into_iter().take(keep).collect(),
        ratio_to_np: ratio_to_np.into_iter().take(keep).collect(),
        skipped: skipped.into_iter().take(keep).collect(),
        replications,
        seed,
    })
}

/// RMSE across trials of each method for one replication; `None` if the
/// method failed on any resampled trial.
fn replicate(
    set: &ExperimentSet,
    methods: &[MethodId],
    size: usize,
    rep: usize,
    seed: u64,
) -> Result<Vec<Option<f64>>> {
    let kind = set.kind();
    let mut sum_sq = vec![Some(0.0_f64); methods.len()];
    let mut indices = Vec::with_capacity(size);
    for (t, trial) in set.trials().iter().enumerate() {
        let mut rng = substream(seed, &[size as u64, t as u64, rep as u64]);
        let judges = trial.panel().len();
        indices.clear();
        indices.extend((0..size).map(|_| rng.random_range(0..judges)));
        let resampled = trial.panel().resample(&indices)?;
        for (acc, est) in sum_sq.iter_mut().zip(aggregate_many(methods, &resampled)) {
            *acc = match (*acc, est) {
                (Some(s), Ok(x)) => Some(s + (finalize(x, kind) - trial.truth()).powi(2)),
                _ => None,
            };
        }
    }
    let n = set.trials().len() as f64;
    Ok(sum_sq.into_iter().map(|s| s.map(|s| (s / n).sqrt())).collect())
}
