//! Generative crowd model.
//!
//! The target `θ` is drawn from a normal prior with mean `mu0` and standard
//! deviation `sigma0`. Everyone sees a public signal `s1`, the mean of `m1`
//! draws of `X ~ N(θ, V0)`, and forms the shared information
//! `s = (m0·mu0 + m1·s1) / m`. Mavens additionally see a private signal, the
//! mean of `l` draws, and weight it by `w = l / (l + m)`.
//!
//! Reports carry zero-mean normal noise: `δ` for laypeople, `ε` on maven
//! estimates and `γ` on maven peer predictions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregators::pivot;
use crate::error::{Error, Result};
use crate::panel::{Panel, TaskKind, Trial};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    /// Everyone is a maven (`p = 1`), each with an independent private signal.
    Symmetric,
    /// Experts all share one private signal.
    Nested,
    /// Mavens with independent private signals alongside laypeople.
    #[default]
    NestedSymmetric,
}

impl std::str::FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(Structure::Symmetric),
            "nested" => Ok(Structure::Nested),
            "nested-symmetric" => Ok(Structure::NestedSymmetric),
            _ => Err(Error::param(format!(
                "unknown structure {s:?} (symmetric, nested, nested-symmetric)"
            ))),
        }
    }
}

impl std::fmt::Display for Structure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Structure::Symmetric => "symmetric",
            Structure::Nested => "nested",
            Structure::NestedSymmetric => "nested-symmetric",
        })
    }
}

/// Parameters of a simulated crowd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrowdSpec {
    pub judges: usize,
    /// Maven proportion; ignored (taken as 1) for [`Structure::Symmetric`].
    pub p: f64,
    /// Prior pseudo-sample size.
    pub m0: f64,
    /// Public-signal sample size.
    pub m1: f64,
    /// Private-signal sample size.
    pub l: f64,
    pub mu0: f64,
    /// Prior standard deviation; `None` means `sqrt(v0 / m0)`.
    pub sigma0: Option<f64>,
    /// Variance of a single observation of `X`.
    pub v0: f64,
    pub sd_delta: f64,
    pub sd_epsilon: f64,
    pub sd_gamma: f64,
    pub structure: Structure,
}

impl Default for CrowdSpec {
    fn default() -> Self {
        Self {
            judges: 100,
            p: 0.5,
            m0: 1.0,
            m1: 1.0,
            l: 2.0,
            mu0: 0.0,
            sigma0: None,
            v0: 1.0,
            sd_delta: 0.0,
            sd_epsilon: 0.0,
            sd_gamma: 0.0,
            structure: Structure::NestedSymmetric,
        }
    }
}

impl CrowdSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::param(msg));
        if self.judges == 0 {
            return bad("judges must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p = {} outside [0, 1]", self.p));
        }
        for (name, v) in [("m0", self.m0), ("m1", self.m1), ("l", self.l)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive and finite"));
            }
        }
        if !self.mu0.is_finite() {
            return bad(format!("mu0 = {} must be finite", self.mu0));
        }
        let nonneg = [
            ("v0", self.v0),
            ("sigma0", self.sigma0()),
            ("sd_delta", self.sd_delta),
            ("sd_epsilon", self.sd_epsilon),
            ("sd_gamma", self.sd_gamma),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be finite and >= 0"));
            }
        }
        Ok(())
    }

    pub fn effective_p(&self) -> f64 {
        match self.structure {
            Structure::Symmetric => 1.0,
            _ => self.p,
        }
    }

    pub fn m(&self) -> f64 {
        self.m0 + self.m1
    }

    pub fn w(&self) -> f64 {
        self.l / (self.l + self.m())
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0.unwrap_or_else(|| (self.v0 / self.m0).sqrt())
    }

    /// `round(p J)`.
    pub fn n_mavens(&self) -> usize {
        ((self.effective_p() * self.judges as f64).round() as usize).min(self.judges)
    }

    /// Private-signal sample size that yields weight `w` given `m`.
    pub fn l_for_weight(w: f64, m: f64) -> f64 {
        w * m / (1.0 - w)
    }
}

/// Latent quantities behind one simulated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentRecord {
    pub theta: f64,
    pub s1: f64,
    /// Shared information `(m0·mu0 + m1·s1) / m`.
    pub s: f64,
    /// Private signals: one per maven, or a single shared one in the nested
    /// structure.
    pub t: Vec<f64>,
    pub n_mavens: usize,
}

fn normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    mean + sd * z
}

/// Draw one trial. The same `(spec, seed)` always gives the same output.
pub fn draw_trial(spec: &CrowdSpec, seed: u64) -> Result<(Trial, LatentRecord)> {
    spec.validate()?;
    let mut rng = substream(seed, &[]);
    let (f, g, latent) = draw_reports(spec, &mut rng);
    let panel = Panel::new(f, g)?;
    let trial = Trial::new(format!("sim-{seed}"), panel, latent.theta, TaskKind::Continuous)?;
    Ok((trial, latent))
}

fn draw_reports(spec: &CrowdSpec, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>, LatentRecord) {
    let p = spec.effective_p();
    let w = spec.w();
    let m = spec.m();
    let n = spec.judges;
    let n_mavens = spec.n_mavens();

    let theta = normal(rng, spec.mu0, spec.sigma0());
    let s1 = normal(rng, theta, (spec.v0 / spec.m1).sqrt());
    let s = (spec.m0 * spec.mu0 + spec.m1 * s1) / m;
    let sd_private = (spec.v0 / spec.l).sqrt();

    let t: Vec<f64> = match spec.structure {
        Structure::Nested if n_mavens > 0 => vec![normal(rng, theta, sd_private)],
        Structure::Nested => Vec::new(),
        _ => (0..n_mavens).map(|_| normal(rng, theta, sd_private)).collect(),
    };

    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for j in 0..n_mavens {
        let eps = normal(rng, 0.0, spec.sd_epsilon);
        let gamma = normal(rng, 0.0, spec.sd_gamma);
        match spec.structure {
            Structure::Nested => {
                let expert = (1.0 - w) * s + w * t[0];
                f.push(expert + eps);
                g.push((1.0 - p) * s + p * expert + p * eps + gamma);
            }
            _ => {
                let tj = t[j];
                let pw2 = p * w * w;
                f.push((1.0 - w) * s + w * tj + eps);
                g.push((1.0 - pw2) * s + pw2 * tj + p * w * eps + gamma);
            }
        }
    }
    for _ in n_mavens..n {
        let report = s - normal(rng, 0.0, spec.sd_delta);
        f.push(report);
        g.push(report);
    }

    let latent = LatentRecord {
        theta,
        s1,
        s,
        t,
        n_mavens,
    };
    (f, g, latent)
}

/// Monte Carlo estimate of an expected squared error, with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseEstimate {
    pub psi: f64,
    pub mse: f64,
    pub standard_error: f64,
    pub replications: usize,
}

/// Estimate `E[(pivot(ψ) - θ)²]` from independent simulated trials.
pub fn simulate_mse(spec: &CrowdSpec, psi: f64, replications: usize, seed: u64) -> Result<MseEstimate> {
    Ok(simulate_mse_many(spec, &[psi], replications, seed)?[0])
}

/// Like [`simulate_mse`] for several `ψ` at once, evaluated on the same draws.
///
/// Replication `r` uses its own generator derived from `(seed, r)`, so the
/// result does not depend on the rayon thread count.
pub fn simulate_mse_many(
    spec: &CrowdSpec,
    psis: &[f64],
    replications: usize,
    seed: u64,
) -> Result<Vec<MseEstimate>> {
    spec.validate()?;
    if replications < 2 {
        return Err(Error::param("need at least 2 replications"));
    }
    for &psi in psis {
        if !(psi >= 0.0 && psi.is_finite()) {
            return Err(Error::param(format!("psi {psi} must be finite and >= 0")));
        }
    }

    let squared: Vec<Vec<f64>> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, &[r as u64]);
            let (f, g, latent) = draw_reports(spec, &mut rng);
            let summary = Panel::new(f, g)
                .expect("simulated reports are finite and nonempty")
                .summary();
            psis.iter()
                .map(|&psi| {
                    let est = pivot(psi, &summary).expect("psi checked above");
                    (est - latent.theta).powi(2)
                })
                .collect()
        })
        .collect();

    let n = replications as f64;
    Ok(psis
        .iter()
        .enumerate()
        .map(|(k, &psi)| {
            let mean = squared.iter().map(|row| row[k]).sum::<f64>() / n;
            let var = squared.iter().map(|row| (row[k] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            MseEstimate {
                psi,
                mse: mean,
                standard_error: (var / n).sqrt(),
                replications,
            }
        })
        .collect())
}

/// Draw `n_trials` trials with seeds derived from `seed`, as an experiment set.
pub fn draw_experiment(
    spec: &CrowdSpec,
    name: &str,
    n_trials: usize,
    seed: u64,
) -> Result<(crate::panel::ExperimentSet, Vec<LatentRecord>)> {
    spec.validate()?;
    let mut trials = Vec::with_capacity(n_trials);
    let mut latents = Vec::with_capacity(n_trials);
    for i in 0..n_trials {
        let mut rng = substream(seed, &[i as u64]);
        let (f, g, latent) = draw_reports(spec, &mut rng);
        let ids = (0..f.len()).map(|j| format!("j{j:04}")).collect();
        let panel = Panel::with_judge_ids(f, g, ids)?;
        trials.push(Trial::new(
            format!("t{i:04}"),
            panel,
            latent.theta,
            TaskKind::Continuous,
        )?);
        latents.push(latent);
    }
    Ok((crate::panel::ExperimentSet::new(name, trials)?, latents))
}
