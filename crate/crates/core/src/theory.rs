//! Closed-form expected squared errors for the pivot class and the dominance
//! results that follow from them.
//!
//! For `θ̂_ψ = f̄ + ψ(f̄ - ḡ)` in the nested-symmetric crowd, write
//! `A = 1 - (1+ψ)pw + ψp²w²` and `B = (1+ψ) - ψpw`. Then
//!
//! ```text
//! E[(θ̂_ψ - θ)²] = A²·(m0²σ0² + m1·V0)/m²
//!               + p·w²·B²·(V0/l)/J
//!               + (1-p)·Var(δ)/J + p·B²·Var(ε)/J + ψ²·p·Var(γ)/J
//! ```
//!
//! and only the first term survives as `J → ∞`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::CrowdSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CrowdSize {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub p: f64,
    pub w: f64,
    pub m0: f64,
    pub m1: f64,
    /// Prior standard deviation (its square enters the formulas).
    pub sigma0: f64,
    pub v0: f64,
    pub var_delta: f64,
    pub var_epsilon: f64,
    pub var_gamma: f64,
    pub judges: CrowdSize,
}

impl TheoryParams {
    /// Noise-free, infinite-crowd parameters with unit sample sizes and
    /// unit variances.
    pub fn limiting(p: f64, w: f64) -> Self {
        Self {
            p,
            w,
            m0: 1.0,
            m1: 1.0,
            sigma0: 1.0,
            v0: 1.0,
            var_delta: 0.0,
            var_epsilon: 0.0,
            var_gamma: 0.0,
            judges: CrowdSize::Infinite,
        }
    }

    pub fn m(&self) -> f64 {
        self.m0 + self.m1
    }

    /// Variance of the shared information about `θ`, averaged over the prior:
    /// `(m0²σ0² + m1²(V0/m1)) / m²`.
    pub fn shared_variance(&self) -> f64 {
        let m = self.m();
        (self.m0 * self.m0 * self.sigma0 * self.sigma0 + self.m1 * self.v0) / (m * m)
    }
}

impl From<&CrowdSpec> for TheoryParams {
    fn from(spec: &CrowdSpec) -> Self {
        Self {
            p: spec.effective_p(),
            w: spec.w(),
            m0: spec.m0,
            m1: spec.m1,
            sigma0: spec.sigma0(),
            v0: spec.v0,
            var_delta: spec.sd_delta * spec.sd_delta,
            var_epsilon: spec.sd_epsilon * spec.sd_epsilon,
            var_gamma: spec.sd_gamma * spec.sd_gamma,
            judges: CrowdSize::Finite(spec.judges),
        }
    }
}

/// Coefficient on the shared information in `θ̂_ψ`:
/// `1 - (1+ψ)pw + ψp²w²`.
pub fn shared_coefficient(psi: f64, p: f64, w: f64) -> f64 {
    let pw = p * w;
    1.0 - (1.0 + psi) * pw + psi * pw * pw
}

/// Large-crowd limit of the expected squared error of `θ̂_ψ`.
pub fn limiting_mse(psi: f64, params: &TheoryParams) -> f64 {
    shared_coefficient(psi, params.p, params.w).powi(2) * params.shared_variance()
}

/// Expected squared error of `θ̂_ψ` for a crowd of `J` judges. The private
/// sample size is recovered as `l = w m / (1 - w)`.
pub fn finite_mse(psi: f64, params: &TheoryParams) -> Result<f64> {
    let judges = match params.judges {
        CrowdSize::Infinite => return Ok(limiting_mse(psi, params)),
        CrowdSize::Finite(0) => return Err(Error::param("crowd size must be >= 1")),
        CrowdSize::Finite(j) => j as f64,
    };
    let TheoryParams { p, w, v0, .. } = *params;
    if w >= 1.0 {
        return Err(Error::Singularity(
            "w = 1 leaves the private sample size undefined at finite J".into(),
        ));
    }
    let b = (1.0 + psi) - psi * p * w;
    let private_var = if w == 0.0 {
        // w² V0/l = w V0 (1 - w)/m -> 0
        0.0
    } else {
        let l = w * params.m() / (1.0 - w);
        p * w * w * b * b * (v0 / l)
    };
    let noise = (1.0 - p) * params.var_delta
        + p * b * b * params.var_epsilon
        + psi * psi * p * params.var_gamma;
    Ok(limiting_mse(psi, params) + (private_var + noise) / judges)
}

/// The pivot weights that never do worse than the simple mean in the large
/// crowd limit, whatever the crowd's composition and skill.
pub fn dominance_psi_range() -> RangeInclusive<f64> {
    0.0..=2.0
}

/// `P(pw <= c)` for independent uniform `p, w` on `[0, 1]`, which is
/// `c (1 - ln c)` for `0 < c <= 1`.
pub fn prob_pw_below(c: f64) -> Result<f64> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::param(format!("threshold {c} must be > 0")));
    }
    if c >= 1.0 {
        return Ok(1.0);
    }
    Ok(c * (1.0 - c.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub p: f64,
    pub w: f64,
    /// `pw <= 2/3`: the neutral pivot is closer to the large-crowd posterior
    /// than the minimal pivot.
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub resolution: usize,
    /// Row-major over `p`, then `w`.
    pub points: Vec<RegionPoint>,
}

impl RegionGrid {
    pub fn fraction_inside(&self) -> f64 {
        self.points.iter().filter(|pt| pt.inside).count() as f64 / self.points.len() as f64
    }
}

/// Evaluate the neutral-beats-minimal region on `resolution × resolution`
/// evenly spaced nodes covering `[0, 1]²`, corners included.
pub fn dominance_region_grid(resolution: usize) -> Result<RegionGrid> {
    if resolution < 2 {
        return Err(Error::param("grid resolution must be >= 2"));
    }
    let step = 1.0 / (resolution - 1) as f64;
    let mut points = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for k in 0..resolution {
            let (p, w) = (i as f64 * step, k as f64 * step);
            points.push(RegionPoint {
                p,
                w,
                inside: p * w <= 2.0 / 3.0,
            });
        }
    }
    Ok(RegionGrid { resolution, points })
}
