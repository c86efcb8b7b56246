//! CSV result tables.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::evaluation::{BootstrapCurve, ExperimentReport, OracleResult};
use crate::io::{create, fmt_sig};
use crate::simulator::{CrowdSpec, MseEstimate};
use crate::theory::RegionGrid;

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

/// `experiment,method,rmse,n_trials,sig_vs_mean,sig_vs_mp`. The marker
/// columns hold `*` (beats the simple mean) and `+` (beats the minimal
/// pivot) at the 0.1 level, and are empty otherwise.
pub fn write_results_to<W: Write>(writer: W, reports: &[ExperimentReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["experiment", "method", "rmse", "n_trials", "sig_vs_mean", "sig_vs_mp"])?;
    for report in reports {
        for row in &report.rows {
            w.write_record([
                report.experiment.as_str(),
                &row.result.method.to_string(),
                &fmt_sig(row.result.rmse),
                &row.result.n_trials().to_string(),
                if row.beats_mean() { "*" } else { "" },
                if row.beats_minimal_pivot() { "+" } else { "" },
            ])?;
        }
    }
    finish(w)
}

pub fn write_results(path: impl AsRef<Path>, reports: &[ExperimentReport]) -> Result<()> {
    write_results_to(create(path.as_ref())?, reports)
}

/// `experiment,psi_o,rmse` with the raw (un-Winsorized) RMSE.
pub fn write_oracle_to<W: Write>(writer: W, rows: &[(String, OracleResult)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["experiment", "psi_o", "rmse"])?;
    for (name, o) in rows {
        w.write_record([name.as_str(), &fmt_sig(o.psi_o), &fmt_sig(o.rmse_at_psi_o)])?;
    }
    finish(w)
}

pub fn write_oracle(path: impl AsRef<Path>, rows: &[(String, OracleResult)]) -> Result<()> {
    write_oracle_to(create(path.as_ref())?, rows)
}

/// Long format: `experiment,method,size,mean_rmse,ratio_to_np`.
pub fn write_bootstrap_to<W: Write>(writer: W, curves: &[BootstrapCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["experiment", "method", "size", "mean_rmse", "ratio_to_np"])?;
    for c in curves {
        for (k, method) in c.methods.iter().enumerate() {
            for (s, size) in c.sizes.iter().enumerate() {
                w.write_record([
                    c.experiment.as_str(),
                    &method.to_string(),
                    &size.to_string(),
                    &fmt_sig(c.mean_rmse[k][s]),
                    &fmt_sig(c.ratio_to_np[k][s]),
                ])?;
            }
        }
    }
    finish(w)
}

pub fn write_bootstrap(path: impl AsRef<Path>, curves: &[BootstrapCurve]) -> Result<()> {
    write_bootstrap_to(create(path.as_ref())?, curves)
}

const MSE_COLUMNS: [&str; 17] = [
    "judges",
    "p",
    "m0",
    "m1",
    "l",
    "mu0",
    "sigma0",
    "v0",
    "sd_delta",
    "sd_epsilon",
    "sd_gamma",
    "structure",
    "seed",
    "replications",
    "psi",
    "mse",
    "se",
];

/// Monte Carlo results, one row per `ψ`, prefixed with the crowd parameters.
pub fn write_mse_to<W: Write>(
    writer: W,
    spec: &CrowdSpec,
    seed: u64,
    estimates: &[MseEstimate],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(MSE_COLUMNS)?;
    let prefix = [
        spec.judges.to_string(),
        fmt_sig(spec.effective_p()),
        fmt_sig(spec.m0),
        fmt_sig(spec.m1),
        fmt_sig(spec.l),
        fmt_sig(spec.mu0),
        fmt_sig(spec.sigma0()),
        fmt_sig(spec.v0),
        fmt_sig(spec.sd_delta),
        fmt_sig(spec.sd_epsilon),
        fmt_sig(spec.sd_gamma),
        spec.structure.to_string(),
        seed.to_string(),
    ];
    for e in estimates {
        let mut rec: Vec<String> = prefix.to_vec();
        rec.extend([
            e.replications.to_string(),
            fmt_sig(e.psi),
            fmt_sig(e.mse),
            fmt_sig(e.standard_error),
        ]);
        w.write_record(&rec)?;
    }
    finish(w)
}

pub fn write_mse(
    path: impl AsRef<Path>,
    spec: &CrowdSpec,
    seed: u64,
    estimates: &[MseEstimate],
) -> Result<()> {
    write_mse_to(create(path.as_ref())?, spec, seed, estimates)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryRow {
    pub p: f64,
    pub w: f64,
    pub psi: f64,
    pub limiting_mse: f64,
    /// `None` for an infinite crowd or when undefined (`w = 1`).
    pub finite_mse: Option<f64>,
}

/// `p,w,psi,limiting_mse,finite_mse`.
pub fn write_theory_curves_to<W: Write>(writer: W, rows: &[TheoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["p", "w", "psi", "limiting_mse", "finite_mse"])?;
    for r in rows {
        w.write_record([
            fmt_sig(r.p),
            fmt_sig(r.w),
            fmt_sig(r.psi),
            fmt_sig(r.limiting_mse),
            r.finite_mse.map(fmt_sig).unwrap_or_default(),
        ])?;
    }
    finish(w)
}

/// `p,w,inside` with `inside` as 1/0.
pub fn write_region_csv_to<W: Write>(writer: W, grid: &RegionGrid) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["p", "w", "inside"])?;
    for pt in &grid.points {
        w.write_record([
            fmt_sig(pt.p),
            fmt_sig(pt.w),
            (pt.inside as u8).to_string(),
        ])?;
    }
    finish(w)
}
