use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use crowd_pivot::aggregators::aggregate_many;
use crowd_pivot::evaluation::{bootstrap_curves, evaluate_with_significance, oracle_psi};
use crowd_pivot::io::{self as cio, fmt_sig, Loaded, TheoryRow};
use crowd_pivot::simulator::{draw_experiment, simulate_mse_many, CrowdSpec};
use crowd_pivot::theory::{
    dominance_psi_range, dominance_region_grid, finite_mse, limiting_mse, prob_pw_below,
    CrowdSize, TheoryParams,
};
use log::{info, warn};

use crate::{Command, CrowdFlags, SimulateArgs, TheoryCommand, TheoryMseArgs};

pub(crate) fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Aggregate { input, methods } => aggregate(&input, &methods.0),
        Command::Simulate(args) => simulate(args),
        Command::Theory { command } => theory(command),
        Command::Evaluate {
            input,
            output,
            methods,
        } => {
            let loaded = load(&input)?;
            let reports = loaded
                .sets
                .iter()
                .map(|set| evaluate_with_significance(set, &methods.0))
                .collect::<crowd_pivot::Result<Vec<_>>>()?;
            emit(output.as_deref(), |w| cio::write_results_to(w, &reports))
        }
        Command::Oracle { input, output } => {
            let loaded = load(&input)?;
            let rows = loaded
                .sets
                .iter()
                .map(|set| Ok((set.name().to_string(), oracle_psi(set)?)))
                .collect::<crowd_pivot::Result<Vec<_>>>()?;
            emit(output.as_deref(), |w| cio::write_oracle_to(w, &rows))
        }
        Command::Bootstrap {
            input,
            output,
            methods,
            sizes,
            boot,
            seed,
            svg,
        } => {
            info!("bootstrap seed {seed}");
            let loaded = load(&input)?;
            let curves = loaded
                .sets
                .iter()
                .map(|set| bootstrap_curves(set, &methods.0, &sizes, boot, seed))
                .collect::<crowd_pivot::Result<Vec<_>>>()?;
            emit(output.as_deref(), |w| cio::write_bootstrap_to(w, &curves))?;
            if let Some(path) = svg {
                if let [curve] = curves.as_slice() {
                    cio::write_curve_svg(&path, curve)?;
                } else {
                    for curve in &curves {
                        cio::write_curve_svg(suffixed(&path, &curve.experiment), curve)?;
                    }
                }
            }
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Loaded> {
    let loaded = cio::load_experiments(path)?;
    for ex in &loaded.report.exclusions {
        warn!(
            "{}/{}: dropped {} judge(s) with missing estimates",
            ex.experiment, ex.trial, ex.count
        );
    }
    for (experiment, trial) in &loaded.report.rejected_trials {
        warn!("{experiment}/{trial}: no usable judges, trial skipped");
    }
    Ok(loaded)
}

/// Writes to `path`, or to stdout when absent.
fn emit<F>(path: Option<&Path>, write: F) -> Result<()>
where
    F: FnOnce(Box<dyn Write>) -> crowd_pivot::Result<()>,
{
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    write(sink)?;
    Ok(())
}

/// `out.svg` + `exp A` -> `out-exp_A.svg`.
fn suffixed(path: &Path, experiment: &str) -> PathBuf {
    let clean: String = experiment
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("svg");
    path.with_file_name(format!("{stem}-{clean}.{ext}"))
}

fn aggregate(input: &Path, methods: &[crowd_pivot::MethodId]) -> Result<()> {
    let (panel, dropped) = cio::load_panel(input)?;
    if dropped > 0 {
        warn!("dropped {dropped} judge(s) with missing estimates");
    }
    let mut out = io::stdout().lock();
    writeln!(out, "method,estimate")?;
    for (method, value) in methods.iter().zip(aggregate_many(methods, &panel)) {
        let value = value.with_context(|| format!("method {method}"))?;
        writeln!(out, "{method},{}", fmt_sig(value))?;
    }
    Ok(())
}

fn crowd_spec(config: Option<&Path>, flags: CrowdFlags) -> Result<CrowdSpec> {
    let mut spec = match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?
        }
        None => CrowdSpec::default(),
    };
    let CrowdFlags {
        judges,
        p,
        m0,
        m1,
        l,
        mu0,
        sigma0,
        v0,
        sd_delta,
        sd_epsilon,
        sd_gamma,
        structure,
    } = flags;
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = $field { spec.$field = v; } )* };
    }
    set!(judges, p, m0, m1, l, mu0, v0, sd_delta, sd_epsilon, sd_gamma, structure);
    if sigma0.is_some() {
        spec.sigma0 = sigma0;
    }
    spec.validate()?;
    Ok(spec)
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let spec = crowd_spec(args.config.as_deref(), args.crowd)?;
    info!("simulation seed {}", args.seed);
    if args.trials == 0 && args.psi.is_empty() {
        bail!("nothing to do: pass --trials and/or --psi");
    }
    if args.trials > 0 {
        let (set, _) = draw_experiment(&spec, "simulated", args.trials, args.seed)?;
        let sets = [set];
        match &args.output {
            Some(path) => cio::write_experiments(path, &sets)?,
            None => cio::write_experiments_to(io::stdout().lock(), &sets)?,
        }
    }
    if !args.psi.is_empty() {
        let estimates = simulate_mse_many(&spec, &args.psi, args.replications, args.seed)?;
        cio::write_mse_to(io::stdout().lock(), &spec, args.seed, &estimates)?;
    }
    Ok(())
}

fn theory(cmd: TheoryCommand) -> Result<()> {
    match cmd {
        TheoryCommand::ProbPw { c } => {
            println!("{}", fmt_sig(prob_pw_below(c)?));
        }
        TheoryCommand::Range => {
            let range = dominance_psi_range();
            println!("{},{}", fmt_sig(*range.start()), fmt_sig(*range.end()));
        }
        TheoryCommand::Mse(args) => theory_mse(args)?,
        TheoryCommand::Region {
            grid_resolution,
            output,
            svg,
        } => {
            let grid = dominance_region_grid(grid_resolution)?;
            emit(output.as_deref(), |w| cio::write_region_csv_to(w, &grid))?;
            if let Some(path) = svg {
                cio::write_region_svg(path, &grid)?;
            }
        }
    }
    Ok(())
}

fn theory_mse(args: TheoryMseArgs) -> Result<()> {
    let sigma0 = args.sigma0.unwrap_or_else(|| (args.v0 / args.m0).sqrt());
    let mut rows = Vec::new();
    for &p in &args.p {
        for &w in &args.w {
            if !((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&w)) {
                bail!("p = {p} and w = {w} must both lie in [0, 1]");
            }
            let mut params = TheoryParams {
                p,
                w,
                m0: args.m0,
                m1: args.m1,
                sigma0,
                v0: args.v0,
                var_delta: args.sd_delta.powi(2),
                var_epsilon: args.sd_epsilon.powi(2),
                var_gamma: args.sd_gamma.powi(2),
                judges: CrowdSize::Infinite,
            };
            for &psi in &args.psi {
                let limiting = limiting_mse(psi, &params);
                let finite = args.judges.and_then(|j| {
                    params.judges = CrowdSize::Finite(j);
                    let v = finite_mse(psi, &params);
                    params.judges = CrowdSize::Infinite;
                    match v {
                        Ok(v) => Some(v),
                        Err(e) => {
                            warn!("p = {p}, w = {w}, psi = {psi}: {e}");
                            None
                        }
                    }
                });
                rows.push(TheoryRow {
                    p,
                    w,
                    psi,
                    limiting_mse: limiting,
                    finite_mse: finite,
                });
            }
        }
    }
    emit(args.output.as_deref(), |w| cio::write_theory_curves_to(w, &rows))
}
