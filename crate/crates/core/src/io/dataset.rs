//! Long-format dataset: one row per (experiment, trial, judge).
//!
//! ```text
//! experiment,trial,judge,estimate,peer_estimate,truth,task
//! calories,q01,j001,450,520,610,continuous
//! ```
//!
//! A judge with an empty `estimate` or `peer_estimate` is dropped as a pair
//! and counted in the [`LoadReport`]. Experiments, trials and judges are
//! ordered by label, so the row order of the file does not matter.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{create, fmt_sig};
use crate::panel::{ExperimentSet, Panel, TaskKind, Trial};

pub const DATASET_COLUMNS: [&str; 7] = [
    "experiment",
    "trial",
    "judge",
    "estimate",
    "peer_estimate",
    "truth",
    "task",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    pub experiment: String,
    pub trial: String,
    /// Judges dropped for a missing estimate or peer estimate.
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub exclusions: Vec<Exclusion>,
    /// `(experiment, trial)` pairs left with no judges and therefore dropped.
    pub rejected_trials: Vec<(String, String)>,
}

impl LoadReport {
    pub fn total_excluded(&self) -> usize {
        self.exclusions.iter().map(|e| e.count).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub sets: Vec<ExperimentSet>,
    pub report: LoadReport,
}

struct TrialAcc {
    truth: f64,
    kind: TaskKind,
    judges: BTreeMap<String, (f64, f64)>,
    seen: HashSet<String>,
    excluded: usize,
}

pub fn load_experiments(path: impl AsRef<Path>) -> Result<Loaded> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_experiments(file)
}

pub fn read_experiments<R: Read>(reader: R) -> Result<Loaded> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = rdr.headers()?.clone();
    let mut col = [0usize; 7];
    for (slot, name) in col.iter_mut().zip(DATASET_COLUMNS) {
        *slot = header.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            row: 1,
            message: format!(
                "header must contain the columns {}; {name:?} is missing",
                DATASET_COLUMNS.join(",")
            ),
        })?;
    }
    let [c_exp, c_trial, c_judge, c_est, c_peer, c_truth, c_task] = col;

    let mut experiments: BTreeMap<String, BTreeMap<String, TrialAcc>> = BTreeMap::new();
    let mut n_rows = 0usize;
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(n_rows + 2, |p| p.line() as usize);
        n_rows += 1;
        let field = |i: usize| record.get(i).unwrap_or("");
        let parse_err = |message: String| Error::Parse { row, message };
        let number = |i: usize, name: &str| -> Result<Option<f64>> {
            let text = field(i);
            if text.is_empty() || text.eq_ignore_ascii_case("na") {
                return Ok(None);
            }
            let v: f64 = text
                .parse()
                .map_err(|_| parse_err(format!("{name} {text:?} is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(format!("{name} {text:?} is not finite")));
            }
            Ok(Some(v))
        };

        let experiment = field(c_exp);
        let trial = field(c_trial);
        let judge = field(c_judge);
        for (name, v) in [("experiment", experiment), ("trial", trial), ("judge", judge)] {
            if v.is_empty() {
                return Err(parse_err(format!("empty {name} label")));
            }
        }
        let truth = number(c_truth, "truth")?
            .ok_or_else(|| parse_err(format!("trial {trial:?} has no truth value")))?;
        let kind: TaskKind = field(c_task)
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let estimate = number(c_est, "estimate")?;
        let peer = number(c_peer, "peer_estimate")?;

        let acc = experiments
            .entry(experiment.to_string())
            .or_default()
            .entry(trial.to_string())
            .or_insert_with(|| TrialAcc {
                truth,
                kind,
                judges: BTreeMap::new(),
                seen: HashSet::new(),
                excluded: 0,
            });
        if acc.truth != truth {
            return Err(parse_err(format!(
                "trial {trial:?} of {experiment:?} has inconsistent truth ({} vs {truth})",
                acc.truth
            )));
        }
        if acc.kind != kind {
            return Err(parse_err(format!(
                "trial {trial:?} of {experiment:?} has inconsistent task ({} vs {kind})",
                acc.kind
            )));
        }
        if !acc.seen.insert(judge.to_string()) {
            return Err(parse_err(format!(
                "judge {judge:?} appears twice in trial {trial:?} of {experiment:?}"
            )));
        }
        match (estimate, peer) {
            (Some(f), Some(g)) => {
                acc.judges.insert(judge.to_string(), (f, g));
            }
            _ => acc.excluded += 1,
        }
    }
    if n_rows == 0 {
        return Err(Error::Parse {
            row: 1,
            message: "no data rows".into(),
        });
    }

    let mut report = LoadReport::default();
    let mut sets = Vec::with_capacity(experiments.len());
    for (experiment, trials) in experiments {
        let mut built = Vec::with_capacity(trials.len());
        for (trial_id, acc) in trials {
            if acc.excluded > 0 {
                report.exclusions.push(Exclusion {
                    experiment: experiment.clone(),
                    trial: trial_id.clone(),
                    count: acc.excluded,
                });
            }
            if acc.judges.is_empty() {
                report.rejected_trials.push((experiment.clone(), trial_id));
                continue;
            }
            let (ids, (f, g)): (Vec<String>, (Vec<f64>, Vec<f64>)) = acc.judges.into_iter().unzip();
            let panel = Panel::with_judge_ids(f, g, ids)?;
            built.push(Trial::new(trial_id, panel, acc.truth, acc.kind)?);
        }
        sets.push(ExperimentSet::new(experiment, built)?);
    }
    Ok(Loaded { sets, report })
}

/// Read a single panel from a CSV with `estimate` and `peer_estimate`
/// columns and an optional `judge` column. Judges missing either value are
/// dropped; the number dropped is returned alongside the panel.
pub fn read_panel<R: Read>(reader: R) -> Result<(Panel, usize)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let find = |name: &str| header.iter().position(|h| h == name);
    let (Some(c_est), Some(c_peer)) = (find("estimate"), find("peer_estimate")) else {
        return Err(Error::Parse {
            row: 1,
            message: "panel header needs estimate and peer_estimate columns".into(),
        });
    };
    let c_judge = find("judge");
    let (mut f, mut g, mut ids) = (Vec::new(), Vec::new(), Vec::new());
    let mut dropped = 0;
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record.position().map_or(i + 2, |p| p.line() as usize);
        let number = |c: usize| -> Result<Option<f64>> {
            let text = record.get(c).unwrap_or("");
            if text.is_empty() || text.eq_ignore_ascii_case("na") {
                return Ok(None);
            }
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                _ => Err(Error::Parse {
                    row,
                    message: format!("{text:?} is not a finite number"),
                }),
            }
        };
        match (number(c_est)?, number(c_peer)?) {
            (Some(a), Some(b)) => {
                f.push(a);
                g.push(b);
                ids.push(match c_judge {
                    Some(c) => record.get(c).unwrap_or("").to_string(),
                    None => format!("j{i}"),
                });
            }
            _ => dropped += 1,
        }
    }
    Ok((Panel::with_judge_ids(f, g, ids)?, dropped))
}

pub fn load_panel(path: impl AsRef<Path>) -> Result<(Panel, usize)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_panel(file)
}

/// Write sets in the long format. Unlabelled judges are written as `j<index>`.
pub fn write_experiments_to<W: Write>(writer: W, sets: &[ExperimentSet]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DATASET_COLUMNS)?;
    for set in sets {
        for trial in set.trials() {
            let panel = trial.panel();
            let truth = fmt_sig(trial.truth());
            let kind = trial.kind().to_string();
            for j in 0..panel.len() {
                let judge = match panel.judge_ids() {
                    Some(ids) => ids[j].clone(),
                    None => format!("j{j}"),
                };
                w.write_record([
                    set.name(),
                    trial.id(),
                    &judge,
                    &fmt_sig(panel.f()[j]),
                    &fmt_sig(panel.g()[j]),
                    &truth,
                    &kind,
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io("<dataset writer>", e))?;
    Ok(())
}

pub fn write_experiments(path: impl AsRef<Path>, sets: &[ExperimentSet]) -> Result<()> {
    write_experiments_to(create(path.as_ref())?, sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "experiment,trial,judge,estimate,peer_estimate,truth,task\n";

    fn load(body: &str) -> Result<Loaded> {
        read_experiments(format!("{HEADER}{body}").as_bytes())
    }

    #[test]
    fn two_trials_one_set() {
        let loaded = load(
            "e,t1,a,1,2,3,continuous\n\
             e,t1,b,2,2,3,continuous\n\
             e,t2,a,5,4,6,continuous\n",
        )
        .unwrap();
        assert_eq!(loaded.sets.len(), 1);
        let set = &loaded.sets[0];
        assert_eq!(set.trials().len(), 2);
        assert_eq!(set.trials()[0].panel().f(), &[1.0, 2.0]);
        assert_eq!(loaded.report, LoadReport::default());
    }

    #[test]
    fn missing_peer_estimate_drops_judge() {
        let loaded = load(
            "e,t1,a,1,,3,continuous\n\
             e,t1,b,2,2,3,continuous\n",
        )
        .unwrap();
        assert_eq!(loaded.sets[0].trials()[0].panel().len(), 1);
        assert_eq!(loaded.report.total_excluded(), 1);
        assert_eq!(loaded.report.exclusions[0].trial, "t1");
    }

    #[test]
    fn trial_without_judges_rejected() {
        let loaded = load(
            "e,t1,a,,1,3,continuous\n\
             e,t2,b,2,2,3,continuous\n",
        )
        .unwrap();
        assert_eq!(loaded.sets[0].trials().len(), 1);
        assert_eq!(loaded.report.rejected_trials, vec![("e".into(), "t1".into())]);
    }

    #[test]
    fn inconsistent_truth_names_trial() {
        let err = load(
            "e,q7,a,0.1,0.2,0.4,unit\n\
             e,q7,b,0.1,0.2,0.5,unit\n",
        )
        .unwrap_err();
        match err {
            Error::Parse { row, message } => {
                assert_eq!(row, 3);
                assert!(message.contains("q7"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(read_experiments("".as_bytes()), Err(Error::Parse { row: 1, .. })));
        assert!(matches!(
            read_experiments("a,b,c\n1,2,3\n".as_bytes()),
            Err(Error::Parse { row: 1, .. })
        ));
        assert!(matches!(load(""), Err(Error::Parse { .. })));
        assert!(matches!(
            load("e,t,a,abc,1,1,continuous\n"),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(load("e,t,a,inf,1,1,continuous\n"), Err(Error::Parse { .. })));
        assert!(matches!(load("e,t,a,1,1,1,binary\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            load("e,t,a,1,1,1,continuous\ne,t,a,2,2,1,continuous\n"),
            Err(Error::Parse { row: 3, .. })
        ));
        assert!(load("e,t,a,1,1,1.5,unit\n").is_err());
        assert!(load("e,t1,a,1,1,1,unit\ne,t2,a,1,1,1,continuous\n").is_err());
    }

    #[test]
    fn column_order_is_free() {
        let text = "task,truth,peer_estimate,estimate,judge,trial,experiment\n\
                    continuous,3,2,1,a,t,e\n";
        let loaded = read_experiments(text.as_bytes()).unwrap();
        assert_eq!(loaded.sets[0].trials()[0].panel().g(), &[2.0]);
    }

    #[test]
    fn panel_file() {
        let (panel, dropped) =
            read_panel("estimate,peer_estimate\n10,8\n,3\n10,8\n".as_bytes()).unwrap();
        assert_eq!(panel.f(), &[10.0, 10.0]);
        assert_eq!(dropped, 1);
        assert!(read_panel("f,g\n1,2\n".as_bytes()).is_err());
        assert!(matches!(
            read_panel("estimate,peer_estimate\n".as_bytes()),
            Err(Error::EmptyPanel)
        ));
    }

    #[test]
    fn round_trip() {
        let original = load(
            "b,t2,x,0.25,0.5,1,unit\n\
             a,t1,y,1.5,2.25,3,continuous\n\
             a,t1,z,-4,7,3,continuous\n",
        )
        .unwrap();
        let mut buf = Vec::new();
        write_experiments_to(&mut buf, &original.sets).unwrap();
        let again = read_experiments(buf.as_slice()).unwrap();
        assert_eq!(original.sets, again.sets);
    }
}
