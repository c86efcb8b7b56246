use crowd_pivot::evaluation::bootstrap_curves;
use crowd_pivot::{ExperimentSet, MethodId, Panel, TaskKind, Trial};

#[test]
fn three_judge_bootstrap_matches_all_resamples() {
    let f = [1.0, 4.0, 10.0];
    let truth = 3.0;
    let panel = Panel::new(f.to_vec(), vec![2.0, 4.0, 7.0]).unwrap();
    let set = ExperimentSet::new(
        "tiny",
        vec![Trial::new("t", panel, truth, TaskKind::Continuous).unwrap()],
    )
    .unwrap();

    // every ordered resample of size 3 is equally likely
    let mut errs = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                errs.push(((f[a] + f[b] + f[c]) / 3.0 - truth).abs());
            }
        }
    }
    let mean = errs.iter().sum::<f64>() / 27.0;
    let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 27.0;

    let b = 5000;
    let curve = bootstrap_curves(&set, &[MethodId::Mean], &[3], b, 77).unwrap();
    let se = (var / b as f64).sqrt();
    let got = curve.mean_rmse[0][0];
    assert!((got - mean).abs() <= 3.0 * se, "{got} vs {mean} (se {se})");
}
