use crowd_pivot::simulator::{draw_trial, simulate_mse_many, CrowdSpec, Structure};
use crowd_pivot::theory::{finite_mse, limiting_mse, TheoryParams};

fn spec(judges: usize, p: f64, w: f64) -> CrowdSpec {
    CrowdSpec {
        judges,
        p,
        l: CrowdSpec::l_for_weight(w, 2.0),
        sd_delta: 0.3,
        sd_epsilon: 0.2,
        sd_gamma: 0.25,
        ..CrowdSpec::default()
    }
}

#[test]
fn monte_carlo_matches_finite_formula() {
    let psis = [0.0, 1.0, 2.0, 3.0];
    for (k, &(p, w)) in [(0.2, 0.3), (0.5, 0.5), (0.8, 0.7), (1.0, 0.9)].iter().enumerate() {
        let s = spec(40, p, w);
        let params = TheoryParams::from(&s);
        let sims = simulate_mse_many(&s, &psis, 4000, 11 + k as u64).unwrap();
        for est in sims {
            let want = finite_mse(est.psi, &params).unwrap();
            let tol = 3.0 * est.standard_error;
            assert!(
                (est.mse - want).abs() <= tol,
                "p={p} w={w} psi={}: simulated {} vs formula {want} (tol {tol})",
                est.psi,
                est.mse
            );
        }
    }
}

#[test]
fn large_crowd_approaches_limit() {
    // noise-free and ψ = 0: only the shared-information term survives
    let s = CrowdSpec {
        judges: 20_000,
        p: 0.5,
        l: CrowdSpec::l_for_weight(0.5, 2.0),
        ..CrowdSpec::default()
    };
    let params = TheoryParams::from(&s);
    let est = &simulate_mse_many(&s, &[0.0], 400, 5).unwrap()[0];
    let want = limiting_mse(0.0, &params);
    assert!((est.mse - want).abs() <= 3.0 * est.standard_error + 0.01 * want);
}

#[test]
fn gap_is_pw_times_private_minus_shared() {
    // noise-free nested-symmetric crowd: f̄ - ḡ = p·w(1 - pw)(t̄ - s) over mavens
    let s = CrowdSpec {
        judges: 10,
        p: 0.4,
        l: 2.0,
        ..CrowdSpec::default()
    };
    for seed in 0..20 {
        let (trial, latent) = draw_trial(&s, seed).unwrap();
        let panel = trial.panel();
        let w = s.w();
        let pw = s.effective_p() * w;
        let mavens = latent.n_mavens;
        let t_bar: f64 = latent.t.iter().sum::<f64>() / mavens as f64;
        let frac = mavens as f64 / s.judges as f64;
        let want = frac * (w - pw * w) * (t_bar - latent.s);
        let got = panel.summary().gap;
        assert!((got - want).abs() < 1e-10, "seed {seed}: {got} vs {want}");
    }
}

#[test]
fn symmetric_ignores_p() {
    let mut a = spec(30, 0.3, 0.5);
    a.structure = Structure::Symmetric;
    let mut b = a.clone();
    b.p = 0.9;
    let (ta, _) = draw_trial(&a, 3).unwrap();
    let (tb, _) = draw_trial(&b, 3).unwrap();
    assert_eq!(ta.panel().f(), tb.panel().f());
}
