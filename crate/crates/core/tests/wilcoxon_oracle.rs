use crowd_pivot::evaluation::wilcoxon::{signed_rank_test, EXACT_LIMIT};
use crowd_pivot::evaluation::{wilcoxon_signed_rank, WilcoxonMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Average ranks of |d| over the nonzero differences, by direct comparison.
fn ranks(d: &[f64]) -> Vec<(f64, bool)> {
    let nz: Vec<f64> = d.iter().copied().filter(|&x| x != 0.0).collect();
    nz.iter()
        .map(|&x| {
            let below = nz.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let tied = nz.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            (below + (tied + 1.0) / 2.0, x > 0.0)
        })
        .collect()
}

/// P(W+ >= observed) over all 2^n sign flips.
fn brute_force(d: &[f64]) -> f64 {
    let r = ranks(d);
    let n = r.len();
    let obs: f64 = r.iter().filter(|x| x.1).map(|x| x.0).sum();
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| r[i].0).sum();
        if w >= obs - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << n) as f64
}

fn draw(rng: &mut ChaCha8Rng, n: usize, ties: bool) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if ties {
                rng.random_range(-4i32..=5) as f64
            } else {
                rng.random_range(-1.0..1.5)
            }
        })
        .collect()
}

#[test]
fn exact_matches_enumeration_up_to_twelve() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..=12 {
        for rep in 0..20 {
            let d = draw(&mut rng, n, rep % 2 == 0);
            let got = signed_rank_test(&d, WilcoxonMethod::Exact);
            if got.degenerate {
                continue;
            }
            let want = brute_force(&d);
            assert!((got.p_value - want).abs() < 1e-12, "n={n}: {} vs {want}", got.p_value);
        }
    }
}

#[test]
fn tails_are_complementary() {
    // P(W+ >= w) + P(W+ <= w) = 1 + P(W+ = w), and flipping every sign maps
    // the lower tail of one sample to the upper tail of the other.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 2..=10 {
        let d = draw(&mut rng, n, true);
        let neg: Vec<f64> = d.iter().map(|x| -x).collect();
        let up = signed_rank_test(&d, WilcoxonMethod::Exact);
        if up.degenerate {
            continue;
        }
        let down = signed_rank_test(&neg, WilcoxonMethod::Exact);
        let r = ranks(&d);
        let obs: f64 = r.iter().filter(|x| x.1).map(|x| x.0).sum();
        let m = r.len();
        let eq = (0u64..(1 << m))
            .filter(|mask| {
                let w: f64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| r[i].0).sum();
                (w - obs).abs() < 1e-9
            })
            .count() as f64
            / (1u64 << m) as f64;
        assert!((up.p_value + down.p_value - 1.0 - eq).abs() < 1e-12);
    }
}

#[test]
fn approximation_close_to_enumeration_at_twenty() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..3 {
        let d = draw(&mut rng, EXACT_LIMIT, false);
        let approx = signed_rank_test(&d, WilcoxonMethod::NormalApprox).p_value;
        let exact = brute_force(&d);
        assert!((approx - exact).abs() < 0.01, "{approx} vs {exact}");
    }
}

#[test]
fn switches_method_above_limit() {
    let a: Vec<f64> = (0..25).map(|i| 1.0 + i as f64 / 10.0).collect();
    let b = vec![0.5; 25];
    let r = wilcoxon_signed_rank(&a, &b).unwrap();
    assert_eq!(r.method, WilcoxonMethod::NormalApprox);
    assert!(r.p_value < 1e-4);
    let r = wilcoxon_signed_rank(&a[..EXACT_LIMIT], &b[..EXACT_LIMIT]).unwrap();
    assert_eq!(r.method, WilcoxonMethod::Exact);
    assert_eq!(r.p_value, 0.5f64.powi(EXACT_LIMIT as i32));
}
