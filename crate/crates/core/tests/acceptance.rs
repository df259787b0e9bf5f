//! Acceptance gate: every criterion runs at its stated tolerance and prints
//! one PASS/FAIL line. Exact criteria compare exact `Weight` values or
//! integers; Monte Carlo criteria use the stated standard-error margins.

mod common;

use std::time::{Duration, Instant};

use hcrevenue::algos::{bisect_then_random, extract_with_ordering, random_tree, trial_seeds, MubSolver};
use hcrevenue::hctree::{dasgupta_cost, revenue};
use hcrevenue::instance::{gen_matching, gen_random, total_weight, SimilarityGraph};
use hcrevenue::mub::{bisection_revenue, mub_exact};
use hcrevenue::oracle::{
    enumerate_tree_count, opt_tree_bruteforce, opt_tree_subset_dp, rand_revenue_estimate,
    MeanEstimate,
};
use hcrevenue::ordering::{
    leaf_ordering, ordering_distance, sample_orientation, weighted_ordering_cost,
    window_bisection, Orientation,
};
use hcrevenue::Weight;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn check(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn instance(rng: &mut ChaCha8Rng, n: usize) -> SimilarityGraph {
    let density = rng.gen_range(0.2..=0.9);
    let max_weight = rng.gen_range(1..=20);
    gen_random(n, density, max_weight, rng.gen()).unwrap()
}

/// Criterion 1: R(T) + C(T) = n * sum w, exactly.
fn complementarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut checks, mut violations) = (0, 0);
    for _ in 0..100 {
        let n = rng.gen_range(2..=16);
        let g = instance(&mut rng, n);
        let expected = total_weight(&g).times(n as i64);
        for k in 0..10 {
            let t = if k % 2 == 0 {
                common::uniform_tree(n, &mut rng)
            } else {
                random_tree(n, rng.gen()).unwrap()
            };
            checks += 1;
            if revenue(&g, &t).unwrap() + dasgupta_cost(&g, &t).unwrap() != expected {
                violations += 1;
            }
        }
    }
    Outcome::check(violations == 0, format!("{checks} trees, {violations} violations"))
}

/// Criterion 2: For every pair: 2 * sum over all orientations of y_e = |T_e| * 2^(n-1).
fn lemma_y_expectation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut checks, mut violations) = (0u64, 0u64);
    for n in [4usize, 6, 8] {
        for _ in 0..50 {
            let t = common::uniform_tree(n, &mut rng);
            let clusters = common::clusters(&t);
            let k = t.internal_nodes().len();
            let orderings: Vec<_> = (0..1u64 << k)
                .map(|idx| leaf_ordering(&t, &Orientation::from_index(idx, k)).unwrap())
                .collect();
            for i in 1..=n as u32 {
                // each leaf sits at (n + 1)/2 on average
                let positions: u64 = orderings.iter().map(|pi| pi.position(i).unwrap() as u64).sum();
                checks += 1;
                if 2 * positions != (n as u64 + 1) << k {
                    violations += 1;
                }
                for j in i + 1..=n as u32 {
                    let sum: u64 = orderings
                        .iter()
                        .map(|pi| ordering_distance(pi, i, j).unwrap() as u64)
                        .sum();
                    let size = common::lca_size_by_clusters(&clusters, i, j) as u64;
                    checks += 1;
                    if 2 * sum != size << k {
                        violations += 1;
                    }
                }
            }
        }
    }
    Outcome::check(violations == 0, format!("{checks} (tree, pair) checks, {violations} violations"))
}

/// Criterion 3: Window enumeration cuts an edge with y <= n/2 - 1 in exactly y of the
/// n/2 windows; every edge's mean window revenue is >= w (n - 2y) / 2.
fn cut_probability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checks, mut violations) = (0, 0);
    for k in 0..100 {
        let n = [6usize, 8, 10, 12][k % 4];
        let g = instance(&mut rng, n);
        let t = common::uniform_tree(n, &mut rng);
        let pi = leaf_ordering(&t, &sample_orientation(&t, rng.gen())).unwrap();
        let half = n / 2;
        let windows: Vec<_> = (1..=half).map(|x| window_bisection(&pi, x).unwrap()).collect();
        for e in g.edges() {
            let y = ordering_distance(&pi, e.i, e.j).unwrap() as i64;
            let cuts = windows.iter().filter(|b| b.side(e.i) != b.side(e.j)).count() as i64;
            checks += 1;
            if y < half as i64 && cuts != y {
                violations += 1;
            }
            // sum over windows of R_X(e) = (n/2 - cuts) * w * n/2;
            // mean >= w (n - 2y) / 2  <=>  2 * sum >= (n/2) w (n - 2y)
            let sum = e.w.times((half as i64 - cuts) * half as i64);
            if sum.times(2) < e.w.times(half as i64 * (n as i64 - 2 * y)) {
                violations += 1;
            }
        }
    }
    Outcome::check(violations == 0, format!("{checks} edges, {violations} violations"))
}

/// Criterion 4: (n/2) * uncut(mub_exact) >= OPT / 2 on 200 instances, n in {4, 6, 8}.
fn half_bisection() -> Outcome {
    let count = enumerate_tree_count(8).unwrap();
    if count != 135_135 {
        return Outcome::check(false, format!("enumerator visits {count} trees at n = 8"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for k in 0..200 {
        let n = [4usize, 6, 8][k % 3];
        let g = instance(&mut rng, n);
        let opt = opt_tree_bruteforce(&g).unwrap().optimum;
        let x = bisection_revenue(&g, &mub_exact(&g).unwrap()).unwrap();
        if x.times(2) < opt {
            violations += 1;
        }
        if let Some(r) = x.ratio(opt) {
            worst = worst.min(r);
        }
    }
    Outcome::check(
        violations == 0,
        format!("200 instances, {violations} violations, worst R(X)/OPT = {worst:.4}"),
    )
}

/// Criterion 5: Derandomized extraction keeps half of the tree's revenue and its
/// ordering satisfies 2 * Y_pi <= sum w_e |T_e|.
fn extraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut checks, mut violations) = (0, 0);
    for k in 0..100 {
        let n = [6usize, 8, 10][k % 3];
        let g = instance(&mut rng, n);
        for _ in 0..20 {
            let t = common::uniform_tree(n, &mut rng);
            let ex = extract_with_ordering(&g, &t).unwrap();
            let y = weighted_ordering_cost(&g, &ex.ordering).unwrap();
            checks += 1;
            if y.times(2) > dasgupta_cost(&g, &t).unwrap()
                || bisection_revenue(&g, &ex.bisection).unwrap().times(2) < revenue(&g, &t).unwrap()
            {
                violations += 1;
            }
        }
    }
    Outcome::check(violations == 0, format!("{checks} (instance, tree) pairs, {violations} violations"))
}

/// Criterion 6: Matchings: best bisection / OPT = 2/3, 3/5, 4/7, 5/9, strictly
/// decreasing and above 1/2.
fn tightness() -> Outcome {
    let expected = [(8usize, 2i64, 3i64), (12, 3, 5), (16, 4, 7), (20, 5, 9)];
    let mut notes = Vec::new();
    let mut ok = true;
    let mut previous: Option<(i64, i64)> = None;
    for (n, num, den) in expected {
        let g = gen_matching(n).unwrap();
        let b = mub_exact(&g).unwrap();
        let u = b.uncut_weight(&g).unwrap();
        ok &= u == Weight::from_int(n as i64 / 2);
        let best = bisection_revenue(&g, &b).unwrap();
        let opt = Weight::from_int((n * (n - 2) / 2) as i64);
        if n <= 16 {
            ok &= opt_tree_subset_dp(&g).unwrap().optimum == opt;
        }
        if n == 8 {
            ok &= opt_tree_bruteforce(&g).unwrap().optimum == opt;
        }
        ok &= best.times(den) == opt.times(num);
        ok &= 2 * num > den;
        if let Some((pn, pd)) = previous {
            ok &= num * pd < pn * den;
        }
        previous = Some((num, den));
        notes.push(format!("n={n}: {best}/{opt}"));
    }
    Outcome::check(ok, notes.join(", "))
}

/// Criterion 7: Exact first cut then random halving: per instance, mean R/OPT over
/// 2000 trials minus 3 standard errors is at least 0.585 (n = 10).
fn alg_ratio() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    let mut lowest = f64::INFINITY;
    let mut instances = 0;
    while instances < 30 {
        let g = instance(&mut rng, 10);
        let opt = opt_tree_subset_dp(&g).unwrap().optimum;
        if opt.is_zero() {
            continue;
        }
        instances += 1;
        let ratios: Vec<f64> = trial_seeds(rng.gen(), 2000)
            .into_iter()
            .map(|s| {
                let t = bisect_then_random(&g, MubSolver::Exact, s).unwrap();
                revenue(&g, &t).unwrap().ratio(opt).unwrap()
            })
            .collect();
        let est = MeanEstimate::from_samples(&ratios);
        let lower = est.mean - 3.0 * est.std_err;
        lowest = lowest.min(lower);
        if lower < 0.585 {
            violations += 1;
        }
    }
    Outcome::check(
        violations == 0,
        format!("30 instances x 2000 trials, {violations} violations, min(mean - 3se) = {lowest:.4}"),
    )
}

/// Criterion 8: Random halving on matchings: per-edge mean >= (n - 2)/3 - 3 se.
fn random_baseline() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, seed) in [(8usize, 81u64), (16, 82)] {
        let g = gen_matching(n).unwrap();
        let est = rand_revenue_estimate(&g, 10_000, seed).unwrap();
        let floor = (n as f64 - 2.0) / 3.0;
        let worst = est
            .per_edge
            .iter()
            .map(|e| e.mean + 3.0 * e.std_err - floor)
            .fold(f64::INFINITY, f64::min);
        ok &= worst >= 0.0;
        let mean = est.per_edge.iter().map(|e| e.mean).sum::<f64>() / est.per_edge.len() as f64;
        notes.push(format!("n={n}: mean per-edge {mean:.4} vs floor {floor:.4}"));
    }
    Outcome::check(ok, notes.join(", "))
}

/// Criterion 9: The enumerator visits (2n - 3)!! trees for n = 3..=9.
fn oracle_count() -> Outcome {
    let expected = [3u64, 15, 105, 945, 10_395, 135_135, 2_027_025];
    let got: Vec<u64> = (3..=9).map(|n| enumerate_tree_count(n).unwrap()).collect();
    Outcome::check(got == expected, format!("{got:?}"))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "complementarity identity", limit: Some(Duration::from_secs(10)), run: complementarity },
        Criterion { id: 2, name: "orientation mean of y_e equals |T_e|/2", limit: Some(Duration::from_secs(30)), run: lemma_y_expectation },
        Criterion { id: 3, name: "window cut probability", limit: Some(Duration::from_secs(30)), run: cut_probability },
        Criterion { id: 4, name: "half-revenue bisection exists", limit: Some(Duration::from_secs(300)), run: half_bisection },
        Criterion { id: 5, name: "derandomized extraction", limit: Some(Duration::from_secs(120)), run: extraction },
        Criterion { id: 6, name: "matching tightness", limit: None, run: tightness },
        Criterion { id: 7, name: "bisect-then-random ratio >= 0.585", limit: Some(Duration::from_secs(300)), run: alg_ratio },
        Criterion { id: 8, name: "random halving per-edge floor", limit: Some(Duration::from_secs(60)), run: random_baseline },
        Criterion { id: 9, name: "tree enumeration count", limit: None, run: oracle_count },
    ];

    let results: Vec<(Outcome, Duration)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|c| {
                s.spawn(move || {
                    let start = Instant::now();
                    let outcome = (c.run)();
                    (outcome, start.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let mut failed = 0;
    for (c, (outcome, elapsed)) in criteria.iter().zip(results) {
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let pass = outcome.passed && in_time;
        if !pass {
            failed += 1;
        }
        let limit = c.limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
        println!(
            "[{}] AC{} {}: {} [{:.2}s{}]",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            outcome.detail,
            elapsed.as_secs_f64(),
            limit
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
