//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use knnlab::experiments::{
    hub_growth_exact, run_cover_hart, run_error_curve, run_hub_growth, run_preiss_inconsistency, run_stone_sweep, simplex,
    summarize, ExperimentConfig, StoneFamily, StoneSweepConfig,
};
use knnlab::knn_rule::{KRule, LabelledSample, TieBreakPolicy};
use knnlab::metric_spaces::{
    build_preiss_params, Alphabet, FamilySpec, FirstSymbolLabels, L1Witness, Point, SeqPoint, Space, SpaceSpec, UniformMixture,
};
use knnlab::nagata_geometry::{
    exact_subset_fraction, expected_subset_fraction_in_knn, hl_count_check, knn_ball_fractions, max_disconnected_multiplicity, merge_fraction_bound,
    nagata_violation_witness, nagata_violation_witness_with_cap, stone_count_with_placement, BallSpec, Boundary, Placement,
};
use knnlab::rng::rng_from_seed;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn harmonic(m: usize) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}

fn euclid_mixture(m: UniformMixture) -> SpaceSpec {
    SpaceSpec::new(FamilySpec::Euclidean { dim: 1, mixture: Some(m) })
}

fn consistency_run(space: SpaceSpec, seed: u64) -> Result<(f64, f64, f64, Duration), String> {
    let mut cfg = ExperimentConfig::new(space, vec![10_000], seed);
    cfg.k_rule = KRule::Sqrt;
    cfg.trials = 10;
    cfg.test_size = 500;
    let start = Instant::now();
    let rows = run_error_curve(&cfg).map_err(|e| e.to_string())?;
    let s = &summarize(&rows)[0];
    Ok((s.mean_error, s.std_error, s.bayes_error, start.elapsed()))
}

fn c01_euclidean_consistency() -> Outcome {
    let (mean, se, bayes, t) = consistency_run(euclid_mixture(UniformMixture::overlap_default()), 101)?;
    ensure(
        (bayes - 0.05).abs() < 1e-12 && (mean - bayes).abs() <= 0.05 && t < Duration::from_secs(60),
        format!("mean error {mean:.4} (s.e. {se:.4}) vs bayes {bayes:.4}, tolerance 0.05, {:.1}s", t.as_secs_f64()),
    )
}

fn c02_ultrametric_consistency() -> Outcome {
    let space = SpaceSpec::new(FamilySpec::Ultrametric {
        alphabet: Alphabet::new(vec![4, 2]).unwrap(),
        eta: Some(FirstSymbolLabels::new(vec![0.1, 0.2, 0.9, 0.7]).unwrap()),
    });
    let (mean, se, bayes, t) = consistency_run(space, 102)?;
    // independent closed form: mean of min(η, 1 − η) over the four first symbols
    let oracle = (0.1 + 0.2 + 0.1 + 0.3) / 4.0;
    ensure(
        (bayes - oracle).abs() < 1e-12 && (mean - bayes).abs() <= 0.05,
        format!("mean error {mean:.4} (s.e. {se:.4}) vs bayes {bayes:.4}, tolerance 0.05, {:.1}s", t.as_secs_f64()),
    )
}

fn c03_preiss_inconsistency() -> Outcome {
    let mut cfg = ExperimentConfig::new(SpaceSpec::new(FamilySpec::Preiss { levels: 12 }), vec![4096], 103);
    cfg.k_rule = KRule::Fixed(64);
    cfg.trials = 10;
    cfg.test_size = 200;
    let start = Instant::now();
    let rows = run_preiss_inconsistency(&cfg).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let z = build_preiss_params(12).unwrap().normalizer();
    let s = &summarize(&rows)[0];
    let bayes_zero = rows.iter().all(|r| r.bayes_error == 0.0);
    ensure(
        s.mean_error >= 0.5 / z && bayes_zero && s.mean_aux >= 0.9 && t < Duration::from_secs(300),
        format!(
            "mean error {:.4} vs 0.5/Z = {:.4}; bayes column all zero: {bayes_zero}; class-1 predicted 0 at rate {:.4}; {:.1}s",
            s.mean_error,
            0.5 / z,
            s.mean_aux,
            t.as_secs_f64()
        ),
    )
}

fn c04_hub_growth() -> Outcome {
    let rows = run_hub_growth(100, 2000, 104).map_err(|e| e.to_string())?;
    let last = rows.last().unwrap();
    let h99 = harmonic(99);
    let e2 = hub_growth_exact(2).map_err(|e| e.to_string())?;
    let e3 = hub_growth_exact(3).map_err(|e| e.to_string())?;
    ensure(
        last.n == 100 && (last.mean_hub_count - h99).abs() <= 3.0 * last.stderr && e2 == 1.0 && e3 == 1.5,
        format!(
            "n=100 mean {:.4} (s.e. {:.4}) vs H_99 = {h99:.4}; exact n=2: {e2}, n=3: {e3}",
            last.mean_hub_count, last.stderr
        ),
    )
}

fn c05_stone_line() -> Outcome {
    let cfg = StoneSweepConfig {
        family: StoneFamily::Sampled {
            space: SpaceSpec::new(FamilySpec::Euclidean { dim: 1, mixture: None }),
        },
        n: 200,
        k_list: vec![1, 5, 25],
        trials: 1000,
        policy: TieBreakPolicy::UniformRandom,
        placement: Placement::InPlace,
        seed: 105,
    };
    let rows = run_stone_sweep(&cfg).map_err(|e| e.to_string())?;
    let detail = rows
        .iter()
        .map(|r| format!("k={}: max {} (bound {})", r.k, r.max_count, 2 * r.k))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(rows.iter().all(|r| r.max_count <= 2 * r.k), detail)
}

fn c06_adversarial_ties() -> Outcome {
    let (sample, space, x) = simplex(50).unwrap();
    let mut rng = rng_from_seed(106);
    let adversarial =
        stone_count_with_placement(&sample, &space, &x, 1, TieBreakPolicy::IndexOrder, Placement::Front, &mut rng).unwrap();
    let trials = 2000;
    let counts: Vec<f64> = (0..trials)
        .map(|_| {
            stone_count_with_placement(&sample, &space, &x, 1, TieBreakPolicy::UniformRandom, Placement::Front, &mut rng)
                .unwrap() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / trials as f64;
    let se = (counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (trials - 1) as f64 / trials as f64).sqrt();
    ensure(
        adversarial == 49 && (mean - 1.0).abs() <= 3.0 * se,
        format!("IndexOrder count {adversarial}; UniformRandom mean {mean:.4} (s.e. {se:.4}) vs 1"),
    )
}

fn random_ultrametric(rng: &mut impl Rng, n: usize) -> (Vec<Point>, Space) {
    let pts = (0..n)
        .map(|_| Point::finite_seq((0..5).map(|_| rng.random_range(1..=3)).collect()))
        .collect();
    (pts, Space::ultrametric(Alphabet::uniform(3).unwrap()))
}

fn random_line(rng: &mut impl Rng, n: usize) -> (Vec<Point>, Space) {
    // coarse grid so that equal distances occur
    let pts = (0..n).map(|_| Point::real(f64::from(rng.random_range(0..40u32)) / 8.0)).collect();
    (pts, Space::euclidean(1))
}

/// Realised pairwise distances (deduplicated, positive) followed by infinity.
fn scales(pts: &[Point], space: &Space) -> Vec<f64> {
    let mut s: Vec<f64> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let d = space.distance(p, q).unwrap();
            if d > 0.0 {
                s.push(d);
            }
        }
    }
    s.sort_by(f64::total_cmp);
    s.dedup();
    s.push(f64::INFINITY);
    s
}

fn c07_witness_correctness() -> Outcome {
    let mut rng = rng_from_seed(107);
    let mut ultra_hits = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..=30);
        let (pts, space) = random_ultrametric(&mut rng, n);
        for s in scales(&pts, &space) {
            if nagata_violation_witness(&pts, &space, 0, s).unwrap().is_some() {
                ultra_hits += 1;
            }
        }
    }
    let three: Vec<Point> = [-1.0, 0.0, 1.0].into_iter().map(Point::real).collect();
    let w = nagata_violation_witness(&three, &Space::euclidean(1), 0, f64::INFINITY).unwrap();
    let three_ok = w.as_ref().is_some_and(|w| {
        w.center == Point::real(0.0) && w.points == vec![Point::real(-1.0), Point::real(1.0)] && w.pair_distances[0].2 == 2.0
    });
    let mut line_hits = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..=20);
        let pts: Vec<Point> = (0..n).map(|_| Point::real(rng.random())).collect();
        if nagata_violation_witness(&pts, &Space::euclidean(1), 1, f64::INFINITY).unwrap().is_some() {
            line_hits += 1;
        }
    }
    ensure(
        ultra_hits == 0 && three_ok && line_hits == 0,
        format!("ultrametric witnesses {ultra_hits}/100 samples; {{-1,0,1}} witness found: {three_ok}; line delta=1 witnesses {line_hits}/100"),
    )
}

fn c08_disconnected_equivalence() -> Outcome {
    let mut rng = rng_from_seed(108);
    let (mut cases, mut mismatches) = (0usize, 0usize);
    let mut first_mismatch = String::new();
    for inst in 0..50 {
        let n = rng.random_range(3..=12);
        let (pts, space) = if inst % 2 == 0 {
            random_ultrametric(&mut rng, n)
        } else {
            random_line(&mut rng, n)
        };
        // the instance itself, plus every subset of size >= 2 when small enough
        let subsets: Vec<Vec<Point>> = if n <= 8 {
            (1u32..1 << n)
                .filter(|m| m.count_ones() >= 2)
                .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).map(|i| pts[i].clone()).collect())
                .collect()
        } else {
            vec![pts.clone()]
        };
        for sub in &subsets {
            for s in scales(sub, &space) {
                let mult = max_disconnected_multiplicity(sub, &space, s, Boundary::Closed, 12).unwrap();
                for delta in 0..=3 {
                    let no_witness = nagata_violation_witness(sub, &space, delta, s).unwrap().is_none();
                    cases += 1;
                    if no_witness != (mult <= delta + 1) {
                        mismatches += 1;
                        if first_mismatch.is_empty() {
                            first_mismatch = format!("; first: {sub:?} s={s} delta={delta} mult={mult}");
                        }
                    }
                }
            }
        }
    }
    ensure(mismatches == 0, format!("{cases} (point set, scale, delta) cases, {mismatches} mismatches{first_mismatch}"))
}

fn c09_heavy_ball_count() -> Outcome {
    let mut rng = rng_from_seed(109);
    let (mut checks, mut violations, mut uncertified) = (0usize, 0usize, 0usize);
    for _ in 0..10_000 {
        let n = rng.random_range(1..=50);
        let (pts, space) = random_ultrametric(&mut rng, n);
        if nagata_violation_witness_with_cap(&pts, &space, 0, f64::INFINITY, 50).unwrap().is_some() {
            uncertified += 1;
            continue;
        }
        let mask: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
        let balls: Vec<BallSpec> = (0..n)
            .map(|i| {
                let r = 0.5f64.powi(rng.random_range(1..=6));
                if rng.random_bool(0.5) {
                    BallSpec::open(i, r)
                } else {
                    BallSpec::closed(i, r)
                }
            })
            .collect();
        for alpha in [0.1, 0.3, 0.5, 1.0] {
            let chk = hl_count_check(&pts, &space, &mask, &balls, alpha, 0, f64::INFINITY).unwrap();
            checks += 1;
            violations += usize::from(!chk.ok);
        }
    }
    ensure(
        violations == 0 && uncertified == 0,
        format!("{checks} checks over 10000 certified instances, {violations} violations, {uncertified} failed certification"),
    )
}

fn c10_merge_grid() -> Outcome {
    // exact premise in units of 1/20, independent of the checker's float arithmetic
    let (mut cells, mut failures) = (0usize, 0usize);
    for t1 in 0..=20i64 {
        for t2 in 0..=20 - t1 {
            if t1 + t2 == 0 {
                continue;
            }
            for alpha in 0..=20i64 {
                for a1 in 0..=alpha {
                    for a2 in 0..=20i64 {
                        if t1 * a1 + (20 - t1) * a2 > 20 * alpha {
                            continue;
                        }
                        cells += 1;
                        let f = |v: i64| v as f64 * 0.05;
                        if !matches!(merge_fraction_bound(f(t1), f(t2), f(a1), f(a2), f(alpha)), Ok(true)) {
                            failures += 1;
                        }
                    }
                }
            }
        }
    }
    ensure(failures == 0, format!("{cells} premise-satisfying cells, {failures} failures"))
}

fn c11_subset_fraction() -> Outcome {
    let mut rng = rng_from_seed(111);
    let (mut instances, mut failures, mut exact_failures, mut worst) = (0usize, 0usize, 0usize, f64::NEG_INFINITY);
    let space = Space::euclidean(1);
    let x = Point::real(0.0);
    while instances < 1000 {
        let n = rng.random_range(5..=40);
        let pts: Vec<Point> = (0..n).map(|_| Point::real(f64::from(rng.random_range(-4..=4i32)))).collect();
        let sample = LabelledSample::unlabelled(pts);
        let mask: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
        let k = rng.random_range(1..=n);
        let alpha = 0.3;
        let (closed, open) = knn_ball_fractions(&sample, &space, &mask, &x, k).unwrap();
        if closed > alpha || open > alpha {
            continue;
        }
        instances += 1;
        let est = expected_subset_fraction_in_knn(&sample, &space, &mask, &x, k, 10_000, &mut rng).unwrap();
        let slack = est.mean - (alpha + 3.0 * est.std_error);
        worst = worst.max(slack);
        failures += usize::from(slack > 0.0);
        let exact = exact_subset_fraction(&sample, &space, &mask, &x, k).unwrap();
        exact_failures += usize::from(exact > alpha + 1e-12);
    }
    ensure(
        failures == 0 && exact_failures == 0,
        format!(
            "{instances} instances at alpha = 0.3, {failures} above alpha + 3 s.e. (closest {worst:.5}), {exact_failures} exact expectations above alpha"
        ),
    )
}

fn c12_cover_hart() -> Outcome {
    let mut cfg = ExperimentConfig::new(euclid_mixture(UniformMixture::unit_interval()), vec![100, 10_000], 112);
    cfg.k_rule = KRule::Sqrt;
    cfg.test_size = 100;
    let rows = run_cover_hart(&cfg).map_err(|e| e.to_string())?;
    let (small, large) = (rows[0].max_radius, rows[1].max_radius);
    ensure(
        large < 0.05 && large < small,
        format!("max radius {small:.5} at n=100, {large:.5} at n=10^4"),
    )
}

/// ℓ² distance between truncated embeddings `Σ_{i ≤ depth} 2^{-i} e_{prefix_i}`.
fn embedded_distance(p: &SeqPoint, q: &SeqPoint, alphabet: &Alphabet, depth: usize) -> f64 {
    use std::collections::HashMap;
    let embed = |s: &SeqPoint| {
        let mut v: HashMap<Vec<u64>, f64> = HashMap::new();
        let mut prefix = Vec::new();
        for i in 0..depth {
            match s.symbol(i, alphabet) {
                Some(sym) => {
                    prefix.push(sym);
                    v.insert(prefix.clone(), 0.5f64.powi(i as i32 + 1));
                }
                None => break,
            }
        }
        v
    };
    let (a, b) = (embed(p), embed(q));
    let mut sq = 0.0;
    for (key, va) in &a {
        sq += (va - b.get(key).copied().unwrap_or(0.0)).powi(2);
    }
    for (key, vb) in &b {
        if !a.contains_key(key) {
            sq += vb * vb;
        }
    }
    sq.sqrt()
}

fn c13_preiss_closed_forms() -> Outcome {
    let params = build_preiss_params(12).unwrap();
    let space = Space::preiss(params.clone());
    let alphabet = params.alphabet();
    let mut rng = rng_from_seed(113);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        // a shared prefix of random length, then independent continuations
        let shared: Vec<u64> = (0..rng.random_range(0..10)).map(|i| rng.random_range(1..=alphabet.size(i))).collect();
        let make = |rng: &mut rand_chacha::ChaCha8Rng| -> SeqPoint {
            if rng.random_bool(0.4) {
                let mut s = shared.clone();
                let level = rng.random_range(shared.len().max(1)..=12);
                while s.len() < level {
                    s.push(rng.random_range(1..=alphabet.size(s.len())));
                }
                s.truncate(level);
                SeqPoint::finite(s)
            } else {
                let mut p = SeqPoint::lazy(rng.random(), 30, alphabet);
                for (i, &sym) in shared.iter().enumerate() {
                    p.symbols[i] = sym;
                }
                p
            }
        };
        let (p, q) = (make(&mut rng), make(&mut rng));
        let closed = space.distance(&Point::Seq(p.clone()), &Point::Seq(q.clone())).unwrap();
        let oracle = embedded_distance(&p, &q, alphabet, 60);
        worst = worst.max((closed - oracle).abs());
    }
    let ratios: Vec<f64> = (1..=params.levels())
        .map(|k| {
            let (m1, m0) = params.ball_masses(k);
            m1 / m0
        })
        .collect();
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    ensure(
        worst <= 1e-9 && decreasing,
        format!("max |closed form - embedding| {worst:.2e} over 1000 pairs; ratio strictly decreasing over {} levels: {decreasing}", ratios.len()),
    )
}

fn c14_l1_witness() -> Outcome {
    let w = L1Witness::new(0.9, 0.4).unwrap();
    let space = w.space();
    let z = w.centre();
    let (mut pairs, mut bad, mut disagree) = (0usize, 0usize, 0usize);
    let mut min_margin = f64::INFINITY;
    for i in 1..=50u64 {
        for j in 1..=50u64 {
            if i == j {
                continue;
            }
            pairs += 1;
            let (a, b) = w.margins(i, j);
            min_margin = min_margin.min(a.min(b));
            bad += usize::from(!(a > 0.0 && b > 0.0));
            // the margins must agree with the generic metric up to its rounding
            let d = space.distance(&w.point(i), &w.point(j)).unwrap();
            let di = space.distance(&w.point(i), &z).unwrap();
            let dj = space.distance(&w.point(j), &z).unwrap();
            if (a - (d - di)).abs() > 1e-12 || (b - (d - dj)).abs() > 1e-12 {
                disagree += 1;
            }
        }
    }
    ensure(
        bad == 0 && disagree == 0,
        format!("{pairs} ordered pairs, {bad} violations, smallest margin {min_margin:.3e}, {disagree} disagreements with the metric"),
    )
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_knnlab"))
        .args(args)
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("`knnlab {}` exited with {status}", args.join(" ")))
    }
}

fn c15_reproducible_csv() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [(&str, &[&str]); 5] = [
        ("consistency", &["consistency", "--n", "200,800", "--trials", "3", "--test-size", "100"]),
        ("preiss", &["preiss", "--levels", "8", "--n", "1024", "--k", "16", "--trials", "2", "--test-size", "50"]),
        ("hub", &["hub", "--n", "30", "--trials", "200"]),
        ("stone", &["stone", "--n", "60", "--k", "1,3", "--trials", "20"]),
        ("cover-hart", &["cover-hart", "--n", "100,1000", "--test-size", "20"]),
    ];
    let mut identical = Vec::new();
    for (name, args) in runs {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{name}-{rep}.csv"));
            let mut full: Vec<&str> = args.to_vec();
            let out_str = out.to_str().unwrap().to_string();
            full.extend(["--seed", "115", "--out"]);
            let owned: Vec<String> = full.iter().map(|s| s.to_string()).chain([out_str]).collect();
            run_cli(&owned.iter().map(String::as_str).collect::<Vec<_>>())?;
            outputs.push(std::fs::read(Path::new(&out)).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            return Err(format!("{name}: reruns differ"));
        }
        identical.push(name);
    }
    Ok(format!("byte-identical reruns: {}", identical.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 15] = [
        ("euclidean consistency", c01_euclidean_consistency),
        ("ultrametric consistency", c02_ultrametric_consistency),
        ("preiss inconsistency", c03_preiss_inconsistency),
        ("harmonic hub growth", c04_hub_growth),
        ("stone bound on the line", c05_stone_line),
        ("adversarial ties on the simplex", c06_adversarial_ties),
        ("witness search correctness", c07_witness_correctness),
        ("witness vs disconnected multiplicity", c08_disconnected_equivalence),
        ("heavy-ball count bound", c09_heavy_ball_count),
        ("fraction merging grid", c10_merge_grid),
        ("subset fraction under random ties", c11_subset_fraction),
        ("cover-hart radius", c12_cover_hart),
        ("preiss closed forms and domination", c13_preiss_closed_forms),
        ("l1-sum witness", c14_l1_witness),
        ("reproducible csv output", c15_reproducible_csv),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("acceptance {:02} {name}: PASS ({d}) [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("acceptance {:02} {name}: FAIL ({d}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
