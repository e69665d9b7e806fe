//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p rrtcut --test acceptance`; pass criterion ids
//! (e.g. `-- C2 C7`) to run a subset.

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rrtcut::{parse_args, render, run_experiment};
use rrtcut_core::coupling::{
    build_coupled_pair, root_degree_window, sample_conditioned_bernoulli_with_budget, CouplingProfile,
};
use rrtcut_core::cutting::{record_count, targeted_cut, uniform_edge_cut};
use rrtcut_core::oracle::SmallNOracle;
use rrtcut_core::rng::mix64;
use rrtcut_core::stats::{
    concentration_bound, estimate_tail_moments, estimate_tv_to_poisson, gamma_trend, harmonic,
    root_degree_distribution_exact, Accumulator, GammaTrendPoint, GAMMA,
};
use rrtcut_core::{Error, Lane, MonteCarlo, RecursiveTree};

const SEED: u64 = 20_261_018;

fn seed_for(criterion: u64) -> u64 {
    mix64(SEED ^ criterion)
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn histogram(values: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut h = Vec::new();
    for v in values {
        if h.len() <= v {
            h.resize(v + 1, 0);
        }
        h[v] += 1;
    }
    h
}

/// Worst `|p_hat - p| / SE` over cells; `None` if a cell with exact
/// probability 0 or 1 is contradicted.
fn worst_cell(counts: &[u64], pmf: &[f64], reps: u64) -> Option<f64> {
    let r = reps as f64;
    let mut worst = 0.0f64;
    for k in 0..counts.len().max(pmf.len()) {
        let freq = counts.get(k).copied().unwrap_or(0) as f64 / r;
        let p = pmf.get(k).copied().unwrap_or(0.0);
        if p < 1e-12 || p > 1.0 - 1e-12 {
            if (freq - p.round()).abs() > 0.0 {
                return None;
            }
            continue;
        }
        worst = worst.max((freq - p).abs() / (p * (1.0 - p) / r).sqrt());
    }
    Some(worst)
}

fn c1_small_n_oracle() -> Outcome {
    const REPS: u64 = 100_000;
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    let mut ok = true;
    for n in 2..=7 {
        let exact = SmallNOracle::compute(n).unwrap();
        let mc = MonteCarlo::new(seed_for(100 + n as u64), REPS);
        let runs = mc.map(|_, rng| {
            let tree = RecursiveTree::generate(n, &mut rng.fork(Lane::Tree)).unwrap();
            let cuts = targeted_cut(&tree, &mut rng.fork(Lane::Ties)).cuts;
            (tree.degree_tail(), cuts)
        });
        let mut check = |label: String, z: Option<f64>| match z {
            Some(z) => {
                worst = worst.max(z);
                if z > 3.0 {
                    ok = false;
                    notes.push(format!("{label} {z:.2}SE"));
                }
            }
            None => {
                ok = false;
                notes.push(format!("{label} impossible outcome"));
            }
        };
        check(
            format!("n={n} D"),
            worst_cell(&histogram(runs.iter().map(|r| r.0.root_degree)), &exact.root_degree_pmf, REPS),
        );
        for d in 0..n {
            check(
                format!("n={n} Z>={d}"),
                worst_cell(&histogram(runs.iter().map(|r| r.0.at_least(d))), &exact.tail_pmf[d], REPS),
            );
        }
        let acc: Accumulator = runs.iter().map(|r| r.1 as f64).collect();
        let var: f64 = exact
            .targeted_cuts_pmf
            .iter()
            .enumerate()
            .map(|(c, p)| (c as f64 - exact.expected_targeted_cuts).powi(2) * p)
            .sum();
        let se = (var / REPS as f64).sqrt();
        let dev = (acc.mean() - exact.expected_targeted_cuts).abs();
        if se == 0.0 {
            check(format!("n={n} E[X]"), (dev == 0.0).then_some(0.0));
        } else {
            check(format!("n={n} E[X]"), Some(dev / se));
        }
        let h = harmonic(n - 1);
        if (exact.expected_root_degree() - h).abs() > 1e-12 {
            ok = false;
            notes.push(format!("n={n} exact E[D] != H_(n-1)"));
        }
    }
    let e3 = SmallNOracle::compute(3).unwrap().expected_targeted_cuts;
    if e3 != 0.25 {
        ok = false;
        notes.push(format!("exact E[X_3] = {e3}"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        ok = false;
        notes.push("runtime over 2 min".into());
    }
    Outcome::new(
        ok,
        format!(
            "worst deviation {worst:.2} SE (limit 3), exact E[X_3] = {e3}, {:.1}s {}",
            elapsed.as_secs_f64(),
            notes.join("; ")
        ),
    )
}

fn c2_factorial_moments() -> Outcome {
    let start = Instant::now();
    let n = 1 << 14;
    let d_values: Vec<usize> = (4..=12).collect();
    let est = estimate_tail_moments(n, &d_values, &[1, 2], &MonteCarlo::new(seed_for(2), 5000)).unwrap();
    let mut ok = true;
    let mut worst = String::new();
    let mut worst_slack = f64::INFINITY;
    for e in &est {
        let theory = 2f64.powi((14 - e.d as i32) * e.k as i32);
        let tol = (3.0 * e.std_error).max(0.1 * theory);
        let dev = (e.estimate - theory).abs();
        if dev > tol {
            ok = false;
        }
        if tol - dev < worst_slack {
            worst_slack = tol - dev;
            worst = format!("d={} k={}: {:.3} vs {} (tol {:.3})", e.d, e.k, e.estimate, theory, tol);
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed <= Duration::from_secs(120);
    Outcome::new(ok, format!("tightest {worst}, {:.1}s", elapsed.as_secs_f64()))
}

fn c3_targeted_bound() -> Outcome {
    let mut total = 0u64;
    let mut violations = 0u64;
    let mut summary = Vec::new();
    for (j, n) in [1_000usize, 10_000, 100_000, 1_000_000].into_iter().enumerate() {
        let mc = MonteCarlo::new(seed_for(300 + j as u64), 1000);
        let runs = mc.map(|_, rng| {
            let tree = RecursiveTree::generate(n, &mut rng.fork(Lane::Tree)).unwrap();
            let r = targeted_cut(&tree, &mut rng.fork(Lane::Ties));
            (r.cuts, r.z_at_root_degree.unwrap(), tree.degree_tail().at_root_degree())
        });
        let mut max_ratio: f64 = 0.0;
        for (cuts, z, z_check) in &runs {
            total += 1;
            if cuts > z || z != z_check {
                violations += 1;
            }
            max_ratio = max_ratio.max(*cuts as f64 / *z as f64);
        }
        let mean_cuts = runs.iter().map(|r| r.0 as f64).sum::<f64>() / runs.len() as f64;
        summary.push(format!("n={n}: mean X={mean_cuts:.1}, max X/Z={max_ratio:.2}"));
    }
    Outcome::new(
        violations == 0,
        format!("{violations}/{total} violations; {}", summary.join(", ")),
    )
}

fn ladder() -> &'static (Vec<GammaTrendPoint>, Duration) {
    static LADDER: OnceLock<(Vec<GammaTrendPoint>, Duration)> = OnceLock::new();
    LADDER.get_or_init(|| {
        let start = Instant::now();
        let points = gamma_trend(
            &[1_000, 10_000, 100_000, 1_000_000],
            &MonteCarlo::new(seed_for(4), 1000),
            2,
        )
        .unwrap();
        (points, start.elapsed())
    })
}

fn c4_gamma_trend() -> Outcome {
    let (points, elapsed) = ladder();
    let first = (points[0].mean_ratio - GAMMA).abs();
    let last = (points[3].mean_ratio - GAMMA).abs();
    let tails: Vec<f64> = points.iter().map(|p| p.tail_probability[2].1).collect();
    let mean_ok = last < first;
    let tails_ok = tails.windows(2).all(|w| w[1] <= w[0]);
    let time_ok = *elapsed <= Duration::from_secs(900);
    Outcome::new(
        mean_ok && tails_ok && time_ok,
        format!(
            "|mean-g| {first:.4} (1e3) -> {last:.4} (1e6) [{}]; P(outside g+-0.15) {:?} [{}]; {:.1}s",
            if mean_ok { "ok" } else { "not decreasing" },
            tails,
            if tails_ok { "non-increasing" } else { "NOT non-increasing" },
            elapsed.as_secs_f64()
        ),
    )
}

fn c5_log_moments() -> Outcome {
    let (points, _) = ladder();
    let p = &points[3];
    let ratios: Vec<f64> = (0..2).map(|k| p.kth_moment[k] / p.kth_reference[k]).collect();
    let ok = ratios.iter().all(|r| (0.6..=1.6).contains(r));
    Outcome::new(ok, format!("n=1e6 ratios k=1: {:.3}, k=2: {:.3} (window [0.6, 1.6])", ratios[0], ratios[1]))
}

fn c6_uniform_cut_scale() -> Outcome {
    let start = Instant::now();
    let n = 100_000;
    let mc = MonteCarlo::new(seed_for(6), 2000);
    let acc: Accumulator = mc
        .map(|_, rng| {
            let tree = RecursiveTree::generate(n, &mut rng.fork(Lane::Tree)).unwrap();
            uniform_edge_cut(&tree, &mut rng.fork(Lane::Cuts)).cuts as f64
        })
        .into_iter()
        .collect();
    let ratio = acc.mean() * (n as f64).ln() / n as f64;
    let elapsed = start.elapsed();
    let ok = (1.05..=1.35).contains(&ratio) && elapsed <= Duration::from_secs(300);
    Outcome::new(
        ok,
        format!(
            "mean X = {:.1} +- {:.1}, mean X ln n / n = {ratio:.4} (window [1.05, 1.35]), {:.1}s",
            acc.mean(),
            acc.std_error(),
            elapsed.as_secs_f64()
        ),
    )
}

fn c7_records() -> Outcome {
    let n = 1000;
    let mc = MonteCarlo::new(seed_for(7), 10_000);
    let pairs = mc.map(|_, rng| {
        // Independent trees for the two estimators.
        let t1 = RecursiveTree::generate(n, &mut rng.fork(Lane::Tree)).unwrap();
        let t2 = RecursiveTree::generate(n, &mut rng.fork(Lane::Attach)).unwrap();
        (
            uniform_edge_cut(&t1, &mut rng.fork(Lane::Cuts)).cuts as f64,
            record_count(&t2, &mut rng.fork(Lane::Labels)).cuts as f64,
        )
    });
    let a: Accumulator = pairs.iter().map(|p| p.0).collect();
    let b: Accumulator = pairs.iter().map(|p| p.1).collect();
    let pooled = (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
    let diff = (a.mean() - b.mean()).abs();
    Outcome::new(
        diff <= 3.0 * pooled,
        format!(
            "uniform {:.2}, records {:.2}, |diff| {diff:.3} vs 3 pooled SE {:.3}",
            a.mean(),
            b.mean(),
            3.0 * pooled
        ),
    )
}

fn c8_coupling_invariants() -> Outcome {
    let (n, eps) = (10_000, 0.5);
    let window = root_degree_window(n, eps).unwrap();
    let mc = MonteCarlo::new(seed_for(8), 10_000);
    let failures = mc.map(|_, rng| {
        let s = build_coupled_pair(n, eps, rng).unwrap();
        let mut bad = Vec::new();
        let ln = (n as f64).ln();
        if !(window.contains(&s.d_cond) && (s.d_cond as f64) > (1.0 - eps) * ln && (s.d_cond as f64) < (1.0 + eps) * ln) {
            bad.push("window");
        }
        if (2..=n).any(|i| s.b[i] == s.b_cond[i] && s.tree.parent(i) != s.tree_cond.parent(i)) {
            bad.push("parent agreement");
        }
        let p = CouplingProfile::new(&s);
        if p.differing_degree_count > p.sym_diff_root_children {
            bad.push("degree differences");
        }
        let top = p.tail.max_degree.max(p.tail_cond.max_degree) + 1;
        for d in 0..=top {
            let w = p.at(d);
            if w.z_d.abs_diff(w.z_d_cond) > 1 + w.sym_diff_root_children {
                bad.push("tail difference");
            }
            if w.w < 1.0 / n as f64 || w.w > n as f64 {
                bad.push("W range");
            }
        }
        if p.at(0).w != 1.0 {
            bad.push("W_0");
        }
        bad
    });
    let failed: Vec<_> = failures.iter().filter(|f| !f.is_empty()).collect();
    Outcome::new(
        failed.is_empty(),
        format!(
            "{} of {} samples violate an invariant{}",
            failed.len(),
            failures.len(),
            failed.first().map(|f| format!(" (first: {f:?})")).unwrap_or_default()
        ),
    )
}

fn c9_rejection_sampler() -> Outcome {
    let (n, eps) = (10_000, 0.5);
    let attempts = 10_000u64;
    let exact = root_degree_distribution_exact(n).unwrap();
    let window = root_degree_window(n, eps).unwrap();
    let p = exact.prob_in(window);
    let outcomes = MonteCarlo::new(seed_for(9), attempts).map(|_, rng| {
        match sample_conditioned_bernoulli_with_budget(n, eps, rng, 1) {
            Ok(_) => true,
            Err(Error::ResourceExhausted(_)) => false,
            Err(e) => panic!("{e}"),
        }
    });
    let rate = outcomes.iter().filter(|&&a| a).count() as f64 / attempts as f64;
    let se = (p * (1.0 - p) / attempts as f64).sqrt();
    let outside = 1.0 - p;
    let bound = concentration_bound(n, eps);
    let ok = (rate - p).abs() <= 3.0 * se && outside <= bound;
    Outcome::new(
        ok,
        format!(
            "acceptance {rate:.4} vs exact {p:.4} ({:.2} SE); P(D outside) {outside:.4} <= bound {bound:.4}",
            (rate - p).abs() / se
        ),
    )
}

fn c10_poisson_tv() -> Outcome {
    let start = Instant::now();
    let n = 1 << 17;
    let d = (1.2 * (n as f64).ln()).ceil() as usize;
    let est = estimate_tv_to_poisson(n, d, &MonteCarlo::new(seed_for(10), 100_000)).unwrap();
    Outcome::new(
        est.tv <= 0.15,
        format!(
            "d = {d}, mu = {}, empirical mean {:.3}, TV = {:.4} (limit 0.15), {:.1}s",
            est.mu,
            est.empirical_mean,
            est.tv,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn c11_determinism() -> Outcome {
    let specs: [&[&str]; 6] = [
        &["cut-targeted", "--n", "5000", "--reps", "64"],
        &["cut-uniform", "--n", "5000", "--reps", "64", "--format", "json"],
        &["coupling", "--n", "3000", "--reps", "32", "--eps", "0.5", "--d", "0,5,9"],
        &["moments", "--n", "4096", "--reps", "64", "--d", "3,6,9"],
        &["gamma-trend", "--n-ladder", "1000,5000", "--reps", "128", "--format", "json"],
        &["tv", "--n", "4096", "--reps", "200"],
    ];
    let mut mismatches = Vec::new();
    for args in specs {
        let mut outputs = Vec::new();
        for workers in ["1", "3", "8"] {
            let mut argv = vec!["rrtcut"];
            argv.extend_from_slice(args);
            argv.extend_from_slice(&["--seed", "11", "--workers", workers]);
            let spec = parse_args(argv, None).unwrap();
            let table = run_experiment(&spec).unwrap();
            outputs.push(render(&table, &spec).unwrap());
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(args[0]);
        }
    }
    // The binary itself, twice, with different worker counts.
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for workers in ["1", "8"] {
        let path = dir.path().join(format!("out{workers}.csv"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_rrtcut"))
            .args(["records", "--n", "2000", "--reps", "100", "--seed", "5", "--workers", workers, "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        files.push(std::fs::read(&path).unwrap());
    }
    if files[0] != files[1] {
        mismatches.push("binary records");
    }
    Outcome::new(
        mismatches.is_empty(),
        format!("6 experiments x workers {{1,3,8}} plus the binary run twice; mismatches: {mismatches:?}"),
    )
}

type Check = (&'static str, &'static str, fn() -> Outcome);

const CHECKS: [Check; 11] = [
    ("C1", "exact small-n oracle equivalence", c1_small_n_oracle),
    ("C2", "factorial moments of Z_{>=d} at n=2^14", c2_factorial_moments),
    ("C3", "targeted cuts bounded by Z_{>=D}", c3_targeted_bound),
    ("C4", "ln Z_{>=D} / ln n trend towards 1 - ln 2", c4_gamma_trend),
    ("C5", "moments of ln Z_{>=D} at n=1e6", c5_log_moments),
    ("C6", "uniform cut count scale at n=1e5", c6_uniform_cut_scale),
    ("C7", "record count matches uniform cutting", c7_records),
    ("C8", "coupling invariants", c8_coupling_invariants),
    ("C9", "rejection sampler acceptance rate", c9_rejection_sampler),
    ("C10", "Poisson approximation of Z_{>=d}", c10_poisson_tv),
    ("C11", "determinism across worker counts", c11_determinism),
];

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (id, title, check) in CHECKS {
        if !filters.is_empty() && !filters.iter().any(|f| f == id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = check();
        println!(
            "[{}] {id} {title}: {} ({:.1}s)",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        if !outcome.pass {
            failed.push(id);
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
