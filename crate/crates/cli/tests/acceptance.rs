//! End-to-end acceptance battery. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use kcore_core::branching::{
    prob_a, sample_trees, simulate_and_check, BranchingSpec, FixedPointMode, DEFAULT_POP_CAP,
};
use kcore_core::graphs::{k_core, SimpleGraph};
use kcore_core::homdensity::{config_prob, eval_series, tree_series, OffspringConfig};
use kcore_core::kernels::{
    cut_norm, CutNormMode, CutNormStatus, KernelPreset, SignedStepKernel, StepKernel,
};
use kcore_core::rng::stream;
use kcore_core::Error;
use kcore_lab::commands::{self, VerifyReport};
use kcore_lab::{Cli, Command};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn parse(args: &[&str]) -> Command {
    let argv = std::iter::once("kcore-lab").chain(args.iter().copied());
    Cli::try_parse_from(argv)
        .expect("valid command line")
        .command
}

fn run_verify(args: &[&str]) -> VerifyReport {
    match parse(args) {
        Command::Verify(a) => commands::verify(&a).expect("verify runs"),
        _ => unreachable!(),
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `P(Poi(lambda) >= k)` straight from the pmf; fine for the small k used here.
fn psi_oracle(k: u32, lambda: f64) -> f64 {
    let mut term = (-lambda).exp();
    let mut below = 0.0;
    for j in 0..k {
        below += term;
        term *= lambda / f64::from(j + 1);
    }
    1.0 - below
}

/// Summary row mean of |fraction - predicted|.
fn mean_gap(r: &VerifyReport) -> f64 {
    let p = r.predicted.expect("prediction");
    r.fractions.iter().map(|f| (f - p).abs()).sum::<f64>() / r.fractions.len() as f64
}

fn criterion_1() -> Outcome {
    // Scalar fixed point of beta <- Psi_2(5 beta) from beta = 1.
    let mut beta = 1.0;
    for _ in 0..10_000 {
        beta = psi_oracle(2, 5.0 * beta);
    }
    let oracle = psi_oracle(3, 5.0 * beta);
    let clock = Instant::now();
    let r = run_verify(&[
        "verify", "--kernel", "constant", "--n", "20000", "--c", "5", "--k", "3", "--trials", "20",
        "--seed", "11",
    ]);
    let secs = clock.elapsed().as_secs_f64();
    let pred = r.predicted.unwrap();
    let gap = mean_gap(&r);
    check(
        gap <= 0.01 && r.stddev <= 0.01 && (pred - oracle).abs() <= 1e-9 && secs <= 60.0,
        format!(
            "mean |C_3/n - P(A)| = {gap:.5}, stddev = {:.5}, P(A) = {pred:.6} (oracle {oracle:.6}), {secs:.1} s",
            r.stddev
        ),
    )
}

fn criterion_2() -> Outcome {
    let (mut lo, mut hi) = (0.1f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - (-2.0 * mid).exp() > mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle = psi_oracle(2, 2.0 * 0.5 * (lo + hi));
    let r = run_verify(&[
        "verify", "--kernel", "constant", "--n", "20000", "--c", "2", "--k", "2", "--trials", "20",
        "--seed", "12",
    ]);
    check(
        (r.mean - oracle).abs() <= 0.01,
        format!("mean C_2/n = {:.5}, Psi_2(2 beta*) = {oracle:.5}", r.mean),
    )
}

/// `min_{mu > 0} mu / Psi_2(mu)`: grid scan, then golden-section refinement.
fn min_ratio() -> f64 {
    let f = |mu: f64| mu / psi_oracle(2, mu);
    let best = (1..=2000)
        .map(|i| i as f64 * 0.01)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap();
    let (mut a, mut b) = (best - 0.01, best + 0.01);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-10 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if f(x1) < f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    f(0.5 * (a + b))
}

fn criterion_3() -> Outcome {
    let oracle = min_ratio();
    let Command::Threshold(a) = parse(&[
        "threshold",
        "--kernel",
        "constant",
        "--k",
        "3",
        "--c-min",
        "0.5",
        "--c-max",
        "8",
    ]) else {
        unreachable!()
    };
    let c = commands::threshold(&a)
        .map_err(|e| e.to_string())?
        .scan
        .outcome
        .value();
    let c = c.ok_or("no threshold found")?;
    check(
        (c - oracle).abs() <= 1e-3 && (c - 3.35).abs() < 0.01,
        format!("c* = {c:.6}, min mu/Psi_2(mu) = {oracle:.6}"),
    )
}

fn criterion_4() -> Outcome {
    let Command::Threshold(a) = parse(&[
        "threshold",
        "--kernel",
        "remark-b",
        "--k",
        "3",
        "--c-min",
        "0.5",
        "--c-max",
        "10",
        "--points",
        "191",
    ]) else {
        unreachable!()
    };
    let scan = commands::threshold(&a).map_err(|e| e.to_string())?.scan;
    let c = scan.outcome.value().ok_or("no threshold found")?;
    let w = KernelPreset::RemarkB
        .resolve::<f64>()
        .unwrap()
        .as_step()
        .unwrap()
        .clone();
    let p = |s: f64| {
        prob_a(
            &BranchingSpec::new(w.clone(), s).unwrap(),
            3,
            FixedPointMode::limit(),
        )
        .unwrap()
        .value
    };
    let (below, above) = (p(c - 0.1), p(c + 0.1));
    let second = scan
        .jumps
        .iter()
        .find(|j| j.c_left - 0.1 <= 2.0 * c && 2.0 * c <= j.c_right + 0.1);
    let first = scan.jumps.iter().any(|j| j.c_left <= c && c <= j.c_right);
    check(
        below < 1e-6 && above > 0.01 && first && second.is_some(),
        format!(
            "c* = {c:.5}, P(A) = {below:.2e} at c*-0.1 and {above:.4} at c*+0.1, second jump {}",
            second.map_or("missing".into(), |j| format!(
                "on [{:.3}, {:.3}] (2c* = {:.3}, delta {:.3})",
                j.c_left,
                j.c_right,
                2.0 * c,
                j.delta
            ))
        ),
    )
}

fn trial_division(q: u64) -> bool {
    q >= 2
        && (2..)
            .take_while(|d| d * d <= q)
            .all(|d| !q.is_multiple_of(d))
}

fn criterion_5() -> Outcome {
    let qs = [13u64, 101, 1009, 9973];
    if let Some(q) = qs.iter().find(|&&q| !trial_division(q) || q % 4 != 1) {
        return Err(format!("{q} is not a prime congruent to 1 mod 4"));
    }
    let Command::Continuity(a) = parse(&[
        "continuity",
        "--family",
        "paley",
        "--q",
        "13,101,1009,9973",
        "--c",
        "8",
        "--k",
        "3",
    ]) else {
        unreachable!()
    };
    let r = commands::continuity(&a).map_err(|e| e.to_string())?;
    let d: Vec<f64> = r.rows.iter().map(|row| row.cut_distance).collect();
    let decreasing = d.windows(2).all(|w| w[1] < w[0]);
    let last = (r.rows.last().unwrap().prob_a - r.limit_prob_a).abs();
    check(
        decreasing && last <= 0.01,
        format!(
            "cut distances {:?}, |P(A) - P_1/2(A)| = {last:.5} at q = 9973",
            d.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>()
        ),
    )
}

fn criterion_6() -> Outcome {
    let k = |rows: Vec<Vec<f64>>, breaks: Option<Vec<f64>>| match breaks {
        Some(b) => StepKernel::new(b, rows).unwrap(),
        None => StepKernel::with_equal_blocks(rows).unwrap(),
    };
    // (kernel, scale, k, d)
    let battery: Vec<(StepKernel<f64>, f64, u32, u32)> = vec![
        (k(vec![vec![1.0]], None), 3.0, 2, 1),
        (k(vec![vec![1.0]], None), 4.0, 3, 3),
        (k(vec![vec![1.0]], None), 6.0, 4, 5),
        (k(vec![vec![2.0, 0.0], vec![0.0, 1.0]], None), 4.0, 3, 2),
        (k(vec![vec![1.0, 0.0], vec![0.0, 1.0]], None), 7.0, 3, 4),
        (
            k(
                vec![vec![4.0, 1.0], vec![1.0, 2.5]],
                Some(vec![0.0, 0.35, 1.0]),
            ),
            1.2,
            3,
            5,
        ),
        (
            k(vec![vec![2000.0, 0.01], vec![0.01, 2.0]], None),
            0.004,
            2,
            3,
        ),
        (
            k(
                vec![
                    vec![0.5, 2.0, 0.1],
                    vec![2.0, 0.3, 1.0],
                    vec![0.1, 1.0, 3.0],
                ],
                Some(vec![0.0, 0.2, 0.55, 1.0]),
            ),
            3.0,
            2,
            4,
        ),
        (
            k(
                vec![
                    vec![3.0, 1.5, 0.0, 0.2],
                    vec![1.5, 1.0, 0.7, 0.0],
                    vec![0.0, 0.7, 2.0, 1.1],
                    vec![0.2, 0.0, 1.1, 0.5],
                ],
                None,
            ),
            4.0,
            4,
            2,
        ),
        (
            k(
                vec![vec![0.0, 3.0], vec![3.0, 0.0]],
                Some(vec![0.0, 0.4, 1.0]),
            ),
            4.5,
            3,
            5,
        ),
    ];
    let trials = 100_000u64;
    let mut worst: f64 = 0.0;
    let mut caps = 0u64;
    let mut fails = Vec::new();
    for (i, (w, s, kk, d)) in battery.into_iter().enumerate() {
        let spec = BranchingSpec::new(w, s).unwrap();
        let exact = prob_a(&spec, kk, FixedPointMode::Depth(d)).unwrap().value;
        let mc = simulate_and_check(&spec, kk, d, trials, DEFAULT_POP_CAP, 600 + i as u64).unwrap();
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        let z = (mc.estimate - exact).abs() / sigma;
        worst = worst.max(z);
        caps += mc.cap_hits;
        if z > 3.0 {
            fails.push(format!(
                "item {i} (k={kk}, d={d}): {} vs {exact}",
                mc.estimate
            ));
        }
    }
    let cap_fraction = caps as f64 / (10 * trials) as f64;
    check(
        fails.is_empty() && cap_fraction < 1e-3,
        format!(
            "worst deviation {worst:.2} sigma, cap-hit fraction {cap_fraction:.1e} {}",
            fails.join("; ")
        ),
    )
}

fn series_within_bound(cfg: &OffspringConfig, w: &StepKernel<f64>) -> Result<(f64, f64), String> {
    for m in (1..=12).rev() {
        match tree_series(cfg, w.bound(), m) {
            Ok(s) => {
                let v = eval_series(&s, w, None).map_err(|e| e.to_string())?;
                let exact = config_prob(cfg, w, None);
                let err = (v.value - exact).abs();
                return if err <= v.tail_bound {
                    Ok((err, v.tail_bound))
                } else {
                    Err(format!(
                        "{cfg:?}: series off by {err:.2e}, tail bound {:.2e}",
                        v.tail_bound
                    ))
                };
            }
            Err(Error::Capability(_)) => continue,
            Err(e) => return Err(e.to_string()),
        }
    }
    Err("no truncation level fits".into())
}

fn criterion_7() -> Outcome {
    let mut closed = 0.0f64;
    for c in [0.3f64, 1.0, 2.5, 6.0] {
        let w = StepKernel::constant(c).unwrap();
        let mut pmf = (-c).exp();
        for j in 0..8u32 {
            closed =
                closed.max((config_prob(&OffspringConfig::root_count(j), &w, None) - pmf).abs());
            pmf *= c / f64::from(j + 1);
        }
        let one_leaf = OffspringConfig::node(vec![OffspringConfig::root_count(0)]).unwrap();
        closed = closed.max((config_prob(&one_leaf, &w, None) - c * (-2.0 * c).exp()).abs());
    }

    let w =
        StepKernel::<f64>::new(vec![0.0, 0.6, 1.0], vec![vec![1.2, 0.4], vec![0.4, 0.9]]).unwrap();
    let leaf = |k| OffspringConfig::root_count(k);
    let node = |c: Vec<OffspringConfig>| OffspringConfig::node(c).unwrap();
    let battery = [
        node(vec![node(vec![leaf(0)])]),
        node(vec![node(vec![leaf(1)]), OffspringConfig::childless(1)]),
        node(vec![node(vec![leaf(0), leaf(1)])]),
        node(vec![node(vec![leaf(2)])]),
        OffspringConfig::childless(2),
    ];
    let n = 1_000_000u64;
    let samples = sample_trees(
        &BranchingSpec::new(w.clone(), 1.0).unwrap(),
        3,
        10_000,
        707,
        n,
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    let mut fails = Vec::new();
    let mut tails = Vec::new();
    for cfg in &battery {
        let p = config_prob(cfg, &w, None);
        let freq = samples.iter().filter(|s| cfg.matches(s, 0)).count() as f64 / n as f64;
        let z = (freq - p).abs() / (p * (1.0 - p) / n as f64).sqrt();
        worst = worst.max(z);
        if z > 3.0 {
            fails.push(format!("{cfg:?}: MC {freq} vs {p}"));
        }
        match series_within_bound(cfg, &w) {
            Ok((err, tail)) => tails.push(format!("{err:.1e}<={tail:.1e}")),
            Err(e) => fails.push(e),
        }
    }
    check(
        closed <= 1e-10 && fails.is_empty(),
        format!(
            "closed forms within {closed:.1e}, worst MC deviation {worst:.2} sigma, series error vs tail [{}] {}",
            tails.join(", "),
            fails.join("; ")
        ),
    )
}

fn random_graph(n: usize, p: f64, g: &mut impl Rng) -> SimpleGraph {
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if g.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    SimpleGraph::from_edges(n, edges).unwrap()
}

fn brute_force_core(g: &SimpleGraph, k: usize) -> Vec<u32> {
    let n = g.n();
    let mut best: Vec<u32> = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<u32> = (0..n as u32).filter(|&v| mask >> v & 1 == 1).collect();
        if members.len() > best.len()
            && members.iter().all(|&v| {
                g.neighbors(v as usize)
                    .iter()
                    .filter(|&&w| mask >> w & 1 == 1)
                    .count()
                    >= k
            })
        {
            best = members;
        }
    }
    best
}

fn criterion_8() -> Outcome {
    let mut mismatches = 0;
    for i in 0..200u64 {
        let mut g = stream(800, i);
        let n = g.random_range(1..=8);
        let graph = random_graph(n, g.random_range(0.2..0.9), &mut g);
        for k in 2..=5u32 {
            if k_core(&graph, k).unwrap().members != brute_force_core(&graph, k as usize) {
                mismatches += 1;
            }
        }
    }
    let mut violations = 0;
    for i in 0..1000u64 {
        let mut g = stream(801, i);
        let graph = random_graph(100, g.random_range(0.02..0.2), &mut g);
        let mut outer = k_core(&graph, 2).unwrap();
        for k in 3..=12 {
            let inner = k_core(&graph, k).unwrap();
            if !inner.members.iter().all(|&v| outer.contains(v)) {
                violations += 1;
            }
            outer = inner;
        }
    }
    check(
        mismatches == 0 && violations == 0,
        format!("{mismatches} mismatches against exhaustive search (200 graphs, k = 2..5), {violations} nesting violations (1000 graphs)"),
    )
}

fn random_signed(g: &mut impl Rng) -> SignedStepKernel<f64> {
    let m = g.random_range(1..=8);
    let mut cuts: Vec<f64> = (0..m - 1).map(|_| g.random_range(0.01..0.99)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let m = cuts.len() + 1;
    let mut breaks = vec![0.0];
    breaks.extend(cuts);
    breaks.push(1.0);
    let mut v = vec![vec![0.0; m]; m];
    #[allow(clippy::needless_range_loop)]
    for h in 0..m {
        for k in h..m {
            let x = g.random_range(-1.0..1.0);
            v[h][k] = x;
            v[k][h] = x;
        }
    }
    SignedStepKernel::new(breaks, v).unwrap()
}

fn criterion_9() -> Outcome {
    let heuristic = CutNormMode::Heuristic {
        restarts: 32,
        seed: 909,
    };
    let kernels: Vec<_> = (0..100u64)
        .map(|i| random_signed(&mut stream(900, i)))
        .collect();
    let norm = |u: &SignedStepKernel<f64>, mode| cut_norm(u, mode).unwrap().value;
    let mut mismatches = 0;
    let mut axiom_failures = 0;
    for (i, u) in kernels.iter().enumerate() {
        let exact = norm(u, CutNormMode::Exact);
        if (norm(u, heuristic) - exact).abs() > 1e-12 * (1.0 + exact) {
            mismatches += 1;
        }
        let v = &kernels[(i + 1) % kernels.len()];
        let tol = 1e-12;
        let zero = u.scale(0.0);
        let ok = exact >= 0.0
            && norm(&zero, CutNormMode::Exact) == 0.0
            && (norm(&u.scale(-2.5), CutNormMode::Exact) - 2.5 * exact).abs()
                <= tol * (1.0 + exact)
            && norm(&SignedStepKernel::sum(u, v), CutNormMode::Exact)
                <= exact + norm(v, CutNormMode::Exact) + tol
            && exact <= u.l1_norm() + tol;
        if !ok {
            axiom_failures += 1;
        }
    }
    let board =
        SignedStepKernel::with_equal_blocks(vec![vec![0.5, -0.5], vec![-0.5, 0.5]]).unwrap();
    let b = cut_norm(&board, CutNormMode::Exact).unwrap();
    check(
        mismatches == 0 && axiom_failures == 0 && b.value == 0.125 && b.status == CutNormStatus::Exact,
        format!("{mismatches} heuristic/exact mismatches, {axiom_failures} axiom failures, checkerboard {}", b.value),
    )
}

fn run_to_file(args: &[&str], workers: &str, out: &Path) -> Result<Vec<u8>, String> {
    let mut argv = vec!["kcore-lab", "--workers", workers];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let cli = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    kcore_lab::run(&cli).map_err(|e| e.to_string())?;
    std::fs::read(out).map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let experiments: [&[&str]; 5] = [
        &[
            "verify", "--kernel", "remark-b", "--n", "3000", "--c", "6", "--trials", "12",
            "--seed", "5",
        ],
        &[
            "verify",
            "--kernel",
            "product",
            "--n",
            "2000",
            "--c",
            "9",
            "--k",
            "2",
            "--trials",
            "6",
            "--strategy",
            "naive",
        ],
        &[
            "paley", "--q", "1009", "--c", "8", "--trials", "6", "--seed", "3",
        ],
        &["threshold", "--kernel", "remark-b", "--points", "41"],
        &[
            "continuity",
            "--family",
            "dyadic",
            "--kernel",
            "product",
            "--levels",
            "4",
        ],
    ];
    let mut checked = 0;
    for (i, args) in experiments.iter().enumerate() {
        let mut outputs = Vec::new();
        for workers in ["1", "3", "8"] {
            let out = dir.path().join(format!("e{i}-w{workers}.csv"));
            outputs.push(run_to_file(args, workers, &out)?);
        }
        let again = run_to_file(args, "8", &dir.path().join(format!("e{i}-again.csv")))?;
        if outputs.iter().any(|o| *o != outputs[0]) || again != outputs[0] {
            return Err(format!("output of {args:?} depends on the run"));
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} experiments byte-identical across 1, 3 and 8 workers and reruns"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("homogeneous k-core size", criterion_1),
        ("k=2 closed form", criterion_2),
        ("threshold of the constant kernel", criterion_3),
        ("two-jump kernel", criterion_4),
        ("Paley continuity", criterion_5),
        ("branching Monte Carlo", criterion_6),
        ("configuration probabilities", criterion_7),
        ("k-core oracle", criterion_8),
        ("cut norm", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = clock.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {:>2} ({name}): {detail} [{secs:.1}s]",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "FAIL criterion {:>2} ({name}): {detail} [{secs:.1}s]",
                    i + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
