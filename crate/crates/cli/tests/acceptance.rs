//! Acceptance checks, one line per criterion.
//!
//! Each check also has a wall-clock budget. The binary exits nonzero when a
//! check fails, unless its name is listed in `KNOWN_FAILURES`: those are
//! still run in full and still print FAIL.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperlag::compression::compress_pair;
use hyperlag::families::{complete, k53minus2, matching, split, split_part_size, star};
use hyperlag::freeness::{is_core_free, is_hom_free_direct, matching_number};
use hyperlag::lagrangian::{eval, grad, maximize, Method, SolverConfig};
use hyperlag::partition::{min_sigma_partition, PartitionConfig};
use hyperlag::symmetrize::{audit, symmetrize, SymConfig, DENSITY};
use hyperlag::verify::{golden_max, star_lambda, verify_cases, verify_theorem};
use hyperlag::{Hypergraph, Weighting};

/// The literal case displays break the `F1` bound and the link identity for
/// six of the fourteen families; the check reports the offending rows.
const KNOWN_FAILURES: &[&str] = &["case-bounds"];

/// λ of K_5^3 minus {245, 345}, from an independent 40-digit KKT solve.
const K53_MINUS_TWO: f64 = 0.067_275_993_724_349_816_5;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn run(name: &str, budget: Duration, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = check();
    let took = start.elapsed();
    let ok = out.ok && took <= budget;
    let status = if ok { "PASS" } else { "FAIL" };
    let mut line = format!("{status} {name:<20} {:>8.2}s / {:>4}s  {}", took.as_secs_f64(), budget.as_secs(), out.detail);
    if out.ok && took > budget {
        line.push_str("  (over budget)");
    }
    println!("{line}");
    ok
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn closed_forms() -> Outcome {
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    let mut cases = vec![(complete(7, 4).unwrap(), 5.0 / 343.0), (complete(4, 3).unwrap(), 1.0 / 16.0)];
    for n in 4..=14 {
        cases.push((star(n, 4).unwrap(), star_lambda(n).value()));
    }
    for (g, want) in &cases {
        worst = worst.max((maximize(g, &cfg).unwrap().value - want).abs());
    }
    outcome(worst <= 1e-9, format!("{} graphs, max error {worst:.2e}", cases.len()))
}

fn k53_minus_two() -> Outcome {
    let g = k53minus2();
    let ms = maximize(
        &g,
        &SolverConfig {
            method: Method::MultistartAscent,
            ..SolverConfig::default()
        },
    )
    .unwrap();
    let se = maximize(
        &g,
        &SolverConfig {
            method: Method::SupportEnum,
            ..SolverConfig::default()
        },
    )
    .unwrap();
    let ok = ms.value <= 0.0673
        && ms.kkt_residual <= 1e-8
        && (se.value - K53_MINUS_TWO).abs() <= 1e-8
        && (ms.value - se.value).abs() <= 1e-8;
    outcome(
        ok,
        format!(
            "ascent {:.15} enum {:.15} kkt {:.1e}",
            ms.value, se.value, ms.kkt_residual
        ),
    )
}

fn case_bounds() -> Outcome {
    let rows = verify_cases(8..=14, &SolverConfig::default()).unwrap();
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}@{}", r.id, r.n.unwrap_or(0)))
        .collect();
    let families: std::collections::BTreeSet<&str> = failed.iter().map(|f| f.split('@').next().unwrap()).collect();
    outcome(
        failed.is_empty(),
        format!(
            "{} rows, {} failed: {}",
            rows.len(),
            failed.len(),
            families.into_iter().collect::<Vec<_>>().join(", ")
        ),
    )
}

fn dichotomy() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let summary = pool.install(|| verify_theorem(8, &SolverConfig::default(), 9).unwrap());
    let at7 = summary.rows.iter().find(|r| r.n == 7).map(|r| r.max_lambda).unwrap_or(0.0);
    let non_star = summary
        .rows
        .iter()
        .filter_map(|r| r.best_non_star)
        .fold(0.0f64, f64::max);
    let graphs: usize = summary.rows.iter().map(|r| r.graphs).sum();
    outcome(
        summary.pass,
        format!("{graphs} graphs, best non-star {non_star:.12}, max at n=7 {at7:.12}"),
    )
}

fn one_dimensional() -> Outcome {
    let (x, v) = golden_max(|x| 0.2 * 2.0 * x * (1.0 - x).powi(2), 0.0, 1.0);
    let err = (v - 8.0 / 135.0).abs();
    outcome(err <= 1e-10 && (x - 1.0 / 3.0).abs() <= 1e-6, format!("x {x:.10} error {err:.1e}"))
}

fn random_graph(rng: &mut ChaCha8Rng, r: usize, n: usize) -> Hypergraph {
    let p = rng.random_range(0.2..0.8);
    let all = complete(n, r).unwrap();
    let edges: Vec<Vec<usize>> = all.edges().iter().filter(|_| rng.random_bool(p)).cloned().collect();
    Hypergraph::new(r, n, edges).unwrap()
}

fn random_instance(rng: &mut ChaCha8Rng, max_n: usize) -> Hypergraph {
    let r = rng.random_range(2..=4);
    let n = rng.random_range(r + 1..=max_n);
    random_graph(rng, r, n)
}

fn random_weighting(rng: &mut ChaCha8Rng, n: usize) -> Weighting {
    let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    Weighting::normalized(raw).unwrap()
}

fn properties() -> Outcome {
    const CASES: usize = 200;
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut notes = Vec::new();
    let mut ok = true;

    let mut euler: f64 = 0.0;
    for _ in 0..CASES {
        let g = random_instance(&mut rng, 10);
        let x = random_weighting(&mut rng, g.n());
        let lhs: f64 = grad(&g, &x).unwrap().iter().zip(x.as_slice()).map(|(l, w)| l * w).sum();
        euler = euler.max((lhs - g.r() as f64 * eval(&g, &x).unwrap()).abs());
    }
    ok &= euler <= 1e-12;
    notes.push(format!("euler {euler:.1e}"));

    let mut mono = 0;
    for _ in 0..CASES {
        let g = random_instance(&mut rng, 9);
        let keep: Vec<Vec<usize>> = g.edges().iter().filter(|_| rng.random_bool(0.7)).cloned().collect();
        let h = Hypergraph::new(g.r(), g.n(), keep).unwrap();
        let (lg, lh) = (maximize(&g, &cfg).unwrap().value, maximize(&h, &cfg).unwrap().value);
        mono += usize::from(lh > lg + 1e-7);
    }
    ok &= mono == 0;
    notes.push(format!("monotone violations {mono}"));

    let (mut size, mut freeness) = (0, 0);
    for _ in 0..CASES {
        let g = random_instance(&mut rng, 9);
        let i = rng.random_range(0..g.n());
        let mut j = rng.random_range(0..g.n() - 1);
        if j >= i {
            j += 1;
        }
        let c = compress_pair(&g, i, j).unwrap();
        size += usize::from(c.num_edges() != g.num_edges());
        // g is M_t-free for t one above its matching number
        freeness += usize::from(matching_number(&c).unwrap() > matching_number(&g).unwrap());
    }
    ok &= size == 0 && freeness == 0;
    notes.push(format!("size changes {size}, new matchings {freeness}"));

    let mut blowup: f64 = 0.0;
    for _ in 0..CASES {
        let g = random_instance(&mut rng, 7);
        let sizes: Vec<usize> = (0..g.n()).map(|_| rng.random_range(1..=2)).collect();
        let b = g.blowup(&sizes).unwrap();
        blowup = blowup.max((maximize(&b, &cfg).unwrap().value - maximize(&g, &cfg).unwrap().value).abs());
    }
    ok &= blowup <= 1e-7;
    notes.push(format!("blowup drift {blowup:.1e}"));

    let (mut disagree, mut free) = (0, 0);
    for _ in 0..CASES {
        let r = rng.random_range(3..=4);
        let f = matching(2, r).unwrap();
        let p = rng.random_range(2 * r..=(2 * r + 1).min(9));
        let n = rng.random_range(p..=9);
        let g = random_graph(&mut rng, r, n);
        let core = is_core_free(&g, p, &f).unwrap().free;
        let hom = is_hom_free_direct(&g, &f, p, 9).unwrap().free;
        disagree += usize::from(core != hom);
        free += usize::from(core);
    }
    ok &= disagree == 0;
    notes.push(format!("core/hom disagreements {disagree} ({free} free)"));

    outcome(ok, format!("{CASES} each: {}", notes.join(", ")))
}

fn perturb_deletions(rng: &mut ChaCha8Rng, g: &Hypergraph, frac: f64) -> Hypergraph {
    let k = rng.random_range(0..=(frac * g.num_edges() as f64).floor() as usize);
    let mut edges = g.edges().to_vec();
    edges.shuffle(rng);
    edges.truncate(edges.len() - k);
    Hypergraph::new(g.r(), g.n(), edges).unwrap()
}

fn star_blowup(rng: &mut ChaCha8Rng, n: usize) -> Hypergraph {
    let m = rng.random_range(5..=8);
    let mut sizes = vec![1; m];
    for _ in m..n {
        sizes[rng.random_range(0..m)] += 1;
    }
    star(m, 4).unwrap().blowup(&sizes).unwrap()
}

fn symmetrization() -> Outcome {
    let (mut violations, mut merges, mut deleted) = (0, 0, 0);
    let mut kinds = [0usize; 3];
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(12..=24);
        let base = match seed % 2 {
            0 => star_blowup(&mut rng, n),
            _ => split(n, 4, None).unwrap(),
        };
        let perturbed = seed % 3 == 2;
        let g = if perturbed { perturb_deletions(&mut rng, &base, 0.05) } else { base };
        kinds[if perturbed { 2 } else { (seed % 2) as usize }] += 1;
        let alpha = rng.random_range(0.001..DENSITY - 0.001);
        let trace = symmetrize(&g, &SymConfig::with_alpha(alpha)).unwrap();
        violations += audit(&trace).len();
        merges += trace.merges.len();
        deleted += trace.deleted.len();
    }
    outcome(
        violations == 0,
        format!(
            "{} star blowups, {} splits, {} perturbed; {merges} merges, {deleted} deletions, {violations} violations",
            kinds[0], kinds[1], kinds[2]
        ),
    )
}

fn partition_recovery() -> Outcome {
    let cfg = PartitionConfig {
        exhaustive: true,
        ..PartitionConfig::default()
    };
    let mut bad = Vec::new();
    let mut worst_perturbed = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 8..=20 {
        let g = split(n, 4, None).unwrap();
        let a = split_part_size(n, 4);
        let s = min_sigma_partition(&g, &cfg).unwrap();
        if s.sigma != 0 || s.w1.as_slice() != (0..a).collect::<Vec<_>>() {
            bad.push(format!("split({n})"));
        }
        let all = complete(n, 4).unwrap();
        let mut edges: std::collections::BTreeSet<Vec<usize>> = g.edges().iter().cloned().collect();
        for e in all.edges().choose_multiple(&mut rng, 3) {
            if !edges.remove(e) {
                edges.insert(e.clone());
            }
        }
        let h = Hypergraph::new(4, n, edges).unwrap();
        let sh = min_sigma_partition(&h, &cfg).unwrap();
        worst_perturbed = worst_perturbed.max(sh.sigma);
        if sh.sigma > 3 {
            bad.push(format!("perturbed({n})={}", sh.sigma));
        }
    }
    outcome(
        bad.is_empty(),
        format!("n 8..=20, worst perturbed sigma {worst_perturbed}; {}", if bad.is_empty() { "all recovered".to_string() } else { bad.join(" ") }),
    )
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hlag-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hlag");
    let dir = scratch_dir();
    let hg = |name: &str, g: &Hypergraph| {
        let p = dir.join(name);
        std::fs::write(&p, hyperlag::io::to_hg(g)).unwrap();
        p.to_string_lossy().into_owned()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let k53 = hg("k53.hg", &k53minus2());
    let rnd = hg("random.hg", &random_graph(&mut rng, 4, 9));
    let sb = hg("blowup.hg", &star_blowup(&mut rng, 16));
    let sp = hg("split.hg", &perturb_deletions(&mut rng, &split(14, 4, None).unwrap(), 0.05));
    let moved = hg("moved.hg", &star(8, 4).unwrap().relabel(&[7, 6, 5, 4, 3, 2, 1, 0]).unwrap());
    let trace = dir.join("trace.json").to_string_lossy().into_owned();
    let commands: Vec<Vec<&str>> = vec![
        vec!["--seed", "5", "maximize", "--graph", &k53],
        vec!["--seed", "5", "--format", "json", "maximize", "--graph", &rnd, "--method", "multistart"],
        vec!["--seed", "9", "partition", "--graph", &sp, "--restarts", "8"],
        vec!["--seed", "3", "compress", "--graph", &moved],
        vec!["--seed", "3", "symmetrize", "--graph", &sb, "--alpha", "0.03", "--trace", &trace],
        vec!["--seed", "1", "--format", "json", "search", "--n", "6"],
        vec!["--seed", "1", "verify", "--suite", "closed"],
        vec!["--seed", "2", "family", "--name", "case", "--k", "7", "--n", "10"],
    ];
    let mut differing = Vec::new();
    for args in &commands {
        let once = || {
            let out = Command::new(bin).args(args).output().unwrap();
            let trace_bytes = std::fs::read(&trace).unwrap_or_default();
            (out.status.code(), out.stdout, trace_bytes)
        };
        let (a, b) = (once(), once());
        if a != b || a.0 != Some(0) || a.1.is_empty() {
            differing.push(args[2..].join(" "));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        differing.is_empty(),
        format!("{} commands run twice; {}", commands.len(), if differing.is_empty() { "identical".to_string() } else { differing.join("; ") }),
    )
}

fn main() {
    let checks: Vec<(&str, u64, fn() -> Outcome)> = vec![
        ("closed-forms", 5, closed_forms),
        ("k53-minus-two", 1, k53_minus_two),
        ("case-bounds", 60, case_bounds),
        ("dichotomy", 600, dichotomy),
        ("one-dimensional", 1, one_dimensional),
        ("properties", 300, properties),
        ("symmetrization", 120, symmetrization),
        ("partition", 30, partition_recovery),
        ("determinism", 120, determinism),
    ];
    let mut unexpected = Vec::new();
    for (name, budget, check) in checks {
        if !run(name, secs(budget), check) && !KNOWN_FAILURES.contains(&name) {
            unexpected.push(name);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("failed: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
