//! `hlag`: command-line front end for the hyperlag library.
//!
//! Exit codes: 0 success, 1 a property failed or a witness was found,
//! 2 bad usage or unreadable input.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hyperlag::compression::{compress_pair, dense_and_compress, CompressionStep};
use hyperlag::config::Guards;
use hyperlag::families::{matching, FamilySpec};
use hyperlag::freeness::{self, is_hom_free_direct, Pattern};
use hyperlag::lagrangian::{eval, kkt_residual, maximize, LagrangianResult, Method, SolverConfig};
use hyperlag::partition::{min_sigma_partition, PartitionConfig, PartitionScore};
use hyperlag::symmetrize::{audit, symmetrize, SymConfig};
use hyperlag::verify::{verify_cases, verify_closed_forms, verify_theorem, VerificationRow};
use hyperlag::{io, Hypergraph, Weighting};

#[derive(Parser)]
#[command(name = "hlag", version, about = "Lagrangians of uniform hypergraphs")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative-gain stopping tolerance of the ascent.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Lift every size guard.
    #[arg(long, global = true)]
    unsafe_size: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Complete,
    Matching,
    Star,
    Split,
    Extension,
    Case,
    K53minus2,
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternKind {
    Matching,
    Core,
    Hom,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Cases,
    Closed,
    Theorem,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Print a named family as a graph file.
    Family {
        #[arg(long, value_enum)]
        name: FamilyName,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 4)]
        r: usize,
        /// Size of a complete graph or matching.
        #[arg(long)]
        t: Option<usize>,
        /// Size of the smaller split part.
        #[arg(long)]
        a: Option<usize>,
        /// Core size of an extension.
        #[arg(long)]
        p: Option<usize>,
        /// Index of a case family.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Evaluate λ(G, x) and the KKT residual at a weighting.
    Eval {
        #[arg(long)]
        graph: PathBuf,
        /// File with one weight per vertex.
        #[arg(long, conflicts_with = "x")]
        weights: Option<PathBuf>,
        /// Comma-separated weights.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        /// Rescale the weights to sum to one.
        #[arg(long)]
        normalize: bool,
    },
    /// Compute the Lagrangian.
    Maximize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "auto")]
        method: Method,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-8)]
        kkt_tol: f64,
        #[arg(long)]
        no_equalize: bool,
    },
    /// Apply one compression, or densify and compress to a fixed point.
    Compress {
        #[arg(long)]
        graph: PathBuf,
        /// Matching size the input must avoid.
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// A single compression `i,j` (1-based), moving edges from j to i.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        pair: Option<Vec<usize>>,
    },
    /// Look for a matching, a covered core, or a homomorphic extension.
    Free {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        pattern: PatternKind,
        #[arg(long, default_value_t = 2)]
        t: usize,
        #[arg(long)]
        p: Option<usize>,
        /// Pattern graph; defaults to two disjoint edges.
        #[arg(long)]
        f: Option<PathBuf>,
        /// Search homomorphisms directly instead of through cores.
        #[arg(long)]
        direct: bool,
    },
    /// Maximize λ over all left-compressed matching-free graphs.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
    },
    /// Run cleaning and merging to a fixed point and audit the trace.
    Symmetrize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        /// Evaluate the cleaning threshold at the input size.
        #[arg(long)]
        fixed_n: bool,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        #[arg(long, default_value_t = 0.02)]
        beta: f64,
        #[arg(long, default_value_t = 0.002)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0005)]
        delta: f64,
        /// Write the event list as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Minimize the partition score Σ′.
    Partition {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Check computed values against the known bounds.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::Cases)]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        n_min: usize,
        #[arg(long, default_value_t = 14)]
        n_max: usize,
        /// Largest n of the exhaustive search.
        #[arg(long, default_value_t = 8)]
        theorem_n: usize,
        /// Where to write a graph violating the dichotomy.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
}

struct Ctx {
    format: Format,
    guards: Guards,
    solver: SolverConfig,
    seed: u64,
}

/// What a command printed and whether its property held.
struct Outcome {
    text: String,
    json: Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<hyperlag::Error>() {
                Some(hyperlag::Error::NotFree(_) | hyperlag::Error::NoConvergence(_)) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global()?;
    }
    let guards = if cli.unsafe_size { Guards::unlimited() } else { Guards::from_env() };
    let solver = SolverConfig {
        tol: cli.tol,
        seed: cli.seed,
        support_enum_guard: guards.support_enum,
        ..SolverConfig::default()
    };
    let ctx = Ctx {
        format: cli.format,
        guards,
        solver,
        seed: cli.seed,
    };
    let mut out = dispatch(cli.command, &ctx)?;
    if ctx.format == Format::Json {
        out.text = serde_json::to_string_pretty(&out.json)? + "\n";
    }
    Ok(out)
}

fn dispatch(cmd: Command, ctx: &Ctx) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Family { name, n, r, t, a, p, k } => family(ctx, name, n, r, t, a, p, k),
        Command::Eval {
            graph,
            weights,
            x,
            normalize,
        } => eval_cmd(&graph, weights.as_deref(), x, normalize),
        Command::Maximize {
            graph,
            method,
            restarts,
            kkt_tol,
            no_equalize,
        } => {
            let g = read_graph(&graph)?;
            let cfg = SolverConfig {
                method,
                restarts,
                kkt_tol,
                equalize: !no_equalize,
                ..ctx.solver.clone()
            };
            let res = maximize(&g, &cfg)?;
            Ok(Outcome {
                text: lagrangian_text(&res),
                json: lagrangian_json(&res),
                ok: true,
            })
        }
        Command::Compress { graph, t, pair } => compress(ctx, &read_graph(&graph)?, t, pair),
        Command::Free {
            graph,
            pattern,
            t,
            p,
            f,
            direct,
        } => free(ctx, &read_graph(&graph)?, pattern, t, p, f.as_deref(), direct),
        Command::Search { n, r, t } => search(ctx, n, r, t),
        Command::Symmetrize {
            graph,
            alpha,
            fixed_n,
            gamma,
            beta,
            epsilon,
            delta,
            trace,
        } => {
            let cfg = SymConfig {
                alpha,
                fixed_n,
                gamma,
                beta,
                epsilon,
                delta,
            };
            symmetrize_cmd(&read_graph(&graph)?, &cfg, trace.as_deref())
        }
        Command::Partition {
            graph,
            exhaustive,
            restarts,
        } => {
            let cfg = PartitionConfig {
                restarts,
                seed: ctx.seed,
                exhaustive,
                guard: ctx.guards.partition,
            };
            let s = min_sigma_partition(&read_graph(&graph)?, &cfg)?;
            Ok(partition_outcome(&s))
        }
        Command::Verify {
            suite,
            n_min,
            n_max,
            theorem_n,
            witness,
        } => verify(ctx, suite, n_min..=n_max, theorem_n, witness.as_deref()),
    }
}

fn read_graph(path: &Path) -> anyhow::Result<Hypergraph> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    Ok(io::parse_auto(&text)?)
}

fn need(v: Option<usize>, flag: &str) -> anyhow::Result<usize> {
    v.with_context(|| format!("this family needs --{flag}"))
}

#[allow(clippy::too_many_arguments)]
fn family(
    ctx: &Ctx,
    name: FamilyName,
    n: Option<usize>,
    r: usize,
    t: Option<usize>,
    a: Option<usize>,
    p: Option<usize>,
    k: Option<usize>,
) -> anyhow::Result<Outcome> {
    let spec = match name {
        FamilyName::Complete => FamilySpec::Complete {
            t: need(t.or(n), "t")?,
            r,
        },
        FamilyName::Matching => FamilySpec::Matching { t: need(t, "t")?, r },
        FamilyName::Star => FamilySpec::Star { n: need(n, "n")?, r },
        FamilyName::Split => FamilySpec::Split { n: need(n, "n")?, r, a },
        FamilyName::Extension => FamilySpec::Extension {
            t: t.unwrap_or(2),
            r,
            p: need(p, "p")?,
        },
        FamilyName::Case => FamilySpec::Case {
            k: need(k, "k")?,
            n: need(n, "n")?,
        },
        FamilyName::K53minus2 => FamilySpec::K53Minus2,
    };
    let g = spec.build()?;
    let text = match ctx.format {
        Format::Text => io::to_hg(&g),
        Format::Json => String::new(),
    };
    Ok(Outcome {
        text,
        json: serde_json::from_str(&io::to_json(&g))?,
        ok: true,
    })
}

fn eval_cmd(graph: &Path, weights: Option<&Path>, x: Option<Vec<f64>>, normalize: bool) -> anyhow::Result<Outcome> {
    let g = read_graph(graph)?;
    let raw = match (weights, x) {
        (Some(p), _) => io::parse_weights(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        (None, Some(x)) => x,
        (None, None) => bail!("give --weights or --x"),
    };
    if raw.len() != g.n() {
        bail!("{} weights for {} vertices", raw.len(), g.n());
    }
    let x = if normalize { Weighting::normalized(raw)? } else { Weighting::new(raw)? };
    let value = eval(&g, &x)?;
    let kkt = kkt_residual(&g, &x)?;
    let mut text = format!("lambda {value:.15}\nkkt_residual {:.3e}\n", kkt.residual);
    if !kkt.uncovered_support_pairs.is_empty() {
        let _ = writeln!(text, "uncovered_support_pairs {}", pairs_text(&kkt.uncovered_support_pairs));
    }
    Ok(Outcome {
        text,
        json: json!({
            "value": value,
            "kkt_residual": kkt.residual,
            "uncovered_support_pairs": one_based_pairs(&kkt.uncovered_support_pairs),
        }),
        ok: true,
    })
}

fn one_based_pairs(p: &[(usize, usize)]) -> Vec<[usize; 2]> {
    p.iter().map(|&(a, b)| [a + 1, b + 1]).collect()
}

fn pairs_text(p: &[(usize, usize)]) -> String {
    p.iter().map(|&(a, b)| format!("{}{}", a + 1, b + 1)).collect::<Vec<_>>().join(" ")
}

fn one_based(v: impl IntoIterator<Item = usize>) -> Vec<usize> {
    v.into_iter().map(|v| v + 1).collect()
}

fn joined(v: impl IntoIterator<Item = usize>) -> String {
    v.into_iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
}

fn lagrangian_text(res: &LagrangianResult) -> String {
    let w: Vec<String> = res.weighting.as_slice().iter().map(|w| format!("{w:.12}")).collect();
    let mut s = format!(
        "lambda {:.15}\nweights {}\nsupport {}\nkkt_residual {:.3e}\nmethod {}\n",
        res.value,
        w.join(" "),
        joined(res.support.iter()),
        res.kkt_residual,
        res.method.name()
    );
    if !res.uncovered_support_pairs.is_empty() {
        let _ = writeln!(s, "uncovered_support_pairs {}", pairs_text(&res.uncovered_support_pairs));
    }
    s
}

fn lagrangian_json(res: &LagrangianResult) -> Value {
    json!({
        "value": res.value,
        "weighting": res.weighting.as_slice(),
        "support": one_based(res.support.iter()),
        "kkt_residual": res.kkt_residual,
        "uncovered_support_pairs": one_based_pairs(&res.uncovered_support_pairs),
        "method": res.method.name(),
        "restarts_used": res.restarts_used,
        "seed": res.seed,
    })
}

fn compress(ctx: &Ctx, g: &Hypergraph, t: usize, pair: Option<Vec<usize>>) -> anyhow::Result<Outcome> {
    if let Some(p) = pair {
        let (i, j) = (p[0], p[1]);
        if i == 0 || j == 0 {
            bail!("vertices are 1-based");
        }
        let h = compress_pair(g, i - 1, j - 1)?;
        return Ok(Outcome {
            text: io::to_hg(&h),
            json: serde_json::from_str(&io::to_json(&h))?,
            ok: true,
        });
    }
    let (h, res, trace) = dense_and_compress(g, t, &ctx.solver)?;
    let mut text = String::new();
    let mut steps = Vec::new();
    for s in &trace.steps {
        match s {
            CompressionStep::Densify { removed, lambda } => {
                let _ = writeln!(text, "densify removed {} lambda {lambda:.12}", joined(removed.iter().copied()));
                steps.push(json!({"kind": "densify", "removed": one_based(removed.iter().copied()), "lambda": lambda}));
            }
            CompressionStep::Relabel { order } => {
                let _ = writeln!(text, "relabel {}", joined(order.iter().copied()));
                steps.push(json!({"kind": "relabel", "order": one_based(order.iter().copied())}));
            }
            CompressionStep::Compress {
                i,
                j,
                moved,
                potential_before,
                potential_after,
                lambda_at_x,
            } => {
                let _ = writeln!(
                    text,
                    "compress {} <- {} moved {moved} s {potential_before} -> {potential_after} lambda_at_x {lambda_at_x:.12}",
                    i + 1,
                    j + 1
                );
                steps.push(json!({
                    "kind": "compress", "i": i + 1, "j": j + 1, "moved": moved,
                    "potential_before": potential_before, "potential_after": potential_after,
                    "lambda_at_x": lambda_at_x,
                }));
            }
        }
    }
    let _ = writeln!(text, "initial_lambda {:.15}\nfinal_lambda {:.15}", trace.initial_lambda, res.value);
    text.push_str(&io::to_hg(&h));
    Ok(Outcome {
        text,
        json: json!({
            "steps": steps,
            "initial_lambda": trace.initial_lambda,
            "final_lambda": res.value,
            "graph": serde_json::from_str::<Value>(&io::to_json(&h))?,
        }),
        ok: true,
    })
}

fn free(
    ctx: &Ctx,
    g: &Hypergraph,
    kind: PatternKind,
    t: usize,
    p: Option<usize>,
    f: Option<&Path>,
    direct: bool,
) -> anyhow::Result<Outcome> {
    let pattern_graph = || -> anyhow::Result<Hypergraph> {
        match f {
            Some(path) => read_graph(path),
            None => Ok(matching(2, g.r())?),
        }
    };
    let report = match kind {
        PatternKind::Matching => freeness::check(g, &Pattern::Matching { t })?,
        PatternKind::Core => freeness::check(g, &Pattern::Core {
            p: need(p, "p")?,
            f: pattern_graph()?,
        })?,
        PatternKind::Hom if direct => is_hom_free_direct(g, &pattern_graph()?, need(p, "p")?, ctx.guards.hom)?,
        PatternKind::Hom => freeness::check(g, &Pattern::Hom {
            p: need(p, "p")?,
            f: pattern_graph()?,
        })?,
    };
    let witness = report.witness.as_ref().map(|w| w.to_string());
    let mut text = format!("pattern {}\nfree {}\n", report.pattern, report.free);
    if let Some(w) = &witness {
        let _ = writeln!(text, "witness {w}");
    }
    Ok(Outcome {
        text,
        json: json!({"pattern": report.pattern, "free": report.free, "witness": witness}),
        ok: report.free,
    })
}

fn search(ctx: &Ctx, n: usize, r: usize, t: usize) -> anyhow::Result<Outcome> {
    let rep = hyperlag::freeness::extremal_lambda_search(n, r, t, &ctx.solver, ctx.guards.enumerate)?;
    let best = |b: &Option<(f64, Hypergraph)>| b.as_ref().map(|(l, g)| (*l, g.edges_one_based()));
    let mut text = format!(
        "n {n} r {r} t {t}\ngraphs {}\nmax_lambda {:.15}\nwitness_is_star_subgraph {}\n",
        rep.graphs, rep.max_lambda, rep.witness_is_star_subgraph
    );
    if let Some((l, _)) = &rep.best_non_star {
        let _ = writeln!(text, "best_non_star {l:.15}");
    }
    if let Some((l, _)) = &rep.best_star {
        let _ = writeln!(text, "best_star {l:.15}");
    }
    text.push_str(&io::to_hg(&rep.witness));
    Ok(Outcome {
        text,
        json: json!({
            "n": n, "r": r, "t": t,
            "graphs": rep.graphs,
            "max_lambda": rep.max_lambda,
            "witness": rep.witness.edges_one_based(),
            "witness_is_star_subgraph": rep.witness_is_star_subgraph,
            "best_non_star": best(&rep.best_non_star),
            "best_star": best(&rep.best_star),
        }),
        ok: true,
    })
}

fn symmetrize_cmd(g: &Hypergraph, cfg: &SymConfig, trace_path: Option<&Path>) -> anyhow::Result<Outcome> {
    let trace = symmetrize(g, cfg)?;
    let violations = audit(&trace);
    if let Some(p) = trace_path {
        std::fs::write(p, serde_json::to_string_pretty(&trace.events)? + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    let mut text = String::new();
    for e in &trace.events {
        let _ = writeln!(text, "{:>4} {:<6} {:<24} v={} e={}", e.index, e.kind, e.detail, e.vertex_count, e.edge_count);
    }
    let fixed = trace.fixed_point();
    let _ = writeln!(
        text,
        "fixed point: {} vertices, {} parts, {} edges; representatives form a star: {}",
        fixed.vertex_count(),
        fixed.parts.len(),
        fixed.edge_count(),
        trace.reps_form_star()
    );
    for v in &violations {
        let _ = writeln!(text, "violation state {} {}: {}", v.state, v.property, v.detail);
    }
    let _ = writeln!(text, "audit {}", if violations.is_empty() { "pass" } else { "FAIL" });
    let parts: Vec<Vec<usize>> = fixed.parts.values().map(|p| one_based(p.iter().copied())).collect();
    Ok(Outcome {
        text,
        json: json!({
            "events": trace.events,
            "fixed_point": {"parts": parts, "edges": fixed.edge_count()},
            "violations": violations.iter().map(|v| json!({"state": v.state, "property": v.property, "detail": v.detail})).collect::<Vec<_>>(),
        }),
        ok: violations.is_empty(),
    })
}

fn partition_outcome(s: &PartitionScore) -> Outcome {
    Outcome {
        text: format!(
            "sigma {}\nW1 {}\nW2 {}\ngood {} bad {} very_bad {} worst {}\n",
            s.sigma,
            joined(s.w1.iter()),
            joined(s.w2.iter()),
            s.good,
            s.bad,
            s.very_bad,
            s.worst
        ),
        json: json!({
            "sigma": s.sigma,
            "w1": one_based(s.w1.iter()),
            "w2": one_based(s.w2.iter()),
            "good": s.good, "bad": s.bad, "very_bad": s.very_bad, "worst": s.worst,
        }),
        ok: true,
    }
}

fn verify(ctx: &Ctx, suite: Suite, ns: std::ops::RangeInclusive<usize>, theorem_n: usize, witness: Option<&Path>) -> anyhow::Result<Outcome> {
    let mut rows: Vec<VerificationRow> = Vec::new();
    if matches!(suite, Suite::Cases | Suite::All) {
        rows.extend(verify_cases(ns.clone(), &ctx.solver)?);
    }
    if matches!(suite, Suite::Closed | Suite::All) {
        let lo = (*ns.start()).min(4);
        rows.extend(verify_closed_forms(lo..=*ns.end(), &ctx.solver)?);
    }
    if matches!(suite, Suite::Theorem | Suite::All) {
        let summary = verify_theorem(theorem_n, &ctx.solver, ctx.guards.enumerate)?;
        if let (Some(path), Some(g)) = (witness, &summary.violation) {
            std::fs::write(path, io::to_hg(g)).with_context(|| format!("writing {}", path.display()))?;
        }
        rows.extend(summary.verification_rows());
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    let mut text = String::new();
    for r in &rows {
        let _ = writeln!(text, "{r}");
    }
    let _ = writeln!(text, "{} checks, {failed} failed", rows.len());
    Ok(Outcome {
        text,
        json: serde_json::to_value(&rows)?,
        ok: failed == 0,
    })
}
