use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acychrom::almost_acyclic::{
    block_permutation_construct, iterate_reduce, main_pipeline, measure_alpha, measure_chi, random_perm_search,
    refine_align, RefineError, RefineTrace,
};
use acychrom::digraph::{read_digraph, write_digraph};
use acychrom::oracles::{count_acyclic_ksets, edgeless_probability_exact, f_exact};
use acychrom::pathcover::gallai_milgram;
use acychrom::{Digraph, OracleLimits};
use acychrom_harness::artifacts::{coloring_line, parse_permutation, permutation_line, write_atomic};
use acychrom_harness::config::{parse_limits, ExperimentConfig, GenKind, GenSpec, PipelineKnobs};
use acychrom_harness::demo::counterexample_demo;
use acychrom_harness::experiment::{auto_s, measure_alpha_star, run_experiment, timing_path, write_experiment};
use acychrom_harness::verify::verify_texts;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "acychrom", version, about = "Acyclic subgraphs of orientations with large chromatic number")]
struct Cli {
    /// Base seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Oracle limits, e.g. `max_n_exact_chi=16,max_n_exact_fg=8`.
    #[arg(long, global = true)]
    limits: Option<String>,
    /// Output file (a directory for `pipeline`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tournament,
    Gnp,
    Transitive,
    Cycle,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an orientation.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
    /// Exact invariants of a small orientation.
    Oracle {
        graph: PathBuf,
        /// Also count acyclic k-sets.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Gallai–Milgram path cover, one path per line.
    Pathcover { graph: PathBuf },
    /// Uniform permutation search for `α(G_π) ≤ k`.
    Search {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        trials: u64,
    },
    /// Block permutation of an orientation with against-degree at most q.
    Blockperm {
        graph: PathBuf,
        /// Permutation file (ranks).
        #[arg(long)]
        perm: PathBuf,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 16)]
        retries: u64,
    },
    /// Bin refinement/alignment trace.
    Refine {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        /// Repeat on the white vertices.
        #[arg(long)]
        iterate: bool,
        /// CSV instead of the line log.
        #[arg(long)]
        csv: bool,
    },
    /// Full pipeline; writes artifacts into `--out`.
    Pipeline {
        graph: PathBuf,
        /// `auto` or an integer.
        #[arg(long, default_value = "auto")]
        s: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        exponent: Option<f64>,
        #[arg(long)]
        folklore_trials: Option<u64>,
        #[arg(long)]
        search_trials: Option<u64>,
        #[arg(long)]
        block_retries: Option<u64>,
        #[arg(long)]
        kset_samples: Option<u64>,
    },
    /// Seeded experiment from a key=value config.
    Experiment {
        config: PathBuf,
        /// `key=value` overrides applied after the file.
        #[arg(long = "set")]
        set: Vec<String>,
    },
    /// Independent check of digraph + permutation (+ coloring, + q).
    Verify {
        graph: PathBuf,
        perm: PathBuf,
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Color classes of the multipartite bucket construction.
    DemoCounterexample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
    },
}

type CliResult = Result<bool, String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<Digraph, String> {
    read_digraph(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn oracle(g: &Digraph, k: Option<usize>, limits: &OracleLimits) -> Result<String, String> {
    let h = g.underlying();
    let alpha = measure_alpha(&h, limits);
    let (astar, astar_exact) = measure_alpha_star(&h, limits);
    let chi = measure_chi(&h, limits);
    let mut s = String::new();
    let _ = writeln!(s, "n={} m={}", g.n(), g.m());
    let _ = writeln!(s, "alpha={} exact={}", alpha.value, alpha.exact);
    let _ = writeln!(s, "alpha_star={} exact={}", astar, astar_exact);
    let _ = writeln!(s, "chi={} exact={}", chi.value, chi.exact);
    match f_exact(g, limits) {
        Ok(f) => {
            let _ = writeln!(s, "f={} witness={}", f.f, permutation_line(&f.witness).trim_end());
        }
        Err(e) => {
            let _ = writeln!(s, "f=NA ({e})");
        }
    }
    match edgeless_probability_exact(g, limits) {
        Ok(p) => {
            let _ = writeln!(s, "edgeless_probability={p}");
        }
        Err(e) => {
            let _ = writeln!(s, "edgeless_probability=NA ({e})");
        }
    }
    if let Some(k) = k {
        let c = count_acyclic_ksets(g, k, limits).map_err(err)?;
        let _ = writeln!(s, "acyclic_ksets k={k} count={c}");
    }
    Ok(s)
}

fn trace_text(trace: &RefineTrace, csv: bool) -> String {
    if csv {
        format!("{}\n{}", RefineTrace::csv_header(), trace.to_csv())
    } else {
        trace.to_log()
    }
}

fn refine(g: &Digraph, k: usize, s: usize, iterate: bool, csv: bool, limits: &OracleLimits) -> Result<(String, bool), String> {
    let refined = if iterate {
        iterate_reduce(g, k, s, limits).map(|r| {
            let mut text: String = r.rounds.iter().map(|t| trace_text(t, csv)).collect();
            let _ = writeln!(
                text,
                "# rounds={} planned={} k_final={} q={} vertices={}",
                r.rounds.len(),
                r.planned_rounds,
                r.k_final,
                r.q,
                r.graph.graph.n()
            );
            if let Some(why) = &r.stopped {
                let _ = writeln!(text, "# stopped: {why}");
            }
            text
        })
    } else {
        refine_align(g, k, s, limits).map(|r| trace_text(&r.trace, csv))
    };
    match refined {
        Ok(text) => Ok((text, true)),
        Err(RefineError::DeadEnd { step, reason, trace }) => {
            let mut text = trace_text(&trace, csv);
            let _ = writeln!(text, "# dead end at step {step}: {reason}");
            Ok((text, false))
        }
        Err(e) => Err(err(e)),
    }
}

fn pipeline(g: &Digraph, s: usize, knobs: &PipelineKnobs, seed: u64, limits: OracleLimits, out: Option<&Path>) -> Result<String, String> {
    let params = knobs.params(s, seed, limits);
    let r = main_pipeline(g, &params).map_err(err)?;
    let mut sum = String::new();
    let _ = writeln!(sum, "n={} m={} s={} k={}", g.n(), g.m(), s, r.k);
    let _ = writeln!(sum, "branch={} intended={}", r.branch.as_str(), r.intended.as_str());
    for d in &r.degraded {
        let _ = writeln!(sum, "degraded: {d}");
    }
    let _ = writeln!(
        sum,
        "L={} colors={} optimal={} arcs={}",
        r.lower_bound,
        r.coloring.num_colors,
        r.coloring_optimal,
        r.subgraph.m()
    );
    if let Some(b) = r.branch_bound {
        let _ = writeln!(sum, "branch_bound={b:.6}");
    }
    if let Some(w) = &r.almost {
        let _ = writeln!(sum, "almost_vertices={} q={} blocks={} rounds={}", w.graph.graph.n(), w.q, w.blocks, w.rounds);
    }
    let pre = match r.precondition.holds {
        Some(h) => h.to_string(),
        None => "unknown".into(),
    };
    let _ = writeln!(sum, "precondition={pre}");
    if let Some(dir) = out {
        let put = |name: &str, text: &str| write_atomic(&dir.join(name), text.as_bytes()).map_err(err);
        put("witness.perm", &permutation_line(&r.witness))?;
        put("witness.coloring", &coloring_line(&r.coloring))?;
        put("summary.txt", &sum)?;
        if let Some(w) = &r.almost {
            put("almost.graph", &write_digraph(&w.graph.graph))?;
            put("almost.perm", &permutation_line(&w.order))?;
            put("almost.q", &format!("{}\n", w.q))?;
            let parent: Vec<String> = w.graph.parent.iter().map(|p| p.to_string()).collect();
            put("almost.parent", &format!("{}\n", parent.join(" ")))?;
        }
    }
    Ok(sum)
}

fn run(cli: Cli) -> CliResult {
    let limits = match &cli.limits {
        Some(spec) => parse_limits(spec).map_err(err)?,
        None => OracleLimits::default(),
    };
    let out = cli.out.as_deref();
    match cli.cmd {
        Cmd::Gen { kind, n, p } => {
            let kind = match kind {
                Kind::Tournament => GenKind::Tournament,
                Kind::Gnp => GenKind::Gnp(p),
                Kind::Transitive => GenKind::Transitive,
                Kind::Cycle => GenKind::Cycle,
            };
            let g = GenSpec { kind, n, s: None }.generate(cli.seed).map_err(err)?;
            emit(out, &write_digraph(&g))?;
            Ok(true)
        }
        Cmd::Oracle { graph, k } => {
            emit(out, &oracle(&load(&graph)?, k, &limits)?)?;
            Ok(true)
        }
        Cmd::Pathcover { graph } => {
            let gm = gallai_milgram(&load(&graph)?);
            let text: String = gm
                .cover
                .paths()
                .iter()
                .map(|p| p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") + "\n")
                .collect();
            emit(out, &text)?;
            Ok(true)
        }
        Cmd::Search { graph, k, trials } => {
            let r = random_perm_search(&load(&graph)?, k, trials, cli.seed, &limits).map_err(err)?;
            eprintln!(
                "alpha={} exact={} trial={} of {} success={}",
                r.alpha.value, r.alpha.exact, r.trial, r.trials, r.success
            );
            emit(out, &permutation_line(&r.best))?;
            Ok(r.success)
        }
        Cmd::Blockperm { graph, perm, q, retries } => {
            let g = load(&graph)?;
            let sigma = parse_permutation(&read(&perm)?, g.n()).map_err(|e| format!("{}: {e}", perm.display()))?;
            let r = block_permutation_construct(&g, &sigma, q, retries, cli.seed, &limits).map_err(err)?;
            eprintln!(
                "blocks={} alpha={} exact={} retry={} of {}",
                r.plan.t(),
                r.alpha.value,
                r.alpha.exact,
                r.retry,
                r.retries
            );
            emit(out, &permutation_line(&r.pi))?;
            Ok(true)
        }
        Cmd::Refine { graph, k, s, iterate, csv } => {
            let (text, ok) = refine(&load(&graph)?, k, s, iterate, csv, &limits)?;
            emit(out, &text)?;
            Ok(ok)
        }
        Cmd::Pipeline {
            graph,
            s,
            k,
            exponent,
            folklore_trials,
            search_trials,
            block_retries,
            kset_samples,
        } => {
            let g = load(&graph)?;
            let s = if s == "auto" {
                auto_s(&g, &limits)
            } else {
                s.parse().map_err(|_| format!("invalid --s {s:?}"))?
            };
            let knobs = PipelineKnobs {
                k,
                s_threshold_exponent: exponent,
                folklore_trials,
                search_trials,
                block_retries,
                kset_samples,
            };
            print!("{}", pipeline(&g, s, &knobs, cli.seed, limits, out)?);
            Ok(true)
        }
        Cmd::Experiment { config, set } => {
            let mut overrides = set;
            if let Some(l) = &cli.limits {
                for item in l.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                    overrides.push(if item.starts_with("limits.") { item.to_string() } else { format!("limits.{item}") });
                }
            }
            let mut cfg = ExperimentConfig::parse(&read(&config)?, &overrides).map_err(|e| format!("{}: {e}", config.display()))?;
            if let Some(o) = out {
                cfg.out = Some(o.to_path_buf());
            }
            let result = run_experiment(&cfg).map_err(err)?;
            match &cfg.out {
                Some(path) => {
                    write_experiment(path, &result).map_err(err)?;
                    eprintln!(
                        "{} rows -> {} (timing: {})",
                        result.rows.len(),
                        path.display(),
                        timing_path(path).display()
                    );
                }
                None => print!("{}", result.csv),
            }
            Ok(true)
        }
        Cmd::Verify { graph, perm, coloring, q } => {
            let color_text = coloring.as_deref().map(read).transpose()?;
            let report = verify_texts(&read(&graph)?, &read(&perm)?, color_text.as_deref(), q).map_err(err)?;
            emit(out, &report.render())?;
            Ok(report.pass())
        }
        Cmd::DemoCounterexample { n, s } => {
            let r = counterexample_demo(n, s, &limits).map_err(err)?;
            emit(out, &format!("{r}\n"))?;
            Ok(r.holds())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
