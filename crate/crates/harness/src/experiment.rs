//! Seeded experiment runs: one pipeline run per generated instance, one CSV
//! row each. Instances run in parallel; rows are emitted in instance order.
//! Per-instance wall time goes to a separate timing CSV so the result CSV is
//! byte-identical across reruns.

use std::path::{Path, PathBuf};
use std::time::Instant;

use acychrom::almost_acyclic::{main_pipeline, measure_alpha, measure_chi};
use acychrom::oracles::{bipartite_independence_number_exact, f_exact};
use acychrom::rng::child_seed;
use acychrom::{Digraph, Error, OracleLimits, Result, UndirectedGraph};
use rayon::prelude::*;

use crate::artifacts::write_atomic;
use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub instance: u64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub alpha: usize,
    pub alpha_exact: bool,
    /// Exact, or the trivial bound `⌊n/2⌋`.
    pub alpha_star: usize,
    pub alpha_star_exact: bool,
    /// Exact, or the size of a DSATUR coloring.
    pub chi: usize,
    pub chi_exact: bool,
    pub branch: &'static str,
    pub intended: &'static str,
    pub degraded: usize,
    pub k: usize,
    /// Certified lower bound on χ of the returned acyclic subgraph.
    pub lower_bound: usize,
    pub colors: usize,
    pub colors_optimal: bool,
    pub f_exact: Option<usize>,
    pub branch_bound: Option<f64>,
    pub precondition: Option<bool>,
    pub wall_ms: f64,
}

pub const HEADER: [&str; 22] = [
    "instance",
    "seed",
    "n",
    "m",
    "s",
    "alpha",
    "alpha_exact",
    "alpha_star",
    "alpha_star_exact",
    "chi",
    "chi_exact",
    "branch",
    "intended",
    "degraded",
    "k",
    "L",
    "colors",
    "colors_optimal",
    "f_exact",
    "branch_bound",
    "precondition",
    "gen",
];

/// `x` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "NA".into())
}

impl ResultRow {
    fn record(&self, gen: &str) -> Vec<String> {
        vec![
            self.instance.to_string(),
            self.seed.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.s.to_string(),
            self.alpha.to_string(),
            self.alpha_exact.to_string(),
            self.alpha_star.to_string(),
            self.alpha_star_exact.to_string(),
            self.chi.to_string(),
            self.chi_exact.to_string(),
            self.branch.to_string(),
            self.intended.to_string(),
            self.degraded.to_string(),
            self.k.to_string(),
            self.lower_bound.to_string(),
            self.colors.to_string(),
            self.colors_optimal.to_string(),
            opt(self.f_exact),
            self.branch_bound.map(sig6).unwrap_or_else(|| "NA".into()),
            opt(self.precondition),
            gen.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub csv: String,
    pub timing_csv: String,
}

/// Exact `α*` in range, otherwise `⌊n/2⌋`; the flag tells which.
pub fn measure_alpha_star(h: &UndirectedGraph, limits: &OracleLimits) -> (usize, bool) {
    if h.n() <= limits.max_n_exact_astar {
        if let Ok(v) = bipartite_independence_number_exact(h, limits) {
            return (v, true);
        }
    }
    (h.n() / 2, false)
}

/// Smallest `s` with `α < s` and `α* < s` that the measured values certify.
pub fn auto_s(g: &Digraph, limits: &OracleLimits) -> usize {
    let h = g.underlying();
    measure_alpha(&h, limits).value.max(measure_alpha_star(&h, limits).0) + 1
}

fn run_instance(cfg: &ExperimentConfig, instance: u64) -> Result<ResultRow> {
    let start = Instant::now();
    let seed = child_seed(cfg.seed, instance);
    let g = cfg.gen.generate(seed)?;
    let h = g.underlying();
    let limits = &cfg.limits;
    let alpha = measure_alpha(&h, limits);
    let (alpha_star, alpha_star_exact) = measure_alpha_star(&h, limits);
    let chi = measure_chi(&h, limits);
    let s = cfg.gen.s.unwrap_or(alpha.value.max(alpha_star) + 1);
    let params = cfg.pipeline.params(s, child_seed(seed, 1), *limits);
    let out = main_pipeline(&g, &params)?;
    let f = if g.n() <= limits.max_n_exact_fg {
        f_exact(&g, limits).ok().map(|f| f.f)
    } else {
        None
    };
    Ok(ResultRow {
        instance,
        seed,
        n: g.n(),
        m: g.m(),
        s,
        alpha: alpha.value,
        alpha_exact: alpha.exact,
        alpha_star,
        alpha_star_exact,
        chi: chi.value,
        chi_exact: chi.exact,
        branch: out.branch.as_str(),
        intended: out.intended.as_str(),
        degraded: out.degraded.len(),
        k: out.k,
        lower_bound: out.lower_bound,
        colors: out.coloring.num_colors,
        colors_optimal: out.coloring_optimal,
        f_exact: f,
        branch_bound: out.branch_bound,
        precondition: out.precondition.holds,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Precondition(format!("csv: {e}"))
}

fn to_csv(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in records {
        w.write_record(&r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(csv_err)?;
    String::from_utf8(bytes).map_err(csv_err)
}

/// Runs every instance and renders both CSVs. Nothing is written to disk.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_instance(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let gen = cfg.gen.kind.name();
    let csv = to_csv(&HEADER, rows.iter().map(|r| r.record(gen)))?;
    let timing_csv = to_csv(
        &["instance", "wall_ms"],
        rows.iter().map(|r| vec![r.instance.to_string(), sig6(r.wall_ms)]),
    )?;
    Ok(ExperimentOutput { rows, csv, timing_csv })
}

/// `results.csv` → `results.timing.csv`.
pub fn timing_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.timing.csv"))
}

/// Writes both CSVs atomically.
pub fn write_experiment(out: &Path, result: &ExperimentOutput) -> std::io::Result<()> {
    write_atomic(out, result.csv.as_bytes())?;
    write_atomic(&timing_path(out), result.timing_csv.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text, &[]).unwrap()
    }

    #[test]
    fn tournaments_reach_three() {
        let out = run_experiment(&cfg("gen = tournament\nn = 8\ntrials = 50\nseed = 1\n")).unwrap();
        assert_eq!(out.rows.len(), 50);
        for r in &out.rows {
            assert!(r.lower_bound >= 3, "{r:?}");
            assert_eq!(r.chi, 8);
            assert!(r.f_exact.unwrap() >= r.lower_bound);
        }
        assert_eq!(out.csv.lines().count(), 51);
    }

    #[test]
    fn edgeless_rows_have_l_one() {
        let out = run_experiment(&cfg("gen = gnp\np = 0\nn = 6\ntrials = 5\n")).unwrap();
        assert!(out.rows.iter().all(|r| r.lower_bound == 1 && r.m == 0));
    }

    #[test]
    fn reruns_are_identical() {
        let c = cfg("gen = gnp\np = 0.5\nn = 9\ntrials = 12\nseed = 4\n");
        assert_eq!(run_experiment(&c).unwrap().csv, run_experiment(&c).unwrap().csv);
    }

    #[test]
    fn exact_flags_follow_limits() {
        let c = cfg("gen = tournament\nn = 10\ntrials = 3\nlimits.max_n_exact_chi = 9\nlimits.max_n_exact_astar = 9\n");
        for r in run_experiment(&c).unwrap().rows {
            assert!(!r.alpha_exact && !r.chi_exact && !r.alpha_star_exact);
            assert_eq!(r.f_exact, None);
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig6(1.0 / 3.0), "0.333333");
        assert_eq!(sig6(1234.5678), "1234.57");
        assert_eq!(sig6(2.0), "2.00000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
        assert_eq!(timing_path(Path::new("a/r.csv")), PathBuf::from("a/r.timing.csv"));
    }
}
