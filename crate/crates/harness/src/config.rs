//! Flat `key = value` experiment configs. `#` starts a comment.
//!
//! ```text
//! name = tournaments
//! gen = tournament        # tournament | gnp | transitive | cycle
//! n = 8
//! p = 0.5                 # gnp only
//! s = auto                # or an integer
//! trials = 50
//! seed = 1
//! out = results.csv
//! limits.max_n_exact_chi = 20
//! pipeline.k = 4
//! ```

use std::path::PathBuf;

use acychrom::almost_acyclic::PipelineParams;
use acychrom::digraph::{directed_cycle, random_orientation_gnp, random_tournament, transitive_tournament};
use acychrom::{Digraph, Error, OracleLimits, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenKind {
    Tournament,
    Gnp(f64),
    Transitive,
    Cycle,
}

impl GenKind {
    pub fn name(&self) -> &'static str {
        match self {
            GenKind::Tournament => "tournament",
            GenKind::Gnp(_) => "gnp",
            GenKind::Transitive => "transitive",
            GenKind::Cycle => "cycle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    /// `None` picks `s = max(α, α*) + 1` per instance.
    pub s: Option<usize>,
}

impl GenSpec {
    pub fn generate(&self, seed: u64) -> Result<Digraph> {
        match self.kind {
            GenKind::Tournament => Ok(random_tournament(self.n, seed)),
            GenKind::Gnp(p) => random_orientation_gnp(self.n, p, seed),
            GenKind::Transitive => Ok(transitive_tournament(self.n)),
            GenKind::Cycle => Ok(directed_cycle(self.n)),
        }
    }
}

/// Pipeline knobs that may be overridden from a config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineKnobs {
    pub k: Option<usize>,
    pub s_threshold_exponent: Option<f64>,
    pub folklore_trials: Option<u64>,
    pub search_trials: Option<u64>,
    pub block_retries: Option<u64>,
    pub kset_samples: Option<u64>,
}

impl PipelineKnobs {
    pub fn params(&self, s: usize, seed: u64, limits: OracleLimits) -> PipelineParams {
        let mut p = PipelineParams::new(s, seed);
        p.limits = limits;
        p.k = self.k;
        if let Some(x) = self.s_threshold_exponent {
            p.s_threshold_exponent = x;
        }
        if let Some(x) = self.folklore_trials {
            p.folklore_trials = x;
        }
        if let Some(x) = self.search_trials {
            p.search_trials = x;
        }
        if let Some(x) = self.block_retries {
            p.block_retries = x;
        }
        if let Some(x) = self.kset_samples {
            p.kset_samples = x;
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub gen: GenSpec,
    pub trials: u64,
    pub seed: u64,
    pub limits: OracleLimits,
    pub pipeline: PipelineKnobs,
    pub out: Option<PathBuf>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid value {value:?} for {key}"),
    })
}

/// Accumulates keys before the generator is validated.
#[derive(Debug, Clone)]
struct Raw {
    name: String,
    gen: String,
    n: Option<usize>,
    p: Option<f64>,
    s: Option<usize>,
    trials: u64,
    seed: u64,
    limits: OracleLimits,
    pipeline: PipelineKnobs,
    out: Option<PathBuf>,
}

impl Raw {
    fn new() -> Self {
        Raw {
            name: "experiment".into(),
            gen: "tournament".into(),
            n: None,
            p: None,
            s: None,
            trials: 1,
            seed: 0,
            limits: OracleLimits::default(),
            pipeline: PipelineKnobs::default(),
            out: None,
        }
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        match key {
            "name" => self.name = value.to_string(),
            "gen" => self.gen = value.to_string(),
            "n" => self.n = Some(num(line, key, value)?),
            "p" => self.p = Some(num(line, key, value)?),
            "s" => self.s = if value == "auto" { None } else { Some(num(line, key, value)?) },
            "trials" => self.trials = num(line, key, value)?,
            "seed" => self.seed = num(line, key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "limits.max_n_exact_chi" => self.limits.max_n_exact_chi = num(line, key, value)?,
            "limits.max_n_exact_fg" => self.limits.max_n_exact_fg = num(line, key, value)?,
            "limits.max_n_exact_astar" => self.limits.max_n_exact_astar = num(line, key, value)?,
            "limits.max_perm_enum" => self.limits.max_perm_enum = num(line, key, value)?,
            "limits.max_subset_enum" => self.limits.max_subset_enum = num(line, key, value)?,
            "pipeline.k" => self.pipeline.k = Some(num(line, key, value)?),
            "pipeline.s_threshold_exponent" => self.pipeline.s_threshold_exponent = Some(num(line, key, value)?),
            "pipeline.folklore_trials" => self.pipeline.folklore_trials = Some(num(line, key, value)?),
            "pipeline.search_trials" => self.pipeline.search_trials = Some(num(line, key, value)?),
            "pipeline.block_retries" => self.pipeline.block_retries = Some(num(line, key, value)?),
            "pipeline.kset_samples" => self.pipeline.kset_samples = Some(num(line, key, value)?),
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key {key:?}"),
                })
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<ExperimentConfig> {
        let n = self.n.ok_or_else(|| invalid("missing key n"))?;
        let kind = match self.gen.as_str() {
            "tournament" => GenKind::Tournament,
            "transitive" => GenKind::Transitive,
            "cycle" => GenKind::Cycle,
            "gnp" => {
                let p = self.p.ok_or_else(|| invalid("gen = gnp needs p"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidProbability(p));
                }
                GenKind::Gnp(p)
            }
            other => return Err(invalid(format!("unknown generator {other:?}"))),
        };
        if kind == GenKind::Cycle && n < 3 {
            return Err(invalid("cycle needs n >= 3"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.s == Some(0) || self.pipeline.k == Some(0) {
            return Err(invalid("s and pipeline.k must be at least 1"));
        }
        self.limits.validate()?;
        let cfg = ExperimentConfig {
            name: self.name,
            gen: GenSpec { kind, n, s: self.s },
            trials: self.trials,
            seed: self.seed,
            limits: self.limits,
            pipeline: self.pipeline,
            out: self.out,
        };
        cfg.pipeline.params(1, 0, cfg.limits).validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    /// Parses `text`, then applies `overrides` (`key=value` each) in order.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut raw = Raw::new();
        for (idx, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = split_pair(idx + 1, body)?;
            raw.set(idx + 1, k, v)?;
        }
        for ov in overrides {
            let (k, v) = split_pair(0, ov)?;
            raw.set(0, k, v)?;
        }
        raw.finish()
    }
}

fn split_pair(line: usize, body: &str) -> Result<(&str, &str)> {
    let (k, v) = body.split_once('=').ok_or_else(|| Error::Parse {
        line,
        message: format!("expected key = value, found {body:?}"),
    })?;
    Ok((k.trim(), v.trim()))
}

/// `key=value[,key=value...]` limits overrides on top of the defaults.
pub fn parse_limits(spec: &str) -> Result<OracleLimits> {
    let mut raw = Raw::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = split_pair(0, item)?;
        let key = if k.starts_with("limits.") { k.to_string() } else { format!("limits.{k}") };
        raw.set(0, &key, v)?;
    }
    raw.limits.validate()?;
    Ok(raw.limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "name = t8\ngen = gnp # comment\np = 0.25\nn = 8\ns = 3\ntrials = 5\nseed = 9\n\
                    limits.max_n_exact_fg = 7\npipeline.k = 4\nout = x.csv\n";
        let c = ExperimentConfig::parse(text, &["seed=11".into()]).unwrap();
        assert_eq!(c.name, "t8");
        assert_eq!(c.gen, GenSpec { kind: GenKind::Gnp(0.25), n: 8, s: Some(3) });
        assert_eq!((c.trials, c.seed), (5, 11));
        assert_eq!(c.limits.max_n_exact_fg, 7);
        assert_eq!(c.pipeline.k, Some(4));
        assert_eq!(c.out, Some(PathBuf::from("x.csv")));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse("gen = tournament\n", &[]).is_err());
        assert!(ExperimentConfig::parse("n = 5\ntrials = 0\n", &[]).is_err());
        assert!(ExperimentConfig::parse("n = 5\ngen = gnp\n", &[]).is_err());
        assert!(ExperimentConfig::parse("n = 5\ngen = gnp\np = 1.5\n", &[]).is_err());
        assert!(ExperimentConfig::parse("n = 2\ngen = cycle\n", &[]).is_err());
        assert!(ExperimentConfig::parse("n = 5\ngen = star\n", &[]).is_err());
        assert!(matches!(
            ExperimentConfig::parse("n = 5\nbogus = 1\n", &[]),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(ExperimentConfig::parse("n = x\n", &[]), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn limits_spec() {
        let l = parse_limits("max_n_exact_chi=12, limits.max_perm_enum=8").unwrap();
        assert_eq!((l.max_n_exact_chi, l.max_perm_enum), (12, 8));
        assert!(parse_limits("max_n_exact_chi=0").is_err());
        assert!(parse_limits("nope=1").is_err());
    }
}
