//! Pipeline configuration and its line-oriented `key = value` file format.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forge::ForgeConfig;
use crate::retrieval::DEFAULT_CUTOFF;
use crate::strategy::StrategySpecs;
use crate::tempex::{CueLexicon, TempexParser};
use crate::text::Stopwords;
use crate::verify::Synonyms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Mode {
    Faith,
    Unfaith,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Faith => "FAITH",
            Mode::Unfaith => "UNFAITH",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "faith" => Ok(Mode::Faith),
            "unfaith" => Ok(Mode::Unfaith),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FallbackPolicy {
    Never,
    OnRefusal,
}

impl FromStr for FallbackPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "never" => Ok(FallbackPolicy::Never),
            "on-refusal" => Ok(FallbackPolicy::OnRefusal),
            other => Err(Error::Config(format!("unknown fallback policy `{other}`"))),
        }
    }
}

/// Weights of the answer ranking score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankWeights {
    pub support: f64,
    pub overlap: f64,
    pub type_match: f64,
}

impl Default for RankWeights {
    fn default() -> Self {
        Self { support: 0.5, overlap: 0.4, type_match: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub window: (i32, i32),
    pub cue_lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    pub strategies: StrategySpecs,
    pub k: usize,
    pub resolver_k: usize,
    pub mode: Mode,
    pub fallback: FallbackPolicy,
    pub weights: RankWeights,
    pub sigma: f64,
    pub theta: f64,
    pub seed: u64,
    pub forge: ForgeConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            index: None,
            window: (1000, 2100),
            cue_lexicon: None,
            stopwords: None,
            synonyms: None,
            strategies: StrategySpecs::default(),
            k: DEFAULT_CUTOFF,
            resolver_k: 1,
            mode: Mode::Faith,
            fallback: FallbackPolicy::Never,
            weights: RankWeights::default(),
            sigma: 0.5,
            theta: 0.3,
            seed: 0,
            forge: ForgeConfig::default(),
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_ratios(key: &str, value: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|p| parse_num::<f64>(key, p.trim()))
        .collect::<Result<_>>()?;
    <[f64; 3]>::try_from(parts).map_err(|_| Error::Config(format!("`{key}` needs three comma-separated numbers")))
}

impl PipelineConfig {
    /// Reads a config file; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path)?;
        let mut cfg = Self::default();
        let base = path.parent().unwrap_or(Path::new("."));
        for (i, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("{}:{}: expected `key = value`", path.display(), i + 1)))?;
            cfg.set(key.trim(), value.trim(), base)
                .map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one setting. Paths are resolved against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = || Some(base.join(value));
        let timeout = |v: &str| parse_num::<u64>(key, v).map(Duration::from_millis);
        match key {
            "corpus" => self.corpus = path(),
            "index" => self.index = path(),
            "window_min" => self.window.0 = parse_num(key, value)?,
            "window_max" => self.window.1 = parse_num(key, value)?,
            "cue_lexicon" => self.cue_lexicon = path(),
            "stopwords" => self.stopwords = path(),
            "synonyms" => self.synonyms = path(),
            "extractor" => self.strategies.extractor.name = value.into(),
            "extractor_endpoint" => self.strategies.extractor.endpoint = Some(value.into()),
            "generator" => self.strategies.generator.name = value.into(),
            "generator_endpoint" => self.strategies.generator.endpoint = Some(value.into()),
            "scorer" => self.strategies.scorer.name = value.into(),
            "scorer_endpoint" => self.strategies.scorer.endpoint = Some(value.into()),
            "rephraser" => self.strategies.rephraser.name = value.into(),
            "rephraser_endpoint" => self.strategies.rephraser.endpoint = Some(value.into()),
            "endpoint_timeout_ms" => {
                let t = timeout(value)?;
                for s in [
                    &mut self.strategies.extractor,
                    &mut self.strategies.generator,
                    &mut self.strategies.scorer,
                    &mut self.strategies.rephraser,
                ] {
                    s.timeout = t;
                }
            }
            "k" => self.k = parse_num(key, value)?,
            "resolver_k" => self.resolver_k = parse_num(key, value)?,
            "mode" => self.mode = value.parse()?,
            "fallback" => self.fallback = value.parse()?,
            "weight_support" => self.weights.support = parse_num(key, value)?,
            "weight_overlap" => self.weights.overlap = parse_num(key, value)?,
            "weight_type" => self.weights.type_match = parse_num(key, value)?,
            "sigma" => self.sigma = parse_num(key, value)?,
            "theta" => self.theta = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "forge_topics" => self.forge.topics = Some(parse_num(key, value)?),
            "forge_quotas" => {
                let q: Vec<usize> = value
                    .split(',')
                    .map(|p| parse_num(key, p.trim()))
                    .collect::<Result<_>>()?;
                self.forge.quotas = Some(
                    <[usize; 3]>::try_from(q)
                        .map_err(|_| Error::Config(format!("`{key}` needs three counts")))?,
                );
            }
            "forge_type_cap" => self.forge.type_cap = parse_num(key, value)?,
            "forge_max_per_topic" => self.forge.max_per_topic = parse_num(key, value)?,
            "forge_split" => self.forge.split = parse_ratios(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.window.0 > self.window.1 {
            return bad(format!("empty plausibility window [{}, {}]", self.window.0, self.window.1));
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if !(1..=100).contains(&self.resolver_k) {
            return bad(format!("resolver_k {} outside [1, 100]", self.resolver_k));
        }
        for (name, v) in [("sigma", self.sigma), ("theta", self.theta)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} {v} outside [0, 1]"));
            }
        }
        let w = self.weights;
        if [w.support, w.overlap, w.type_match].iter().any(|x| !x.is_finite() || *x < 0.0) {
            return bad("ranking weights must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.forge.type_cap) {
            return bad(format!("forge_type_cap {} outside [0, 1]", self.forge.type_cap));
        }
        let s = self.forge.split;
        if s.iter().any(|r| *r < 0.0) || (s.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("forge_split ratios must be non-negative and sum to 1".into());
        }
        Ok(())
    }

    pub fn parser(&self) -> Result<TempexParser> {
        let lexicon = match &self.cue_lexicon {
            Some(p) => CueLexicon::load(p)?,
            None => CueLexicon::default(),
        };
        TempexParser::new(self.window, lexicon)
    }

    pub fn load_stopwords(&self) -> Result<Stopwords> {
        match &self.stopwords {
            Some(p) => Stopwords::load(p),
            None => Ok(Stopwords::default()),
        }
    }

    pub fn load_synonyms(&self) -> Result<Synonyms> {
        match &self.synonyms {
            Some(p) => Synonyms::load(p),
            None => Ok(Synonyms::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_settings() {
        let c = PipelineConfig::default();
        assert_eq!(c.k, 100);
        assert_eq!(c.resolver_k, 1);
        assert_eq!(c.mode, Mode::Faith);
        assert_eq!(c.fallback, FallbackPolicy::Never);
        c.validate().unwrap();
    }

    #[test]
    fn file_round() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("pipeline.conf");
        fs::write(
            &p,
            "# comment\ncorpus = corpus\nk = 50\nmode = unfaith\nfallback = on-refusal\nscorer = http\nscorer_endpoint = http://localhost:9/\nforge_split = 0.8, 0.1, 0.1\n",
        )
        .unwrap();
        let c = PipelineConfig::load(&p).unwrap();
        assert_eq!(c.corpus, Some(d.path().join("corpus")));
        assert_eq!(c.k, 50);
        assert_eq!(c.mode, Mode::Unfaith);
        assert_eq!(c.fallback, FallbackPolicy::OnRefusal);
        assert_eq!(c.strategies.scorer.name, "http");
        assert_eq!(c.forge.split, [0.8, 0.1, 0.1]);
    }

    #[test]
    fn invalid_settings() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("c.conf");
        for body in ["k = 0\n", "bogus = 1\n", "theta = 2\n", "no equals sign\n", "forge_split = 0.5,0.5,0.5\n"] {
            fs::write(&p, body).unwrap();
            assert!(matches!(PipelineConfig::load(&p), Err(Error::Config(_))), "{body}");
        }
    }
}
