use crate::config::{FallbackPolicy, Mode, PipelineConfig};
use crate::error::{Error, Result};
use crate::retrieval::{link, retrieve, score_and_cut, temporal_prune};
use crate::store::{CorpusIndex, Evidence};
use crate::strategy::{Registries, Strategies};
use crate::tempex::TempexParser;
use crate::temporal::{TemporalConstraint, TimePoint};
use crate::text::Stopwords;
use crate::understanding::{build_tsf, generate_intermediate, resolve_implicit, FrameContext, Tsf};

use super::{extract_candidates, rank, NearMiss, QAResult, Stages};

/// Per-question overrides of the configured answering behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnswerOptions {
    pub mode: Mode,
    pub fallback: FallbackPolicy,
    pub resolver_k: usize,
}

/// The question answering pipeline over an immutable corpus index.
#[derive(Debug)]
pub struct Pipeline {
    index: CorpusIndex,
    parser: TempexParser,
    stopwords: Stopwords,
    strategies: Strategies,
    config: PipelineConfig,
}

impl Pipeline {
    pub fn new(index: CorpusIndex, config: PipelineConfig) -> Result<Self> {
        Self::with_registries(index, config, &Registries::default())
    }

    pub fn with_registries(index: CorpusIndex, config: PipelineConfig, registries: &Registries) -> Result<Self> {
        config.validate()?;
        let stopwords = config.load_stopwords()?;
        let strategies = Strategies::build(registries, &config.strategies, &stopwords)?;
        Ok(Self { index, parser: config.parser()?, stopwords, strategies, config })
    }

    /// Loads the persisted index named by the config, or ingests its corpus.
    pub fn from_config(config: PipelineConfig) -> Result<Self> {
        let index = match (&config.index, &config.corpus) {
            (Some(p), _) if p.exists() => CorpusIndex::load(p)?,
            (Some(p), None) => {
                return Err(Error::Config(format!("corpus not loaded: index {} not found", p.display())))
            }
            (_, Some(dir)) => CorpusIndex::ingest(dir)?,
            (None, None) => return Err(Error::Config("corpus not loaded: no index or corpus configured".into())),
        };
        Self::new(index, config)
    }

    pub fn index(&self) -> &CorpusIndex {
        &self.index
    }

    pub fn parser(&self) -> &TempexParser {
        &self.parser
    }

    pub fn stopwords(&self) -> &Stopwords {
        &self.stopwords
    }

    pub fn strategies(&self) -> &Strategies {
        &self.strategies
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn frame_context(&self) -> FrameContext<'_> {
        FrameContext { parser: &self.parser, entities: self.index.entities(), stopwords: &self.stopwords }
    }

    pub fn default_options(&self) -> AnswerOptions {
        AnswerOptions {
            mode: self.config.mode,
            fallback: self.config.fallback,
            resolver_k: self.config.resolver_k,
        }
    }

    pub fn understand(&self, question: &str, reference_time: TimePoint) -> Result<Tsf> {
        build_tsf(question, reference_time, self.strategies.extractor.as_ref(), &self.frame_context())
    }

    pub fn answer(&self, question: &str, reference_time: TimePoint) -> Result<QAResult> {
        self.answer_with(question, reference_time, self.default_options())
    }

    pub fn answer_with(&self, question: &str, reference_time: TimePoint, opts: AnswerOptions) -> Result<QAResult> {
        let result = self.run(question, reference_time, opts.mode, opts.resolver_k, 0)?;
        if !(result.refused && opts.mode == Mode::Faith && opts.fallback == FallbackPolicy::OnRefusal) {
            return Ok(result);
        }
        let mut alt = self.run(question, reference_time, Mode::Unfaith, opts.resolver_k, 0)?;
        alt.fallback_used = true;
        alt.warnings.push("FAITH refused; answer produced without temporal pruning".into());
        if alt.near_miss.is_none() {
            alt.near_miss = result.near_miss;
        }
        Ok(alt)
    }

    fn run(&self, question: &str, reference_time: TimePoint, mode: Mode, resolver_k: usize, depth: usize) -> Result<QAResult> {
        let ctx = self.frame_context();
        let mut tsf = self.understand(question, reference_time)?;
        let mut warnings = Vec::new();
        if tsf.entity_phrases.is_empty() {
            warnings.push("no question entity recognized".to_string());
        }

        let mut trace = Vec::new();
        let mut unresolved = None;
        if tsf.is_implicit() {
            if depth >= 1 {
                return Err(Error::RecursionDepth(question.to_string()));
            }
            match generate_intermediate(question, &tsf, self.strategies.generator.as_ref(), &ctx) {
                Ok(iqs) => {
                    let ask = |iq: &crate::understanding::IntermediateQuestion| {
                        self.run(&iq.text, reference_time, mode, 1, depth + 1)
                    };
                    let (steps, resolved) = resolve_implicit(&tsf, &iqs, &ask, resolver_k);
                    trace = steps;
                    match resolved {
                        Ok(t) => tsf = t,
                        Err(e @ Error::RecursionDepth(_)) => return Err(e),
                        Err(e) => unresolved = Some(e.to_string()),
                    }
                }
                Err(e) => unresolved = Some(e.to_string()),
            }
        }
        if let Some(reason) = &unresolved {
            warnings.push(reason.clone());
        }

        let linked = link(&tsf, self.index.entities());
        let retrieved = retrieve(&self.index, &linked, &self.parser, &tsf);
        let pruned = match mode {
            Mode::Faith if unresolved.is_some() => Vec::new(),
            Mode::Faith => temporal_prune(&retrieved, &tsf),
            Mode::Unfaith => retrieved.clone(),
        };
        let cut: Vec<Evidence> = score_and_cut(pruned.clone(), &tsf.query(), self.config.k, self.strategies.scorer.as_ref())?
            .into_iter()
            .map(|s| s.evidence)
            .collect();
        let candidates = extract_candidates(&cut, &tsf, &linked, self.index.entities());
        let answers = rank(candidates, &tsf, &cut, &self.config.weights, &self.stopwords);
        let refused = match mode {
            Mode::Faith => answers.is_empty(),
            Mode::Unfaith => retrieved.is_empty(),
        };
        let near_miss = if refused { nearest_miss(&retrieved, &tsf.constraints()) } else { None };

        Ok(QAResult {
            question: question.to_string(),
            answers: if refused { Vec::new() } else { answers },
            refused,
            mode,
            fallback_used: false,
            warnings,
            trace,
            stages: Stages {
                linked,
                retrieved: retrieved.iter().map(|e| e.id).collect(),
                pruned: pruned.iter().map(|e| e.id).collect(),
                cut: cut.iter().map(|e| e.id).collect(),
            },
            evidence: cut,
            near_miss,
            tsf,
        })
    }
}

/// Day distance between a value and a constraint value; 0 when they meet.
fn gap_days(a: &crate::temporal::TemporalValue, b: &crate::temporal::TemporalValue) -> i64 {
    let (x, y) = (a.expand(), b.expand());
    if x.end_day < y.start_day {
        (y.start_day - x.end_day) as i64
    } else if y.end_day < x.start_day {
        (x.start_day - y.end_day) as i64
    } else {
        0
    }
}

fn nearest_miss(retrieved: &[Evidence], constraints: &[TemporalConstraint]) -> Option<NearMiss> {
    let c = constraints.first()?;
    retrieved
        .iter()
        .flat_map(|e| e.temporal_mentions.iter().map(move |m| (e, m)))
        .min_by_key(|(e, m)| (gap_days(&m.value, &c.value()), e.id))
        .map(|(e, m)| NearMiss {
            evidence: e.id,
            text: e.text.clone(),
            mention: m.clone(),
            distance_days: gap_days(&m.value, &c.value()),
        })
}
