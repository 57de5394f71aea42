//! Pluggable pipeline strategies and the name-keyed registry that builds
//! them from configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::forge::{HttpRephraser, PassthroughRephraser};
use crate::retrieval::{HttpScorer, LexicalScorer};
use crate::store::Evidence;
use crate::text::Stopwords;
use crate::understanding::{
    FrameContext, FrameSlots, HttpExtractor, HttpGenerator, RuleExtractor, RuleGenerator, Tsf,
};

/// Produces the five frame slots for a question.
pub trait FrameExtractor: Send + Sync {
    fn name(&self) -> &str;
    fn extract(&self, question: &str, ctx: &FrameContext<'_>) -> Result<FrameSlots>;
}

/// Produces an intermediate question in the `text||kind` format.
pub trait IntermediateGenerator: Send + Sync {
    fn name(&self) -> &str;
    fn generate(&self, question: &str, tsf: &Tsf, ctx: &FrameContext<'_>) -> Result<String>;
}

/// Scores a snippet against a query, in `[0, 1]`.
pub trait EvidenceScorer: Send + Sync {
    fn name(&self) -> &str;
    fn score(&self, query: &str, evidence: &Evidence) -> Result<f64>;
}

/// Turns a pseudo-question into a natural one.
pub trait Rephraser: Send + Sync {
    fn name(&self) -> &str;
    fn rephrase(&self, pseudo: &str) -> Result<String>;
    /// Whether successful output counts as a natural formulation.
    fn is_natural(&self) -> bool;
}

/// Which strategy to build and, for remote variants, where to reach it.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpec {
    pub name: String,
    pub endpoint: Option<String>,
    pub timeout: Duration,
}

impl StrategySpec {
    pub fn named(name: &str) -> Self {
        Self { name: name.to_string(), endpoint: None, timeout: Duration::from_secs(10) }
    }

    pub fn require_endpoint(&self, kind: &str) -> Result<&str> {
        self.endpoint.as_deref().ok_or_else(|| {
            Error::Config(format!("{kind} strategy `{}` requires an endpoint", self.name))
        })
    }
}

pub type Factory<T> = fn(&StrategySpec, &Stopwords) -> Result<Box<T>>;

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    factories: BTreeMap<String, Factory<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self { kind, factories: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &str, factory: Factory<T>) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn create(&self, spec: &StrategySpec, stopwords: &Stopwords) -> Result<Box<T>> {
        let factory = self.factories.get(&spec.name).ok_or_else(|| Error::UnknownStrategy {
            kind: self.kind,
            name: spec.name.clone(),
        })?;
        factory(spec, stopwords)
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry").field("kind", &self.kind).field("names", &self.names()).finish()
    }
}

#[derive(Debug)]
pub struct Registries {
    pub extractors: Registry<dyn FrameExtractor>,
    pub generators: Registry<dyn IntermediateGenerator>,
    pub scorers: Registry<dyn EvidenceScorer>,
    pub rephrasers: Registry<dyn Rephraser>,
}

impl Default for Registries {
    fn default() -> Self {
        let mut extractors: Registry<dyn FrameExtractor> = Registry::new("frame extractor");
        extractors.register("rule", |_, _| Ok(Box::new(RuleExtractor)));
        extractors.register("http", |s, _| {
            Ok(Box::new(HttpExtractor::new(s.require_endpoint("extractor")?, s.timeout)))
        });

        let mut generators: Registry<dyn IntermediateGenerator> = Registry::new("intermediate generator");
        generators.register("rule", |_, _| Ok(Box::new(RuleGenerator)));
        generators.register("http", |s, _| {
            Ok(Box::new(HttpGenerator::new(s.require_endpoint("generator")?, s.timeout)))
        });

        let mut scorers: Registry<dyn EvidenceScorer> = Registry::new("evidence scorer");
        scorers.register("lexical", |_, sw| Ok(Box::new(LexicalScorer::new(sw.clone()))));
        scorers.register("http", |s, _| {
            Ok(Box::new(HttpScorer::new(s.require_endpoint("scorer")?, s.timeout)))
        });

        let mut rephrasers: Registry<dyn Rephraser> = Registry::new("rephraser");
        rephrasers.register("passthrough", |_, _| Ok(Box::new(PassthroughRephraser)));
        rephrasers.register("http", |s, _| {
            Ok(Box::new(HttpRephraser::new(s.require_endpoint("rephraser")?, s.timeout)))
        });

        Self { extractors, generators, scorers, rephrasers }
    }
}

/// One instance of every strategy kind, as selected by configuration.
pub struct Strategies {
    pub extractor: Box<dyn FrameExtractor>,
    pub generator: Box<dyn IntermediateGenerator>,
    pub scorer: Box<dyn EvidenceScorer>,
    pub rephraser: Box<dyn Rephraser>,
}

impl Strategies {
    pub fn build(
        registries: &Registries,
        specs: &StrategySpecs,
        stopwords: &Stopwords,
    ) -> Result<Self> {
        Ok(Self {
            extractor: registries.extractors.create(&specs.extractor, stopwords)?,
            generator: registries.generators.create(&specs.generator, stopwords)?,
            scorer: registries.scorers.create(&specs.scorer, stopwords)?,
            rephraser: registries.rephrasers.create(&specs.rephraser, stopwords)?,
        })
    }

    pub fn baseline(stopwords: &Stopwords) -> Self {
        Self::build(&Registries::default(), &StrategySpecs::default(), stopwords)
            .expect("built-in strategies are always registered")
    }
}

impl fmt::Debug for Strategies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Strategies")
            .field("extractor", &self.extractor.name())
            .field("generator", &self.generator.name())
            .field("scorer", &self.scorer.name())
            .field("rephraser", &self.rephraser.name())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpecs {
    pub extractor: StrategySpec,
    pub generator: StrategySpec,
    pub scorer: StrategySpec,
    pub rephraser: StrategySpec,
}

impl Default for StrategySpecs {
    fn default() -> Self {
        Self {
            extractor: StrategySpec::named("rule"),
            generator: StrategySpec::named("rule"),
            scorer: StrategySpec::named("lexical"),
            rephraser: StrategySpec::named("passthrough"),
        }
    }
}
