#![allow(dead_code)]

use std::path::{Path, PathBuf};

use tempqa::answering::{AnswerOptions, Pipeline};
use tempqa::config::{FallbackPolicy, Mode, PipelineConfig};
use tempqa::temporal::TimePoint;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn pipeline() -> Pipeline {
    let config = PipelineConfig { corpus: Some(fixtures().join("corpus")), ..PipelineConfig::default() };
    Pipeline::from_config(config).expect("fixture corpus loads")
}

pub fn reference() -> TimePoint {
    TimePoint::day(2023, 1, 1).unwrap()
}

pub fn opts(mode: Mode, fallback: FallbackPolicy) -> AnswerOptions {
    AnswerOptions { mode, fallback, resolver_k: 1 }
}

pub fn faith() -> AnswerOptions {
    opts(Mode::Faith, FallbackPolicy::Never)
}

pub fn unfaith() -> AnswerOptions {
    opts(Mode::Unfaith, FallbackPolicy::Never)
}
