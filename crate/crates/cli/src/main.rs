use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::json;

use tempqa::answering::{render_trace, Pipeline};
use tempqa::answering::AnswerOptions;
use tempqa::config::{Mode, PipelineConfig};
use tempqa::eval::{self, load_benchmark, presence_trace, run_benchmark, EvalItem};
use tempqa::forge;
use tempqa::store::CorpusIndex;
use tempqa::temporal::TimePoint;
use tempqa::verify::{verify_batch, Verifier};
use tempqa::{Error, Result};

const EXIT_ERROR: u8 = 1;
const EXIT_REFUSED: u8 = 3;

#[derive(Parser)]
#[command(name = "tempqa", version, about = "Faithful temporal question answering over local corpora")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Corpus directory with the five JSONL source files.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Persisted index written by `ingest`.
    #[arg(long, global = true)]
    index: Option<PathBuf>,
    /// Line-oriented `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// faith or unfaith.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// never or on-refusal.
    #[arg(long, global = true)]
    fallback: Option<String>,
    /// Evidence cutoff after scoring.
    #[arg(long, global = true)]
    top_k: Option<usize>,
    /// Intermediate answers kept when resolving implicit constraints.
    #[arg(long, global = true)]
    resolver_k: Option<usize>,
    /// Reference time as YYYY-MM-DD.
    #[arg(long, global = true)]
    reference_time: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Render a human-readable trace instead of JSON.
    #[arg(long, global = true)]
    trace: bool,
    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Any config setting, e.g. `scorer=http` or `scorer_endpoint=URL`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    settings: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus and persist its index.
    Ingest,
    /// Answer one question.
    Ask { question: String },
    /// Run a benchmark and report P@1, MRR, Hit@5 and the presence trace.
    Eval {
        benchmark: PathBuf,
        /// Also run the other mode and report the oracle fallback P@1.
        #[arg(long)]
        compare: bool,
    },
    /// Generate an implicit temporal benchmark from the corpus.
    Forge,
    /// Rewrite explicit questions with corpus-unsatisfiable dates.
    Corrupt { benchmark: PathBuf },
    /// Check the faithfulness of answers to a question or a benchmark.
    Verify {
        /// A question, or a benchmark file with --benchmark.
        input: String,
        #[arg(long)]
        benchmark: bool,
        /// 1-based rank of the answer to check.
        #[arg(long, default_value_t = 1)]
        rank: usize,
    },
}

impl Global {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        let here = Path::new(".");
        let mut set = |key: &str, value: Option<String>| -> Result<()> {
            match value {
                Some(v) => cfg.set(key, &v, here),
                None => Ok(()),
            }
        };
        set("corpus", self.corpus.as_ref().map(|p| p.display().to_string()))?;
        set("index", self.index.as_ref().map(|p| p.display().to_string()))?;
        set("mode", self.mode.clone())?;
        set("fallback", self.fallback.clone())?;
        set("k", self.top_k.map(|v| v.to_string()))?;
        set("resolver_k", self.resolver_k.map(|v| v.to_string()))?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        for kv in &self.settings {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim(), here)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn reference_time(&self) -> Result<Option<TimePoint>> {
        self.reference_time.as_deref().map(str::parse).transpose()
    }

    fn require_reference_time(&self) -> Result<TimePoint> {
        self.reference_time()?
            .ok_or_else(|| Error::Argument("--reference-time YYYY-MM-DD is required".into()))
    }
}

fn write_output(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => {
            fs::write(p, body)?;
            log::info!("wrote {}", p.display());
        }
        None => println!("{body}"),
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn ingest(g: &Global) -> Result<u8> {
    let cfg = g.config()?;
    let dir = cfg.corpus.clone().ok_or_else(|| Error::Argument("--corpus is required".into()))?;
    let index = CorpusIndex::ingest(&dir)?;
    if index.evidence().is_empty() {
        log::warn!("corpus {} produced no evidence", dir.display());
    }
    let out = g.out.clone().or(cfg.index.clone()).unwrap_or_else(|| PathBuf::from("index.json"));
    index.save(&out)?;
    println!("{} entities, {} evidence snippets -> {}", index.entities().len(), index.evidence().len(), out.display());
    Ok(0)
}

fn ask(g: &Global, question: &str) -> Result<u8> {
    let pipeline = Pipeline::from_config(g.config()?)?;
    let result = pipeline.answer_with(question, g.require_reference_time()?, pipeline.default_options())?;
    let body = if g.trace { render_trace(&result) } else { to_json(&result)? };
    write_output(g.out.as_deref(), &body)?;
    Ok(if result.refused { EXIT_REFUSED } else { 0 })
}

fn benchmark(g: &Global, path: &Path) -> Result<Vec<EvalItem>> {
    load_benchmark(path, g.reference_time()?)
}

fn run_eval(g: &Global, path: &Path, compare: bool) -> Result<u8> {
    let pipeline = Pipeline::from_config(g.config()?)?;
    let items = benchmark(g, path)?;
    let opts = pipeline.default_options();
    let (records, errors) = run_benchmark(&pipeline, &items, opts);
    for e in &errors {
        log::error!("{e}");
    }
    let metrics = eval::metrics(&records)?;
    let presence = presence_trace(&records);
    let mut report = json!({
        "mode": opts.mode.to_string(),
        "metrics": metrics,
        "presence": presence,
        "errors": errors,
        "records": records.iter().map(|r| json!({
            "id": r.id,
            "refused": r.result.refused,
            "rank": eval::first_match_rank(&r.result, &r.gold),
            "answer": r.result.top().map(|a| a.label()),
            "stages": r.stages,
        })).collect::<Vec<_>>(),
    });
    let mut text = format!("mode {}\n{metrics}\n\n{presence}\n\n{}", opts.mode, eval::records_table(&records));
    if compare {
        let other = AnswerOptions {
            mode: match opts.mode {
                Mode::Faith => Mode::Unfaith,
                Mode::Unfaith => Mode::Faith,
            },
            ..opts
        };
        let (alt, _) = run_benchmark(&pipeline, &items, other);
        let (faith, unfaith) = match opts.mode {
            Mode::Faith => (&records, &alt),
            Mode::Unfaith => (&alt, &records),
        };
        let oracle = eval::oracle_fallback_p_at_1(faith, unfaith)?;
        let alt_metrics = eval::metrics(&alt)?;
        let v = oracle.to_f64().unwrap_or(f64::NAN);
        text.push_str(&format!("\nmode {}\n{alt_metrics}\n\noracle fallback P@1 {v:.4}\n", other.mode));
        report["compare"] = json!({ "mode": other.mode.to_string(), "metrics": alt_metrics, "oracle_fallback_p_at_1": v });
    }
    match &g.out {
        Some(p) => {
            fs::write(p, to_json(&report)?)?;
            print!("{text}");
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn run_forge(g: &Global) -> Result<u8> {
    let cfg = g.config()?;
    let pipeline = Pipeline::from_config(cfg.clone())?;
    let mut forge_cfg = cfg.forge.clone();
    if let Some(t) = g.reference_time()? {
        forge_cfg.reference_time = t;
    }
    let items = forge::generate(pipeline.index(), pipeline.parser(), pipeline.stopwords(), pipeline.strategies().rephraser.as_ref(), &forge_cfg, cfg.sigma, cfg.seed)?;
    let mut invalid = 0;
    for item in &items {
        let failures = forge::revalidate(item, pipeline.index(), pipeline.parser());
        if !failures.is_empty() {
            invalid += 1;
            log::error!("{}: {}", item.id, failures.join("; "));
        }
    }
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("forge-out"));
    let emitted = forge::emit(&items, pipeline.index(), forge_cfg.split, cfg.seed, &out)?;
    let [train, dev, test] = emitted.sizes;
    println!("{} items ({invalid} invalid): train {train}, dev {dev}, test {test} -> {}", items.len(), out.display());
    Ok(if invalid == 0 { 0 } else { EXIT_ERROR })
}

fn run_corrupt(g: &Global, path: &Path) -> Result<u8> {
    let cfg = g.config()?;
    let pipeline = Pipeline::from_config(cfg.clone())?;
    let items = benchmark(g, path)?;
    let (corrupted, warnings) = eval::corrupt_questions(&pipeline, &items, cfg.seed);
    for w in &warnings {
        log::warn!("{w}");
    }
    let mut body = String::new();
    for c in &corrupted {
        body.push_str(&serde_json::to_string(c)?);
        body.push('\n');
    }
    match &g.out {
        Some(p) => {
            fs::write(p, &body)?;
            println!("{} corrupted, {} skipped -> {}", corrupted.len(), warnings.len(), p.display());
        }
        None => print!("{body}"),
    }
    Ok(0)
}

fn run_verify(g: &Global, input: &str, is_benchmark: bool, rank: usize) -> Result<u8> {
    let cfg = g.config()?;
    let pipeline = Pipeline::from_config(cfg.clone())?;
    let synonyms = cfg.load_synonyms()?;
    let verifier = Verifier::new(pipeline.index().entities(), pipeline.parser(), pipeline.stopwords(), synonyms, cfg.theta);
    let opts = pipeline.default_options();
    let body = if is_benchmark {
        let items = benchmark(g, Path::new(input))?;
        let mut results = Vec::with_capacity(items.len());
        for item in &items {
            results.push(pipeline.answer_with(&item.question, item.reference_time, opts)?);
        }
        to_json(&verify_batch(&verifier, &results)?)?
    } else {
        let result = pipeline.answer_with(input, g.require_reference_time()?, opts)?;
        if result.refused {
            write_output(g.out.as_deref(), &to_json(&json!({ "refused": true }))?)?;
            return Ok(EXIT_REFUSED);
        }
        to_json(&verifier.verify(&result, rank)?)?
    };
    write_output(g.out.as_deref(), &body)?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.command {
        Command::Ingest => ingest(g),
        Command::Ask { question } => ask(g, question),
        Command::Eval { benchmark, compare } => run_eval(g, benchmark, *compare),
        Command::Forge => run_forge(g),
        Command::Corrupt { benchmark } => run_corrupt(g, benchmark),
        Command::Verify { input, benchmark, rank } => run_verify(g, input, *benchmark, *rank),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
