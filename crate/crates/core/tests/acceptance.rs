use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use chrono::NaiveDate;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tempqa::answering::{AnswerOptions, Pipeline};
use tempqa::config::{FallbackPolicy, Mode, PipelineConfig};
use tempqa::eval::{self, corrupt_questions, load_benchmark, metrics_from_ranks, presence_trace, run_benchmark, EvalItem};
use tempqa::forge::{self, ForgeConfig, PassthroughRephraser};
use tempqa::retrieval::temporal_prune;
use tempqa::store::{Evidence, EvidenceId, Provenance, SourceKind};
use tempqa::tempex::{Span, TemporalMention};
use tempqa::temporal::{intersect, satisfies, TemporalConstraint, TemporalSignal, TemporalValue, TimePoint};
use tempqa::understanding::{Category, FrameSlots, Tsf};
use tempqa::verify::Verifier;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn pipeline() -> Pipeline {
    let config = PipelineConfig { corpus: Some(fixtures().join("corpus")), ..PipelineConfig::default() };
    Pipeline::from_config(config).expect("fixture corpus loads")
}

fn benchmark() -> Vec<EvalItem> {
    load_benchmark(&fixtures().join("benchmark.jsonl"), None).expect("fixture benchmark loads")
}

fn reference() -> TimePoint {
    TimePoint::day(2023, 1, 1).unwrap()
}

fn opts(mode: Mode, fallback: FallbackPolicy) -> AnswerOptions {
    AnswerOptions { mode, fallback, resolver_k: 1 }
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// Independent day-set oracle over chrono dates.

fn granule(p: &TimePoint) -> (NaiveDate, NaiveDate) {
    let y = p.year_value();
    match (p.month_value(), p.day_value()) {
        (Some(m), Some(d)) => {
            let x = NaiveDate::from_ymd_opt(y, m, d).unwrap();
            (x, x)
        }
        (Some(m), None) => {
            let first = NaiveDate::from_ymd_opt(y, m, 1).unwrap();
            let next = if m == 12 { NaiveDate::from_ymd_opt(y + 1, 1, 1) } else { NaiveDate::from_ymd_opt(y, m + 1, 1) };
            (first, next.unwrap().pred_opt().unwrap())
        }
        _ => (NaiveDate::from_ymd_opt(y, 1, 1).unwrap(), NaiveDate::from_ymd_opt(y, 12, 31).unwrap()),
    }
}

fn days(v: &TemporalValue) -> BTreeSet<NaiveDate> {
    let (start, _) = granule(&v.begin());
    let (_, end) = granule(&v.end());
    start.iter_days().take_while(|d| *d <= end).collect()
}

fn oracle_satisfies(e: &TemporalValue, signal: TemporalSignal, c: &TemporalValue) -> bool {
    let ed = days(e);
    match signal {
        TemporalSignal::Overlap => !ed.is_disjoint(&days(c)),
        TemporalSignal::After => ed.iter().all(|d| *d >= granule(&c.end()).0),
        TemporalSignal::Before => ed.iter().all(|d| *d <= granule(&c.begin()).1),
        TemporalSignal::None => true,
    }
}

fn value_pool() -> Vec<TemporalValue> {
    let mut points = Vec::new();
    for y in 1990..=1995 {
        points.push(TimePoint::year(y).unwrap());
        for m in 1..=12 {
            points.push(TimePoint::month(y, m).unwrap());
            for d in [1, 14, 28] {
                points.push(TimePoint::day(y, m, d).unwrap());
            }
        }
    }
    let mut out: Vec<TemporalValue> = points.iter().copied().map(TemporalValue::Point).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    while out.len() < 1200 {
        let a = points[rng.gen_range(0..points.len())];
        let b = points[rng.gen_range(0..points.len())];
        if let Ok(v) = TemporalValue::interval(a, b) {
            out.push(v);
        }
    }
    out
}

fn c1_algebra() -> Outcome {
    let started = Instant::now();
    let pool = value_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pairs = 12_000;
    for _ in 0..pairs {
        let a = pool[rng.gen_range(0..pool.len())];
        let b = pool[rng.gen_range(0..pool.len())];
        let common: BTreeSet<NaiveDate> = days(&a).intersection(&days(&b)).copied().collect();
        let got = intersect(&a, &b).map(|i| (i.start_date(), i.end_date()));
        let want = common.first().map(|f| (*f, *common.last().unwrap()));
        check(got == want, format!("intersect({a}, {b}) = {got:?}, oracle {want:?}"))?;
        for signal in [TemporalSignal::Overlap, TemporalSignal::Before, TemporalSignal::After] {
            let c = TemporalConstraint::new(signal, b).unwrap();
            let want = oracle_satisfies(&a, signal, &b);
            check(satisfies(&a, &c) == want, format!("satisfies({a}, {c}) disagrees with oracle {want}"))?;
        }
    }
    let secs = started.elapsed().as_secs_f64();
    check(secs < 60.0, format!("took {secs:.1}s"))?;
    Ok(format!("{pairs} pairs x 3 signals agree, {secs:.1}s"))
}

const VERBALIZED: [(u32, &str); 5] = [
    (6, "Man Booker Prize, winner, Thomas Keneally, point in time, 1982, for work, Schindler's Ark"),
    (35, "Thomas Keneally, Awards is Booker Prize, is Schindler's Ark, winner 1982"),
    (28, "Antoine Raab, Managerial career, 1949–1950, Stade Lavallois"),
    (45, "Antoine Raab, After the liberation of Nantes in 1944 Raab joined FC Nantes and played for the club until 1949."),
    (38, "Taylor Lautner, Year is 2011, Title is Abduction, Role is Nathan Harper"),
];

fn c2_verbalization(p: &Pipeline) -> Outcome {
    for (id, want) in VERBALIZED {
        let e = p.index().get(EvidenceId(id)).ok_or(format!("ev{id:05} missing"))?;
        check(e.text == want, format!("ev{id:05}: `{}` != `{want}`", e.text))?;
    }
    Ok("5/5 strings exact".into())
}

fn random_slots(rng: &mut ChaCha8Rng) -> FrameSlots {
    const WORDS: [&str; 10] = ["Queen", "record", "company", "of", "in", "1975", "Nantes", "club", "award", "Keneally"];
    let phrase = |rng: &mut ChaCha8Rng, max: usize| {
        let n = rng.gen_range(1..max);
        (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect::<Vec<_>>().join(" ")
    };
    let signal = [TemporalSignal::Overlap, TemporalSignal::Before, TemporalSignal::After, TemporalSignal::None][rng.gen_range(0..4)];
    let category = if signal != TemporalSignal::None && rng.gen_bool(0.5) { Category::Implicit } else { Category::NonImplicit };
    FrameSlots {
        entity_phrases: (0..rng.gen_range(0..3)).map(|_| phrase(rng, 3)).collect(),
        relation_phrase: phrase(rng, 6),
        expected_answer_type: phrase(rng, 3),
        signal,
        category,
    }
}

fn c3_tsf(p: &Pipeline) -> Outcome {
    let tsf = p.understand("Record company of Queen in 1975?", reference()).map_err(|e| e.to_string())?;
    let want = "Queen||Record company of in 1975||record company||overlap||non-implicit";
    check(tsf.to_string() == want, format!("got `{tsf}`"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let slots = random_slots(&mut rng);
        let s = slots.serialize();
        let back = FrameSlots::parse(&s).map_err(|e| format!("`{s}`: {e}"))?;
        check(back == slots && back.serialize() == s, format!("round trip changed `{s}`"))?;
    }
    Ok("q1 exact, 100/100 frames round-trip".into())
}

fn c4_recursive(p: &Pipeline) -> Outcome {
    let faith = opts(Mode::Faith, FallbackPolicy::Never);
    let q = "After managing FC Nantes, which football club did Antoine Raab take on next?";
    let r = p.answer_with(q, reference(), faith).map_err(|e| e.to_string())?;
    let want: TemporalValue = "1946/1949".parse().unwrap();
    check(r.tsf.temporal_values.contains(&want), format!("Raab resolved to {:?}", r.tsf.temporal_values))?;
    let top = r.top().ok_or("Raab refused")?;
    check(top.label() == "Stade Lavallois", format!("Raab answered `{}`", top.label()))?;
    check(top.supporting_evidence.contains(&EvidenceId(28)), "Raab support lacks the infobox snippet")?;

    let q = "What award did Thomas Keneally receive in the year 1982?";
    let r = p.answer_with(q, reference(), faith).map_err(|e| e.to_string())?;
    let top = r.top().ok_or("Keneally refused")?;
    let booker = p.index().entities().resolve_alias("Booker Prize").cloned();
    check(top.entity_id() == booker.as_ref(), format!("Keneally answered `{}`", top.label()))?;
    let n = top.supporting_evidence.len();
    check(n >= 2, format!("Keneally has {n} supporting snippets"))?;
    Ok(format!("Raab [1946, 1949] -> Stade Lavallois; Keneally -> Booker Prize with {n} snippets"))
}

fn c5_refusal(p: &Pipeline) -> Outcome {
    let explicit: Vec<EvalItem> = benchmark().into_iter().filter(|i| i.id != "q-raab").collect();
    let items: Vec<EvalItem> = (0..200)
        .map(|k| {
            let base = &explicit[k % explicit.len()];
            EvalItem { id: format!("{}-{k:03}", base.id), ..base.clone() }
        })
        .collect();
    let (corrupted, warnings) = corrupt_questions(p, &items, 2024);
    check(corrupted.len() == 200, format!("{} corrupted, warnings: {warnings:?}", corrupted.len()))?;
    let (mut refused, mut unfaith_answered, mut flagged) = (0, 0, 0);
    for c in &corrupted {
        let q = &c.item.question;
        check(eval::unsatisfiable(p, q, c.item.reference_time), format!("`{q}` is satisfiable"))?;
        let run = |o| p.answer_with(q, c.item.reference_time, o).map_err(|e| e.to_string());
        let f = run(opts(Mode::Faith, FallbackPolicy::Never))?;
        refused += usize::from(f.refused && f.answers.is_empty());
        let u = run(opts(Mode::Unfaith, FallbackPolicy::Never))?;
        unfaith_answered += usize::from(!u.answers.is_empty());
        let fb = run(opts(Mode::Faith, FallbackPolicy::OnRefusal))?;
        flagged += usize::from(fb.fallback_used && !fb.answers.is_empty());
    }
    check(refused == 200, format!("FAITH refused {refused}/200"))?;
    check(unfaith_answered >= 1, "no Un-FAITH answers")?;
    check(flagged == 200, format!("{flagged}/200 flagged fallback answers"))?;
    Ok(format!("FAITH refused 200/200, Un-FAITH answered {unfaith_answered}/200, fallback flagged 200/200"))
}

fn c6_faithfulness(p: &Pipeline) -> Outcome {
    let synonyms = p.config().load_synonyms().map_err(|e| e.to_string())?;
    let verifier = Verifier::new(p.index().entities(), p.parser(), p.stopwords(), synonyms, p.config().theta);
    let mut checked = 0;
    for item in benchmark() {
        let r = p.answer_with(&item.question, item.reference_time, opts(Mode::Faith, FallbackPolicy::Never)).map_err(|e| e.to_string())?;
        if r.answers.is_empty() || r.tsf.signal == TemporalSignal::None {
            continue;
        }
        let report = verifier.verify(&r, 1).map_err(|e| e.to_string())?;
        check(report.temporal_satisfied, format!("{}: {}", item.id, report.justifications.temporal))?;
        checked += 1;
    }
    check(checked > 0, "no constrained FAITH answers")?;
    let q = "What movies starring Taylor Lautner in 2011?";
    let u = p.answer_with(q, reference(), opts(Mode::Unfaith, FallbackPolicy::Never)).map_err(|e| e.to_string())?;
    let report = verifier.verify(&u, 1).map_err(|e| e.to_string())?;
    check(!report.temporal_satisfied, format!("Lautner Un-FAITH `{}` passed the temporal criterion", u.answers[0].label()))?;
    Ok(format!("{checked} FAITH answers satisfy, Lautner Un-FAITH `{}` fails", u.answers[0].label()))
}

fn c7_metrics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for run in 0..1000 {
        let n = rng.gen_range(1..40);
        let lists: Vec<Vec<bool>> = (0..n).map(|_| (0..rng.gen_range(0..12)).map(|_| rng.gen_bool(0.2)).collect()).collect();
        let ranks: Vec<Option<usize>> = lists.iter().map(|l| l.iter().position(|b| *b).map(|i| i + 1)).collect();
        let m = metrics_from_ranks(&ranks).map_err(|e| e.to_string())?;
        let (mut p1, mut mrr, mut hit) = (BigRational::from_integer(0.into()), BigRational::from_integer(0.into()), BigRational::from_integer(0.into()));
        for l in &lists {
            for (i, correct) in l.iter().enumerate() {
                if *correct {
                    let k = BigInt::from(i + 1);
                    if i == 0 {
                        p1 += BigRational::from_integer(1.into());
                    }
                    if i < 5 {
                        hit += BigRational::from_integer(1.into());
                    }
                    mrr += BigRational::new(1.into(), k);
                    break;
                }
            }
        }
        let total = BigRational::from_integer(BigInt::from(n));
        let want = (p1 / &total, mrr / &total, hit / &total);
        check((m.p_at_1.clone(), m.mrr.clone(), m.hit_at_5.clone()) == want, format!("run {run}: {m} vs oracle {want:?}"))?;
    }
    let m = metrics_from_ranks(&[Some(1), Some(2), None, Some(4)]).map_err(|e| e.to_string())?;
    check(m.mrr == BigRational::new(7.into(), 16.into()), format!("worked MRR {}", m.mrr))?;
    Ok("1000 runs exact, worked MRR = 7/16 = 0.4375".into())
}

fn c8_forge(p: &Pipeline) -> Outcome {
    let gen = || forge::generate(p.index(), p.parser(), p.stopwords(), &PassthroughRephraser, &ForgeConfig::default(), 0.5, 7);
    let items = gen().map_err(|e| e.to_string())?;
    check(!items.is_empty(), "no items generated")?;
    for item in &items {
        let failures = forge::revalidate(item, p.index(), p.parser());
        check(failures.is_empty(), format!("{}: {failures:?}", item.id))?;
    }
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut outputs = Vec::new();
    for d in &dirs {
        let items = gen().map_err(|e| e.to_string())?;
        let emitted = forge::emit(&items, p.index(), [0.6, 0.2, 0.2], 7, d.path()).map_err(|e| e.to_string())?;
        let n = items.len() as f64;
        for (size, ratio) in emitted.sizes.iter().zip([0.6, 0.2, 0.2]) {
            check((*size as f64 - n * ratio).abs() <= 1.0, format!("split {:?} for {n} items", emitted.sizes))?;
        }
        let bytes: Vec<Vec<u8>> = [&emitted.train, &emitted.dev, &emitted.test, &emitted.train_pairs]
            .iter()
            .map(|f| std::fs::read(f).unwrap())
            .collect();
        outputs.push((emitted.sizes, bytes));
    }
    check(outputs[0] == outputs[1], "re-run output differs")?;
    Ok(format!("{} items revalidate, split {:?}, re-run byte-identical", items.len(), outputs[0].0))
}

fn random_instance(rng: &mut ChaCha8Rng, pool: &[TemporalValue]) -> (Vec<Evidence>, Tsf) {
    let evidence = (0..rng.gen_range(0..20))
        .map(|i| Evidence {
            id: EvidenceId(i),
            text: format!("snippet {i}"),
            source: SourceKind::Text,
            entities: Vec::new(),
            temporal_mentions: (0..rng.gen_range(0..4))
                .map(|_| {
                    let value = pool[rng.gen_range(0..pool.len())];
                    TemporalMention { span: Span::new(0, 0), surface: value.to_string(), value }
                })
                .collect(),
            provenance: Provenance { source: SourceKind::Text, line: 1, item: Some(i as usize) },
            body_start: 0,
        })
        .collect();
    let signal = [TemporalSignal::Overlap, TemporalSignal::Before, TemporalSignal::After, TemporalSignal::None][rng.gen_range(0..4)];
    let tsf = Tsf {
        entity_phrases: vec!["X".into()],
        relation_phrase: "r".into(),
        expected_answer_type: if rng.gen_bool(0.3) { "date".into() } else { "entity".into() },
        signal,
        category: if signal != TemporalSignal::None && rng.gen_bool(0.3) { Category::Implicit } else { Category::NonImplicit },
        temporal_values: if signal == TemporalSignal::None { Vec::new() } else { (0..rng.gen_range(1..3)).map(|_| pool[rng.gen_range(0..pool.len())]).collect() },
        reference_time: reference(),
    };
    (evidence, tsf)
}

fn c9_pruning(p: &Pipeline) -> Outcome {
    let pool = value_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 0..1000 {
        let (evidence, tsf) = random_instance(&mut rng, &pool);
        let kept = temporal_prune(&evidence, &tsf);
        check(kept.iter().all(|k| evidence.contains(k)), format!("instance {n}: output not a subset"))?;
        for k in &kept {
            let ok = if tsf.signal != TemporalSignal::None {
                k.temporal_mentions.iter().any(|m| tsf.temporal_values.iter().any(|v| oracle_satisfies(&m.value, tsf.signal, v)))
            } else if tsf.expected_answer_type == "date" {
                !k.temporal_mentions.is_empty()
            } else {
                true
            };
            check(ok, format!("instance {n}: {} survived without a satisfying mention", k.id))?;
        }
    }
    let items = benchmark();
    for mode in [Mode::Faith, Mode::Unfaith] {
        let (records, errors) = run_benchmark(p, &items, opts(mode, FallbackPolicy::Never));
        check(errors.is_empty(), format!("{mode}: {errors:?}"))?;
        for r in &records {
            let f = r.stages.as_array();
            check(f.windows(2).all(|w| w[0] || !w[1]), format!("{mode} {}: flags {f:?}", r.id))?;
        }
        let report = presence_trace(&records);
        check(report.fractions.windows(2).all(|w| w[0] >= w[1]), format!("{mode}: fractions {:?}", report.fractions))?;
    }
    Ok("1000 instances sound and subset; presence monotone in both modes".into())
}

fn main() -> ExitCode {
    let p = pipeline();
    let criteria: Vec<Criterion<'_>> = vec![
        ("temporal algebra oracle equivalence", Box::new(c1_algebra)),
        ("bit-exact verbalization", Box::new(|| c2_verbalization(&p))),
        ("frame serialization", Box::new(|| c3_tsf(&p))),
        ("recursive resolution", Box::new(|| c4_recursive(&p))),
        ("refusal", Box::new(|| c5_refusal(&p))),
        ("faithfulness soundness", Box::new(|| c6_faithfulness(&p))),
        ("metrics correctness", Box::new(c7_metrics)),
        ("forge validity", Box::new(|| c8_forge(&p))),
        ("pruning soundness and presence monotonicity", Box::new(|| c9_pruning(&p))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
