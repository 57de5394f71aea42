mod common;

use common::{faith, fixtures, pipeline, reference, unfaith};
use tempqa::eval::{self, load_benchmark, presence_trace, run_benchmark, GoldAnswer};
use tempqa::store::{EntityId, EvidenceId};
use tempqa::verify::{verify_batch, Verifier};

fn verifier(p: &tempqa::answering::Pipeline) -> Verifier<'_> {
    Verifier::new(p.index().entities(), p.parser(), p.stopwords(), p.config().load_synonyms().unwrap(), 0.3)
}

const LAUTNER: &str = "What movies starring Taylor Lautner in 2011?";

#[test]
fn lautner_faith_answer_is_faithful() {
    let p = pipeline();
    let r = p.answer_with(LAUTNER, reference(), faith()).unwrap();
    let report = verifier(&p).verify(&r, 1).unwrap();
    assert!(report.answer_present && report.entities_present && report.predicate_present && report.temporal_satisfied);
    assert!(report.faithful);
}

#[test]
fn kb_only_abduction_fails_the_temporal_criterion() {
    let p = pipeline();
    let r = p.answer_with(LAUTNER, reference(), unfaith()).unwrap();
    let snippet = p.index().get(EvidenceId(9)).unwrap().with_mentions(p.parser(), reference());
    assert_eq!(snippet.text, "Abduction, cast member, Taylor Lautner");
    let gold = GoldAnswer::new(vec!["Abduction".into()], Some(EntityId::new("abduction"))).unwrap();
    let report = verifier(&p).check(&r, &gold, &[&snippet]);
    assert!(report.answer_present);
    assert!(report.entities_present);
    assert!(!report.temporal_satisfied);
    assert!(!report.faithful);
}

#[test]
fn verify_rejects_out_of_range_rank() {
    let p = pipeline();
    let r = p.answer_with(LAUTNER, reference(), faith()).unwrap();
    assert!(verifier(&p).verify(&r, 0).is_err());
    assert!(verifier(&p).verify(&r, r.answers.len() + 1).is_err());
}

#[test]
fn benchmark_runs_in_both_modes() {
    let p = pipeline();
    let items = load_benchmark(&fixtures().join("benchmark.jsonl"), None).unwrap();
    let (f, errors) = run_benchmark(&p, &items, faith());
    assert!(errors.is_empty());
    let (u, _) = run_benchmark(&p, &items, unfaith());
    let mf = eval::metrics(&f).unwrap();
    let mu = eval::metrics(&u).unwrap();
    assert!(mf.as_f64()[0] > 0.5, "{mf}");
    assert!(mu.n == mf.n);
    let oracle = eval::oracle_fallback_p_at_1(&f, &u).unwrap();
    assert!(oracle >= mf.p_at_1 && oracle >= mu.p_at_1);
    let trace = presence_trace(&f);
    assert_eq!(trace.n, items.len());
    let results: Vec<_> = f.iter().map(|r| r.result.clone()).collect();
    let batch = verify_batch(&verifier(&p), &results).unwrap();
    assert_eq!(batch.temporally_unfaithful, 0.0);
}

#[test]
fn corrupted_questions_are_unsatisfiable() {
    let p = pipeline();
    let items = load_benchmark(&fixtures().join("benchmark.jsonl"), None).unwrap();
    let (corrupted, warnings) = eval::corrupt_questions(&p, &items, 5);
    assert_eq!(corrupted.len() + warnings.len(), items.len());
    assert!(warnings.iter().any(|w| w.starts_with("q-raab:")));
    for c in &corrupted {
        assert!(eval::unsatisfiable(&p, &c.item.question, c.item.reference_time));
        assert_ne!(c.item.question, c.original_question);
    }
    let (again, _) = eval::corrupt_questions(&p, &items, 5);
    assert_eq!(again.iter().map(|c| &c.item.question).collect::<Vec<_>>(), corrupted.iter().map(|c| &c.item.question).collect::<Vec<_>>());
}

#[test]
fn distant_supervision_annotation() {
    let p = pipeline();
    let gold = GoldAnswer::new(vec!["EMI".into()], Some(EntityId::new("emi"))).unwrap();
    let a = eval::distant_supervision_annotate("Record company of Queen in 1975?", &gold, p.index(), p.parser(), reference(), None, None);
    assert!(a.entity_phrases.contains(&"Queen".to_string()), "{}", a.serialize());
}
