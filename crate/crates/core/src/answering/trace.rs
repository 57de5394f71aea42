use std::fmt::Write;

use crate::store::Evidence;
use crate::temporal::{satisfies, TemporalConstraint};

use super::QAResult;

/// Human-readable derivation of a result. Temporal mentions that satisfy
/// the frame's constraint are wrapped in `[[ ]]`.
pub fn render_trace(result: &QAResult) -> String {
    let mut out = String::new();
    render(result, 0, &mut out);
    out
}

fn render(r: &QAResult, depth: usize, out: &mut String) {
    let pad = "    ".repeat(depth);
    let constraints = r.tsf.constraints();
    let _ = writeln!(out, "{pad}Question: {}", r.question);
    let _ = writeln!(out, "{pad}Mode: {}{}", r.mode, if r.fallback_used { " (fallback)" } else { "" });
    let _ = writeln!(out, "{pad}Frame: {}", r.tsf);
    if !r.tsf.temporal_values.is_empty() {
        let vals: Vec<String> = r.tsf.temporal_values.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{pad}Temporal value: {}", vals.join(" | "));
    }
    let _ = writeln!(out, "{pad}Reference time: {}", r.tsf.reference_time);
    for w in &r.warnings {
        let _ = writeln!(out, "{pad}Warning: {w}");
    }

    if depth == 0 {
        if r.trace.is_empty() {
            let _ = writeln!(out, "{pad}Intermediate questions: none");
        } else {
            let _ = writeln!(out, "{pad}Intermediate questions:");
            for (i, step) in r.trace.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{pad}  ({}) {} [{}]",
                    i + 1,
                    step.question.text,
                    format!("{:?}", step.question.role).to_uppercase()
                );
                render(&step.result, depth + 1, out);
            }
        }
    }

    if r.refused {
        let _ = writeln!(out, "{pad}Refused: no evidence satisfies the temporal constraint");
        if constraints.is_empty() {
            let _ = writeln!(out, "{pad}  constraint: unresolved");
        }
        for c in &constraints {
            let _ = writeln!(out, "{pad}  violated constraint: {c}");
        }
        if let Some(m) = &r.near_miss {
            let _ = writeln!(
                out,
                "{pad}  nearest non-matching evidence ({} days away): {} <{}>",
                m.distance_days, m.text, m.mention.surface
            );
        }
        return;
    }
    if r.answers.is_empty() {
        let _ = writeln!(out, "{pad}Answers: none");
        return;
    }
    let _ = writeln!(out, "{pad}Answers:");
    for (i, a) in r.answers.iter().enumerate().take(5) {
        let _ = writeln!(out, "{pad}  {}. {} (score {:.3})", i + 1, a.label(), a.score);
        for id in &a.supporting_evidence {
            if let Some(e) = r.evidence_by_id(*id) {
                let _ = writeln!(out, "{pad}     - [{}] {} {}", e.source, e.id, highlight(e, &constraints));
            }
        }
    }
}

fn highlight(e: &Evidence, constraints: &[TemporalConstraint]) -> String {
    let mut out = String::new();
    let mut pos = 0;
    for m in &e.temporal_mentions {
        if constraints.is_empty() || constraints.iter().any(|c| satisfies(&m.value, c)) {
            out.push_str(&e.text[pos..m.span.start]);
            out.push_str("[[");
            out.push_str(m.span.slice(&e.text));
            out.push_str("]]");
            pos = m.span.end;
        }
    }
    out.push_str(&e.text[pos..]);
    out
}
