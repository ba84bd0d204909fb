use crate::error::{Error, Result};
use crate::symbols::SymbolSeq;

use super::{evaluate, Counterexample, Subject, Tier};

fn violates(subject: &Subject, tier: Tier, cx: &Counterexample, strings: &[SymbolSeq]) -> bool {
    // a deletion that breaks a chain's precondition does not count
    evaluate(subject, tier, cx.property, strings).is_ok_and(|o| o.violated)
}

/// Greedily deletes single symbols while the violation persists.
///
/// The result is locally minimal: no single-symbol deletion from any of its
/// strings still violates the property. Fails if `cx` is not a violation
/// under `subject` and `tier`.
pub fn shrink(subject: &Subject, tier: Tier, cx: &Counterexample) -> Result<Counterexample> {
    if !violates(subject, tier, cx, &cx.strings) {
        return Err(Error::Precondition(format!(
            "shrink needs a genuine violation, {} holds on this input",
            cx.property
        )));
    }
    let mut strings = cx.strings.clone();
    'search: loop {
        for k in 0..strings.len() {
            for i in 0..strings[k].len() {
                let mut candidate = strings.clone();
                candidate[k] = strings[k].without(i);
                if violates(subject, tier, cx, &candidate) {
                    strings = candidate;
                    continue 'search;
                }
            }
        }
        break;
    }
    let outcome = evaluate(subject, tier, cx.property, &strings)?;
    Ok(Counterexample {
        property: cx.property,
        strings,
        slack: outcome.slack,
        exact_slack: outcome.exact_slack,
    })
}

/// Whether `cx` violates its property and no single deletion keeps it
/// violating.
pub fn is_locally_minimal(subject: &Subject, tier: Tier, cx: &Counterexample) -> bool {
    if !violates(subject, tier, cx, &cx.strings) {
        return false;
    }
    (0..cx.strings.len()).all(|k| {
        (0..cx.strings[k].len()).all(|i| {
            let mut candidate = cx.strings.clone();
            candidate[k] = cx.strings[k].without(i);
            !violates(subject, tier, cx, &candidate)
        })
    })
}
