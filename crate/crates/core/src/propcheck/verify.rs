use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonic::{harmonic_diff_exact, ExactHarmonic};
use crate::lcs::is_subsequence;
use crate::symbols::SymbolSeq;

use super::gen::{correlated_triple, random_string, rng_for, universe, universe_pairs};
use super::{
    exhaustive_chains, random_chains, random_pairs, GenConfig, GenMode, Property, PropertyReport,
    Report, Subject, Tier, Value, AXIOM_TOLERANCE, LEMMA_TOLERANCE,
};

const CHUNK: usize = 512;

// Above this universe size the pair-distance matrix is not materialised.
const PAIR_CACHE_LIMIT: usize = 2048;

/// The verdict on one case.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub slack: f64,
    pub exact_slack: Option<ExactHarmonic>,
    pub violated: bool,
}

fn judge(slack: Value, tolerance: f64) -> Outcome {
    let violated = match &slack {
        Value::Exact(x) => x.is_negative(),
        Value::Float(x) => *x < -tolerance,
    };
    Outcome {
        slack: slack.to_f64(),
        exact_slack: slack.exact(),
        violated,
    }
}

fn equality(lhs: &Value, rhs: &Value, tolerance: f64) -> Outcome {
    judge(lhs.sub(rhs).abs().neg(), tolerance)
}

fn identity(a: &SymbolSeq, b: &SymbolSeq, d: Value) -> Outcome {
    if a == b {
        return judge(d.abs().neg(), AXIOM_TOLERANCE);
    }
    // distinct strings: the distance itself must be strictly positive
    let positive = match &d {
        Value::Exact(x) => !x.is_negative() && !x.is_zero(),
        Value::Float(x) => *x > 0.0,
    };
    Outcome {
        slack: d.to_f64(),
        exact_slack: d.exact(),
        violated: !positive,
    }
}

fn harmonic_diff(subject: &Subject, tier: Tier, lo: usize, hi: usize) -> Result<Value> {
    Ok(match tier {
        Tier::Float => Value::Float(subject.metric().table().harmonic_diff(lo, hi)?),
        Tier::Rational => Value::Exact(harmonic_diff_exact(lo, hi)?),
    })
}

/// Checks one case of `property` on `strings` (two or three of them, per
/// [`Property::arity`]).
///
/// Fails on a wrong number of strings, on a chain that is not a subsequence
/// chain, or when rational evaluation exceeds the exact capacity.
pub fn evaluate(
    subject: &Subject,
    tier: Tier,
    property: Property,
    strings: &[SymbolSeq],
) -> Result<Outcome> {
    if strings.len() != property.arity() {
        return Err(Error::Precondition(format!(
            "{property} takes {} strings, got {}",
            property.arity(),
            strings.len()
        )));
    }
    let d = |x: &SymbolSeq, y: &SymbolSeq| subject.distance(x, y, tier);
    Ok(match property {
        Property::Symmetry => {
            let (a, b) = (&strings[0], &strings[1]);
            equality(&d(a, b)?, &d(b, a)?, AXIOM_TOLERANCE)
        }
        Property::Identity => {
            let (a, b) = (&strings[0], &strings[1]);
            identity(a, b, d(a, b)?)
        }
        Property::Triangle => {
            let (a, b, c) = (&strings[0], &strings[1], &strings[2]);
            judge(d(a, b)?.add(&d(b, c)?).sub(&d(a, c)?), AXIOM_TOLERANCE)
        }
        Property::LemmaScs => {
            let (a, b) = (&strings[0], &strings[1]);
            let scs = a.len() + b.len() - subject.lcs(a, b);
            let rhs = harmonic_diff(subject, tier, a.len(), scs)?.add(&harmonic_diff(
                subject,
                tier,
                b.len(),
                scs,
            )?);
            equality(&d(a, b)?, &rhs, LEMMA_TOLERANCE)
        }
        Property::LemmaChain => {
            let (a, b, c) = (&strings[0], &strings[1], &strings[2]);
            if !is_subsequence(a, b) || !is_subsequence(b, c) {
                return Err(Error::Precondition(
                    "chain (a, b, c) must satisfy a ⊑ b ⊑ c".into(),
                ));
            }
            equality(&d(a, c)?, &d(a, b)?.add(&d(b, c)?), LEMMA_TOLERANCE)
        }
        Property::LemmaLcsTriangle => {
            let (a, b) = (&strings[0], &strings[1]);
            let lcs = subject.lcs(a, b);
            let rhs = harmonic_diff(subject, tier, lcs, a.len())?.add(&harmonic_diff(
                subject,
                tier,
                lcs,
                b.len(),
            )?);
            judge(rhs.sub(&d(a, b)?), AXIOM_TOLERANCE)
        }
    })
}

/// Runs `check` over `items` in parallel chunks and merges the per-chunk
/// reports in input order, so the result does not depend on scheduling.
fn fold_cases<T, F>(items: &[T], properties: &[Property], check: F) -> Result<Vec<PropertyReport>>
where
    T: Sync,
    F: Fn(&T, &mut [PropertyReport]) -> Result<()> + Sync,
{
    let fresh =
        || -> Vec<PropertyReport> { properties.iter().map(|&p| PropertyReport::new(p)).collect() };
    let chunks: Vec<Vec<PropertyReport>> = items
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut reports = fresh();
            for item in chunk {
                check(item, &mut reports)?;
            }
            Ok(reports)
        })
        .collect::<Result<_>>()?;
    let mut total = fresh();
    for chunk in chunks {
        for (acc, part) in total.iter_mut().zip(chunk) {
            acc.merge(part);
        }
    }
    Ok(total)
}

/// Symmetry, identity of indiscernibles and the triangle inequality.
///
/// Exhaustive mode checks symmetry and identity on every ordered pair and
/// the triangle inequality on every ordered triple of the universe. Random
/// mode draws `sample_count` triples, alternating independent and
/// correlated ones, and checks symmetry and identity on `(a, b)`, identity
/// on `(a, a)` and the triangle on `(a, b, c)`.
pub fn verify_metric_axioms(subject: &Subject, config: &GenConfig, tier: Tier) -> Result<Report> {
    config.validate()?;
    let properties = match config.mode {
        GenMode::Exhaustive => exhaustive_axioms(subject, config, tier)?,
        GenMode::Random => random_axioms(subject, config, tier)?,
    };
    Ok(Report {
        config: config.clone(),
        tier,
        fixture: subject.fixture(),
        properties,
    })
}

fn exhaustive_axioms(
    subject: &Subject,
    config: &GenConfig,
    tier: Tier,
) -> Result<Vec<PropertyReport>> {
    let u = universe(config.alphabet_size, config.max_length)?;
    let n = u.len();
    let row = |i: usize| -> Result<Vec<Value>> {
        u.iter().map(|b| subject.distance(&u[i], b, tier)).collect()
    };
    let cache: Option<Vec<Vec<Value>>> = if n <= PAIR_CACHE_LIMIT {
        Some((0..n).into_par_iter().map(row).collect::<Result<_>>()?)
    } else {
        None
    };

    let indices: Vec<usize> = (0..n).collect();
    let pair_props = [Property::Symmetry, Property::Identity];
    let mut reports = fold_cases(&indices, &pair_props, |&i, reports| {
        let own;
        let row_i = match &cache {
            Some(c) => &c[i],
            None => {
                own = row(i)?;
                &own
            }
        };
        for j in 0..n {
            let back = match &cache {
                Some(c) => c[j][i].clone(),
                None => subject.distance(&u[j], &u[i], tier)?,
            };
            let pair = [u[i].clone(), u[j].clone()];
            reports[0].record(equality(&row_i[j], &back, AXIOM_TOLERANCE), &pair);
            reports[1].record(identity(&u[i], &u[j], row_i[j].clone()), &pair);
        }
        Ok(())
    })?;

    let triangle = fold_cases(&indices, &[Property::Triangle], |&a, reports| {
        let own_a;
        let row_a = match &cache {
            Some(c) => &c[a],
            None => {
                own_a = row(a)?;
                &own_a
            }
        };
        for b in 0..n {
            let own_b;
            let row_b = match &cache {
                Some(c) => &c[b],
                None => {
                    own_b = row(b)?;
                    &own_b
                }
            };
            for c in 0..n {
                let slack = row_a[b].add(&row_b[c]).sub(&row_a[c]);
                let outcome = judge(slack, AXIOM_TOLERANCE);
                if outcome.violated {
                    reports[0].record(outcome, &[u[a].clone(), u[b].clone(), u[c].clone()]);
                } else {
                    reports[0].record(outcome, &[]);
                }
            }
        }
        Ok(())
    })?;
    reports.extend(triangle);
    Ok(reports)
}

fn random_axioms(subject: &Subject, config: &GenConfig, tier: Tier) -> Result<Vec<PropertyReport>> {
    let indices: Vec<u64> = (0..config.sample_count as u64).collect();
    let props = [Property::Symmetry, Property::Identity, Property::Triangle];
    fold_cases(&indices, &props, |&i, reports| {
        let mut rng = rng_for(config.seed, i);
        let (k, len) = (config.alphabet_size, config.max_length);
        let [a, b, c] = if i % 2 == 0 {
            [
                random_string(&mut rng, k, len),
                random_string(&mut rng, k, len),
                random_string(&mut rng, k, len),
            ]
        } else {
            correlated_triple(&mut rng, k, len)
        };
        let pair = [a.clone(), b.clone()];
        reports[0].record(evaluate(subject, tier, Property::Symmetry, &pair)?, &pair);
        reports[1].record(evaluate(subject, tier, Property::Identity, &pair)?, &pair);
        let same = [a.clone(), a.clone()];
        reports[1].record(evaluate(subject, tier, Property::Identity, &same)?, &same);
        let triple = [a, b, c];
        reports[2].record(
            evaluate(subject, tier, Property::Triangle, &triple)?,
            &triple,
        );
        Ok(())
    })
}

fn verify_pairs(
    subject: &Subject,
    pairs: &[(SymbolSeq, SymbolSeq)],
    tier: Tier,
    property: Property,
) -> Result<PropertyReport> {
    let mut reports = fold_cases(pairs, &[property], |(a, b), reports| {
        let pair = [a.clone(), b.clone()];
        reports[0].record(evaluate(subject, tier, property, &pair)?, &pair);
        Ok(())
    })?;
    Ok(reports.remove(0))
}

/// `d(a, b) = (H(|scs|) − H(|a|)) + (H(|scs|) − H(|b|))` on every pair.
pub fn verify_lemma_scs(
    subject: &Subject,
    pairs: &[(SymbolSeq, SymbolSeq)],
    tier: Tier,
) -> Result<PropertyReport> {
    verify_pairs(subject, pairs, tier, Property::LemmaScs)
}

/// `d(a, b) <= (H(|a|) − H(|lcs|)) + (H(|b|) − H(|lcs|))` on every pair.
pub fn verify_lemma_lcs_triangle(
    subject: &Subject,
    pairs: &[(SymbolSeq, SymbolSeq)],
    tier: Tier,
) -> Result<PropertyReport> {
    verify_pairs(subject, pairs, tier, Property::LemmaLcsTriangle)
}

/// `d(a, c) = d(a, b) + d(b, c)` on every chain `a ⊑ b ⊑ c`. A chain that is
/// not a subsequence chain is a generator bug and aborts the run.
pub fn verify_lemma_chain(
    subject: &Subject,
    chains: &[[SymbolSeq; 3]],
    tier: Tier,
) -> Result<PropertyReport> {
    let mut reports = fold_cases(chains, &[Property::LemmaChain], |chain, reports| {
        reports[0].record(evaluate(subject, tier, Property::LemmaChain, chain)?, chain);
        Ok(())
    })?;
    Ok(reports.remove(0))
}

/// The axioms plus all three lemma suites.
///
/// Exhaustive mode feeds the lemmas every ordered pair and every chain of
/// the universe; random mode draws `sample_count` pairs and chains.
pub fn verify_all(subject: &Subject, config: &GenConfig, tier: Tier) -> Result<Report> {
    let mut report = verify_metric_axioms(subject, config, tier)?;
    let (pairs, chains) = match config.mode {
        GenMode::Exhaustive => {
            let u = universe(config.alphabet_size, config.max_length)?;
            (universe_pairs(&u), exhaustive_chains(&u))
        }
        GenMode::Random => (random_pairs(config), random_chains(config)),
    };
    report
        .properties
        .push(verify_lemma_scs(subject, &pairs, tier)?);
    report
        .properties
        .push(verify_lemma_chain(subject, &chains, tier)?);
    report
        .properties
        .push(verify_lemma_lcs_triangle(subject, &pairs, tier)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propcheck::Fixture;

    fn s(text: &str) -> SymbolSeq {
        SymbolSeq::from_chars(text)
    }

    fn broken() -> Subject {
        Subject::new(Default::default(), Fixture::BrokenLcs)
    }

    #[test]
    fn exhaustive_binary_rational_is_clean() {
        let cfg = GenConfig::exhaustive(2, 4);
        let report = verify_metric_axioms(&Subject::default(), &cfg, Tier::Rational).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.property(Property::Triangle).unwrap().checked, 29_791);
        assert_eq!(report.property(Property::Symmetry).unwrap().checked, 961);
        assert_eq!(report.property(Property::Identity).unwrap().checked, 961);
    }

    #[test]
    fn reflexive_triples_hold() {
        for t in ["", "a", "abcab"] {
            let triple = [s(t), s(t), s(t)];
            for tier in [Tier::Rational, Tier::Float] {
                let o = evaluate(&Subject::default(), tier, Property::Triangle, &triple).unwrap();
                assert!(!o.violated);
                assert_eq!(o.slack, 0.0);
                let o = evaluate(&Subject::default(), tier, Property::LemmaChain, &triple).unwrap();
                assert!(!o.violated);
            }
        }
    }

    #[test]
    fn lemma_examples() {
        let subject = Subject::default();
        let pair = [s("abc"), s("abd")];
        let o = evaluate(&subject, Tier::Rational, Property::LemmaScs, &pair).unwrap();
        assert!(o.exact_slack.unwrap().is_zero());

        // 5/6 = 1/2 + 1/3
        let chain = [s("b"), s("ab"), s("abc")];
        let o = evaluate(&subject, Tier::Rational, Property::LemmaChain, &chain).unwrap();
        assert!(o.exact_slack.unwrap().is_zero());
        assert_eq!(
            subject
                .distance_exact(&chain[0], &chain[2])
                .unwrap()
                .to_string(),
            "5/6"
        );

        let o = evaluate(
            &subject,
            Tier::Rational,
            Property::LemmaLcsTriangle,
            &[s("a"), s("b")],
        )
        .unwrap();
        assert_eq!(o.exact_slack.unwrap().to_string(), "1/1");
        assert!(!o.violated);
    }

    #[test]
    fn bad_chain_is_a_hard_error() {
        let chains = [[s("ba"), s("ab"), s("abc")]];
        assert!(verify_lemma_chain(&Subject::default(), &chains, Tier::Float).is_err());
    }

    #[test]
    fn arity_is_checked() {
        assert!(evaluate(
            &Subject::default(),
            Tier::Float,
            Property::Triangle,
            &[s("a")]
        )
        .is_err());
    }

    #[test]
    fn ternary_universe_lemmas() {
        let u = universe(3, 3).unwrap();
        let pairs = universe_pairs(&u);
        let r = verify_lemma_lcs_triangle(&Subject::default(), &pairs, Tier::Rational).unwrap();
        assert_eq!(r.checked, 1600);
        assert!(r.passed());
    }

    #[test]
    fn broken_fixture_is_detected() {
        let cfg = GenConfig::exhaustive(2, 4);
        let report = verify_all(&broken(), &cfg, Tier::Rational).unwrap();
        assert!(!report.passed());
        // d("a", "b") collapses to 0
        let identity = report.property(Property::Identity).unwrap();
        assert!(identity.violations > 0);
        assert!(identity.counterexamples.iter().any(
            |cx| cx.strings == vec![SymbolSeq::from_ids(vec![0]), SymbolSeq::from_ids(vec![1])]
        ));
    }

    #[test]
    fn random_reports_are_deterministic() {
        let cfg = GenConfig::random(4, 30, 3000, 17);
        let one = verify_all(&Subject::default(), &cfg, Tier::Float).unwrap();
        let two = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| verify_all(&Subject::default(), &cfg, Tier::Float).unwrap());
        assert_eq!(one, two);
        assert_eq!(one.to_json(), two.to_json());
        assert!(one.passed(), "{}", one.to_text());
    }

    #[test]
    fn zero_samples_is_vacuous() {
        let cfg = GenConfig::random(26, 200, 0, 1);
        let report = verify_all(&Subject::default(), &cfg, Tier::Float).unwrap();
        assert!(report.passed());
        assert!(report
            .properties
            .iter()
            .all(|p| p.checked == 0 && p.min_slack.is_none()));
    }

    #[test]
    fn infeasible_universe_is_rejected() {
        let cfg = GenConfig::exhaustive(10, 6);
        assert!(matches!(
            verify_metric_axioms(&Subject::default(), &cfg, Tier::Float),
            Err(Error::Capacity { .. })
        ));
    }
}
