//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p harmdist-cli --test acceptance`. The process exits
//! non-zero when any criterion fails.

use std::hint::black_box;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use harmdist::harmonic::harmonic_diff_exact;
use harmdist::lcs::{lcs_len, Engine};
use harmdist::propcheck::{
    self, random_chains, universe, universe_pairs, Fixture, GenConfig, Property, Subject, Tier,
    LEMMA_TOLERANCE,
};
use harmdist::vpindex::{scan_knn, scan_range, Query};
use harmdist::{distance, distance_exact, ExactHarmonic, HarmonicEditDistance, SymbolSeq, VpTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 0x5EED_2024;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn random_seq(r: &mut impl Rng, alphabet: u32, len: usize) -> SymbolSeq {
    (0..len).map(|_| r.random_range(0..alphabet)).collect()
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn exhaustive_axioms(alphabet: u32, max_len: usize, triples: u64, budget: Duration) -> Verdict {
    let subject = Subject::new(HarmonicEditDistance::default(), Fixture::None);
    let start = Instant::now();
    let report = propcheck::verify_metric_axioms(
        &subject,
        &GenConfig::exhaustive(alphabet, max_len),
        Tier::Rational,
    )
    .unwrap();
    let took = start.elapsed();
    let tri = report.property(Property::Triangle).unwrap();
    let pass = report.violations() == 0 && tri.checked == triples && took < budget;
    verdict(
        pass,
        format!(
            "{} triples, {} violations, {} (limit {})",
            tri.checked,
            report.violations(),
            secs(took),
            secs(budget)
        ),
    )
}

fn c1() -> Verdict {
    exhaustive_axioms(2, 4, 29_791, Duration::from_secs(30))
}

fn c2() -> Verdict {
    exhaustive_axioms(3, 3, 64_000, Duration::from_secs(60))
}

fn c3() -> Verdict {
    let subject = Subject::new(HarmonicEditDistance::default(), Fixture::None);
    let u1 = universe(2, 4).unwrap();
    let u2 = universe(3, 3).unwrap();
    let p1 = universe_pairs(&u1);
    let p2 = universe_pairs(&u2);

    let scs = propcheck::verify_lemma_scs(&subject, &p1, Tier::Rational).unwrap();

    let chains = random_chains(&GenConfig::random(4, 100, 10_000, SEED));
    let top_ok = chains.iter().all(|c| c[2].len() <= 100);
    let chain_exact = propcheck::verify_lemma_chain(&subject, &chains, Tier::Rational).unwrap();
    let chain_float = propcheck::verify_lemma_chain(&subject, &chains, Tier::Float).unwrap();
    let worst_float = chain_float.min_slack.unwrap_or(0.0);

    let lcs1 = propcheck::verify_lemma_lcs_triangle(&subject, &p1, Tier::Rational).unwrap();
    let lcs2 = propcheck::verify_lemma_lcs_triangle(&subject, &p2, Tier::Rational).unwrap();

    let pass = scs.passed()
        && scs.checked == 961
        && top_ok
        && chain_exact.passed()
        && chain_exact.checked == 10_000
        && chain_float.passed()
        && -worst_float <= LEMMA_TOLERANCE
        && lcs1.passed()
        && lcs2.passed()
        && lcs2.checked == 1600;
    verdict(
        pass,
        format!(
            "scs equality {}/{} pairs; chain additivity {} chains exact ({} violations), float ({} violations, worst slack {:e}); lcs inequality {} + {} pairs ({} violations)",
            scs.checked - scs.violations,
            scs.checked,
            chain_exact.checked,
            chain_exact.violations,
            chain_float.violations,
            worst_float,
            lcs1.checked,
            lcs2.checked,
            lcs1.violations + lcs2.violations,
        ),
    )
}

fn c4() -> Verdict {
    let s = SymbolSeq::from_chars;
    let n10a = s("aaaaaaaaaa");
    let n10b = s("aaaaaaaaab");
    let cases: [(&str, SymbolSeq, SymbolSeq, ExactHarmonic); 4] = [
        ("d(a,b)", s("a"), s("b"), ExactHarmonic::from_integer(1)),
        (
            "d(abc,abd)",
            s("abc"),
            s("abd"),
            ExactHarmonic::new(1.into(), 2.into()),
        ),
        (
            "d(,ab)",
            s(""),
            s("ab"),
            ExactHarmonic::new(3.into(), 2.into()),
        ),
        (
            "d(n=10)",
            n10a.clone(),
            n10b.clone(),
            harmonic_diff_exact(10, 11).unwrap() + harmonic_diff_exact(10, 11).unwrap(),
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, a, b, want) in &cases {
        let exact = distance_exact(a, b).unwrap();
        let float = distance(a, b);
        let ok = &exact == want && (float - exact.to_f64()).abs() <= 1e-12;
        pass &= ok;
        parts.push(format!("{name}={exact} ({float:.15})"));
    }
    let two_elevenths = ExactHarmonic::new(2.into(), 11.into());
    pass &= cases[3].3 == two_elevenths;
    let ordering = distance_exact(&n10a, &n10b).unwrap()
        < distance_exact(&s("a"), &s("b")).unwrap()
        && distance(&n10a, &n10b) < distance(&s("a"), &s("b"));
    pass &= ordering;
    parts.push(format!("n=10 pair closer than n=1 pair: {ordering}"));
    verdict(pass, parts.join("; "))
}

const FAST: [Engine; 3] = [Engine::Dp, Engine::BitParallel, Engine::HuntSzymanski];

fn c5() -> Verdict {
    let start = Instant::now();
    let mut r = rng(5);

    let small: Vec<(SymbolSeq, SymbolSeq)> = (0..1000)
        .map(|i| {
            let alphabet = [2, 4, 26][i % 3];
            let short = r.random_range(0..=12);
            let long = r.random_range(0..=48);
            let a = random_seq(&mut r, alphabet, short);
            let b = random_seq(&mut r, alphabet, long);
            if i % 2 == 0 {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    let small_bad = small
        .par_iter()
        .filter(|(a, b)| {
            let want = lcs_len(a, b, Engine::BruteForce).unwrap();
            FAST.iter().any(|&e| lcs_len(a, b, e).unwrap() != want)
        })
        .count();

    let medium: Vec<(SymbolSeq, SymbolSeq)> = [2u32, 4, 26]
        .iter()
        .flat_map(|&alphabet| {
            (0..1000)
                .map(|_| {
                    let la = r.random_range(0..=512);
                    let lb = r.random_range(0..=512);
                    (
                        random_seq(&mut r, alphabet, la),
                        random_seq(&mut r, alphabet, lb),
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let medium_bad = medium
        .par_iter()
        .filter(|(a, b)| !engines_agree(a, b))
        .count();

    let large: Vec<(SymbolSeq, SymbolSeq)> = (0..100)
        .map(|i| {
            let alphabet = if i % 2 == 0 { 4 } else { 26 };
            (
                random_seq(&mut r, alphabet, 5000),
                random_seq(&mut r, alphabet, 5000),
            )
        })
        .collect();
    let large_bad = large
        .par_iter()
        .filter(|(a, b)| !engines_agree(a, b))
        .count();

    let took = start.elapsed();
    let budget = Duration::from_secs(120);
    verdict(
        small_bad == 0 && medium_bad == 0 && large_bad == 0 && took < budget,
        format!(
            "mismatches: {small_bad}/1000 vs brute force, {medium_bad}/3000 at length <= 512, {large_bad}/100 at length 5000; {} (limit {})",
            secs(took),
            secs(budget)
        ),
    )
}

fn engines_agree(a: &SymbolSeq, b: &SymbolSeq) -> bool {
    let want = lcs_len(a, b, Engine::Dp).unwrap();
    FAST.iter()
        .chain([Engine::Auto].iter())
        .all(|&e| lcs_len(a, b, e).unwrap() == want)
}

fn c6() -> Verdict {
    let mut r = rng(6);
    let pairs: Vec<(SymbolSeq, SymbolSeq)> = (0..10_000)
        .map(|i| {
            let total = r.random_range(0..=10_000usize);
            let la = r.random_range(0..=total);
            let alphabet = [2, 4, 26, 1000][i % 4];
            let a = random_seq(&mut r, alphabet, la);
            let b = if i % 3 == 0 {
                // a mutated copy keeps the LCS long
                let mut ids: Vec<u32> = a.ids().to_vec();
                let cuts = r.random_range(0..=ids.len().min(20));
                for _ in 0..cuts {
                    let at = r.random_range(0..ids.len());
                    ids.remove(at);
                }
                let room = 10_000 - la - ids.len().min(10_000 - la);
                for _ in 0..r.random_range(0..=room.min(20)) {
                    let at = r.random_range(0..=ids.len());
                    ids.insert(at, r.random_range(0..alphabet));
                }
                ids.truncate(10_000 - la);
                SymbolSeq::from_ids(ids)
            } else {
                random_seq(&mut r, alphabet, total - la)
            };
            (a, b)
        })
        .collect();
    let worst = pairs
        .par_iter()
        .map(|(a, b)| {
            assert!(a.len() + b.len() <= 10_000);
            (distance(a, b) - distance_exact(a, b).unwrap().to_f64()).abs()
        })
        .reduce(|| 0.0, f64::max);
    verdict(
        worst <= 1e-9,
        format!("10000 pairs, max |float - exact| = {worst:e} (limit 1e-9)"),
    )
}

fn c7() -> Verdict {
    let mut r = rng(7);
    let corpus: Vec<SymbolSeq> = (0..2000)
        .map(|_| {
            let len = r.random_range(0..=24);
            random_seq(&mut r, 4, len)
        })
        .collect();
    let tree = VpTree::build(corpus.clone(), SEED).unwrap();
    let metric = tree.metric().clone();
    let queries: Vec<SymbolSeq> = (0..100)
        .map(|i| {
            if i % 5 == 0 {
                corpus[r.random_range(0..corpus.len())].clone()
            } else {
                let len = r.random_range(0..=24);
                random_seq(&mut r, 4, len)
            }
        })
        .collect();

    let mut knn_bad = 0;
    let mut range_bad = 0;
    let mut stats_queries = Vec::new();
    for q in &queries[..50] {
        if tree.knn(q, 10).unwrap() != scan_knn(&metric, &corpus, q, 10) {
            knn_bad += 1;
        }
        stats_queries.push(Query::Knn {
            query: q.clone(),
            k: 10,
        });
    }
    for q in &queries[50..] {
        let mut got = tree.range_query(q, 0.3).unwrap();
        got.sort_unstable();
        if got != scan_range(&metric, &corpus, q, 0.3) {
            range_bad += 1;
        }
        stats_queries.push(Query::Range {
            query: q.clone(),
            radius: 0.3,
        });
    }
    let stats = tree.stats(&stats_queries).unwrap();
    let invariants = tree.check_invariants();
    verdict(
        knn_bad == 0 && range_bad == 0 && stats.mean_fraction_scanned < 1.0 && invariants.is_ok(),
        format!(
            "knn mismatches {knn_bad}/50, range mismatches {range_bad}/50, mean scanned fraction {:.3}, depth {}",
            stats.mean_fraction_scanned,
            tree.depth()
        ),
    )
}

fn c8() -> Verdict {
    let subject = Subject::new(HarmonicEditDistance::default(), Fixture::BrokenLcs);
    let report =
        propcheck::verify_metric_axioms(&subject, &GenConfig::exhaustive(2, 4), Tier::Rational)
            .unwrap();
    let tri = report.property(Property::Triangle).unwrap();
    let triangle_found = tri.violations >= 1;

    // shrink whatever the fixture does break, preferring a triangle
    let cx = tri.counterexamples.first().or_else(|| {
        report
            .properties
            .iter()
            .find_map(|p| p.counterexamples.first())
    });
    let (minimal, shrunk) = match cx {
        Some(cx) => {
            let small = propcheck::shrink(&subject, Tier::Rational, cx).unwrap();
            (
                propcheck::is_locally_minimal(&subject, Tier::Rational, &small),
                small.render(),
            )
        }
        None => (false, "none".to_string()),
    };

    let out = Command::new(env!("CARGO_BIN_EXE_harmdist"))
        .args([
            "check",
            "--fixture",
            "broken-lcs",
            "--exhaustive",
            "alphabet=2",
            "maxlen=4",
            "--rational",
        ])
        .output()
        .unwrap();
    let code = out.status.code();

    verdict(
        triangle_found && minimal && code == Some(3),
        format!(
            "triangle counterexamples {} (need >= 1); total violations {}; shrunk {shrunk}, locally minimal {minimal}; exit code {code:?}",
            tri.violations,
            report.violations(),
        ),
    )
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn time<T>(f: impl FnOnce() -> T) -> f64 {
    let start = Instant::now();
    black_box(f());
    start.elapsed().as_secs_f64()
}

fn c9() -> Verdict {
    let mut r = rng(9);
    let a = random_seq(&mut r, 4, 4096);
    let b = random_seq(&mut r, 4, 4096);
    let dp = median(
        (0..20)
            .map(|_| time(|| lcs_len(&a, &b, Engine::Dp).unwrap()))
            .collect(),
    );
    let bp = median(
        (0..20)
            .map(|_| time(|| lcs_len(&a, &b, Engine::BitParallel).unwrap()))
            .collect(),
    );
    let speedup = dp / bp;

    let metric = HarmonicEditDistance::default();
    let batch: Vec<(SymbolSeq, SymbolSeq)> = (0..64)
        .map(|_| (random_seq(&mut r, 4, 2048), random_seq(&mut r, 4, 2048)))
        .collect();
    let run_lcs = || {
        batch
            .iter()
            .map(|(a, b)| lcs_len(a, b, Engine::Auto).unwrap())
            .sum::<usize>()
    };
    let run_dist = || {
        batch
            .iter()
            .map(|(a, b)| metric.distance(a, b))
            .sum::<f64>()
    };
    run_lcs();
    run_dist();
    let ratios: Vec<f64> = (0..21)
        .map(|i| {
            // alternate the order so drift hits both sides
            if i % 2 == 0 {
                let l = time(run_lcs);
                time(run_dist) / l
            } else {
                let d = time(run_dist);
                d / time(run_lcs)
            }
        })
        .collect();
    let overhead = median(ratios);
    verdict(
        speedup >= 5.0 && overhead <= 1.05,
        format!(
            "bitparallel {:.1}x faster than dp at n=4096 (need >= 5); distance/lcs_len time ratio {overhead:.3} (need <= 1.05)",
            speedup
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("metric axioms, alphabet 2, length <= 4, rational", c1),
        ("metric axioms, alphabet 3, length <= 3, rational", c2),
        ("scs, chain and lcs lemma suites", c3),
        ("forced values", c4),
        ("lcs engine equivalence", c5),
        ("float against rational distance", c6),
        ("vp-tree exactness and pruning", c7),
        ("harness sensitivity to a planted bug", c8),
        ("performance sanity", c9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} | {name} | {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
