use std::ffi::OsStr;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use harmdist::propcheck::{self, Fixture, GenConfig, GenMode, Report, Subject, Tier};
use harmdist::vpindex::scan_knn;
use harmdist::{HarmonicEditDistance, HarmonicTable, Interner, SymbolSeq, VpTree};
use rayon::prelude::*;

use crate::{CheckArgs, Cli, Command, Failure, FixtureArg};

pub const TABLE_SIZE_VAR: &str = "HARMDIST_TABLE_SIZE";
const MAX_TABLE_SIZE: usize = 1 << 28;

const DEFAULT_SEED: u64 = 0;

type Outcome = Result<u8, Failure>;

pub fn run(cli: &Cli, out: &mut impl Write) -> Outcome {
    let metric = metric(cli)?;
    match &cli.command {
        Command::Dist { a, b } => {
            let mut interner = Interner::new(cli.mode);
            let a = interner.intern(a.as_encoded_bytes())?;
            let b = interner.intern(b.as_encoded_bytes())?;
            writeln!(out, "{}", fmt(metric.distance(&a, &b), cli.precision))?;
            Ok(0)
        }
        Command::Matrix { input } => matrix(cli, &metric, input, out),
        Command::Knn {
            corpus,
            query,
            k,
            index,
            no_index,
        } => knn(
            cli,
            metric,
            corpus,
            query,
            *k,
            index.as_deref(),
            *no_index,
            out,
        ),
        Command::Index { corpus, output } => {
            let Corpus { seqs, .. } = read_corpus(cli, corpus)?;
            if seqs.is_empty() {
                return Err(harmdist::Error::EmptyCorpus.into());
            }
            let tree = VpTree::build_with(seqs, cli.seed.unwrap_or(DEFAULT_SEED), metric)?;
            tree.save(output)?;
            writeln!(
                out,
                "indexed {} strings into {} nodes",
                tree.len(),
                tree.node_count()
            )?;
            Ok(0)
        }
        Command::Check(args) => check(cli, metric, args, out),
    }
}

fn metric(cli: &Cli) -> Result<HarmonicEditDistance, Failure> {
    let table = match std::env::var(TABLE_SIZE_VAR) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{TABLE_SIZE_VAR}: not a size: {v:?}")))?;
            if n > MAX_TABLE_SIZE {
                return Err(Failure::Usage(format!(
                    "{TABLE_SIZE_VAR}: {n} exceeds the limit of {MAX_TABLE_SIZE}"
                )));
            }
            Arc::new(HarmonicTable::new(n))
        }
        Err(_) => HarmonicTable::shared(),
    };
    Ok(HarmonicEditDistance::new(table).with_engine(cli.engine)?)
}

/// The one formatting path for every printed distance.
pub fn fmt(d: f64, precision: u8) -> String {
    format!("{:.*}", precision as usize, d)
}

/// Splits on `\n`; a final newline does not start another line.
pub fn split_lines(bytes: &[u8]) -> Vec<&[u8]> {
    if bytes.is_empty() {
        return Vec::new();
    }
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    body.split(|&b| b == b'\n').collect()
}

struct Corpus {
    lines: Vec<Vec<u8>>,
    interner: Interner,
    seqs: Vec<SymbolSeq>,
}

fn read_corpus(cli: &Cli, path: &Path) -> Result<Corpus, Failure> {
    let bytes =
        std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let lines: Vec<Vec<u8>> = split_lines(&bytes)
        .into_iter()
        .map(<[u8]>::to_vec)
        .collect();
    let mut interner = Interner::new(cli.mode);
    let seqs = lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            interner
                .intern(l)
                .map_err(|e| Failure::Input(format!("{}: line {}: {e}", path.display(), i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Corpus {
        lines,
        interner,
        seqs,
    })
}

fn matrix(cli: &Cli, metric: &HarmonicEditDistance, input: &Path, out: &mut impl Write) -> Outcome {
    let Corpus { seqs, .. } = read_corpus(cli, input)?;
    let header: Vec<String> = (0..seqs.len()).map(|i| i.to_string()).collect();
    writeln!(out, "{}", header.join("\t"))?;
    let rows: Vec<String> = seqs
        .par_iter()
        .map(|a| {
            seqs.iter()
                .map(|b| fmt(metric.distance(a, b), cli.precision))
                .collect::<Vec<_>>()
                .join("\t")
        })
        .collect();
    for row in rows {
        writeln!(out, "{row}")?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn knn(
    cli: &Cli,
    metric: HarmonicEditDistance,
    corpus: &Path,
    query: &OsStr,
    k: u64,
    index: Option<&Path>,
    no_index: bool,
    out: &mut impl Write,
) -> Outcome {
    let Corpus {
        lines,
        mut interner,
        seqs,
    } = read_corpus(cli, corpus)?;
    if seqs.is_empty() {
        return Err(harmdist::Error::EmptyCorpus.into());
    }
    let q = interner.intern(query.as_encoded_bytes())?;
    let k = usize::try_from(k).unwrap_or(usize::MAX);
    let hits = if no_index {
        scan_knn(&metric, &seqs, &q, k)
    } else {
        let tree = match index {
            Some(path) => VpTree::load(path, seqs, metric)?,
            None => VpTree::build_with(seqs, cli.seed.unwrap_or(DEFAULT_SEED), metric)?,
        };
        tree.knn(&q, k)?
    };
    for (rank, n) in hits.iter().enumerate() {
        write!(
            out,
            "{}\t{}\t{}\t",
            rank + 1,
            n.index,
            fmt(n.distance, cli.precision)
        )?;
        out.write_all(&lines[n.index])?;
        out.write_all(b"\n")?;
    }
    Ok(0)
}

struct CheckParams {
    alphabet: Option<u32>,
    maxlen: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
}

fn parse_params(args: &CheckArgs, cli: &Cli) -> Result<CheckParams, Failure> {
    let mut p = CheckParams {
        alphabet: args.alphabet,
        maxlen: args.maxlen,
        samples: args.samples,
        seed: cli.seed,
    };
    for kv in &args.params {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected key=value, got {kv:?}")))?;
        let bad = || Failure::Usage(format!("{key}: invalid value {value:?}"));
        match key {
            "alphabet" => p.alphabet = Some(value.parse().map_err(|_| bad())?),
            "maxlen" => p.maxlen = Some(value.parse().map_err(|_| bad())?),
            "samples" => p.samples = Some(value.parse().map_err(|_| bad())?),
            "seed" => p.seed = Some(value.parse().map_err(|_| bad())?),
            _ => return Err(Failure::Usage(format!("unknown parameter {key:?}"))),
        }
    }
    Ok(p)
}

fn check(
    cli: &Cli,
    metric: HarmonicEditDistance,
    args: &CheckArgs,
    out: &mut impl Write,
) -> Outcome {
    let p = parse_params(args, cli)?;
    let config = if args.random {
        GenConfig::random(
            p.alphabet.unwrap_or(4),
            p.maxlen.unwrap_or(16),
            p.samples.unwrap_or(10_000),
            p.seed.unwrap_or(DEFAULT_SEED),
        )
    } else {
        GenConfig::exhaustive(p.alphabet.unwrap_or(2), p.maxlen.unwrap_or(4))
    };
    config.validate()?;
    let tier = match (args.rational, args.float) {
        (true, _) => Tier::Rational,
        (_, true) => Tier::Float,
        _ if config.mode == GenMode::Exhaustive => Tier::Rational,
        _ => Tier::Float,
    };
    let fixture = match args.fixture {
        Some(FixtureArg::BrokenLcs) => Fixture::BrokenLcs,
        None => Fixture::None,
    };
    let subject = Subject::new(metric, fixture);
    let report = propcheck::verify_all(&subject, &config, tier)?;
    if args.json {
        writeln!(out, "{}", report.to_json())?;
    } else {
        write!(out, "{}", report.to_text())?;
    }
    if report.passed() {
        return Ok(0);
    }
    if !args.json {
        print_shrunk(&subject, tier, &report, out)?;
    }
    Ok(3)
}

fn print_shrunk(
    subject: &Subject,
    tier: Tier,
    report: &Report,
    out: &mut impl Write,
) -> Result<(), Failure> {
    for prop in &report.properties {
        if let Some(cx) = prop.counterexamples.first() {
            let small = propcheck::shrink(subject, tier, cx)?;
            writeln!(out, "shrunk {}", small.render())?;
        }
    }
    Ok(())
}
