//! Exact longest-common-subsequence lengths.
//!
//! Only lengths are computed, never the subsequence itself: every quantity
//! the distance needs (`|lcs|`, `|scs| = |a| + |b| − |lcs|`) is a length.
//! All engines share one contract and must agree on every input.

mod bitparallel;
mod brute;
mod dp;
mod hunt_szymanski;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::SymbolSeq;

pub use bitparallel::lcs_len_bitparallel;
pub use brute::BRUTE_FORCE_LIMIT;
pub use dp::lcs_len_dp;
pub use hunt_szymanski::lcs_len_hunt_szymanski;

/// `Engine::Auto` uses the bit-parallel engine once the shorter input is
/// longer than this.
pub const AUTO_BITPARALLEL_MIN_LEN: usize = 64;

/// `Engine::Auto` uses Hunt–Szymanski below this match density
/// `r / (|a|·|b|)` (as `1 / AUTO_SPARSE_DENSITY_INV`).
pub const AUTO_SPARSE_DENSITY_INV: u64 = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Picks an engine from the input shape. The thresholds only affect
    /// speed.
    #[default]
    Auto,
    Dp,
    BitParallel,
    HuntSzymanski,
    /// Exponential reference oracle; the shorter input must have at most
    /// [`BRUTE_FORCE_LIMIT`] symbols.
    BruteForce,
}

impl Engine {
    pub const ALL: [Engine; 5] = [
        Engine::Auto,
        Engine::Dp,
        Engine::BitParallel,
        Engine::HuntSzymanski,
        Engine::BruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Auto => "auto",
            Engine::Dp => "dp",
            Engine::BitParallel => "bitparallel",
            Engine::HuntSzymanski => "huntszymanski",
            Engine::BruteForce => "bruteforce",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown LCS engine {s:?}")))
    }
}

/// `|lcs(a, b)|` with the chosen engine.
///
/// Fails only for `Engine::BruteForce` on inputs whose shorter side exceeds
/// [`BRUTE_FORCE_LIMIT`].
pub fn lcs_len(a: &SymbolSeq, b: &SymbolSeq, engine: Engine) -> Result<usize> {
    Ok(match engine {
        Engine::Auto => lcs_len_auto(a, b),
        Engine::Dp => lcs_len_dp(a, b),
        Engine::BitParallel => lcs_len_bitparallel(a, b),
        Engine::HuntSzymanski => lcs_len_hunt_szymanski(a, b),
        Engine::BruteForce => {
            let shorter = a.len().min(b.len());
            if shorter > BRUTE_FORCE_LIMIT {
                return Err(Error::Capacity {
                    what: "brute-force LCS input length",
                    value: shorter,
                    limit: BRUTE_FORCE_LIMIT,
                });
            }
            brute::lcs_len_brute_force(a, b)
        }
    })
}

/// The engine `Engine::Auto` resolves to for this pair.
pub fn auto_engine(a: &SymbolSeq, b: &SymbolSeq) -> Engine {
    let shorter = a.len().min(b.len());
    if shorter > AUTO_BITPARALLEL_MIN_LEN {
        return Engine::BitParallel;
    }
    let cells = a.len() as u64 * b.len() as u64;
    if cells > 0 && match_count(a, b) * AUTO_SPARSE_DENSITY_INV < cells {
        Engine::HuntSzymanski
    } else {
        Engine::Dp
    }
}

fn lcs_len_auto(a: &SymbolSeq, b: &SymbolSeq) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    match auto_engine(a, b) {
        Engine::BitParallel => lcs_len_bitparallel(a, b),
        Engine::HuntSzymanski => lcs_len_hunt_szymanski(a, b),
        _ => lcs_len_dp(a, b),
    }
}

/// Number of position pairs `(i, j)` with `a[i] == b[j]`.
pub fn match_count(a: &SymbolSeq, b: &SymbolSeq) -> u64 {
    let mut counts: HashMap<u32, u64> = HashMap::new();
    for &c in a.ids() {
        *counts.entry(c).or_default() += 1;
    }
    b.ids()
        .iter()
        .map(|c| counts.get(c).copied().unwrap_or(0))
        .sum()
}

/// `|scs(a, b)| = |a| + |b| − |lcs(a, b)|`.
pub fn scs_len(a: &SymbolSeq, b: &SymbolSeq) -> usize {
    a.len() + b.len() - lcs_len_auto(a, b)
}

/// Whether `a` can be obtained from `b` by deleting symbols. Greedy scan.
pub fn is_subsequence(a: &SymbolSeq, b: &SymbolSeq) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut rest = b.ids().iter();
    a.ids().iter().all(|x| rest.any(|y| y == x))
}
