//! The harmonic edit distance.
//!
//! ```text
//! d(A, B) = 2·H(|scs|) − H(|A|) − H(|B|),   |scs| = |A| + |B| − |lcs(A, B)|
//!         = (H(|scs|) − H(|A|)) + (H(|scs|) − H(|B|))
//! ```
//!
//! The second form is what gets evaluated. Each bracket is the cost of
//! growing one string into the shortest common supersequence, one insertion
//! at a time, where inserting into a string of length `k` costs `1/(k+1)`.
//! Summing two non-negative harmonic differences avoids the cancellation of
//! the literal formula on long, similar strings.
//!
//! The distance is unbounded: `d(ε, B) = H(|B|)`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{exact_table, ExactHarmonic, HarmonicTable};
use crate::lcs::{is_subsequence, lcs_len, Engine};
use crate::symbols::SymbolSeq;

/// The two halves of a distance: growing `a` into the shortest common
/// supersequence, then shrinking that supersequence down to `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistanceBreakdown {
    /// `H(|scs|) − H(|a|)`.
    pub insertion_cost: f64,
    /// `H(|scs|) − H(|b|)`.
    pub deletion_cost: f64,
    pub total: f64,
}

/// Distance evaluator: a shared harmonic table plus an LCS engine choice.
#[derive(Clone, Debug)]
pub struct HarmonicEditDistance {
    table: Arc<HarmonicTable>,
    engine: Engine,
}

impl Default for HarmonicEditDistance {
    fn default() -> Self {
        HarmonicEditDistance::new(HarmonicTable::shared())
    }
}

impl HarmonicEditDistance {
    pub fn new(table: Arc<HarmonicTable>) -> Self {
        HarmonicEditDistance {
            table,
            engine: Engine::Auto,
        }
    }

    /// Selects the LCS engine. The brute-force oracle is refused because it
    /// cannot handle arbitrary inputs.
    pub fn with_engine(mut self, engine: Engine) -> Result<Self> {
        if engine == Engine::BruteForce {
            return Err(Error::Precondition(
                "the brute-force engine is a test oracle and cannot back a distance".into(),
            ));
        }
        self.engine = engine;
        Ok(self)
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn table(&self) -> &HarmonicTable {
        &self.table
    }

    /// `d(a, b)`. Symmetric bit for bit, zero exactly when `a == b`.
    pub fn distance(&self, a: &SymbolSeq, b: &SymbolSeq) -> f64 {
        let (short, long) = canonical(a, b);
        let lcs = lcs_len(short, long, self.engine).expect("non brute-force engines are total");
        self.from_lcs_len(short.len(), long.len(), lcs)
    }

    /// The distance formula evaluated from lengths alone.
    ///
    /// Requires `lcs <= min(len_a, len_b)`.
    pub fn from_lcs_len(&self, len_a: usize, len_b: usize, lcs: usize) -> f64 {
        debug_assert!(lcs <= len_a.min(len_b));
        let (lo, hi) = if len_a <= len_b {
            (len_a, len_b)
        } else {
            (len_b, len_a)
        };
        let scs = lo + hi - lcs;
        self.table.diff(lo, scs) + self.table.diff(hi, scs)
    }

    pub fn distance_decomposed(&self, a: &SymbolSeq, b: &SymbolSeq) -> DistanceBreakdown {
        let (short, long) = canonical(a, b);
        let lcs = lcs_len(short, long, self.engine).expect("non brute-force engines are total");
        let scs = a.len() + b.len() - lcs;
        let insertion_cost = self.table.diff(a.len(), scs);
        let deletion_cost = self.table.diff(b.len(), scs);
        DistanceBreakdown {
            insertion_cost,
            deletion_cost,
            total: insertion_cost + deletion_cost,
        }
    }

    /// `H(|b|) − H(|a|)`, valid when `a` is a subsequence of `b`; then no
    /// LCS computation is needed at all. The precondition is checked with a
    /// linear scan.
    pub fn distance_subsequence(&self, a: &SymbolSeq, b: &SymbolSeq) -> Result<f64> {
        if !is_subsequence(a, b) {
            return Err(Error::Precondition(
                "distance_subsequence requires a to be a subsequence of b".into(),
            ));
        }
        Ok(self.table.diff(a.len(), b.len()))
    }
}

/// Orders a pair by (length, ids) so every evaluation sees the same operand
/// order regardless of argument order.
fn canonical<'a>(a: &'a SymbolSeq, b: &'a SymbolSeq) -> (&'a SymbolSeq, &'a SymbolSeq) {
    if (a.len(), a) <= (b.len(), b) {
        (a, b)
    } else {
        (b, a)
    }
}

/// `d(a, b)` with the shared default table and automatic engine choice.
pub fn distance(a: &SymbolSeq, b: &SymbolSeq) -> f64 {
    HarmonicEditDistance::default().distance(a, b)
}

/// Exact rational `d(a, b)`; requires `|a| + |b| <= EXACT_LIMIT`.
pub fn distance_exact(a: &SymbolSeq, b: &SymbolSeq) -> Result<ExactHarmonic> {
    exact_table(a.len() + b.len(), "total input length")?;
    let lcs = lcs_len(a, b, Engine::Auto)?;
    exact_from_lcs_len(a.len(), b.len(), lcs)
}

/// Exact distance formula from lengths alone.
pub fn exact_from_lcs_len(len_a: usize, len_b: usize, lcs: usize) -> Result<ExactHarmonic> {
    if lcs > len_a.min(len_b) {
        return Err(Error::Precondition(format!(
            "lcs length {lcs} exceeds min({len_a}, {len_b})"
        )));
    }
    let scs = len_a + len_b - lcs;
    let table = exact_table(scs, "supersequence length")?;
    Ok(table.combine(scs, &[(2, scs), (-1, len_a), (-1, len_b)]))
}
