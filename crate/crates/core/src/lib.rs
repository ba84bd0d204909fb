//! Harmonic edit distance.
//!
//! `d(A, B) = 2·H(|A| + |B| − |lcs(A, B)|) − H(|A|) − H(|B|)` where `H(n)` is
//! the n-th harmonic number. Insertions and deletions cost the reciprocal of
//! the length of the string they act on, so one differing symbol matters less
//! between long strings than between short ones. The distance is a true
//! metric: symmetric, zero only on equal strings, and obeying the triangle
//! inequality.
//!
//! The crate is organised bottom-up:
//!
//! * [`harmonic`]: tabulated harmonic numbers plus an exact rational oracle.
//! * [`symbols`]: tokenization into [`SymbolSeq`]s of dense integer ids.
//! * [`lcs`]: exact LCS-length engines (DP, bit-parallel, Hunt–Szymanski,
//!   brute force) behind one dispatcher.
//! * [`metric`]: the distance, its insert/delete breakdown and exact form.
//! * [`propcheck`]: executable checks of the metric axioms and the lemmas
//!   that prove them.
//! * [`vpindex`]: a vantage-point tree for exact range and k-NN search.
//!
//! ```
//! use harmdist::{distance, SymbolSeq};
//!
//! let a = SymbolSeq::from_chars("abc");
//! let b = SymbolSeq::from_chars("abd");
//! assert!((distance(&a, &b) - 0.5).abs() < 1e-12);
//! ```

pub mod error;
pub mod harmonic;
pub mod lcs;
pub mod metric;
pub mod propcheck;
pub mod symbols;
pub mod vpindex;

pub use error::{Error, Result};
pub use harmonic::{ExactHarmonic, HarmonicTable};
pub use lcs::Engine;
pub use metric::{distance, distance_exact, DistanceBreakdown, HarmonicEditDistance};
pub use symbols::{Interner, SymbolSeq, TokenMode};
pub use vpindex::VpTree;

// Every code block in the guide under `book/` is compiled and run as a
// doc-test through these empty modules.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/harmonic.md")]
    mod harmonic {}
    #[doc = include_str!("../../../book/src/lcs.md")]
    mod lcs {}
    #[doc = include_str!("../../../book/src/metric.md")]
    mod metric {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/index.md")]
    mod index {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
