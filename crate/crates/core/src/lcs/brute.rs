use crate::symbols::SymbolSeq;

use super::is_subsequence;

/// Largest input length (of the shorter string) accepted by the brute-force
/// engine.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Tries every subsequence of the shorter string against the longer one.
/// Exponential; callers enforce [`BRUTE_FORCE_LIMIT`].
pub(crate) fn lcs_len_brute_force(a: &SymbolSeq, b: &SymbolSeq) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let n = short.len();
    assert!(n <= BRUTE_FORCE_LIMIT);
    let mut best = 0;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let candidate: SymbolSeq = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| short.ids()[i])
            .collect();
        if is_subsequence(&candidate, long) {
            best = size;
        }
    }
    best
}
