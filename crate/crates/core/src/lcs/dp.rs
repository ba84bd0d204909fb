use crate::symbols::SymbolSeq;

/// Classic LCS recurrence keeping two rows; `O(|a|·|b|)` time and
/// `O(min(|a|, |b|))` space.
pub fn lcs_len_dp(a: &SymbolSeq, b: &SymbolSeq) -> usize {
    let (rows, cols) = if a.len() >= b.len() {
        (a.ids(), b.ids())
    } else {
        (b.ids(), a.ids())
    };
    if cols.is_empty() {
        return 0;
    }
    let mut prev = vec![0u32; cols.len() + 1];
    let mut cur = vec![0u32; cols.len() + 1];
    for &x in rows {
        for (j, &y) in cols.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[cols.len()] as usize
}
