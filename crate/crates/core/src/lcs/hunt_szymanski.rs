use std::collections::HashMap;

use crate::symbols::SymbolSeq;

/// Hunt–Szymanski: walks only the matching position pairs.
///
/// `ends[k]` is the smallest position in `a` at which a common subsequence
/// of length `k + 1` can end, given the prefix of `b` seen so far. It stays
/// strictly increasing, so each match is placed by binary search. Matches
/// for one symbol of `b` are visited in decreasing `a` position so they
/// cannot extend each other. `O((r + n) log n)` for `r` matching pairs.
pub fn lcs_len_hunt_szymanski(a: &SymbolSeq, b: &SymbolSeq) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut positions: HashMap<u32, Vec<u32>> = HashMap::new();
    for (i, &c) in a.ids().iter().enumerate() {
        positions.entry(c).or_default().push(i as u32);
    }
    let mut ends: Vec<u32> = Vec::new();
    for c in b.ids() {
        let Some(list) = positions.get(c) else {
            continue;
        };
        for &i in list.iter().rev() {
            let k = ends.partition_point(|&e| e < i);
            if k == ends.len() {
                ends.push(i);
            } else {
                ends[k] = i;
            }
        }
    }
    ends.len()
}
