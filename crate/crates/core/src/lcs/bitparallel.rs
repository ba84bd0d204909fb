//! Row-wise bit-vector LCS (Allison–Dix / Hyyrö formulation).
//!
//! Bit `i` of the state vector `V` is zero exactly when the DP column
//! increments at row `i` of `a`. Each symbol of `b` updates all of `V` with
//!
//! ```text
//! U = V & M[c]
//! V = (V + U) | (V & !U)
//! ```
//!
//! where `M[c]` marks the positions of `c` in `a`. The addition carries
//! across 64-bit words; the answer is the number of zero bits in `V`.

use std::collections::HashMap;

use crate::symbols::SymbolSeq;

const WORD: usize = u64::BITS as usize;

// Ids up to this bound get a direct lookup table instead of a hash map.
const DENSE_ID_LIMIT: u32 = 1 << 16;

pub fn lcs_len_bitparallel(a: &SymbolSeq, b: &SymbolSeq) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let words = a.len().div_ceil(WORD);
    let masks = MatchMasks::new(a.ids(), words);
    let mut v = vec![!0u64; words];
    for &c in b.ids() {
        let Some(m) = masks.get(c) else { continue };
        let mut carry = false;
        for (vk, &mk) in v.iter_mut().zip(m) {
            let old = *vk;
            let u = old & mk;
            let (s, c1) = old.overflowing_add(u);
            let (s, c2) = s.overflowing_add(carry as u64);
            carry = c1 | c2;
            *vk = s | (old & !u);
        }
    }
    let tail = a.len() % WORD;
    v.iter()
        .enumerate()
        .map(|(k, &vk)| {
            let valid = if k + 1 == words && tail != 0 {
                (1u64 << tail) - 1
            } else {
                !0
            };
            (!vk & valid).count_ones() as usize
        })
        .sum()
}

/// Per-symbol position masks over `a`, one slab of `words` words per distinct
/// symbol. Symbols absent from `a` have no mask and leave `V` unchanged.
struct MatchMasks {
    words: usize,
    slab: Vec<u64>,
    slots: Slots,
}

enum Slots {
    // slot + 1, zero meaning absent
    Dense(Vec<u32>),
    Sparse(HashMap<u32, u32>),
}

impl MatchMasks {
    fn new(a: &[u32], words: usize) -> Self {
        let max_id = a.iter().copied().max().unwrap_or(0);
        let mut slots = if max_id < DENSE_ID_LIMIT {
            Slots::Dense(vec![0; max_id as usize + 1])
        } else {
            Slots::Sparse(HashMap::new())
        };
        let mut slab = Vec::new();
        for (i, &c) in a.iter().enumerate() {
            let slot = match &mut slots {
                Slots::Dense(v) => &mut v[c as usize],
                Slots::Sparse(m) => m.entry(c).or_insert(0),
            };
            if *slot == 0 {
                slab.resize(slab.len() + words, 0);
                *slot = (slab.len() / words) as u32;
            }
            let base = (*slot as usize - 1) * words;
            slab[base + i / WORD] |= 1u64 << (i % WORD);
        }
        MatchMasks { words, slab, slots }
    }

    fn get(&self, c: u32) -> Option<&[u64]> {
        let slot = match &self.slots {
            Slots::Dense(v) => v.get(c as usize).copied().unwrap_or(0),
            Slots::Sparse(m) => m.get(&c).copied().unwrap_or(0),
        };
        (slot != 0).then(|| {
            let base = (slot as usize - 1) * self.words;
            &self.slab[base..base + self.words]
        })
    }
}
