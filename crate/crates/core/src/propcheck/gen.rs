//! Seeded string generators and exhaustive universes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lcs::is_subsequence;
use crate::symbols::SymbolSeq;

use super::GenConfig;

/// Largest universe accepted for exhaustive enumeration.
pub const MAX_UNIVERSE: usize = 100_000;

// Indels applied per string by the correlated generator.
const MAX_MUTATIONS: usize = 3;

/// `Σ_{l=0..=max_length} alphabet^l`, or `None` on overflow.
pub fn universe_size(alphabet: u32, max_length: usize) -> Option<u128> {
    let mut total: u128 = 0;
    let mut layer: u128 = 1;
    for _ in 0..=max_length {
        total = total.checked_add(layer)?;
        layer = layer.checked_mul(alphabet as u128)?;
    }
    Some(total)
}

/// Every string over `0..alphabet` with length `<= max_length`, shortest
/// first, lexicographic within a length.
pub fn universe(alphabet: u32, max_length: usize) -> Result<Vec<SymbolSeq>> {
    let size = universe_size(alphabet, max_length).unwrap_or(u128::MAX);
    if size > MAX_UNIVERSE as u128 {
        return Err(Error::Capacity {
            what: "exhaustive universe size",
            value: size.min(usize::MAX as u128) as usize,
            limit: MAX_UNIVERSE,
        });
    }
    let mut out = vec![SymbolSeq::new()];
    let mut layer = vec![SymbolSeq::new()];
    for _ in 0..max_length {
        let next: Vec<SymbolSeq> = layer
            .iter()
            .flat_map(|s| {
                (0..alphabet).map(move |c| {
                    let mut t = s.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

/// All ordered pairs of a universe.
pub fn universe_pairs(universe: &[SymbolSeq]) -> Vec<(SymbolSeq, SymbolSeq)> {
    universe
        .iter()
        .flat_map(|a| universe.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

/// All chains `a ⊑ b ⊑ c` within a universe.
pub fn exhaustive_chains(universe: &[SymbolSeq]) -> Vec<[SymbolSeq; 3]> {
    let mut out = Vec::new();
    for c in universe {
        for b in universe.iter().filter(|b| is_subsequence(b, c)) {
            for a in universe.iter().filter(|a| is_subsequence(a, b)) {
                out.push([a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    out
}

/// The generator for case `index` of a run seeded with `seed`. Each case has
/// its own stream, so results do not depend on evaluation order.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// I.i.d. uniform symbols, length uniform on `[0, max_length]`.
pub fn random_string(rng: &mut impl Rng, alphabet: u32, max_length: usize) -> SymbolSeq {
    let len = rng.random_range(0..=max_length);
    (0..len).map(|_| rng.random_range(0..alphabet)).collect()
}

fn mutate(rng: &mut impl Rng, s: &SymbolSeq, alphabet: u32, max_length: usize) -> SymbolSeq {
    let mut ids = s.ids().to_vec();
    for _ in 0..rng.random_range(0..=MAX_MUTATIONS) {
        let delete = !ids.is_empty() && (ids.len() >= max_length || rng.random_bool(0.5));
        if delete {
            ids.remove(rng.random_range(0..ids.len()));
        } else if ids.len() < max_length {
            let at = rng.random_range(0..=ids.len());
            ids.insert(at, rng.random_range(0..alphabet));
        }
    }
    SymbolSeq::from_ids(ids)
}

/// Three small indel mutations of one random ancestor. Near-equal triples
/// are where triangle slack is smallest.
pub fn correlated_triple(rng: &mut impl Rng, alphabet: u32, max_length: usize) -> [SymbolSeq; 3] {
    let ancestor = random_string(rng, alphabet, max_length);
    [
        mutate(rng, &ancestor, alphabet, max_length),
        mutate(rng, &ancestor, alphabet, max_length),
        mutate(rng, &ancestor, alphabet, max_length),
    ]
}

fn delete_some(rng: &mut impl Rng, s: &SymbolSeq) -> SymbolSeq {
    let mut ids = s.ids().to_vec();
    for _ in 0..rng.random_range(0..=ids.len()) {
        ids.remove(rng.random_range(0..ids.len()));
    }
    SymbolSeq::from_ids(ids)
}

/// A random `c`, then `b` and `a` by random deletions.
pub fn random_chain(rng: &mut impl Rng, alphabet: u32, max_length: usize) -> [SymbolSeq; 3] {
    let c = random_string(rng, alphabet, max_length);
    let b = delete_some(rng, &c);
    let a = delete_some(rng, &b);
    [a, b, c]
}

/// `sample_count` pairs, alternating independent and correlated draws.
pub fn random_pairs(config: &GenConfig) -> Vec<(SymbolSeq, SymbolSeq)> {
    (0..config.sample_count as u64)
        .map(|i| {
            let mut rng = rng_for(config.seed ^ 0x5041_4952, i);
            if i % 2 == 0 {
                let a = random_string(&mut rng, config.alphabet_size, config.max_length);
                let b = random_string(&mut rng, config.alphabet_size, config.max_length);
                (a, b)
            } else {
                let [a, b, _] =
                    correlated_triple(&mut rng, config.alphabet_size, config.max_length);
                (a, b)
            }
        })
        .collect()
}

pub fn random_chains(config: &GenConfig) -> Vec<[SymbolSeq; 3]> {
    (0..config.sample_count as u64)
        .map(|i| {
            let mut rng = rng_for(config.seed ^ 0x4348_4149, i);
            random_chain(&mut rng, config.alphabet_size, config.max_length)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universe_sizes() {
        assert_eq!(universe_size(2, 4), Some(31));
        assert_eq!(universe_size(3, 3), Some(40));
        assert_eq!(universe(2, 4).unwrap().len(), 31);
        let u = universe(3, 3).unwrap();
        assert_eq!(u.len(), 40);
        assert_eq!(u[0], SymbolSeq::new());
        assert_eq!(u[1].ids(), &[0]);
        assert_eq!(u.last().unwrap().ids(), &[2, 2, 2]);
        assert!(universe(26, 4).is_err());
        assert_eq!(universe_size(2, 200), None);
    }

    #[test]
    fn chains_are_chains() {
        let cfg = GenConfig::random(4, 100, 500, 9);
        for [a, b, c] in random_chains(&cfg) {
            assert!(is_subsequence(&a, &b) && is_subsequence(&b, &c));
            assert!(c.len() <= 100);
        }
        let u = universe(2, 2).unwrap();
        let chains = exhaustive_chains(&u);
        assert!(chains
            .iter()
            .all(|[a, b, c]| is_subsequence(a, b) && is_subsequence(b, c)));
        // ε ⊑ ε ⊑ ε is one of them, and every (x, x, x)
        assert!(chains.iter().filter(|[a, b, c]| a == b && b == c).count() == u.len());
    }

    #[test]
    fn generators_are_deterministic() {
        let cfg = GenConfig::random(26, 50, 100, 42);
        assert_eq!(random_pairs(&cfg), random_pairs(&cfg));
        let other = GenConfig {
            seed: 43,
            ..cfg.clone()
        };
        assert_ne!(random_pairs(&cfg), random_pairs(&other));
        let mut rng = rng_for(1, 2);
        for _ in 0..200 {
            for s in correlated_triple(&mut rng, 3, 10) {
                assert!(s.len() <= 10 && s.ids().iter().all(|&c| c < 3));
            }
        }
    }
}
