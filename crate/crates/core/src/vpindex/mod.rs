//! Vantage-point tree over a string corpus.
//!
//! Each internal node picks a pivot and splits the remaining elements at the
//! median distance `radius` from it: the inside subtree holds the pivot and
//! everything with `d(pivot, x) <= radius`, the outside subtree the rest
//! (all `>= radius`). Queries skip a subtree when the triangle inequality
//! proves it cannot contain an answer, which is sound only because the
//! harmonic edit distance is a metric. Prune decisions keep a margin of
//! [`PRUNE_MARGIN`] so that float error cannot discard a true answer.
//!
//! Results are exactly those of a linear scan ([`scan_range`],
//! [`scan_knn`]).

mod io;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::HarmonicEditDistance;
use crate::symbols::SymbolSeq;

pub use io::{FORMAT_VERSION, MAGIC};

/// Subtrees with at most this many elements become leaves.
pub const LEAF_SIZE: usize = 8;

/// Safety margin on every prune decision.
pub const PRUNE_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Internal {
        pivot: u32,
        radius: f64,
        inside: u32,
        outside: u32,
    },
    Leaf {
        items: Vec<u32>,
    },
}

/// A query result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

impl Neighbor {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.index.cmp(&other.index))
    }
}

// Max-heap entry for k-NN: the worst current candidate sits on top.
#[derive(PartialEq)]
struct Candidate(Neighbor);

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_key(&other.0)
    }
}

/// A query for [`VpTree::stats`].
#[derive(Clone, Debug)]
pub enum Query {
    Range { query: SymbolSeq, radius: f64 },
    Knn { query: SymbolSeq, k: usize },
}

/// Distance evaluations spent per query.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PruningReport {
    pub corpus_size: usize,
    pub evaluations: Vec<usize>,
    /// Mean of `evaluations / corpus_size`.
    pub mean_fraction_scanned: f64,
}

impl PruningReport {
    pub fn pruned_fraction(&self) -> f64 {
        1.0 - self.mean_fraction_scanned
    }
}

/// Immutable after [`VpTree::build`]; queries take `&self` and may run
/// concurrently.
#[derive(Clone, Debug)]
pub struct VpTree {
    corpus: Vec<SymbolSeq>,
    nodes: Vec<Node>,
    root: u32,
    seed: u64,
    metric: HarmonicEditDistance,
}

impl VpTree {
    /// Builds with the default distance evaluator.
    pub fn build(corpus: Vec<SymbolSeq>, seed: u64) -> Result<Self> {
        VpTree::build_with(corpus, seed, HarmonicEditDistance::default())
    }

    /// Pivots are drawn from a generator seeded with `seed`; the same corpus
    /// order and seed always give the same tree.
    pub fn build_with(
        corpus: Vec<SymbolSeq>,
        seed: u64,
        metric: HarmonicEditDistance,
    ) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        if corpus.len() > u32::MAX as usize {
            return Err(Error::Capacity {
                what: "corpus size",
                value: corpus.len(),
                limit: u32::MAX as usize,
            });
        }
        let mut tree = VpTree {
            corpus,
            nodes: Vec::new(),
            root: 0,
            seed,
            metric,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut items: Vec<u32> = (0..tree.corpus.len() as u32).collect();
        tree.root = tree.build_node(&mut items, &mut rng);
        Ok(tree)
    }

    fn build_node(&mut self, items: &mut [u32], rng: &mut ChaCha8Rng) -> u32 {
        let slot = self.nodes.len() as u32;
        if items.len() <= LEAF_SIZE {
            self.nodes.push(Node::Leaf {
                items: items.to_vec(),
            });
            return slot;
        }
        let pick = rng.random_range(0..items.len());
        items.swap(0, pick);
        let pivot = items[0];
        let mut keyed: Vec<(f64, u32)> = items[1..]
            .iter()
            .map(|&i| (self.dist(pivot, i), i))
            .collect();
        keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        // lower median
        let median = (keyed.len() - 1) / 2;
        let radius = keyed[median].0;
        let mut inside: Vec<u32> = std::iter::once(pivot)
            .chain(keyed[..=median].iter().map(|&(_, i)| i))
            .collect();
        let mut outside: Vec<u32> = keyed[median + 1..].iter().map(|&(_, i)| i).collect();

        self.nodes.push(Node::Leaf { items: Vec::new() });
        let inside_slot = self.build_node(&mut inside, rng);
        let outside_slot = self.build_node(&mut outside, rng);
        self.nodes[slot as usize] = Node::Internal {
            pivot,
            radius,
            inside: inside_slot,
            outside: outside_slot,
        };
        slot
    }

    fn dist(&self, i: u32, j: u32) -> f64 {
        self.metric
            .distance(&self.corpus[i as usize], &self.corpus[j as usize])
    }

    pub fn corpus(&self) -> &[SymbolSeq] {
        &self.corpus
    }

    pub fn len(&self) -> usize {
        self.corpus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corpus.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn metric(&self) -> &HarmonicEditDistance {
        &self.metric
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: u32) -> usize {
            match &nodes[at as usize] {
                Node::Leaf { .. } => 0,
                Node::Internal {
                    inside, outside, ..
                } => 1 + walk(nodes, *inside).max(walk(nodes, *outside)),
            }
        }
        walk(&self.nodes, self.root)
    }

    /// Indices `i` with `d(query, corpus[i]) <= radius`, ascending.
    pub fn range_query(&self, query: &SymbolSeq, radius: f64) -> Result<Vec<usize>> {
        Ok(self.range_counted(query, radius)?.0)
    }

    fn range_counted(&self, query: &SymbolSeq, radius: f64) -> Result<(Vec<usize>, usize)> {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::Precondition(format!(
                "range radius must be non-negative, got {radius}"
            )));
        }
        let mut walk = Walk::new(self, query);
        let mut out = Vec::new();
        walk.range(self.root, radius, &mut out);
        out.sort_unstable();
        Ok((out, walk.evaluations))
    }

    /// The `k` nearest corpus elements (all of them if `k` exceeds the
    /// corpus), ascending by distance, ties by ascending index.
    pub fn knn(&self, query: &SymbolSeq, k: usize) -> Result<Vec<Neighbor>> {
        Ok(self.knn_counted(query, k)?.0)
    }

    fn knn_counted(&self, query: &SymbolSeq, k: usize) -> Result<(Vec<Neighbor>, usize)> {
        if k == 0 {
            return Err(Error::Precondition("k must be at least 1".into()));
        }
        let mut walk = Walk::new(self, query);
        let mut heap = BinaryHeap::with_capacity(k + 1);
        walk.knn(self.root, k, &mut heap);
        let mut out: Vec<Neighbor> = heap.into_iter().map(|c| c.0).collect();
        out.sort_by(Neighbor::cmp_key);
        Ok((out, walk.evaluations))
    }

    /// Distance evaluations per query.
    pub fn stats(&self, queries: &[Query]) -> Result<PruningReport> {
        let evaluations = queries
            .iter()
            .map(|q| match q {
                Query::Range { query, radius } => self.range_counted(query, *radius).map(|r| r.1),
                Query::Knn { query, k } => self.knn_counted(query, *k).map(|r| r.1),
            })
            .collect::<Result<Vec<_>>>()?;
        let n = self.corpus.len() as f64;
        let mean_fraction_scanned = if evaluations.is_empty() {
            0.0
        } else {
            evaluations.iter().map(|&e| e as f64 / n).sum::<f64>() / evaluations.len() as f64
        };
        Ok(PruningReport {
            corpus_size: self.corpus.len(),
            evaluations,
            mean_fraction_scanned,
        })
    }

    /// Verifies the structural invariants: every corpus element sits in
    /// exactly one leaf, each pivot is inside its own subtree, and the
    /// radius separates the two subtrees.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        check_structure(&self.nodes, self.root, self.corpus.len())?;
        self.check_node(self.root).map(|_| ())
    }

    // Returns all elements below `at`.
    fn check_node(&self, at: u32) -> std::result::Result<Vec<u32>, String> {
        match &self.nodes[at as usize] {
            Node::Leaf { items } => Ok(items.clone()),
            Node::Internal {
                pivot,
                radius,
                inside,
                outside,
            } => {
                let ins = self.check_node(*inside)?;
                let outs = self.check_node(*outside)?;
                if !ins.contains(pivot) {
                    return Err(format!(
                        "node {at}: pivot {pivot} missing from inside subtree"
                    ));
                }
                for &x in &ins {
                    let d = self.dist(*pivot, x);
                    if d > *radius {
                        return Err(format!(
                            "node {at}: inside element {x} at {d} > radius {radius}"
                        ));
                    }
                }
                for &x in &outs {
                    let d = self.dist(*pivot, x);
                    if d < *radius {
                        return Err(format!(
                            "node {at}: outside element {x} at {d} < radius {radius}"
                        ));
                    }
                }
                Ok(ins.into_iter().chain(outs).collect())
            }
        }
    }
}

/// Checks node references and that leaves partition `0..corpus_len`.
pub(crate) fn check_structure(
    nodes: &[Node],
    root: u32,
    corpus_len: usize,
) -> std::result::Result<(), String> {
    let mut seen = vec![false; corpus_len];
    let mut visited = vec![false; nodes.len()];
    let mut stack = vec![root];
    while let Some(at) = stack.pop() {
        let Some(node) = nodes.get(at as usize) else {
            return Err(format!("node reference {at} out of range"));
        };
        if std::mem::replace(&mut visited[at as usize], true) {
            return Err(format!("node {at} reachable twice"));
        }
        match node {
            Node::Leaf { items } => {
                for &i in items {
                    match seen.get_mut(i as usize) {
                        None => return Err(format!("corpus index {i} out of range")),
                        Some(true) => return Err(format!("corpus index {i} in two leaves")),
                        Some(s) => *s = true,
                    }
                }
            }
            Node::Internal {
                pivot,
                inside,
                outside,
                ..
            } => {
                if *pivot as usize >= corpus_len {
                    return Err(format!("pivot {pivot} out of range"));
                }
                stack.push(*outside);
                stack.push(*inside);
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(format!("corpus index {missing} not in any leaf"));
    }
    if visited.iter().any(|v| !v) {
        return Err("unreachable nodes".into());
    }
    Ok(())
}

/// One query's traversal state. A pivot also lives in a leaf of its inside
/// subtree (and may be re-picked as a pivot below), so distances to
/// ancestor pivots are remembered and every element is evaluated and
/// reported at most once.
struct Walk<'a> {
    tree: &'a VpTree,
    query: &'a SymbolSeq,
    ancestors: Vec<(u32, f64)>,
    evaluations: usize,
}

impl<'a> Walk<'a> {
    fn new(tree: &'a VpTree, query: &'a SymbolSeq) -> Self {
        Walk {
            tree,
            query,
            ancestors: Vec::new(),
            evaluations: 0,
        }
    }

    fn remembered(&self, i: u32) -> Option<f64> {
        self.ancestors.iter().find(|a| a.0 == i).map(|a| a.1)
    }

    fn measure(&mut self, i: u32) -> f64 {
        self.evaluations += 1;
        self.tree
            .metric
            .distance(self.query, &self.tree.corpus[i as usize])
    }

    /// Distance to `i`, and whether this is the first time `i` is seen.
    fn visit(&mut self, i: u32) -> (f64, bool) {
        match self.remembered(i) {
            Some(d) => (d, false),
            None => (self.measure(i), true),
        }
    }

    fn range(&mut self, at: u32, r: f64, out: &mut Vec<usize>) {
        match &self.tree.nodes[at as usize] {
            Node::Leaf { items } => {
                for &i in items {
                    if self.remembered(i).is_none() && self.measure(i) <= r {
                        out.push(i as usize);
                    }
                }
            }
            &Node::Internal {
                pivot,
                radius,
                inside,
                outside,
            } => {
                let (dp, first) = self.visit(pivot);
                if first && dp <= r {
                    out.push(pivot as usize);
                }
                self.ancestors.push((pivot, dp));
                if dp - r <= radius + PRUNE_MARGIN {
                    self.range(inside, r, out);
                }
                if dp + r >= radius - PRUNE_MARGIN {
                    self.range(outside, r, out);
                }
                self.ancestors.pop();
            }
        }
    }

    fn knn(&mut self, at: u32, k: usize, heap: &mut BinaryHeap<Candidate>) {
        let offer = |heap: &mut BinaryHeap<Candidate>, n: Neighbor| {
            if heap.len() < k {
                heap.push(Candidate(n));
            } else if heap.peek().is_some_and(|top| n.cmp_key(&top.0).is_lt()) {
                heap.pop();
                heap.push(Candidate(n));
            }
        };
        let tau = |heap: &BinaryHeap<Candidate>| {
            if heap.len() < k {
                f64::INFINITY
            } else {
                heap.peek().map_or(f64::INFINITY, |c| c.0.distance)
            }
        };
        match &self.tree.nodes[at as usize] {
            Node::Leaf { items } => {
                for &i in items {
                    if self.remembered(i).is_none() {
                        let distance = self.measure(i);
                        offer(
                            heap,
                            Neighbor {
                                index: i as usize,
                                distance,
                            },
                        );
                    }
                }
            }
            &Node::Internal {
                pivot,
                radius,
                inside,
                outside,
            } => {
                let (dp, first) = self.visit(pivot);
                if first {
                    offer(
                        heap,
                        Neighbor {
                            index: pivot as usize,
                            distance: dp,
                        },
                    );
                }
                self.ancestors.push((pivot, dp));
                let order = if dp <= radius {
                    [(inside, true), (outside, false)]
                } else {
                    [(outside, false), (inside, true)]
                };
                for (child, is_inside) in order {
                    let t = tau(heap);
                    let prune = if is_inside {
                        dp - t > radius + PRUNE_MARGIN
                    } else {
                        dp + t < radius - PRUNE_MARGIN
                    };
                    if !prune {
                        self.knn(child, k, heap);
                    }
                }
                self.ancestors.pop();
            }
        }
    }
}

/// Linear-scan range query: the reference the tree must match.
pub fn scan_range(
    metric: &HarmonicEditDistance,
    corpus: &[SymbolSeq],
    query: &SymbolSeq,
    radius: f64,
) -> Vec<usize> {
    corpus
        .iter()
        .enumerate()
        .filter(|(_, s)| metric.distance(query, s) <= radius)
        .map(|(i, _)| i)
        .collect()
}

/// Linear-scan k-NN with the same ordering contract as [`VpTree::knn`].
pub fn scan_knn(
    metric: &HarmonicEditDistance,
    corpus: &[SymbolSeq],
    query: &SymbolSeq,
    k: usize,
) -> Vec<Neighbor> {
    let mut all: Vec<Neighbor> = corpus
        .iter()
        .enumerate()
        .map(|(index, s)| Neighbor {
            index,
            distance: metric.distance(query, s),
        })
        .collect();
    all.sort_by(Neighbor::cmp_key);
    all.truncate(k);
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propcheck::{correlated_triple, random_string, rng_for};

    fn corpus(n: usize, seed: u64) -> Vec<SymbolSeq> {
        let mut rng = rng_for(seed, 0);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            if out.len() % 3 == 0 {
                out.push(random_string(&mut rng, 6, 30));
            } else {
                out.extend(correlated_triple(&mut rng, 6, 30));
            }
        }
        out.truncate(n);
        out
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert!(matches!(
            VpTree::build(Vec::new(), 0),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn single_string_is_a_leaf() {
        let tree = VpTree::build(vec![SymbolSeq::from_chars("abc")], 1).unwrap();
        assert_eq!(tree.node_count(), 1);
        assert_eq!(tree.depth(), 0);
        tree.check_invariants().unwrap();
        let q = SymbolSeq::from_chars("abc");
        assert_eq!(tree.range_query(&q, 0.0).unwrap(), vec![0]);
        let report = tree
            .stats(&[Query::Range {
                query: q,
                radius: 0.0,
            }])
            .unwrap();
        assert_eq!(report.evaluations, vec![1]);
    }

    #[test]
    fn duplicates_only() {
        let dup = SymbolSeq::from_chars("same");
        let tree = VpTree::build(vec![dup.clone(); 100], 5).unwrap();
        tree.check_invariants().unwrap();
        assert_eq!(
            tree.range_query(&dup, 0.0).unwrap(),
            (0..100).collect::<Vec<_>>()
        );
        let knn = tree.knn(&dup, 1).unwrap();
        assert_eq!(
            knn,
            vec![Neighbor {
                index: 0,
                distance: 0.0
            }]
        );
        let report = tree
            .stats(&[Query::Range {
                query: dup,
                radius: 0.0,
            }])
            .unwrap();
        assert_eq!(report.evaluations, vec![100]);
        assert_eq!(report.pruned_fraction(), 0.0);
    }

    #[test]
    fn matches_linear_scan() {
        let data = corpus(600, 3);
        let tree = VpTree::build(data.clone(), 9).unwrap();
        tree.check_invariants().unwrap();
        let metric = HarmonicEditDistance::default();
        let queries = corpus(30, 77);
        for (qi, q) in queries.iter().chain(&data[..10]).enumerate() {
            for r in [0.0, 0.1, 0.3, 0.8] {
                assert_eq!(
                    tree.range_query(q, r).unwrap(),
                    scan_range(&metric, &data, q, r),
                    "query {qi}, r = {r}"
                );
            }
            for k in [1, 5, 17] {
                assert_eq!(
                    tree.knn(q, k).unwrap(),
                    scan_knn(&metric, &data, q, k),
                    "query {qi}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn oversized_k_and_radius_return_everything() {
        let data = corpus(50, 4);
        let tree = VpTree::build(data.clone(), 2).unwrap();
        let q = SymbolSeq::from_ids(vec![1, 2, 3]);
        let all = tree.knn(&q, 500).unwrap();
        assert_eq!(all.len(), 50);
        assert!(all.windows(2).all(|w| w[0].cmp_key(&w[1]).is_le()));
        assert_eq!(tree.range_query(&q, f64::INFINITY).unwrap().len(), 50);
        assert!(tree.range_query(&q, -1.0).is_err());
        assert!(tree.knn(&q, 0).is_err());
    }

    #[test]
    fn deterministic_builds() {
        let data = corpus(300, 6);
        let a = VpTree::build(data.clone(), 11).unwrap();
        let b = VpTree::build(data.clone(), 11).unwrap();
        assert_eq!(a.nodes, b.nodes);
        let c = VpTree::build(data, 12).unwrap();
        c.check_invariants().unwrap();
    }

    #[test]
    fn exact_match_has_lowest_index() {
        let mut data = corpus(200, 8);
        let q = data[40].clone();
        data[150] = q.clone();
        let tree = VpTree::build(data, 1).unwrap();
        let dups: Vec<usize> = (0..200).filter(|&i| tree.corpus()[i] == q).collect();
        assert!(dups.len() >= 2 && dups[0] <= 40 && dups.contains(&150));
        let best = tree.knn(&q, dups.len()).unwrap();
        for (n, &i) in best.iter().zip(&dups) {
            assert_eq!(
                *n,
                Neighbor {
                    index: i,
                    distance: 0.0
                }
            );
        }
    }
}
