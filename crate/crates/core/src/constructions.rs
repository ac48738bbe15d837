//! Explicit families of Hamiltonian paths, each paired with the difference
//! predicate it is claimed to satisfy pairwise.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{bipartition_of_path, ham_cycle_closure, Bipartition};
use crate::error::{Error, Result};
use crate::model::{canonicalize, enumerate_paths, next_permutation, DSpec, HamPath, Vertex, MAX_ORDER};
use crate::relations::{differ_masks, DifferencePredicate};
use crate::search::{max_matching, BipartiteGraph};

/// Largest number of permuted items (blocks, inner vertices, bipartition
/// sides) a construction will expand.
pub const PERMUTATION_LIMIT: usize = 9;

/// Where a family came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub name: &'static str,
    pub n: usize,
    pub c: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructedFamily {
    pub paths: Vec<HamPath>,
    pub claim: DifferencePredicate,
    pub provenance: Provenance,
}

impl ConstructedFamily {
    fn new(raw: Vec<HamPath>, claim: DifferencePredicate, provenance: Provenance) -> Self {
        // keep first occurrence of each canonical path
        let mut seen = BTreeSet::new();
        let paths = raw.into_iter().filter(|h| seen.insert(h.clone())).collect();
        Self { paths, claim, provenance }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn n(&self) -> usize {
        self.provenance.n
    }
}

fn permutations(items: &[Vertex]) -> Vec<Vec<Vertex>> {
    let mut cur = items.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn check_permutation_size(what: &'static str, k: usize) -> Result<()> {
    if k > PERMUTATION_LIMIT {
        return Err(Error::Capacity { what, n: k, limit: PERMUTATION_LIMIT });
    }
    Ok(())
}

/// Scan canonical paths in lexicographic order (or a seeded shuffle) and keep
/// each path that is different from every path kept so far.
pub fn greedy_family(n: usize, p: &DifferencePredicate, seed: Option<u64>) -> Result<ConstructedFamily> {
    let mut candidates = enumerate_paths(n)?;
    if let Some(s) = seed {
        candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
    }
    let mut chosen: Vec<(HamPath, Vec<u64>)> = Vec::new();
    for h in candidates {
        let masks = h.adjacency_masks();
        if chosen.iter().all(|(_, m)| differ_masks(m, &masks, p)) {
            chosen.push((h, masks));
        }
    }
    Ok(ConstructedFamily::new(
        chosen.into_iter().map(|(h, _)| h).collect(),
        p.clone(),
        Provenance { name: "greedy", n, c: None, seed },
    ))
}

/// Number of paths `H'` (including `h`) whose union with `h` has no even
/// cycle, by brute force over `paths`.
pub fn count_no_even_neighbors_in(h: &HamPath, paths: &[HamPath]) -> usize {
    let even = DifferencePredicate::CycleIn(DSpec::Even);
    let hm = h.adjacency_masks();
    paths.iter().filter(|q| q.n() == h.n() && !differ_masks(&hm, &q.adjacency_masks(), &even)).count()
}

pub fn count_no_even_neighbors(h: &HamPath) -> Result<usize> {
    Ok(count_no_even_neighbors_in(h, &enumerate_paths(h.n())?))
}

/// All paths alternating between the odd and even labels; their pairwise
/// unions are bipartite.
pub fn bipartite_family(n: usize) -> Result<ConstructedFamily> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("bipartite family needs n >= 4, got {n}")));
    }
    check_permutation_size("bipartite family side", n.div_ceil(2))?;
    let odds: Vec<Vertex> = (1..=n as Vertex).step_by(2).collect();
    let evens: Vec<Vertex> = (2..=n as Vertex).step_by(2).collect();
    let interleave = |first: &[Vertex], second: &[Vertex]| -> Vec<Vertex> {
        let mut s = Vec::with_capacity(n);
        for i in 0..first.len() {
            s.push(first[i]);
            if i < second.len() {
                s.push(second[i]);
            }
        }
        s
    };
    let mut raw = Vec::new();
    let (big, small) = if odds.len() >= evens.len() { (&odds, &evens) } else { (&evens, &odds) };
    for a in permutations(big) {
        for b in permutations(small) {
            raw.push(canonicalize(&interleave(&a, &b))?);
            if big.len() == small.len() {
                raw.push(canonicalize(&interleave(&b, &a))?);
            }
        }
    }
    raw.sort();
    Ok(ConstructedFamily::new(
        raw,
        DifferencePredicate::CycleIn(DSpec::Even),
        Provenance { name: "bipartite", n, c: None, seed: None },
    ))
}

/// Consecutive blocks `{1..c}, {c+1..2c}, ...`, each traversed in increasing
/// order. Edges inside a block are block edges; edges between blocks are
/// linking edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSystem {
    c: usize,
    blocks: Vec<Vec<Vertex>>,
}

impl BlockSystem {
    pub fn new(n: usize, c: usize) -> Result<Self> {
        if c < 2 || n == 0 || !n.is_multiple_of(c) {
            return Err(Error::InvalidParameter(format!("blocks need c >= 2 and c | n, got n = {n}, c = {c}")));
        }
        if n > MAX_ORDER {
            return Err(Error::Capacity { what: "block system order", n, limit: MAX_ORDER });
        }
        let blocks = (0..n / c).map(|b| ((b * c + 1)..=(b * c + c)).map(|v| v as Vertex).collect()).collect();
        Ok(Self { c, blocks })
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<Vertex>] {
        &self.blocks
    }

    fn block_of(&self, v: Vertex) -> usize {
        (v as usize - 1) / self.c
    }

    /// Concatenate the blocks in the given order.
    pub fn link(&self, order: &[usize]) -> Result<HamPath> {
        let seq: Vec<Vertex> = order.iter().flat_map(|&b| self.blocks[b].iter().copied()).collect();
        canonicalize(&seq)
    }

    /// `(block edges, linking edges)` on a cycle.
    pub fn classify(&self, cycle: &crate::model::Cycle) -> (usize, usize) {
        let block = cycle.edges().iter().filter(|(a, b)| self.block_of(*a) == self.block_of(*b)).count();
        (block, cycle.len() - block)
    }
}

fn block_orders(first_fixed: bool, count: usize) -> Vec<Vec<usize>> {
    let tail: Vec<Vertex> = (usize::from(first_fixed)..count).map(|b| b as Vertex).collect();
    permutations(&tail)
        .into_iter()
        .map(|perm| {
            let mut order: Vec<usize> = if first_fixed { vec![0] } else { Vec::new() };
            order.extend(perm.into_iter().map(usize::from));
            order
        })
        .collect()
}

/// One path per permutation of the blocks; pairwise unions carry a cycle of
/// length `c * k`.
pub fn block_family(n: usize, c: usize) -> Result<ConstructedFamily> {
    let system = BlockSystem::new(n, c)?;
    check_permutation_size("block count", system.block_count())?;
    let raw = block_orders(false, system.block_count()).iter().map(|o| system.link(o)).collect::<Result<Vec<_>>>()?;
    Ok(ConstructedFamily::new(
        raw,
        DifferencePredicate::CycleIn(DSpec::DivisibleBy(c as u32)),
        Provenance { name: "block", n, c: Some(c), seed: None },
    ))
}

/// Block permutations with the first block pinned; pairwise unions carry a
/// cycle of length `c * k + 2`.
pub fn shifted_block_family(n: usize, c: usize) -> Result<ConstructedFamily> {
    if c < 3 {
        return Err(Error::InvalidParameter(format!("shifted block family needs c >= 3, got {c}")));
    }
    let system = BlockSystem::new(n, c)?;
    check_permutation_size("block count", system.block_count() - 1)?;
    let raw = block_orders(true, system.block_count()).iter().map(|o| system.link(o)).collect::<Result<Vec<_>>>()?;
    Ok(ConstructedFamily::new(
        raw,
        DifferencePredicate::CycleIn(DSpec::NotDivisibleBy(c as u32)),
        Provenance { name: "shifted-block", n, c: Some(c), seed: None },
    ))
}

/// All paths with endpoints `1` and `n`.
pub fn fixed_endpoint_family(n: usize, c: usize) -> Result<ConstructedFamily> {
    if matches!(c, 0 | 1 | 2 | 4) {
        return Err(Error::InvalidParameter(format!("fixed-endpoint family excludes c = {c}")));
    }
    if n < 4 {
        return Err(Error::InvalidParameter(format!("fixed-endpoint family needs n >= 4, got {n}")));
    }
    check_permutation_size("inner vertices", n - 2)?;
    let inner: Vec<Vertex> = (2..n as Vertex).collect();
    let raw = permutations(&inner)
        .into_iter()
        .map(|mid| {
            let mut s = vec![1];
            s.extend(mid);
            s.push(n as Vertex);
            canonicalize(&s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstructedFamily::new(
        raw,
        DifferencePredicate::CycleIn(DSpec::NotDivisibleBy(c as u32)),
        Provenance { name: "fixed-endpoint", n, c: Some(c), seed: None },
    ))
}

/// Per 4-tuple `{4i+1..4i+4}` pick `(4i+1,4i+2,4i+3,4i+4)` or
/// `(4i+2,4i+4,4i+1,4i+3)`; the two together span a K4.
pub fn k4_family(n: usize) -> Result<ConstructedFamily> {
    if n == 0 || !n.is_multiple_of(4) {
        return Err(Error::InvalidParameter(format!("k4 family needs 4 | n, got {n}")));
    }
    let tuples = n / 4;
    if tuples > 12 {
        return Err(Error::Capacity { what: "k4 family tuples", n: tuples, limit: 12 });
    }
    let raw = (0u32..1 << tuples)
        .map(|choice| {
            let seq: Vec<Vertex> = (0..tuples)
                .flat_map(|i| {
                    let b = (4 * i) as Vertex;
                    if choice >> (tuples - 1 - i) & 1 == 0 {
                        [b + 1, b + 2, b + 3, b + 4]
                    } else {
                        [b + 2, b + 4, b + 1, b + 3]
                    }
                })
                .collect();
            canonicalize(&seq)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstructedFamily::new(raw, DifferencePredicate::ContainsK4, Provenance { name: "k4", n, c: None, seed: None }))
}

fn check_sh_order(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) || n < 6 {
        return Err(Error::InvalidParameter(format!("S(H) needs even n >= 6, got {n}")));
    }
    Ok(())
}

fn relabel(h: &HamPath, positions: &[usize]) -> Result<HamPath> {
    let seq: Vec<Vertex> = positions.iter().map(|&k| h.seq()[k - 1]).collect();
    canonicalize(&seq)
}

/// `{H, H_l, H_r, H_lr}`: swap the first two and/or the last two vertices.
pub fn sh_set(h: &HamPath) -> Result<Vec<HamPath>> {
    let n = h.n();
    check_sh_order(n)?;
    let id: Vec<usize> = (1..=n).collect();
    let mut left = id.clone();
    left.swap(0, 1);
    let mut right = id.clone();
    right.swap(n - 2, n - 1);
    let mut both = left.clone();
    both.swap(n - 2, n - 1);
    [id, left, right, both].iter().map(|pos| relabel(h, pos)).collect()
}

/// Paths that reverse a longer prefix `(2i, ..., 1, 2i+1, ..., n)` or the
/// mirror-image suffix, for `2 <= i < n/2`; each one creates an even cycle
/// with some member of [`sh_set`]. (`i = n/2` gives `H` itself.)
pub fn sh_obstructions(h: &HamPath) -> Result<Vec<HamPath>> {
    let n = h.n();
    check_sh_order(n)?;
    let mut out = Vec::new();
    for i in 2..n / 2 {
        let mut prefix: Vec<usize> = (1..=n).collect();
        prefix[..2 * i].reverse();
        out.push(relabel(h, &prefix)?);
        let mut suffix: Vec<usize> = (1..=n).collect();
        suffix[n - 2 * i..].reverse();
        out.push(relabel(h, &suffix)?);
    }
    Ok(out)
}

/// The C5 / K_{2,3} incidence structure of `K_5`.
#[derive(Clone, Debug)]
pub struct M53Incidence {
    /// Hamiltonian cycles of `K_5` as edge sets (left side).
    pub cycles: Vec<BTreeSet<(Vertex, Vertex)>>,
    /// Almost balanced bipartitions, i.e. the `K_{2,3}` subgraphs (right side).
    pub bipartitions: Vec<Bipartition>,
    pub graph: BipartiteGraph,
    /// The unique path shared by each adjacent (cycle, bipartition) pair.
    pub shared_path: BTreeMap<(usize, usize), HamPath>,
}

pub fn m53_incidence() -> Result<M53Incidence> {
    let paths = enumerate_paths(5)?;
    let cycles: Vec<_> = paths.iter().map(ham_cycle_closure).collect::<BTreeSet<_>>().into_iter().collect();
    let bipartitions: Vec<_> = paths.iter().map(bipartition_of_path).collect::<BTreeSet<_>>().into_iter().collect();
    let mut shared_path = BTreeMap::new();
    for h in &paths {
        let l = cycles.binary_search(&ham_cycle_closure(h)).expect("closure listed");
        let r = bipartitions.binary_search(&bipartition_of_path(h)).expect("bipartition listed");
        if shared_path.insert((l, r), h.clone()).is_some() {
            return Err(Error::Precondition(format!("cycle {l} and bipartition {r} share two paths")));
        }
    }
    let graph = BipartiteGraph::new(cycles.len(), bipartitions.len(), shared_path.keys().copied())?;
    Ok(M53Incidence { cycles, bipartitions, graph, shared_path })
}

/// A maximum matching of the incidence graph picks paths from pairwise
/// distinct cycles and distinct bipartitions.
pub fn m53_matching_family() -> Result<ConstructedFamily> {
    let inc = m53_incidence()?;
    let raw = max_matching(&inc.graph).into_iter().map(|e| inc.shared_path[&e].clone()).collect();
    Ok(ConstructedFamily::new(
        raw,
        DifferencePredicate::CycleIn(DSpec::ExplicitSet(BTreeSet::from([3]))),
        Provenance { name: "m53", n: 5, c: None, seed: None },
    ))
}
