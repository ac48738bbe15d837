//! Pairwise difference predicates, witness extraction and the compatibility
//! graph over all canonical paths of `K_n`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::model::{
    check_same_order, enumerate_paths, parse_dspec, union_of, Cycle, DSpec, HamPath, SimpleGraph, UnionGraph, Vertex,
};

/// Largest `n` accepted by [`build_compat_graph`]. `n = 8` has 20 160 paths
/// and roughly 2 * 10^8 pair evaluations; `n <= 7` is the practical target.
pub const COMPAT_LIMIT: usize = 8;

/// A symmetric, irreflexive relation on Hamiltonian paths of the same order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DifferencePredicate {
    /// The union contains a cycle whose length is in the set.
    CycleIn(DSpec),
    /// The union contains a 4-clique.
    ContainsK4,
}

impl fmt::Display for DifferencePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DifferencePredicate::CycleIn(d) => write!(f, "cycle:{d}"),
            DifferencePredicate::ContainsK4 => f.write_str("k4"),
        }
    }
}

impl FromStr for DifferencePredicate {
    type Err = Error;

    /// `k4` or `cycle:<dspec>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "k4" {
            return Ok(DifferencePredicate::ContainsK4);
        }
        match s.strip_prefix("cycle:") {
            Some(rest) => Ok(DifferencePredicate::CycleIn(parse_dspec(rest)?)),
            None => Err(Error::InvalidParameter(format!("unknown predicate {s:?}; expected k4 or cycle:<dspec>"))),
        }
    }
}

/// Evidence that two paths are different under a predicate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    Cycle(Cycle),
    Clique4([Vertex; 4]),
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::Cycle(_) => "cycle",
            Witness::Clique4(_) => "clique4",
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        match self {
            Witness::Cycle(c) => c.verts(),
            Witness::Clique4(q) => q,
        }
    }

    /// Re-check the witness against a union graph.
    pub fn validates(&self, g: &SimpleGraph, p: &DifferencePredicate) -> bool {
        match (self, p) {
            (Witness::Cycle(c), DifferencePredicate::CycleIn(d)) => d.contains(c.len()) && c.lies_in(g),
            (Witness::Clique4(q), DifferencePredicate::ContainsK4) => is_clique4(g, q),
            _ => false,
        }
    }
}

fn is_clique4(g: &SimpleGraph, q: &[Vertex; 4]) -> bool {
    (0..4).all(|i| (i + 1..4).all(|j| q[i] != q[j] && g.has_edge(q[i], q[j])))
}

/// First 4-clique in lexicographic order of sorted vertex quadruples.
pub fn find_k4(g: &SimpleGraph) -> Option<[Vertex; 4]> {
    let n = g.n() as Vertex;
    for a in 1..=n {
        let na = g.neighbors_mask(a);
        for b in a + 1..=n {
            if na & (1u64 << b) == 0 {
                continue;
            }
            let nab = na & g.neighbors_mask(b);
            for c in b + 1..=n {
                if nab & (1u64 << c) == 0 {
                    continue;
                }
                let nabc = nab & g.neighbors_mask(c);
                if let Some(d) = (c + 1..=n).find(|&d| nabc & (1u64 << d) != 0) {
                    return Some([a, b, c, d]);
                }
            }
        }
    }
    None
}

/// Whether some four vertices span all six edges.
pub fn contains_k4(g: &UnionGraph) -> bool {
    find_k4(g.graph()).is_some()
}

fn holds_on(g: &SimpleGraph, p: &DifferencePredicate) -> bool {
    match p {
        DifferencePredicate::CycleIn(d) => g.has_cycle_where(|len| d.contains(len)),
        DifferencePredicate::ContainsK4 => find_k4(g).is_some(),
    }
}

fn witness_on(g: &SimpleGraph, p: &DifferencePredicate) -> Option<Witness> {
    let w = match p {
        DifferencePredicate::CycleIn(d) => {
            g.simple_cycles().into_iter().find(|c| d.contains(c.len())).map(Witness::Cycle)
        }
        DifferencePredicate::ContainsK4 => find_k4(g).map(Witness::Clique4),
    }?;
    assert!(w.validates(g, p), "extracted witness failed re-validation");
    Some(w)
}

/// Whether the union of `a` and `b` satisfies `p`.
pub fn are_different(a: &HamPath, b: &HamPath, p: &DifferencePredicate) -> Result<bool> {
    check_same_order(a, b)?;
    Ok(holds_on(union_of(a, b)?.graph(), p))
}

/// A witness for `p` on the union of `a` and `b`: the shortest admissible
/// cycle (ties by vertex set, then sequence) or the first 4-clique.
pub fn find_witness(a: &HamPath, b: &HamPath, p: &DifferencePredicate) -> Result<Option<Witness>> {
    check_same_order(a, b)?;
    Ok(witness_on(union_of(a, b)?.graph(), p))
}

/// Pair evaluation from precomputed neighbour masks; skips the origin
/// bookkeeping of [`union_of`].
pub(crate) fn differ_masks(a: &[u64], b: &[u64], p: &DifferencePredicate) -> bool {
    let n = a.len() - 1;
    let adj = a.iter().zip(b).map(|(x, y)| x | y).collect();
    holds_on(&SimpleGraph::from_masks(n, adj), p)
}

/// Graph on all canonical paths of `K_n`; two paths are adjacent when they
/// are different under the predicate.
#[derive(Clone, Debug)]
pub struct CompatibilityGraph {
    n: usize,
    predicate: DifferencePredicate,
    paths: Vec<HamPath>,
    adj: Vec<Bitset>,
}

impl CompatibilityGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn predicate(&self) -> &DifferencePredicate {
        &self.predicate
    }

    pub fn paths(&self) -> &[HamPath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn adjacency(&self) -> &[Bitset] {
        &self.adj
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn index_of(&self, h: &HamPath) -> Option<usize> {
        self.paths.binary_search(h).ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Bitset::count).sum::<usize>() / 2
    }
}

/// Evaluate the predicate on every pair of canonical paths of `K_n`.
///
/// Rows are computed in parallel; the result does not depend on the schedule.
pub fn build_compat_graph(n: usize, p: &DifferencePredicate) -> Result<CompatibilityGraph> {
    if !(2..=COMPAT_LIMIT).contains(&n) {
        return Err(Error::Capacity { what: "compatibility graph", n, limit: COMPAT_LIMIT });
    }
    let paths = enumerate_paths(n)?;
    let masks: Vec<Vec<u64>> = paths.iter().map(HamPath::adjacency_masks).collect();
    let m = paths.len();
    let upper: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .map(|i| (i + 1..m).filter(|&j| differ_masks(&masks[i], &masks[j], p)).collect())
        .collect();
    let mut adj = vec![Bitset::new(m); m];
    for (i, row) in upper.iter().enumerate() {
        for &j in row {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    Ok(CompatibilityGraph { n, predicate: p.clone(), paths, adj })
}
