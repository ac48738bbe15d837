//! Vertices, undirected Hamiltonian paths, unions of two paths and the
//! cycle-length language used to phrase difference relations.
//!
//! Vertices are labelled `1..=n`. Graphs are stored as one `u64` neighbour
//! mask per vertex, which caps the ambient order at [`MAX_ORDER`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex label in `1..=n`.
pub type Vertex = u8;

/// Largest order representable by the bitmask graphs.
pub const MAX_ORDER: usize = 63;

/// Largest `n` for which [`enumerate_paths`] will materialize all `n!/2`
/// paths (1 814 400 at `n = 10`).
pub const ENUMERATION_LIMIT: usize = 10;

#[inline]
fn bit(v: Vertex) -> u64 {
    1u64 << v
}

/// Mask of labels strictly greater than `v`.
#[inline]
fn above(v: Vertex) -> u64 {
    !((bit(v) << 1).wrapping_sub(1))
}

fn check_permutation(seq: &[Vertex]) -> Result<()> {
    let n = seq.len();
    if n < 2 {
        return Err(Error::InvalidPath(format!("need at least 2 vertices, got {n}")));
    }
    if n > MAX_ORDER {
        return Err(Error::Capacity { what: "path order", n, limit: MAX_ORDER });
    }
    let mut seen = 0u64;
    for &v in seq {
        if v == 0 || v as usize > n {
            return Err(Error::InvalidPath(format!("vertex {v} outside 1..={n}")));
        }
        if seen & bit(v) != 0 {
            return Err(Error::InvalidPath(format!("vertex {v} repeated")));
        }
        seen |= bit(v);
    }
    Ok(())
}

/// An undirected Hamiltonian path of `K_n`, stored in canonical orientation
/// (the sequence is lexicographically smaller than its reversal).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HamPath {
    seq: Vec<Vertex>,
}

/// Validate `seq` as a permutation of `1..=n` and return its canonical path.
pub fn canonicalize(seq: &[Vertex]) -> Result<HamPath> {
    check_permutation(seq)?;
    let rev: Vec<Vertex> = seq.iter().rev().copied().collect();
    let seq = if rev.as_slice() < seq { rev } else { seq.to_vec() };
    Ok(HamPath { seq })
}

impl HamPath {
    pub fn new(seq: &[Vertex]) -> Result<Self> {
        canonicalize(seq)
    }

    /// The path `(1, 2, ..., n)`.
    pub fn identity(n: usize) -> Result<Self> {
        let seq: Vec<Vertex> = (1..=n).map(|v| v as Vertex).collect();
        canonicalize(&seq)
    }

    pub fn n(&self) -> usize {
        self.seq.len()
    }

    pub fn seq(&self) -> &[Vertex] {
        &self.seq
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.seq[0], self.seq[self.seq.len() - 1])
    }

    /// Edges as `(min, max)` pairs in path order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.seq.windows(2).map(|w| ordered(w[0], w[1]))
    }

    /// Neighbour masks indexed by vertex label (`masks[0]` is unused).
    pub fn adjacency_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n() + 1];
        for w in self.seq.windows(2) {
            adj[w[0] as usize] |= bit(w[1]);
            adj[w[1] as usize] |= bit(w[0]);
        }
        adj
    }
}

impl fmt::Display for HamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.seq.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for HamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let seq = s
            .split(',')
            .map(|t| t.trim().parse::<Vertex>().map_err(|_| Error::InvalidPath(format!("bad vertex {t:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        canonicalize(&seq)
    }
}

#[inline]
pub(crate) fn ordered(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn next_permutation(seq: &mut [Vertex]) -> bool {
    let Some(i) = seq.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = seq.iter().rposition(|&x| x > seq[i]).expect("pivot has a successor");
    seq.swap(i, j);
    seq[i + 1..].reverse();
    true
}

/// All `n!/2` canonical Hamiltonian paths of `K_n` in lexicographic order.
pub fn enumerate_paths(n: usize) -> Result<Vec<HamPath>> {
    if !(2..=ENUMERATION_LIMIT).contains(&n) {
        return Err(Error::Capacity { what: "path enumeration", n, limit: ENUMERATION_LIMIT });
    }
    let total: usize = (3..=n).product();
    let mut out = Vec::with_capacity(total);
    let mut seq: Vec<Vertex> = (1..=n as Vertex).collect();
    loop {
        // first < last is equivalent to seq < reversal for distinct labels
        if seq[0] < seq[n - 1] {
            out.push(HamPath { seq: seq.clone() });
        }
        if !next_permutation(&mut seq) {
            break;
        }
    }
    Ok(out)
}

/// A simple graph on `1..=n` with bitmask adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<u64>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::Capacity { what: "graph order", n, limit: MAX_ORDER });
        }
        Ok(Self { n, adj: vec![0; n + 1] })
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut g = Self::new(n)?;
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Graph from raw neighbour masks indexed by vertex (`masks[0]` unused).
    pub(crate) fn from_masks(n: usize, adj: Vec<u64>) -> Self {
        debug_assert_eq!(adj.len(), n + 1);
        Self { n, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<()> {
        let n = self.n;
        for v in [a, b] {
            if v == 0 || v as usize > n {
                return Err(Error::InvalidParameter(format!("vertex {v} outside 1..={n}")));
            }
        }
        if a == b {
            return Err(Error::InvalidParameter(format!("self-loop at {a}")));
        }
        self.adj[a as usize] |= bit(b);
        self.adj[b as usize] |= bit(a);
        Ok(())
    }

    #[inline]
    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        (a as usize) <= self.n && (b as usize) <= self.n && self.adj[a as usize] & bit(b) != 0
    }

    #[inline]
    pub fn neighbors_mask(&self, v: Vertex) -> u64 {
        self.adj[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges as sorted `(min, max)` pairs.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for a in 1..=self.n as Vertex {
            let mut m = self.adj[a as usize] & above(a);
            while m != 0 {
                let b = m.trailing_zeros() as Vertex;
                out.push((a, b));
                m &= m - 1;
            }
        }
        out
    }

    /// Visit every simple cycle exactly once, stopping early if the visitor
    /// breaks. The visitor receives the vertex sequence starting at the
    /// cycle's smallest vertex, oriented so the second vertex is smaller than
    /// the last.
    pub fn try_for_each_cycle(&self, mut visit: impl FnMut(&[Vertex]) -> ControlFlow<()>) -> ControlFlow<()> {
        let mut stack: Vec<Vertex> = Vec::with_capacity(self.n);
        for s in 1..=self.n as Vertex {
            let higher = above(s);
            if self.adj[s as usize] & higher == 0 {
                continue;
            }
            stack.clear();
            stack.push(s);
            self.extend_cycles(s, higher, bit(s), &mut stack, &mut visit)?;
        }
        ControlFlow::Continue(())
    }

    pub fn for_each_cycle(&self, mut visit: impl FnMut(&[Vertex])) {
        let _ = self.try_for_each_cycle(|c| {
            visit(c);
            ControlFlow::Continue(())
        });
    }

    fn extend_cycles(
        &self,
        start: Vertex,
        higher: u64,
        used: u64,
        stack: &mut Vec<Vertex>,
        visit: &mut impl FnMut(&[Vertex]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let last = *stack.last().expect("non-empty stack");
        let nbrs = self.adj[last as usize];
        if stack.len() >= 3 && nbrs & bit(start) != 0 && stack[1] < last {
            visit(stack)?;
        }
        let mut next = nbrs & higher & !used;
        while next != 0 {
            let v = next.trailing_zeros() as Vertex;
            next &= next - 1;
            stack.push(v);
            let flow = self.extend_cycles(start, higher, used | bit(v), stack, visit);
            stack.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    /// Whether some simple cycle has a length accepted by `accept`.
    pub fn has_cycle_where(&self, accept: impl Fn(usize) -> bool) -> bool {
        self.try_for_each_cycle(|c| if accept(c.len()) { ControlFlow::Break(()) } else { ControlFlow::Continue(()) })
            .is_break()
    }

    /// All simple cycles, ordered by length, then vertex set, then sequence.
    pub fn simple_cycles(&self) -> Vec<Cycle> {
        let mut out = Vec::new();
        self.for_each_cycle(|c| out.push(Cycle { verts: c.to_vec() }));
        out.sort_by_cached_key(|c| (c.len(), c.vertex_set(), c.verts.clone()));
        out
    }

    /// Set of lengths of simple cycles.
    pub fn cycle_lengths(&self) -> BTreeSet<usize> {
        let mut mask = 0u64;
        self.for_each_cycle(|c| mask |= 1u64 << c.len());
        (3..64).filter(|l| mask & (1u64 << l) != 0).collect()
    }
}

/// Which of the two source paths an edge of a [`UnionGraph`] came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    FirstOnly,
    SecondOnly,
    Both,
}

/// The simple-graph union of two Hamiltonian paths on the same vertex set.
#[derive(Clone, Debug)]
pub struct UnionGraph {
    graph: SimpleGraph,
    origin: BTreeMap<(Vertex, Vertex), Origin>,
}

impl UnionGraph {
    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn origin(&self, a: Vertex, b: Vertex) -> Option<Origin> {
        self.origin.get(&ordered(a, b)).copied()
    }

    pub fn origins(&self) -> &BTreeMap<(Vertex, Vertex), Origin> {
        &self.origin
    }

    pub fn edge_count(&self) -> usize {
        self.origin.len()
    }

    pub fn cycle_lengths(&self) -> BTreeSet<usize> {
        self.graph.cycle_lengths()
    }
}

pub(crate) fn check_same_order(a: &HamPath, b: &HamPath) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::OrderMismatch { left: a.n(), right: b.n() });
    }
    Ok(())
}

/// Union of the edge sets of `a` and `b`, with per-edge origin tags.
pub fn union_of(a: &HamPath, b: &HamPath) -> Result<UnionGraph> {
    check_same_order(a, b)?;
    let mut graph = SimpleGraph::new(a.n())?;
    let mut origin = BTreeMap::new();
    for e in a.edges() {
        graph.add_edge(e.0, e.1)?;
        origin.insert(e, Origin::FirstOnly);
    }
    for e in b.edges() {
        graph.add_edge(e.0, e.1)?;
        origin.entry(e).and_modify(|o| *o = Origin::Both).or_insert(Origin::SecondOnly);
    }
    Ok(UnionGraph { graph, origin })
}

/// Lengths of all simple cycles of `g`.
pub fn cycle_lengths(g: &UnionGraph) -> BTreeSet<usize> {
    g.cycle_lengths()
}

/// A simple cycle, stored starting at its smallest vertex with the smaller
/// neighbour second.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cycle {
    verts: Vec<Vertex>,
}

impl Cycle {
    /// Normalizes rotation and direction. Needs at least 3 distinct vertices.
    pub fn new(verts: &[Vertex]) -> Result<Self> {
        if verts.len() < 3 {
            return Err(Error::InvalidParameter(format!("a cycle needs at least 3 vertices, got {}", verts.len())));
        }
        let mut seen = 0u64;
        for &v in verts {
            if v as usize > MAX_ORDER || seen & bit(v) != 0 {
                return Err(Error::InvalidParameter(format!("vertex {v} repeated or out of range")));
            }
            seen |= bit(v);
        }
        let k = verts.len();
        let p = (0..k).min_by_key(|&i| verts[i]).expect("non-empty");
        let fwd: Vec<Vertex> = (0..k).map(|i| verts[(p + i) % k]).collect();
        let verts = if fwd[1] < fwd[k - 1] {
            fwd
        } else {
            std::iter::once(fwd[0]).chain(fwd[1..].iter().rev().copied()).collect()
        };
        Ok(Self { verts })
    }

    pub fn verts(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn vertex_set(&self) -> Vec<Vertex> {
        let mut s = self.verts.clone();
        s.sort_unstable();
        s
    }

    /// Edges as `(min, max)` pairs, including the wrap-around edge.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let k = self.verts.len();
        (0..k).map(|i| ordered(self.verts[i], self.verts[(i + 1) % k])).collect()
    }

    pub fn lies_in(&self, g: &SimpleGraph) -> bool {
        self.edges().into_iter().all(|(a, b)| g.has_edge(a, b))
    }
}

/// A decidable set of admissible cycle lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DSpec {
    All,
    Odd,
    Even,
    DivisibleBy(u32),
    NotDivisibleBy(u32),
    ExplicitSet(BTreeSet<u32>),
}

impl DSpec {
    /// Membership for a cycle length. Lengths below 3 are never members.
    pub fn contains(&self, len: usize) -> bool {
        if len < 3 {
            return false;
        }
        match self {
            DSpec::All => true,
            DSpec::Odd => len % 2 == 1,
            DSpec::Even => len.is_multiple_of(2),
            DSpec::DivisibleBy(c) => len.is_multiple_of(*c as usize),
            DSpec::NotDivisibleBy(c) => !len.is_multiple_of(*c as usize),
            DSpec::ExplicitSet(s) => u32::try_from(len).is_ok_and(|l| s.contains(&l)),
        }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DSpec::All => f.write_str("all"),
            DSpec::Odd => f.write_str("odd"),
            DSpec::Even => f.write_str("even"),
            DSpec::DivisibleBy(c) => write!(f, "div={c}"),
            DSpec::NotDivisibleBy(c) => write!(f, "ndiv={c}"),
            DSpec::ExplicitSet(s) => {
                f.write_str("in=")?;
                for (i, l) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{l}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_uint(text: &str, offset: usize) -> Result<u32> {
    if text.is_empty() {
        return Err(Error::DSpecSyntax { pos: offset, msg: "expected an integer".into() });
    }
    if let Some(i) = text.find(|ch: char| !ch.is_ascii_digit()) {
        return Err(Error::DSpecSyntax { pos: offset + i, msg: "expected a digit".into() });
    }
    text.parse::<u32>().map_err(|_| Error::DSpecSyntax { pos: offset, msg: "integer too large".into() })
}

/// Parse the textual form: `all`, `odd`, `even`, `div=<c>`, `ndiv=<c>` or
/// `in=<l1,l2,...>`, with `c >= 2` and every `li >= 3`.
pub fn parse_dspec(text: &str) -> Result<DSpec> {
    let modulus = |rest: &str, offset: usize| -> Result<u32> {
        let c = parse_uint(rest, offset)?;
        if c < 2 {
            return Err(Error::DSpecSyntax { pos: offset, msg: format!("modulus must be >= 2, got {c}") });
        }
        Ok(c)
    };
    match text {
        "all" => return Ok(DSpec::All),
        "odd" => return Ok(DSpec::Odd),
        "even" => return Ok(DSpec::Even),
        _ => {}
    }
    if let Some(rest) = text.strip_prefix("div=") {
        return Ok(DSpec::DivisibleBy(modulus(rest, 4)?));
    }
    if let Some(rest) = text.strip_prefix("ndiv=") {
        return Ok(DSpec::NotDivisibleBy(modulus(rest, 5)?));
    }
    if let Some(rest) = text.strip_prefix("in=") {
        let mut set = BTreeSet::new();
        let mut offset = 3;
        for item in rest.split(',') {
            let l = parse_uint(item, offset)?;
            if l < 3 {
                return Err(Error::DSpecSyntax { pos: offset, msg: format!("cycle length must be >= 3, got {l}") });
            }
            set.insert(l);
            offset += item.len() + 1;
        }
        return Ok(DSpec::ExplicitSet(set));
    }
    Err(Error::DSpecSyntax {
        pos: 0,
        msg: format!("unknown dspec {text:?}; expected all, odd, even, div=, ndiv= or in="),
    })
}

impl FromStr for DSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_dspec(s)
    }
}
