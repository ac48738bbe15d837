//! Exact maximum clique by branch and bound, and maximum bipartite matching.
//!
//! The clique search follows the colour-bound scheme: vertices are renumbered
//! in degeneracy order, each node greedily colours its candidate set, and a
//! branch is cut as soon as `|current| + colour` cannot beat the incumbent.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::relations::CompatibilityGraph;

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(300);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    /// The search tree was exhausted; `size` is the clique number.
    Optimal,
    /// The budget ran out; `size` is only a lower bound.
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct CliqueResult {
    pub size: usize,
    /// Vertex indices of the best clique found, ascending.
    pub members: Vec<usize>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
    pub status: SearchStatus,
}

impl CliqueResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SearchStatus::Optimal
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub budget: Duration,
    /// 1 runs the deterministic sequential search; more splits the top-level
    /// branches across a rayon pool.
    pub workers: usize,
    /// A known clique to start from. Ignored unless it is a valid clique.
    pub incumbent: Vec<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, workers: 1, incumbent: Vec::new() }
    }
}

/// Clique number of the compatibility graph within `budget`, single worker.
pub fn max_clique(g: &CompatibilityGraph, budget: Duration) -> Result<CliqueResult> {
    max_clique_with(g.adjacency(), &SearchOptions { budget, ..SearchOptions::default() })
}

/// True iff `members` are distinct and pairwise adjacent.
pub fn independent_check(g: &CompatibilityGraph, members: &[usize]) -> Result<bool> {
    is_clique(g.adjacency(), members)
}

pub fn is_clique(adj: &[Bitset], members: &[usize]) -> Result<bool> {
    if let Some(&bad) = members.iter().find(|&&i| i >= adj.len()) {
        return Err(Error::IndexOutOfRange { index: bad, len: adj.len() });
    }
    let distinct: BTreeSet<usize> = members.iter().copied().collect();
    if distinct.len() != members.len() {
        return Ok(false);
    }
    Ok(members.iter().enumerate().all(|(k, &i)| members[k + 1..].iter().all(|&j| adj[i].contains(j))))
}

/// Smallest-last ordering, reversed so dense cores come first.
fn degeneracy_order(adj: &[Bitset]) -> Vec<usize> {
    let m = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Bitset::count).collect();
    let mut alive = Bitset::full(m);
    let mut removal = Vec::with_capacity(m);
    for _ in 0..m {
        let v = alive.iter().min_by_key(|&v| (degree[v], std::cmp::Reverse(v))).expect("a live vertex remains");
        alive.remove(v);
        for u in adj[v].iter() {
            if alive.contains(u) {
                degree[u] -= 1;
            }
        }
        removal.push(v);
    }
    removal.reverse();
    removal
}

/// Number of colours DSATUR uses on the whole graph; an upper bound on the
/// clique number that is often much tighter than sequential colouring.
pub fn dsatur_colour_count(adj: &[Bitset]) -> usize {
    let m = adj.len();
    let degree: Vec<usize> = adj.iter().map(Bitset::count).collect();
    let mut colour: Vec<Option<usize>> = vec![None; m];
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); m];
    let mut saturation = vec![0usize; m];
    let mut used = 0;
    for _ in 0..m {
        let v = (0..m)
            .filter(|&v| colour[v].is_none())
            .max_by_key(|&v| (saturation[v], degree[v], std::cmp::Reverse(v)))
            .expect("an uncoloured vertex remains");
        let c = (0..).find(|&c| !seen[v].get(c).copied().unwrap_or(false)).expect("unbounded range");
        colour[v] = Some(c);
        used = used.max(c + 1);
        for u in adj[v].iter() {
            if colour[u].is_some() {
                continue;
            }
            let s = &mut seen[u];
            if s.len() <= c {
                s.resize(c + 1, false);
            }
            if !s[c] {
                s[c] = true;
                saturation[u] += 1;
            }
        }
    }
    used
}

struct Shared {
    adj: Vec<Bitset>,
    /// Stop as soon as the incumbent reaches this size.
    ceiling: usize,
    proven: AtomicBool,
    best_size: AtomicUsize,
    best: Mutex<Vec<usize>>,
    nodes: AtomicU64,
    timed_out: AtomicBool,
    start: Instant,
    budget: Duration,
}

impl Shared {
    fn halted(&self) -> bool {
        self.timed_out.load(Ordering::Relaxed) || self.proven.load(Ordering::Relaxed)
    }

    fn out_of_time(&self) -> bool {
        if self.halted() {
            return true;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n.is_multiple_of(1024) && self.start.elapsed() > self.budget {
            self.timed_out.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }

    fn offer(&self, clique: &[usize]) {
        let mut best = self.best.lock().expect("incumbent lock");
        if clique.len() > best.len() {
            *best = clique.to_vec();
            self.best_size.fetch_max(clique.len(), Ordering::SeqCst);
            if clique.len() >= self.ceiling {
                self.proven.store(true, Ordering::SeqCst);
            }
        }
    }

    /// Greedy sequential colouring in index order. Returns vertices sorted by
    /// colour with their colour numbers.
    fn colour(&self, candidates: &Bitset) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(candidates.count());
        let mut uncoloured = candidates.clone();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                q.difference_with(&self.adj[v]);
                uncoloured.remove(v);
                out.push((v, colour));
            }
        }
        out
    }

    fn expand(&self, current: &mut Vec<usize>, mut candidates: Bitset) {
        if self.out_of_time() {
            return;
        }
        let order = self.colour(&candidates);
        for &(v, colour) in order.iter().rev() {
            if current.len() + colour <= self.best_size.load(Ordering::Relaxed) {
                return;
            }
            current.push(v);
            let next = candidates.intersection(&self.adj[v]);
            if next.is_empty() {
                if current.len() > self.best_size.load(Ordering::Relaxed) {
                    self.offer(current);
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            if self.halted() {
                return;
            }
            candidates.remove(v);
        }
    }
}

/// Branch-and-bound maximum clique over an arbitrary symmetric adjacency.
pub fn max_clique_with(adj: &[Bitset], opts: &SearchOptions) -> Result<CliqueResult> {
    if opts.budget.is_zero() {
        return Err(Error::InvalidParameter("time budget must be positive".into()));
    }
    let start = Instant::now();
    let m = adj.len();
    let order = degeneracy_order(adj);
    let mut position = vec![0; m];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    let relabelled: Vec<Bitset> = order
        .iter()
        .map(|&v| {
            let mut row = Bitset::new(m);
            for u in adj[v].iter() {
                row.insert(position[u]);
            }
            row
        })
        .collect();

    let mut incumbent: Vec<usize> = if is_clique(adj, &opts.incumbent)? {
        opts.incumbent.iter().map(|&v| position[v]).collect()
    } else {
        Vec::new()
    };
    // greedy clique from the dense core, so an exhausted budget still reports something
    let mut greedy: Vec<usize> = Vec::new();
    for (v, row) in relabelled.iter().enumerate() {
        if greedy.iter().all(|&u| row.contains(u)) {
            greedy.push(v);
        }
    }
    if greedy.len() > incumbent.len() {
        incumbent = greedy;
    }
    let ceiling = dsatur_colour_count(adj);
    let shared = Shared {
        adj: relabelled,
        proven: AtomicBool::new(incumbent.len() >= ceiling),
        ceiling,
        best_size: AtomicUsize::new(incumbent.len()),
        best: Mutex::new(incumbent),
        nodes: AtomicU64::new(0),
        timed_out: AtomicBool::new(false),
        start,
        budget: opts.budget,
    };

    if m > 0 {
        if opts.workers <= 1 {
            shared.expand(&mut Vec::new(), Bitset::full(m));
        } else {
            // Top-level branch k sees only the vertices coloured before it,
            // exactly as in the sequential loop, so branches are independent.
            let top = shared.colour(&Bitset::full(m));
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(opts.workers)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(|| {
                (0..top.len()).into_par_iter().rev().for_each(|k| {
                    let (v, colour) = top[k];
                    if shared.halted() || colour <= shared.best_size.load(Ordering::Relaxed) {
                        return;
                    }
                    let mut earlier = Bitset::new(m);
                    for &(u, _) in &top[..k] {
                        earlier.insert(u);
                    }
                    let next = earlier.intersection(&shared.adj[v]);
                    let mut current = vec![v];
                    if next.is_empty() {
                        shared.offer(&current);
                    } else {
                        shared.expand(&mut current, next);
                    }
                });
            });
        }
    }

    let mut members: Vec<usize> =
        shared.best.into_inner().expect("incumbent lock").into_iter().map(|p| order[p]).collect();
    members.sort_unstable();
    assert!(is_clique(adj, &members)?, "search returned a non-clique");
    Ok(CliqueResult {
        size: members.len(),
        members,
        nodes_explored: shared.nodes.into_inner(),
        elapsed: start.elapsed(),
        status: if shared.timed_out.into_inner() && !shared.proven.into_inner() {
            SearchStatus::BudgetExhausted
        } else {
            SearchStatus::Optimal
        },
    })
}

/// Bipartite graph with left vertices `0..left` and right vertices `0..right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (l, r) in edges {
            if l >= left {
                return Err(Error::IndexOutOfRange { index: l, len: left });
            }
            if r >= right {
                return Err(Error::IndexOutOfRange { index: r, len: right });
            }
            if !set.insert((l, r)) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({l}, {r})")));
            }
        }
        Ok(Self { left, right, edges: set })
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn left_degree(&self, l: usize) -> usize {
        self.edges.range((l, 0)..(l + 1, 0)).count()
    }

    pub fn right_degree(&self, r: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == r).count()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.left];
        for &(l, r) in &self.edges {
            adj[l].push(r);
        }
        adj
    }
}

fn augment(l: usize, adj: &[Vec<usize>], seen: &mut [bool], match_right: &mut [Option<usize>]) -> bool {
    for &r in &adj[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        if match_right[r].is_none_or(|l2| augment(l2, adj, seen, match_right)) {
            match_right[r] = Some(l);
            return true;
        }
    }
    false
}

/// Maximum-cardinality matching by repeated augmenting paths, returned as
/// `(left, right)` pairs sorted by left index.
pub fn max_matching(g: &BipartiteGraph) -> Vec<(usize, usize)> {
    let adj = g.adjacency();
    let mut match_right: Vec<Option<usize>> = vec![None; g.right];
    for l in 0..g.left {
        let mut seen = vec![false; g.right];
        augment(l, &adj, &mut seen, &mut match_right);
    }
    let mut pairs: Vec<(usize, usize)> =
        match_right.iter().enumerate().filter_map(|(r, l)| l.map(|l| (l, r))).collect();
    pairs.sort_unstable();
    pairs
}

/// Whether an augmenting path exists for `matching` (so it is not maximum).
pub fn has_augmenting_path(g: &BipartiteGraph, matching: &[(usize, usize)]) -> bool {
    let adj = g.adjacency();
    let mut match_right: Vec<Option<usize>> = vec![None; g.right];
    let mut matched_left = vec![false; g.left];
    for &(l, r) in matching {
        match_right[r] = Some(l);
        matched_left[l] = true;
    }
    let mut seen = vec![false; g.right];
    (0..g.left).filter(|&l| !matched_left[l]).any(|l| augment(l, &adj, &mut seen, &mut match_right.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_dspec;
    use crate::relations::{build_compat_graph, DifferencePredicate};

    fn cyc(s: &str) -> DifferencePredicate {
        DifferencePredicate::CycleIn(parse_dspec(s).unwrap())
    }

    fn solve(n: usize, d: &str) -> CliqueResult {
        let g = build_compat_graph(n, &cyc(d)).unwrap();
        max_clique(&g, DEFAULT_BUDGET).unwrap()
    }

    /// Exhaustive subset search; only usable for tiny graphs.
    fn clique_number_by_subsets(adj: &[Bitset]) -> usize {
        let m = adj.len();
        assert!(m <= 20);
        (0u32..1 << m)
            .filter(|mask| {
                let vs: Vec<usize> = (0..m).filter(|&v| mask & (1 << v) != 0).collect();
                is_clique(adj, &vs).unwrap()
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn complete_graphs_are_fully_taken() {
        for n in 4..=5 {
            let r = solve(n, "all");
            assert_eq!(r.size, (1..=n).product::<usize>() / 2);
            assert!(r.is_optimal());
        }
    }

    #[test]
    fn odd_and_triangle_at_five() {
        assert_eq!(solve(5, "odd").size, 10);
        assert_eq!(solve(5, "in=3").size, 10);
    }

    #[test]
    fn matches_subset_oracle_at_four() {
        for d in ["in=3", "odd", "even", "in=4", "all"] {
            let g = build_compat_graph(4, &cyc(d)).unwrap();
            let r = max_clique(&g, DEFAULT_BUDGET).unwrap();
            assert_eq!(r.size, clique_number_by_subsets(g.adjacency()), "dspec {d}");
        }
    }

    #[test]
    fn result_is_maximal_and_incumbent_cannot_improve() {
        let g = build_compat_graph(5, &cyc("even")).unwrap();
        let r = max_clique(&g, DEFAULT_BUDGET).unwrap();
        assert!(independent_check(&g, &r.members).unwrap());
        for v in 0..g.len() {
            if !r.members.contains(&v) {
                assert!(!r.members.iter().all(|&u| g.adjacent(u, v)));
            }
        }
        let again =
            max_clique_with(g.adjacency(), &SearchOptions { incumbent: r.members.clone(), ..SearchOptions::default() })
                .unwrap();
        assert_eq!(again.size, r.size);
        assert!(again.is_optimal());
    }

    #[test]
    fn parallel_agrees_with_sequential() {
        for d in ["even", "in=3", "in=4", "div=3"] {
            let g = build_compat_graph(5, &cyc(d)).unwrap();
            let seq = max_clique(&g, DEFAULT_BUDGET).unwrap();
            let par =
                max_clique_with(g.adjacency(), &SearchOptions { workers: 4, ..SearchOptions::default() }).unwrap();
            assert_eq!(seq.size, par.size, "dspec {d}");
            assert!(independent_check(&g, &par.members).unwrap());
        }
    }

    #[test]
    fn deterministic_single_worker() {
        let a = solve(5, "even");
        let b = solve(5, "even");
        assert_eq!(a.members, b.members);
        assert_eq!(a.nodes_explored, b.nodes_explored);
    }

    #[test]
    fn monotone_in_dspec() {
        assert!(solve(5, "in=3").size <= solve(5, "odd").size);
        assert!(solve(5, "even").size <= solve(5, "all").size);
    }

    #[test]
    fn zero_budget_is_rejected() {
        let g = build_compat_graph(4, &cyc("all")).unwrap();
        assert!(max_clique(&g, Duration::ZERO).is_err());
    }

    #[test]
    fn tiny_budget_reports_lower_bound() {
        let g = build_compat_graph(6, &cyc("div=3")).unwrap();
        let r = max_clique(&g, Duration::from_nanos(1)).unwrap();
        assert_eq!(r.status, SearchStatus::BudgetExhausted);
        assert!(r.size >= 2);
        assert!(independent_check(&g, &r.members).unwrap());
    }

    #[test]
    fn dsatur_bounds_clique_number() {
        for d in ["in=3", "odd", "even", "in=4", "all"] {
            let g = build_compat_graph(4, &cyc(d)).unwrap();
            assert!(dsatur_colour_count(g.adjacency()) >= clique_number_by_subsets(g.adjacency()));
        }
        assert_eq!(dsatur_colour_count(&[]), 0);
    }

    #[test]
    fn even_at_six_is_proven() {
        let r = solve(6, "even");
        assert_eq!(r.size, 90);
        assert!(r.is_optimal());
    }

    #[test]
    fn independent_check_edge_cases() {
        let g = build_compat_graph(4, &cyc("all")).unwrap();
        assert!(independent_check(&g, &[0, 1, 2]).unwrap());
        assert!(!independent_check(&g, &[0, 0]).unwrap());
        assert!(independent_check(&g, &[0, 99]).is_err());
    }

    fn matching_by_exhaustion(g: &BipartiteGraph) -> usize {
        fn best(l: usize, g: &BipartiteGraph, used: &mut Vec<bool>) -> usize {
            if l == g.left_count() {
                return 0;
            }
            let mut top = best(l + 1, g, used);
            for &(a, r) in g.edges() {
                if a == l && !used[r] {
                    used[r] = true;
                    top = top.max(1 + best(l + 1, g, used));
                    used[r] = false;
                }
            }
            top
        }
        best(0, g, &mut vec![false; g.right_count()])
    }

    #[test]
    fn matching_examples() {
        let empty = BipartiteGraph::new(3, 3, []).unwrap();
        assert!(max_matching(&empty).is_empty());
        let k33 = BipartiteGraph::new(3, 3, (0..3).flat_map(|l| (0..3).map(move |r| (l, r)))).unwrap();
        assert_eq!(max_matching(&k33).len(), 3);
        assert!(BipartiteGraph::new(2, 2, [(0, 2)]).is_err());
        assert!(BipartiteGraph::new(2, 2, [(0, 1), (0, 1)]).is_err());
    }

    #[test]
    fn matching_against_exhaustive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let left = rng.gen_range(0..=12);
            let right = rng.gen_range(0..=10);
            let density = rng.gen_range(0.0..0.6);
            let edges: Vec<(usize, usize)> =
                (0..left).flat_map(|l| (0..right).map(move |r| (l, r))).filter(|_| rng.gen_bool(density)).collect();
            let g = BipartiteGraph::new(left, right, edges).unwrap();
            let m = max_matching(&g);
            assert_eq!(m.len(), matching_by_exhaustion(&g));
            assert!(!has_augmenting_path(&g, &m));
            let lefts: BTreeSet<_> = m.iter().map(|e| e.0).collect();
            let rights: BTreeSet<_> = m.iter().map(|e| e.1).collect();
            assert_eq!(lefts.len(), m.len());
            assert_eq!(rights.len(), m.len());
            assert!(m.iter().all(|e| g.edges().contains(e)));
        }
    }
}
