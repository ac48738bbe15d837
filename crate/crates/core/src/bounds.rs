//! Closed-form bounds in exact rational arithmetic, plus the structural maps
//! behind the upper-bound arguments: position-parity bipartition, Hamilton
//! cycle closure, the third cycle of two cycles sharing a path, and
//! Hamiltonian path counts of complete multipartite graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::model::{ordered, Cycle, HamPath, SimpleGraph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// Every pair of distinct paths: `n!/2`.
    All,
    /// Odd-cycle-different families: number of almost balanced bipartitions.
    PropOdd,
    /// Even-cycle-different families: greedy lower bound and closure / S(H) upper bound.
    Gre,
    /// `cN`-cycle-different families from block permutations: `(n/c)!`.
    More,
    /// Not-divisible families with the first block fixed: `(n/c - 1)!`.
    NotMore,
    /// Fixed-endpoint families: `n! / (2 * C(n,2))`.
    FixedEndpoint,
    /// K4-different families: `2^(n/4) <= M <= (n+1)^2 (3/2)^(n-1)`.
    K4,
    /// Intermediate K4 upper bound from bipartitions: `C(n, n/2) / 2`.
    K4Bipartite,
    /// Intermediate K4 upper bound from tripartitions.
    K4Tripartite,
}

impl Formula {
    pub const ALL: [Formula; 9] = [
        Formula::All,
        Formula::PropOdd,
        Formula::Gre,
        Formula::More,
        Formula::NotMore,
        Formula::FixedEndpoint,
        Formula::K4,
        Formula::K4Bipartite,
        Formula::K4Tripartite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formula::All => "all",
            Formula::PropOdd => "prop_odd",
            Formula::Gre => "gre",
            Formula::More => "more",
            Formula::NotMore => "notmore",
            Formula::FixedEndpoint => "fixed_endpoint",
            Formula::K4 => "k4",
            Formula::K4Bipartite => "k4_bipartite",
            Formula::K4Tripartite => "k4_tripartite",
        }
    }

    fn needs_c(self) -> bool {
        matches!(self, Formula::More | Formula::NotMore)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Formula::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown formula {s:?}")))
    }
}

/// One evaluated bound. Exact values have `lower == upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaTable {
    pub name: Formula,
    pub n: usize,
    pub c: Option<usize>,
    pub lower: Option<BigRational>,
    pub upper: Option<BigRational>,
}

impl FormulaTable {
    /// Whether `value` lies within the stated bounds.
    pub fn brackets(&self, value: &BigRational) -> bool {
        self.lower.as_ref().is_none_or(|l| l <= value) && self.upper.as_ref().is_none_or(|u| value <= u)
    }
}

fn int(v: u64) -> BigInt {
    BigInt::from(v)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n as u64).map(int).product()
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * int((n - i) as u64) / int((i + 1) as u64);
    }
    acc
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn whole(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

/// Closed form of the blocked set size: paths `H'` (including `H`) whose
/// union with `H` has no even cycle.
pub fn hbar_size(n: usize) -> u64 {
    let half_up = n.div_ceil(2);
    let pairs = |k: usize| (k * (k - 1) / 2) as u64;
    if n % 2 == 1 {
        (n as u64 - 3) + pairs(half_up + 1)
    } else {
        pairs(n / 2 + 1)
    }
}

/// `[(n/3)!]^3 * 3 * 2^(n-1) / (n+1)^2`, the lower estimate for the number
/// of Hamiltonian paths in a balanced complete tripartite graph.
pub fn tripartite_path_lower_bound(n: usize) -> Result<BigRational> {
    if n == 0 || !n.is_multiple_of(3) {
        return Err(Error::InvalidParameter(format!("tripartite bound needs 3 | n, got n = {n}")));
    }
    let f = factorial(n / 3);
    let num = &f * &f * &f * int(3) * Pow::pow(int(2), (n - 1) as u32);
    Ok(ratio(num, int(((n + 1) * (n + 1)) as u64)))
}

fn invalid(f: Formula, why: impl fmt::Display) -> Error {
    Error::InvalidParameter(format!("{f}: {why}"))
}

/// Evaluate one named bound at `n` (and `c` where the formula uses it).
pub fn eval_formula(name: Formula, n: usize, c: Option<usize>) -> Result<FormulaTable> {
    if n < 2 {
        return Err(invalid(name, format!("n must be >= 2, got {n}")));
    }
    let nf = || factorial(n);
    let exact = |v: BigRational| (Some(v.clone()), Some(v));
    let (lower, upper) = match name {
        Formula::All => exact(ratio(nf(), int(2))),
        Formula::PropOdd => {
            if n % 2 == 1 {
                exact(whole(binomial(n, n / 2)))
            } else {
                exact(ratio(binomial(n, n / 2), int(2)))
            }
        }
        Formula::Gre => {
            if n < 3 {
                return Err(invalid(name, "n must be >= 3"));
            }
            if n % 2 == 1 {
                (Some(ratio(nf(), int(2 * hbar_size(n)))), Some(ratio(nf(), int(2 * n as u64))))
            } else {
                (Some(ratio(nf(), int(2 * hbar_size(n)))), Some(ratio(nf(), int(8))))
            }
        }
        Formula::More => {
            let c = c.ok_or_else(|| invalid(name, "needs c"))?;
            if c < 2 || !n.is_multiple_of(c) {
                return Err(invalid(name, format!("needs c >= 2 with c | n, got n = {n}, c = {c}")));
            }
            (Some(whole(factorial(n / c))), None)
        }
        Formula::NotMore => {
            let c = c.ok_or_else(|| invalid(name, "needs c"))?;
            if c < 3 || !n.is_multiple_of(c) {
                return Err(invalid(name, format!("needs c >= 3 with c | n, got n = {n}, c = {c}")));
            }
            (Some(whole(factorial(n / c - 1))), None)
        }
        Formula::FixedEndpoint => {
            if let Some(c) = c {
                if matches!(c, 0 | 1 | 2 | 4) {
                    return Err(invalid(name, format!("c = {c} is excluded")));
                }
            }
            (Some(ratio(nf(), int(2) * binomial(n, 2))), None)
        }
        Formula::K4 => {
            if !n.is_multiple_of(4) {
                return Err(invalid(name, format!("needs 4 | n, got {n}")));
            }
            let lower = whole(Pow::pow(int(2), (n / 4) as u32));
            let upper = ratio(
                int(((n + 1) * (n + 1)) as u64) * Pow::pow(int(3), (n - 1) as u32),
                Pow::pow(int(2), (n - 1) as u32),
            );
            (Some(lower), Some(upper))
        }
        Formula::K4Bipartite => {
            if !n.is_multiple_of(2) {
                return Err(invalid(name, format!("needs even n, got {n}")));
            }
            (None, Some(ratio(binomial(n, n / 2), int(2))))
        }
        Formula::K4Tripartite => {
            let per_part =
                tripartite_path_lower_bound(n).map_err(|_| invalid(name, format!("needs 3 | n, got {n}")))?;
            (None, Some(whole(nf()) / (whole(int(2)) * per_part)))
        }
    };
    Ok(FormulaTable { name, n, c: if name.needs_c() { c } else { None }, lower, upper })
}

/// Every formula whose parameter conditions hold at `(n, c)`.
pub fn applicable_formulas(n: usize, c: Option<usize>) -> Vec<FormulaTable> {
    Formula::ALL.into_iter().filter_map(|f| eval_formula(f, n, c).ok()).collect()
}

/// Render a rational as `p` or `p/q`.
pub fn render_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// The almost balanced bipartition a path lies in: vertices at odd positions
/// versus even positions. The part containing vertex 1 comes first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bipartition(pub BTreeSet<Vertex>, pub BTreeSet<Vertex>);

pub fn bipartition_of_path(h: &HamPath) -> Bipartition {
    let (odd, even): (Vec<_>, Vec<_>) = h.seq().iter().enumerate().partition(|(i, _)| i % 2 == 0);
    let odd: BTreeSet<Vertex> = odd.into_iter().map(|(_, &v)| v).collect();
    let even: BTreeSet<Vertex> = even.into_iter().map(|(_, &v)| v).collect();
    if odd.contains(&1) {
        Bipartition(odd, even)
    } else {
        Bipartition(even, odd)
    }
}

/// Edge set of the Hamiltonian cycle obtained by joining the endpoints.
pub fn ham_cycle_closure(h: &HamPath) -> BTreeSet<(Vertex, Vertex)> {
    let (a, b) = h.endpoints();
    h.edges().chain(std::iter::once(ordered(a, b))).collect()
}

/// Given two cycles of `g` whose common part is a single path with at least
/// one edge, return the cycle formed by the remaining edges of both. Its
/// length is `l1 + l2 - 2s`.
pub fn third_cycle(c1: &Cycle, c2: &Cycle, g: &SimpleGraph) -> Result<Cycle> {
    for c in [c1, c2] {
        if !c.lies_in(g) {
            return Err(Error::Precondition(format!("cycle {:?} is not in the graph", c.verts())));
        }
    }
    let e1: BTreeSet<_> = c1.edges().into_iter().collect();
    let e2: BTreeSet<_> = c2.edges().into_iter().collect();
    let shared: BTreeSet<_> = e1.intersection(&e2).copied().collect();
    if shared.is_empty() {
        return Err(Error::Precondition("cycles share no edge".into()));
    }
    if shared.len() == e1.len() || shared.len() == e2.len() {
        return Err(Error::Precondition("one cycle contains the other".into()));
    }
    // The shared edges must form one path, and the cycles must meet only on it.
    let mut degree: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &(a, b) in &shared {
        *degree.entry(a).or_default() += 1;
        *degree.entry(b).or_default() += 1;
    }
    let ends = degree.values().filter(|&&d| d == 1).count();
    let path_verts: BTreeSet<Vertex> = degree.keys().copied().collect();
    let v1: BTreeSet<Vertex> = c1.verts().iter().copied().collect();
    let v2: BTreeSet<Vertex> = c2.verts().iter().copied().collect();
    let common: BTreeSet<Vertex> = v1.intersection(&v2).copied().collect();
    if ends != 2 || path_verts.len() != shared.len() + 1 || common != path_verts {
        return Err(Error::Precondition("cycles do not share a unique path".into()));
    }
    let rest: Vec<(Vertex, Vertex)> = e1.symmetric_difference(&e2).copied().collect();
    let start = rest[0].0;
    let mut seq = vec![start];
    let mut prev = None;
    let mut cur = start;
    loop {
        let next = rest
            .iter()
            .filter_map(|&(a, b)| match (a == cur, b == cur) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .find(|&v| Some(v) != prev)
            .ok_or_else(|| Error::Precondition("remaining edges do not close a cycle".into()))?;
        if next == start {
            break;
        }
        seq.push(next);
        prev = Some(cur);
        cur = next;
    }
    let out = Cycle::new(&seq)?;
    debug_assert_eq!(out.len(), c1.len() + c2.len() - 2 * shared.len());
    Ok(out)
}

/// Largest total part size accepted by [`count_multipartite_ham_paths`].
pub const MULTIPARTITE_LIMIT: usize = 18;

/// Number of undirected Hamiltonian paths of the complete multipartite graph
/// with the given part sizes, by dynamic programming over vertex subsets.
pub fn count_multipartite_ham_paths(part_sizes: &[usize]) -> Result<u64> {
    let n: usize = part_sizes.iter().sum();
    if n > MULTIPARTITE_LIMIT {
        return Err(Error::Capacity { what: "multipartite path count", n, limit: MULTIPARTITE_LIMIT });
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 vertices, got {n}")));
    }
    let part: Vec<usize> = part_sizes.iter().enumerate().flat_map(|(p, &k)| std::iter::repeat_n(p, k)).collect();
    let full = (1usize << n) - 1;
    // ways[mask * n + last]: directed paths covering `mask` ending at `last`
    let mut ways = vec![0u64; (full + 1) * n];
    for v in 0..n {
        ways[(1 << v) * n + v] = 1;
    }
    for mask in 1..=full {
        for last in 0..n {
            let w = ways[mask * n + last];
            if w == 0 {
                continue;
            }
            for next in 0..n {
                if mask & (1 << next) == 0 && part[next] != part[last] {
                    ways[(mask | 1 << next) * n + next] += w;
                }
            }
        }
    }
    let directed: u64 = (0..n).map(|v| ways[full * n + v]).sum();
    Ok(directed / 2)
}

/// Number of distinct letter-count types among ternary strings of length `n`.
pub fn string_type_count(n: usize) -> u64 {
    (0..=n).map(|a| (0..=n - a).count() as u64).sum()
}
