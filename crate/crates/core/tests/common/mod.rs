#![allow(dead_code)]

use std::collections::BTreeSet;

use hampath_families::bounds::{bipartition_of_path, ham_cycle_closure, third_cycle};
use hampath_families::model::SimpleGraph;
use hampath_families::{enumerate_paths, union_of, Cycle, Vertex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two cycles of lengths `l1`, `l2` glued along a path with `s` edges,
/// vertex labels scrambled by `relabel` (a permutation of 1..=v).
pub fn glued_cycles(l1: usize, l2: usize, s: usize, relabel: &[Vertex]) -> (Cycle, Cycle, SimpleGraph) {
    let v = l1 + l2 - s - 1;
    assert_eq!(relabel.len(), v);
    let label = |i: usize| relabel[i];
    let shared: Vec<usize> = (0..=s).collect();
    let arc1: Vec<usize> = (s + 1..l1).collect();
    let arc2: Vec<usize> = (l1..v).collect();
    let c1: Vec<Vertex> = shared.iter().chain(arc1.iter().rev()).map(|&i| label(i)).collect();
    let c2: Vec<Vertex> = shared.iter().chain(arc2.iter().rev()).map(|&i| label(i)).collect();
    let (c1, c2) = (Cycle::new(&c1).unwrap(), Cycle::new(&c2).unwrap());
    let g = SimpleGraph::from_edges(v, c1.edges().into_iter().chain(c2.edges())).unwrap();
    (c1, c2, g)
}

/// Every (l1, l2, s) with odd lengths up to `max_len` for which the glued
/// graph is simple.
pub fn glue_parameters(max_len: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for l1 in (3..=max_len).step_by(2) {
        for l2 in (3..=max_len).step_by(2) {
            for s in 1..l1.min(l2) {
                if !(s == l1 - 1 && s == l2 - 1) {
                    out.push((l1, l2, s));
                }
            }
        }
    }
    out
}

/// Checks the glued instance; returns the output length.
pub fn check_glued(l1: usize, l2: usize, s: usize, relabel: &[Vertex]) -> Result<usize, String> {
    let (c1, c2, g) = glued_cycles(l1, l2, s, relabel);
    let t = third_cycle(&c1, &c2, &g).map_err(|e| format!("({l1},{l2},{s}): {e}"))?;
    if t.len() != l1 + l2 - 2 * s || !t.lies_in(&g) || t.len() % 2 != 0 {
        return Err(format!("({l1},{l2},{s}): got length {}", t.len()));
    }
    Ok(t.len())
}

fn edge_set(c: &Cycle) -> BTreeSet<(Vertex, Vertex)> {
    c.edges().into_iter().collect()
}

/// Independent test of whether two cycles meet in exactly one path with at
/// least one edge and are not nested.
pub fn share_unique_path(c1: &Cycle, c2: &Cycle) -> bool {
    let (e1, e2) = (edge_set(c1), edge_set(c2));
    let shared: BTreeSet<_> = e1.intersection(&e2).copied().collect();
    let on_shared: BTreeSet<Vertex> = shared.iter().flat_map(|&(a, b)| [a, b]).collect();
    let v1: BTreeSet<Vertex> = c1.verts().iter().copied().collect();
    let v2: BTreeSet<Vertex> = c2.verts().iter().copied().collect();
    let common: BTreeSet<Vertex> = v1.intersection(&v2).copied().collect();
    !shared.is_empty()
        && shared.len() < e1.len().min(e2.len())
        && common == on_shared
        && shared.len() + 1 == common.len()
}

/// Pairs of odd cycles sharing a unique path inside unions of random path
/// pairs. Returns the number of instances checked.
pub fn random_union_instances(want: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut rounds = 0;
    while checked < want {
        rounds += 1;
        if rounds > 10_000 {
            return Err(format!("only {checked} instances found"));
        }
        let n = [6usize, 7, 8, 9].choose(&mut rng).copied().unwrap();
        let mut seq: Vec<Vertex> = (1..=n as Vertex).collect();
        seq.shuffle(&mut rng);
        let a = hampath_families::HamPath::new(&seq).unwrap();
        seq.shuffle(&mut rng);
        let b = hampath_families::HamPath::new(&seq).unwrap();
        let u = union_of(&a, &b).unwrap();
        let odd: Vec<Cycle> = u.graph().simple_cycles().into_iter().filter(|c| c.len() % 2 == 1).collect();
        let mut pairs: Vec<(usize, usize)> =
            (0..odd.len()).flat_map(|i| (i + 1..odd.len()).map(move |j| (i, j))).collect();
        pairs.shuffle(&mut rng);
        // a few pairs per union keeps the sample spread out
        for (i, j) in pairs.into_iter().take(3) {
            let (c1, c2) = (&odd[i], &odd[j]);
            let expected = share_unique_path(c1, c2);
            match third_cycle(c1, c2, u.graph()) {
                Ok(t) => {
                    if !expected {
                        return Err(format!("accepted {:?} / {:?}", c1.verts(), c2.verts()));
                    }
                    let sym: BTreeSet<_> = edge_set(c1).symmetric_difference(&edge_set(c2)).copied().collect();
                    if t.len() % 2 != 0 || edge_set(&t) != sym || !t.lies_in(u.graph()) {
                        return Err(format!("bad third cycle {:?}", t.verts()));
                    }
                    checked += 1;
                }
                Err(_) if expected => return Err(format!("rejected {:?} / {:?}", c1.verts(), c2.verts())),
                Err(_) => {}
            }
            if checked == want {
                break;
            }
        }
    }
    Ok(checked)
}

/// Over all pairs of distinct paths of order `n` (odd): equal bipartition
/// iff the union has no odd cycle, and equal closure implies no even cycle.
/// Returns the number of pairs checked.
pub fn bipartition_and_closure(n: usize) -> Result<usize, String> {
    let paths = enumerate_paths(n).map_err(|e| e.to_string())?;
    let bip: Vec<_> = paths.iter().map(bipartition_of_path).collect();
    let clo: Vec<_> = paths.iter().map(ham_cycle_closure).collect();
    let mut pairs = 0;
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            let lens = union_of(&paths[i], &paths[j]).unwrap().cycle_lengths();
            let has_odd = lens.iter().any(|l| l % 2 == 1);
            let has_even = lens.iter().any(|l| l % 2 == 0);
            if (bip[i] == bip[j]) == has_odd {
                return Err(format!("bipartition mismatch at {} / {}: {lens:?}", paths[i], paths[j]));
            }
            if clo[i] == clo[j] && has_even {
                return Err(format!("closure mismatch at {} / {}: {lens:?}", paths[i], paths[j]));
            }
            pairs += 1;
        }
    }
    Ok(pairs)
}

pub fn relabelling(v: usize, rng: &mut ChaCha8Rng) -> Vec<Vertex> {
    let mut r: Vec<Vertex> = (1..=v as Vertex).collect();
    r.shuffle(rng);
    r
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
