mod common;

use hampath_families::bounds::{eval_formula, third_cycle, Formula};
use hampath_families::search::{max_clique, DEFAULT_BUDGET};
use hampath_families::{build_compat_graph, parse_dspec, Cycle, DifferencePredicate};
use num_rational::BigRational;

#[test]
fn bipartition_and_closure_at_five() {
    assert_eq!(common::bipartition_and_closure(5).unwrap(), 1770);
}

#[test]
fn third_cycle_exhaustive_small_odd() {
    let mut rng = common::rng(7);
    let params = common::glue_parameters(9);
    assert!(params.contains(&(3, 3, 1)) && params.contains(&(9, 7, 6)));
    for (l1, l2, s) in params {
        let v = l1 + l2 - s - 1;
        let identity: Vec<_> = (1..=v as u8).collect();
        common::check_glued(l1, l2, s, &identity).unwrap();
        common::check_glued(l1, l2, s, &common::relabelling(v, &mut rng)).unwrap();
    }
}

#[test]
fn third_cycle_rejects_nested_and_identical() {
    let (c1, _, g) = common::glued_cycles(5, 3, 2, &[1, 2, 3, 4, 5]);
    assert!(third_cycle(&c1, &c1, &g).is_err());
    let other = Cycle::new(&[1, 3, 5]).unwrap();
    assert!(third_cycle(&c1, &other, &g).is_err());
}

#[test]
fn third_cycle_random_unions() {
    assert_eq!(common::random_union_instances(100, 11).unwrap(), 100);
}

fn exact(n: usize, d: &str) -> BigRational {
    let g = build_compat_graph(n, &DifferencePredicate::CycleIn(parse_dspec(d).unwrap())).unwrap();
    let r = max_clique(&g, DEFAULT_BUDGET).unwrap();
    assert!(r.is_optimal(), "n={n} {d}");
    BigRational::from_integer(r.size.into())
}

#[test]
fn formulas_bracket_solver_values() {
    for n in [5, 6] {
        for (f, d) in [(Formula::All, "all"), (Formula::PropOdd, "odd"), (Formula::Gre, "even")] {
            let t = eval_formula(f, n, None).unwrap();
            let value = exact(n, d);
            assert!(t.brackets(&value), "{} at n={n}: {value}", f.name());
        }
    }
    let prop_odd = eval_formula(Formula::PropOdd, 5, None).unwrap();
    assert_eq!(prop_odd.lower, Some(exact(5, "odd")));
}
