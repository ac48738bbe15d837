//! Families of Hamiltonian paths in `K_n` whose pairwise unions contain a
//! cycle of prescribed length (or a 4-clique).
//!
//! * [`model`]: canonical paths, unions of two paths, cycle enumeration and
//!   the [`DSpec`](model::DSpec) length language.
//! * [`relations`]: difference predicates, witnesses and the compatibility
//!   graph whose clique number is the maximum family size.
//! * [`search`]: exact maximum clique and bipartite matching.
//! * [`constructions`]: explicit families (greedy, bipartite, block systems,
//!   fixed endpoints, K4 tuples, `S(H)`, the `K_5` matching family).
//! * [`bounds`]: closed-form bounds in exact rationals and structural maps.
//! * [`certificate`]: pairwise verification and the certificate file format.
//! * [`cli`]: the `hamfam` command-line interface.

pub mod bitset;
pub mod bounds;
pub mod certificate;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod model;
pub mod relations;
pub mod search;

pub use error::{Error, Result};
pub use model::{canonicalize, cycle_lengths, enumerate_paths, parse_dspec, union_of, Cycle, DSpec, HamPath, Vertex};
pub use relations::{
    are_different, build_compat_graph, contains_k4, find_witness, CompatibilityGraph, DifferencePredicate, Witness,
};
