//! Combinatorial toolkit for homological Nielsen realization on `#_n CP^2`.
//!
//! The isometry group of the intersection form of `#_n CP^2` is the group
//! `O(n, Z)` of signed permutation matrices. This crate decides, certifies and
//! statistically measures which isometries and subgroups lift to finite groups
//! of diffeomorphisms:
//!
//! - [`signed_perm`]: exact algebra of signed permutations and their conjugacy
//!   invariants (cycle types with sign parities).
//! - [`subspaces`]: subgroups of the diagonal `(Z/2)^n`, echelon-form
//!   subspaces of `F_2^n`, Gaussian-binomial counting and the diagonal
//!   realizability verdict.
//! - [`cp2_trees`]: connect-sum trees of `CP^2` copies with trivial/hinge
//!   edges, sign-character propagation, the rank <= 2 realization algorithm
//!   and the exhaustive rank-3 catalog.
//! - [`fixed_points`]: representation invariants of prime-order actions,
//!   fixed-set feasibility and involution signature balance.
//! - [`gsig`]: exact signature defects over cyclotomic fields and the
//!   G-signature balance identity for linear `CP^2` actions.
//! - [`ht`]: obstruction suite for odd-order cycle types and a bounded
//!   constructive search for standard-linear realization certificates.
//! - [`group_verdicts`]: verdict rules for explicit small groups, abelian
//!   subgroups at odd n, 2-group generator bounds and symmetric subgroups.
//! - [`counting`]: generating-function tables, partition tables and the
//!   subgroup-counting bounds.
//! - [`samplers`]: exact-distribution random generators for odd-order
//!   permutations, subspaces and constrained odd partitions.
//! - [`oracle`]: brute-force ground truth for small instances.

pub mod counting;
pub mod cp2_trees;
pub mod error;
pub mod fixed_points;
pub mod group_verdicts;
pub mod gsig;
pub mod ht;
pub mod oracle;
pub mod samplers;
pub mod signed_perm;
pub mod subspaces;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::{RuleWitness, Status};
