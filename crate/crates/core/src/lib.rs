//! Exact-arithmetic toolkit for matrix groups over commutative rings.
//!
//! The crate is organized around a handful of small, independent engines:
//!
//! - [`rings`]: the integers, modular rings `Z/m`, rings presented by
//!   structure constants over `Z`, and their finite quotients. All
//!   arithmetic is exact (arbitrary-precision integers underneath).
//! - [`matgroup`]: matrices over a ring spec, the transvection/dilation
//!   generators, the classical subgroup families (`GL`, `SL`, `UT`, `T`,
//!   `D`), and brute-force centralizer/center computations over finite
//!   rings.
//! - [`words`]: words in the generators, elementary-matrix decomposition
//!   by Euclidean row reduction, and the ordered unitriangular
//!   factorization.
//! - [`definability`]: the commutator/centralizer identities that make
//!   subgroups definable, each checked literally against exhaustive set
//!   computations over finite models.
//! - [`cohomology`]: finite abelian groups, normalized 2-cocycles,
//!   coboundary solving (brute force and Smith-normal-form), `H²`/`Ext`,
//!   and central extension construction.
//! - [`deformation`]: the twisted triangular groups obtained by deforming
//!   the torus multiplication with symmetric 2-cocycles on the unit
//!   group.
//! - [`folang`]: a parser and exhaustive evaluator for first-order
//!   formulas in the language of groups, over finite group structures.
//!
//! Everything is value-semantic and pure; scans over finite models are
//! deterministic and independent of evaluation order.

// index loops keep the simultaneous row reads/writes of the integer
// linear algebra legible
#![allow(clippy::needless_range_loop)]

pub mod cohomology;
pub mod definability;
pub mod deformation;
pub mod folang;
pub mod matgroup;
pub mod rings;
pub mod smith;
pub mod words;

/// Default seed for the randomized checks (integer-matrix decompositions).
pub const DEFAULT_SEED: u64 = 42;
