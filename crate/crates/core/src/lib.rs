//! Exact cohomology of solvable rational Lie algebras `g = u ⋊ t` and of
//! desk-scale models of Zariski dense subgroups `Γ = Δ ⋊ Z^k` in the
//! corresponding algebraic groups.
//!
//! The crate is organised bottom-up:
//!
//! - [`exactla`]: rational matrices, subspaces, eigenspaces.
//! - [`liealg`]: Lie algebras by structure constants, modules, semidirect products.
//! - [`cecoh`]: Chevalley–Eilenberg complexes, cup products, graded rings.
//! - [`grouphull`]: dense subgroup data and its certificates.
//! - [`groupcoh`]: group-side cohomology through Koszul complexes and Wang towers.
//! - [`specseq`]: filtered complexes, spectral sequence pages, the comparison checks.
//! - [`catalog`]: the example catalog, config files and verification reports.

pub mod catalog;
pub mod cecoh;
pub mod exactla;
pub mod groupcoh;
pub mod grouphull;
pub mod liealg;
pub mod specseq;

pub use exactla::{int, rat, QVec, RatMatrix, Rational, Subspace};
