//! Straight thin combings on finite balls of Cayley graphs, coned-off graphs
//! and trees of spaces.
//!
//! The crate is `no_std` (it only needs `alloc`). Everything here is a pure
//! function of immutable inputs; IO, configuration files and report writing
//! live in the companion `thincomb` crate.
//!
//! Layout, bottom-up:
//!
//! * [`group`]: canonical forms for free, free abelian, C'(1/6) small
//!   cancellation groups and graphs of groups, plus cyclic coset identification.
//! * [`graph`]: finite graphs with a base vertex, Cayley balls, shortlex
//!   geodesic combings, fineness and hyperbolicity scans.
//! * [`cone`]: coned-off graphs over cosets of cyclic subgroups.
//! * [`complex`]: Rips 2-skeletons, coned complexes, polygonal relation cells.
//! * [`area`]: exact combinatorial area of loops by best-first search.
//! * [`path`], [`combing`]: quasi-geodesy, base change, Farb reduction and
//!   extension of paths and combings.
//! * [`tree`], [`pipeline`]: trees of spaces for graphs of groups and the
//!   cone / glue / extend pipeline.
//! * [`verify`]: straightness constants, bounded coset penetration, stability
//!   sweeps.
//! * [`cochain`]: bounded 1-cochains solving `∂c' = c` from a thin combing.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod area;
pub mod cochain;
pub mod combing;
pub mod complex;
pub mod cone;
pub mod error;
pub mod graph;
pub mod group;
pub mod path;
pub mod pipeline;
pub mod tree;
pub mod verify;
pub mod word;

mod par;

pub use error::{Error, Result};
pub use group::{Element, GroupSpec};
pub use word::{Alphabet, Word};
