//! Webstrata: combinatorial invariants of monic complex polynomials.
//!
//! A monic degree-`n` polynomial `P` determines two harmonic level-curve
//! families `{Re P = 0}` and `{Im P = 0}`. Their union, clipped to a disc
//! that contains every root, is a planar forest with `4n` boundary leaves:
//! the *web* of `P`. Collapsing the geometry leaves a two-colored embedded
//! chord diagram, which is a complete invariant of the stratum of `P` in
//! the configuration space of its roots.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`] — monic polynomials, root finding, harmonic parts;
//! * [`webtrace`] — numerical curve tracing and the sign-grid cross-check;
//! * [`diagram`] — chord diagrams, canonical codes, serialization;
//! * [`dihedral`] — the boundary dihedral action and equivariance checks;
//! * [`sampling`] — seeded random polynomials with separated roots;
//! * [`strata`] — enumeration of generic strata, merge words, dissipation;
//! * [`chambers`] — chamber decomposition, galleries, path lifting;
//! * [`orbitgrpd`] — fundamental groupoids of finite graphs under group actions;
//! * [`mgt`] — the modular permutation groups on `Z/q` and their towers.

pub mod chambers;
pub mod diagram;
pub mod dihedral;
pub mod mgt;
pub mod orbitgrpd;
pub mod poly;
pub mod sampling;
pub mod strata;
mod util;
pub mod webtrace;

pub use diagram::{CanonicalCode, ChordDiagram};
pub use dihedral::DihedralElement;
pub use poly::MonicPolynomial;
pub use webtrace::{Color, NodeKind, TraceParams, Web};

