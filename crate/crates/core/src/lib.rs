//! Exact lattice machinery for deciding which prism manifolds `P(p, q)` with
//! `q > p` have C-type intersection lattices that embed as changemaker
//! complements.

pub mod alexander;
pub mod changemaker;
pub mod contfrac;
pub mod ctype;
pub mod families;
pub mod isometry;
pub mod lattice;

pub use contfrac::{CfError, NegCF, PosCF, Rational};
pub use lattice::{GramLattice, LatticeError, LatticeVector, Sublattice};
pub use alexander::{AlexanderPolynomial, TorsionSequence};
pub use changemaker::{Changemaker, StandardBasis};
pub use ctype::{CTypeLattice, Interval};
pub use families::{Family, FamilyRecord};
pub use isometry::Isometry;
