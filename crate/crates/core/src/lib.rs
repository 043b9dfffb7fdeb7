//! Exact constructive group theory for virtually abelian groups: extension
//! presentations over integer lattices, finite quotients, splitting and
//! expansive homomorphisms, hyperelementary subgroup classification,
//! invariant-line detection, rational projective orbits, and finite skeleta
//! of coset-chain models. All arithmetic is exact; every enumeration is
//! deterministic and capped.

pub mod caps;
pub mod checks;
pub mod corpus;
pub mod error;
pub mod fingroup;
pub mod gdef;
pub mod intmat;
pub mod lines;
pub mod presentation;
pub mod quotient;
pub mod splitting;
pub mod hyperelem;
pub mod reducibility;
pub mod classify;
pub mod cosetspace;

pub use caps::Caps;
pub use error::{Error, Result};
pub use fingroup::{FiniteGroup, Subgroup};
pub use presentation::{builtin, catalog, catalog_names, Cocycle, Element, LatticeAction, VAPresentation};
pub use quotient::FiniteQuotient;
