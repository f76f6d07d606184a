//! Exact Schubert calculus on Chow rings of projective homogeneous varieties.

pub mod chowring;
pub mod error;
pub mod invariants;
pub mod labels;
pub mod linalg;
pub mod poly;
pub mod polyops;
pub mod preimage;
pub mod rootdata;
pub mod weyl;

pub use chowring::{ChowClass, ChowRing, EngineOptions, Operator, PieriGraph, ProductEngine, Route};
pub use error::{Error, Result};
pub use poly::{Checked, Coeff, Monomial, Polynomial, QPoly, RingCoeff};
pub use polyops::WeylAction;
pub use rootdata::{DynkinSpec, Family, Root, RootSystem, Weight};
pub use weyl::{CosetReps, ParabolicSubset, WeylElement};
