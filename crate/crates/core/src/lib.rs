//! Exact computation kernel for universal affine and Heisenberg vertex
//! algebras and their invariant subalgebras.
//!
//! Everything is exact: coefficients live in ℚ or in the field ℚ(k) of
//! rational functions in the formal level `k`. The crate is `no_std` and only
//! needs `alloc`; IO and the command line live in the companion `voa` crate.

#![no_std]

extern crate alloc;

pub mod classical;
pub mod enumerate;
pub mod liedata;
pub mod linalg;
pub mod orbifold;
pub mod poly;
pub mod remainder;
pub mod scalars;
pub mod vertex;

pub use classical::{ClassicalPoly, QSym, QSymbolPoly, Var};
pub use liedata::{ActionSpec, LieSpec, ValidationReport, Violation};
pub use linalg::Matrix;
pub use orbifold::{FormalNop, GeneratorDictionary, Symbol};
pub use remainder::IndexList;
pub use scalars::{KDegree, LevelPoly, LevelScalar, Rational, Scalar, ScalarError};
pub use vertex::{Factor, Level, Monomial, OpeList, State, StateWeight, VertexAlgebra};
