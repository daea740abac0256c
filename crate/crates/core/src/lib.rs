//! Farey–Brocot partitions of the unit interval and the unit square.
//!
//! Two planar subdivision rules refine the square into unimodular
//! triangles with rational vertices. The crate enumerates the resulting
//! tilings exactly, builds their triangulation graphs, evaluates area
//! moments and the associated Dirichlet series, and checks the structural
//! identities those objects satisfy.

pub mod analysis;
pub mod census;
pub mod classical;
pub mod error;
pub mod lattice;
pub mod render;
pub mod subdivision;
pub mod tiling;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{Algorithm, Basis, LatticeVector, RationalPoint, Triangle};
pub use subdivision::{Cell, Code, CodeA, CodeB, Planar};
pub use tiling::{Execution, Refinement, Scope};

pub(crate) fn ser_rational<S: serde::Serializer>(
    r: &num_rational::BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}
