//! Minimal surfaces from Weierstrass data.
//!
//! Given analytic f and g (or the three components of φ directly), this crate
//! builds the null curve φ = (f(1 − g²), i f(1 + g²), 2 f g), integrates it to
//! Φ, and works with the surface `x = Re Φ`: sampling it on a parameter
//! grid, exporting triangle meshes, and checking numerically that every
//! identity behind `H ≡ 0` holds.
//!
//! ```
//! use wrep::{catalog, verification::{verify, Tolerances}};
//!
//! let entry = catalog::by_name("enneper").unwrap();
//! let domain = entry.default_domain.with_resolution(8, 8).unwrap();
//! let report = verify(&entry.data, &domain, &Tolerances::default()).unwrap();
//! assert!(report.overall);
//! ```

pub mod catalog;
pub mod complex;
pub mod expr;
pub mod geometry;
pub mod mesh;
pub mod quadrature;
pub mod verification;
pub mod weierstrass;

pub mod cli;

use thiserror::Error;

pub use complex::{ComplexScalar, ComplexVec3, RealVec3};
pub use expr::Expr;
pub use weierstrass::WeierstrassData;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] expr::ParseError),
    #[error(transparent)]
    Weierstrass(#[from] weierstrass::WeierstrassError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("all {0} samples were skipped")]
    AllSamplesSkipped(usize),
    #[error("mesh has no faces")]
    EmptyMesh,
    #[error("non-finite value in vertex {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
