//! Exact-arithmetic toolkit for homological systems in bounded derived
//! categories of hereditary path algebras.
//!
//! The crate models representations of acyclic quivers over an exact field,
//! the derived category of such a path algebra in Krull-Schmidt normal form,
//! filtration certificates for families of objects with one-directional
//! Hom/Ext vanishing, the construction of the associated relative-projective
//! and relative-injective families, and the standardly stratified
//! endomorphism algebras these produce.

pub mod algebra;
pub mod demos;
pub mod derived;
pub mod error;
pub mod field;
pub mod homalg;
pub mod poly;
pub mod quiver;
pub mod strata;
pub mod theta;

pub use error::{Error, Result};
pub use field::{FieldCfg, Matrix, Scalar};
