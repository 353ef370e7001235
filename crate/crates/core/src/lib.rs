//! Quaternionic hyperbolic geometry and the quaternionic Kahler cocycle.
//!
//! The crate is layered bottom-up:
//!
//! - [`quat`]: quaternion arithmetic (complex numbers are the `y = z = 0` slice).
//! - [`pvspace`]: the Hermitian space `H^{n,1}`, its projective ball model,
//!   the triple product and totally real triples.
//! - [`lines`]: quaternionic and complex lines, orthogonal projection, the
//!   five-point reduction and the distance.
//! - [`hyp4`]: real hyperbolic backend (distance-geometry embedding, Klein
//!   model simplex volumes, the constant `v4`, triangle areas).
//! - [`cocycle`]: cocycle evaluation, consistency checks and the sup search.

pub mod error;
pub mod hyp4;
pub mod cocycle;
pub mod lines;
pub mod oracle;
pub mod pvspace;
pub mod quat;

pub use error::{Error, Result};
pub use quat::Quaternion;
