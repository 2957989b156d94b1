//! Linearization laboratory for generalized semi-standard maps.

pub mod arith;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod scalar;
pub mod semigroup;
pub mod series;

pub use error::{Error, Result};
pub use scalar::{Complex, Real};

/// Multiple-precision real used by default.
pub type Mp = rug::Float;

/// Series, polynomial and majorant over [`Mp`].
pub type Series = series::LinearizationSeries<Mp>;
pub type Polynomial = series::TrigPolynomial<Mp>;
pub type Majorant = series::MajorantSeries<Mp>;
pub type MpComplex = Complex<Mp>;
