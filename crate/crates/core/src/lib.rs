//! Exact arithmetic over prime fields for studying polynomials whose
//! integer range sum equals `p`, together with the character-sum and
//! direction-problem machinery built around them.
//!
//! Module map:
//!
//! - [`field`]: residues mod an odd prime, the quadratic character, Gauss sums.
//! - [`poly`]: reduced polynomials, moment interpolation, range profiles.
//! - [`classify`]: exhaustive search for degree-`(p-1)/2` solutions and
//!   their affine orbits.
//! - [`charsum`]: shifted Legendre sums, Paley intersection counts, sign
//!   pattern and cell bounds.
//! - [`geometry`]: point sets in `AG(2,p)`, direction sets, projection
//!   polynomials.
//! - [`fourier`]: spectra of indicator functions on `F_p^2`.
//!
//! Inner loops run on rayon when the `parallel` feature is enabled (the
//! default). Results are merged in a fixed order, so sequential and parallel
//! runs produce identical values.

pub mod charsum;
pub mod classify;
pub mod field;
pub mod fourier;
pub mod geometry;
pub mod par;
pub mod poly;

pub use field::{FieldElement, FieldError, PrimeCtx};
pub use poly::{Polynomial, PolyError, RangeProfile};
