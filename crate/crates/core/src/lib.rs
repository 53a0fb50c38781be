//! Discrete Weierstrass representation for timelike minimal surfaces in
//! split-signature space R^{2,2}, built on the commutative ring of Lorentz
//! numbers.
//!
//! The crate is organised as a pipeline:
//!
//! * [`lorentz`]: the scalar ring `u + sigma v` with `sigma^2 = 1`, its
//!   involution and the split idempotent basis.
//! * [`grid`]: characteristic grids, sampled fields and finite differences.
//! * [`clifford`]: 2x2 matrices over the ring, the spin representation of
//!   `SO(2,2)` and its double cover.
//! * [`dirac`]: the hyperbolic Dirac system and its Goursat initial value
//!   solver.
//! * [`weierstrass`]: spinor data to immersion, with reality, path
//!   independence and nondegeneracy certificates.
//! * [`flat`]: flat isothermic immersions into the quadrics `H^{2,1}` and
//!   `S^{1,2}` from commuting frame equations, and the product of curves
//!   decomposition.
//! * [`oracle`]: an independent finite difference check of first and second
//!   fundamental forms, mean curvature and Gauss curvature.
//! * [`io`]: versioned CSV serialization for grids, frames and fields.

pub mod clifford;
pub mod dirac;
pub mod error;
pub mod flat;
pub mod grid;
pub mod io;
pub mod lorentz;
pub mod oracle;
pub mod weierstrass;

pub use error::{Error, Result};
pub use lorentz::Lorentz;
