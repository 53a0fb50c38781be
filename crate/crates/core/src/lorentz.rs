//! Scalar arithmetic for Lorentz (split-complex) numbers.
//!
//! The commutative algebra `A = { u + sigma*v : u, v real }` with `sigma^2 = +1`
//! plays the role for Lorentz surfaces that the complex numbers play for
//! Riemann surfaces.  Unlike C it has zero divisors: everything on the null
//! cone `|u| = |v|`.  The idempotents
//!
//! ```text
//!     e+ = (1 + sigma)/2,     e- = (1 - sigma)/2
//! ```
//!
//! satisfy `e+ e- = 0` and split `A` as `R x R`; in the split picture
//! multiplication is componentwise and `u + sigma*v` has components
//! `(u + v, u - v)`.  Most solvers in this crate work componentwise through
//! [`SplitRep`] and reassemble at the end.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// A Lorentz number `u + sigma*v`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Lorentz {
    pub u: f64,
    pub v: f64,
}

/// The same number in the idempotent basis: `a = e+ * plus + e- * minus`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SplitRep {
    pub plus: f64,
    pub minus: f64,
}

pub const ZERO: Lorentz = Lorentz { u: 0.0, v: 0.0 };
pub const ONE: Lorentz = Lorentz { u: 1.0, v: 0.0 };
pub const SIGMA: Lorentz = Lorentz { u: 0.0, v: 1.0 };

impl Lorentz {
    pub const fn new(u: f64, v: f64) -> Self {
        Lorentz { u, v }
    }

    pub const fn real(u: f64) -> Self {
        Lorentz { u, v: 0.0 }
    }

    /// Conjugation `hat(u + sigma*v) = u - sigma*v`.  A ring automorphism;
    /// it swaps the two split components.
    pub fn hat(self) -> Self {
        Lorentz {
            u: self.u,
            v: -self.v,
        }
    }

    /// The indefinite square norm `a * hat(a) = u^2 - v^2`.  Negative on
    /// sigma-dominated numbers, zero exactly on the null cone.
    pub fn sqnorm(self) -> f64 {
        self.u * self.u - self.v * self.v
    }

    /// Real part `(a + hat(a))/2`.
    pub fn re(self) -> f64 {
        self.u
    }

    /// Imaginary part `sigma*(a - hat(a))/2`, i.e. the sigma coefficient.
    pub fn im(self) -> f64 {
        self.v
    }

    pub fn split(self) -> SplitRep {
        SplitRep {
            plus: self.u + self.v,
            minus: self.u - self.v,
        }
    }

    pub fn from_split(plus: f64, minus: f64) -> Self {
        Lorentz {
            u: 0.5 * (plus + minus),
            v: 0.5 * (plus - minus),
        }
    }

    /// Multiplicative inverse `hat(a)/sqnorm(a)`; fails on the null cone.
    pub fn inverse(self) -> Result<Self> {
        let n = self.sqnorm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NullDivisor);
        }
        Ok(Lorentz {
            u: self.u / n,
            v: -self.v / n,
        })
    }

    /// `(cosh a, sinh a)` evaluated componentwise in the split basis, so the
    /// identity `cosh^2 - sinh^2 = 1` holds exactly in `A`.
    pub fn cosh_sinh(self) -> (Self, Self) {
        let s = self.split();
        (
            Lorentz::from_split(s.plus.cosh(), s.minus.cosh()),
            Lorentz::from_split(s.plus.sinh(), s.minus.sinh()),
        )
    }

    pub fn cosh(self) -> Self {
        self.cosh_sinh().0
    }

    pub fn sinh(self) -> Self {
        self.cosh_sinh().1
    }

    pub fn exp(self) -> Self {
        let s = self.split();
        Lorentz::from_split(s.plus.exp(), s.minus.exp())
    }

    /// Largest component magnitude; the norm used by grid-level sup checks.
    pub fn abs_max(self) -> f64 {
        self.u.abs().max(self.v.abs())
    }

    /// Distance from the null cone relative to `tol`.
    pub fn is_null(self, tol: f64) -> bool {
        self.sqnorm().abs() <= tol
    }
}

impl SplitRep {
    pub fn to_lorentz(self) -> Lorentz {
        Lorentz::from_split(self.plus, self.minus)
    }
}

impl Add for Lorentz {
    type Output = Lorentz;
    fn add(self, rhs: Lorentz) -> Lorentz {
        Lorentz {
            u: self.u + rhs.u,
            v: self.v + rhs.v,
        }
    }
}

impl Sub for Lorentz {
    type Output = Lorentz;
    fn sub(self, rhs: Lorentz) -> Lorentz {
        Lorentz {
            u: self.u - rhs.u,
            v: self.v - rhs.v,
        }
    }
}

impl Neg for Lorentz {
    type Output = Lorentz;
    fn neg(self) -> Lorentz {
        Lorentz {
            u: -self.u,
            v: -self.v,
        }
    }
}

impl Mul for Lorentz {
    type Output = Lorentz;
    fn mul(self, rhs: Lorentz) -> Lorentz {
        Lorentz {
            u: self.u * rhs.u + self.v * rhs.v,
            v: self.u * rhs.v + self.v * rhs.u,
        }
    }
}

impl Mul<f64> for Lorentz {
    type Output = Lorentz;
    fn mul(self, rhs: f64) -> Lorentz {
        Lorentz {
            u: self.u * rhs,
            v: self.v * rhs,
        }
    }
}

impl Mul<Lorentz> for f64 {
    type Output = Lorentz;
    fn mul(self, rhs: Lorentz) -> Lorentz {
        rhs * self
    }
}

impl AddAssign for Lorentz {
    fn add_assign(&mut self, rhs: Lorentz) {
        *self = *self + rhs;
    }
}

impl SubAssign for Lorentz {
    fn sub_assign(&mut self, rhs: Lorentz) {
        *self = *self - rhs;
    }
}

impl fmt::Display for Lorentz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v >= 0.0 {
            write!(f, "{} + {}s", self.u, self.v)
        } else {
            write!(f, "{} - {}s", self.u, -self.v)
        }
    }
}
