//! Rectangular grids in characteristic coordinates and difference calculus.
//!
//! Grids are indexed by the characteristic (null) coordinates `(s, t)` with
//! `u = (s + t)/2`, `v = (s - t)/2`, so that a Lorentz number field splits as
//! `f = e+ f_plus(s,t) + e- f_minus(s,t)`.  The Wirtinger-type operators
//!
//! ```text
//!     d_a    = e+ d/ds + e- d/dt        (annihilates hat-conformal maps)
//!     d_ahat = e+ d/dt + e- d/ds        (annihilates conformal maps)
//! ```
//!
//! are realized with central differences in the interior and first-order
//! one-sided differences on the boundary, so interior accuracy is O(h^2).

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::lorentz::Lorentz;

/// A uniform grid `[s0, s1] x [t0, t1]` with `ns x nt` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub s0: f64,
    pub s1: f64,
    pub t0: f64,
    pub t1: f64,
    pub ns: usize,
    pub nt: usize,
}

impl GridSpec {
    pub fn new(s0: f64, s1: f64, t0: f64, t1: f64, ns: usize, nt: usize) -> Result<Self> {
        if ns < 3 || nt < 3 || !(s1 > s0) || !(t1 > t0) {
            return Err(Error::GridTooSmall);
        }
        Ok(GridSpec {
            s0,
            s1,
            t0,
            t1,
            ns,
            nt,
        })
    }

    pub fn hs(&self) -> f64 {
        (self.s1 - self.s0) / (self.ns - 1) as f64
    }

    pub fn ht(&self) -> f64 {
        (self.t1 - self.t0) / (self.nt - 1) as f64
    }

    pub fn h_max(&self) -> f64 {
        self.hs().max(self.ht())
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s0 + self.hs() * i as f64
    }

    pub fn t(&self, j: usize) -> f64 {
        self.t0 + self.ht() * j as f64
    }

    /// Conformal coordinates of node `(i, j)`.
    pub fn uv(&self, i: usize, j: usize) -> (f64, f64) {
        let s = self.s(i);
        let t = self.t(j);
        (0.5 * (s + t), 0.5 * (s - t))
    }

    pub fn len(&self) -> usize {
        self.ns * self.nt
    }

    /// A grid over the same rectangle with both axes dyadically refined
    /// (node set of `self` is a subset of the refined node set).
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            ns: 2 * self.ns - 1,
            nt: 2 * self.nt - 1,
            ..*self
        }
    }
}

/// Values a grid field can hold: closed under linear combinations.
pub trait GridValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
}

impl GridValue for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl GridValue for Lorentz {
    fn zero() -> Self {
        crate::lorentz::ZERO
    }
}

/// A field of values over a [`GridSpec`], stored row-major in `i` (the `s`
/// index) with `j` (the `t` index) fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    spec: GridSpec,
    values: Vec<T>,
}

pub type AField = Field<Lorentz>;
pub type RealField = Field<f64>;

impl<T: Copy> Field<T> {
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(spec.len());
        for i in 0..spec.ns {
            for j in 0..spec.nt {
                values.push(f(i, j));
            }
        }
        Field { spec, values }
    }

    pub fn constant(spec: GridSpec, value: T) -> Self {
        Field {
            spec,
            values: vec![value; spec.len()],
        }
    }

    pub fn from_values(spec: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        Ok(Field { spec, values })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.spec.nt + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.values[i * self.spec.nt + j] = value;
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn map<U: Copy>(&self, mut f: impl FnMut(T) -> U) -> Field<U> {
        Field {
            spec: self.spec,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_map<U: Copy, V: Copy>(
        &self,
        other: &Field<U>,
        mut f: impl FnMut(T, U) -> V,
    ) -> Result<Field<V>> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch("zip over different grids".into()));
        }
        Ok(Field {
            spec: self.spec,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

impl AField {
    /// Samples `f(a)` at every node, with `a = e+ s + e- t`.
    pub fn sample(spec: GridSpec, mut f: impl FnMut(Lorentz) -> Lorentz) -> Self {
        Field::from_fn(spec, |i, j| f(Lorentz::from_split(spec.s(i), spec.t(j))))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|x| x.abs_max()).fold(0.0, f64::max)
    }
}

impl RealField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn min_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|x| x.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// d/ds by central differences; first-order one-sided on the s-boundary.
pub fn deriv_s<T: GridValue>(f: &Field<T>) -> Field<T> {
    let spec = f.spec();
    let hs = spec.hs();
    Field::from_fn(spec, |i, j| {
        if i == 0 {
            (f.get(1, j) - f.get(0, j)) * (1.0 / hs)
        } else if i == spec.ns - 1 {
            (f.get(i, j) - f.get(i - 1, j)) * (1.0 / hs)
        } else {
            (f.get(i + 1, j) - f.get(i - 1, j)) * (0.5 / hs)
        }
    })
}

/// d/dt by central differences; first-order one-sided on the t-boundary.
pub fn deriv_t<T: GridValue>(f: &Field<T>) -> Field<T> {
    let spec = f.spec();
    let ht = spec.ht();
    Field::from_fn(spec, |i, j| {
        if j == 0 {
            (f.get(i, 1) - f.get(i, 0)) * (1.0 / ht)
        } else if j == spec.nt - 1 {
            (f.get(i, j) - f.get(i, j - 1)) * (1.0 / ht)
        } else {
            (f.get(i, j + 1) - f.get(i, j - 1)) * (0.5 / ht)
        }
    })
}

/// d/du = d/ds + d/dt in conformal coordinates.
pub fn deriv_u<T: GridValue>(f: &Field<T>) -> Field<T> {
    let ds = deriv_s(f);
    let dt = deriv_t(f);
    ds.zip_map(&dt, |a, b| a + b).expect("same grid")
}

/// d/dv = d/ds - d/dt in conformal coordinates.
pub fn deriv_v<T: GridValue>(f: &Field<T>) -> Field<T> {
    let ds = deriv_s(f);
    let dt = deriv_t(f);
    ds.zip_map(&dt, |a, b| a - b).expect("same grid")
}

/// The operator `d_a = (d/du + sigma d/dv)/2 = e+ d/ds + e- d/dt`.
pub fn d_a(f: &AField) -> AField {
    let ds = deriv_s(f);
    let dt = deriv_t(f);
    ds.zip_map(&dt, |a, b| {
        Lorentz::from_split(a.split().plus, b.split().minus)
    })
    .expect("same grid")
}

/// The conjugate operator `d_ahat = (d/du - sigma d/dv)/2 = e+ d/dt + e- d/ds`.
pub fn d_ahat(f: &AField) -> AField {
    let ds = deriv_s(f);
    let dt = deriv_t(f);
    dt.zip_map(&ds, |a, b| {
        Lorentz::from_split(a.split().plus, b.split().minus)
    })
    .expect("same grid")
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConformalityReport {
    /// Sup over the grid of the split components of `d_ahat f`.
    pub max_residual: f64,
    pub tol: f64,
    pub conformal: bool,
}

/// Checks `d_ahat f = 0` on samples.  For a field sampled from an exactly
/// conformal map the residual vanishes identically (each split component is
/// constant along the differenced axis), so the check is stencil-exact.
pub fn is_conformal_samples(f: &AField, tol: f64) -> ConformalityReport {
    let max_residual = d_ahat(f).max_abs();
    ConformalityReport {
        max_residual,
        tol,
        conformal: max_residual <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_unit(n: usize) -> GridSpec {
        GridSpec::new(0.0, 1.0, 0.0, 1.0, n, n).unwrap()
    }

    #[test]
    fn rejects_tiny_grids() {
        assert_eq!(
            GridSpec::new(0.0, 1.0, 0.0, 1.0, 2, 5),
            Err(Error::GridTooSmall)
        );
        assert_eq!(
            GridSpec::new(0.0, -1.0, 0.0, 1.0, 5, 5),
            Err(Error::GridTooSmall)
        );
    }

    #[test]
    fn uv_of_corner_nodes() {
        let g = GridSpec::new(0.0, 2.0, 0.0, 2.0, 5, 5).unwrap();
        assert_eq!(g.uv(0, 0), (0.0, 0.0));
        assert_eq!(g.uv(4, 0), (1.0, 1.0));
        assert_eq!(g.uv(0, 4), (1.0, -1.0));
    }

    #[test]
    fn d_a_of_identity_is_one() {
        let f = AField::sample(spec_unit(9), |a| a);
        let da = d_a(&f);
        let dah = d_ahat(&f);
        for i in 0..9 {
            for j in 0..9 {
                assert!((da.get(i, j) - crate::lorentz::ONE).abs_max() < 1e-13);
                assert!(dah.get(i, j).abs_max() < 1e-13);
            }
        }
    }

    #[test]
    fn d_a_of_square_is_two_a_in_the_interior() {
        // a^2 has quadratic split components, so central differences are exact.
        let spec = spec_unit(9);
        let f = AField::sample(spec, |a| a * a);
        let da = d_a(&f);
        for i in 1..8 {
            for j in 1..8 {
                let a = Lorentz::from_split(spec.s(i), spec.t(j));
                assert!((da.get(i, j) - a * 2.0).abs_max() < 1e-13);
            }
        }
    }

    #[test]
    fn d_a_converges_at_second_order_on_cosh() {
        let err = |n: usize| -> f64 {
            let spec = spec_unit(n);
            let f = AField::sample(spec, |a| a.cosh());
            let da = d_a(&f);
            let mut e: f64 = 0.0;
            for i in 1..n - 1 {
                for j in 1..n - 1 {
                    let a = Lorentz::from_split(spec.s(i), spec.t(j));
                    e = e.max((da.get(i, j) - a.sinh()).abs_max());
                }
            }
            e
        };
        let e1 = err(17);
        let e2 = err(33);
        let slope = (e1 / e2).log2();
        assert!((slope - 2.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn mixed_derivatives_commute_exactly() {
        // The s and t stencils act on different axes, so the composition is
        // exactly symmetric, boundary included.
        let f = AField::sample(spec_unit(11), |a| (a * 0.7).exp() + a * a);
        let ab = d_ahat(&d_a(&f));
        let ba = d_a(&d_ahat(&f));
        for (x, y) in ab.values().iter().zip(ba.values().iter()) {
            assert!((*x - *y).abs_max() < 1e-12);
        }
    }

    #[test]
    fn conformality_accepts_a_and_flags_ahat() {
        let id = AField::sample(spec_unit(9), |a| a);
        let rep = is_conformal_samples(&id, 1e-10);
        assert!(rep.conformal, "residual {}", rep.max_residual);

        let hat = AField::sample(spec_unit(9), |a| a.hat());
        let rep = is_conformal_samples(&hat, 1e-10);
        assert!(!rep.conformal);
        // d_ahat(hat a) = 1, matching max |d/du of hat(a)| = 1.
        assert!((rep.max_residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conformality_of_square_is_stencil_exact() {
        let sq = AField::sample(spec_unit(17), |a| a * a);
        let rep = is_conformal_samples(&sq, 1e-12);
        assert!(rep.conformal, "residual {}", rep.max_residual);
    }
}
