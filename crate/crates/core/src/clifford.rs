//! Clifford-algebra model of R^{2,2} and the Spin(2,2) double cover.
//!
//! Everything lives inside the complexified quaternions with Lorentz-number
//! coefficients.  Two four-dimensional real-form slices show up:
//!
//! * `H0`, spanned by `(1, iI, J, iK)`, which contains the spin group,
//! * `H1`, spanned by `(i1, I, iJ, K)`, which contains the vector representation.
//!
//! Products of basis elements stay in these slices (H0*H0 -> H0,
//! H0*H1 -> H1, H1*H0 -> H1, H1*H1 -> H0), so each product is a small signed
//! table plus commutative coefficient arithmetic in `A`.
//!
//! A vector `x in R^{2,2}` embeds as `q = sigma*i*x0*1 + x1*I + i*x2*J + x3*K`
//! and satisfies the Clifford relation `q * hat(q) = -<x,x> * 1` for the
//! scalar product `<x,x> = -x0^2 + x1^2 - x2^2 + x3^2`.  Unit spinors
//! (`H(p,p) = 1`) act on vectors by `q -> p q hat(conj(p))`, a double cover of
//! the identity component of SO(2,2).
//!
//! The module also carries the 2x2 matrix pictures: `a0`/`a1` identify H0 and
//! H1 with matrices over `A` (determinants realizing the quadratic forms) and
//! the Hermitian-matrix model of R^{2,2} with `<x,x> = -det`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::grid::GridValue;
use crate::lorentz::{Lorentz, ONE, SIGMA, ZERO};

/// Element of the spin slice, coefficients in the basis `(1, iI, J, iK)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct H0(pub [Lorentz; 4]);

/// Element of the vector slice, coefficients in the basis `(i1, I, iJ, K)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct H1(pub [Lorentz; 4]);

/// A point of R^{2,2} in coordinates `(x0, x1, x2, x3)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec22(pub [f64; 4]);

/// Signature pattern of the scalar product on R^{2,2}.
pub const METRIC_SIGNS: [f64; 4] = [-1.0, 1.0, -1.0, 1.0];

/// `<x,y> = -x0 y0 + x1 y1 - x2 y2 + x3 y3`.
pub fn scalar(x: Vec22, y: Vec22) -> f64 {
    let mut acc = 0.0;
    for k in 0..4 {
        acc += METRIC_SIGNS[k] * x.0[k] * y.0[k];
    }
    acc
}

impl Vec22 {
    pub fn abs_max(self) -> f64 {
        self.0.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

impl Add for Vec22 {
    type Output = Vec22;
    fn add(self, rhs: Vec22) -> Vec22 {
        let mut r = [0.0; 4];
        for k in 0..4 {
            r[k] = self.0[k] + rhs.0[k];
        }
        Vec22(r)
    }
}

impl Sub for Vec22 {
    type Output = Vec22;
    fn sub(self, rhs: Vec22) -> Vec22 {
        let mut r = [0.0; 4];
        for k in 0..4 {
            r[k] = self.0[k] - rhs.0[k];
        }
        Vec22(r)
    }
}

impl Mul<f64> for Vec22 {
    type Output = Vec22;
    fn mul(self, rhs: f64) -> Vec22 {
        let mut r = [0.0; 4];
        for k in 0..4 {
            r[k] = self.0[k] * rhs;
        }
        Vec22(r)
    }
}

impl Neg for Vec22 {
    type Output = Vec22;
    fn neg(self) -> Vec22 {
        self * -1.0
    }
}

impl GridValue for Vec22 {
    fn zero() -> Self {
        Vec22([0.0; 4])
    }
}

// Signed basis product tables, entries (sign, target index).  Derived once by
// expanding i^2 = -1, I^2 = J^2 = K^2 = -1, IJ = -JI = K; the unit tests for
// the Clifford relation and the determinant identities exercise every entry.
type Tab = [[(f64, usize); 4]; 4];

const E_E: Tab = [
    [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
    [(1.0, 1), (1.0, 0), (1.0, 3), (1.0, 2)],
    [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
    [(1.0, 3), (-1.0, 2), (-1.0, 1), (1.0, 0)],
];

const E_G: Tab = [
    [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
    [(-1.0, 1), (-1.0, 0), (-1.0, 3), (-1.0, 2)],
    [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
    [(-1.0, 3), (1.0, 2), (1.0, 1), (-1.0, 0)],
];

const G_E: Tab = [
    [(1.0, 0), (-1.0, 1), (1.0, 2), (-1.0, 3)],
    [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
    [(1.0, 2), (1.0, 3), (-1.0, 0), (-1.0, 1)],
    [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
];

const G_G: Tab = [
    [(-1.0, 0), (1.0, 1), (-1.0, 2), (1.0, 3)],
    [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
    [(-1.0, 2), (-1.0, 3), (1.0, 0), (1.0, 1)],
    [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
];

fn table_mul(a: &[Lorentz; 4], b: &[Lorentz; 4], tab: &Tab) -> [Lorentz; 4] {
    let mut out = [ZERO; 4];
    for (ia, &ca) in a.iter().enumerate() {
        if ca == ZERO {
            continue;
        }
        for (ib, &cb) in b.iter().enumerate() {
            let (sign, idx) = tab[ia][ib];
            out[idx] += ca * cb * sign;
        }
    }
    out
}

impl H0 {
    pub fn one() -> Self {
        H0([ONE, ZERO, ZERO, ZERO])
    }

    /// Quaternionic conjugation: flips the I, J, K parts.
    pub fn conj(self) -> Self {
        H0([self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }

    /// Lorentz conjugation applied to every coefficient.
    pub fn hat(self) -> Self {
        H0(self.0.map(Lorentz::hat))
    }

    pub fn scale(self, c: Lorentz) -> Self {
        H0(self.0.map(|x| x * c))
    }

    pub fn abs_max(self) -> f64 {
        self.0.iter().fold(0.0f64, |m, x| m.max(x.abs_max()))
    }
}

impl H1 {
    /// Quaternionic conjugation: `i*1` is fixed, `I`, `iJ`, `K` flip.
    pub fn conj(self) -> Self {
        H1([self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }

    pub fn hat(self) -> Self {
        H1(self.0.map(Lorentz::hat))
    }

    pub fn scale(self, c: Lorentz) -> Self {
        H1(self.0.map(|x| x * c))
    }

    pub fn abs_max(self) -> f64 {
        self.0.iter().fold(0.0f64, |m, x| m.max(x.abs_max()))
    }
}

impl Mul for H0 {
    type Output = H0;
    fn mul(self, rhs: H0) -> H0 {
        H0(table_mul(&self.0, &rhs.0, &E_E))
    }
}

impl Mul<H1> for H0 {
    type Output = H1;
    fn mul(self, rhs: H1) -> H1 {
        H1(table_mul(&self.0, &rhs.0, &E_G))
    }
}

impl Mul<H0> for H1 {
    type Output = H1;
    fn mul(self, rhs: H0) -> H1 {
        H1(table_mul(&self.0, &rhs.0, &G_E))
    }
}

impl Mul for H1 {
    type Output = H0;
    fn mul(self, rhs: H1) -> H0 {
        H0(table_mul(&self.0, &rhs.0, &G_G))
    }
}

macro_rules! impl_linear {
    ($ty:ident) => {
        impl Add for $ty {
            type Output = $ty;
            fn add(self, rhs: $ty) -> $ty {
                let mut out = self.0;
                for k in 0..4 {
                    out[k] += rhs.0[k];
                }
                $ty(out)
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, rhs: $ty) -> $ty {
                let mut out = self.0;
                for k in 0..4 {
                    out[k] -= rhs.0[k];
                }
                $ty(out)
            }
        }
        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                $ty(self.0.map(|x| -x))
            }
        }
    };
}

impl_linear!(H0);
impl_linear!(H1);

/// `H(p, p') = p0 p0' - p1 p1' + p2 p2' - p3 p3'` on the spin slice.
/// This is the A-bilinear extension of `(z, z') -> Re(z conj(z'))` to the
/// quaternion coordinates; `H(p, p) = p * conj(p)`.
pub fn bilinear_h0(p: H0, q: H0) -> Lorentz {
    p.0[0] * q.0[0] - p.0[1] * q.0[1] + p.0[2] * q.0[2] - p.0[3] * q.0[3]
}

/// The same form on the vector slice: `-q0 q0' + q1 q1' - q2 q2' + q3 q3'`.
pub fn bilinear_h1(p: H1, q: H1) -> Lorentz {
    -(p.0[0] * q.0[0]) + p.0[1] * q.0[1] - p.0[2] * q.0[2] + p.0[3] * q.0[3]
}

/// Embedding of R^{2,2} into the vector slice:
/// `x -> sigma*i*x0 + x1 I + i*x2 J + x3 K`.
pub fn gamma(x: Vec22) -> H1 {
    H1([
        SIGMA * x.0[0],
        Lorentz::real(x.0[1]),
        Lorentz::real(x.0[2]),
        Lorentz::real(x.0[3]),
    ])
}

/// Reads a vector back out of the slice.  Returns the vector together with
/// the distance from the real form `{q : q = -hat(conj(q))}`; the defect is
/// pure rounding for anything produced by the algebra itself.
pub fn ungamma(q: H1) -> (Vec22, f64) {
    let x = Vec22([q.0[0].v, q.0[1].u, q.0[2].u, q.0[3].u]);
    let defect = q.0[0]
        .u
        .abs()
        .max(q.0[1].v.abs())
        .max(q.0[2].v.abs())
        .max(q.0[3].v.abs());
    (x, defect)
}

/// Top diagonal block of the squared Clifford matrix `((0, q), (hat q, 0))`,
/// i.e. `q * hat(q)`; equals `-<x,x> * 1` identically.
pub fn clifford_square(x: Vec22) -> H0 {
    let q = gamma(x);
    q * q.hat()
}

/// A 4x4 real matrix, used for the SO(2,2) image of a spinor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[f64; 4]; 4]);

impl Mat4 {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for k in 0..4 {
            m[k][k] = 1.0;
        }
        Mat4(m)
    }

    pub fn mul_vec(&self, x: Vec22) -> Vec22 {
        let mut out = [0.0; 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r] += self.0[r][c] * x.0[c];
            }
        }
        Vec22(out)
    }

    pub fn abs_max_diff(&self, other: &Mat4) -> f64 {
        let mut m = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                m = m.max((self.0[r][c] - other.0[r][c]).abs());
            }
        }
        m
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                for k in 0..4 {
                    out[r][c] += self.0[r][k] * rhs.0[k][c];
                }
            }
        }
        Mat4(out)
    }
}

/// Vector representation of a unit spinor: the matrix of
/// `q -> p q hat(conj(p))` in the coordinates of R^{2,2}.
///
/// Requires `H(p,p) = 1` (then `conj(p) = p^{-1}`, so the conjugation is well
/// defined without any division).  `spin_to_so(p) == spin_to_so(-p)` and the
/// image preserves the scalar product.
pub fn spin_to_so(p: H0) -> Result<Mat4> {
    let h = bilinear_h0(p, p);
    let defect = (h - ONE).abs_max();
    if defect > 1e-10 {
        return Err(Error::NotUnitSpinor { defect });
    }
    let hcp = p.conj().hat();
    let mut m = [[0.0; 4]; 4];
    for c in 0..4 {
        let mut basis = [0.0; 4];
        basis[c] = 1.0;
        let image = (p * gamma(Vec22(basis))) * hcp;
        let (x, _) = ungamma(image);
        for r in 0..4 {
            m[r][c] = x.0[r];
        }
    }
    Ok(Mat4(m))
}

/// 2x2 matrices over the Lorentz numbers, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2A(pub [[Lorentz; 2]; 2]);

/// 2x2 real matrices (one split component of a `Mat2A`).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2R(pub [[f64; 2]; 2]);

impl Mat2A {
    pub fn identity() -> Self {
        Mat2A([[ONE, ZERO], [ZERO, ONE]])
    }

    /// diag(-1, 1), the involution defining the second pseudo-sphere.
    pub fn diag_m1_1() -> Self {
        Mat2A([[-ONE, ZERO], [ZERO, ONE]])
    }

    pub fn det(&self) -> Lorentz {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn transpose(&self) -> Mat2A {
        Mat2A([[self.0[0][0], self.0[1][0]], [self.0[0][1], self.0[1][1]]])
    }

    /// Conjugate transpose: transpose with `hat` on every entry.
    pub fn star(&self) -> Mat2A {
        Mat2A([
            [self.0[0][0].hat(), self.0[1][0].hat()],
            [self.0[0][1].hat(), self.0[1][1].hat()],
        ])
    }

    pub fn hat(&self) -> Mat2A {
        Mat2A(self.0.map(|row| row.map(Lorentz::hat)))
    }

    pub fn scale(&self, c: Lorentz) -> Mat2A {
        Mat2A(self.0.map(|row| row.map(|x| x * c)))
    }

    /// Inverse by the adjugate; requires an invertible determinant.
    pub fn inverse(&self) -> Result<Mat2A> {
        let inv_det = self.det().inverse()?;
        Ok(Mat2A([
            [self.0[1][1] * inv_det, -self.0[0][1] * inv_det],
            [-self.0[1][0] * inv_det, self.0[0][0] * inv_det],
        ]))
    }

    /// Distance from being Hermitian (`M = M*`).
    pub fn hermitian_defect(&self) -> f64 {
        self.0[0][0]
            .v
            .abs()
            .max(self.0[1][1].v.abs())
            .max((self.0[1][0] - self.0[0][1].hat()).abs_max())
    }

    /// Split components: `M = e+ P + e- Q`.
    pub fn split(&self) -> (Mat2R, Mat2R) {
        let mut p = [[0.0; 2]; 2];
        let mut q = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                let s = self.0[r][c].split();
                p[r][c] = s.plus;
                q[r][c] = s.minus;
            }
        }
        (Mat2R(p), Mat2R(q))
    }

    pub fn from_split(p: Mat2R, q: Mat2R) -> Mat2A {
        let mut m = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = Lorentz::from_split(p.0[r][c], q.0[r][c]);
            }
        }
        Mat2A(m)
    }

    pub fn abs_max_diff(&self, other: &Mat2A) -> f64 {
        let mut m = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((self.0[r][c] - other.0[r][c]).abs_max());
            }
        }
        m
    }
}

impl Mul for Mat2A {
    type Output = Mat2A;
    fn mul(self, rhs: Mat2A) -> Mat2A {
        let mut out = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = self.0[r][0] * rhs.0[0][c] + self.0[r][1] * rhs.0[1][c];
            }
        }
        Mat2A(out)
    }
}

impl Add for Mat2A {
    type Output = Mat2A;
    fn add(self, rhs: Mat2A) -> Mat2A {
        let mut out = self.0;
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] += rhs.0[r][c];
            }
        }
        Mat2A(out)
    }
}

impl Sub for Mat2A {
    type Output = Mat2A;
    fn sub(self, rhs: Mat2A) -> Mat2A {
        let mut out = self.0;
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] -= rhs.0[r][c];
            }
        }
        Mat2A(out)
    }
}

impl Mul<f64> for Mat2A {
    type Output = Mat2A;
    fn mul(self, rhs: f64) -> Mat2A {
        self.scale(Lorentz::real(rhs))
    }
}

impl GridValue for Mat2A {
    fn zero() -> Self {
        Mat2A::default()
    }
}

impl Mat2R {
    pub fn identity() -> Self {
        Mat2R([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn transpose(&self) -> Mat2R {
        Mat2R([[self.0[0][0], self.0[1][0]], [self.0[0][1], self.0[1][1]]])
    }

    pub fn scale(&self, c: f64) -> Mat2R {
        Mat2R(self.0.map(|row| row.map(|x| x * c)))
    }

    pub fn abs_max_diff(&self, other: &Mat2R) -> f64 {
        let mut m = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((self.0[r][c] - other.0[r][c]).abs());
            }
        }
        m
    }
}

impl Mul for Mat2R {
    type Output = Mat2R;
    fn mul(self, rhs: Mat2R) -> Mat2R {
        let mut out = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                for k in 0..2 {
                    out[r][c] += self.0[r][k] * rhs.0[k][c];
                }
            }
        }
        Mat2R(out)
    }
}

impl Add for Mat2R {
    type Output = Mat2R;
    fn add(self, rhs: Mat2R) -> Mat2R {
        let mut out = self.0;
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] += rhs.0[r][c];
            }
        }
        Mat2R(out)
    }
}

impl Sub for Mat2R {
    type Output = Mat2R;
    fn sub(self, rhs: Mat2R) -> Mat2R {
        let mut out = self.0;
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] -= rhs.0[r][c];
            }
        }
        Mat2R(out)
    }
}

impl Mul<f64> for Mat2R {
    type Output = Mat2R;
    fn mul(self, rhs: f64) -> Mat2R {
        self.scale(rhs)
    }
}

impl GridValue for Mat2R {
    fn zero() -> Self {
        Mat2R::default()
    }
}

/// Matrix picture of the spin slice:
/// `p -> ((p0 - s p1, p2 - s p3), (-p2 - s p3, p0 + s p1))`.
/// Multiplicative, with `det a0(p) = H(p, p)` and `a0(hat(conj(p))) = a0(p)*`.
pub fn a0(p: H0) -> Mat2A {
    let [p0, p1, p2, p3] = p.0;
    Mat2A([
        [p0 - SIGMA * p1, p2 - SIGMA * p3],
        [-p2 - SIGMA * p3, p0 + SIGMA * p1],
    ])
}

/// Matrix picture of the vector slice:
/// `q -> ((-q1 - s q0, -q3 - s q2), (-q3 + s q2, q1 - s q0))`.
/// Satisfies `det a1(q) = -H(q, q)` and `a1(hat(conj(q))) = -a1(q)*`.
pub fn a1(q: H1) -> Mat2A {
    let [q0, q1, q2, q3] = q.0;
    Mat2A([
        [-q1 - SIGMA * q0, -q3 - SIGMA * q2],
        [-q3 + SIGMA * q2, q1 - SIGMA * q0],
    ])
}

/// Hermitian-matrix model of R^{2,2}: `x -> a1(gamma(x))`, a Hermitian matrix
/// with `<x,x> = -det`.
pub fn vec_to_herm(x: Vec22) -> Mat2A {
    a1(gamma(x))
}

/// Inverse of [`vec_to_herm`]; rejects matrices that are not Hermitian.
pub fn herm_to_vec(m: &Mat2A, tol: f64) -> Result<Vec22> {
    let defect = m.hermitian_defect();
    if defect > tol {
        return Err(Error::NotHermitian { defect });
    }
    let m11 = m.0[0][0].u;
    let m22 = m.0[1][1].u;
    Ok(Vec22([
        -0.5 * (m11 + m22),
        0.5 * (m22 - m11),
        -m.0[0][1].v,
        -m.0[0][1].u,
    ]))
}

/// The real 2x2 picture of a Hermitian matrix: `M = e+ C + e- C^T -> C`.
/// `det C = det M`, so the model identifies the quadric `det = 1` with
/// Sl(2, R).
pub fn herm_to_mat2r(m: &Mat2A, tol: f64) -> Result<Mat2R> {
    let defect = m.hermitian_defect();
    if defect > tol {
        return Err(Error::NotHermitian { defect });
    }
    let (c, _) = m.split();
    Ok(c)
}

pub fn mat2r_to_herm(c: &Mat2R) -> Mat2A {
    Mat2A::from_split(*c, c.transpose())
}
