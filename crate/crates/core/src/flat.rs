//! Flat surfaces in the pseudo-spheres of R^{2,2} from frame integration.
//!
//! Off-diagonal conformal 1-forms `theta = f da`, `omega = g da` define a
//! frame equation `B^-1 dB = ((0, theta), (omega, 0))` on Sl2(A).  In split
//! components it decouples into two one-variable linear ODEs,
//!
//! ```text
//!     dB1/ds = B1 ((0, theta+(s)), (omega+(s), 0)),
//!     dB2/dt = B2 ((0, theta-(t)), (omega-(t), 0)),
//! ```
//!
//! so the frame is a product of curves `B = e+ B1(s) + e- B2(t)`.  The
//! Hermitian squares `F = B B*` and `F = B diag(-1,1) B*` are flat immersions
//! into the quadrics `<F,F> = -1` and `<F,F> = +1` respectively, with induced
//! metric `(theta + omega_bar)(omega + theta_bar)` and shape 1-form
//! `B ((0, theta - omega_bar), (theta_bar - omega, 0)) B*` in the first case.

use serde::{Deserialize, Serialize};

use crate::clifford::{herm_to_vec, Mat2A, Mat2R};
use crate::error::{Error, Result};
use crate::grid::{deriv_s, deriv_t, Field, GridSpec, GridValue, RealField};
use crate::lorentz::{self, Lorentz};
use crate::weierstrass::{ConformalMap1D, Immersion22};

const INITIAL_DET_TOL: f64 = 1e-10;
const STEP_DET_TOL: f64 = 1e-6;
const DEGENERACY_TOL: f64 = 1e-8;
const SPLIT_TOL: f64 = 1e-8;
const HERMITIAN_TOL: f64 = 1e-10;

/// A 1-form `f da` with conformal coefficient, stored as the two split
/// component functions so the integrator can evaluate between grid nodes.
pub struct ConformalOneForm {
    plus: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    minus: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ConformalOneForm {
    pub fn new(
        plus: impl Fn(f64) -> f64 + Send + Sync + 'static,
        minus: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ConformalOneForm {
            plus: Box::new(plus),
            minus: Box::new(minus),
        }
    }

    /// `c da`.
    pub fn constant(c: f64) -> Self {
        ConformalOneForm::new(move |_| c, move |_| c)
    }

    pub fn zero() -> Self {
        ConformalOneForm::constant(0.0)
    }

    pub fn plus_at(&self, s: f64) -> f64 {
        (self.plus)(s)
    }

    pub fn minus_at(&self, t: f64) -> f64 {
        (self.minus)(t)
    }

    pub fn sample(&self, spec: GridSpec) -> ConformalMap1D {
        ConformalMap1D::from_fns(spec, |s| (self.plus)(s), |t| (self.minus)(t))
    }
}

/// Sl2(A)-valued frame field together with the sampled form coefficients it
/// was integrated from.
#[derive(Clone, Debug)]
pub struct Mat2AField {
    spec: GridSpec,
    frames: Field<Mat2A>,
    theta: ConformalMap1D,
    omega: ConformalMap1D,
}

impl Mat2AField {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn get(&self, i: usize, j: usize) -> Mat2A {
        self.frames.get(i, j)
    }

    pub fn frames(&self) -> &Field<Mat2A> {
        &self.frames
    }

    /// Mutable access, used to inject corruptions in tests and to rebuild
    /// fields loaded from disk.
    pub fn frames_mut(&mut self) -> &mut Field<Mat2A> {
        &mut self.frames
    }

    pub fn theta(&self) -> &ConformalMap1D {
        &self.theta
    }

    pub fn omega(&self) -> &ConformalMap1D {
        &self.omega
    }

    pub fn from_parts(
        frames: Field<Mat2A>,
        theta: ConformalMap1D,
        omega: ConformalMap1D,
    ) -> Result<Self> {
        let spec = frames.spec();
        if theta.spec() != spec || omega.spec() != spec {
            return Err(Error::GridMismatch(
                "form samples on a different grid".into(),
            ));
        }
        Ok(Mat2AField {
            spec,
            frames,
            theta,
            omega,
        })
    }

    /// Largest `|det - 1|` over the grid.
    pub fn unit_det_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.spec.ns {
            for j in 0..self.spec.nt {
                worst = worst.max((self.frames.get(i, j).det() - lorentz::ONE).abs_max());
            }
        }
        worst
    }
}

/// One split curve of the frame equation by classic fourth-order steps with
/// determinant renormalization.
fn rk4_curve(
    n: usize,
    x0: f64,
    h: f64,
    start: Mat2R,
    top: impl Fn(f64) -> f64,
    bottom: impl Fn(f64) -> f64,
) -> Result<Vec<Mat2R>> {
    let coeff = |x: f64| Mat2R([[0.0, top(x)], [bottom(x), 0.0]]);
    let mut out = Vec::with_capacity(n);
    out.push(start);
    let mut b = start;
    for k in 1..n {
        let x = x0 + (k - 1) as f64 * h;
        let m1 = coeff(x);
        let m2 = coeff(x + 0.5 * h);
        let m4 = coeff(x + h);
        let k1 = b * m1;
        let k2 = (b + k1.scale(0.5 * h)) * m2;
        let k3 = (b + k2.scale(0.5 * h)) * m2;
        let k4 = (b + k3.scale(h)) * m4;
        let mut next = b + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
        let det = next.det();
        let drift = (det - 1.0).abs();
        if !(drift <= STEP_DET_TOL) {
            return Err(Error::DetDrift {
                drift,
                tol: STEP_DET_TOL,
            });
        }
        next = next.scale(1.0 / det.sqrt());
        out.push(next);
        b = next;
    }
    Ok(out)
}

/// Integrates the frame equation from `b0` at the grid corner.
///
/// The two curves are independent; the assembled field satisfies the split
/// structure `B = e+ B1(s) + e- B2(t)` exactly.
pub fn integrate_frame(
    theta: &ConformalOneForm,
    omega: &ConformalOneForm,
    b0: &Mat2A,
    spec: GridSpec,
) -> Result<Mat2AField> {
    let start_defect = (b0.det() - lorentz::ONE).abs_max();
    if start_defect > INITIAL_DET_TOL {
        return Err(Error::DetDrift {
            drift: start_defect,
            tol: INITIAL_DET_TOL,
        });
    }
    let (p0, q0) = b0.split();
    let b1 = rk4_curve(spec.ns, spec.s0, spec.hs(), p0, &theta.plus, &omega.plus)?;
    let b2 = rk4_curve(spec.nt, spec.t0, spec.ht(), q0, &theta.minus, &omega.minus)?;
    let frames = Field::from_fn(spec, |i, j| Mat2A::from_split(b1[i], b2[j]));
    Ok(Mat2AField {
        spec,
        frames,
        theta: theta.sample(spec),
        omega: omega.sample(spec),
    })
}

/// Target quadric for the Hermitian square of a frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceForm {
    /// `<F,F> = -1` (anti-de Sitter).
    Ads,
    /// `<F,F> = +1`.
    S12,
}

impl SpaceForm {
    pub fn scalar_square(self) -> f64 {
        match self {
            SpaceForm::Ads => -1.0,
            SpaceForm::S12 => 1.0,
        }
    }

    fn inner(self) -> Mat2A {
        match self {
            SpaceForm::Ads => Mat2A::identity(),
            SpaceForm::S12 => Mat2A::diag_m1_1(),
        }
    }
}

/// `min |theta+ theta- -+ omega+ omega-|` over the grid; the immersion
/// degenerates where the combination vanishes.
fn degeneracy_min(b: &Mat2AField, target: SpaceForm) -> f64 {
    let sign = match target {
        SpaceForm::Ads => 1.0,
        SpaceForm::S12 => -1.0,
    };
    let (tp, tm) = (b.theta.plus(), b.theta.minus());
    let (wp, wm) = (b.omega.plus(), b.omega.minus());
    let mut min = f64::INFINITY;
    for i in 0..b.spec.ns {
        for j in 0..b.spec.nt {
            min = min.min((tp[i] * tm[j] - sign * wp[i] * wm[j]).abs());
        }
    }
    min
}

fn herm_points(b: &Mat2AField, target: SpaceForm) -> Result<Immersion22> {
    let min = degeneracy_min(b, target);
    if min <= DEGENERACY_TOL {
        return Err(Error::DegenerateImmersion { min });
    }
    let inner = target.inner();
    let mut points = Vec::with_capacity(b.spec.len());
    for i in 0..b.spec.ns {
        for j in 0..b.spec.nt {
            let frame = b.frames.get(i, j);
            let herm = frame * inner * frame.star();
            points.push(herm_to_vec(&herm, HERMITIAN_TOL)?);
        }
    }
    Ok(Immersion22::new(Field::from_values(b.spec, points)?))
}

/// `F = B B*`, membership `<F,F> = -1`.
pub fn ads_immersion(b: &Mat2AField) -> Result<Immersion22> {
    herm_points(b, SpaceForm::Ads)
}

/// `F = B diag(-1,1) B*`, membership `<F,F> = +1`.
pub fn s12_immersion(b: &Mat2AField) -> Result<Immersion22> {
    herm_points(b, SpaceForm::S12)
}

/// Largest deviation of `<F,F>` from the target constant.
pub fn membership_defect(im: &Immersion22, target: SpaceForm) -> f64 {
    let want = target.scalar_square();
    let mut worst = 0.0f64;
    let spec = im.spec();
    for i in 0..spec.ns {
        for j in 0..spec.nt {
            let x = im.get(i, j);
            worst = worst.max((crate::clifford::scalar(x, x) - want).abs());
        }
    }
    worst
}

/// Closed-form metric and shape data of a frame-integrated immersion.
#[derive(Clone, Debug)]
pub struct FlatMetricShape {
    /// Metric coefficients in the characteristic chart,
    /// `g = g_ss ds^2 + 2 g_st ds dt + g_tt dt^2`.
    pub g_ss: RealField,
    pub g_st: RealField,
    pub g_tt: RealField,
    /// Shape 1-form evaluated on `d/ds` and `d/dt`; anti-de Sitter target
    /// only, where it equals the derivative of the unit normal
    /// `nu = B diag(-1,1) B*`.
    pub shape_s: Option<Field<Mat2A>>,
    pub shape_t: Option<Field<Mat2A>>,
}

/// Evaluates the displayed metric `(theta + omega_bar)(omega + theta_bar)`
/// (sign-adjusted for the second quadric) and, for the anti-de Sitter target,
/// the shape 1-form `B ((0, theta - omega_bar), (theta_bar - omega, 0)) B*`.
pub fn flat_metric_shape(b: &Mat2AField, target: SpaceForm) -> FlatMetricShape {
    let spec = b.spec;
    let (tp, tm) = (b.theta.plus(), b.theta.minus());
    let (wp, wm) = (b.omega.plus(), b.omega.minus());
    let sign = match target {
        SpaceForm::Ads => 1.0,
        SpaceForm::S12 => -1.0,
    };
    let g_ss = Field::from_fn(spec, |i, _| sign * tp[i] * wp[i]);
    let g_st = Field::from_fn(spec, |i, j| 0.5 * (tp[i] * tm[j] + wp[i] * wm[j]));
    let g_tt = Field::from_fn(spec, |_, j| sign * tm[j] * wm[j]);

    let (shape_s, shape_t) = match target {
        SpaceForm::S12 => (None, None),
        SpaceForm::Ads => {
            let eval = |a: &dyn Fn(usize, usize) -> Lorentz,
                        c: &dyn Fn(usize, usize) -> Lorentz| {
                Field::from_fn(spec, |i, j| {
                    let frame = b.frames.get(i, j);
                    let coeff = Mat2A([[lorentz::ZERO, a(i, j)], [c(i, j), lorentz::ZERO]]);
                    frame * coeff * frame.star()
                })
            };
            let shape_s = eval(&|i, _| Lorentz::from_split(tp[i], -wp[i]), &|i, _| {
                Lorentz::from_split(-wp[i], tp[i])
            });
            let shape_t = eval(&|_, j| Lorentz::from_split(-wm[j], tm[j]), &|_, j| {
                Lorentz::from_split(tm[j], -wm[j])
            });
            (Some(shape_s), Some(shape_t))
        }
    };
    FlatMetricShape {
        g_ss,
        g_st,
        g_tt,
        shape_s,
        shape_t,
    }
}

/// Finite-difference residual of the frame equation: per node, the largest
/// entry of `B^-1 d_a B - ((0, theta), (omega, 0))` and of `B^-1 d_ahat B`.
/// Second order on the interior, first order on ring 0.
pub fn frame_equation_residual(b: &Mat2AField) -> Result<RealField> {
    let spec = b.spec;
    let bs = deriv_s(&b.frames);
    let bt = deriv_t(&b.frames);
    let f_theta = b.theta.field();
    let f_omega = b.omega.field();
    let zero = <Mat2A as GridValue>::zero();

    let combine = |x: Mat2A, y: Mat2A| {
        // d_a from the split parts: plus component of d/ds, minus of d/dt.
        let mut m = zero;
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] = Lorentz::from_split(x.0[r][c].split().plus, y.0[r][c].split().minus);
            }
        }
        m
    };

    let mut values = Vec::with_capacity(spec.len());
    for i in 0..spec.ns {
        for j in 0..spec.nt {
            let inv = b.frames.get(i, j).inverse()?;
            let da = combine(bs.get(i, j), bt.get(i, j));
            let dahat = combine(bt.get(i, j), bs.get(i, j));
            let target = Mat2A([
                [lorentz::ZERO, f_theta.get(i, j)],
                [f_omega.get(i, j), lorentz::ZERO],
            ]);
            let r1 = (inv * da).abs_max_diff(&target);
            let r2 = (inv * dahat).abs_max_diff(&zero);
            values.push(r1.max(r2));
        }
    }
    Field::from_values(spec, values)
}

/// The two real unit-determinant curves of a split frame field.
#[derive(Clone, Debug)]
pub struct CurvePair {
    pub b1: Vec<Mat2R>,
    pub b2: Vec<Mat2R>,
}

impl CurvePair {
    /// `B(s,t) = e+ B1(s) + e- B2(t)`.
    pub fn reconstruct(&self, spec: GridSpec) -> Result<Field<Mat2A>> {
        if self.b1.len() != spec.ns {
            return Err(Error::ProfileLength {
                got: self.b1.len(),
                want: spec.ns,
            });
        }
        if self.b2.len() != spec.nt {
            return Err(Error::ProfileLength {
                got: self.b2.len(),
                want: spec.nt,
            });
        }
        Ok(Field::from_fn(spec, |i, j| {
            Mat2A::from_split(self.b1[i], self.b2[j])
        }))
    }
}

/// Splits a bare frame field into its two curves, verifying that the plus
/// part varies only with `s` and the minus part only with `t`.  Works on
/// fields loaded from disk, where the generating forms are unavailable.
pub fn split_frames(frames: &Field<Mat2A>) -> Result<CurvePair> {
    let spec = frames.spec();
    let b1: Vec<Mat2R> = (0..spec.ns).map(|i| frames.get(i, 0).split().0).collect();
    let b2: Vec<Mat2R> = (0..spec.nt).map(|j| frames.get(0, j).split().1).collect();

    let mut defect = 0.0f64;
    for i in 0..spec.ns {
        for j in 0..spec.nt {
            let (p, q) = frames.get(i, j).split();
            defect = defect
                .max(p.abs_max_diff(&b1[i]))
                .max(q.abs_max_diff(&b2[j]));
        }
    }
    if defect > SPLIT_TOL {
        return Err(Error::NotSplit {
            defect,
            tol: SPLIT_TOL,
        });
    }
    let drift = b1
        .iter()
        .chain(b2.iter())
        .map(|m| (m.det() - 1.0).abs())
        .fold(0.0f64, f64::max);
    if drift > SPLIT_TOL {
        return Err(Error::DetDrift {
            drift,
            tol: SPLIT_TOL,
        });
    }
    Ok(CurvePair { b1, b2 })
}

/// [`split_frames`] on an integrated frame field.
pub fn product_curves_decompose(b: &Mat2AField) -> Result<CurvePair> {
    split_frames(&b.frames)
}
