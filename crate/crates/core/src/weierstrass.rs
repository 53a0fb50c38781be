//! Spinor representation of Lorentz surfaces in R^{2,2}.
//!
//! Given Dirac data `(phi1, phi2, psi1, psi2, p, q)` the four coordinate
//! 1-forms
//!
//! ```text
//!     d(F0 + F1) = -(psi1 phihat1 da + psihat1 phi1 dahat)
//!     d(F0 - F1) =   psi2 phihat2 da + psihat2 phi2 dahat
//!     d(F2 + s F3) = psi1 phihat2 da + psihat2 phi1 dahat
//!     d(F2 - s F3) = psi2 phihat1 da + psihat1 phi2 dahat
//! ```
//!
//! are closed, and integrating them from the grid corner produces a conformal
//! immersion with induced metric `lambda^2 (-du^2 + dv^2)`,
//! `lambda^2 = sqnorm(psi2 phi1 - psi1 phi2)`, and mean curvature norm
//! `<H,H> = p q / lambda^2`.  This module integrates the forms, evaluates the
//! closed-form metric and curvature fields, and implements three
//! specializations: minimal surfaces from four single-variable profiles, the
//! reduced system describing surfaces in R^{2,1}, and the two equivalent
//! spinor forms of the R^{2,1} minimal representation.

use serde::{Deserialize, Serialize};

use crate::clifford::Vec22;
use crate::dirac::{dirac_residual, pair_residual_fields, DiracData, SpinorPair};
use crate::error::{Error, Result};
use crate::grid::{
    deriv_u, deriv_v, is_conformal_samples, AField, ConformalityReport, Field, GridSpec, RealField,
};
use crate::lorentz::Lorentz;

/// Thresholds used by the pipeline checks.  All are absolute except the two
/// `*_factor` entries, which multiply `h_max^2`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    /// Interior Dirac residual limit, in units of `h_max^2`.
    pub residual_factor: f64,
    /// Two-path integration defect limit, in units of `h_max^2`.
    pub path_factor: f64,
    /// Limit on the sigma parts of the real coordinate legs and on the
    /// conjugacy defect of the `F2 +- sigma F3` legs.
    pub reality: f64,
    /// Lower bound on `|sqnorm(psi2 phi1 - psi1 phi2)|` (and on the reduced
    /// metric factors of the specializations).
    pub nondegeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual_factor: 10.0,
            path_factor: 10.0,
            reality: 1e-10,
            nondegeneracy: 1e-8,
        }
    }
}

impl Tolerances {
    /// Uniformly loosens (k > 1) or tightens (k < 1) every threshold.
    pub fn scaled(&self, k: f64) -> Tolerances {
        Tolerances {
            residual_factor: self.residual_factor * k,
            path_factor: self.path_factor * k,
            reality: self.reality * k,
            nondegeneracy: self.nondegeneracy * k,
        }
    }
}

/// A 1-form `P ds + Q dt` with A-valued coefficient fields.
#[derive(Clone, Debug)]
pub struct OneForm {
    pub p: AField,
    pub q: AField,
}

/// Staircase orders for path integration from the grid corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathOrder {
    /// Along `{t = t0}` first, then up in `t`.
    SThenT,
    /// Along `{s = s0}` first, then across in `s`.
    TThenS,
}

impl OneForm {
    /// Converts the null-coordinate presentation `A da + B dahat` via
    /// `da = e+ ds + e- dt`, `dahat = e+ dt + e- ds`.
    pub fn from_null_coeffs(a: &AField, b: &AField) -> Result<Self> {
        let p = a.zip_map(b, |x, y| {
            Lorentz::from_split(x.split().plus, y.split().minus)
        })?;
        let q = b.zip_map(a, |x, y| {
            Lorentz::from_split(x.split().plus, y.split().minus)
        })?;
        Ok(OneForm { p, q })
    }

    /// A form `c da` with no `dahat` part.
    pub fn from_da_coeff(c: &AField) -> Self {
        let p = c.map(|x| Lorentz::from_split(x.split().plus, 0.0));
        let q = c.map(|x| Lorentz::from_split(0.0, x.split().minus));
        OneForm { p, q }
    }

    /// Cumulative trapezoidal integral along the staircase path, zero at the
    /// grid corner `(s0, t0)`.
    pub fn integrate(&self, order: PathOrder) -> AField {
        let spec = self.p.spec();
        let (hs, ht) = (spec.hs(), spec.ht());
        let mut v = Field::constant(spec, crate::lorentz::ZERO);
        match order {
            PathOrder::SThenT => {
                for i in 1..spec.ns {
                    let step = (self.p.get(i - 1, 0) + self.p.get(i, 0)) * (0.5 * hs);
                    v.set(i, 0, v.get(i - 1, 0) + step);
                }
                for i in 0..spec.ns {
                    for j in 1..spec.nt {
                        let step = (self.q.get(i, j - 1) + self.q.get(i, j)) * (0.5 * ht);
                        v.set(i, j, v.get(i, j - 1) + step);
                    }
                }
            }
            PathOrder::TThenS => {
                for j in 1..spec.nt {
                    let step = (self.q.get(0, j - 1) + self.q.get(0, j)) * (0.5 * ht);
                    v.set(0, j, v.get(0, j - 1) + step);
                }
                for j in 0..spec.nt {
                    for i in 1..spec.ns {
                        let step = (self.p.get(i - 1, j) + self.p.get(i, j)) * (0.5 * hs);
                        v.set(i, j, v.get(i - 1, j) + step);
                    }
                }
            }
        }
        v
    }

    /// Sup distance between the two staircase integrals; O(h^2) for a closed
    /// form, O(1) otherwise.
    pub fn path_defect(&self) -> f64 {
        let a = self.integrate(PathOrder::SThenT);
        let b = self.integrate(PathOrder::TThenS);
        a.zip_map(&b, |x, y| x - y).expect("same grid").max_abs()
    }
}

/// A sampled immersion of the grid rectangle into R^{2,2}.
#[derive(Clone, Debug, PartialEq)]
pub struct Immersion22 {
    points: Field<Vec22>,
    basepoint: Vec22,
}

impl Immersion22 {
    /// Wraps a point field; the corner value becomes the basepoint.
    pub fn new(points: Field<Vec22>) -> Self {
        let basepoint = points.get(0, 0);
        Immersion22 { points, basepoint }
    }

    pub fn spec(&self) -> GridSpec {
        self.points.spec()
    }

    pub fn get(&self, i: usize, j: usize) -> Vec22 {
        self.points.get(i, j)
    }

    pub fn points(&self) -> &Field<Vec22> {
        &self.points
    }

    pub fn basepoint(&self) -> Vec22 {
        self.basepoint
    }

    /// One coordinate as a real field.
    pub fn coordinate(&self, k: usize) -> RealField {
        self.points.map(|x| x.0[k])
    }

    pub fn max_abs_diff(&self, other: &Immersion22) -> f64 {
        self.points
            .zip_map(other.points(), |x, y| (x - y).abs_max())
            .map(|f| f.max_abs())
            .unwrap_or(f64::INFINITY)
    }
}

/// Immersion plus the measured integration diagnostics.
#[derive(Clone, Debug)]
pub struct ImmersionBuild {
    pub immersion: Immersion22,
    /// Largest two-path discrepancy among the four coordinate forms.
    pub path_defect: f64,
    /// Largest sigma part of the two real legs.
    pub reality_defect: f64,
    /// Largest deviation of the fourth leg from the hat of the third.
    pub conjugacy_defect: f64,
    /// Interior Dirac residual of the input data.
    pub residual: f64,
    /// Minimum of `|sqnorm(psi2 phi1 - psi1 phi2)|`.
    pub min_lambda_sq: f64,
}

fn hat_field(f: &AField) -> AField {
    f.map(Lorentz::hat)
}

fn product(a: &AField, b: &AField) -> AField {
    a.zip_map(b, |x, y| x * y).expect("same grid")
}

/// The four coordinate 1-forms of the representation, in `(ds, dt)`
/// coefficients, ordered `(F0+F1, F0-F1, F2+sF3, F2-sF3)`.
pub fn coordinate_forms(d: &DiracData) -> [OneForm; 4] {
    let phihat1 = hat_field(&d.phi1);
    let phihat2 = hat_field(&d.phi2);
    let psihat1 = hat_field(&d.psi1);
    let psihat2 = hat_field(&d.psi2);
    let neg = |f: AField| f.map(|x| -x);

    let w_plus = OneForm::from_null_coeffs(
        &neg(product(&d.psi1, &phihat1)),
        &neg(product(&psihat1, &d.phi1)),
    )
    .expect("same grid");
    let w_minus =
        OneForm::from_null_coeffs(&product(&d.psi2, &phihat2), &product(&psihat2, &d.phi2))
            .expect("same grid");
    let z = OneForm::from_null_coeffs(&product(&d.psi1, &phihat2), &product(&psihat2, &d.phi1))
        .expect("same grid");
    let z_hat = OneForm::from_null_coeffs(&product(&d.psi2, &phihat1), &product(&psihat1, &d.phi2))
        .expect("same grid");
    [w_plus, w_minus, z, z_hat]
}

/// Largest two-path discrepancy among the four coordinate forms; O(h^2) when
/// the Dirac system holds, O(1) when it is violated.
pub fn path_independence_check(d: &DiracData) -> f64 {
    coordinate_forms(d)
        .iter()
        .map(OneForm::path_defect)
        .fold(0.0, f64::max)
}

/// Integrates the coordinate forms into an immersion anchored at `basepoint`.
///
/// Preconditions are enforced: the Dirac residual, the nondegeneracy of the
/// spinor pair, path independence, and the reality/conjugacy structure of the
/// integrated legs.
pub fn integrate_immersion(
    d: &DiracData,
    basepoint: Vec22,
    tol: &Tolerances,
) -> Result<ImmersionBuild> {
    let spec = d.spec();
    let residual = dirac_residual(d);
    residual.check(tol.residual_factor)?;

    let (min_lambda_sq, ok) = d.nondegeneracy(tol.nondegeneracy);
    if !ok {
        return Err(Error::NondegeneracyFailed { min: min_lambda_sq });
    }

    let forms = coordinate_forms(d);
    let path_defect = forms.iter().map(OneForm::path_defect).fold(0.0, f64::max);
    let h2 = spec.h_max() * spec.h_max();
    if path_defect > tol.path_factor * h2 {
        return Err(Error::PathDependence {
            defect: path_defect,
            tol: tol.path_factor * h2,
        });
    }

    let v: Vec<AField> = forms
        .iter()
        .map(|f| f.integrate(PathOrder::SThenT))
        .collect();

    let reality_defect = v[0]
        .map(|x| x.im())
        .max_abs()
        .max(v[1].map(|x| x.im()).max_abs());
    let conjugacy_defect = v[3]
        .zip_map(&v[2], |a, b| a - b.hat())
        .expect("same grid")
        .max_abs();
    let defect = reality_defect.max(conjugacy_defect);
    if defect > tol.reality {
        return Err(Error::RealityDefect {
            defect,
            tol: tol.reality,
        });
    }

    let points = Field::from_fn(spec, |i, j| {
        let wp = v[0].get(i, j);
        let wm = v[1].get(i, j);
        let z = v[2].get(i, j);
        let zh = v[3].get(i, j);
        basepoint
            + Vec22([
                0.5 * (wp.re() + wm.re()),
                0.5 * (wp.re() - wm.re()),
                0.5 * (z.re() + zh.re()),
                0.5 * (z.im() - zh.im()),
            ])
    });

    Ok(ImmersionBuild {
        immersion: Immersion22::new(points),
        path_defect,
        reality_defect,
        conjugacy_defect,
        residual: residual.interior,
        min_lambda_sq,
    })
}

/// Closed-form metric and curvature fields of the representation.
#[derive(Clone, Debug)]
pub struct MetricReport {
    /// Conformal factor `sqnorm(psi2 phi1 - psi1 phi2)`; the induced metric
    /// is `lambda_sq (-du^2 + dv^2)`.
    pub lambda_sq: RealField,
    /// Mean curvature square `4 p q / lambda_sq`. The factor 4 comes from
    /// the halving in u = (s+t)/2, v = (s-t)/2: per characteristic cell the
    /// conformal factor is `lambda_sq / 4`.
    pub h_sqnorm_formula: RealField,
    /// True iff `lambda_sq` stays strictly positive on the grid.
    pub signature_ok: bool,
}

pub fn metric_formula(d: &DiracData) -> MetricReport {
    let lambda_sq = d.cross().map(|x| x.sqnorm());
    let h_sqnorm_formula = Field::from_fn(d.spec(), |i, j| {
        4.0 * d.p.get(i, j) * d.q.get(i, j) / lambda_sq.get(i, j)
    });
    let signature_ok = lambda_sq.values().iter().all(|&x| x > 0.0);
    MetricReport {
        lambda_sq,
        h_sqnorm_formula,
        signature_ok,
    }
}

/// The field `4 p q / lambda_sq`, guarded against a vanishing conformal factor.
pub fn mean_curvature_formula(d: &DiracData, tol: f64) -> Result<RealField> {
    let report = metric_formula(d);
    let min = report.lambda_sq.min_abs();
    if min <= tol {
        return Err(Error::DegenerateMetric { min });
    }
    Ok(report.h_sqnorm_formula)
}

/// A conformal map `e+ f_plus(s) + e- f_minus(t)` stored as its two
/// single-variable profiles on the grid axes.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMap1D {
    spec: GridSpec,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl ConformalMap1D {
    pub fn from_profiles(spec: GridSpec, plus: Vec<f64>, minus: Vec<f64>) -> Result<Self> {
        if plus.len() != spec.ns {
            return Err(Error::ProfileLength {
                got: plus.len(),
                want: spec.ns,
            });
        }
        if minus.len() != spec.nt {
            return Err(Error::ProfileLength {
                got: minus.len(),
                want: spec.nt,
            });
        }
        Ok(ConformalMap1D { spec, plus, minus })
    }

    pub fn from_fns(
        spec: GridSpec,
        mut f_plus: impl FnMut(f64) -> f64,
        mut f_minus: impl FnMut(f64) -> f64,
    ) -> Self {
        ConformalMap1D {
            spec,
            plus: (0..spec.ns).map(|i| f_plus(spec.s(i))).collect(),
            minus: (0..spec.nt).map(|j| f_minus(spec.t(j))).collect(),
        }
    }

    /// Samples a closed-form conformal map by restricting each split
    /// component to its axis.
    pub fn from_map(spec: GridSpec, mut f: impl FnMut(Lorentz) -> Lorentz) -> Self {
        ConformalMap1D {
            spec,
            plus: (0..spec.ns)
                .map(|i| f(Lorentz::from_split(spec.s(i), spec.t0)).split().plus)
                .collect(),
            minus: (0..spec.nt)
                .map(|j| f(Lorentz::from_split(spec.s0, spec.t(j))).split().minus)
                .collect(),
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn plus(&self) -> &[f64] {
        &self.plus
    }

    pub fn minus(&self) -> &[f64] {
        &self.minus
    }

    pub fn field(&self) -> AField {
        Field::from_fn(self.spec, |i, j| {
            Lorentz::from_split(self.plus[i], self.minus[j])
        })
    }

    /// The hat-conjugate map as a grid field (split components swapped).
    pub fn hat_field(&self) -> AField {
        Field::from_fn(self.spec, |i, j| {
            Lorentz::from_split(self.minus[j], self.plus[i])
        })
    }
}

/// Minimal immersion plus the zero-potential Dirac data it came from.
#[derive(Clone, Debug)]
pub struct MinimalBuild {
    pub immersion: Immersion22,
    pub data: DiracData,
}

/// Evaluates the minimal-surface representation
///
/// ```text
///     F0 = Re I(-psi1 phihat1 + psi2 phihat2)
///     F1 = Re I(-psi1 phihat1 - psi2 phihat2)
///     F2 = Re I( psi2 phihat1 + psi1 phihat2)
///     F3 = Im I(-psi2 phihat1 + psi1 phihat2)
/// ```
///
/// where `I(c)` is the path integral of `c da` from the grid corner.  All
/// four inputs are conformal by construction, so the integrands are conformal
/// and each integral reduces to two single-variable quadratures.
pub fn minimal_immersion(
    psi1: &ConformalMap1D,
    psi2: &ConformalMap1D,
    phihat1: &ConformalMap1D,
    phihat2: &ConformalMap1D,
    basepoint: Vec22,
    tol: &Tolerances,
) -> Result<MinimalBuild> {
    let spec = psi1.spec();
    if psi2.spec() != spec || phihat1.spec() != spec || phihat2.spec() != spec {
        return Err(Error::GridMismatch("profiles on different grids".into()));
    }

    let psi1_f = psi1.field();
    let psi2_f = psi2.field();
    let phihat1_f = phihat1.field();
    let phihat2_f = phihat2.field();
    let data = DiracData::new(
        phihat1.hat_field(),
        psi1_f.clone(),
        phihat2.hat_field(),
        psi2_f.clone(),
        Field::constant(spec, 0.0),
        Field::constant(spec, 0.0),
    )?;
    let (min, ok) = data.nondegeneracy(tol.nondegeneracy);
    if !ok {
        return Err(Error::NondegeneracyFailed { min });
    }

    let a = product(&psi1_f, &phihat1_f); // psi1 phihat1
    let b = product(&psi2_f, &phihat2_f); // psi2 phihat2
    let c = product(&psi2_f, &phihat1_f); // psi2 phihat1
    let e = product(&psi1_f, &phihat2_f); // psi1 phihat2

    let combine = |x: &AField, y: &AField, sx: f64, sy: f64| -> AField {
        x.zip_map(y, |a, b| a * sx + b * sy).expect("same grid")
    };
    let i0 = OneForm::from_da_coeff(&combine(&a, &b, -1.0, 1.0)).integrate(PathOrder::SThenT);
    let i1 = OneForm::from_da_coeff(&combine(&a, &b, -1.0, -1.0)).integrate(PathOrder::SThenT);
    let i2 = OneForm::from_da_coeff(&combine(&c, &e, 1.0, 1.0)).integrate(PathOrder::SThenT);
    let i3 = OneForm::from_da_coeff(&combine(&c, &e, -1.0, 1.0)).integrate(PathOrder::SThenT);

    let points = Field::from_fn(spec, |i, j| {
        basepoint
            + Vec22([
                i0.get(i, j).re(),
                i1.get(i, j).re(),
                i2.get(i, j).re(),
                i3.get(i, j).im(),
            ])
    });

    Ok(MinimalBuild {
        immersion: Immersion22::new(points),
        data,
    })
}

/// Sign choice for the second and third legs of the reduced representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Reduced immersion into the slice `{x0 = const}`, i.e. R^{2,1}.
#[derive(Clone, Debug)]
pub struct R21Build {
    pub immersion: Immersion22,
    /// Metric factor `sqnorm(phi2) - sqnorm(psi2)`; the induced metric is
    /// `-rho^2 da dahat` and `<H,H> = 4 p^2 / rho^2` in the halved
    /// coordinates u = (s+t)/2, v = (s-t)/2.
    pub rho: RealField,
    pub h_sqnorm_formula: RealField,
    pub path_defect: f64,
    pub reality_defect: f64,
    pub conjugacy_defect: f64,
}

/// Integrates the reduced system `d_a phi2 = -p psi2, d_ahat psi2 = -p phi2`
/// into a surface with `F0 = basepoint[0]` constant:
///
/// ```text
///     F1 = -I(psi2 phihat2 da + psihat2 phi2 dahat)
///     F2 + s F3 = sign * I(phihat2^2 da + psihat2^2 dahat)
///     F2 - s F3 = sign * I(psi2^2 da + phi2^2 dahat)
/// ```
pub fn r21_immersion(
    phi2: &AField,
    psi2: &AField,
    p: &RealField,
    sign: Sign,
    basepoint: Vec22,
    tol: &Tolerances,
) -> Result<R21Build> {
    let spec = phi2.spec();
    if psi2.spec() != spec || p.spec() != spec {
        return Err(Error::GridMismatch(
            "reduced fields on different grids".into(),
        ));
    }

    let pair = SpinorPair {
        phi: phi2.clone(),
        psi: psi2.clone(),
    };
    let (r_phi, r_psi) = pair_residual_fields(&pair, p, p)?;
    let mut interior = 0.0f64;
    for i in 1..spec.ns - 1 {
        for j in 1..spec.nt - 1 {
            interior = interior.max(r_phi.get(i, j).abs_max().max(r_psi.get(i, j).abs_max()));
        }
    }
    let h2 = spec.h_max() * spec.h_max();
    if interior > tol.residual_factor * h2 {
        return Err(Error::ResidualTooLarge {
            max: interior,
            tol: tol.residual_factor * h2,
        });
    }

    let rho = phi2
        .zip_map(psi2, |f, g| f.sqnorm() - g.sqnorm())
        .expect("same grid");
    let min = rho.min_abs();
    if min <= tol.nondegeneracy {
        return Err(Error::DegenerateMetric { min });
    }

    let phihat2 = hat_field(phi2);
    let psihat2 = hat_field(psi2);
    let s = sign.factor();

    let f1_form = OneForm::from_null_coeffs(
        &product(psi2, &phihat2).map(|x| -x),
        &product(&psihat2, phi2).map(|x| -x),
    )?;
    let z_form = OneForm::from_null_coeffs(
        &product(&phihat2, &phihat2).map(|x| x * s),
        &product(&psihat2, &psihat2).map(|x| x * s),
    )?;
    let zh_form = OneForm::from_null_coeffs(
        &product(psi2, psi2).map(|x| x * s),
        &product(phi2, phi2).map(|x| x * s),
    )?;

    let path_defect = [&f1_form, &z_form, &zh_form]
        .iter()
        .map(|f| f.path_defect())
        .fold(0.0, f64::max);
    if path_defect > tol.path_factor * h2 {
        return Err(Error::PathDependence {
            defect: path_defect,
            tol: tol.path_factor * h2,
        });
    }

    let v1 = f1_form.integrate(PathOrder::SThenT);
    let vz = z_form.integrate(PathOrder::SThenT);
    let vzh = zh_form.integrate(PathOrder::SThenT);

    let reality_defect = v1.map(|x| x.im()).max_abs();
    let conjugacy_defect = vzh
        .zip_map(&vz, |a, b| a - b.hat())
        .expect("same grid")
        .max_abs();
    let defect = reality_defect.max(conjugacy_defect);
    if defect > tol.reality {
        return Err(Error::RealityDefect {
            defect,
            tol: tol.reality,
        });
    }

    let points = Field::from_fn(spec, |i, j| {
        let z = vz.get(i, j);
        let zh = vzh.get(i, j);
        basepoint
            + Vec22([
                0.0,
                v1.get(i, j).re(),
                0.5 * (z.re() + zh.re()),
                0.5 * (z.im() - zh.im()),
            ])
    });

    let h_sqnorm_formula = Field::from_fn(spec, |i, j| {
        let r = rho.get(i, j);
        4.0 * p.get(i, j) * p.get(i, j) / (r * r)
    });

    Ok(R21Build {
        immersion: Immersion22::new(points),
        rho,
        h_sqnorm_formula,
        path_defect,
        reality_defect,
        conjugacy_defect,
    })
}

/// The two equivalent spinor forms of the minimal R^{2,1} representation.
#[derive(Clone, Debug)]
pub struct KonderakBuild {
    /// The quadratic differential `chi1^2 da` in `(ds, dt)` coefficients.
    pub phi_form: OneForm,
    /// The quotient map `chi2 / chi1`.
    pub g_map: AField,
    /// Immersion from the chi-pair formulas.
    pub f_chi: Immersion22,
    /// Immersion from the `(g, Phi)` formulas.
    pub f_gphi: Immersion22,
    /// Pointwise sup distance between the two.
    pub agreement: f64,
}

/// Evaluates both presentations of the minimal R^{2,1} representation from a
/// conformal pair `(chi1, chi2)`:
///
/// ```text
///     chi form:  F1 = Re I(chi1 chi2 / 2)   (g, Phi) form with Phi = chi1^2 da,
///                F2 = Re I(chi1^2 + chi2^2)  g = chi2/chi1:
///                F3 = Im I(chi1^2 - chi2^2)  F1 = Re I(g Phi / 2), ...
/// ```
///
/// The quotient requires `chi1` to stay off the null cone.
pub fn konderak_form(
    chi1: &ConformalMap1D,
    chi2: &ConformalMap1D,
    tol: &Tolerances,
) -> Result<KonderakBuild> {
    let spec = chi1.spec();
    if chi2.spec() != spec {
        return Err(Error::GridMismatch(
            "chi profiles on different grids".into(),
        ));
    }
    let c1 = chi1.field();
    let c2 = chi2.field();

    let min = c1.map(|x| x.sqnorm()).min_abs();
    if min <= tol.nondegeneracy {
        return Err(Error::NullChi1 { min });
    }

    // chi-pair route.
    let half_c1c2 = product(&c1, &c2).map(|x| x * 0.5);
    let c1_sq = product(&c1, &c1);
    let c2_sq = product(&c2, &c2);
    let sum = c1_sq.zip_map(&c2_sq, |a, b| a + b)?;
    let diff = c1_sq.zip_map(&c2_sq, |a, b| a - b)?;

    let i1 = OneForm::from_da_coeff(&half_c1c2).integrate(PathOrder::SThenT);
    let i2 = OneForm::from_da_coeff(&sum).integrate(PathOrder::SThenT);
    let i3 = OneForm::from_da_coeff(&diff).integrate(PathOrder::SThenT);
    let f_chi = Immersion22::new(Field::from_fn(spec, |i, j| {
        Vec22([0.0, i1.get(i, j).re(), i2.get(i, j).re(), i3.get(i, j).im()])
    }));

    // (g, Phi) route: the same integrals assembled through the quotient.
    let g_map = c1.zip_map(&c2, |a, b| b * a.inverse().expect("checked non-null"))?;
    let g_sq = product(&g_map, &g_map);
    let one = AField::sample(spec, |_| Lorentz::real(1.0));
    let half_g_phi = g_map
        .zip_map(&c1_sq, |g, f| g * f * 0.5)
        .expect("same grid");
    let sum_g = one.zip_map(&g_sq, |o, g| o + g)?;
    let diff_g = one.zip_map(&g_sq, |o, g| o - g)?;
    let j1 = OneForm::from_da_coeff(&half_g_phi).integrate(PathOrder::SThenT);
    let j2 = OneForm::from_da_coeff(&product(&sum_g, &c1_sq)).integrate(PathOrder::SThenT);
    let j3 = OneForm::from_da_coeff(&product(&diff_g, &c1_sq)).integrate(PathOrder::SThenT);
    let f_gphi = Immersion22::new(Field::from_fn(spec, |i, j| {
        Vec22([0.0, j1.get(i, j).re(), j2.get(i, j).re(), j3.get(i, j).im()])
    }));

    let agreement = f_chi.max_abs_diff(&f_gphi);
    let phi_form = OneForm::from_da_coeff(&c1_sq);

    Ok(KonderakBuild {
        phi_form,
        g_map,
        f_chi,
        f_gphi,
        agreement,
    })
}

/// The A-valued potentials `w_k = dF_k(d/du) + sigma dF_k(d/dv)` of the four
/// coordinate 1-forms `w_k da` of an immersion, with the Lorentz structure
/// `sigma(d/du) = d/dv` of conformal coordinates.
pub fn immersion_one_forms(im: &Immersion22) -> [AField; 4] {
    std::array::from_fn(|k| {
        let f = im.coordinate(k);
        let du = deriv_u(&f);
        let dv = deriv_v(&f);
        du.zip_map(&dv, Lorentz::new).expect("same grid")
    })
}

/// Minimality criterion: an immersion is minimal iff all four coordinate
/// forms are conformal.  Returns the verdict and the per-form reports.
pub fn conformal_one_form_criterion(
    forms: &[AField; 4],
    tol: f64,
) -> (bool, [ConformalityReport; 4]) {
    let reports: [ConformalityReport; 4] =
        std::array::from_fn(|k| is_conformal_samples(&forms[k], tol));
    let all = reports.iter().all(|r| r.conformal);
    (all, reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::d_ahat;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn worked_minimal_data(spec: GridSpec) -> DiracData {
        // psi1 = 1, psi2 = 0, phi1 = ahat, phi2 = 1, p = q = 0.
        DiracData::new(
            AField::sample(spec, |a| a.hat()),
            AField::sample(spec, |_| Lorentz::real(1.0)),
            AField::sample(spec, |_| Lorentz::real(1.0)),
            AField::sample(spec, |_| Lorentz::real(0.0)),
            Field::constant(spec, 0.0),
            Field::constant(spec, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn worked_example_integrates_to_saddle_plus_plane() {
        let spec = GridSpec::new(-0.5, 0.5, -0.5, 0.5, 17, 17).unwrap();
        let base = Vec22([1.0, -2.0, 0.25, 0.0]);
        let build = integrate_immersion(&worked_minimal_data(spec), base, &tols()).unwrap();
        let (u0, v0) = spec.uv(0, 0);
        let q0 = -0.5 * (u0 * u0 + v0 * v0);
        for i in 0..spec.ns {
            for j in 0..spec.nt {
                let (u, v) = spec.uv(i, j);
                let q = -0.5 * (u * u + v * v);
                let expect = base + Vec22([q - q0, q - q0, u - u0, v - v0]);
                let got = build.immersion.get(i, j);
                assert!((got - expect).abs_max() < 1e-12, "node ({i},{j})");
            }
        }
        assert!(build.path_defect < 1e-12);
        assert!(build.reality_defect < 1e-14);
        assert!(build.conjugacy_defect < 1e-14);
        assert_eq!(build.immersion.get(0, 0), base);
    }

    #[test]
    fn degenerate_data_is_rejected() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 9, 9).unwrap();
        // psi2 phi1 - psi1 phi2 = 0 identically.
        let d = DiracData::new(
            AField::sample(spec, |_| Lorentz::real(0.0)),
            AField::sample(spec, |_| Lorentz::real(1.0)),
            AField::sample(spec, |_| Lorentz::real(0.0)),
            AField::sample(spec, |_| Lorentz::real(0.0)),
            Field::constant(spec, 0.0),
            Field::constant(spec, 0.0),
        )
        .unwrap();
        assert!(matches!(
            integrate_immersion(&d, Vec22([0.0; 4]), &tols()),
            Err(Error::NondegeneracyFailed { .. })
        ));
    }

    #[test]
    fn corrupted_field_breaks_path_independence() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 17, 17).unwrap();
        let mut d = worked_minimal_data(spec);
        // psi1 = exp(ahat) is not conformal, so d(F0 + F1) is not closed and
        // the two staircases land on different values.
        d.psi1 = AField::sample(spec, |a| a.hat().exp());
        let defect = path_independence_check(&d);
        assert!(defect > 1e-2, "defect {defect}");
        // The residual gate catches it before integration.
        assert!(matches!(
            integrate_immersion(&d, Vec22([0.0; 4]), &tols()),
            Err(Error::ResidualTooLarge { .. })
        ));
    }

    #[test]
    fn path_defect_of_exact_data_is_rounding_level() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 17, 17).unwrap();
        let defect = path_independence_check(&worked_minimal_data(spec));
        assert!(defect < 1e-13, "defect {defect}");
    }

    #[test]
    fn metric_formula_on_worked_example() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 9, 9).unwrap();
        let rep = metric_formula(&worked_minimal_data(spec));
        assert!(rep.signature_ok);
        for &x in rep.lambda_sq.values() {
            assert!((x - 1.0).abs() < 1e-13);
        }
        for &x in rep.h_sqnorm_formula.values() {
            assert!(x.abs() < 1e-13);
        }
    }

    #[test]
    fn mean_curvature_formula_constant_case() {
        // phi2 = e+ e^{-w} + e- mu e^{w}, psi2 likewise with the minus leg
        // negated, embedded via phi1 = psihat2, psi1 = phihat2, p = q = c.
        // The surface is a cylinder over a hyperbola of radius mu/(2c); its
        // curvature square is c^2/mu^2 and lambda^2 = 4 mu^2.
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 9, 9).unwrap();
        let c = 0.7;
        for mu in [1.0, 0.65] {
            let phi2 = AField::sample(spec, |a| {
                let sp = a.split();
                let w = c * (sp.plus + sp.minus);
                Lorentz::from_split((-w).exp(), mu * w.exp())
            });
            let psi2 = AField::sample(spec, |a| {
                let sp = a.split();
                let w = c * (sp.plus + sp.minus);
                Lorentz::from_split((-w).exp(), -mu * w.exp())
            });
            let d = DiracData::new(
                hat_field(&psi2),
                hat_field(&phi2),
                phi2,
                psi2,
                Field::constant(spec, c),
                Field::constant(spec, c),
            )
            .unwrap();
            let h = mean_curvature_formula(&d, 1e-8).unwrap();
            let want = c * c / (mu * mu);
            for &x in h.values() {
                assert!((x - want).abs() < 1e-12 * want.abs(), "{x} vs {want}");
            }
        }

        let degenerate = DiracData::new(
            AField::sample(spec, |_| Lorentz::real(0.0)),
            AField::sample(spec, |_| Lorentz::real(1.0)),
            AField::sample(spec, |_| Lorentz::real(0.0)),
            AField::sample(spec, |_| Lorentz::real(0.0)),
            Field::constant(spec, c),
            Field::constant(spec, c),
        )
        .unwrap();
        assert!(matches!(
            mean_curvature_formula(&degenerate, 1e-8),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn minimal_immersion_matches_full_pipeline() {
        let spec = GridSpec::new(-0.4, 0.6, -0.3, 0.5, 13, 11).unwrap();
        let base = Vec22([0.0, 1.0, 0.0, -1.0]);
        let psi1 = ConformalMap1D::from_map(spec, |_| Lorentz::real(1.0));
        let psi2 = ConformalMap1D::from_map(spec, |_| Lorentz::real(0.0));
        let phihat1 = ConformalMap1D::from_map(spec, |a| a);
        let phihat2 = ConformalMap1D::from_map(spec, |_| Lorentz::real(1.0));
        let build = minimal_immersion(&psi1, &psi2, &phihat1, &phihat2, base, &tols()).unwrap();
        let full = integrate_immersion(&build.data, base, &tols()).unwrap();
        let diff = build.immersion.max_abs_diff(&full.immersion);
        assert!(diff < 1e-12, "pipelines disagree by {diff}");
    }

    #[test]
    fn minimal_immersion_rejects_zero_phihat() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 9, 9).unwrap();
        let one = ConformalMap1D::from_map(spec, |_| Lorentz::real(1.0));
        let zero = ConformalMap1D::from_map(spec, |_| Lorentz::real(0.0));
        assert!(matches!(
            minimal_immersion(&one, &zero, &zero, &zero, Vec22([0.0; 4]), &tols()),
            Err(Error::NondegeneracyFailed { .. })
        ));
    }

    #[test]
    fn r21_reduction_matches_full_pipeline() {
        // psi2 = phihat1, phi2 = psihat1 collapses F0 to a constant and the
        // remaining coordinates must match the full pipeline with sign Plus.
        let spec = GridSpec::new(0.0, 0.8, 0.0, 0.8, 17, 17).unwrap();
        let c = 0.4;
        let p = Field::constant(spec, c);
        // Exact pair with sqnorm(phi) = 1, sqnorm(psi) = -1, so rho = 2 and
        // the degeneracy gates stay clear.
        let exact_phi = |a: Lorentz| {
            let sp = a.split();
            let w = c * (sp.plus + sp.minus);
            Lorentz::from_split((-w).exp(), w.exp())
        };
        let exact_psi = |a: Lorentz| {
            let sp = a.split();
            let w = c * (sp.plus + sp.minus);
            Lorentz::from_split((-w).exp(), -w.exp())
        };
        // Reduced pair from the solver so the residual gate passes.
        let init = crate::dirac::CharacteristicData::sample(spec, exact_phi, exact_psi);
        let pair = crate::dirac::solve_pair(&p, &p, &init).unwrap();
        let phi2 = pair.phi.clone();
        let psi2 = pair.psi.clone();

        // Embed as the full system: psi2 = phihat1, phi2 = psihat1.
        let phi1 = psi2.map(Lorentz::hat);
        let psi1 = phi2.map(Lorentz::hat);
        let d =
            DiracData::new(phi1, psi1, phi2.clone(), psi2.clone(), p.clone(), p.clone()).unwrap();
        let full = integrate_immersion(&d, Vec22([0.0; 4]), &tols()).unwrap();

        // F0 of the full pipeline is constant to rounding.
        let f0 = full.immersion.coordinate(0);
        assert!(f0.max_abs() < 1e-12, "F0 sup {}", f0.max_abs());

        let reduced =
            r21_immersion(&phi2, &psi2, &p, Sign::Plus, Vec22([0.0; 4]), &tols()).unwrap();
        let diff = reduced.immersion.max_abs_diff(&full.immersion);
        assert!(diff < 1e-12, "reduction disagrees by {diff}");
    }

    #[test]
    fn r21_rejects_equal_fields() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 9, 9).unwrap();
        let f = AField::sample(spec, |_| Lorentz::real(1.0));
        let p = Field::constant(spec, 0.0);
        assert!(matches!(
            r21_immersion(&f, &f, &p, Sign::Plus, Vec22([0.0; 4]), &tols()),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn konderak_routes_agree_and_match_closed_form() {
        let spec = GridSpec::new(-0.5, 0.5, -0.5, 0.5, 33, 33).unwrap();
        let chi1 = ConformalMap1D::from_map(spec, |_| Lorentz::real(1.0));
        let chi2 = ConformalMap1D::from_map(spec, |a| a);
        let build = konderak_form(&chi1, &chi2, &tols()).unwrap();
        assert!(
            build.agreement < 1e-12,
            "routes disagree by {}",
            build.agreement
        );

        // Closed forms: F1 = (u^2+v^2)/4, F2 = u + (u^3+3uv^2)/3,
        // F3 = v - (3u^2 v + v^3)/3, relative to the corner.  chi2^2 has
        // quadratic legs, so trapezoid error is O(h^2), not exact.
        let (u0, v0) = spec.uv(0, 0);
        let exact = |u: f64, v: f64| {
            Vec22([
                0.0,
                (u * u + v * v) / 4.0,
                u + (u.powi(3) + 3.0 * u * v * v) / 3.0,
                v - (3.0 * u * u * v + v.powi(3)) / 3.0,
            ])
        };
        let offset = exact(u0, v0);
        let h2 = spec.h_max() * spec.h_max();
        for i in 0..spec.ns {
            for j in 0..spec.nt {
                let (u, v) = spec.uv(i, j);
                let want = exact(u, v) - offset;
                let got = build.f_chi.get(i, j);
                assert!(
                    (got - want).abs_max() < 10.0 * h2,
                    "node ({i},{j}): {:?} vs {:?}",
                    got,
                    want
                );
            }
        }
    }

    #[test]
    fn konderak_plane_case_is_exact() {
        let spec = GridSpec::new(0.0, 1.0, -0.5, 0.5, 9, 9).unwrap();
        let chi1 = ConformalMap1D::from_map(spec, |_| Lorentz::real(1.0));
        let chi2 = ConformalMap1D::from_map(spec, |_| Lorentz::real(0.0));
        let build = konderak_form(&chi1, &chi2, &tols()).unwrap();
        let (u0, v0) = spec.uv(0, 0);
        for i in 0..spec.ns {
            for j in 0..spec.nt {
                let (u, v) = spec.uv(i, j);
                let want = Vec22([0.0, 0.0, u - u0, v - v0]);
                assert!((build.f_chi.get(i, j) - want).abs_max() < 1e-13);
            }
        }
    }

    #[test]
    fn konderak_rejects_null_chi1() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 9, 9).unwrap();
        let null = ConformalMap1D::from_map(spec, |_| Lorentz::new(1.0, 1.0));
        let any = ConformalMap1D::from_map(spec, |a| a);
        assert!(matches!(
            konderak_form(&null, &any, &tols()),
            Err(Error::NullChi1 { .. })
        ));
    }

    #[test]
    fn conformal_criterion_separates_minimal_from_cmc() {
        let spec = GridSpec::new(-0.5, 0.5, -0.5, 0.5, 17, 17).unwrap();
        let minimal = integrate_immersion(&worked_minimal_data(spec), Vec22([0.0; 4]), &tols())
            .unwrap()
            .immersion;
        let forms = immersion_one_forms(&minimal);
        let (ok, _) = conformal_one_form_criterion(&forms, 1e-10);
        assert!(ok);

        // Constant-potential surface: the forms pick up a dahat part.
        let c = 0.5;
        let p = Field::constant(spec, c);
        let exact_phi = |a: Lorentz| {
            let sp = a.split();
            let w = c * (sp.plus + sp.minus);
            Lorentz::from_split((-w).exp(), w.exp())
        };
        let exact_psi = |a: Lorentz| {
            let sp = a.split();
            let w = c * (sp.plus + sp.minus);
            Lorentz::from_split((-w).exp(), -w.exp())
        };
        let init = crate::dirac::CharacteristicData::sample(spec, exact_phi, exact_psi);
        let pair = crate::dirac::solve_pair(&p, &p, &init).unwrap();
        let phi1 = pair.psi.map(Lorentz::hat);
        let psi1 = pair.phi.map(Lorentz::hat);
        let d = DiracData::new(phi1, psi1, pair.phi, pair.psi, p.clone(), p).unwrap();
        let cmc = integrate_immersion(&d, Vec22([0.0; 4]), &tols())
            .unwrap()
            .immersion;
        let forms = immersion_one_forms(&cmc);
        let (ok, reports) = conformal_one_form_criterion(&forms, 1e-10);
        assert!(!ok);
        let worst = reports.iter().map(|r| r.max_residual).fold(0.0, f64::max);
        assert!(worst > 1e-2, "worst residual {worst}");
    }

    #[test]
    fn one_form_integration_is_exact_on_polynomials() {
        // d(a^2) = 2a da: integrating recovers a^2 - a0^2 exactly because the
        // split legs are quadratic.
        let spec = GridSpec::new(-1.0, 1.0, 0.0, 2.0, 9, 9).unwrap();
        let coeff = AField::sample(spec, |a| a * 2.0);
        let form = OneForm::from_da_coeff(&coeff);
        assert!(form.path_defect() < 1e-14);
        let v = form.integrate(PathOrder::SThenT);
        let a0 = Lorentz::from_split(spec.s0, spec.t0);
        for i in 0..spec.ns {
            for j in 0..spec.nt {
                let a = Lorentz::from_split(spec.s(i), spec.t(j));
                assert!((v.get(i, j) - (a * a - a0 * a0)).abs_max() < 1e-13);
            }
        }
    }

    #[test]
    fn minimal_one_forms_are_conformal_fields() {
        // Sanity link between the two conformality notions: the w_k of the
        // worked example are polynomial conformal maps.
        let spec = GridSpec::new(-0.5, 0.5, -0.5, 0.5, 9, 9).unwrap();
        let im = integrate_immersion(&worked_minimal_data(spec), Vec22([0.0; 4]), &tols())
            .unwrap()
            .immersion;
        for w in immersion_one_forms(&im) {
            assert!(d_ahat(&w).max_abs() < 1e-11);
        }
    }
}
