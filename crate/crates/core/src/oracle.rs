//! Finite-difference differential geometry for sampled immersions into
//! R^{2,2}, independent of every closed-form expression produced by the
//! construction modules.
//!
//! Tangents come from central differences, second derivatives from five-point
//! stencils, the normal frame from a pointwise orthogonalization of the
//! tangent complement in signature (2,2).  Curvature fields are only defined
//! on the interior obtained by dropping [`INTERIOR_MARGIN`] rings of nodes;
//! outside it they are set to NaN so that no assertion can silently depend on
//! the lower-order boundary stencils.

use crate::clifford::{scalar, Vec22};
use crate::error::{Error, Result};
use crate::grid::{deriv_u, deriv_v, Field, GridValue, RealField};
use crate::weierstrass::Immersion22;

/// Rings of nodes on which curvature quantities are left undefined.
///
/// Ring 0 tangents are one-sided, so first-form values are clean from ring 1
/// on and five-point second differences of them from ring 3 on.
pub const INTERIOR_MARGIN: usize = 3;

const TANGENT_DEGENERACY_TOL: f64 = 1e-8;
const NORMAL_NULL_TOL: f64 = 1e-8;

fn euclid(x: Vec22, y: Vec22) -> f64 {
    (0..4).map(|k| x.0[k] * y.0[k]).sum()
}

/// Maximum of `size(value)` over the interior nodes at least `margin` rings
/// from every edge.  NaN entries are skipped.
pub fn interior_max<T: Copy>(f: &Field<T>, margin: usize, mut size: impl FnMut(T) -> f64) -> f64 {
    let spec = f.spec();
    let mut worst = 0.0f64;
    for i in margin..spec.ns.saturating_sub(margin) {
        for j in margin..spec.nt.saturating_sub(margin) {
            let v = size(f.get(i, j));
            if v.is_finite() {
                worst = worst.max(v);
            }
        }
    }
    worst
}

fn require_interior(im: &Immersion22) -> Result<()> {
    let spec = im.spec();
    if spec.ns < 2 * INTERIOR_MARGIN + 1 || spec.nt < 2 * INTERIOR_MARGIN + 1 {
        return Err(Error::GridTooSmall);
    }
    Ok(())
}

fn nan_outside<T: GridValue>(f: &Field<T>, margin: usize) -> Field<T> {
    let spec = f.spec();
    Field::from_fn(spec, |i, j| {
        let inside = i >= margin && j >= margin && i + margin < spec.ns && j + margin < spec.nt;
        if inside {
            f.get(i, j)
        } else {
            f.get(i, j) * f64::NAN
        }
    })
}

// --- five-point stencils -------------------------------------------------
//
// Fourth-order interior formulas; the two outermost rings per axis are NaN.

fn d2_s<T: GridValue>(f: &Field<T>) -> Field<T> {
    let spec = f.spec();
    let w = 1.0 / (12.0 * spec.hs() * spec.hs());
    Field::from_fn(spec, |i, j| {
        if i < 2 || i + 2 >= spec.ns {
            f.get(i, j) * f64::NAN
        } else {
            (f.get(i - 2, j) * -1.0
                + f.get(i - 1, j) * 16.0
                + f.get(i, j) * -30.0
                + f.get(i + 1, j) * 16.0
                + f.get(i + 2, j) * -1.0)
                * w
        }
    })
}

fn d2_t<T: GridValue>(f: &Field<T>) -> Field<T> {
    let spec = f.spec();
    let w = 1.0 / (12.0 * spec.ht() * spec.ht());
    Field::from_fn(spec, |i, j| {
        if j < 2 || j + 2 >= spec.nt {
            f.get(i, j) * f64::NAN
        } else {
            (f.get(i, j - 2) * -1.0
                + f.get(i, j - 1) * 16.0
                + f.get(i, j) * -30.0
                + f.get(i, j + 1) * 16.0
                + f.get(i, j + 2) * -1.0)
                * w
        }
    })
}

fn d1_s<T: GridValue>(f: &Field<T>) -> Field<T> {
    let spec = f.spec();
    let w = 1.0 / (12.0 * spec.hs());
    Field::from_fn(spec, |i, j| {
        if i < 2 || i + 2 >= spec.ns {
            f.get(i, j) * f64::NAN
        } else {
            (f.get(i - 2, j) - f.get(i + 2, j) + (f.get(i + 1, j) - f.get(i - 1, j)) * 8.0) * w
        }
    })
}

fn d1_t<T: GridValue>(f: &Field<T>) -> Field<T> {
    let spec = f.spec();
    let w = 1.0 / (12.0 * spec.ht());
    Field::from_fn(spec, |i, j| {
        if j < 2 || j + 2 >= spec.nt {
            f.get(i, j) * f64::NAN
        } else {
            (f.get(i, j - 2) - f.get(i, j + 2) + (f.get(i, j + 1) - f.get(i, j - 1)) * 8.0) * w
        }
    })
}

fn d2_st<T: GridValue>(f: &Field<T>) -> Field<T> {
    d1_t(&d1_s(f))
}

/// Second derivatives in the `(u, v)` chart, obtained from the `(s, t)`
/// stencils through the linear change of variables.
fn second_derivatives<T: GridValue>(f: &Field<T>) -> (Field<T>, Field<T>, Field<T>) {
    let ss = d2_s(f);
    let st = d2_st(f);
    let tt = d2_t(f);
    let f_uu = Field::from_fn(f.spec(), |i, j| {
        ss.get(i, j) + st.get(i, j) * 2.0 + tt.get(i, j)
    });
    let f_uv = ss.zip_map(&tt, |a, b| a - b).expect("same grid");
    let f_vv = Field::from_fn(f.spec(), |i, j| {
        ss.get(i, j) + st.get(i, j) * -2.0 + tt.get(i, j)
    });
    (f_uu, f_uv, f_vv)
}

// --- first fundamental form ----------------------------------------------

/// Coefficients of the induced metric `E du^2 + 2F du dv + G dv^2`.
#[derive(Clone, Debug)]
pub struct FirstForm {
    pub e: RealField,
    pub f: RealField,
    pub g: RealField,
}

impl FirstForm {
    /// `EG - F^2` pointwise.
    pub fn det(&self) -> RealField {
        let f2 = self.f.zip_map(&self.f, |a, b| a * b).expect("same grid");
        self.e
            .zip_map(&self.g, |a, b| a * b)
            .expect("same grid")
            .zip_map(&f2, |a, b| a - b)
            .expect("same grid")
    }
}

/// Induced metric coefficients from central-difference tangents.
///
/// Values on ring 0 use one-sided tangents and are first-order only; every
/// assertion in this crate reads the interior.
pub fn first_form(im: &Immersion22) -> Result<FirstForm> {
    let spec = im.spec();
    if spec.ns < 3 || spec.nt < 3 {
        return Err(Error::GridTooSmall);
    }
    let fu = deriv_u(im.points());
    let fv = deriv_v(im.points());
    Ok(FirstForm {
        e: fu.zip_map(&fu, scalar).expect("same grid"),
        f: fu.zip_map(&fv, scalar).expect("same grid"),
        g: fv.zip_map(&fv, scalar).expect("same grid"),
    })
}

// --- normal frame ---------------------------------------------------------

/// Orthonormal basis of the normal plane, `<n0,n0> = -1`, `<n1,n1> = +1`,
/// signs propagated from the grid corner.
#[derive(Clone, Debug)]
pub struct NormalFrame {
    pub n0: Field<Vec22>,
    pub n1: Field<Vec22>,
    /// Smallest `|EG - F^2|` encountered.
    pub min_tangent_det: f64,
    /// Smallest `|<m,m>|` of the unnormalized normal directions.
    pub min_normal_norm: f64,
}

fn canonical_sign(n: Vec22) -> f64 {
    let mut k_max = 0;
    for k in 1..4 {
        if n.0[k].abs() > n.0[k_max].abs() {
            k_max = k;
        }
    }
    if n.0[k_max] < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Pointwise orthonormal frame of the normal plane.
///
/// At each node the four canonical basis vectors are projected off the
/// tangent plane, a well-conditioned spanning pair is selected by Euclidean
/// size, and the induced 2x2 Gram form is rotated to principal axes, which
/// orthogonalizes the pair under the (2,2) product even when individual
/// candidates are close to the null cone.
pub fn normal_frame(im: &Immersion22) -> Result<NormalFrame> {
    let spec = im.spec();
    if spec.ns < 3 || spec.nt < 3 {
        return Err(Error::GridTooSmall);
    }
    let fu = deriv_u(im.points());
    let fv = deriv_v(im.points());

    let mut n0 = Field::constant(spec, Vec22([0.0; 4]));
    let mut n1 = Field::constant(spec, Vec22([0.0; 4]));
    let mut min_det = f64::INFINITY;
    let mut min_norm = f64::INFINITY;

    for i in 0..spec.ns {
        for j in 0..spec.nt {
            let tu = fu.get(i, j);
            let tv = fv.get(i, j);
            let e = scalar(tu, tu);
            let f = scalar(tu, tv);
            let g = scalar(tv, tv);
            let det = e * g - f * f;
            min_det = min_det.min(det.abs());
            if det.abs() <= TANGENT_DEGENERACY_TOL {
                return Err(Error::DegenerateTangent { min: det.abs() });
            }

            // Project the canonical basis off the tangent plane.
            let mut candidates = [Vec22([0.0; 4]); 4];
            for (k, c) in candidates.iter_mut().enumerate() {
                let mut ek = Vec22([0.0; 4]);
                ek.0[k] = 1.0;
                let r0 = scalar(ek, tu);
                let r1 = scalar(ek, tv);
                let alpha = (g * r0 - f * r1) / det;
                let beta = (e * r1 - f * r0) / det;
                *c = ek - tu * alpha - tv * beta;
            }

            let w1 = *candidates
                .iter()
                .max_by(|a, b| euclid(**a, **a).total_cmp(&euclid(**b, **b)))
                .unwrap();
            let w1_sq = euclid(w1, w1);
            let w2 = *candidates
                .iter()
                .max_by(|a, b| {
                    let res = |c: &Vec22| {
                        let proj = euclid(*c, w1) / w1_sq;
                        let r = *c - w1 * proj;
                        euclid(r, r)
                    };
                    res(a).total_cmp(&res(b))
                })
                .unwrap();
            let w2 = w2 - w1 * (euclid(w2, w1) / w1_sq);

            // Principal axes of the normal-plane Gram form.
            let a = scalar(w1, w1);
            let b = scalar(w1, w2);
            let d = scalar(w2, w2);
            let (m0, m1) = if b.abs() <= 1e-14 * a.abs().max(d.abs()).max(1.0) {
                (w1, w2)
            } else {
                let phi = 0.5 * (2.0 * b).atan2(a - d);
                let (sp, cp) = phi.sin_cos();
                (w1 * cp + w2 * sp, w2 * cp - w1 * sp)
            };
            let mu0 = scalar(m0, m0);
            let mu1 = scalar(m1, m1);
            min_norm = min_norm.min(mu0.abs()).min(mu1.abs());
            if mu0.abs() <= NORMAL_NULL_TOL || mu1.abs() <= NORMAL_NULL_TOL || mu0 * mu1 >= 0.0 {
                return Err(Error::NullNormalDirection {
                    min: mu0.abs().min(mu1.abs()),
                });
            }
            let (timelike, tl_sq, spacelike, sl_sq) = if mu0 < 0.0 {
                (m0, mu0, m1, mu1)
            } else {
                (m1, mu1, m0, mu0)
            };
            n0.set(i, j, timelike * (1.0 / (-tl_sq).sqrt()));
            n1.set(i, j, spacelike * (1.0 / sl_sq.sqrt()));
        }
    }

    // Greedy sign continuity from the (0,0) corner.
    for field in [&mut n0, &mut n1] {
        let corner = field.get(0, 0);
        if canonical_sign(corner) < 0.0 {
            field.set(0, 0, -corner);
        }
        for j in 1..spec.nt {
            if euclid(field.get(0, j), field.get(0, j - 1)) < 0.0 {
                field.set(0, j, -field.get(0, j));
            }
        }
        for i in 1..spec.ns {
            for j in 0..spec.nt {
                if euclid(field.get(i, j), field.get(i - 1, j)) < 0.0 {
                    field.set(i, j, -field.get(i, j));
                }
            }
        }
    }

    Ok(NormalFrame {
        n0,
        n1,
        min_tangent_det: min_det,
        min_normal_norm: min_norm,
    })
}

// --- second fundamental form and curvature --------------------------------

/// Scalar second-form coefficients `e du^2 + 2f du dv + g dv^2` against one
/// normal direction.
#[derive(Clone, Debug)]
pub struct SecondForm {
    pub e: RealField,
    pub f: RealField,
    pub g: RealField,
}

/// First form, normal frame and the two per-normal second forms.
#[derive(Clone, Debug)]
pub struct FundamentalForms {
    pub first: FirstForm,
    pub frame: NormalFrame,
    /// Index 0 pairs with the timelike normal `n0`, index 1 with `n1`.
    pub second: [SecondForm; 2],
}

/// Fundamental forms of a sampled immersion.  Second-form fields are NaN
/// outside the margin-[`INTERIOR_MARGIN`] interior.
pub fn fundamental_forms(im: &Immersion22) -> Result<FundamentalForms> {
    require_interior(im)?;
    let first = first_form(im)?;
    let frame = normal_frame(im)?;
    let (f_uu, f_uv, f_vv) = second_derivatives(im.points());
    let coeff = |n: &Field<Vec22>, d: &Field<Vec22>| {
        nan_outside(&d.zip_map(n, scalar).expect("same grid"), INTERIOR_MARGIN)
    };
    let second = [
        SecondForm {
            e: coeff(&frame.n0, &f_uu),
            f: coeff(&frame.n0, &f_uv),
            g: coeff(&frame.n0, &f_vv),
        },
        SecondForm {
            e: coeff(&frame.n1, &f_uu),
            f: coeff(&frame.n1, &f_uv),
            g: coeff(&frame.n1, &f_vv),
        },
    ];
    Ok(FundamentalForms {
        first,
        frame,
        second,
    })
}

/// Mean curvature vector field and its (2,2) scalar square.
#[derive(Clone, Debug)]
pub struct MeanCurvature {
    pub vector: Field<Vec22>,
    pub sqnorm: RealField,
}

/// Half the metric trace of the vector-valued second fundamental form,
///
/// ```text
///     H = (g^uu II_uu + 2 g^uv II_uv + g^vv II_vv) / 2,
///     II_ab = -<F_ab, n0> n0 + <F_ab, n1> n1,
/// ```
///
/// which in conformal coordinates reduces to `(-II_uu + II_vv) / (2 lambda^2)`.
/// NaN outside the interior margin.
pub fn mean_curvature_vector(im: &Immersion22) -> Result<MeanCurvature> {
    require_interior(im)?;
    let first = first_form(im)?;
    let frame = normal_frame(im)?;
    let (f_uu, f_uv, f_vv) = second_derivatives(im.points());
    let spec = im.spec();
    let det = first.det();

    let vector = Field::from_fn(spec, |i, j| {
        let n0 = frame.n0.get(i, j);
        let n1 = frame.n1.get(i, j);
        let project = |x: Vec22| n0 * -scalar(x, n0) + n1 * scalar(x, n1);
        let p_uu = project(f_uu.get(i, j));
        let p_uv = project(f_uv.get(i, j));
        let p_vv = project(f_vv.get(i, j));
        let dg = det.get(i, j);
        let guu = first.g.get(i, j) / dg;
        let guv = -first.f.get(i, j) / dg;
        let gvv = first.e.get(i, j) / dg;
        (p_uu * guu + p_uv * (2.0 * guv) + p_vv * gvv) * 0.5
    });
    let vector = nan_outside(&vector, INTERIOR_MARGIN);
    let sqnorm = vector.zip_map(&vector, scalar).expect("same grid");
    Ok(MeanCurvature { vector, sqnorm })
}

/// Intrinsic Gauss curvature by the Brioschi formula,
///
/// ```text
///         | -E_vv/2 + F_uv - G_uu/2   E_u/2   F_u - E_v/2 |       | 0      E_v/2   G_u/2 |
///     K = | F_v - G_u/2               E       F           | / d^2 - | E_v/2  E       F     | / d^2
///         | G_v/2                     F       G           |       | G_u/2  F       G     |
/// ```
///
/// with `d = EG - F^2`.  The algebra is signature-agnostic; the sign it
/// produces is pinned by the constant-curvature calibration tests.  NaN
/// outside the interior margin.
pub fn gauss_curvature(im: &Immersion22) -> Result<RealField> {
    require_interior(im)?;
    let first = first_form(im)?;
    let spec = im.spec();
    let det = first.det();
    let mut min_abs = f64::INFINITY;
    for i in INTERIOR_MARGIN..spec.ns - INTERIOR_MARGIN {
        for j in INTERIOR_MARGIN..spec.nt - INTERIOR_MARGIN {
            min_abs = min_abs.min(det.get(i, j).abs());
        }
    }
    if min_abs <= 1e-10 {
        return Err(Error::DegenerateMetric { min: min_abs });
    }

    let e_u = deriv_u(&first.e);
    let e_v = deriv_v(&first.e);
    let f_u = deriv_u(&first.f);
    let f_v = deriv_v(&first.f);
    let g_u = deriv_u(&first.g);
    let g_v = deriv_v(&first.g);
    let (_, _, e_vv) = second_derivatives(&first.e);
    let (_, f_uv, _) = second_derivatives(&first.f);
    let (g_uu, _, _) = second_derivatives(&first.g);

    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };

    let k = Field::from_fn(spec, |i, j| {
        let e = first.e.get(i, j);
        let f = first.f.get(i, j);
        let g = first.g.get(i, j);
        let d = det.get(i, j);
        let m1 = [
            [
                -0.5 * e_vv.get(i, j) + f_uv.get(i, j) - 0.5 * g_uu.get(i, j),
                0.5 * e_u.get(i, j),
                f_u.get(i, j) - 0.5 * e_v.get(i, j),
            ],
            [f_v.get(i, j) - 0.5 * g_u.get(i, j), e, f],
            [0.5 * g_v.get(i, j), f, g],
        ];
        let m2 = [
            [0.0, 0.5 * e_v.get(i, j), 0.5 * g_u.get(i, j)],
            [0.5 * e_v.get(i, j), e, f],
            [0.5 * g_u.get(i, j), f, g],
        ];
        (det3(m1) - det3(m2)) / (d * d)
    });
    Ok(nan_outside(&k, INTERIOR_MARGIN))
}

/// Largest violation of `E = -G`, `F = 0` over the margin-1 interior (ring 0
/// tangents are one-sided and excluded).
pub fn conformality_defect(im: &Immersion22) -> Result<f64> {
    let first = first_form(im)?;
    let sum = first.e.zip_map(&first.g, |a, b| a + b).expect("same grid");
    Ok(interior_max(&sum, 1, f64::abs).max(interior_max(&first.f, 1, f64::abs)))
}

/// Null-coordinate conformality: largest `|<F_s,F_s>|`, `|<F_t,F_t>|` over
/// the margin-1 interior.  The criterion appropriate for surfaces conformal
/// in the characteristic chart, such as the frame-integrated families.
pub fn null_conformality_defect(im: &Immersion22) -> Result<f64> {
    let spec = im.spec();
    if spec.ns < 3 || spec.nt < 3 {
        return Err(Error::GridTooSmall);
    }
    let fs = crate::grid::deriv_s(im.points());
    let ft = crate::grid::deriv_t(im.points());
    let gss = fs.zip_map(&fs, scalar).expect("same grid");
    let gtt = ft.zip_map(&ft, scalar).expect("same grid");
    Ok(interior_max(&gss, 1, f64::abs).max(interior_max(&gtt, 1, f64::abs)))
}

/// Verification bundle for one sampled immersion.
#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub mean_vector: Field<Vec22>,
    pub h_sqnorm: RealField,
    pub gauss_k: RealField,
    pub conformal_defect: f64,
    pub null_conformal_defect: f64,
    /// Rings of nodes on which the curvature fields are NaN.
    pub margin: usize,
}

pub fn curvature_report(im: &Immersion22) -> Result<CurvatureReport> {
    let mean = mean_curvature_vector(im)?;
    let gauss_k = gauss_curvature(im)?;
    Ok(CurvatureReport {
        mean_vector: mean.vector,
        h_sqnorm: mean.sqnorm,
        gauss_k,
        conformal_defect: conformality_defect(im)?,
        null_conformal_defect: null_conformality_defect(im)?,
        margin: INTERIOR_MARGIN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn sample(spec: GridSpec, f: impl Fn(f64, f64) -> [f64; 4]) -> Immersion22 {
        Immersion22::new(Field::from_fn(spec, |i, j| {
            let (u, v) = spec.uv(i, j);
            Vec22(f(u, v))
        }))
    }

    fn spec(n: usize) -> GridSpec {
        GridSpec::new(0.1, 0.9, -0.52, 0.44, n, n).unwrap()
    }

    /// Geodesic slice of the unit pseudo-sphere with induced metric
    /// -cosh(v)^2 du^2 + dv^2, constant curvature -1, mean curvature vector
    /// equal to the position vector.
    fn h11_slice(n: usize) -> Immersion22 {
        sample(spec(n), |u, v| {
            [v.cosh() * u.cos(), v.sinh(), v.cosh() * u.sin(), 0.0]
        })
    }

    #[test]
    fn plane_is_flat_and_calibrates_the_signature() {
        let im = sample(spec(9), |u, v| [0.0, 0.0, u, v]);
        let first = first_form(&im).unwrap();
        assert!(interior_max(&first.e, 0, |x| (x + 1.0).abs()) < 1e-14);
        assert!(interior_max(&first.f, 0, f64::abs) < 1e-14);
        assert!(interior_max(&first.g, 0, |x| (x - 1.0).abs()) < 1e-14);

        let report = curvature_report(&im).unwrap();
        assert!(interior_max(&report.gauss_k, 3, f64::abs) < 1e-13);
        assert!(interior_max(&report.mean_vector, 3, Vec22::abs_max) < 1e-13);
        assert!(report.conformal_defect < 1e-14);

        let frame = normal_frame(&im).unwrap();
        let n0 = frame.n0.get(4, 4);
        assert!((n0.0[0].abs() - 1.0).abs() < 1e-12 && n0.0[2].abs() < 1e-12);
    }

    #[test]
    fn sheared_plane_fails_conformality() {
        let im = sample(spec(9), |u, v| [0.0, 0.0, u, u + v]);
        let defect = conformality_defect(&im).unwrap();
        assert!((defect - 1.0).abs() < 1e-12, "defect {defect}");
    }

    #[test]
    fn quadratic_minimal_graph_is_stencil_exact() {
        let im = sample(spec(11), |u, v| {
            let w = -(u * u + v * v) / 2.0;
            [w, w, u, v]
        });
        let first = first_form(&im).unwrap();
        assert!(interior_max(&first.e, 1, |x| (x + 1.0).abs()) < 1e-12);
        assert!(interior_max(&first.f, 1, f64::abs) < 1e-12);
        assert!(interior_max(&first.g, 1, |x| (x - 1.0).abs()) < 1e-12);
        assert!(conformality_defect(&im).unwrap() < 1e-12);

        let report = curvature_report(&im).unwrap();
        assert!(interior_max(&report.mean_vector, 3, Vec22::abs_max) < 1e-12);
        assert!(interior_max(&report.gauss_k, 3, f64::abs) < 1e-12);
    }

    #[test]
    fn frame_is_orthonormal_against_normalized_tangents() {
        let im = h11_slice(33);
        let frame = normal_frame(&im).unwrap();
        let fu = deriv_u(im.points());
        let fv = deriv_v(im.points());
        let first = first_form(&im).unwrap();

        let mut worst = 0.0f64;
        let spec = im.spec();
        for i in 1..spec.ns - 1 {
            for j in 1..spec.nt - 1 {
                let tu = fu.get(i, j) * (1.0 / (-first.e.get(i, j)).sqrt());
                let tv = fv.get(i, j) * (1.0 / first.g.get(i, j).sqrt());
                let basis = [frame.n0.get(i, j), frame.n1.get(i, j), tu, tv];
                let want = [-1.0, 1.0, -1.0, 1.0];
                for a in 0..4 {
                    for b in a..4 {
                        let got = scalar(basis[a], basis[b]);
                        let target = if a == b { want[a] } else { 0.0 };
                        worst = worst.max((got - target).abs());
                    }
                }
            }
        }
        assert!(worst < 2e-5, "orthonormality defect {worst}");
    }

    #[test]
    fn pseudo_sphere_slice_calibrates_curvature() {
        let im = h11_slice(33);
        let report = curvature_report(&im).unwrap();
        let k_err = interior_max(&report.gauss_k, 3, |k| (k + 1.0).abs());
        assert!(k_err < 5e-3, "K error {k_err}");

        // Mean curvature vector of the unit pseudo-sphere is the position.
        let diff = report
            .mean_vector
            .zip_map(im.points(), |h, x| h - x)
            .expect("same grid");
        let h_err = interior_max(&diff, 3, Vec22::abs_max);
        assert!(h_err < 5e-3, "H error {h_err}");
        let hsq_err = interior_max(&report.h_sqnorm, 3, |x| (x + 1.0).abs());
        assert!(hsq_err < 1e-2, "<H,H> error {hsq_err}");
    }

    #[test]
    fn curvature_converges_at_second_order_on_the_slice() {
        let errs: Vec<f64> = [33usize, 65]
            .iter()
            .map(|&n| {
                let report = curvature_report(&h11_slice(n)).unwrap();
                interior_max(&report.gauss_k, 3, |k| (k + 1.0).abs())
            })
            .collect();
        let slope = (errs[0] / errs[1]).log2();
        assert!(
            (1.7..=2.3).contains(&slope),
            "K slope {slope}, errors {errs:?}"
        );
    }

    #[test]
    fn first_form_converges_at_second_order_on_the_slice() {
        let errs: Vec<f64> = [17usize, 33]
            .iter()
            .map(|&n| {
                let im = h11_slice(n);
                let first = first_form(&im).unwrap();
                let e_err = interior_max(
                    &Field::from_fn(im.spec(), |i, j| {
                        let (_, v) = im.spec().uv(i, j);
                        first.e.get(i, j) + v.cosh() * v.cosh()
                    }),
                    1,
                    f64::abs,
                );
                e_err.max(interior_max(&first.f, 1, f64::abs))
            })
            .collect();
        let slope = (errs[0] / errs[1]).log2();
        assert!(
            (1.7..=2.3).contains(&slope),
            "first-form slope {slope}, errors {errs:?}"
        );
    }

    #[test]
    fn mean_curvature_error_shrinks_at_least_linearly() {
        // The nominal guarantee is first order; smooth samples typically do
        // better, so only the lower slope bound is asserted.
        let errs: Vec<f64> = [17usize, 33]
            .iter()
            .map(|&n| {
                let im = h11_slice(n);
                let report = curvature_report(&im).unwrap();
                let diff = report
                    .mean_vector
                    .zip_map(im.points(), |h, x| h - x)
                    .expect("same grid");
                interior_max(&diff, 3, Vec22::abs_max)
            })
            .collect();
        let slope = (errs[0] / errs[1]).log2();
        assert!(slope >= 0.7, "H slope {slope}, errors {errs:?}");
        assert!(errs[1] < 5e-3, "H error at n=33: {}", errs[1]);
    }

    #[test]
    fn degenerate_tangent_and_metric_are_reported() {
        let im = sample(spec(9), |u, _| [0.0, 0.0, u, u]);
        match mean_curvature_vector(&im) {
            Err(Error::DegenerateTangent { .. }) => {}
            other => panic!("expected DegenerateTangent, got {other:?}"),
        }
        match gauss_curvature(&im) {
            Err(Error::DegenerateMetric { .. }) => {}
            other => panic!("expected DegenerateMetric, got {other:?}"),
        }
    }

    #[test]
    fn small_grids_are_rejected() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 5, 5).unwrap();
        let im = sample(spec, |u, v| [0.0, 0.0, u, v]);
        match curvature_report(&im) {
            Err(Error::GridTooSmall) => {}
            other => panic!("expected GridTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn random_immersion_frame_identities_hold() {
        let im = sample(spec(13), |u, v| {
            [
                0.3 * u * v + 0.1 * v * v * v,
                (0.4 * u).sin() + v,
                u + 0.2 * (v * 1.3).cos(),
                v - 0.15 * u * u,
            ]
        });
        let frame = normal_frame(&im).unwrap();
        let fu = deriv_u(im.points());
        let fv = deriv_v(im.points());
        let spec = im.spec();
        for i in 0..spec.ns {
            for j in 0..spec.nt {
                let n0 = frame.n0.get(i, j);
                let n1 = frame.n1.get(i, j);
                assert!((scalar(n0, n0) + 1.0).abs() < 1e-10);
                assert!((scalar(n1, n1) - 1.0).abs() < 1e-10);
                assert!(scalar(n0, n1).abs() < 1e-10);
                assert!(scalar(n0, fu.get(i, j)).abs() < 1e-10);
                assert!(scalar(n0, fv.get(i, j)).abs() < 1e-10);
                assert!(scalar(n1, fu.get(i, j)).abs() < 1e-10);
                assert!(scalar(n1, fv.get(i, j)).abs() < 1e-10);
            }
        }
    }
}
