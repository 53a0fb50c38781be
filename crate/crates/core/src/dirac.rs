//! Goursat marching scheme for the characteristic Dirac system
//!
//! ```text
//!     d_a phi_alpha = -p psi_alpha
//!     d_ahat psi_alpha = -q phi_alpha        (alpha = 1, 2)
//! ```
//!
//! with real potentials `p`, `q`.  In split components the system decouples
//! into two one-directional transport pairs,
//!
//! ```text
//!     (+)  d/ds phi+ = -p psi+      (-)  d/dt phi- = -p psi-
//!          d/dt psi+ = -q phi+           d/ds psi- = -q phi-
//! ```
//!
//! so well-posed initial data prescribes, per spinor pair, the components
//! transported in `s` on the line `{s = s0}` and the components transported
//! in `t` on the line `{t = t0}`.  Each interior node is then determined by a
//! trapezoidal corner relation that is linear in the two unknowns and solved
//! exactly; the scheme is second order in the mesh width.

use crate::error::{Error, Result};
use crate::grid::{d_a, d_ahat, AField, Field, GridSpec, RealField};
use crate::lorentz::Lorentz;

/// Goursat data for one spinor pair.
///
/// `phi_plus` and `psi_minus` are restrictions to `{s = s0}` (length `nt`,
/// indexed by the `t` node); `psi_plus` and `phi_minus` are restrictions to
/// `{t = t0}` (length `ns`, indexed by the `s` node).
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicData {
    spec: GridSpec,
    pub phi_plus: Vec<f64>,
    pub psi_minus: Vec<f64>,
    pub psi_plus: Vec<f64>,
    pub phi_minus: Vec<f64>,
}

fn check_len(profile: &[f64], want: usize) -> Result<()> {
    if profile.len() != want {
        return Err(Error::ProfileLength {
            got: profile.len(),
            want,
        });
    }
    Ok(())
}

impl CharacteristicData {
    pub fn new(
        spec: GridSpec,
        phi_plus: Vec<f64>,
        psi_minus: Vec<f64>,
        psi_plus: Vec<f64>,
        phi_minus: Vec<f64>,
    ) -> Result<Self> {
        check_len(&phi_plus, spec.nt)?;
        check_len(&psi_minus, spec.nt)?;
        check_len(&psi_plus, spec.ns)?;
        check_len(&phi_minus, spec.ns)?;
        Ok(CharacteristicData {
            spec,
            phi_plus,
            psi_minus,
            psi_plus,
            phi_minus,
        })
    }

    /// Builds data from full A-valued restrictions of `phi` and `psi` to both
    /// characteristic lines through the corner `(s0, t0)`.
    ///
    /// Only one split component of each restriction actually drives the
    /// solution; the redundant components are ignored, but the two
    /// restrictions of each field must agree at the shared corner.
    pub fn from_line_restrictions(
        spec: GridSpec,
        phi_on_s0: &[Lorentz],
        psi_on_s0: &[Lorentz],
        phi_on_t0: &[Lorentz],
        psi_on_t0: &[Lorentz],
        tol: f64,
    ) -> Result<Self> {
        if phi_on_s0.len() != spec.nt || psi_on_s0.len() != spec.nt {
            return Err(Error::ProfileLength {
                got: phi_on_s0.len().min(psi_on_s0.len()),
                want: spec.nt,
            });
        }
        if phi_on_t0.len() != spec.ns || psi_on_t0.len() != spec.ns {
            return Err(Error::ProfileLength {
                got: phi_on_t0.len().min(psi_on_t0.len()),
                want: spec.ns,
            });
        }
        let mismatch = (phi_on_s0[0] - phi_on_t0[0])
            .abs_max()
            .max((psi_on_s0[0] - psi_on_t0[0]).abs_max());
        if mismatch > tol {
            return Err(Error::InconsistentInitialData { mismatch, tol });
        }
        Ok(CharacteristicData {
            spec,
            phi_plus: phi_on_s0.iter().map(|x| x.split().plus).collect(),
            psi_minus: psi_on_s0.iter().map(|x| x.split().minus).collect(),
            psi_plus: psi_on_t0.iter().map(|x| x.split().plus).collect(),
            phi_minus: phi_on_t0.iter().map(|x| x.split().minus).collect(),
        })
    }

    /// Samples the data from closed-form fields (mostly for tests and
    /// manufactured solutions).
    pub fn sample(
        spec: GridSpec,
        mut phi: impl FnMut(Lorentz) -> Lorentz,
        mut psi: impl FnMut(Lorentz) -> Lorentz,
    ) -> Self {
        let on_s0 = |j: usize| Lorentz::from_split(spec.s0, spec.t(j));
        let on_t0 = |i: usize| Lorentz::from_split(spec.s(i), spec.t0);
        CharacteristicData {
            spec,
            phi_plus: (0..spec.nt).map(|j| phi(on_s0(j)).split().plus).collect(),
            psi_minus: (0..spec.nt).map(|j| psi(on_s0(j)).split().minus).collect(),
            psi_plus: (0..spec.ns).map(|i| psi(on_t0(i)).split().plus).collect(),
            phi_minus: (0..spec.ns).map(|i| phi(on_t0(i)).split().minus).collect(),
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }
}

/// An A-valued solution pair of the Dirac system on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorPair {
    pub phi: AField,
    pub psi: AField,
}

/// The full spinor payload of the representation: two pairs plus the real
/// potentials, everything on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracData {
    pub phi1: AField,
    pub psi1: AField,
    pub phi2: AField,
    pub psi2: AField,
    pub p: RealField,
    pub q: RealField,
}

impl DiracData {
    pub fn new(
        phi1: AField,
        psi1: AField,
        phi2: AField,
        psi2: AField,
        p: RealField,
        q: RealField,
    ) -> Result<Self> {
        let spec = phi1.spec();
        if psi1.spec() != spec
            || phi2.spec() != spec
            || psi2.spec() != spec
            || p.spec() != spec
            || q.spec() != spec
        {
            return Err(Error::GridMismatch(
                "Dirac fields on different grids".into(),
            ));
        }
        Ok(DiracData {
            phi1,
            psi1,
            phi2,
            psi2,
            p,
            q,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.phi1.spec()
    }

    /// The pair determinant `psi2 phi1 - psi1 phi2` whose square norm is the
    /// conformal factor of the induced metric.
    pub fn cross(&self) -> AField {
        Field::from_fn(self.spec(), |i, j| {
            self.psi2.get(i, j) * self.phi1.get(i, j) - self.psi1.get(i, j) * self.phi2.get(i, j)
        })
    }

    /// Minimum of `|sqnorm(psi2 phi1 - psi1 phi2)|` over the grid and whether
    /// it clears the tolerance.
    pub fn nondegeneracy(&self, tol: f64) -> (f64, bool) {
        let min = self.cross().map(|d| d.sqnorm()).min_abs();
        (min, min > tol)
    }
}

/// Integrates the Goursat problem for a single spinor pair.
///
/// The trapezoidal corner relation at each new node is solved exactly; it
/// degenerates only when `h_s h_t p q / 4` reaches 1, which is reported
/// rather than stepped over.
pub fn solve_pair(p: &RealField, q: &RealField, data: &CharacteristicData) -> Result<SpinorPair> {
    let spec = data.spec;
    if p.spec() != spec || q.spec() != spec {
        return Err(Error::GridMismatch(
            "potentials and data on different grids".into(),
        ));
    }
    let (ns, nt) = (spec.ns, spec.nt);
    let (hs, ht) = (spec.hs(), spec.ht());

    let mut fp = Field::constant(spec, 0.0f64); // phi+
    let mut gp = Field::constant(spec, 0.0f64); // psi+
    let mut fm = Field::constant(spec, 0.0f64); // phi-
    let mut gm = Field::constant(spec, 0.0f64); // psi-

    for j in 0..nt {
        fp.set(0, j, data.phi_plus[j]);
        gm.set(0, j, data.psi_minus[j]);
    }
    for i in 0..ns {
        gp.set(i, 0, data.psi_plus[i]);
        fm.set(i, 0, data.phi_minus[i]);
    }

    // Edges: on each data line the partner component satisfies a plain ODE
    // with a known right-hand side, so an explicit trapezoid step suffices.
    for j in 1..nt {
        let prev = gp.get(0, j - 1) - 0.5 * ht * q.get(0, j - 1) * fp.get(0, j - 1);
        gp.set(0, j, prev - 0.5 * ht * q.get(0, j) * fp.get(0, j));

        let prev = fm.get(0, j - 1) - 0.5 * ht * p.get(0, j - 1) * gm.get(0, j - 1);
        fm.set(0, j, prev - 0.5 * ht * p.get(0, j) * gm.get(0, j));
    }
    for i in 1..ns {
        let prev = fp.get(i - 1, 0) - 0.5 * hs * p.get(i - 1, 0) * gp.get(i - 1, 0);
        fp.set(i, 0, prev - 0.5 * hs * p.get(i, 0) * gp.get(i, 0));

        let prev = gm.get(i - 1, 0) - 0.5 * hs * q.get(i - 1, 0) * fm.get(i - 1, 0);
        gm.set(i, 0, prev - 0.5 * hs * q.get(i, 0) * fm.get(i, 0));
    }

    for i in 1..ns {
        for j in 1..nt {
            let (pij, qij) = (p.get(i, j), q.get(i, j));
            let denom = 1.0 - 0.25 * hs * ht * pij * qij;
            if denom.abs() < 1e-12 {
                return Err(Error::StepTooLarge { denom });
            }

            // (+) pair: phi+ marches in s, psi+ marches in t.
            let a = fp.get(i - 1, j) - 0.5 * hs * p.get(i - 1, j) * gp.get(i - 1, j);
            let b = gp.get(i, j - 1) - 0.5 * ht * q.get(i, j - 1) * fp.get(i, j - 1);
            let phi = (a - 0.5 * hs * pij * b) / denom;
            fp.set(i, j, phi);
            gp.set(i, j, b - 0.5 * ht * qij * phi);

            // (-) pair: phi- marches in t, psi- marches in s.
            let a = fm.get(i, j - 1) - 0.5 * ht * p.get(i, j - 1) * gm.get(i, j - 1);
            let b = gm.get(i - 1, j) - 0.5 * hs * q.get(i - 1, j) * fm.get(i - 1, j);
            let phi = (a - 0.5 * ht * pij * b) / denom;
            fm.set(i, j, phi);
            gm.set(i, j, b - 0.5 * hs * qij * phi);
        }
    }

    let phi = fp.zip_map(&fm, Lorentz::from_split)?;
    let psi = gp.zip_map(&gm, Lorentz::from_split)?;
    Ok(SpinorPair { phi, psi })
}

/// Solves the full system: one Goursat march per spinor pair.
pub fn solve_goursat(
    p: &RealField,
    q: &RealField,
    init1: &CharacteristicData,
    init2: &CharacteristicData,
) -> Result<DiracData> {
    let pair1 = solve_pair(p, q, init1)?;
    let pair2 = solve_pair(p, q, init2)?;
    DiracData::new(
        pair1.phi,
        pair1.psi,
        pair2.phi,
        pair2.psi,
        p.clone(),
        q.clone(),
    )
}

/// Residual fields of one pair: `(d_a phi + p psi, d_ahat psi + q phi)`.
pub fn pair_residual_fields(
    pair: &SpinorPair,
    p: &RealField,
    q: &RealField,
) -> Result<(AField, AField)> {
    let spec = pair.phi.spec();
    if p.spec() != spec || q.spec() != spec || pair.psi.spec() != spec {
        return Err(Error::GridMismatch(
            "residual inputs on different grids".into(),
        ));
    }
    let da_phi = d_a(&pair.phi);
    let dah_psi = d_ahat(&pair.psi);
    let r_phi = Field::from_fn(spec, |i, j| {
        da_phi.get(i, j) + pair.psi.get(i, j) * p.get(i, j)
    });
    let r_psi = Field::from_fn(spec, |i, j| {
        dah_psi.get(i, j) + pair.phi.get(i, j) * q.get(i, j)
    });
    Ok((r_phi, r_psi))
}

/// Residual of the full system, with the boundary rim reported separately:
/// one-sided boundary stencils make the rim O(h) even for an exact solution,
/// while the interior is O(h^2).
#[derive(Clone, Debug)]
pub struct DiracResidual {
    pub r_phi1: AField,
    pub r_psi1: AField,
    pub r_phi2: AField,
    pub r_psi2: AField,
    pub interior: f64,
    pub boundary: f64,
    pub h_max: f64,
}

impl DiracResidual {
    /// Interior residual against `factor * h_max^2`.
    pub fn check(&self, factor: f64) -> Result<()> {
        let tol = factor * self.h_max * self.h_max;
        if self.interior > tol {
            return Err(Error::ResidualTooLarge {
                max: self.interior,
                tol,
            });
        }
        Ok(())
    }
}

pub fn dirac_residual(d: &DiracData) -> DiracResidual {
    let spec = d.spec();
    let p1 = SpinorPair {
        phi: d.phi1.clone(),
        psi: d.psi1.clone(),
    };
    let p2 = SpinorPair {
        phi: d.phi2.clone(),
        psi: d.psi2.clone(),
    };
    let (r_phi1, r_psi1) = pair_residual_fields(&p1, &d.p, &d.q).expect("constructed on one grid");
    let (r_phi2, r_psi2) = pair_residual_fields(&p2, &d.p, &d.q).expect("constructed on one grid");
    let mut interior = 0.0f64;
    let mut boundary = 0.0f64;
    for i in 0..spec.ns {
        for j in 0..spec.nt {
            let e = r_phi1
                .get(i, j)
                .abs_max()
                .max(r_psi1.get(i, j).abs_max())
                .max(r_phi2.get(i, j).abs_max())
                .max(r_psi2.get(i, j).abs_max());
            if i == 0 || j == 0 || i == spec.ns - 1 || j == spec.nt - 1 {
                boundary = boundary.max(e);
            } else {
                interior = interior.max(e);
            }
        }
    }
    DiracResidual {
        r_phi1,
        r_psi1,
        r_phi2,
        r_psi2,
        interior,
        boundary,
        h_max: spec.h_max(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Field;

    #[test]
    fn zero_potentials_transport_data_exactly() {
        let spec = GridSpec::new(0.5, 1.5, -0.25, 0.25, 9, 7).unwrap();
        let p = Field::constant(spec, 0.0);
        let q = Field::constant(spec, 0.0);
        // phi = a hat(a) has split components (st, st); psi = a + hat(a) has
        // (s + t, s + t).  Neither restriction is constant along its line, so
        // a wrong transport direction would show up immediately.
        let data = CharacteristicData::sample(spec, |a| a * a.hat(), |a| a + a.hat());
        let sol = solve_pair(&p, &q, &data).unwrap();
        for i in 0..spec.ns {
            for j in 0..spec.nt {
                let (s, t) = (spec.s(i), spec.t(j));
                // phi+ keeps its s0-line profile s0*t, phi- keeps s*t0;
                // psi+ keeps s + t0, psi- keeps s0 + t.
                let expect_phi = Lorentz::from_split(spec.s0 * t, s * spec.t0);
                let expect_psi = Lorentz::from_split(s + spec.t0, spec.s0 + t);
                assert!((sol.phi.get(i, j) - expect_phi).abs_max() < 1e-14);
                assert!((sol.psi.get(i, j) - expect_psi).abs_max() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_potential_matches_exponential_solution() {
        // phi = psi = exp(-c (s + t)) solves both split pairs for p = q = c.
        let c = 0.3;
        let exact = |a: Lorentz| {
            let sp = a.split();
            Lorentz::real((-c * (sp.plus + sp.minus)).exp())
        };
        let erru = |n: usize| -> f64 {
            let spec = GridSpec::new(0.0, 1.0, 0.0, 0.7, n, n - 4).unwrap();
            let p = Field::constant(spec, c);
            let q = Field::constant(spec, c);
            let data = CharacteristicData::sample(spec, exact, exact);
            let sol = solve_pair(&p, &q, &data).unwrap();
            let mut e = 0.0f64;
            for i in 0..spec.ns {
                for j in 0..spec.nt {
                    let a = Lorentz::from_split(spec.s(i), spec.t(j));
                    e = e.max((sol.phi.get(i, j) - exact(a)).abs_max());
                    e = e.max((sol.psi.get(i, j) - exact(a)).abs_max());
                }
            }
            e
        };
        let e1 = erru(17);
        let e2 = erru(33);
        let slope = (e1 / e2).log2();
        assert!(e2 < 1e-3, "coarse error {e2}");
        assert!((slope - 2.0).abs() < 0.35, "slope {slope}");
    }

    #[test]
    fn solver_output_passes_residual_check() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 33, 33).unwrap();
        let p = Field::from_fn(spec, |i, j| {
            let (u, v) = spec.uv(i, j);
            0.4 * (u + 0.3 * v).cos()
        });
        let q = Field::from_fn(spec, |i, j| {
            let (u, _) = spec.uv(i, j);
            0.2 + 0.1 * u
        });
        let init1 = CharacteristicData::sample(spec, |a| a.cosh(), |a| a * 0.5);
        let init2 = CharacteristicData::sample(spec, |a| a, |a| Lorentz::real(1.0) + a * a);
        let d = solve_goursat(&p, &q, &init1, &init2).unwrap();
        let rep = dirac_residual(&d);
        assert!(
            rep.check(10.0).is_ok(),
            "interior residual {}",
            rep.interior
        );
        // Closedness along the way: d_a(psihat phi) = d_ahat(psi phihat).
        let lhs = d_a(&d.psi1.zip_map(&d.phi1, |ps, ph| ps.hat() * ph).unwrap());
        let rhs = d_ahat(&d.psi1.zip_map(&d.phi1, |ps, ph| ps * ph.hat()).unwrap());
        let mut defect = 0.0f64;
        for i in 1..spec.ns - 1 {
            for j in 1..spec.nt - 1 {
                defect = defect.max((lhs.get(i, j) - rhs.get(i, j)).abs_max());
            }
        }
        let h = spec.h_max();
        assert!(defect <= 10.0 * h * h, "closedness defect {defect}");
    }

    #[test]
    fn residual_flags_violating_fields() {
        // phi1 = a with p = 0 forces r_phi1 = d_a(a) = 1.
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 9, 9).unwrap();
        let zero = Field::constant(spec, 0.0);
        let one = AField::sample(spec, |_| Lorentz::real(1.0));
        let ident = AField::sample(spec, |a| a);
        let d = DiracData::new(ident, one.clone(), one.clone(), one, zero.clone(), zero).unwrap();
        let rep = dirac_residual(&d);
        assert!((rep.interior - 1.0).abs() < 1e-12);
        assert!(rep.check(10.0).is_err());
    }

    #[test]
    fn nondegeneracy_of_unit_and_null_pairs() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 5, 5).unwrap();
        let zero = Field::constant(spec, 0.0);
        let one = AField::sample(spec, |_| Lorentz::real(1.0));
        let zero_a = AField::sample(spec, |_| Lorentz::real(0.0));
        let ahat = AField::sample(spec, |a| a.hat());

        // psi1=1, psi2=0, phi1=ahat, phi2=1: cross = -1, sqnorm 1.
        let d = DiracData::new(
            ahat,
            one.clone(),
            one.clone(),
            zero_a.clone(),
            zero.clone(),
            zero.clone(),
        )
        .unwrap();
        let (min, ok) = d.nondegeneracy(1e-8);
        assert!(ok && (min - 1.0).abs() < 1e-12);

        // psi2 = phi2 = 0: cross = 0.
        let d = DiracData::new(
            one.clone(),
            one.clone(),
            zero_a.clone(),
            zero_a.clone(),
            zero.clone(),
            zero.clone(),
        )
        .unwrap();
        let (min, ok) = d.nondegeneracy(1e-8);
        assert!(!ok && min.abs() < 1e-15);

        // cross = 1 + sigma (null): psi2 = 1, phi1 = 1 + sigma, psi1 = 0.
        let null = AField::sample(spec, |_| Lorentz::new(1.0, 1.0));
        let d = DiracData::new(null, zero_a.clone(), one.clone(), one, zero.clone(), zero).unwrap();
        let (min, ok) = d.nondegeneracy(1e-8);
        assert!(!ok && min.abs() < 1e-15);
    }

    #[test]
    fn line_restrictions_must_agree_at_the_corner() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 5, 5).unwrap();
        let line_t: Vec<Lorentz> = (0..5).map(|j| Lorentz::real(j as f64)).collect();
        let mut line_s: Vec<Lorentz> = (0..5).map(|i| Lorentz::real(-(i as f64))).collect();
        let zeros = vec![Lorentz::real(0.0); 5];
        assert!(CharacteristicData::from_line_restrictions(
            spec, &line_t, &zeros, &line_s, &zeros, 1e-10
        )
        .is_ok());
        line_s[0] = Lorentz::real(0.5);
        let err = CharacteristicData::from_line_restrictions(
            spec, &line_t, &zeros, &line_s, &zeros, 1e-10,
        );
        assert!(matches!(err, Err(Error::InconsistentInitialData { .. })));
    }

    #[test]
    fn profile_lengths_are_checked() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 5, 7).unwrap();
        let err =
            CharacteristicData::new(spec, vec![0.0; 7], vec![0.0; 7], vec![0.0; 4], vec![0.0; 5]);
        assert!(matches!(err, Err(Error::ProfileLength { got: 4, want: 5 })));
    }

    #[test]
    fn potentials_must_share_the_grid() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 5, 5).unwrap();
        let other = GridSpec::new(0.0, 1.0, 0.0, 1.0, 7, 5).unwrap();
        let data = CharacteristicData::sample(spec, |_| Lorentz::real(1.0), |_| Lorentz::real(0.0));
        let p = Field::constant(other, 0.0);
        let q = Field::constant(spec, 0.0);
        assert!(matches!(
            solve_pair(&p, &q, &data),
            Err(Error::GridMismatch(_))
        ));
    }
}
