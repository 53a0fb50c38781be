//! Mode pipelines behind `generate`.
//!
//! Each mode runs its library pipeline, turns the gate measurements into
//! named invariant flags, and attaches the oracle verification of the
//! resulting surface.  Gates the library enforces itself surface here as
//! pipeline errors instead of failed flags.

use lorsurf::clifford::Mat2A;
use lorsurf::dirac::{solve_pair, CharacteristicData, DiracData};
use lorsurf::flat::{
    ads_immersion, flat_metric_shape, frame_equation_residual, integrate_frame, membership_defect,
    s12_immersion, Mat2AField, SpaceForm,
};
use lorsurf::grid::{Field, GridSpec, RealField};
use lorsurf::oracle::{
    first_form, gauss_curvature, interior_max, mean_curvature_vector, INTERIOR_MARGIN,
};
use lorsurf::weierstrass::{
    integrate_immersion, konderak_form, metric_formula, minimal_immersion, r21_immersion,
    Immersion22, Tolerances,
};

use crate::config::{Mode, ResolvedInputs, ScenarioConfig};
use crate::report::{Agreement, Flag, Report, Verification, SCHEMA_VERSION};
use crate::CliError;

/// Fixed bound for `<F,F> = -+1` membership of the flat immersions.
const MEMBERSHIP_TOL: f64 = 1e-8;

/// Everything `generate` writes to disk.
pub struct Artifacts {
    pub immersion: Immersion22,
    pub frames: Option<Mat2AField>,
    pub report: Report,
}

pub fn generate(
    cfg: &ScenarioConfig,
    spec: GridSpec,
    tol: &Tolerances,
) -> Result<Artifacts, CliError> {
    let h2 = spec.h_max() * spec.h_max();
    let pipe = CliError::Pipeline;
    match cfg.resolve(spec)? {
        ResolvedInputs::Minimal {
            psi1,
            psi2,
            phihat1,
            phihat2,
        } => {
            let build = minimal_immersion(&psi1, &psi2, &phihat1, &phihat2, cfg.basepoint(), tol)
                .map_err(pipe)?;
            // The general pipeline on the induced data supplies the defect
            // numbers and cross-checks the specialization.
            let general = integrate_immersion(&build.data, cfg.basepoint(), tol).map_err(pipe)?;
            let spez = build.immersion.max_abs_diff(&general.immersion);
            let flags = vec![
                Flag::at_most("dirac_residual", general.residual, tol.residual_factor * h2),
                Flag::at_most(
                    "path_independence",
                    general.path_defect,
                    tol.path_factor * h2,
                ),
                Flag::at_most("reality", general.reality_defect, tol.reality),
                Flag::at_most("conjugacy", general.conjugacy_defect, tol.reality),
                Flag::at_least("nondegeneracy", general.min_lambda_sq, tol.nondegeneracy),
                Flag::at_most("specialization_agreement", spez, tol.reality),
            ];
            let agreement = formula_agreement(&build.data, &build.immersion)?;
            finish(
                cfg.mode,
                spec,
                tol,
                build.immersion,
                None,
                flags,
                Some(agreement),
            )
        }

        ResolvedInputs::Dirac {
            mut phi1,
            mut psi1,
            mut phi2,
            mut psi2,
            p,
            q,
        } => {
            let d1 = CharacteristicData::sample(spec, &mut *phi1, &mut *psi1);
            let d2 = CharacteristicData::sample(spec, &mut *phi2, &mut *psi2);
            let pair1 = solve_pair(&p, &q, &d1).map_err(pipe)?;
            let pair2 = solve_pair(&p, &q, &d2).map_err(pipe)?;
            let data =
                DiracData::new(pair1.phi, pair1.psi, pair2.phi, pair2.psi, p, q).map_err(pipe)?;
            let build = integrate_immersion(&data, cfg.basepoint(), tol).map_err(pipe)?;
            let flags = vec![
                Flag::at_most("dirac_residual", build.residual, tol.residual_factor * h2),
                Flag::at_most("path_independence", build.path_defect, tol.path_factor * h2),
                Flag::at_most("reality", build.reality_defect, tol.reality),
                Flag::at_most("conjugacy", build.conjugacy_defect, tol.reality),
                Flag::at_least("nondegeneracy", build.min_lambda_sq, tol.nondegeneracy),
            ];
            let agreement = formula_agreement(&data, &build.immersion)?;
            finish(
                cfg.mode,
                spec,
                tol,
                build.immersion,
                None,
                flags,
                Some(agreement),
            )
        }

        ResolvedInputs::R21 {
            mut phi,
            mut psi,
            p,
            sign,
        } => {
            let init = CharacteristicData::sample(spec, &mut *phi, &mut *psi);
            let pair = solve_pair(&p, &p, &init).map_err(pipe)?;
            let build = r21_immersion(&pair.phi, &pair.psi, &p, sign, cfg.basepoint(), tol)
                .map_err(pipe)?;
            let flags = vec![
                Flag::at_most("path_independence", build.path_defect, tol.path_factor * h2),
                Flag::at_most("reality", build.reality_defect, tol.reality),
                Flag::at_most("conjugacy", build.conjugacy_defect, tol.reality),
                Flag::at_least("nondegeneracy", build.rho.min_abs(), tol.nondegeneracy),
            ];
            let rho_sq = build.rho.map(|r| r * r);
            let agreement = oracle_agreement(&build.immersion, &rho_sq, &build.h_sqnorm_formula)?;
            finish(
                cfg.mode,
                spec,
                tol,
                build.immersion,
                None,
                flags,
                Some(agreement),
            )
        }

        ResolvedInputs::Konderak { chi1, chi2 } => {
            let build = konderak_form(&chi1, &chi2, tol).map_err(pipe)?;
            let flags = vec![Flag::at_most(
                "route_agreement",
                build.agreement,
                tol.reality,
            )];
            finish(cfg.mode, spec, tol, build.f_chi, None, flags, None)
        }

        ResolvedInputs::Flat { theta, omega } => {
            let target = match cfg.mode {
                Mode::AdsFlat => SpaceForm::Ads,
                _ => SpaceForm::S12,
            };
            let b = integrate_frame(&theta, &omega, &Mat2A::identity(), spec).map_err(pipe)?;
            let im = match target {
                SpaceForm::Ads => ads_immersion(&b),
                SpaceForm::S12 => s12_immersion(&b),
            }
            .map_err(pipe)?;

            let shape = flat_metric_shape(&b, target);
            let first = first_form(&im).map_err(pipe)?;
            let metric_err = Field::from_fn(spec, |i, j| {
                let e = shape.g_ss.get(i, j) + 2.0 * shape.g_st.get(i, j) + shape.g_tt.get(i, j);
                let f = shape.g_ss.get(i, j) - shape.g_tt.get(i, j);
                let g = shape.g_ss.get(i, j) - 2.0 * shape.g_st.get(i, j) + shape.g_tt.get(i, j);
                (first.e.get(i, j) - e)
                    .abs()
                    .max((first.f.get(i, j) - f).abs())
                    .max((first.g.get(i, j) - g).abs())
            });
            let k_max = interior_max(
                &gauss_curvature(&im).map_err(pipe)?,
                INTERIOR_MARGIN,
                f64::abs,
            );
            let frame_res = interior_max(&frame_equation_residual(&b).map_err(pipe)?, 1, |x| x);
            let flags = vec![
                Flag::at_most(
                    "unit_determinant",
                    b.unit_det_defect(),
                    tol.residual_factor * h2,
                ),
                Flag::at_most("membership", membership_defect(&im, target), MEMBERSHIP_TOL),
                Flag::at_most("flatness", k_max, 100.0 * h2),
                Flag::at_most(
                    "metric_agreement",
                    interior_max(&metric_err, 1, |x| x),
                    100.0 * h2,
                ),
                Flag::at_most("frame_residual", frame_res, tol.residual_factor * h2),
            ];
            finish(cfg.mode, spec, tol, im, Some(b), flags, None)
        }
    }
}

/// Compares the oracle's first form and curvature square against the
/// conformal factor field and curvature formula of the spinor data.
fn formula_agreement(d: &DiracData, im: &Immersion22) -> Result<Agreement, CliError> {
    let formula = metric_formula(d);
    oracle_agreement(im, &formula.lambda_sq, &formula.h_sqnorm_formula)
}

fn oracle_agreement(
    im: &Immersion22,
    lambda_sq: &RealField,
    h_formula: &RealField,
) -> Result<Agreement, CliError> {
    let first = first_form(im).map_err(CliError::Pipeline)?;
    let spec = im.spec();
    let rel = Field::from_fn(spec, |i, j| {
        let l2 = lambda_sq.get(i, j);
        (first.e.get(i, j) + l2)
            .abs()
            .max((first.g.get(i, j) - l2).abs())
            .max(first.f.get(i, j).abs())
            / l2.abs().max(f64::MIN_POSITIVE)
    });
    let mean = mean_curvature_vector(im).map_err(CliError::Pipeline)?;
    let diff = mean
        .sqnorm
        .zip_map(h_formula, |a, b| a - b)
        .expect("same grid");
    Ok(Agreement {
        metric_max_rel_err: interior_max(&rel, 1, |x| x),
        curvature_max_abs_err: interior_max(&diff, INTERIOR_MARGIN, f64::abs),
    })
}

fn finish(
    mode: Mode,
    spec: GridSpec,
    tol: &Tolerances,
    immersion: Immersion22,
    frames: Option<Mat2AField>,
    invariants: Vec<Flag>,
    agreement: Option<Agreement>,
) -> Result<Artifacts, CliError> {
    let verification = Verification::from_immersion(&immersion)?;
    let pass = invariants.iter().all(|f| f.pass);
    Ok(Artifacts {
        immersion,
        frames,
        report: Report {
            schema_version: SCHEMA_VERSION,
            mode: mode.name(),
            grid: spec,
            tolerances: *tol,
            invariants,
            agreement,
            verification,
            pass,
        },
    })
}
