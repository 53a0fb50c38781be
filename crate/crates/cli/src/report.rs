//! Report documents.
//!
//! `generate` writes a [`Report`]; `verify` writes a [`VerifyDoc`] whose
//! `verification` object is rebuilt from the immersion CSV alone, so a
//! generate/verify round trip can be compared field for field.

use serde::Serialize;

use lorsurf::grid::GridSpec;
use lorsurf::grid::RealField;
use lorsurf::oracle::{curvature_report, first_form};
use lorsurf::weierstrass::{Immersion22, Tolerances};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub mode: &'static str,
    pub grid: GridSpec,
    /// Effective thresholds after overrides and `--tol-scale`.
    pub tolerances: Tolerances,
    pub invariants: Vec<Flag>,
    pub agreement: Option<Agreement>,
    pub verification: Verification,
    /// True iff every invariant flag passed.
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyDoc {
    pub schema_version: u32,
    pub verification: Verification,
}

/// One named pipeline invariant with its measured value.
#[derive(Debug, Serialize)]
pub struct Flag {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Flag {
    pub fn at_most(name: &'static str, value: f64, threshold: f64) -> Flag {
        Flag {
            name,
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    pub fn at_least(name: &'static str, value: f64, threshold: f64) -> Flag {
        Flag {
            name,
            value,
            threshold,
            pass: value >= threshold,
        }
    }
}

/// Gap between the closed-form metric/curvature fields of the spinor data
/// and what the oracle measures on the integrated surface.
#[derive(Debug, Serialize)]
pub struct Agreement {
    /// Interior sup of the first-form error relative to the conformal factor.
    pub metric_max_rel_err: f64,
    /// Interior sup of |oracle mean curvature square - formula|.
    pub curvature_max_abs_err: f64,
}

/// Oracle statistics computable from an immersion alone.  Curvature fields
/// are NaN on the boundary margin; the stats skip those nodes.
#[derive(Debug, Serialize)]
pub struct Verification {
    pub schema_version: u32,
    pub grid: GridSpec,
    pub margin: usize,
    pub gauss_k: FieldStats,
    pub h_sqnorm: FieldStats,
    pub mean_vector_max_abs: f64,
    pub conformal_defect: f64,
    pub null_conformal_defect: f64,
    pub first_form_e: FieldStats,
    pub first_form_f: FieldStats,
    pub first_form_g: FieldStats,
}

impl Verification {
    pub fn from_immersion(im: &Immersion22) -> Result<Verification, CliError> {
        let report = curvature_report(im).map_err(CliError::Pipeline)?;
        let first = first_form(im).map_err(CliError::Pipeline)?;
        let mut mean_max = 0.0f64;
        for w in report.mean_vector.values() {
            for &c in &w.0 {
                if !c.is_nan() {
                    mean_max = mean_max.max(c.abs());
                }
            }
        }
        Ok(Verification {
            schema_version: SCHEMA_VERSION,
            grid: im.spec(),
            margin: report.margin,
            gauss_k: FieldStats::of(&report.gauss_k),
            h_sqnorm: FieldStats::of(&report.h_sqnorm),
            mean_vector_max_abs: mean_max,
            conformal_defect: report.conformal_defect,
            null_conformal_defect: report.null_conformal_defect,
            first_form_e: FieldStats::of(&first.e),
            first_form_f: FieldStats::of(&first.f),
            first_form_g: FieldStats::of(&first.g),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct FieldStats {
    pub min: f64,
    pub max: f64,
    pub max_abs: f64,
}

impl FieldStats {
    pub fn of(field: &RealField) -> FieldStats {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut max_abs = 0.0f64;
        let mut any = false;
        for &x in field.values() {
            if x.is_nan() {
                continue;
            }
            any = true;
            min = min.min(x);
            max = max.max(x);
            max_abs = max_abs.max(x.abs());
        }
        if !any {
            // All-NaN field (grid too small for the margin); serializes as
            // JSON nulls.
            return FieldStats {
                min: f64::NAN,
                max: f64::NAN,
                max_abs: f64::NAN,
            };
        }
        FieldStats { min, max, max_abs }
    }
}
