use thiserror::Error;

/// Everything that can go wrong across the solver and oracle layers.
///
/// Numeric payloads carry the measured quantity so callers can report how far
/// off the data was, not just that it failed.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("division by a null Lorentz number (u^2 = v^2)")]
    NullDivisor,

    #[error("grid must have at least 3 nodes per axis and positive extent")]
    GridTooSmall,

    #[error("grid shapes disagree: {0}")]
    GridMismatch(String),

    #[error("profile length {got} does not match grid axis length {want}")]
    ProfileLength { got: usize, want: usize },

    #[error(
        "characteristic profiles disagree at the corner (mismatch {mismatch:.3e}, tol {tol:.3e})"
    )]
    InconsistentInitialData { mismatch: f64, tol: f64 },

    #[error("Dirac residual {max:.3e} exceeds threshold {tol:.3e}")]
    ResidualTooLarge { max: f64, tol: f64 },

    #[error("characteristic step too large for the potentials (corner denominator {denom:.3e})")]
    StepTooLarge { denom: f64 },

    #[error("two-path integration defect {defect:.3e} exceeds threshold {tol:.3e}")]
    PathDependence { defect: f64, tol: f64 },

    #[error("integrated coordinates fail the reality/conjugacy constraints (defect {defect:.3e}, tol {tol:.3e})")]
    RealityDefect { defect: f64, tol: f64 },

    #[error("spinor pair degenerates: min |sqnorm(psi2 phi1 - psi1 phi2)| = {min:.3e}")]
    NondegeneracyFailed { min: f64 },

    #[error("metric factor vanishes somewhere (min |value| = {min:.3e})")]
    DegenerateMetric { min: f64 },

    #[error("chi1 hits the null cone (min |sqnorm| = {min:.3e}); the Gauss map g = chi2/chi1 is undefined")]
    NullChi1 { min: f64 },

    #[error("spinor is not H-unit: |H(p,p) - 1| = {defect:.3e}")]
    NotUnitSpinor { defect: f64 },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("frame determinant drifted by {drift:.3e} in one step (limit {tol:.3e})")]
    DetDrift { drift: f64, tol: f64 },

    #[error("1-form pair is degenerate for this target: min |weight| = {min:.3e}")]
    DegenerateImmersion { min: f64 },

    #[error("frame field is not a product of single-variable curves (defect {defect:.3e}, tol {tol:.3e})")]
    NotSplit { defect: f64, tol: f64 },

    #[error("tangent plane degenerates at a grid point (|EG - F^2| = {min:.3e})")]
    DegenerateTangent { min: f64 },

    #[error("normal frame hits a null direction (eigenvalue magnitude {min:.3e})")]
    NullNormalDirection { min: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
