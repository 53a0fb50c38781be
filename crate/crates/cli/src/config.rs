//! Scenario configuration.
//!
//! A scenario is a JSON document that picks one of the six pipeline modes and
//! supplies its inputs.  A-valued inputs are pairs of expressions, one per
//! split component; the scalar potentials may instead point at a field CSV.
//! Relative CSV paths resolve against the config file's directory.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use lorsurf::clifford::Vec22;
use lorsurf::flat::ConformalOneForm;
use lorsurf::grid::{Field, GridSpec, RealField};
use lorsurf::io::read_real_field;
use lorsurf::weierstrass::{ConformalMap1D, Sign, Tolerances};
use lorsurf::Lorentz;

use crate::expr::{Expr, Var, Vars};
use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    grid: RawGrid,
    #[serde(default)]
    basepoint: [f64; 4],
    #[serde(default)]
    inputs: Inputs,
    #[serde(default)]
    tolerances: ToleranceOverrides,
    /// Directory the config was loaded from, for resolving CSV paths.
    #[serde(skip)]
    dir: PathBuf,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Minimal,
    Dirac,
    R21,
    Konderak,
    AdsFlat,
    S12Flat,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Minimal => "minimal",
            Mode::Dirac => "dirac",
            Mode::R21 => "r21",
            Mode::Konderak => "konderak",
            Mode::AdsFlat => "ads-flat",
            Mode::S12Flat => "s12-flat",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    s0: f64,
    s1: f64,
    t0: f64,
    t1: f64,
    ns: usize,
    nt: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToleranceOverrides {
    residual_factor: Option<f64>,
    path_factor: Option<f64>,
    reality: Option<f64>,
    nondegeneracy: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Inputs {
    psi1: Option<SplitInput>,
    psi2: Option<SplitInput>,
    phihat1: Option<SplitInput>,
    phihat2: Option<SplitInput>,
    phi1: Option<SplitInput>,
    phi2: Option<SplitInput>,
    phi: Option<SplitInput>,
    psi: Option<SplitInput>,
    p: Option<ScalarInput>,
    q: Option<ScalarInput>,
    sign: Option<Sign>,
    chi1: Option<SplitInput>,
    chi2: Option<SplitInput>,
    theta: Option<SplitInput>,
    omega: Option<SplitInput>,
}

/// The two split components of an A-valued input.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitInput {
    plus: String,
    minus: String,
}

/// A scalar grid field: an expression of `s, t, u, v`, or `{"csv": path}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ScalarInput {
    Expr(String),
    Csv { csv: PathBuf },
}

/// Closure form of an A-valued field expression.
pub type SpinorFn = Box<dyn FnMut(Lorentz) -> Lorentz>;

/// Mode-specific inputs, parsed and typed.
pub enum ResolvedInputs {
    Minimal {
        psi1: ConformalMap1D,
        psi2: ConformalMap1D,
        phihat1: ConformalMap1D,
        phihat2: ConformalMap1D,
    },
    Dirac {
        phi1: SpinorFn,
        psi1: SpinorFn,
        phi2: SpinorFn,
        psi2: SpinorFn,
        p: RealField,
        q: RealField,
    },
    R21 {
        phi: SpinorFn,
        psi: SpinorFn,
        p: RealField,
        sign: Sign,
    },
    Konderak {
        chi1: ConformalMap1D,
        chi2: ConformalMap1D,
    },
    Flat {
        theta: ConformalOneForm,
        omega: ConformalOneForm,
    },
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<ScenarioConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok(cfg)
    }

    #[cfg(test)]
    pub fn from_str(text: &str) -> Result<ScenarioConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn spec(&self) -> Result<GridSpec, CliError> {
        let g = &self.grid;
        GridSpec::new(g.s0, g.s1, g.t0, g.t1, g.ns, g.nt)
            .map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    pub fn basepoint(&self) -> Vec22 {
        Vec22(self.basepoint)
    }

    /// Effective thresholds: defaults, then overrides, then the defect
    /// bounds scaled by `--tol-scale`.  The nondegeneracy lower bound is not
    /// scaled; loosening defect tolerances should not loosen the gate that
    /// keeps metrics invertible.
    pub fn tolerances(&self, scale: f64) -> Tolerances {
        let o = &self.tolerances;
        let d = Tolerances::default();
        Tolerances {
            residual_factor: o.residual_factor.unwrap_or(d.residual_factor) * scale,
            path_factor: o.path_factor.unwrap_or(d.path_factor) * scale,
            reality: o.reality.unwrap_or(d.reality) * scale,
            nondegeneracy: o.nondegeneracy.unwrap_or(d.nondegeneracy),
        }
    }

    /// Parses and type-checks the inputs the mode needs, rejecting any that
    /// were supplied but belong to a different mode.
    pub fn resolve(&self, spec: GridSpec) -> Result<ResolvedInputs, CliError> {
        let inp = &self.inputs;
        self.check_unused()?;
        match self.mode {
            Mode::Minimal => Ok(ResolvedInputs::Minimal {
                psi1: profile("psi1", self.require(&inp.psi1, "psi1")?, spec)?,
                psi2: profile("psi2", self.require(&inp.psi2, "psi2")?, spec)?,
                phihat1: profile("phihat1", self.require(&inp.phihat1, "phihat1")?, spec)?,
                phihat2: profile("phihat2", self.require(&inp.phihat2, "phihat2")?, spec)?,
            }),
            Mode::Dirac => Ok(ResolvedInputs::Dirac {
                phi1: spinor_fn("phi1", self.require(&inp.phi1, "phi1")?)?,
                psi1: spinor_fn("psi1", self.require(&inp.psi1, "psi1")?)?,
                phi2: spinor_fn("phi2", self.require(&inp.phi2, "phi2")?)?,
                psi2: spinor_fn("psi2", self.require(&inp.psi2, "psi2")?)?,
                p: self.scalar_field("p", self.require(&inp.p, "p")?, spec)?,
                q: self.scalar_field("q", self.require(&inp.q, "q")?, spec)?,
            }),
            Mode::R21 => Ok(ResolvedInputs::R21 {
                phi: spinor_fn("phi", self.require(&inp.phi, "phi")?)?,
                psi: spinor_fn("psi", self.require(&inp.psi, "psi")?)?,
                p: self.scalar_field("p", self.require(&inp.p, "p")?, spec)?,
                sign: inp.sign.unwrap_or(Sign::Plus),
            }),
            Mode::Konderak => Ok(ResolvedInputs::Konderak {
                chi1: profile("chi1", self.require(&inp.chi1, "chi1")?, spec)?,
                chi2: profile("chi2", self.require(&inp.chi2, "chi2")?, spec)?,
            }),
            Mode::AdsFlat | Mode::S12Flat => Ok(ResolvedInputs::Flat {
                theta: one_form("theta", self.require(&inp.theta, "theta")?)?,
                omega: one_form("omega", self.require(&inp.omega, "omega")?)?,
            }),
        }
    }

    fn require<'a, T>(&self, field: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        field.as_ref().ok_or_else(|| {
            CliError::Config(format!(
                "mode '{}' requires inputs.{name}",
                self.mode.name()
            ))
        })
    }

    fn check_unused(&self) -> Result<(), CliError> {
        let inp = &self.inputs;
        let allowed: &[&str] = match self.mode {
            Mode::Minimal => &["psi1", "psi2", "phihat1", "phihat2"],
            Mode::Dirac => &["phi1", "psi1", "phi2", "psi2", "p", "q"],
            Mode::R21 => &["phi", "psi", "p", "sign"],
            Mode::Konderak => &["chi1", "chi2"],
            Mode::AdsFlat | Mode::S12Flat => &["theta", "omega"],
        };
        let present = [
            ("psi1", inp.psi1.is_some()),
            ("psi2", inp.psi2.is_some()),
            ("phihat1", inp.phihat1.is_some()),
            ("phihat2", inp.phihat2.is_some()),
            ("phi1", inp.phi1.is_some()),
            ("phi2", inp.phi2.is_some()),
            ("phi", inp.phi.is_some()),
            ("psi", inp.psi.is_some()),
            ("p", inp.p.is_some()),
            ("q", inp.q.is_some()),
            ("sign", inp.sign.is_some()),
            ("chi1", inp.chi1.is_some()),
            ("chi2", inp.chi2.is_some()),
            ("theta", inp.theta.is_some()),
            ("omega", inp.omega.is_some()),
        ];
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return Err(CliError::Config(format!(
                    "inputs.{name} is not used by mode '{}'",
                    self.mode.name()
                )));
            }
        }
        Ok(())
    }

    fn scalar_field(
        &self,
        name: &str,
        input: &ScalarInput,
        spec: GridSpec,
    ) -> Result<RealField, CliError> {
        match input {
            ScalarInput::Expr(src) => {
                let e = parse_expr(name, src)?;
                Ok(Field::from_fn(spec, |i, j| {
                    e.eval(Vars::new(spec.s(i), spec.t(j)))
                }))
            }
            ScalarInput::Csv { csv } => {
                let path = self.dir.join(csv);
                let file = File::open(&path).map_err(|e| {
                    CliError::Config(format!("inputs.{name}: {}: {e}", path.display()))
                })?;
                let field = read_real_field(BufReader::new(file)).map_err(CliError::Pipeline)?;
                if field.spec() != spec {
                    return Err(CliError::Config(format!(
                        "inputs.{name}: {} is sampled on a different grid",
                        path.display()
                    )));
                }
                Ok(field)
            }
        }
    }
}

fn parse_expr(ctx: &str, src: &str) -> Result<Expr, CliError> {
    Expr::parse(src).map_err(|e| CliError::Config(format!("inputs.{ctx}: {e}")))
}

fn restricted(name: &str, leg: &str, src: &str, allowed: Var) -> Result<Expr, CliError> {
    let e = parse_expr(&format!("{name}.{leg}"), src)?;
    for v in [Var::S, Var::T, Var::U, Var::V] {
        if v != allowed && e.uses(v) {
            return Err(CliError::Config(format!(
                "inputs.{name}.{leg} may only reference {allowed}, found {v}"
            )));
        }
    }
    Ok(e)
}

/// Conformal map given by its two single-variable profiles: `plus` over `s`,
/// `minus` over `t`.
fn profile(name: &str, input: &SplitInput, spec: GridSpec) -> Result<ConformalMap1D, CliError> {
    let plus = restricted(name, "plus", &input.plus, Var::S)?;
    let minus = restricted(name, "minus", &input.minus, Var::T)?;
    Ok(ConformalMap1D::from_fns(
        spec,
        |s| plus.eval(Vars::new(s, 0.0)),
        |t| minus.eval(Vars::new(0.0, t)),
    ))
}

/// Conformal 1-form coefficient, same shape as [`profile`].
fn one_form(name: &str, input: &SplitInput) -> Result<ConformalOneForm, CliError> {
    let plus = restricted(name, "plus", &input.plus, Var::S)?;
    let minus = restricted(name, "minus", &input.minus, Var::T)?;
    Ok(ConformalOneForm::new(
        move |s| plus.eval(Vars::new(s, 0.0)),
        move |t| minus.eval(Vars::new(0.0, t)),
    ))
}

/// Unrestricted A-valued field of the grid point.
fn spinor_fn(name: &str, input: &SplitInput) -> Result<SpinorFn, CliError> {
    let plus = parse_expr(&format!("{name}.plus"), &input.plus)?;
    let minus = parse_expr(&format!("{name}.minus"), &input.minus)?;
    Ok(Box::new(move |a: Lorentz| {
        let sp = a.split();
        let at = Vars::new(sp.plus, sp.minus);
        Lorentz::from_split(plus.eval(at), minus.eval(at))
    }))
}
