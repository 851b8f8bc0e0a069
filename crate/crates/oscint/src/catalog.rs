//! Function catalog: the library of phase and weight functions, scenario
//! configuration, and the plain-text scenario format.
//!
//! Every integral handled by this crate has the shape
//! `∫_α^β g(y)·e(f(y)) dy` with a *phase* `f` drawn from [`PhaseSpec`] and a
//! *weight* `g` drawn from [`WeightSpec`]. Each catalog entry can evaluate
//! itself three ways:
//!
//! * plain `f64` (used by the quadrature oracle),
//! * double-double (used by the extended-precision oracle),
//! * as a truncated Taylor jet (used by the expansion modules, which need
//!   exact high-order derivatives).
//!
//! The catalog also owns [`ScenarioParams`], the parameter bundle
//! (T, M, N, m, c, n₁, n₂, ε) together with its derived quantities
//!
//! ```text
//!   M₁ = N/m²,   T₁ = √N/(c·m),   N₁ = N^{3/2}/(T²·c·m³),   U₁ = (N/m²)^{−13/12},
//!   C₁ = T^100,  C₂ = √N/(T^{1−ε}·M),
//! ```
//!
//! and the scenario text format consumed by the CLI.

use crate::dd::{e_unit_dd, Dd, DdComplex, DD_TAU};
use crate::e_unit;
use crate::jets::{Jet, JetError};
use num_complex::Complex64;
use std::collections::BTreeSet;
use std::f64::consts::PI;
use thiserror::Error;

/// Errors from catalog construction, evaluation, and parsing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    /// A parameter bundle violates its positivity/ordering preconditions.
    #[error("parameter error: {0}")]
    ParamError(String),
    /// Scenario text could not be parsed.
    #[error("parse error at line {line}: {detail}")]
    ParseError { line: usize, detail: String },
    /// A function was evaluated outside its natural domain.
    #[error("domain error: {0}")]
    DomainError(String),
    /// Jet arithmetic failed underneath a catalog evaluation.
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Shape of the spectral test function `k*(t)`.
///
/// `PureGaussian` is `k*(t) = e^{−t²}`, whose transform has the closed form
/// `k̂*(ζ) = √π·e^{−π²ζ²}` under the convention `k̂(ζ) = ∫k(t)e(−tζ)dt`.
/// `GaussianTimesProxy` multiplies the Gaussian by the smooth rational window
/// `v(t) = 1/(1+t²/4)`, standing in for kernels known only through their
/// transform; its `k̂*` has no closed form and is reached by quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surrogate {
    PureGaussian,
    GaussianTimesProxy,
}

impl Surrogate {
    pub fn id_str(self) -> &'static str {
        match self {
            Surrogate::PureGaussian => "PureGaussian",
            Surrogate::GaussianTimesProxy => "GaussianTimesProxy",
        }
    }

    pub fn from_id(s: &str) -> Option<Self> {
        match s {
            "PureGaussian" => Some(Surrogate::PureGaussian),
            "GaussianTimesProxy" => Some(Surrogate::GaussianTimesProxy),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Phases
// ---------------------------------------------------------------------------

/// Catalog of phase functions `f` in `∫ g·e(f)`.
///
/// All phases are real-valued on their natural domain. `shift` translates the
/// synthetic phases (`f(y) = base(y − shift)`); `scale` multiplies the
/// geometric phases, which is how sweep grids rescale them.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSpec {
    /// `f(y) = slope·(y − shift)`.
    Linear { slope: f64, shift: f64 },
    /// `f(y) = t·(y − shift)²` — the quadratic model phase.
    Fresnel { t: f64, shift: f64 },
    /// `f(y) = t·(y − shift)³`.
    Cubic { t: f64, shift: f64 },
    /// `f(y) = scale·(2√y/c + 3(xy)^{1/3})`, monotone increasing on `y > 0`.
    U1 { x: f64, c: f64, scale: f64 },
    /// `f(y) = scale·(2√y/c − 3(xy)^{1/3})`, stationary at `y₀ = x²c⁶`.
    U2 { x: f64, c: f64, scale: f64 },
    /// `f(ζ) = −t·ζ/m − (x/2π)·cosh(ζπ/m)` — cosh-kernel transform phase.
    CoshPhase { t: f64, m: f64, x: f64 },
    /// `f(ζ) = −t·ζ/m + (x/2π)·sinh(ζπ/m)` — sinh-kernel transform phase.
    SinhPhase { t: f64, m: f64, x: f64 },
    /// `f(y) = scale·(−3(xy)^{1/3} − t²·c·m/(4π²·y·n₁²))` — the dual-side
    /// cube-root phase with an inverse-linear correction.
    V2 {
        x: f64,
        t: f64,
        c: f64,
        m: f64,
        n1: f64,
        scale: f64,
    },
}

impl PhaseSpec {
    /// Discriminant used in the scenario text format.
    pub fn id_str(&self) -> &'static str {
        match self {
            PhaseSpec::Linear { .. } => "Linear",
            PhaseSpec::Fresnel { .. } => "Fresnel",
            PhaseSpec::Cubic { .. } => "Cubic",
            PhaseSpec::U1 { .. } => "U1",
            PhaseSpec::U2 { .. } => "U2",
            PhaseSpec::CoshPhase { .. } => "CoshPhase",
            PhaseSpec::SinhPhase { .. } => "SinhPhase",
            PhaseSpec::V2 { .. } => "V2",
        }
    }

    /// Plain double evaluation. Domain violations (√ or cube root of a
    /// non-positive argument) surface as NaN, matching f64 semantics; the
    /// jet path reports them as errors instead.
    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            PhaseSpec::Linear { slope, shift } => slope * (y - shift),
            PhaseSpec::Fresnel { t, shift } => {
                let u = y - shift;
                t * u * u
            }
            PhaseSpec::Cubic { t, shift } => {
                let u = y - shift;
                t * u * u * u
            }
            PhaseSpec::U1 { x, c, scale } => {
                scale * (2.0 * y.sqrt() / c + 3.0 * (x * y).cbrt())
            }
            PhaseSpec::U2 { x, c, scale } => {
                scale * (2.0 * y.sqrt() / c - 3.0 * (x * y).cbrt())
            }
            PhaseSpec::CoshPhase { t, m, x } => {
                -t * y / m - x / (2.0 * PI) * (y * PI / m).cosh()
            }
            PhaseSpec::SinhPhase { t, m, x } => {
                -t * y / m + x / (2.0 * PI) * (y * PI / m).sinh()
            }
            PhaseSpec::V2 {
                x,
                t,
                c,
                m,
                n1,
                scale,
            } => scale * (-3.0 * (x * y).cbrt() - t * t * c * m / (4.0 * PI * PI * y * n1 * n1)),
        }
    }

    /// Double-double evaluation (extended-precision oracle path).
    pub fn eval_dd(&self, y: Dd) -> Dd {
        match *self {
            PhaseSpec::Linear { slope, shift } => y.sub(Dd::from_f64(shift)).mul_f64(slope),
            PhaseSpec::Fresnel { t, shift } => {
                let u = y.sub(Dd::from_f64(shift));
                u.mul(u).mul_f64(t)
            }
            PhaseSpec::Cubic { t, shift } => {
                let u = y.sub(Dd::from_f64(shift));
                u.mul(u).mul(u).mul_f64(t)
            }
            PhaseSpec::U1 { x, c, scale } => {
                let a = y.sqrt().mul_f64(2.0 / c);
                let b = y.mul_f64(x).cbrt().mul_f64(3.0);
                a.add(b).mul_f64(scale)
            }
            PhaseSpec::U2 { x, c, scale } => {
                let a = y.sqrt().mul_f64(2.0 / c);
                let b = y.mul_f64(x).cbrt().mul_f64(3.0);
                a.sub(b).mul_f64(scale)
            }
            PhaseSpec::CoshPhase { t, m, x } => {
                let lin = y.mul_f64(-t / m);
                let (_, ch) = y.mul_f64(PI / m).sinh_cosh();
                lin.sub(ch.mul(Dd::from_f64(x).div(DD_TAU)))
            }
            PhaseSpec::SinhPhase { t, m, x } => {
                let lin = y.mul_f64(-t / m);
                let (sh, _) = y.mul_f64(PI / m).sinh_cosh();
                lin.add(sh.mul(Dd::from_f64(x).div(DD_TAU)))
            }
            PhaseSpec::V2 {
                x,
                t,
                c,
                m,
                n1,
                scale,
            } => {
                let a = y.mul_f64(x).cbrt().mul_f64(-3.0);
                let denom = y.mul_f64(4.0 * PI * PI * n1 * n1);
                let b = Dd::from_f64(t * t * c * m).div(denom);
                a.sub(b).mul_f64(scale)
            }
        }
    }

    /// Taylor jet at `point` with the given truncation order.
    pub fn jet(&self, point: f64, order: usize) -> Result<Jet, CatalogError> {
        let re = |v: f64| Complex64::new(v, 0.0);
        let y = Jet::variable(point, order)?;
        let out = match *self {
            PhaseSpec::Linear { slope, shift } => {
                let sh = Jet::constant(re(shift), point, order)?;
                y.sub(&sh)?.scale(re(slope))
            }
            PhaseSpec::Fresnel { t, shift } => {
                let sh = Jet::constant(re(shift), point, order)?;
                let u = y.sub(&sh)?;
                u.mul(&u)?.scale(re(t))
            }
            PhaseSpec::Cubic { t, shift } => {
                let sh = Jet::constant(re(shift), point, order)?;
                let u = y.sub(&sh)?;
                u.mul(&u)?.mul(&u)?.scale(re(t))
            }
            PhaseSpec::U1 { x, c, scale } => {
                self.require_positive(point, "U1 needs y > 0")?;
                let a = y.sqrt()?.scale(re(2.0 / c));
                let b = y.scale(re(x)).cbrt()?.scale(re(3.0));
                a.add(&b)?.scale(re(scale))
            }
            PhaseSpec::U2 { x, c, scale } => {
                self.require_positive(point, "U2 needs y > 0")?;
                let a = y.sqrt()?.scale(re(2.0 / c));
                let b = y.scale(re(x)).cbrt()?.scale(re(3.0));
                a.sub(&b)?.scale(re(scale))
            }
            PhaseSpec::CoshPhase { t, m, x } => {
                let lin = y.scale(re(-t / m));
                let ch = y.scale(re(PI / m)).cosh();
                lin.sub(&ch.scale(re(x / (2.0 * PI))))?
            }
            PhaseSpec::SinhPhase { t, m, x } => {
                let lin = y.scale(re(-t / m));
                let sh = y.scale(re(PI / m)).sinh();
                lin.add(&sh.scale(re(x / (2.0 * PI))))?
            }
            PhaseSpec::V2 {
                x,
                t,
                c,
                m,
                n1,
                scale,
            } => {
                self.require_positive(point, "V2 needs y > 0")?;
                let a = y.scale(re(x)).cbrt()?.scale(re(-3.0));
                let b = y
                    .scale(re(4.0 * PI * PI * n1 * n1))
                    .recip()?
                    .scale(re(t * t * c * m));
                a.sub(&b)?.scale(re(scale))
            }
        };
        Ok(out)
    }

    fn require_positive(&self, point: f64, msg: &str) -> Result<(), CatalogError> {
        if point <= 0.0 {
            Err(CatalogError::DomainError(format!("{msg} (got {point})")))
        } else {
            Ok(())
        }
    }

    /// Replace the leading magnitude parameter with a sweep-grid value: the
    /// slope for `Linear`, `t` for `Fresnel`/`Cubic`/`CoshPhase`/`SinhPhase`,
    /// the overall `scale` for the geometric phases.
    pub fn with_sweep_value(&self, v: f64) -> PhaseSpec {
        let mut out = self.clone();
        match &mut out {
            PhaseSpec::Linear { slope, .. } => *slope = v,
            PhaseSpec::Fresnel { t, .. } | PhaseSpec::Cubic { t, .. } => *t = v,
            PhaseSpec::U1 { scale, .. }
            | PhaseSpec::U2 { scale, .. }
            | PhaseSpec::V2 { scale, .. } => *scale = v,
            PhaseSpec::CoshPhase { t, .. } | PhaseSpec::SinhPhase { t, .. } => *t = v,
        }
        out
    }

    /// Current value of the parameter [`with_sweep_value`](Self::with_sweep_value)
    /// replaces.
    pub fn sweep_value(&self) -> f64 {
        match *self {
            PhaseSpec::Linear { slope, .. } => slope,
            PhaseSpec::Fresnel { t, .. } | PhaseSpec::Cubic { t, .. } => t,
            PhaseSpec::U1 { scale, .. }
            | PhaseSpec::U2 { scale, .. }
            | PhaseSpec::V2 { scale, .. } => scale,
            PhaseSpec::CoshPhase { t, .. } | PhaseSpec::SinhPhase { t, .. } => t,
        }
    }

    /// Named parameters, in canonical serialization order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            PhaseSpec::Linear { slope, shift } => vec![("slope", slope), ("shift", shift)],
            PhaseSpec::Fresnel { t, shift } | PhaseSpec::Cubic { t, shift } => {
                vec![("t", t), ("shift", shift)]
            }
            PhaseSpec::U1 { x, c, scale } | PhaseSpec::U2 { x, c, scale } => {
                vec![("x", x), ("c", c), ("scale", scale)]
            }
            PhaseSpec::CoshPhase { t, m, x } | PhaseSpec::SinhPhase { t, m, x } => {
                vec![("t", t), ("m", m), ("x", x)]
            }
            PhaseSpec::V2 {
                x,
                t,
                c,
                m,
                n1,
                scale,
            } => vec![
                ("x", x),
                ("t", t),
                ("c", c),
                ("m", m),
                ("n1", n1),
                ("scale", scale),
            ],
        }
    }

    fn from_kv(id: &str, kv: &KvReader) -> Result<PhaseSpec, CatalogError> {
        let spec = match id {
            "Linear" => PhaseSpec::Linear {
                slope: kv.num("slope")?,
                shift: kv.num_or("shift", 0.0)?,
            },
            "Fresnel" => PhaseSpec::Fresnel {
                t: kv.num("t")?,
                shift: kv.num_or("shift", 0.0)?,
            },
            "Cubic" => PhaseSpec::Cubic {
                t: kv.num("t")?,
                shift: kv.num_or("shift", 0.0)?,
            },
            "U1" => PhaseSpec::U1 {
                x: kv.num("x")?,
                c: kv.num("c")?,
                scale: kv.num_or("scale", 1.0)?,
            },
            "U2" => PhaseSpec::U2 {
                x: kv.num("x")?,
                c: kv.num("c")?,
                scale: kv.num_or("scale", 1.0)?,
            },
            "CoshPhase" => PhaseSpec::CoshPhase {
                t: kv.num("t")?,
                m: kv.num("m")?,
                x: kv.num("x")?,
            },
            "SinhPhase" => PhaseSpec::SinhPhase {
                t: kv.num("t")?,
                m: kv.num("m")?,
                x: kv.num("x")?,
            },
            "V2" => PhaseSpec::V2 {
                x: kv.num("x")?,
                t: kv.num("t")?,
                c: kv.num("c")?,
                m: kv.num("m")?,
                n1: kv.num("n1")?,
                scale: kv.num_or("scale", 1.0)?,
            },
            other => {
                return Err(CatalogError::ParseError {
                    line: kv.line,
                    detail: format!("unknown phase id `{other}`"),
                })
            }
        };
        Ok(spec)
    }
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

/// Catalog of weight functions `g` in `∫ g·e(f)`; complex-valued in general.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// Constant weight `g = amp`.
    One { amp: f64 },
    /// Compactly supported bump `amp·(1−t²)^p` under the affine map
    /// `t = (2y−a−b)/(b−a)`; `C^{p−1}` across the support edges.
    Bump { p: u32, a: f64, b: f64, amp: f64 },
    /// The weight attached to the first cube-root-phase integral:
    /// `σ(m²y/N)·k̂*(M·T·c/(2π²√y))·e(−T²c/(4π²√y))·y^{−13/12}`,
    /// where σ is the dyadic bump on [1,2] with exponent `p` and `k̂*` the
    /// Gaussian transform. Support: `y ∈ (N/m², 2N/m²)`.
    Ay {
        m: f64,
        big_n: f64,
        big_m: f64,
        t: f64,
        c: f64,
        p: u32,
    },
    /// Dual-side weight carrying its own oscillatory factor:
    /// `y^{−(3j+1)}·σ(y²n₁⁴/N)·k̂*(M·T·c·m/(2π²·y·n₁²))·e(−T²cm/(4π²·y·n₁²))`.
    /// Support: `y ∈ (√N/n₁², √(2N)/n₁²)`.
    Bj {
        j: u32,
        n1: f64,
        big_n: f64,
        big_m: f64,
        t: f64,
        c: f64,
        m: f64,
        p: u32,
    },
    /// Same as `Bj` but with the oscillation moved into the `V2` phase:
    /// `y^{−3j−4/3}·σ(y²n₁⁴/N)·k̂*(M·T·c·m/(2π²·y·n₁²))`; real-valued.
    Qj {
        j: u32,
        n1: f64,
        big_n: f64,
        big_m: f64,
        t: f64,
        c: f64,
        m: f64,
        p: u32,
    },
    /// The Gaussian transform itself as a window: `g(ζ) = √π·e^{−π²ζ²}`.
    KStarHatWindow,
}

/// Dyadic bump σ on [1,2]: `(1−(2u−3)²)^p` inside, zero outside.
fn sigma_bump(u: f64, p: u32) -> f64 {
    if u <= 1.0 || u >= 2.0 {
        return 0.0;
    }
    let t = 2.0 * u - 3.0;
    (1.0 - t * t).powi(p as i32)
}

fn sigma_bump_dd(u: Dd, p: u32) -> Dd {
    if u.hi <= 1.0 || u.hi >= 2.0 {
        return Dd::from_f64(0.0);
    }
    let t = u.mul_f64(2.0).sub(Dd::from_f64(3.0));
    Dd::from_f64(1.0).sub(t.mul(t)).powi(p as i32)
}

/// Jet of σ(u(y)) given the jet of u; zero jet outside the open support.
fn sigma_bump_jet(u: &Jet, p: u32) -> Result<Jet, JetError> {
    let u0 = u.value().re;
    if u0 <= 1.0 || u0 >= 2.0 {
        return Jet::constant(Complex64::new(0.0, 0.0), u.base_point(), u.order());
    }
    let three = Jet::constant(Complex64::new(3.0, 0.0), u.base_point(), u.order())?;
    let one = Jet::constant(Complex64::new(1.0, 0.0), u.base_point(), u.order())?;
    let t = u.scale(Complex64::new(2.0, 0.0)).sub(&three)?;
    one.sub(&t.mul(&t)?)?.powi(p)
}

/// `√π` — normalization of the Gaussian transform.
const SQRT_PI: f64 = 1.7724538509055159;

impl WeightSpec {
    pub fn id_str(&self) -> &'static str {
        match self {
            WeightSpec::One { .. } => "One",
            WeightSpec::Bump { .. } => "Bump",
            WeightSpec::Ay { .. } => "AY",
            WeightSpec::Bj { .. } => "BJ",
            WeightSpec::Qj { .. } => "QJ",
            WeightSpec::KStarHatWindow => "KStarHatWindow",
        }
    }

    /// Open support of the weight, when compact.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            WeightSpec::One { .. } | WeightSpec::KStarHatWindow => None,
            WeightSpec::Bump { a, b, .. } => Some((a, b)),
            WeightSpec::Ay { m, big_n, .. } => Some((big_n / (m * m), 2.0 * big_n / (m * m))),
            WeightSpec::Bj { n1, big_n, .. } | WeightSpec::Qj { n1, big_n, .. } => {
                let lo = big_n.sqrt() / (n1 * n1);
                Some((lo, lo * 2.0f64.sqrt()))
            }
        }
    }

    /// Plain evaluation; complex-valued.
    pub fn eval(&self, y: f64) -> Complex64 {
        match *self {
            WeightSpec::One { amp } => Complex64::new(amp, 0.0),
            WeightSpec::Bump { p, a, b, amp } => {
                if y <= a || y >= b {
                    return Complex64::new(0.0, 0.0);
                }
                let t = (2.0 * y - a - b) / (b - a);
                Complex64::new(amp * (1.0 - t * t).powi(p as i32), 0.0)
            }
            WeightSpec::Ay {
                m,
                big_n,
                big_m,
                t,
                c,
                p,
            } => {
                let sigma = sigma_bump(m * m * y / big_n, p);
                if sigma == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let sqrt_y = y.sqrt();
                let z = big_m * t * c / (2.0 * PI * PI * sqrt_y);
                let khat = SQRT_PI * (-PI * PI * z * z).exp();
                let osc = e_unit(-t * t * c / (4.0 * PI * PI * sqrt_y));
                osc * (sigma * khat * y.powf(-13.0 / 12.0))
            }
            WeightSpec::Bj {
                j,
                n1,
                big_n,
                big_m,
                t,
                c,
                m,
                p,
            } => {
                let sigma = sigma_bump(y * y * n1.powi(4) / big_n, p);
                if sigma == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let ycal = y * n1 * n1;
                let z = big_m * t * c * m / (2.0 * PI * PI * ycal);
                let khat = SQRT_PI * (-PI * PI * z * z).exp();
                let osc = e_unit(-t * t * c * m / (4.0 * PI * PI * ycal));
                osc * (sigma * khat * y.powf(-(3.0 * j as f64 + 1.0)))
            }
            WeightSpec::Qj {
                j,
                n1,
                big_n,
                big_m,
                t,
                c,
                m,
                p,
            } => {
                let sigma = sigma_bump(y * y * n1.powi(4) / big_n, p);
                if sigma == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let ycal = y * n1 * n1;
                let z = big_m * t * c * m / (2.0 * PI * PI * ycal);
                let khat = SQRT_PI * (-PI * PI * z * z).exp();
                Complex64::new(sigma * khat * y.powf(-(3.0 * j as f64) - 4.0 / 3.0), 0.0)
            }
            WeightSpec::KStarHatWindow => {
                Complex64::new(SQRT_PI * (-PI * PI * y * y).exp(), 0.0)
            }
        }
    }

    /// Double-double evaluation (extended-precision oracle path).
    pub fn eval_dd(&self, y: Dd) -> DdComplex {
        let real = |v: Dd| DdComplex::new(v, Dd::from_f64(0.0));
        match *self {
            WeightSpec::One { amp } => real(Dd::from_f64(amp)),
            WeightSpec::Bump { p, a, b, amp } => {
                if y.hi <= a || y.hi >= b {
                    return DdComplex::zero();
                }
                let t = y
                    .mul_f64(2.0)
                    .sub(Dd::from_f64(a).add(Dd::from_f64(b)))
                    .div(Dd::from_f64(b).sub(Dd::from_f64(a)));
                let w = Dd::from_f64(1.0).sub(t.mul(t)).powi(p as i32).mul_f64(amp);
                real(w)
            }
            WeightSpec::Ay {
                m,
                big_n,
                big_m,
                t,
                c,
                p,
            } => {
                let sigma = sigma_bump_dd(y.mul_f64(m * m / big_n), p);
                if sigma.hi == 0.0 {
                    return DdComplex::zero();
                }
                let sqrt_y = y.sqrt();
                let z = Dd::from_f64(big_m * t * c / (2.0 * PI * PI)).div(sqrt_y);
                let khat = z.mul(z).mul_f64(-PI * PI).exp().mul_f64(SQRT_PI);
                let phase = Dd::from_f64(-t * t * c / (4.0 * PI * PI)).div(sqrt_y);
                let osc = e_unit_dd(phase);
                let amp = sigma.mul(khat).mul(y.powf(-13.0 / 12.0));
                osc.scale(amp)
            }
            WeightSpec::Bj {
                j,
                n1,
                big_n,
                big_m,
                t,
                c,
                m,
                p,
            } => {
                let sigma = sigma_bump_dd(y.mul(y).mul_f64(n1.powi(4) / big_n), p);
                if sigma.hi == 0.0 {
                    return DdComplex::zero();
                }
                let ycal = y.mul_f64(n1 * n1);
                let z = Dd::from_f64(big_m * t * c * m / (2.0 * PI * PI)).div(ycal);
                let khat = z.mul(z).mul_f64(-PI * PI).exp().mul_f64(SQRT_PI);
                let phase = Dd::from_f64(-t * t * c * m / (4.0 * PI * PI)).div(ycal);
                let osc = e_unit_dd(phase);
                let amp = sigma.mul(khat).mul(y.powf(-(3.0 * j as f64 + 1.0)));
                osc.scale(amp)
            }
            WeightSpec::Qj {
                j,
                n1,
                big_n,
                big_m,
                t,
                c,
                m,
                p,
            } => {
                let sigma = sigma_bump_dd(y.mul(y).mul_f64(n1.powi(4) / big_n), p);
                if sigma.hi == 0.0 {
                    return DdComplex::zero();
                }
                let ycal = y.mul_f64(n1 * n1);
                let z = Dd::from_f64(big_m * t * c * m / (2.0 * PI * PI)).div(ycal);
                let khat = z.mul(z).mul_f64(-PI * PI).exp().mul_f64(SQRT_PI);
                real(sigma.mul(khat).mul(y.powf(-(3.0 * j as f64) - 4.0 / 3.0)))
            }
            WeightSpec::KStarHatWindow => {
                real(y.mul(y).mul_f64(-PI * PI).exp().mul_f64(SQRT_PI))
            }
        }
    }

    /// Taylor jet at `point`. Outside a compact support the zero jet is
    /// returned (the function is identically zero there, and the one-sided
    /// jets at the support edge agree with zero through order p−1).
    pub fn jet(&self, point: f64, order: usize) -> Result<Jet, CatalogError> {
        let re = |v: f64| Complex64::new(v, 0.0);
        let y = Jet::variable(point, order)?;
        let zero = || Jet::constant(Complex64::new(0.0, 0.0), point, order).map_err(Into::into);
        match *self {
            WeightSpec::One { amp } => {
                Jet::constant(re(amp), point, order).map_err(Into::into)
            }
            WeightSpec::Bump { p, a, b, amp } => {
                if point <= a || point >= b {
                    return zero();
                }
                let num = y
                    .scale(re(2.0))
                    .sub(&Jet::constant(re(a + b), point, order)?)?;
                let t = num.scale(re(1.0 / (b - a)));
                let one = Jet::constant(re(1.0), point, order)?;
                Ok(one.sub(&t.mul(&t)?)?.powi(p)?.scale(re(amp)))
            }
            WeightSpec::Ay {
                m,
                big_n,
                big_m,
                t,
                c,
                p,
            } => {
                let u = y.scale(re(m * m / big_n));
                if u.value().re <= 1.0 || u.value().re >= 2.0 {
                    return zero();
                }
                let sigma = sigma_bump_jet(&u, p)?;
                let inv_sqrt_y = y.powf(-0.5)?;
                // k̂*(z) = √π·exp(−π²z²) with z = M·T·c/(2π²√y).
                let z = inv_sqrt_y.scale(re(big_m * t * c / (2.0 * PI * PI)));
                let khat = z
                    .mul(&z)?
                    .scale(re(-PI * PI))
                    .exp()
                    .scale(re(SQRT_PI));
                // e(w) with w = −T²c/(4π²√y): exp(2πi·w).
                let w = inv_sqrt_y.scale(re(-t * t * c / (4.0 * PI * PI)));
                let osc = w.scale(Complex64::new(0.0, 2.0 * PI)).exp();
                let tail = y.powf(-13.0 / 12.0)?;
                Ok(sigma.mul(&khat)?.mul(&osc)?.mul(&tail)?)
            }
            WeightSpec::Bj {
                j,
                n1,
                big_n,
                big_m,
                t,
                c,
                m,
                p,
            } => {
                let u = y.mul(&y)?.scale(re(n1.powi(4) / big_n));
                if u.value().re <= 1.0 || u.value().re >= 2.0 {
                    return zero();
                }
                let sigma = sigma_bump_jet(&u, p)?;
                let inv_ycal = y.scale(re(n1 * n1)).recip()?;
                let z = inv_ycal.scale(re(big_m * t * c * m / (2.0 * PI * PI)));
                let khat = z
                    .mul(&z)?
                    .scale(re(-PI * PI))
                    .exp()
                    .scale(re(SQRT_PI));
                let w = inv_ycal.scale(re(-t * t * c * m / (4.0 * PI * PI)));
                let osc = w.scale(Complex64::new(0.0, 2.0 * PI)).exp();
                let tail = y.powf(-(3.0 * j as f64 + 1.0))?;
                Ok(sigma.mul(&khat)?.mul(&osc)?.mul(&tail)?)
            }
            WeightSpec::Qj {
                j,
                n1,
                big_n,
                big_m,
                t,
                c,
                m,
                p,
            } => {
                let u = y.mul(&y)?.scale(re(n1.powi(4) / big_n));
                if u.value().re <= 1.0 || u.value().re >= 2.0 {
                    return zero();
                }
                let sigma = sigma_bump_jet(&u, p)?;
                let inv_ycal = y.scale(re(n1 * n1)).recip()?;
                let z = inv_ycal.scale(re(big_m * t * c * m / (2.0 * PI * PI)));
                let khat = z
                    .mul(&z)?
                    .scale(re(-PI * PI))
                    .exp()
                    .scale(re(SQRT_PI));
                let tail = y.powf(-(3.0 * j as f64) - 4.0 / 3.0)?;
                Ok(sigma.mul(&khat)?.mul(&tail)?)
            }
            WeightSpec::KStarHatWindow => {
                let q = y.mul(&y)?.scale(re(-PI * PI));
                Ok(q.exp().scale(re(SQRT_PI)))
            }
        }
    }

    /// Named parameters, in canonical serialization order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            WeightSpec::One { amp } => vec![("amp", amp)],
            WeightSpec::Bump { p, a, b, amp } => {
                vec![("p", p as f64), ("a", a), ("b", b), ("amp", amp)]
            }
            WeightSpec::Ay {
                m,
                big_n,
                big_m,
                t,
                c,
                p,
            } => vec![
                ("m", m),
                ("big_n", big_n),
                ("big_m", big_m),
                ("t", t),
                ("c", c),
                ("p", p as f64),
            ],
            WeightSpec::Bj {
                j,
                n1,
                big_n,
                big_m,
                t,
                c,
                m,
                p,
            }
            | WeightSpec::Qj {
                j,
                n1,
                big_n,
                big_m,
                t,
                c,
                m,
                p,
            } => vec![
                ("j", j as f64),
                ("n1", n1),
                ("big_n", big_n),
                ("big_m", big_m),
                ("t", t),
                ("c", c),
                ("m", m),
                ("p", p as f64),
            ],
            WeightSpec::KStarHatWindow => vec![],
        }
    }

    fn from_kv(id: &str, kv: &KvReader) -> Result<WeightSpec, CatalogError> {
        let spec = match id {
            "One" => WeightSpec::One {
                amp: kv.num_or("amp", 1.0)?,
            },
            "Bump" => WeightSpec::Bump {
                p: kv.uint("p")?,
                a: kv.num("a")?,
                b: kv.num("b")?,
                amp: kv.num_or("amp", 1.0)?,
            },
            "AY" => WeightSpec::Ay {
                m: kv.num("m")?,
                big_n: kv.num("big_n")?,
                big_m: kv.num("big_m")?,
                t: kv.num("t")?,
                c: kv.num("c")?,
                p: kv.uint("p")?,
            },
            "BJ" => WeightSpec::Bj {
                j: kv.uint("j")?,
                n1: kv.num("n1")?,
                big_n: kv.num("big_n")?,
                big_m: kv.num("big_m")?,
                t: kv.num("t")?,
                c: kv.num("c")?,
                m: kv.num("m")?,
                p: kv.uint("p")?,
            },
            "QJ" => WeightSpec::Qj {
                j: kv.uint("j")?,
                n1: kv.num("n1")?,
                big_n: kv.num("big_n")?,
                big_m: kv.num("big_m")?,
                t: kv.num("t")?,
                c: kv.num("c")?,
                m: kv.num("m")?,
                p: kv.uint("p")?,
            },
            "KStarHatWindow" => WeightSpec::KStarHatWindow,
            other => {
                return Err(CatalogError::ParseError {
                    line: kv.line,
                    detail: format!("unknown weight id `{other}`"),
                })
            }
        };
        Ok(spec)
    }
}

// ---------------------------------------------------------------------------
// Parameter bundle
// ---------------------------------------------------------------------------

/// The scenario parameter bundle and its derived quantities.
///
/// Base fields are user inputs; derived fields are filled by
/// [`derive_params`] and must never be set by hand. `linkage = true` asserts
/// that the scenario's phase/weight are built from this bundle, which lets
/// `estimate_parameters` return the analytic (M₁, T₁, N₁, U₁) instead of
/// sampled estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    // Base inputs.
    pub t: f64,
    pub big_n: f64,
    pub big_m: f64,
    pub m: f64,
    pub c: f64,
    pub n1: f64,
    pub n2: f64,
    pub eps: f64,
    pub linkage: bool,
    // Derived (filled by `derive_params`).
    pub big_m1: f64,
    pub big_t1: f64,
    pub big_n1: f64,
    pub u1: f64,
    pub c1: f64,
    pub c1_log10: f64,
    pub c2: f64,
}

impl ScenarioParams {
    /// Base bundle with derived fields zeroed and `big_m = 1`.
    pub fn base(t: f64, big_n: f64, m: f64, c: f64, n1: f64, n2: f64, eps: f64) -> Self {
        ScenarioParams {
            t,
            big_n,
            big_m: 1.0,
            m,
            c,
            n1,
            n2,
            eps,
            linkage: false,
            big_m1: 0.0,
            big_t1: 0.0,
            big_n1: 0.0,
            u1: 0.0,
            c1: 0.0,
            c1_log10: 0.0,
            c2: 0.0,
        }
    }
}

/// Fill the derived fields of a parameter bundle:
///
/// ```text
///   M₁ = N/m²,  T₁ = √N/(c·m),  N₁ = N^{3/2}/(T²·c·m³),  U₁ = (N/m²)^{−13/12},
///   C₁ = T^100 (also carried as log₁₀),  C₂ = √N/(T^{1−ε}·M).
/// ```
///
/// Idempotent: derived fields are recomputed from the base fields only.
pub fn derive_params(base: &ScenarioParams) -> Result<ScenarioParams, CatalogError> {
    for (name, v) in [
        ("t", base.t),
        ("big_n", base.big_n),
        ("big_m", base.big_m),
        ("m", base.m),
        ("c", base.c),
        ("n1", base.n1),
    ] {
        if !(v > 0.0) {
            return Err(CatalogError::ParamError(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    if base.n2 < 0.0 || base.eps < 0.0 {
        return Err(CatalogError::ParamError(
            "n2 and eps must be non-negative".into(),
        ));
    }
    let mut p = base.clone();
    p.big_m1 = base.big_n / (base.m * base.m);
    p.big_t1 = base.big_n.sqrt() / (base.c * base.m);
    p.big_n1 = base.big_n.powf(1.5) / (base.t * base.t * base.c * base.m.powi(3));
    p.u1 = p.big_m1.powf(-13.0 / 12.0);
    p.c1 = base.t.powi(100);
    p.c1_log10 = 100.0 * base.t.log10();
    p.c2 = base.big_n.sqrt() / (base.t.powf(1.0 - base.eps) * base.big_m);
    if p.linkage && base.m * base.c > p.c2 {
        return Err(CatalogError::ParamError(format!(
            "linkage requires m·c ≤ C₂, got {} > {}",
            base.m * base.c,
            p.c2
        )));
    }
    Ok(p)
}

/// Stationary point of the `U2` phase: `y₀ = x²c⁶`.
pub fn stationary_point_u2(x: f64, c: f64) -> Result<f64, CatalogError> {
    if !(x > 0.0) || !(c > 0.0) {
        return Err(CatalogError::ParamError(format!(
            "stationary_point_u2 needs x, c > 0 (got x={x}, c={c})"
        )));
    }
    Ok(x * x * c.powi(6))
}

/// Half the second derivative of `U2` at its stationary point:
/// `λ₂ = (1/12)·c⁻¹·y₀^{−3/2}`.
pub fn lambda2_u2(y0: f64, c: f64) -> Result<f64, CatalogError> {
    if !(y0 > 0.0) || !(c > 0.0) {
        return Err(CatalogError::ParamError(format!(
            "lambda2_u2 needs y0, c > 0 (got y0={y0}, c={c})"
        )));
    }
    Ok(1.0 / (12.0 * c * y0.powf(1.5)))
}

/// Default integration interval around the `U2` stationary point:
/// `[¼·x²c⁶, (9/2)·x²c⁶]`.
pub fn u2_default_interval(x: f64, c: f64) -> Result<(f64, f64), CatalogError> {
    let y0 = stationary_point_u2(x, c)?;
    Ok((0.25 * y0, 4.5 * y0))
}

/// Admissible `n₂` window for the dual-frequency parameter:
/// `2√N/(3n₁²) ≤ n₂ ≤ 2√N/n₁²`.
pub fn n2_window(big_n: f64, n1: f64) -> (f64, f64) {
    let s = 2.0 * big_n.sqrt() / (n1 * n1);
    (s / 3.0, s)
}

// ---------------------------------------------------------------------------
// Scenario and text format
// ---------------------------------------------------------------------------

/// A complete integration scenario: phase, weight, interval, expansion
/// orders, sweep grid, oracle tolerance, and (optionally) the parameter
/// bundle the functions were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub phase: PhaseSpec,
    pub weight: WeightSpec,
    pub interval: (f64, f64),
    pub orders: Vec<usize>,
    pub sweep: Vec<f64>,
    pub oracle_tol: f64,
    pub params: Option<ScenarioParams>,
}

impl Scenario {
    /// Minimal scenario with sensible defaults (orders [1], empty sweep,
    /// tolerance 1e−12).
    pub fn new(name: &str, phase: PhaseSpec, weight: WeightSpec, interval: (f64, f64)) -> Self {
        Scenario {
            name: name.to_string(),
            phase,
            weight,
            interval,
            orders: vec![1],
            sweep: Vec::new(),
            oracle_tol: 1e-12,
            params: None,
        }
    }

    /// Canonical text form; `from_text` round-trips it exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let push_kv = |s: &mut String, indent: &str, k: &str, v: f64| {
            s.push_str(&format!("{indent}{k} = {v}\n"));
        };
        s.push_str(&format!("name = {}\n", self.name));
        s.push_str(&format!("phase {{\n  id = {}\n", self.phase.id_str()));
        for (k, v) in self.phase.params() {
            push_kv(&mut s, "  ", k, v);
        }
        s.push_str("}\n");
        s.push_str(&format!("weight {{\n  id = {}\n", self.weight.id_str()));
        for (k, v) in self.weight.params() {
            push_kv(&mut s, "  ", k, v);
        }
        s.push_str("}\n");
        s.push_str(&format!(
            "interval {{\n  a = {}\n  b = {}\n}}\n",
            self.interval.0, self.interval.1
        ));
        let orders: Vec<String> = self.orders.iter().map(|o| o.to_string()).collect();
        s.push_str(&format!("orders = [{}]\n", orders.join(", ")));
        let sweep: Vec<String> = self.sweep.iter().map(|t| t.to_string()).collect();
        s.push_str(&format!("sweep {{\n  T_values = [{}]\n}}\n", sweep.join(", ")));
        s.push_str(&format!("oracle_tol = {}\n", self.oracle_tol));
        if let Some(p) = &self.params {
            s.push_str("params {\n");
            for (k, v) in [
                ("t", p.t),
                ("big_n", p.big_n),
                ("big_m", p.big_m),
                ("m", p.m),
                ("c", p.c),
                ("n1", p.n1),
                ("n2", p.n2),
                ("eps", p.eps),
            ] {
                push_kv(&mut s, "  ", k, v);
            }
            s.push_str(&format!("  linkage = {}\n", p.linkage));
            s.push_str("}\n");
        }
        s
    }

    /// Parse the text form. Unknown keys, malformed numbers, and structural
    /// errors are reported with their line number.
    pub fn from_text(text: &str) -> Result<Scenario, CatalogError> {
        let raw = parse_blocks(text)?;
        raw.check_known_top_keys(&[
            "name",
            "phase",
            "weight",
            "interval",
            "orders",
            "sweep",
            "oracle_tol",
            "params",
        ])?;

        let name = raw
            .scalar("name")
            .map(|(v, _)| v.to_string())
            .unwrap_or_else(|| "unnamed".to_string());

        let phase_block = raw.block("phase")?;
        phase_block.check_known_top_keys(&[
            "id", "slope", "shift", "t", "x", "c", "scale", "m", "n1",
        ])?;
        let phase_kv = KvReader::from_block(phase_block);
        let (phase_id, _) = phase_block.scalar("id").ok_or(CatalogError::ParseError {
            line: phase_block.line,
            detail: "phase block needs an `id`".into(),
        })?;
        let phase = PhaseSpec::from_kv(phase_id, &phase_kv)?;

        let weight_block = raw.block("weight")?;
        weight_block.check_known_top_keys(&[
            "id", "amp", "p", "a", "b", "m", "big_n", "big_m", "t", "c", "j", "n1",
        ])?;
        let weight_kv = KvReader::from_block(weight_block);
        let (weight_id, _) = weight_block.scalar("id").ok_or(CatalogError::ParseError {
            line: weight_block.line,
            detail: "weight block needs an `id`".into(),
        })?;
        let weight = WeightSpec::from_kv(weight_id, &weight_kv)?;

        let interval_block = raw.block("interval")?;
        interval_block.check_known_top_keys(&["a", "b"])?;
        let ikv = KvReader::from_block(interval_block);
        let interval = (ikv.num("a")?, ikv.num("b")?);
        if !(interval.0 < interval.1) {
            return Err(CatalogError::ParamError(format!(
                "interval must satisfy a < b, got [{}, {}]",
                interval.0, interval.1
            )));
        }

        let orders = match raw.list("orders") {
            Some((items, line)) => items
                .iter()
                .map(|s| {
                    s.parse::<usize>().map_err(|_| CatalogError::ParseError {
                        line,
                        detail: format!("order `{s}` is not a non-negative integer"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![1],
        };

        let sweep = match raw.maybe_block("sweep") {
            Some(b) => {
                b.check_known_top_keys(&["T_values"])?;
                match b.list("T_values") {
                    Some((items, line)) => items
                        .iter()
                        .map(|s| parse_num(s, line))
                        .collect::<Result<Vec<_>, _>>()?,
                    None => Vec::new(),
                }
            }
            None => Vec::new(),
        };

        let oracle_tol = match raw.scalar("oracle_tol") {
            Some((v, line)) => parse_num(v, line)?,
            None => 1e-12,
        };

        let params = match raw.maybe_block("params") {
            Some(b) => {
                b.check_known_top_keys(&[
                    "t", "big_n", "big_m", "m", "c", "n1", "n2", "eps", "linkage",
                ])?;
                let kv = KvReader::from_block(b);
                let mut base = ScenarioParams::base(
                    kv.num("t")?,
                    kv.num("big_n")?,
                    kv.num("m")?,
                    kv.num("c")?,
                    kv.num_or("n1", 1.0)?,
                    kv.num_or("n2", 0.0)?,
                    kv.num_or("eps", 0.05)?,
                );
                base.big_m = kv.num_or("big_m", 1.0)?;
                base.linkage = match b.scalar("linkage") {
                    Some(("true", _)) => true,
                    Some(("false", _)) | None => false,
                    Some((other, line)) => {
                        return Err(CatalogError::ParseError {
                            line,
                            detail: format!("linkage must be true/false, got `{other}`"),
                        })
                    }
                };
                Some(derive_params(&base)?)
            }
            None => None,
        };

        Ok(Scenario {
            name,
            phase,
            weight,
            interval,
            orders,
            sweep,
            oracle_tol,
            params,
        })
    }
}

// ---------------------------------------------------------------------------
// Text-format machinery
// ---------------------------------------------------------------------------

#[derive(Debug, Default)]
struct RawBlock {
    line: usize,
    scalars: Vec<(String, String, usize)>,
    lists: Vec<(String, Vec<String>, usize)>,
    blocks: Vec<(String, RawBlock)>,
}

impl RawBlock {
    fn scalar(&self, key: &str) -> Option<(&str, usize)> {
        self.scalars
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    fn list(&self, key: &str) -> Option<(&[String], usize)> {
        self.lists
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_slice(), *l))
    }

    fn maybe_block(&self, key: &str) -> Option<&RawBlock> {
        self.blocks.iter().find(|(k, _)| k == key).map(|(_, b)| b)
    }

    fn block(&self, key: &str) -> Result<&RawBlock, CatalogError> {
        self.maybe_block(key).ok_or(CatalogError::ParseError {
            line: self.line,
            detail: format!("missing required block `{key}`"),
        })
    }

    fn check_known_top_keys(&self, known: &[&str]) -> Result<(), CatalogError> {
        let known: BTreeSet<&str> = known.iter().copied().collect();
        for (k, _, l) in &self.scalars {
            if !known.contains(k.as_str()) {
                return Err(CatalogError::ParseError {
                    line: *l,
                    detail: format!("unknown key `{k}`"),
                });
            }
        }
        for (k, _, l) in &self.lists {
            if !known.contains(k.as_str()) {
                return Err(CatalogError::ParseError {
                    line: *l,
                    detail: format!("unknown key `{k}`"),
                });
            }
        }
        for (k, b) in &self.blocks {
            if !known.contains(k.as_str()) {
                return Err(CatalogError::ParseError {
                    line: b.line,
                    detail: format!("unknown block `{k}`"),
                });
            }
        }
        Ok(())
    }
}

fn parse_num(s: &str, line: usize) -> Result<f64, CatalogError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CatalogError::ParseError {
            line,
            detail: format!("`{s}` is not a number"),
        })
}

/// Key-value reader over a raw block with typed accessors.
struct KvReader<'a> {
    block: &'a RawBlock,
    line: usize,
}

impl<'a> KvReader<'a> {
    fn from_block(block: &'a RawBlock) -> Self {
        KvReader {
            block,
            line: block.line,
        }
    }

    fn num(&self, key: &str) -> Result<f64, CatalogError> {
        match self.block.scalar(key) {
            Some((v, line)) => parse_num(v, line),
            None => Err(CatalogError::ParseError {
                line: self.line,
                detail: format!("missing required key `{key}`"),
            }),
        }
    }

    fn num_or(&self, key: &str, default: f64) -> Result<f64, CatalogError> {
        match self.block.scalar(key) {
            Some((v, line)) => parse_num(v, line),
            None => Ok(default),
        }
    }

    fn uint(&self, key: &str) -> Result<u32, CatalogError> {
        let v = self.num(key)?;
        if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
            let line = self.block.scalar(key).map(|(_, l)| l).unwrap_or(self.line);
            return Err(CatalogError::ParseError {
                line,
                detail: format!("`{key}` must be a non-negative integer, got {v}"),
            });
        }
        Ok(v as u32)
    }
}

/// Line-based parser for the `key = value` / `key { … }` format.
fn parse_blocks(text: &str) -> Result<RawBlock, CatalogError> {
    let mut stack: Vec<(String, RawBlock)> = vec![(String::new(), RawBlock::default())];
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line == "}" {
            if stack.len() == 1 {
                return Err(CatalogError::ParseError {
                    line: line_no,
                    detail: "unmatched `}`".into(),
                });
            }
            let (key, block) = stack.pop().expect("stack underflow");
            stack
                .last_mut()
                .expect("root block")
                .1
                .blocks
                .push((key, block));
            continue;
        }
        if let Some(key) = line.strip_suffix('{') {
            let key = key.trim();
            if key.is_empty() {
                return Err(CatalogError::ParseError {
                    line: line_no,
                    detail: "block needs a name before `{`".into(),
                });
            }
            stack.push((
                key.to_string(),
                RawBlock {
                    line: line_no,
                    ..RawBlock::default()
                },
            ));
            continue;
        }
        if let Some(eq) = line.find('=') {
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim();
            if key.is_empty() {
                return Err(CatalogError::ParseError {
                    line: line_no,
                    detail: "missing key before `=`".into(),
                });
            }
            let top = &mut stack.last_mut().expect("root block").1;
            if let Some(body) = value.strip_prefix('[') {
                let body = body.strip_suffix(']').ok_or(CatalogError::ParseError {
                    line: line_no,
                    detail: "list must close with `]` on the same line".into(),
                })?;
                let items: Vec<String> = body
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                top.lists.push((key, items, line_no));
            } else {
                top.scalars.push((key, value.to_string(), line_no));
            }
            continue;
        }
        return Err(CatalogError::ParseError {
            line: line_no,
            detail: format!("cannot parse `{line}`"),
        });
    }
    if stack.len() != 1 {
        return Err(CatalogError::ParseError {
            line: text.lines().count(),
            detail: "unclosed block at end of input".into(),
        });
    }
    Ok(stack.pop().expect("root block").1)
}
