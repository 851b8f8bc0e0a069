//! Phase classification and parameter estimation.
//!
//! Before an expansion can be trusted we need to know three things about the
//! phase `f` on the integration interval: whether `f'` vanishes (and where),
//! the scale constants `(T, M)` with `|f^{(r)}| ≤ C_r·T/M^r`, and the weight
//! scales `(U, N)` with `|g^{(s)}| ≤ U/N^s`-type control.  This module
//! computes all of that by dense sampling with a safety margin, classifies
//! the phase, and checks the smallness hypothesis that the stationary-phase
//! expansion requires.
//!
//! Scale convention used by [`estimate_parameters`]: `M` is the interval
//! width, `T = max|f''|·M²` (so that the second-derivative constant is
//! exactly the safety factor), and `C_r = sf·max|f^{(r)}|·M^r / T`.  For a
//! linear phase (`f'' ≡ 0`) the fallback `T = max|f'|·M` keeps `T/M` equal to
//! the actual first-derivative scale.

use crate::catalog::{CatalogError, PhaseSpec, ScenarioParams, WeightSpec};
use crate::jets::JetError;
use thiserror::Error;

/// Default safety factor applied to sampled maxima.
pub const DEFAULT_SAFETY: f64 = 1.25;
/// Default sample count for parameter estimation.
pub const DEFAULT_SAMPLES: usize = 1024;
/// Default starting grid for classification.
pub const DEFAULT_GRID: usize = 4096;

/// Closed integration interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, StationaryError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(StationaryError::Domain(format!(
                "invalid interval [{a}, {b}]: endpoints must be finite with a < b"
            )));
        }
        Ok(Interval { a, b })
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

impl TryFrom<(f64, f64)> for Interval {
    type Error = StationaryError;
    fn try_from(p: (f64, f64)) -> Result<Self, StationaryError> {
        Interval::new(p.0, p.1)
    }
}

#[derive(Debug, Error)]
pub enum StationaryError {
    /// The sampling grid cannot resolve the sign pattern of `f'`.
    #[error("grid of {grid} points too coarse: {detail}")]
    GridTooCoarse { grid: usize, detail: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Sign structure of `f'` on the interval.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseClassification {
    /// `f'` has one sign on the whole interval.
    MonotoneNoStationary {
        min_abs_f1: f64,
        /// Sign of `f'` (+1 or −1).
        sign_f1: i8,
    },
    /// `f'` vanishes exactly once, strictly inside the interval, with
    /// `f''(γ) ≠ 0`.
    SingleInteriorStationary { gamma: f64, f2_at_gamma: f64 },
    /// Anything else: several zeros of `f'`, or a zero with vanishing `f''`.
    Degenerate { detail: String },
}

/// Scale constants describing one phase/weight pair on an interval.
#[derive(Debug, Clone)]
pub struct ParameterSet {
    /// Phase magnitude scale.
    pub t: f64,
    /// Phase length scale (interval width, or the linked value).
    pub m: f64,
    /// Weight magnitude scale.
    pub u: f64,
    /// Weight length scale.
    pub n: f64,
    /// Derivative constants: `c[r] ≥ |f^{(r)}|·M^r / T` for `2 ≤ r ≤
    /// max_order` (entries 0 and 1 are unused and set to zero).
    pub c: Vec<f64>,
    /// Minimum of `|f'|` over the interval.
    pub min_f1: f64,
    /// `min|f''|·M²/T`; the second-derivative lower-bound hypothesis reads
    /// `min_f2_scaled ≥ 1/C₂`.
    pub min_f2_scaled: f64,
    /// True when the scales were sampled rather than supplied by a scenario
    /// parameter block.
    pub heuristic: bool,
    /// Safety factor that was applied to sampled maxima.
    pub safety: f64,
}

/// Result of checking the stationary-phase smallness hypothesis at order `n`.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub n: usize,
    /// `Δ = min(ln 2 / C₂, 1 / (C₂² · max_{2≤k≤2n+3} C_k))`.
    pub delta: f64,
    /// `T^{1/(2n+3)} · Δ`; the hypothesis requires this to exceed 1.
    pub lhs: f64,
    /// `M` at least covers the interval width.
    pub m_covers_interval: bool,
    /// `|f''| ≥ T/(C₂·M²)` holds at the sampled minimum.
    pub f2_lower_ok: bool,
    /// All conditions hold.
    pub passes: bool,
    pub notes: String,
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Classify the sign structure of `f'` on `iv`.
///
/// Samples `f'` on a grid (doubling it until two consecutive grids agree),
/// brackets any sign change, refines it by bisection to `~1e−15·width`, and
/// polishes with Newton steps using `f''`.  Grids below 64 points are
/// rejected, and `GridTooCoarse` is returned if doubling never stabilizes —
/// which happens when adjacent grid points straddle more than one oscillation
/// of `f'`.
pub fn classify(
    phase: &PhaseSpec,
    iv: Interval,
    grid: usize,
) -> Result<PhaseClassification, StationaryError> {
    if grid < 64 {
        return Err(StationaryError::GridTooCoarse {
            grid,
            detail: "need at least 64 points".into(),
        });
    }
    const MAX_GRID: usize = 1 << 20;
    let mut g = grid;
    let mut prev = classify_on_grid(phase, iv, g)?;
    while g < MAX_GRID {
        g *= 2;
        let next = classify_on_grid(phase, iv, g)?;
        if raw_matches(&prev, &next, iv.width()) {
            return finalize(phase, iv, next);
        }
        prev = next;
    }
    Err(StationaryError::GridTooCoarse {
        grid,
        detail: format!(
            "sign pattern of f' did not stabilize by {MAX_GRID} points; \
             f' oscillates faster than the grid resolves"
        ),
    })
}

/// Raw grid outcome before Newton polishing.
#[derive(Debug, Clone)]
enum RawClass {
    Monotone {
        min_abs: f64,
        max_abs: f64,
        sign: i8,
    },
    Single {
        bracket: (f64, f64),
        rising: bool,
    },
    Multiple {
        count: usize,
    },
}

fn f1_at(phase: &PhaseSpec, x: f64) -> Result<f64, StationaryError> {
    Ok(phase.jet(x, 1)?.coeff(1).re)
}

fn classify_on_grid(
    phase: &PhaseSpec,
    iv: Interval,
    grid: usize,
) -> Result<RawClass, StationaryError> {
    let h = iv.width() / grid as f64;
    let mut vals = Vec::with_capacity(grid + 1);
    for i in 0..=grid {
        let x = if i == grid { iv.b } else { iv.a + i as f64 * h };
        vals.push((x, f1_at(phase, x)?));
    }
    let max_abs = vals.iter().map(|(_, v)| v.abs()).fold(0.0_f64, f64::max);
    if max_abs == 0.0 {
        return Ok(RawClass::Multiple { count: usize::MAX });
    }
    // Treat |f'| below this as a zero sample; relative to the overall scale.
    let zero_tol = 1e-13 * max_abs;
    let sign_of = |v: f64| -> i8 {
        if v.abs() <= zero_tol {
            0
        } else {
            v.signum() as i8
        }
    };
    // Compress out zero samples: a sign change between consecutive nonzero
    // samples is a genuine crossing even if the grid lands exactly on the
    // root; zeros flanked by the same sign are tangential touches.
    let nonzero: Vec<usize> = (0..vals.len()).filter(|&i| sign_of(vals[i].1) != 0).collect();
    if nonzero.is_empty() {
        return Ok(RawClass::Multiple { count: usize::MAX });
    }
    let mut brackets: Vec<((f64, f64), bool, usize)> = Vec::new();
    let mut touches = nonzero[0] + (vals.len() - 1 - nonzero[nonzero.len() - 1]);
    for w in nonzero.windows(2) {
        let (i, j) = (w[0], w[1]);
        let (si, sj) = (sign_of(vals[i].1), sign_of(vals[j].1));
        let gap = j - i - 1;
        if si != sj {
            brackets.push(((vals[i].0, vals[j].0), sj > 0, gap));
        } else {
            touches += gap;
        }
    }
    let min_abs = vals
        .iter()
        .map(|(_, v)| v.abs())
        .fold(f64::INFINITY, f64::min);
    match (brackets.len(), touches) {
        (0, 0) => Ok(RawClass::Monotone {
            min_abs,
            max_abs,
            sign: sign_of(vals[nonzero[0]].1),
        }),
        (1, 0) if brackets[0].2 <= 2 => Ok(RawClass::Single {
            bracket: brackets[0].0,
            rising: brackets[0].1,
        }),
        (k, t) => Ok(RawClass::Multiple { count: k.max(t).max(1) }),
    }
}

fn raw_matches(a: &RawClass, b: &RawClass, width: f64) -> bool {
    match (a, b) {
        (RawClass::Monotone { sign: sa, .. }, RawClass::Monotone { sign: sb, .. }) => sa == sb,
        (RawClass::Single { bracket: ba, .. }, RawClass::Single { bracket: bb, .. }) => {
            let ca = 0.5 * (ba.0 + ba.1);
            let cb = 0.5 * (bb.0 + bb.1);
            (ca - cb).abs() <= 1e-6 * width + (ba.1 - ba.0)
        }
        (RawClass::Multiple { .. }, RawClass::Multiple { .. }) => true,
        _ => false,
    }
}

fn finalize(
    phase: &PhaseSpec,
    iv: Interval,
    raw: RawClass,
) -> Result<PhaseClassification, StationaryError> {
    match raw {
        RawClass::Monotone {
            min_abs,
            max_abs,
            sign,
        } => {
            let refined = refine_min_abs_f1(phase, iv)?.min(min_abs);
            // A tangential zero of f' (no sign change) hides between grid
            // points; the refined minimum exposes it.
            if refined <= 1e-9 * max_abs {
                return Ok(PhaseClassification::Degenerate {
                    detail: format!(
                        "f' touches zero without changing sign (min |f'| = {refined:e})"
                    ),
                });
            }
            Ok(PhaseClassification::MonotoneNoStationary {
                min_abs_f1: refined,
                sign_f1: sign,
            })
        }
        RawClass::Single { bracket, rising } => {
            let gamma = refine_root(phase, bracket, rising, iv.width())?;
            let j2 = phase.jet(gamma, 2)?;
            let f2 = 2.0 * j2.coeff(2).re;
            let f2_scale = second_derivative_scale(phase, iv)?;
            if f2.abs() <= 1e-12 * f2_scale {
                return Ok(PhaseClassification::Degenerate {
                    detail: format!(
                        "stationary point at {gamma} has vanishing second derivative ({f2:e})"
                    ),
                });
            }
            Ok(PhaseClassification::SingleInteriorStationary {
                gamma,
                f2_at_gamma: f2,
            })
        }
        RawClass::Multiple { count } => Ok(PhaseClassification::Degenerate {
            detail: if count == usize::MAX {
                "f' vanishes identically on the sampled grid".into()
            } else {
                format!("f' changes sign or touches zero {count} times")
            },
        }),
    }
}

fn second_derivative_scale(phase: &PhaseSpec, iv: Interval) -> Result<f64, StationaryError> {
    let mut max_abs = 0.0_f64;
    for i in 0..=64 {
        let x = iv.a + iv.width() * i as f64 / 64.0;
        let j = phase.jet(x, 2)?;
        max_abs = max_abs.max((2.0 * j.coeff(2).re).abs());
    }
    Ok(max_abs.max(1e-300))
}

/// Bisection on the sign of `f'`, then Newton polish with `f''`.
fn refine_root(
    phase: &PhaseSpec,
    bracket: (f64, f64),
    rising: bool,
    width: f64,
) -> Result<f64, StationaryError> {
    let (mut lo, mut hi) = bracket;
    let target = 1e-15 * width;
    for _ in 0..120 {
        if hi - lo <= target {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let v = f1_at(phase, mid)?;
        let positive = v > 0.0;
        if positive == rising && v != 0.0 {
            // Same sign as the right end.
            hi = mid;
        } else if v == 0.0 {
            lo = mid;
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut gamma = 0.5 * (lo + hi);
    for _ in 0..4 {
        let j = phase.jet(gamma, 2)?;
        let f1 = j.coeff(1).re;
        let f2 = 2.0 * j.coeff(2).re;
        if f2 == 0.0 {
            break;
        }
        let step = f1 / f2;
        let next = gamma - step;
        if !next.is_finite() || (next - gamma).abs() > (bracket.1 - bracket.0) {
            break;
        }
        gamma = next;
        if step.abs() <= 1e-16 * (1.0 + gamma.abs()) {
            break;
        }
    }
    Ok(gamma)
}

/// Golden-section refinement of `min |f'|` for a monotone phase.
fn refine_min_abs_f1(phase: &PhaseSpec, iv: Interval) -> Result<f64, StationaryError> {
    // |f'| is continuous; sample densely, then golden-section around the
    // minimizing sample (|f'| is unimodal near an interior minimum, and the
    // endpoint case is handled by the bracket collapsing onto it).
    const SAMPLES: usize = 512;
    let h = iv.width() / SAMPLES as f64;
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..=SAMPLES {
        let x = if i == SAMPLES { iv.b } else { iv.a + i as f64 * h };
        let v = f1_at(phase, x)?.abs();
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = iv.a + h * best_i.saturating_sub(1) as f64;
    let hi = (iv.a + h * (best_i + 1) as f64).min(iv.b);
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    let (mut a, mut b) = (lo, hi);
    let mut x1 = a + phi * (b - a);
    let mut x2 = b - phi * (b - a);
    let mut v1 = f1_at(phase, x1)?.abs();
    let mut v2 = f1_at(phase, x2)?.abs();
    for _ in 0..80 {
        if v1 < v2 {
            b = x2;
            x2 = x1;
            v2 = v1;
            x1 = a + phi * (b - a);
            v1 = f1_at(phase, x1)?.abs();
        } else {
            a = x1;
            x1 = x2;
            v1 = v2;
            x2 = b - phi * (b - a);
            v2 = f1_at(phase, x2)?.abs();
        }
        if b - a <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    Ok(best.min(v1).min(v2))
}

// ---------------------------------------------------------------------------
// Parameter estimation
// ---------------------------------------------------------------------------

/// Estimate `(T, M, U, N, C_r)` with the default safety factor and sample
/// count.  When `params` carries a scenario parameter block with the linkage
/// flag set, the linked scales `(M₁, T₁, N₁, U₁)` are used directly and only
/// the derivative constants are sampled (over the weight support, where the
/// linked scales apply).
pub fn estimate_parameters(
    phase: &PhaseSpec,
    weight: &WeightSpec,
    iv: Interval,
    max_order: usize,
    params: Option<&ScenarioParams>,
) -> Result<ParameterSet, StationaryError> {
    estimate_parameters_with(
        phase,
        weight,
        iv,
        max_order,
        params,
        DEFAULT_SAFETY,
        DEFAULT_SAMPLES,
    )
}

/// [`estimate_parameters`] with explicit safety factor and sample count.
pub fn estimate_parameters_with(
    phase: &PhaseSpec,
    weight: &WeightSpec,
    iv: Interval,
    max_order: usize,
    params: Option<&ScenarioParams>,
    sf: f64,
    samples: usize,
) -> Result<ParameterSet, StationaryError> {
    if !(sf >= 1.0 && sf.is_finite()) {
        return Err(StationaryError::Domain(format!(
            "safety factor must be finite and ≥ 1, got {sf}"
        )));
    }
    if max_order < 2 {
        return Err(StationaryError::Domain(format!(
            "max_order must be at least 2, got {max_order}"
        )));
    }
    if samples < 16 {
        return Err(StationaryError::Domain(format!(
            "need at least 16 samples, got {samples}"
        )));
    }
    let linked = params.filter(|p| p.linkage);

    // Where to sample the phase derivative maxima: linked runs use the weight
    // support (that is where the linked scales control the derivatives);
    // heuristic runs use the whole interval.
    let sample_iv = match (linked, weight.support()) {
        (Some(_), Some((sa, sb))) => {
            let a = sa.max(iv.a);
            let b = sb.min(iv.b);
            if a < b {
                Interval { a, b }
            } else {
                iv
            }
        }
        _ => iv,
    };

    // max |f^{(r)}| for r = 1..=max_order over the sample interval.
    let mut maxd = vec![0.0_f64; max_order + 1];
    let h = sample_iv.width() / samples as f64;
    for i in 0..=samples {
        let x = if i == samples {
            sample_iv.b
        } else {
            sample_iv.a + i as f64 * h
        };
        let j = phase.jet(x, max_order)?;
        for r in 1..=max_order {
            maxd[r] = maxd[r].max(j.derivative(r).norm());
        }
    }

    let (t, m, u, n, heuristic) = if let Some(p) = linked {
        let scale = phase_sweep_scale(phase);
        (scale * p.big_t1, p.big_m1, p.u1, p.big_n1, false)
    } else {
        let m = iv.width();
        let t = if maxd[2] > 0.0 {
            maxd[2] * m * m
        } else {
            maxd[1] * m
        };
        // Weight scales over the whole interval.
        let mut maxg = vec![0.0_f64; max_order.min(crate::jets::MAX_ORDER) + 1];
        let gh = iv.width() / samples as f64;
        let gord = maxg.len() - 1;
        for i in 0..=samples {
            let x = if i == samples { iv.b } else { iv.a + i as f64 * gh };
            let j = weight.jet(x, gord)?;
            for (s, slot) in maxg.iter_mut().enumerate() {
                *slot = slot.max(j.derivative(s).norm());
            }
        }
        let u = sf * maxg[0];
        let n = if maxg[0] == 0.0 {
            1e150
        } else {
            let mut best = 1e150_f64;
            for (s, &g) in maxg.iter().enumerate().skip(1).take(6) {
                if g > 0.0 {
                    best = best.min((maxg[0] / g).powf(1.0 / s as f64));
                }
            }
            (best / sf).clamp(1e-150, 1e150)
        };
        (t, m, u, n, true)
    };

    let mut c = vec![0.0_f64; max_order + 1];
    if t > 0.0 {
        for r in 2..=max_order {
            c[r] = sf * maxd[r] * m.powi(r as i32) / t;
        }
    }

    let min_f1 = refine_min_abs_f1(phase, iv)?;
    let mut min_f2 = f64::INFINITY;
    for i in 0..=samples {
        let x = if i == samples { iv.b } else { iv.a + i as f64 * (iv.width() / samples as f64) };
        let j = phase.jet(x, 2)?;
        min_f2 = min_f2.min((2.0 * j.coeff(2).re).abs());
    }
    let min_f2_scaled = if t > 0.0 { min_f2 * m * m / t } else { 0.0 };

    Ok(ParameterSet {
        t,
        m,
        u,
        n,
        c,
        min_f1,
        min_f2_scaled,
        heuristic,
        safety: sf,
    })
}

/// Magnitude of the sweepable scale prefactor of a phase (1 for phases whose
/// sweep parameter is the scale itself).
fn phase_sweep_scale(phase: &PhaseSpec) -> f64 {
    match phase {
        PhaseSpec::U1 { scale, .. }
        | PhaseSpec::U2 { scale, .. }
        | PhaseSpec::V2 { scale, .. } => scale.abs(),
        _ => 1.0,
    }
}

// ---------------------------------------------------------------------------
// Hypothesis check
// ---------------------------------------------------------------------------

/// Check the order-`n` stationary-phase smallness hypothesis for `ps`.
///
/// `Δ = min(ln2/C₂, 1/(C₂²·max_{2≤k≤2n+3} C_k))` and the hypothesis requires
/// `T^{1/(2n+3)}·Δ > 1`, together with `M ≥ interval width` and the sampled
/// second-derivative lower bound `|f''| ≥ T/(C₂M²)`.
pub fn hypothesis_check(ps: &ParameterSet, iv: Interval, n: usize) -> HypothesisReport {
    let c2 = if ps.c.len() > 2 { ps.c[2] } else { 0.0 };
    let hi = (2 * n + 3).min(ps.c.len().saturating_sub(1));
    let mut max_c = 0.0_f64;
    for k in 2..=hi {
        max_c = max_c.max(ps.c[k]);
    }
    let mut notes = Vec::new();
    if hi < 2 * n + 3 {
        notes.push(format!(
            "derivative constants only available to order {hi} (need {})",
            2 * n + 3
        ));
    }
    let delta = if c2 > 0.0 && max_c > 0.0 {
        (std::f64::consts::LN_2 / c2).min(1.0 / (c2 * c2 * max_c))
    } else {
        notes.push("C₂ or max C_k is zero; Δ undefined".into());
        0.0
    };
    let lhs = if ps.t > 0.0 {
        ps.t.powf(1.0 / (2.0 * n as f64 + 3.0)) * delta
    } else {
        0.0
    };
    let m_covers_interval = ps.m >= iv.width() * (1.0 - 1e-12);
    if !m_covers_interval {
        notes.push(format!(
            "M = {:.6e} does not cover the interval width {:.6e}",
            ps.m,
            iv.width()
        ));
    }
    let f2_lower_ok = c2 > 0.0 && ps.min_f2_scaled >= 1.0 / c2;
    if !f2_lower_ok {
        notes.push(format!(
            "second-derivative lower bound fails: min|f''|·M²/T = {:.6e} < 1/C₂ = {:.6e}",
            ps.min_f2_scaled,
            if c2 > 0.0 { 1.0 / c2 } else { f64::INFINITY }
        ));
    }
    let smallness = lhs > 1.0;
    if !smallness {
        notes.push(format!("T^(1/(2n+3))·Δ = {lhs:.6e} ≤ 1"));
    }
    HypothesisReport {
        n,
        delta,
        lhs,
        m_covers_interval,
        f2_lower_ok,
        passes: smallness && m_covers_interval && f2_lower_ok,
        notes: notes.join("; "),
    }
}
