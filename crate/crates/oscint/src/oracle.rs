//! Reference quadrature: the independent referee the expansions are checked
//! against.
//!
//! Everything here is deliberately decoupled from the jet machinery — phase
//! derivatives used for panel seeding and stationary-point splitting come
//! from finite differences of the plain evaluators, so a bug in the jets
//! cannot silently agree with itself.
//!
//! The work-horse is adaptive bisection over Gauss–Legendre panel pairs
//! (12/24 points in double precision, 24/48 in double-double), with panels
//! seeded from a cycle count of the phase, worst-error-first refinement, and
//! compensated summation.  A tanh-sinh strategy is available per segment and
//! as the fallback half of the hybrid strategy.
//!
//! Tolerances are relative to `max(|I|, 1e−3·Σ|panel|)` — when the integral
//! is small through cancellation, certifying it relative to `|I|` itself in
//! double precision is impossible (the panel sums carry `eps·Σ|panel|` of
//! rounding), and that is exactly what the extended mode is for.  Phase
//! sweeps with total variation ≥ 1e5 cycles must use extended precision, and
//! variation beyond 5e6 cycles is outside the certified range.

use crate::catalog::{CatalogError, PhaseSpec, Scenario};
use crate::dd::{e_unit_dd, Dd, DdComplex};
use crate::e_unit;
use crate::fdt::fdt_evaluate;
use crate::report::{StudyRow, StudyTable};
use crate::stationary::{classify, Interval, PhaseClassification, DEFAULT_GRID};
use crate::wsp::wsp_evaluate;
use crate::Neumaier as Comp;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BinaryHeap;
use std::sync::OnceLock;
use thiserror::Error;

/// Relative tolerance floor in double precision.
pub const F64_TOL_FLOOR: f64 = 1e-14;
/// Relative tolerance floor in extended (double-double) precision.
pub const DD_TOL_FLOOR: f64 = 1e-26;
/// Phase total variation (in cycles) above which extended precision is
/// mandatory.
pub const EXTENDED_MANDATE_VARIATION: f64 = 1e5;
/// Phase total variation beyond the certified range.
pub const MAX_VARIATION: f64 = 5e6;

const PANELS_PER_CYCLE_F64: f64 = 3.0;
const PANELS_PER_CYCLE_DD: f64 = 1.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Adaptive Gauss–Legendre panel bisection.
    PanelSplit,
    /// Tanh-sinh (double-exponential) levels per segment.
    TanhSinh,
    /// Panel splitting with tanh-sinh fallback on failure.
    Hybrid,
}

impl Strategy {
    pub fn id_str(&self) -> &'static str {
        match self {
            Strategy::PanelSplit => "panel-split",
            Strategy::TanhSinh => "tanh-sinh",
            Strategy::Hybrid => "hybrid",
        }
    }
}

/// A certified quadrature value.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: Complex64,
    /// Absolute error estimate (sum of per-panel pair differences, or the
    /// last tanh-sinh level difference).
    pub err_estimate: f64,
    /// Integrand evaluations consumed.
    pub evaluations: u64,
    /// Strategy that produced the value.
    pub strategy: Strategy,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(
        "tolerance {tol:e} unreachable within budget; best error estimate {:e} after {} evaluations",
        best.err_estimate,
        best.evaluations
    )]
    ToleranceUnreachable { tol: f64, best: OracleResult },
    #[error("tolerance {requested:e} below the floor {floor:e} for this precision mode")]
    BadTolerance { requested: f64, floor: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// Quadrature options.
#[derive(Debug, Clone)]
pub struct QuadOptions {
    /// Relative tolerance (see module docs for the scale it is relative to).
    pub tol: f64,
    pub strategy: Strategy,
    /// Extra split points (weight kinks, known feature locations).
    pub breakpoints: Vec<f64>,
    pub max_evaluations: u64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-12,
            strategy: Strategy::PanelSplit,
            breakpoints: Vec::new(),
            max_evaluations: 20_000_000,
        }
    }
}

// ---------------------------------------------------------------------------
// Gauss–Legendre rules, generated at runtime
// ---------------------------------------------------------------------------

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0_f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let pk = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn legendre_pair_dd(n: usize, x: Dd) -> (Dd, Dd) {
    let one = Dd::from_f64(1.0);
    let mut p0 = one;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let pk = x
            .mul(p1)
            .mul_f64(2.0 * kf - 1.0)
            .sub(p0.mul_f64(kf - 1.0))
            .div(Dd::from_f64(kf));
        p0 = p1;
        p1 = pk;
    }
    let dp = x
        .mul(p1)
        .sub(p0)
        .mul_f64(n as f64)
        .div(x.mul(x).sub(one));
    (p1, dp)
}

/// Nodes and weights of the `n`-point rule on `[−1, 1]`, by Newton iteration
/// from the Chebyshev-angle seeds.
fn gl_rule_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre_pair(n, x);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        // The seed ordering is descending in x; store ascending.
        nodes[n - i] = x;
        weights[n - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Double-double refinement of the `n`-point rule: three extra Newton steps
/// on the f64 nodes in Dd arithmetic.
fn gl_rule_dd(n: usize) -> (Vec<Dd>, Vec<Dd>) {
    let (seed, _) = gl_rule_f64(n);
    let one = Dd::from_f64(1.0);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &s in &seed {
        let mut x = Dd::from_f64(s);
        for _ in 0..3 {
            let (p, dp) = legendre_pair_dd(n, x);
            x = x.sub(p.div(dp));
        }
        let (_, dp) = legendre_pair_dd(n, x);
        let w = Dd::from_f64(2.0)
            .div(one.sub(x.mul(x)).mul(dp).mul(dp));
        nodes.push(x);
        weights.push(w);
    }
    (nodes, weights)
}

fn gl12() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gl_rule_f64(12))
}

fn gl24() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gl_rule_f64(24))
}

fn gl24_dd() -> &'static (Vec<Dd>, Vec<Dd>) {
    static R: OnceLock<(Vec<Dd>, Vec<Dd>)> = OnceLock::new();
    R.get_or_init(|| gl_rule_dd(24))
}

fn gl48_dd() -> &'static (Vec<Dd>, Vec<Dd>) {
    static R: OnceLock<(Vec<Dd>, Vec<Dd>)> = OnceLock::new();
    R.get_or_init(|| gl_rule_dd(48))
}

// ---------------------------------------------------------------------------
// f64 panel engine
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    abs: f64,
}

const PANEL_EVALS_F64: u64 = 36; // 12 + 24 nodes
const PANEL_EVALS_DD: u64 = 72; // 24 + 48 nodes

fn eval_panel(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Result<Panel, OracleError> {
    let (n12, w12) = gl12();
    let (n24, w24) = gl24();
    let m = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut s12 = (Comp::default(), Comp::default());
    for (x, w) in n12.iter().zip(w12) {
        let v = f(m + r * x);
        s12.0.add(v.re * w);
        s12.1.add(v.im * w);
    }
    let mut s24 = (Comp::default(), Comp::default());
    let mut abs = Comp::default();
    for (x, w) in n24.iter().zip(w24) {
        let v = f(m + r * x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(OracleError::Domain(format!(
                "integrand returned a non-finite value near {}",
                m + r * x
            )));
        }
        s24.0.add(v.re * w);
        s24.1.add(v.im * w);
        abs.add(v.norm() * w);
    }
    let v12 = Complex64::new(s12.0.total(), s12.1.total());
    let v24 = Complex64::new(s24.0.total(), s24.1.total());
    Ok(Panel {
        a,
        b,
        value: r * v24,
        err: r * (v24 - v12).norm(),
        abs: r * abs.total(),
    })
}

#[derive(Debug)]
struct HeapEntry {
    err: f64,
    seq: u64,
    panel: Panel,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap on error; ties resolved oldest-first for determinism.
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn resum_panels<'a>(panels: impl Iterator<Item = &'a Panel>) -> (Complex64, f64, f64) {
    let mut list: Vec<&Panel> = panels.collect();
    list.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.b.total_cmp(&q.b)));
    let (mut re, mut im, mut err, mut abs) =
        (Comp::default(), Comp::default(), Comp::default(), Comp::default());
    for p in list {
        re.add(p.value.re);
        im.add(p.value.im);
        err.add(p.err);
        abs.add(p.abs);
    }
    (
        Complex64::new(re.total(), im.total()),
        err.total(),
        abs.total(),
    )
}

fn rel_scale(value: Complex64, abs: f64) -> f64 {
    value.norm().max(1e-3 * abs).max(1e-300)
}

/// Number of phase cycles on `[a, b]` estimated from a local-frequency
/// function, by 64-interval trapezoid.
fn segment_cycles(freq: Option<&dyn Fn(f64) -> f64>, a: f64, b: f64) -> f64 {
    let Some(fr) = freq else { return 0.0 };
    const STEPS: usize = 64;
    let h = (b - a) / STEPS as f64;
    let mut sum = 0.5 * (fr(a).abs() + fr(b).abs());
    for i in 1..STEPS {
        sum += fr(a + i as f64 * h).abs();
    }
    sum * h
}

fn panel_integrate(
    f: &dyn Fn(f64) -> Complex64,
    freq: Option<&dyn Fn(f64) -> f64>,
    segments: &[(f64, f64)],
    tol: f64,
    max_evaluations: u64,
) -> Result<OracleResult, OracleError> {
    let mut counts = Vec::with_capacity(segments.len());
    let mut total_seed: u64 = 0;
    for &(a, b) in segments {
        let cycles = segment_cycles(freq, a, b);
        let n = ((PANELS_PER_CYCLE_F64 * cycles).ceil() as u64 + 2).clamp(2, 400_000);
        counts.push(n);
        total_seed += n;
    }
    if total_seed * PANEL_EVALS_F64 > max_evaluations {
        return Err(OracleError::Domain(format!(
            "seeding needs {} panels ({} evaluations) which exceeds the budget of {}; \
             the phase oscillates too fast for this budget",
            total_seed,
            total_seed * PANEL_EVALS_F64,
            max_evaluations
        )));
    }

    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut seq: u64 = 0;
    let mut evals: u64 = 0;
    for (&(a, b), &n) in segments.iter().zip(&counts) {
        let h = (b - a) / n as f64;
        for i in 0..n {
            let pa = a + i as f64 * h;
            let pb = if i + 1 == n { b } else { a + (i + 1) as f64 * h };
            let p = eval_panel(f, pa, pb)?;
            evals += PANEL_EVALS_F64;
            heap.push(HeapEntry {
                err: p.err,
                seq,
                panel: p,
            });
            seq += 1;
        }
    }

    let mut prev_outer_err = f64::INFINITY;
    let mut stagnant_rounds = 0u32;
    loop {
        // Exact deterministic resummation of the current panel set.
        let (value, err, abs) = resum_panels(heap.iter().map(|e| &e.panel).chain(frozen.iter()));
        let scale = rel_scale(value, abs);
        if err <= tol * scale {
            return Ok(OracleResult {
                value,
                err_estimate: err,
                evaluations: evals,
                strategy: Strategy::PanelSplit,
            });
        }
        // Splitting a panel set whose pair differences are pure rounding
        // noise cannot make progress; detect the plateau instead of burning
        // the budget.
        if err >= 0.995 * prev_outer_err {
            stagnant_rounds += 1;
            if stagnant_rounds >= 3 {
                return Err(OracleError::ToleranceUnreachable {
                    tol,
                    best: OracleResult {
                        value,
                        err_estimate: err,
                        evaluations: evals,
                        strategy: Strategy::PanelSplit,
                    },
                });
            }
        } else {
            stagnant_rounds = 0;
        }
        prev_outer_err = err;
        // Refine in batches between resummations.
        let mut running_err = err;
        let mut improved = false;
        for _ in 0..4096 {
            if running_err <= 0.5 * tol * scale {
                break;
            }
            let Some(top) = heap.pop() else { break };
            let p = top.panel;
            let width_floor = 8.0 * f64::EPSILON * p.a.abs().max(p.b.abs()).max(1.0);
            if p.b - p.a <= width_floor {
                frozen.push(p);
                continue;
            }
            if evals + 2 * PANEL_EVALS_F64 > max_evaluations {
                heap.push(top);
                return Err(OracleError::ToleranceUnreachable {
                    tol,
                    best: OracleResult {
                        value,
                        err_estimate: err,
                        evaluations: evals,
                        strategy: Strategy::PanelSplit,
                    },
                });
            }
            let mid = 0.5 * (p.a + p.b);
            let c1 = eval_panel(f, p.a, mid)?;
            let c2 = eval_panel(f, mid, p.b)?;
            evals += 2 * PANEL_EVALS_F64;
            running_err += c1.err + c2.err - p.err;
            heap.push(HeapEntry {
                err: c1.err,
                seq,
                panel: c1,
            });
            heap.push(HeapEntry {
                err: c2.err,
                seq: seq + 1,
                panel: c2,
            });
            seq += 2;
            improved = true;
        }
        if !improved {
            // Every remaining panel is at the width floor.
            return Err(OracleError::ToleranceUnreachable {
                tol,
                best: OracleResult {
                    value,
                    err_estimate: err,
                    evaluations: evals,
                    strategy: Strategy::PanelSplit,
                },
            });
        }
    }
}

// ---------------------------------------------------------------------------
// Tanh-sinh engine
// ---------------------------------------------------------------------------

/// One tanh-sinh segment: returns `(value, err, abs, converged)`.
fn ts_segment(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    evals: &mut u64,
    max_evaluations: u64,
) -> Result<(Complex64, f64, f64, bool), OracleError> {
    const T_MAX: f64 = 6.56;
    let m = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut prev: Option<Complex64> = None;
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = f64::INFINITY;
    let mut abs = 0.0;
    for level in 3..=15u32 {
        let h = 0.5_f64.powi(level as i32);
        let k_max = (T_MAX / h).ceil() as i64;
        if *evals + (2 * k_max as u64 + 1) > max_evaluations {
            return Ok((value, err, abs, false));
        }
        let (mut sre, mut sim, mut sabs) = (Comp::default(), Comp::default(), Comp::default());
        for k in -k_max..=k_max {
            let t = k as f64 * h;
            let (sh, ch) = (0.5 * std::f64::consts::PI * t.sinh(), t.cosh());
            let x = sh.tanh();
            let w = 0.5 * std::f64::consts::PI * ch / (sh.cosh() * sh.cosh());
            if !(w * r.abs() * h > 1e-306) {
                continue;
            }
            let y = m + r * x;
            if y <= a || y >= b {
                // Rounded onto (or past) an endpoint; the weight there is
                // already below meaningful size.
                continue;
            }
            let v = f(y);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(OracleError::Domain(format!(
                    "integrand returned a non-finite value near {y}"
                )));
            }
            sre.add(v.re * w);
            sim.add(v.im * w);
            sabs.add(v.norm() * w);
        }
        *evals += 2 * k_max as u64 + 1;
        let cur = Complex64::new(sre.total(), sim.total()) * (r * h);
        abs = sabs.total() * r.abs() * h;
        if let Some(p) = prev {
            err = (cur - p).norm();
            value = cur;
            if err <= 0.25 * tol * rel_scale(cur, abs) {
                return Ok((cur, err, abs, true));
            }
        } else {
            value = cur;
        }
        prev = Some(cur);
    }
    Ok((value, err, abs, false))
}

fn ts_integrate(
    f: &dyn Fn(f64) -> Complex64,
    segments: &[(f64, f64)],
    tol: f64,
    max_evaluations: u64,
) -> Result<OracleResult, OracleError> {
    let mut evals = 0u64;
    let (mut re, mut im, mut errsum, mut abssum) =
        (Comp::default(), Comp::default(), Comp::default(), Comp::default());
    let mut all_converged = true;
    for &(a, b) in segments {
        let (v, e, abs, conv) = ts_segment(f, a, b, tol, &mut evals, max_evaluations)?;
        re.add(v.re);
        im.add(v.im);
        errsum.add(if e.is_finite() { e } else { abs });
        abssum.add(abs);
        all_converged &= conv;
    }
    let value = Complex64::new(re.total(), im.total());
    let err = errsum.total();
    let result = OracleResult {
        value,
        err_estimate: err,
        evaluations: evals,
        strategy: Strategy::TanhSinh,
    };
    if all_converged && err <= tol * rel_scale(value, abssum.total()) {
        Ok(result)
    } else {
        Err(OracleError::ToleranceUnreachable { tol, best: result })
    }
}

// ---------------------------------------------------------------------------
// Double-double panel engine
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct PanelDd {
    a: f64,
    b: f64,
    value: DdComplex,
    err: f64,
    abs: f64,
}

fn eval_panel_dd(f: &dyn Fn(Dd) -> DdComplex, a: f64, b: f64) -> Result<PanelDd, OracleError> {
    let (n24, w24) = gl24_dd();
    let (n48, w48) = gl48_dd();
    let m = Dd::from_sum(a, b).mul_f64(0.5);
    let r = Dd::from_f64(b).sub(Dd::from_f64(a)).mul_f64(0.5);
    let mut v24 = DdComplex::zero();
    for (x, w) in n24.iter().zip(w24) {
        let v = f(m.add(r.mul(*x)));
        v24 = v24.add(v.scale(*w));
    }
    let mut v48 = DdComplex::zero();
    let mut abs = Comp::default();
    for (x, w) in n48.iter().zip(w48) {
        let v = f(m.add(r.mul(*x)));
        let n = v.norm_f64();
        if !n.is_finite() {
            return Err(OracleError::Domain(format!(
                "integrand returned a non-finite value near {}",
                m.add(r.mul(*x)).to_f64()
            )));
        }
        v48 = v48.add(v.scale(*w));
        abs.add(n * w.to_f64());
    }
    let rv = r.to_f64();
    Ok(PanelDd {
        a,
        b,
        value: v48.scale(r),
        err: v48.sub(v24).norm_f64() * rv.abs(),
        abs: abs.total() * rv.abs(),
    })
}

#[derive(Debug)]
struct HeapEntryDd {
    err: f64,
    seq: u64,
    panel: PanelDd,
}

impl PartialEq for HeapEntryDd {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for HeapEntryDd {}
impl PartialOrd for HeapEntryDd {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntryDd {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn resum_panels_dd<'a>(panels: impl Iterator<Item = &'a PanelDd>) -> (DdComplex, f64, f64) {
    let mut list: Vec<&PanelDd> = panels.collect();
    list.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.b.total_cmp(&q.b)));
    let mut value = DdComplex::zero();
    let (mut err, mut abs) = (Comp::default(), Comp::default());
    for p in list {
        value = value.add(p.value);
        err.add(p.err);
        abs.add(p.abs);
    }
    (value, err.total(), abs.total())
}

fn panel_integrate_dd(
    f: &dyn Fn(Dd) -> DdComplex,
    freq: Option<&dyn Fn(f64) -> f64>,
    segments: &[(f64, f64)],
    tol: f64,
    max_evaluations: u64,
) -> Result<OracleResult, OracleError> {
    let mut counts = Vec::with_capacity(segments.len());
    let mut total_seed: u64 = 0;
    for &(a, b) in segments {
        let cycles = segment_cycles(freq, a, b);
        let n = ((PANELS_PER_CYCLE_DD * cycles).ceil() as u64 + 2).clamp(2, 400_000);
        counts.push(n);
        total_seed += n;
    }
    if total_seed * PANEL_EVALS_DD > max_evaluations {
        return Err(OracleError::Domain(format!(
            "seeding needs {} panels ({} evaluations) which exceeds the budget of {}; \
             the phase oscillates too fast for this budget",
            total_seed,
            total_seed * PANEL_EVALS_DD,
            max_evaluations
        )));
    }

    let mut heap: BinaryHeap<HeapEntryDd> = BinaryHeap::new();
    let mut frozen: Vec<PanelDd> = Vec::new();
    let mut seq: u64 = 0;
    let mut evals: u64 = 0;
    for (&(a, b), &n) in segments.iter().zip(&counts) {
        let h = (b - a) / n as f64;
        for i in 0..n {
            let pa = a + i as f64 * h;
            let pb = if i + 1 == n { b } else { a + (i + 1) as f64 * h };
            let p = eval_panel_dd(f, pa, pb)?;
            evals += PANEL_EVALS_DD;
            heap.push(HeapEntryDd {
                err: p.err,
                seq,
                panel: p,
            });
            seq += 1;
        }
    }

    let mut prev_outer_err = f64::INFINITY;
    let mut stagnant_rounds = 0u32;
    loop {
        let (vdd, err, abs) = resum_panels_dd(heap.iter().map(|e| &e.panel).chain(frozen.iter()));
        let value = vdd.to_complex64();
        let scale = rel_scale(value, abs);
        if err <= tol * scale {
            return Ok(OracleResult {
                value,
                err_estimate: err,
                evaluations: evals,
                strategy: Strategy::PanelSplit,
            });
        }
        if err >= 0.995 * prev_outer_err {
            stagnant_rounds += 1;
            if stagnant_rounds >= 3 {
                return Err(OracleError::ToleranceUnreachable {
                    tol,
                    best: OracleResult {
                        value,
                        err_estimate: err,
                        evaluations: evals,
                        strategy: Strategy::PanelSplit,
                    },
                });
            }
        } else {
            stagnant_rounds = 0;
        }
        prev_outer_err = err;
        let mut running_err = err;
        let mut improved = false;
        for _ in 0..4096 {
            if running_err <= 0.5 * tol * scale {
                break;
            }
            let Some(top) = heap.pop() else { break };
            let p = top.panel;
            let width_floor = 8.0 * f64::EPSILON * p.a.abs().max(p.b.abs()).max(1.0);
            if p.b - p.a <= width_floor {
                frozen.push(p);
                continue;
            }
            if evals + 2 * PANEL_EVALS_DD > max_evaluations {
                heap.push(top);
                return Err(OracleError::ToleranceUnreachable {
                    tol,
                    best: OracleResult {
                        value,
                        err_estimate: err,
                        evaluations: evals,
                        strategy: Strategy::PanelSplit,
                    },
                });
            }
            let mid = 0.5 * (p.a + p.b);
            let c1 = eval_panel_dd(f, p.a, mid)?;
            let c2 = eval_panel_dd(f, mid, p.b)?;
            evals += 2 * PANEL_EVALS_DD;
            running_err += c1.err + c2.err - p.err;
            heap.push(HeapEntryDd {
                err: c1.err,
                seq,
                panel: c1,
            });
            heap.push(HeapEntryDd {
                err: c2.err,
                seq: seq + 1,
                panel: c2,
            });
            seq += 2;
            improved = true;
        }
        if !improved {
            return Err(OracleError::ToleranceUnreachable {
                tol,
                best: OracleResult {
                    value,
                    err_estimate: err,
                    evaluations: evals,
                    strategy: Strategy::PanelSplit,
                },
            });
        }
    }
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

fn validate_interval(a: f64, b: f64) -> Result<(), OracleError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(OracleError::Domain(format!(
            "invalid interval [{a}, {b}]"
        )));
    }
    Ok(())
}

fn build_segments(a: f64, b: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut segs = Vec::with_capacity(cuts.len() + 1);
    let mut lo = a;
    for c in cuts {
        if c - lo > 4.0 * f64::EPSILON * c.abs().max(1.0) {
            segs.push((lo, c));
            lo = c;
        }
    }
    segs.push((lo, b));
    segs
}

fn dispatch(
    f: &dyn Fn(f64) -> Complex64,
    freq: Option<&dyn Fn(f64) -> f64>,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<OracleResult, OracleError> {
    validate_interval(a, b)?;
    if opts.tol < F64_TOL_FLOOR {
        return Err(OracleError::BadTolerance {
            requested: opts.tol,
            floor: F64_TOL_FLOOR,
        });
    }
    let segments = build_segments(a, b, &opts.breakpoints);
    match opts.strategy {
        Strategy::PanelSplit => panel_integrate(f, freq, &segments, opts.tol, opts.max_evaluations),
        Strategy::TanhSinh => ts_integrate(f, &segments, opts.tol, opts.max_evaluations),
        Strategy::Hybrid => match panel_integrate(f, freq, &segments, opts.tol, opts.max_evaluations)
        {
            Ok(r) => Ok(r),
            Err(OracleError::ToleranceUnreachable { best: pb, .. }) => {
                match ts_integrate(f, &segments, opts.tol, opts.max_evaluations) {
                    Ok(r) => Ok(r),
                    Err(OracleError::ToleranceUnreachable { tol, best: tb }) => {
                        let best = if tb.err_estimate < pb.err_estimate { tb } else { pb };
                        Err(OracleError::ToleranceUnreachable { tol, best })
                    }
                    Err(other) => Err(other),
                }
            }
            Err(other) => Err(other),
        },
    }
}

/// Integrate an arbitrary complex-valued function over `[a, b]`.
pub fn integrate_fn<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<OracleResult, OracleError>
where
    F: Fn(f64) -> Complex64,
{
    dispatch(&f, None, a, b, opts)
}

/// [`integrate_fn`] with a local-frequency hint (cycles per unit length,
/// i.e. `|f'|` for an integrand containing `e(f)`): panels are seeded at a
/// few per cycle, which avoids long bisection cascades.
pub fn integrate_fn_with_freq<F, G>(
    f: F,
    freq: G,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<OracleResult, OracleError>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> f64,
{
    dispatch(&f, Some(&freq), a, b, opts)
}

/// Total variation of the phase over `[a, b]` in cycles, sampled.
pub fn phase_variation(phase: &PhaseSpec, a: f64, b: f64) -> f64 {
    const SAMPLES: usize = 2048;
    let h = (b - a) / SAMPLES as f64;
    let mut prev = phase.eval(a);
    let mut var = 0.0;
    for i in 1..=SAMPLES {
        let x = if i == SAMPLES { b } else { a + i as f64 * h };
        let v = phase.eval(x);
        var += (v - prev).abs();
        prev = v;
    }
    var
}

/// Central finite difference of the phase; independent of the jet backend.
fn fd_phase_derivative(phase: &PhaseSpec, y: f64, h: f64) -> f64 {
    (phase.eval(y + h) - phase.eval(y - h)) / (2.0 * h)
}

/// Sign-change roots of `f'` strictly inside `(a, b)`, located by a
/// finite-difference scan and bisection.  Used to split panels at stationary
/// points without trusting the jet derivatives.
fn fd_stationary_points(phase: &PhaseSpec, a: f64, b: f64) -> Vec<f64> {
    const GRID: usize = 4096;
    let width = b - a;
    let h = 1e-6 * width;
    let lo = a + 2.0 * h;
    let hi = b - 2.0 * h;
    if hi <= lo {
        return Vec::new();
    }
    let step = (hi - lo) / GRID as f64;
    let mut roots = Vec::new();
    let mut prev = fd_phase_derivative(phase, lo, h);
    for i in 1..=GRID {
        let x = lo + i as f64 * step;
        let cur = fd_phase_derivative(phase, x, h);
        if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
            let (mut xa, mut xb) = (x - step, x);
            let rising = cur > 0.0;
            for _ in 0..80 {
                let mid = 0.5 * (xa + xb);
                let v = fd_phase_derivative(phase, mid, h);
                if (v > 0.0) == rising {
                    xb = mid;
                } else {
                    xa = mid;
                }
            }
            roots.push(0.5 * (xa + xb));
        }
        prev = cur;
    }
    roots
}

/// Reference value of `∫ g·e(f)` over the scenario interval.
///
/// Splits at weight support edges and finite-difference-detected stationary
/// points, then integrates with the requested strategy.  Phases with total
/// variation ≥ 1e5 cycles must be run with `extended = true` (double-double
/// arithmetic throughout); variation beyond 5e6 cycles is refused.
pub fn oscillatory_quadrature(
    sc: &Scenario,
    opts: &QuadOptions,
    extended: bool,
) -> Result<OracleResult, OracleError> {
    let (a, b) = sc.interval;
    validate_interval(a, b)?;
    let variation = phase_variation(&sc.phase, a, b);
    if variation > MAX_VARIATION {
        return Err(OracleError::Domain(format!(
            "phase variation {variation:.3e} cycles exceeds the certified range {MAX_VARIATION:e}"
        )));
    }
    if variation >= EXTENDED_MANDATE_VARIATION && !extended {
        return Err(OracleError::Domain(format!(
            "phase variation {variation:.3e} cycles requires extended precision"
        )));
    }
    let mut bps = opts.breakpoints.clone();
    if let Some((sa, sb)) = sc.weight.support() {
        bps.push(sa);
        bps.push(sb);
    }
    bps.extend(fd_stationary_points(&sc.phase, a, b));

    let phase = &sc.phase;
    let weight = &sc.weight;
    let fd_h = 1e-6 * (b - a);
    let freq = move |y: f64| {
        let yc = y.clamp(a + fd_h, b - fd_h);
        fd_phase_derivative(phase, yc, fd_h)
    };

    if extended {
        if opts.tol < DD_TOL_FLOOR {
            return Err(OracleError::BadTolerance {
                requested: opts.tol,
                floor: DD_TOL_FLOOR,
            });
        }
        if opts.strategy == Strategy::TanhSinh {
            return Err(OracleError::Domain(
                "extended precision supports the panel strategy only".into(),
            ));
        }
        let f = move |y: Dd| weight.eval_dd(y).mul(e_unit_dd(phase.eval_dd(y)));
        let segments = build_segments(a, b, &bps);
        panel_integrate_dd(&f, Some(&freq), &segments, opts.tol, opts.max_evaluations)
    } else {
        let f = move |y: f64| weight.eval(y) * e_unit(phase.eval(y));
        let mut inner = opts.clone();
        inner.breakpoints = bps;
        dispatch(&f, Some(&freq), a, b, &inner)
    }
}

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

/// Run the scenario's sweep grid: for each sweep value, compare the
/// asymptotic expansion at every requested order against the oracle.
///
/// Failures (oracle or expansion) are recorded in the affected rows rather
/// than aborting the study.  Rows appear in (sweep, order) order and carry
/// the per-order fitted slope of `log |diff|` against `log T`.
pub fn convergence_study(sc: &Scenario, strategy: Strategy) -> StudyTable {
    convergence_study_with(sc, strategy, false)
}

/// [`convergence_study`] with every oracle run forced into extended
/// precision when `force_extended` is set; otherwise extended precision
/// engages only past the variation mandate.
pub fn convergence_study_with(
    sc: &Scenario,
    strategy: Strategy,
    force_extended: bool,
) -> StudyTable {
    let per_t: Vec<Vec<StudyRow>> = sc
        .sweep
        .par_iter()
        .map(|&t| study_rows_for(sc, t, strategy, force_extended))
        .collect();
    let mut rows: Vec<StudyRow> = per_t.into_iter().flatten().collect();
    // Per-order slopes.
    let orders: Vec<usize> = sc.orders.clone();
    for &n in &orders {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.n == n && !r.failed)
            .map(|r| (r.t, r.abs_diff))
            .collect();
        let slope = StudyTable::fit_slope(&pts).unwrap_or(f64::NAN);
        for r in rows.iter_mut().filter(|r| r.n == n) {
            r.slope = slope;
        }
    }
    StudyTable { rows }
}

fn study_rows_for(sc: &Scenario, t: f64, strategy: Strategy, force_extended: bool) -> Vec<StudyRow> {
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut sct = sc.clone();
    sct.phase = sc.phase.with_sweep_value(t);

    let (a, b) = sct.interval;
    let variation = phase_variation(&sct.phase, a, b);
    let extended = force_extended || variation >= EXTENDED_MANDATE_VARIATION;
    let floor = if extended { DD_TOL_FLOOR } else { F64_TOL_FLOOR };
    let opts = QuadOptions {
        tol: sct.oracle_tol.max(floor),
        strategy,
        ..QuadOptions::default()
    };
    let oracle = oscillatory_quadrature(&sct, &opts, extended);

    let classification = Interval::new(a, b)
        .map_err(|e| e.to_string())
        .and_then(|iv| classify(&sct.phase, iv, DEFAULT_GRID).map_err(|e| e.to_string()));

    let mut rows = Vec::with_capacity(sct.orders.len());
    for &n in &sct.orders {
        let expansion = match &classification {
            Ok(PhaseClassification::MonotoneNoStationary { .. }) => {
                fdt_evaluate(&sct, n).map_err(|e| e.to_string())
            }
            Ok(PhaseClassification::SingleInteriorStationary { .. }) => {
                wsp_evaluate(&sct, n).map_err(|e| e.to_string())
            }
            Ok(PhaseClassification::Degenerate { detail }) => {
                Err(format!("degenerate phase: {detail}"))
            }
            Err(e) => Err(e.clone()),
        };
        let row = match (&oracle, expansion) {
            (Ok(orc), Ok(exp)) => {
                let diff = (exp.value() - orc.value).norm();
                let bound = exp.error_bound;
                StudyRow {
                    t,
                    n,
                    expansion: exp.value(),
                    oracle: orc.value,
                    abs_diff: diff,
                    bound,
                    ratio: if bound > 0.0 { diff / bound } else { 0.0 },
                    slope: f64::NAN,
                    failed: false,
                    note: if exp.diagnostics.checked {
                        "ok".into()
                    } else {
                        "ok (hypothesis unchecked)".into()
                    },
                }
            }
            (Err(oe), exp) => StudyRow {
                t,
                n,
                expansion: exp.as_ref().map(|e| e.value()).unwrap_or(nan),
                oracle: nan,
                abs_diff: f64::NAN,
                bound: exp.map(|e| e.error_bound).unwrap_or(f64::NAN),
                ratio: f64::NAN,
                slope: f64::NAN,
                failed: true,
                note: format!("oracle: {oe}"),
            },
            (Ok(orc), Err(ee)) => StudyRow {
                t,
                n,
                expansion: nan,
                oracle: orc.value,
                abs_diff: f64::NAN,
                bound: f64::NAN,
                ratio: f64::NAN,
                slope: f64::NAN,
                failed: true,
                note: format!("expansion: {ee}"),
            },
        };
        rows.push(row);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::WeightSpec;

    #[test]
    fn gl_rules_are_accurate() {
        for (n, rule) in [(12, gl12()), (24, gl24())] {
            let (nodes, weights) = rule;
            let wsum: f64 = weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n={n}: Σw = {wsum}");
            for i in 0..n {
                assert!(
                    (nodes[i] + nodes[n - 1 - i]).abs() < 1e-15,
                    "n={n}: node symmetry"
                );
            }
        }
        // 12-point rule is exact through degree 23: ∫ x²² = 2/23.
        let (nodes, weights) = gl12();
        let int: f64 = nodes
            .iter()
            .zip(weights)
            .map(|(x, w)| x.powi(22) * w)
            .sum();
        assert!((int - 2.0 / 23.0).abs() < 1e-15, "int = {int}");
        // Double-double rules agree with f64 and sharpen the weight sum.
        let (nd, wd) = gl24_dd();
        let (nf, _) = gl24();
        for (a, b) in nd.iter().zip(nf) {
            assert!((a.to_f64() - b).abs() < 4e-16);
        }
        let mut wsum = Dd::from_f64(0.0);
        for w in wd {
            wsum = wsum.add(*w);
        }
        assert!(wsum.sub(Dd::from_f64(2.0)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn polynomial_without_phase_is_exact() {
        // ∫_{−1}^{1} (1−x²)⁴ dx = 256/315.
        let f = |x: f64| Complex64::new((1.0 - x * x).powi(4), 0.0);
        let r = integrate_fn(f, -1.0, 1.0, &QuadOptions::default()).unwrap();
        let expect = 256.0 / 315.0;
        assert!(
            (r.value.re - expect).abs() < 1e-14 * expect,
            "got {}, expect {expect}",
            r.value.re
        );
        assert!(r.value.im.abs() < 1e-16);
        assert!(r.err_estimate < 1e-12);
    }

    #[test]
    fn linear_phase_matches_closed_form() {
        let t = 37.5;
        let f = move |x: f64| e_unit(t * x);
        let freq = move |_: f64| t;
        let opts = QuadOptions {
            tol: 1e-13,
            ..QuadOptions::default()
        };
        let r = integrate_fn_with_freq(f, freq, 0.0, 1.0, &opts).unwrap();
        let closed = (e_unit(t) - 1.0) / Complex64::new(0.0, 2.0 * std::f64::consts::PI * t);
        assert!(
            (r.value - closed).norm() < 1e-13,
            "diff = {:e}",
            (r.value - closed).norm()
        );
        assert!(r.evaluations > 0);
        assert_eq!(r.strategy, Strategy::PanelSplit);
    }

    #[test]
    fn breakpoint_additivity() {
        let f = |x: f64| {
            let bump = if x.abs() < 1.0 {
                (1.0 - x * x).powi(3)
            } else {
                0.0
            };
            bump * e_unit(11.0 * x * x)
        };
        let opts = QuadOptions {
            tol: 1e-12,
            ..QuadOptions::default()
        };
        let whole = integrate_fn(f, -1.0, 1.0, &opts).unwrap();
        let left = integrate_fn(f, -1.0, 0.3, &opts).unwrap();
        let right = integrate_fn(f, 0.3, 1.0, &opts).unwrap();
        let sum = left.value + right.value;
        assert!(
            (whole.value - sum).norm() < 1e-12,
            "diff = {:e}",
            (whole.value - sum).norm()
        );
        // Supplying the cut as a breakpoint gives the same answer.
        let opts_bp = QuadOptions {
            breakpoints: vec![0.3],
            ..opts
        };
        let with_bp = integrate_fn(f, -1.0, 1.0, &opts_bp).unwrap();
        assert!((with_bp.value - sum).norm() < 1e-12);
    }

    #[test]
    fn tightening_tolerance_does_not_hurt() {
        let t = 65.0;
        let f = move |x: f64| e_unit(t * x) * (1.0 + x * x);
        let tight = integrate_fn(
            &f,
            0.0,
            1.0,
            &QuadOptions {
                tol: 1e-13,
                ..QuadOptions::default()
            },
        )
        .unwrap();
        let loose = integrate_fn(
            &f,
            0.0,
            1.0,
            &QuadOptions {
                tol: 1e-8,
                ..QuadOptions::default()
            },
        )
        .unwrap();
        // The tight run's claimed error cannot exceed the loose run's, and
        // the two values agree within the loose claim.
        assert!(tight.err_estimate <= loose.err_estimate + 1e-18);
        assert!((tight.value - loose.value).norm() <= loose.err_estimate + 1e-15);
    }

    #[test]
    fn strategies_agree_on_oscillatory_bump() {
        let t = 50.0;
        let f = move |x: f64| {
            let bump = if x.abs() < 1.0 {
                (1.0 - x * x).powi(6)
            } else {
                0.0
            };
            bump * e_unit(t * x * x)
        };
        let mk = |strategy| QuadOptions {
            tol: 1e-10,
            strategy,
            ..QuadOptions::default()
        };
        let panel = integrate_fn(&f, -1.0, 1.0, &mk(Strategy::PanelSplit)).unwrap();
        let ts = integrate_fn(&f, -1.0, 1.0, &mk(Strategy::TanhSinh)).unwrap();
        let hybrid = integrate_fn(&f, -1.0, 1.0, &mk(Strategy::Hybrid)).unwrap();
        let tol = panel.err_estimate + ts.err_estimate + 1e-12;
        assert!(
            (panel.value - ts.value).norm() < tol,
            "panel {} vs ts {}",
            panel.value,
            ts.value
        );
        assert!((hybrid.value - panel.value).norm() < 1e-15);
        assert_eq!(ts.strategy, Strategy::TanhSinh);
    }

    #[test]
    fn impossible_budget_reports_best_attempt() {
        let f = |x: f64| e_unit(5000.0 * x);
        let opts = QuadOptions {
            tol: 1e-13,
            max_evaluations: 2000,
            ..QuadOptions::default()
        };
        match integrate_fn(f, 0.0, 1.0, &opts) {
            Err(OracleError::Domain(msg)) => {
                // Seeding alone exceeds the budget on this fast phase.
                assert!(msg.contains("budget"));
            }
            Err(OracleError::ToleranceUnreachable { best, .. }) => {
                assert!(best.evaluations <= 2000);
                assert!(best.value.is_finite());
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn tolerance_floors_are_enforced() {
        let f = |x: f64| Complex64::new(x, 0.0);
        let opts = QuadOptions {
            tol: 1e-15,
            ..QuadOptions::default()
        };
        assert!(matches!(
            integrate_fn(f, 0.0, 1.0, &opts),
            Err(OracleError::BadTolerance { .. })
        ));
    }

    #[test]
    fn scenario_quadrature_handles_stationary_phase() {
        let sc = Scenario::new(
            "fresnel-bump",
            PhaseSpec::Fresnel {
                t: 200.0,
                shift: 0.3,
            },
            WeightSpec::Bump {
                p: 6,
                a: -1.0,
                b: 1.0,
                amp: 1.0,
            },
            (-1.0, 1.0),
        );
        let opts = QuadOptions {
            tol: 1e-12,
            ..QuadOptions::default()
        };
        let r = oscillatory_quadrature(&sc, &opts, false).unwrap();
        // Same integrand through the closure-level door.
        let f = |y: f64| sc.weight.eval(y) * e_unit(sc.phase.eval(y));
        let direct = integrate_fn(
            f,
            -1.0,
            1.0,
            &QuadOptions {
                tol: 1e-13,
                breakpoints: vec![0.3],
                ..QuadOptions::default()
            },
        )
        .unwrap();
        assert!(
            (r.value - direct.value).norm() < 1e-11,
            "scenario {} vs direct {}",
            r.value,
            direct.value
        );
        // Magnitude sanity: leading stationary term is |g(0.3)|/√(2T).
        let lead = sc.weight.eval(0.3).norm() / (2.0 * 200.0_f64).sqrt();
        assert!(r.value.norm() > 0.5 * lead && r.value.norm() < 2.0 * lead);
    }

    #[test]
    fn extended_mode_agrees_with_f64_and_closed_form() {
        // 1237 cycles with strong cancellation: |I| ≈ 1.8e−4 while Σ|panel|
        // is 1.  The dd run certifies far below the f64 rounding floor.
        let t = 1237.25;
        let sc = Scenario::new(
            "linear-dd",
            PhaseSpec::Linear {
                slope: t,
                shift: 0.0,
            },
            WeightSpec::One { amp: 1.0 },
            (0.0, 1.0),
        );
        let closed = (e_unit(t) - 1.0) / Complex64::new(0.0, 2.0 * std::f64::consts::PI * t);
        let rdd = oscillatory_quadrature(
            &sc,
            &QuadOptions {
                tol: 1e-22,
                ..QuadOptions::default()
            },
            true,
        )
        .unwrap();
        assert!(
            (rdd.value - closed).norm() < 1e-18,
            "dd diff = {:e}",
            (rdd.value - closed).norm()
        );
        // In double precision the panel error sum saturates at rounding
        // noise ≈ 1e2·eps·Σ|panel| ≈ 2e−14; a relative tolerance of 1e−10
        // against the cancellation scale 1e−3 stays above that plateau.
        let rf = oscillatory_quadrature(
            &sc,
            &QuadOptions {
                tol: 1e-10,
                ..QuadOptions::default()
            },
            false,
        )
        .unwrap();
        assert!(
            (rf.value - rdd.value).norm() < 1e-12,
            "f64 vs dd diff = {:e}",
            (rf.value - rdd.value).norm()
        );
    }

    #[test]
    fn extended_precision_mandate_and_variation_cap() {
        let fast = Scenario::new(
            "fast",
            PhaseSpec::Linear {
                slope: 2e5,
                shift: 0.0,
            },
            WeightSpec::One { amp: 1.0 },
            (0.0, 1.0),
        );
        match oscillatory_quadrature(&fast, &QuadOptions::default(), false) {
            Err(OracleError::Domain(msg)) => assert!(msg.contains("extended")),
            other => panic!("expected mandate error, got {other:?}"),
        }
        let too_fast = Scenario::new(
            "too-fast",
            PhaseSpec::Linear {
                slope: 6e6,
                shift: 0.0,
            },
            WeightSpec::One { amp: 1.0 },
            (0.0, 1.0),
        );
        match oscillatory_quadrature(&too_fast, &QuadOptions::default(), true) {
            Err(OracleError::Domain(msg)) => assert!(msg.contains("certified range")),
            other => panic!("expected range error, got {other:?}"),
        }
        // Extended runs enforce their own (lower) tolerance floor.
        let ok = Scenario::new(
            "ok",
            PhaseSpec::Linear {
                slope: 10.0,
                shift: 0.0,
            },
            WeightSpec::One { amp: 1.0 },
            (0.0, 1.0),
        );
        assert!(matches!(
            oscillatory_quadrature(
                &ok,
                &QuadOptions {
                    tol: 1e-27,
                    ..QuadOptions::default()
                },
                true
            ),
            Err(OracleError::BadTolerance { .. })
        ));
    }

    #[test]
    fn convergence_study_produces_ordered_rows_and_slopes() {
        let mut sc = Scenario::new(
            "study",
            PhaseSpec::Fresnel {
                t: 1.0,
                shift: 0.2,
            },
            WeightSpec::Bump {
                p: 6,
                a: -1.0,
                b: 1.0,
                amp: 1.0,
            },
            (-1.0, 1.0),
        );
        sc.sweep = vec![50.0, 100.0, 200.0];
        sc.orders = vec![0, 1];
        sc.oracle_tol = 1e-12;
        let table = convergence_study(&sc, Strategy::PanelSplit);
        assert_eq!(table.rows.len(), 6);
        // (T, n) lexicographic order.
        let keys: Vec<(f64, usize)> = table.rows.iter().map(|r| (r.t, r.n)).collect();
        assert_eq!(
            keys,
            vec![
                (50.0, 0),
                (50.0, 1),
                (100.0, 0),
                (100.0, 1),
                (200.0, 0),
                (200.0, 1)
            ]
        );
        for r in &table.rows {
            assert!(!r.failed, "row T={} n={} failed: {}", r.t, r.n, r.note);
            assert!(r.abs_diff.is_finite());
            assert!(r.bound > 0.0);
            assert!(r.ratio <= 1.0, "T={} n={}: ratio {}", r.t, r.n, r.ratio);
        }
        // Higher order converges faster: slope(n=1) < slope(n=0) < 0.
        let s0 = table.rows.iter().find(|r| r.n == 0).unwrap().slope;
        let s1 = table.rows.iter().find(|r| r.n == 1).unwrap().slope;
        assert!(s0 < 0.0, "s0 = {s0}");
        assert!(s1 < s0, "s1 = {s1}, s0 = {s0}");
        // Deterministic rerun.
        let again = convergence_study(&sc, Strategy::PanelSplit);
        assert_eq!(table.rows, again.rows);
    }
}
