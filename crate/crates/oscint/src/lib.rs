//! Verification-grade numerics for oscillatory exponential integrals.
//!
//! The crate evaluates truncated asymptotic expansions of integrals
//!
//! ```text
//!     I = ∫_α^β g(x) e(f(x)) dx,          e(x) = exp(2πi x),
//! ```
//!
//! in two regimes — monotone phase (repeated integration by parts, the
//! "first-derivative test") and a single interior stationary point
//! (weighted stationary phase) — together with explicit, fully computable
//! error bounds, and certifies every expansion against an independent
//! brute-force quadrature oracle.
//!
//! Layout:
//!
//! * [`jets`] — truncated Taylor (jet) arithmetic; the derivative currency
//!   used by every analytic module.
//! * [`dd`] — double-double extended precision for large-parameter oracles.
//! * [`catalog`] — the library of phase and weight functions plus scenario
//!   configuration and its text format.
//! * [`stationary`] — phase classification, parameter estimation, and
//!   hypothesis checking for the expansion ladder.
//! * [`fdt`] — boundary-term expansion for monotone phases.
//! * [`wsp`] — stationary-phase expansion with the Gaussian-moment
//!   coefficient table.
//! * [`oracle`] — adaptive oscillatory quadrature (the independent referee).
//! * [`arith`] — Kloosterman/Ramanujan sums and the dual-sum identity.
//! * [`transforms`] — Bessel-kernel integral transforms (cosh and sinh
//!   kernels), their derivative expansions, and the cube-root-phase
//!   asymptotics used by the Voronoi-type integrals.
//! * [`report`] — study tables and CSV serialization shared by the CLI.

pub mod arith;
pub mod catalog;
pub mod dd;
pub mod fdt;
pub mod jets;
pub mod oracle;
pub mod report;
pub mod stationary;
pub mod transforms;
pub mod wsp;

pub use num_complex::Complex64;

/// Unit complex exponential `e(x) = exp(2πi·x)` for real `x`.
///
/// The argument is reduced modulo 1 before multiplication by 2π; for
/// |x| < 2^52 the reduction `x − round(x)` is exact in IEEE double, so the
/// result keeps full relative accuracy even for phases of size ~10^9.
#[inline]
pub fn e_unit(x: f64) -> Complex64 {
    let r = x - x.round();
    let (s, c) = (2.0 * std::f64::consts::PI * r).sin_cos();
    Complex64::new(c, s)
}

/// Double factorial `(2j−1)!! = 1·3·5···(2j−1)` with `(−1)!! = 1`.
#[inline]
pub fn double_factorial_odd(j: u32) -> f64 {
    let mut acc = 1.0;
    let mut k = 1i64;
    while k <= 2 * (j as i64) - 1 {
        acc *= k as f64;
        k += 2;
    }
    acc
}

/// Neumaier-compensated accumulator shared by the summation-heavy modules.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    pub(crate) fn total(self) -> f64 {
        self.s + self.c
    }
}
