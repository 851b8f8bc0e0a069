//! Double-double ("dd") extended precision: unevaluated sums of two IEEE
//! doubles carrying ~31 significant digits.
//!
//! The large-parameter oracle runs (T ≥ 1e5) accumulate phases of size ~T, so
//! plain doubles lose up to 11 digits to argument growth before the phase is
//! reduced mod 1. Evaluating the phase in dd and reducing mod 1 *in dd* keeps
//! the unit-circle factor `e(f)` accurate to ~1e-26, which is what the
//! extended-precision oracle tolerances require.
//!
//! Implementation notes:
//!
//! * error-free transforms: Knuth `two_sum`, Dekker/FMA `two_prod`;
//! * transcendentals by classical reduction + Taylor (exp, sin/cos in turns)
//!   or Newton refinement seeded from the f64 result (ln, sqrt, cbrt);
//! * the only angle primitive is [`Dd::sin_cos_2pi`], sine and cosine of
//!   `2π·t`: every oscillatory factor in this crate is of the form
//!   `e(f) = exp(2πi·f)`, so angles are carried in turns, never radians,
//!   and reduction mod 1 is exact.

use num_complex::Complex64;

/// Extended-precision value `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// 2π to double-double precision.
pub const DD_TAU: Dd = Dd {
    hi: 6.283185307179586,
    lo: 2.4492935982947064e-16,
};

/// ln 2 to double-double precision.
const DD_LN2: Dd = Dd {
    hi: 0.6931471805599453,
    lo: 2.3190468138462996e-17,
};

/// Error-free sum: `a + b = s + err` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Error-free sum assuming `|a| ≥ |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

/// Error-free product via fused multiply-add: `a·b = p + err` exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = f64::mul_add(a, b, -p);
    (p, err)
}

impl Dd {
    /// Lift an exact double.
    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Round to nearest double.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact normalized sum of two doubles.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let t = s2 + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s1, t);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    #[inline]
    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let t = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, t);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, rhs: f64) -> Dd {
        let (p, e) = two_prod(self.hi, rhs);
        let t = e + self.lo * rhs;
        let (hi, lo) = quick_two_sum(p, t);
        Dd { hi, lo }
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let r2 = r.sub(rhs.mul_f64(q2));
        let q3 = r2.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    #[inline]
    pub fn recip(self) -> Dd {
        Dd::from_f64(1.0).div(self)
    }

    /// Square root by one Newton/Karp refinement of the f64 seed.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::from_f64(0.0);
        }
        debug_assert!(self.hi > 0.0, "dd sqrt of negative value");
        let s0 = self.hi.sqrt();
        let s = Dd::from_f64(s0);
        // s + (x − s²)/(2s)
        let corr = self.sub(s.mul(s)).div(s.mul_f64(2.0));
        s.add(corr)
    }

    /// Cube root by two Newton refinements of the f64 seed.
    pub fn cbrt(self) -> Dd {
        debug_assert!(self.hi > 0.0, "dd cbrt requires a positive value");
        let mut c = Dd::from_f64(self.hi.cbrt());
        for _ in 0..2 {
            let c2 = c.mul(c);
            let num = c2.mul(c).sub(self);
            c = c.sub(num.div(c2.mul_f64(3.0)));
        }
        c
    }

    /// Exponential: reduce by ln 2, Taylor on the remainder, rescale.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::from_f64(0.0);
        }
        let k = (self.hi / DD_LN2.hi).round();
        let r = self.sub(DD_LN2.mul_f64(k));
        // Taylor sum of exp(r), |r| ≤ ln2/2. Divide by the exact integer each
        // step: multiplying by a rounded reciprocal would cap accuracy at f64.
        let mut term = Dd::from_f64(1.0);
        let mut sum = Dd::from_f64(1.0);
        for n in 1..40 {
            term = term.mul(r).div(Dd::from_f64(n as f64));
            sum = sum.add(term);
            if term.hi.abs() < 1e-36 * sum.hi.abs() {
                break;
            }
        }
        let scale = (k as i32).clamp(-1022, 1023);
        let pow2 = f64::powi(2.0, scale);
        sum.mul_f64(pow2)
    }

    /// Natural logarithm by two Newton corrections of the f64 seed:
    /// `y ← y + x·exp(−y) − 1`.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0, "dd ln requires a positive value");
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            let corr = self.mul(y.neg().exp()).sub(Dd::from_f64(1.0));
            y = y.add(corr);
        }
        y
    }

    /// Real power `x^α` for positive `x`, via exp(α·ln x).
    pub fn powf(self, alpha: f64) -> Dd {
        self.ln().mul_f64(alpha).exp()
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: i32) -> Dd {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = Dd::from_f64(1.0);
        let mut base = self;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(base);
            }
        }
        result
    }

    /// Hyperbolic sine and cosine from the exponential.
    pub fn sinh_cosh(self) -> (Dd, Dd) {
        let ep = self.exp();
        let em = self.neg().exp();
        (
            ep.sub(em).mul_f64(0.5),
            ep.add(em).mul_f64(0.5),
        )
    }

    /// `(sin 2πt, cos 2πt)` with exact reduction of `t` modulo 1.
    ///
    /// The angle is carried in turns: `t − round(t)` is exact for |t| < 2^52,
    /// after which the residual is split into a quadrant and a Taylor-range
    /// remainder |θ| ≤ π/4 + ulp.
    pub fn sin_cos_2pi(self) -> (Dd, Dd) {
        // Reduce to |r| ≤ 0.5 (+ulp). round() on hi is exact; the subtraction
        // of an integer below 2^52 is exact in dd.
        let r = self.sub(Dd::from_f64(self.hi.round()));
        // Quadrant: q/4 with q ∈ {−2,…,2}; q/4 is exact binary.
        let q = (4.0 * r.hi).round();
        let u = r.sub(Dd::from_f64(q * 0.25));
        let theta = u.mul(DD_TAU);
        // Joint Taylor: sin θ and cos θ, |θ| ≤ π/4.
        let t2 = theta.mul(theta);
        let mut s = theta;
        let mut term_s = theta;
        let mut c = Dd::from_f64(1.0);
        let mut term_c = Dd::from_f64(1.0);
        for n in 1..25 {
            let k2 = (2 * n) as f64;
            term_c = term_c.mul(t2).div(Dd::from_f64(-k2 * (k2 - 1.0)));
            c = c.add(term_c);
            term_s = term_s.mul(t2).div(Dd::from_f64(-k2 * (k2 + 1.0)));
            s = s.add(term_s);
            if term_s.hi.abs() < 1e-36 && term_c.hi.abs() < 1e-36 {
                break;
            }
        }
        match q as i32 {
            0 => (s, c),
            1 => (c, s.neg()),
            -1 => (c.neg(), s),
            _ => (s.neg(), c.neg()), // ±2: shift by a half turn
        }
    }
}

/// Complex number with double-double components.
#[derive(Copy, Clone, Debug, Default)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    #[inline]
    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    #[inline]
    pub fn zero() -> Self {
        DdComplex::default()
    }

    #[inline]
    pub fn from_complex64(z: Complex64) -> Self {
        DdComplex {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    #[inline]
    pub fn to_complex64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline]
    pub fn add(self, rhs: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.add(rhs.re),
            im: self.im.add(rhs.im),
        }
    }

    #[inline]
    pub fn sub(self, rhs: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.sub(rhs.re),
            im: self.im.sub(rhs.im),
        }
    }

    #[inline]
    pub fn mul(self, rhs: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.mul(rhs.re).sub(self.im.mul(rhs.im)),
            im: self.re.mul(rhs.im).add(self.im.mul(rhs.re)),
        }
    }

    #[inline]
    pub fn scale(self, s: Dd) -> DdComplex {
        DdComplex {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    /// Euclidean norm, rounded to f64 (used for error estimates only).
    pub fn norm_f64(self) -> f64 {
        let r = self.re.to_f64();
        let i = self.im.to_f64();
        r.hypot(i)
    }
}

/// Unit complex exponential `e(t) = exp(2πi·t)` in double-double precision.
#[inline]
pub fn e_unit_dd(t: Dd) -> DdComplex {
    let (s, c) = t.sin_cos_2pi();
    DdComplex { re: c, im: s }
}
