//! Truncated Taylor-series (jet) arithmetic with complex coefficients.
//!
//! A [`Jet`] stores the scaled derivatives `c_k = f^{(k)}(x₀)/k!` of a smooth
//! function at a real base point `x₀`, truncated at a fixed order `p ≤ 31`.
//! All elementary operations — ring arithmetic, reciprocal, composition,
//! `exp`, `sin`/`cos`, `sinh`/`cosh`, real powers, integer powers — are closed
//! at that order, so an order-`p` jet of a phase function delivers every
//! derivative `f^{(k)}`, `k ≤ p`, in a single evaluation pass with no
//! finite-difference noise.
//!
//! Conventions:
//!
//! * coefficients are `c_k = f^{(k)}/k!` (monomial coefficients of the local
//!   Taylor polynomial), not raw derivatives;
//! * binary operations require both operands to share base point and order;
//! * transcendental recurrences are the classical D. Knuth / R. Brent power
//!   series recursions, each O(p²).

use num_complex::Complex64;
use thiserror::Error;

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 31;

/// Errors produced by jet construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    /// The operation left its mathematical domain (division by zero,
    /// fractional power of a non-positive value, …).
    #[error("domain error in `{op}`: {detail}")]
    Domain { op: &'static str, detail: String },
    /// A requested truncation order exceeds [`MAX_ORDER`].
    #[error("requested order {requested} exceeds the maximum supported order {max}")]
    OrderOverflow { requested: usize, max: usize },
    /// Composition was attempted where the inner value does not match the
    /// outer jet's base point, or a binary operation mixed base points.
    #[error("base-point mismatch: expected {expected}, got {got}")]
    BasePointMismatch { expected: f64, got: f64 },
}

/// Truncated Taylor expansion of a function at a real base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    base_point: f64,
    /// `coeffs[k] = f^{(k)}(base_point)/k!`; length is `order + 1`.
    coeffs: Vec<Complex64>,
}

impl Jet {
    /// Jet of the constant function `x ↦ c`.
    pub fn constant(c: Complex64, base_point: f64, order: usize) -> Result<Self, JetError> {
        Self::check_order(order)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = c;
        Ok(Jet { base_point, coeffs })
    }

    /// Jet of the identity function `x ↦ x` at `base_point`.
    pub fn variable(base_point: f64, order: usize) -> Result<Self, JetError> {
        Self::check_order(order)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = Complex64::new(base_point, 0.0);
        if order >= 1 {
            coeffs[1] = Complex64::new(1.0, 0.0);
        }
        Ok(Jet { base_point, coeffs })
    }

    /// Jet with explicitly given coefficients `c_k = f^{(k)}/k!`.
    pub fn from_coeffs(base_point: f64, coeffs: Vec<Complex64>) -> Result<Self, JetError> {
        if coeffs.is_empty() {
            return Err(JetError::Domain {
                op: "from_coeffs",
                detail: "coefficient vector must not be empty".into(),
            });
        }
        Self::check_order(coeffs.len() - 1)?;
        Ok(Jet { base_point, coeffs })
    }

    fn check_order(order: usize) -> Result<(), JetError> {
        if order > MAX_ORDER {
            Err(JetError::OrderOverflow {
                requested: order,
                max: MAX_ORDER,
            })
        } else {
            Ok(())
        }
    }

    /// Truncation order `p` (the jet carries coefficients `0..=p`).
    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Base point of the expansion.
    #[inline]
    pub fn base_point(&self) -> f64 {
        self.base_point
    }

    /// Taylor coefficient `c_k = f^{(k)}/k!` (zero for `k` beyond the order).
    #[inline]
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    /// Value `f(base_point)`.
    #[inline]
    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Raw derivative `f^{(k)}(base_point) = k!·c_k`.
    pub fn derivative(&self, k: usize) -> Complex64 {
        let mut fact = 1.0f64;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.coeff(k) * fact
    }

    /// Jet of `f′` (order drops by one). Order-0 input yields the zero jet.
    pub fn differentiate(&self) -> Jet {
        let p = self.order();
        if p == 0 {
            return Jet {
                base_point: self.base_point,
                coeffs: vec![Complex64::new(0.0, 0.0)],
            };
        }
        let coeffs = (0..p)
            .map(|k| self.coeffs[k + 1] * ((k + 1) as f64))
            .collect();
        Jet {
            base_point: self.base_point,
            coeffs,
        }
    }

    /// Copy truncated (or zero-padded) to the given order.
    pub fn truncated(&self, order: usize) -> Result<Jet, JetError> {
        Self::check_order(order)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        for k in 0..=order.min(self.order()) {
            coeffs[k] = self.coeffs[k];
        }
        Ok(Jet {
            base_point: self.base_point,
            coeffs,
        })
    }

    fn binary_check(&self, rhs: &Jet, op: &'static str) -> Result<(), JetError> {
        if self.base_point != rhs.base_point {
            return Err(JetError::BasePointMismatch {
                expected: self.base_point,
                got: rhs.base_point,
            });
        }
        if self.order() != rhs.order() {
            return Err(JetError::Domain {
                op,
                detail: format!(
                    "order mismatch: {} versus {}",
                    self.order(),
                    rhs.order()
                ),
            });
        }
        Ok(())
    }

    /// Pointwise sum.
    pub fn add(&self, rhs: &Jet) -> Result<Jet, JetError> {
        self.binary_check(rhs, "add")?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet {
            base_point: self.base_point,
            coeffs,
        })
    }

    /// Pointwise difference.
    pub fn sub(&self, rhs: &Jet) -> Result<Jet, JetError> {
        self.binary_check(rhs, "sub")?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Jet {
            base_point: self.base_point,
            coeffs,
        })
    }

    /// Negation.
    pub fn neg(&self) -> Jet {
        Jet {
            base_point: self.base_point,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    /// Multiplication by a complex scalar.
    pub fn scale(&self, s: Complex64) -> Jet {
        Jet {
            base_point: self.base_point,
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, rhs: &Jet) -> Result<Jet, JetError> {
        self.binary_check(rhs, "mul")?;
        let p = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); p + 1];
        for k in 0..=p {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..=k {
                acc += self.coeffs[j] * rhs.coeffs[k - j];
            }
            coeffs[k] = acc;
        }
        Ok(Jet {
            base_point: self.base_point,
            coeffs,
        })
    }

    /// Reciprocal `1/f`. Fails when `|f(x₀)|` underflows.
    ///
    /// Recurrence: with `r₀ = 1/a₀`,
    /// `r_k = −(1/a₀)·Σ_{j=1..k} a_j r_{k−j}`.
    pub fn recip(&self) -> Result<Jet, JetError> {
        let a0 = self.coeffs[0];
        if a0.norm() < 1e-300 {
            return Err(JetError::Domain {
                op: "recip",
                detail: format!("value at base point is too small: |a0| = {:e}", a0.norm()),
            });
        }
        let p = self.order();
        let inv0 = Complex64::new(1.0, 0.0) / a0;
        let mut r = vec![Complex64::new(0.0, 0.0); p + 1];
        r[0] = inv0;
        for k in 1..=p {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * r[k - j];
            }
            r[k] = -inv0 * acc;
        }
        Ok(Jet {
            base_point: self.base_point,
            coeffs: r,
        })
    }

    /// Quotient `f/g`.
    pub fn div(&self, rhs: &Jet) -> Result<Jet, JetError> {
        self.binary_check(rhs, "div")?;
        self.mul(&rhs.recip()?)
    }

    /// Integer power by repeated squaring (exact for polynomial jets).
    pub fn powi(&self, n: u32) -> Result<Jet, JetError> {
        let mut result = Jet::constant(Complex64::new(1.0, 0.0), self.base_point, self.order())?;
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Real power `f^α` for a jet with real positive value at the base point.
    ///
    /// Recurrence: with `p₀ = a₀^α`,
    /// `k·a₀·p_k = Σ_{j=1..k} (α·j − (k−j))·a_j·p_{k−j}`.
    pub fn powf(&self, alpha: f64) -> Result<Jet, JetError> {
        let a0 = self.coeffs[0];
        if a0.im.abs() > 1e-12 * (1.0 + a0.re.abs()) || a0.re <= 0.0 {
            return Err(JetError::Domain {
                op: "powf",
                detail: format!("base value {a0} is not real positive"),
            });
        }
        let p = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); p + 1];
        out[0] = Complex64::new(a0.re.powf(alpha), 0.0);
        let inv0 = Complex64::new(1.0, 0.0) / a0;
        for k in 1..=p {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                let w = alpha * (j as f64) - ((k - j) as f64);
                acc += self.coeffs[j] * out[k - j] * w;
            }
            out[k] = acc * inv0 / (k as f64);
        }
        Ok(Jet {
            base_point: self.base_point,
            coeffs: out,
        })
    }

    /// Square root of a real-positive-valued jet.
    pub fn sqrt(&self) -> Result<Jet, JetError> {
        self.powf(0.5)
    }

    /// Cube root of a real-positive-valued jet.
    pub fn cbrt(&self) -> Result<Jet, JetError> {
        self.powf(1.0 / 3.0)
    }

    /// Exponential `exp(f)`.
    ///
    /// Recurrence: with `E₀ = exp(a₀)`,
    /// `k·E_k = Σ_{j=1..k} j·a_j·E_{k−j}`.
    pub fn exp(&self) -> Jet {
        let p = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); p + 1];
        out[0] = self.coeffs[0].exp();
        for k in 1..=p {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j] * (j as f64);
            }
            out[k] = acc / (k as f64);
        }
        Jet {
            base_point: self.base_point,
            coeffs: out,
        }
    }

    /// Simultaneous `(sin f, cos f)`.
    ///
    /// Coupled recurrences from `s′ = f′·c`, `c′ = −f′·s`:
    /// `k·s_k = Σ j·a_j·c_{k−j}`, `k·c_k = −Σ j·a_j·s_{k−j}`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let p = self.order();
        let mut s = vec![Complex64::new(0.0, 0.0); p + 1];
        let mut c = vec![Complex64::new(0.0, 0.0); p + 1];
        s[0] = self.coeffs[0].sin();
        c[0] = self.coeffs[0].cos();
        for k in 1..=p {
            let mut acc_s = Complex64::new(0.0, 0.0);
            let mut acc_c = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                let aj = self.coeffs[j] * (j as f64);
                acc_s += aj * c[k - j];
                acc_c += aj * s[k - j];
            }
            s[k] = acc_s / (k as f64);
            c[k] = -acc_c / (k as f64);
        }
        (
            Jet {
                base_point: self.base_point,
                coeffs: s,
            },
            Jet {
                base_point: self.base_point,
                coeffs: c,
            },
        )
    }

    /// Sine.
    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    /// Cosine.
    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    /// Simultaneous `(sinh f, cosh f)` via the same coupled recurrences with
    /// both signs positive.
    pub fn sinh_cosh(&self) -> (Jet, Jet) {
        let p = self.order();
        let mut s = vec![Complex64::new(0.0, 0.0); p + 1];
        let mut c = vec![Complex64::new(0.0, 0.0); p + 1];
        s[0] = self.coeffs[0].sinh();
        c[0] = self.coeffs[0].cosh();
        for k in 1..=p {
            let mut acc_s = Complex64::new(0.0, 0.0);
            let mut acc_c = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                let aj = self.coeffs[j] * (j as f64);
                acc_s += aj * c[k - j];
                acc_c += aj * s[k - j];
            }
            s[k] = acc_s / (k as f64);
            c[k] = acc_c / (k as f64);
        }
        (
            Jet {
                base_point: self.base_point,
                coeffs: s,
            },
            Jet {
                base_point: self.base_point,
                coeffs: c,
            },
        )
    }

    /// Hyperbolic sine.
    pub fn sinh(&self) -> Jet {
        self.sinh_cosh().0
    }

    /// Hyperbolic cosine.
    pub fn cosh(&self) -> Jet {
        self.sinh_cosh().1
    }
}

/// Composition `(outer ∘ inner)` of Taylor expansions.
///
/// `outer` must be expanded at the *value* of `inner` (its constant
/// coefficient, which must be real up to rounding); the result is expanded at
/// `inner`'s base point with the common truncation order. Evaluation is a
/// Horner sweep over the zero-constant part of `inner`, O(p³) overall.
pub fn jet_compose(outer: &Jet, inner: &Jet) -> Result<Jet, JetError> {
    if outer.order() != inner.order() {
        return Err(JetError::Domain {
            op: "jet_compose",
            detail: format!(
                "order mismatch: outer {} versus inner {}",
                outer.order(),
                inner.order()
            ),
        });
    }
    let v = inner.value();
    let scale = 1.0 + outer.base_point().abs() + v.norm();
    if v.im.abs() > 1e-10 * scale || (v.re - outer.base_point()).abs() > 1e-10 * scale {
        return Err(JetError::BasePointMismatch {
            expected: outer.base_point(),
            got: v.re,
        });
    }
    let p = inner.order();
    // δ = inner − value(inner): zero constant term.
    let mut delta = inner.clone();
    delta.coeffs[0] = Complex64::new(0.0, 0.0);
    let mut result = Jet::constant(outer.coeff(p), inner.base_point(), p)?;
    for k in (0..p).rev() {
        result = result.mul(&delta)?;
        result.coeffs[0] += outer.coeff(k);
    }
    Ok(result)
}

/// Evaluate a jet of `builder` at `point` with the given truncation order.
///
/// `builder` receives the identity jet `x` at `point` and assembles the
/// function from jet primitives; this is the generic entry point used by the
/// function catalog and by tests that need ad-hoc functions.
pub fn jet_eval<F>(builder: F, point: f64, order: usize) -> Result<Jet, JetError>
where
    F: Fn(&Jet) -> Result<Jet, JetError>,
{
    let x = Jet::variable(point, order)?;
    builder(&x)
}
