//! Exact exponential-sum arithmetic: complete Kloosterman sums, Ramanujan
//! sums, the dual-sum rearrangement identity that links them, and empirical
//! bound sweeps.
//!
//! Everything is direct O(c) summation over residue representatives
//! `0..c−1`, with modular inverses from the extended Euclidean algorithm —
//! correctness over speed at desk scale.  The starred sums `Σ*` run over
//! residues coprime to the modulus (which for modulus 1 is the single
//! residue 0).

use crate::report::ArithRow;
use crate::{e_unit, Neumaier};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("modulus must be a positive integer")]
    InvalidModulus,
    #[error("{n1} does not divide {cm}")]
    Divisibility { n1: u64, cm: u64 },
    #[error("sum should be real; imaginary part {imag:e} exceeds the check threshold")]
    NotReal { imag: f64 },
    #[error("sum should be an integer; got {value}")]
    NotInteger { value: f64 },
    #[error("domain error: {0}")]
    Domain(String),
}

/// Non-negative greatest common divisor.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Inverse of `a` modulo `modulus` (extended Euclid), as a representative in
/// `0..modulus`.  `None` when `gcd(a, modulus) ≠ 1`.  Modulo 1 every residue
/// is 0 and is its own inverse.
pub fn mod_inverse(a: i64, modulus: u64) -> Option<u64> {
    if modulus == 0 {
        return None;
    }
    if modulus == 1 {
        return Some(0);
    }
    let m = modulus as i128;
    let mut r0 = m;
    let mut r1 = (a as i128).rem_euclid(m);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m) as u64)
}

/// Euler's totient, by trial-division factorization.
pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut n = n;
    let mut phi = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            phi -= phi / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// Möbius function, by trial-division factorization.
pub fn moebius(n: u64) -> i64 {
    if n == 0 {
        return 0;
    }
    let mut n = n;
    let mut factors = 0;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            factors += 1;
        }
        p += 1;
    }
    if n > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of divisors of `n`.
pub fn divisor_count(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut n = n;
    let mut count = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            count *= e + 1;
        }
        p += 1;
    }
    if n > 1 {
        count *= 2;
    }
    count
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Complex value of the complete sum `Σ*_{d mod c} e((da + d̄b)/c)` before
/// the realness check; shared by [`kloosterman`] and the identity sweeps.
fn kloosterman_complex(a: i64, b: i64, c: u64) -> Result<Complex64, ArithError> {
    if c == 0 {
        return Err(ArithError::InvalidModulus);
    }
    if c == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // Reduce the arguments first: periodicity in both arguments is then
    // exact, bit for bit.
    let ar = (a as i128).rem_euclid(c as i128) as u128;
    let br = (b as i128).rem_euclid(c as i128) as u128;
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for d in 1..c {
        let Some(dbar) = mod_inverse(d as i64, c) else {
            continue;
        };
        let num = (d as u128 * ar + dbar as u128 * br) % c as u128;
        let z = e_unit(num as f64 / c as f64);
        re.add(z.re);
        im.add(z.im);
    }
    Ok(Complex64::new(re.total(), im.total()))
}

/// Kloosterman sum `S(a, b; c) = Σ_{d d̄ ≡ 1 (c)} e((da + d̄b)/c)`.
///
/// The sum is real (the substitution `d ↔ d̄` conjugates every term); the
/// imaginary part of the accumulated value is checked against `1e−9·(1+|S|)`
/// and then discarded.
pub fn kloosterman(a: i64, b: i64, c: u64) -> Result<f64, ArithError> {
    let s = kloosterman_complex(a, b, c)?;
    if s.im.abs() >= 1e-9 * (1.0 + s.re.abs()) {
        return Err(ArithError::NotReal { imag: s.im });
    }
    Ok(s.re)
}

/// Ramanujan sum `S(0, a; c) = Σ*_{v mod c} e(av/c)`.
///
/// The value is an integer (it equals `Σ_{d | (a,c)} d·μ(c/d)`); this is
/// asserted to `1e−9` and the rounded value returned.
pub fn ramanujan(a: i64, c: u64) -> Result<f64, ArithError> {
    let s = kloosterman(0, a, c)?;
    let rounded = s.round();
    if (s - rounded).abs() >= 1e-9 {
        return Err(ArithError::NotInteger { value: s });
    }
    Ok(rounded)
}

/// Both sides of the dual-sum identity, their difference, and the verdict.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `|LHS − RHS| / (1 + |LHS|)`.
    pub ratio: f64,
    pub pass: bool,
}

fn require_divides(n1: u64, m: u64, c: u64) -> Result<u64, ArithError> {
    if n1 == 0 || m == 0 || c == 0 {
        return Err(ArithError::InvalidModulus);
    }
    let cm = c
        .checked_mul(m)
        .ok_or_else(|| ArithError::Domain("c·m overflows".into()))?;
    if cm % n1 != 0 {
        return Err(ArithError::Divisibility { n1, cm });
    }
    Ok(cm / n1)
}

/// Verify the rearrangement identity
///
/// ```text
///   Σ*_{d mod c} e(d/c)·S(md, n₂; q)  =  Σ*_{u mod q} S(0, 1+u·n₁; c)·e(n₂ū/q),
///      q = mc/n₁,   u·ū ≡ 1 (mod q),
/// ```
///
/// by brute-force evaluation of both sides.  Requires `n₁ | c·m`.
pub fn dual_sum_identity_check(
    m: u64,
    c: u64,
    n1: u64,
    n2: i64,
) -> Result<IdentityCheck, ArithError> {
    let q = require_divides(n1, m, c)?;

    let mut lhs = Complex64::new(0.0, 0.0);
    for d in 0..c {
        if gcd(d as i64, c as i64) != 1 {
            continue;
        }
        let md = ((m as u128 * d as u128) % q as u128) as i64;
        let s = kloosterman(md, n2, q)?;
        lhs += s * e_unit(d as f64 / c as f64);
    }

    let mut rhs = Complex64::new(0.0, 0.0);
    for u in 0..q {
        let Some(ubar) = mod_inverse(u as i64, q) else {
            continue;
        };
        let arg = 1i128 + u as i128 * n1 as i128;
        let s = ramanujan((arg.rem_euclid(c as i128)) as i64, c)?;
        let num = (n2 as i128 * ubar as i128).rem_euclid(q as i128);
        rhs += s * e_unit(num as f64 / q as f64);
    }

    let ratio = (lhs - rhs).norm() / (1.0 + lhs.norm());
    Ok(IdentityCheck {
        lhs,
        rhs,
        ratio,
        pass: ratio < 1e-9,
    })
}

/// Outcome of a bound sweep: the worst ratio observed and where.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub max_ratio: f64,
    /// Parameters attaining the maximum, as `(m, c, n1, n2)` for the savings
    /// sweep or `(a, b, c, 0)` for the Weil sweep.
    pub worst: (u64, u64, u64, i64),
    pub threshold: f64,
    pub pass: bool,
}

/// Check the savings estimate: the dual sum's magnitude, normalized by
/// `m·c^{1+ε}/n₁`, stays below a recorded constant (default 2) over the
/// given `n₂` range.
pub fn savings_bound_check(
    m: u64,
    c: u64,
    n1: u64,
    n2_range: &[i64],
    eps: f64,
) -> Result<BoundReport, ArithError> {
    if eps <= 0.0 {
        return Err(ArithError::Domain("eps must be positive".into()));
    }
    require_divides(n1, m, c)?;
    let denom = m as f64 * (c as f64).powf(1.0 + eps);
    let mut report = BoundReport {
        max_ratio: 0.0,
        worst: (m, c, n1, 0),
        threshold: 2.0,
        pass: true,
    };
    for &n2 in n2_range {
        let check = dual_sum_identity_check(m, c, n1, n2)?;
        let ratio = check.lhs.norm() * n1 as f64 / denom;
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.worst = (m, c, n1, n2);
        }
    }
    report.pass = report.max_ratio <= report.threshold;
    Ok(report)
}

/// Verify `|S(a, b; c)| ≤ d(c)·√gcd(a,b,c)·√c` for all `a, b ≤ ab_max` and
/// `c ≤ c_max` (desk scale: `c_max ≤ 1000`), reporting the worst ratio.
pub fn weil_check(c_max: u64, ab_max: u64) -> Result<BoundReport, ArithError> {
    if c_max == 0 || c_max > 1000 {
        return Err(ArithError::Domain(format!(
            "c_max must be in 1..=1000, got {c_max}"
        )));
    }
    let per_c: Vec<BoundReport> = (1..=c_max)
        .into_par_iter()
        .map(|c| {
            let mut worst = BoundReport {
                max_ratio: 0.0,
                worst: (0, 0, c, 0),
                threshold: 1.0 + 1e-9,
                pass: true,
            };
            for a in 0..=ab_max {
                for b in a..=ab_max {
                    let s = kloosterman(a as i64, b as i64, c)?;
                    let g = gcd(gcd(a as i64, b as i64), c as i64) as f64;
                    let bound = divisor_count(c) as f64 * g.sqrt() * (c as f64).sqrt();
                    let ratio = s.abs() / bound;
                    if ratio > worst.max_ratio {
                        worst.max_ratio = ratio;
                        worst.worst = (a, b, c, 0);
                    }
                }
            }
            Ok(worst)
        })
        .collect::<Result<_, ArithError>>()?;
    let mut report = BoundReport {
        max_ratio: 0.0,
        worst: (0, 0, 1, 0),
        threshold: 1.0 + 1e-9,
        pass: true,
    };
    for w in per_c {
        if w.max_ratio > report.max_ratio {
            report.max_ratio = w.max_ratio;
            report.worst = w.worst;
        }
    }
    report.pass = report.max_ratio <= report.threshold;
    Ok(report)
}

/// Run the identity check over the full desk-scale grid
/// `m ≤ m_max, c ≤ c_max, n₁ | c·m, 0 ≤ n₂ ≤ n2_max`, in parallel over
/// `(m, c)` pairs.  Row order is deterministic: lexicographic in
/// `(m, c, n1, n2)`.
pub fn identity_sweep(m_max: u64, c_max: u64, n2_max: u64) -> Result<Vec<ArithRow>, ArithError> {
    let pairs: Vec<(u64, u64)> = (1..=m_max)
        .flat_map(|m| (1..=c_max).map(move |c| (m, c)))
        .collect();
    let nested: Vec<Vec<ArithRow>> = pairs
        .par_iter()
        .map(|&(m, c)| {
            let mut rows = Vec::new();
            for n1 in divisors(m * c) {
                for n2 in 0..=n2_max {
                    let check = dual_sum_identity_check(m, c, n1, n2 as i64)?;
                    rows.push(ArithRow {
                        m,
                        c,
                        n1,
                        n2,
                        lhs: check.lhs.norm(),
                        rhs: check.rhs.norm(),
                        ratio: check.ratio,
                        pass: check.pass,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_, ArithError>>()?;
    Ok(nested.into_iter().flatten().collect())
}
