//! Study tables and their fixed-layout CSV serialization.
//!
//! Column orders are frozen — downstream tooling parses these files — and all
//! floats are written with `{:.17e}`, which round-trips `f64` exactly and
//! keeps reruns byte-identical.

use num_complex::Complex64;

/// One (T, n) cell of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub t: f64,
    pub n: usize,
    pub expansion: Complex64,
    pub oracle: Complex64,
    pub abs_diff: f64,
    pub bound: f64,
    /// `abs_diff / bound` (0 when the bound is zero).
    pub ratio: f64,
    /// Per-`n` fitted slope of `log |diff|` against `log T`; repeated on every
    /// row of that order.
    pub slope: f64,
    /// Set when the oracle or the expansion failed for this cell.
    pub failed: bool,
    /// Short status note ("ok", or the failure reason).
    pub note: String,
}

/// Full convergence study: rows in (T, n) lexicographic order.
#[derive(Debug, Clone, Default)]
pub struct StudyTable {
    pub rows: Vec<StudyRow>,
}

/// One row of a transform comparison sweep (direct integral versus
/// expansion).
#[derive(Debug, Clone, PartialEq)]
pub struct TransformRow {
    pub x: f64,
    pub direct: Complex64,
    pub expansion: Complex64,
    pub abs_diff: f64,
    pub bound: f64,
}

/// One row of an exponential-sum identity sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithRow {
    pub m: u64,
    pub c: u64,
    pub n1: u64,
    pub n2: u64,
    /// Magnitude of the left-hand side.
    pub lhs: f64,
    /// Magnitude of the right-hand side.
    pub rhs: f64,
    /// `|LHS − RHS| / (1 + |LHS|)`.
    pub ratio: f64,
    pub pass: bool,
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

impl StudyTable {
    /// CSV with the fixed column order
    /// `T,n,re_exp,im_exp,re_oracle,im_oracle,abs_diff,bound,ratio,slope`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("T,n,re_exp,im_exp,re_oracle,im_oracle,abs_diff,bound,ratio,slope\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                fmt(r.t),
                r.n,
                fmt(r.expansion.re),
                fmt(r.expansion.im),
                fmt(r.oracle.re),
                fmt(r.oracle.im),
                fmt(r.abs_diff),
                fmt(r.bound),
                fmt(r.ratio),
                fmt(r.slope),
            ));
        }
        out
    }

    /// Least-squares slope of `log|diff|` against `log T` for one order,
    /// using only non-failed rows with positive diff. `None` with fewer than
    /// two usable points.
    pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
        let usable: Vec<(f64, f64)> = points
            .iter()
            .filter(|(t, d)| *t > 0.0 && *d > 0.0)
            .map(|(t, d)| (t.ln(), d.ln()))
            .collect();
        if usable.len() < 2 {
            return None;
        }
        let n = usable.len() as f64;
        let sx: f64 = usable.iter().map(|(x, _)| x).sum();
        let sy: f64 = usable.iter().map(|(_, y)| y).sum();
        let sxx: f64 = usable.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = usable.iter().map(|(x, y)| x * y).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-300 {
            return None;
        }
        Some((n * sxy - sx * sy) / denom)
    }
}

/// CSV with the fixed column order
/// `x,re_direct,im_direct,re_exp,im_exp,abs_diff,bound`.
pub fn transform_csv(rows: &[TransformRow]) -> String {
    let mut out = String::from("x,re_direct,im_direct,re_exp,im_exp,abs_diff,bound\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(r.x),
            fmt(r.direct.re),
            fmt(r.direct.im),
            fmt(r.expansion.re),
            fmt(r.expansion.im),
            fmt(r.abs_diff),
            fmt(r.bound),
        ));
    }
    out
}

/// CSV with the fixed column order `m,c,n1,n2,lhs,rhs,ratio,pass`.
pub fn arith_csv(rows: &[ArithRow]) -> String {
    let mut out = String::from("m,c,n1,n2,lhs,rhs,ratio,pass\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.m,
            r.c,
            r.n1,
            r.n2,
            fmt(r.lhs),
            fmt(r.rhs),
            fmt(r.ratio),
            r.pass,
        ));
    }
    out
}
