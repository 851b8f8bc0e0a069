//! Stationary-phase expansion to arbitrary order.
//!
//! For `∫ g(y)·e(f(y)) dy` with a single interior stationary point `γ`
//! (`f'(γ) = 0`, `f''(γ) ≠ 0`), write `λ_j = f^{(j)}(γ)/j!` and
//! `η_ℓ = g^{(ℓ)}(γ)/ℓ!`.  The local amplitude
//!
//! ```text
//! G(h) = g(γ+h) · exp(2πi Σ_{k≥3} λ_k h^k),   truncated at degree 2n,
//! ```
//!
//! has coefficients `ϖ_m`, and the stationary contribution is the Gaussian
//! moment sum
//!
//! ```text
//! e(f(γ) + s/8)/√(2|λ₂|) · Σ_{j=0}^{n} ϖ_{2j} · (2j−1)!! · (−1)^j / (4πi λ₂)^j,
//! ```
//!
//! with `s = sign(λ₂)`; the signed `λ₂` in the denominator makes the same
//! formula cover both orientations (the `λ₂ < 0` case is the complex
//! conjugate of its reflection).  Boundary kernels `H_1, …, H_{n+1}` from
//! [`crate::fdt::h_terms`] complete the expansion, and a four-part error
//! bound accompanies the value.

use crate::catalog::{Scenario, WeightSpec};
use crate::fdt::{
    h_terms, Diagnostics, ExpandError, ExpansionResult, HEURISTIC_CONSTANT, MAX_EXPANSION_ORDER,
};
use crate::jets::Jet;
use crate::stationary::{
    classify, estimate_parameters, hypothesis_check, Interval, PhaseClassification, DEFAULT_GRID,
};
use crate::{double_factorial_odd, e_unit};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Normalized derivative data of one phase/weight pair at a stationary point.
#[derive(Debug, Clone)]
pub struct VarpiTable {
    pub gamma: f64,
    pub n: usize,
    /// `λ_j = f^{(j)}(γ)/j!` for `j = 0..=2n+2`.
    pub lambda: Vec<f64>,
    /// `η_ℓ = g^{(ℓ)}(γ)/ℓ!` for `ℓ = 0..=2n`.
    pub eta: Vec<Complex64>,
    /// Coefficients `ϖ_m` of the local amplitude, `m = 0..=2n`.
    pub varpi: Vec<Complex64>,
}

/// Compute the `ϖ` table from jets of `f` (order ≥ 2n+2) and `g`
/// (order ≥ 2n) at the stationary point.
pub fn varpi_coefficients(f_jet: &Jet, g_jet: &Jet, n: usize) -> Result<VarpiTable, ExpandError> {
    if f_jet.order() < 2 * n + 2 {
        return Err(ExpandError::OrderOutOfRange {
            requested: 2 * n + 2,
            max: f_jet.order(),
        });
    }
    if g_jet.order() < 2 * n {
        return Err(ExpandError::OrderOutOfRange {
            requested: 2 * n,
            max: g_jet.order(),
        });
    }
    let gamma = f_jet.base_point();
    if (g_jet.base_point() - gamma).abs() > 1e-9 * (1.0 + gamma.abs()) {
        return Err(ExpandError::Degenerate(format!(
            "phase and weight jets expanded at different points ({} vs {})",
            gamma,
            g_jet.base_point()
        )));
    }
    let lambda: Vec<f64> = (0..=2 * n + 2).map(|k| f_jet.coeff(k).re).collect();
    let max_lam = lambda[2..]
        .iter()
        .map(|l| l.abs())
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    if lambda[1].abs() > 1e-9 * (1.0 + gamma.abs()) * max_lam {
        return Err(ExpandError::NotStationary {
            at: gamma,
            f1: lambda[1],
        });
    }
    if lambda[2].abs() <= 1e-12 * max_lam {
        return Err(ExpandError::DegenerateSecondDerivative {
            at: gamma,
            f2: 2.0 * lambda[2],
        });
    }
    let eta: Vec<Complex64> = (0..=2 * n).map(|l| g_jet.coeff(l)).collect();

    // Local amplitude in the offset variable h, truncated at degree 2n:
    // terms λ_k h^k with k > 2n cannot reach degree ≤ 2n.
    let mut p_coeffs = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for (k, c) in p_coeffs.iter_mut().enumerate().take(2 * n + 1).skip(3) {
        *c = Complex64::new(0.0, 2.0 * PI) * lambda[k];
    }
    let p = Jet::from_coeffs(0.0, p_coeffs)?;
    let g_local = Jet::from_coeffs(0.0, eta.clone())?;
    let big_g = g_local.mul(&p.exp())?;
    let varpi: Vec<Complex64> = (0..=2 * n).map(|m| big_g.coeff(m)).collect();

    Ok(VarpiTable {
        gamma,
        n,
        lambda,
        eta,
        varpi,
    })
}

/// Stationary contribution through order `n`, as the total and its per-`j`
/// corrections (`j = 0..=n`).
pub fn wsp_main_term(table: &VarpiTable) -> (Complex64, Vec<Complex64>) {
    let lam2 = table.lambda[2];
    let s = lam2.signum();
    let prefactor = e_unit(table.lambda[0] + s / 8.0) / (2.0 * lam2.abs()).sqrt();
    // Ratio of successive even Gaussian moments: (−1)/(4πi λ₂) per step,
    // with the double factorial applied per term.
    let step = Complex64::new(-1.0, 0.0) / Complex64::new(0.0, 4.0 * PI * lam2);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut per_order = Vec::with_capacity(table.n + 1);
    for j in 0..=table.n {
        let term = table.varpi[2 * j] * double_factorial_odd(j as u32) * pow;
        per_order.push(prefactor * term);
        pow *= step;
    }
    let main = per_order.iter().sum();
    (main, per_order)
}

/// Four-part error bound for the order-`n` stationary expansion.
fn stationary_error_bound(
    t: f64,
    m: f64,
    u: f64,
    nn: f64,
    gap_a: f64,
    gap_b: f64,
    n: usize,
) -> f64 {
    let ni = n as i32;
    let o1 = u * m.powi(2 * ni + 5) / (t.powi(ni + 2) * nn.powi(ni + 2))
        * (gap_a.powi(-(ni + 2)) + gap_b.powi(-(ni + 2)));
    let o2 = u * m.powi(2 * ni + 4) / t.powi(ni + 2)
        * (gap_a.powi(-(2 * ni + 3)) + gap_b.powi(-(2 * ni + 3)));
    let o3 = u * m.powi(2 * ni + 4) / (t.powi(ni + 2) * nn.powi(2 * ni))
        * (gap_a.powi(-3) + gap_b.powi(-3));
    let o4 = u / t.powi(ni + 1) * (m.powi(2 * ni + 2) / nn.powi(2 * ni + 1) + m);
    HEURISTIC_CONSTANT * (o1 + o2 + o3 + o4)
}

/// Order-`n` stationary-phase expansion of `∫ g e(f)` over the scenario
/// interval.
///
/// The phase must have exactly one interior stationary point.  The smallness
/// hypothesis is checked and reported in the diagnostics; when it fails the
/// value and bound are still computed and the run is flagged unchecked.
pub fn wsp_evaluate(sc: &Scenario, n: usize) -> Result<ExpansionResult, ExpandError> {
    if n > MAX_EXPANSION_ORDER {
        return Err(ExpandError::OrderOutOfRange {
            requested: n,
            max: MAX_EXPANSION_ORDER,
        });
    }
    let iv = Interval::new(sc.interval.0, sc.interval.1)?;
    let gamma = match classify(&sc.phase, iv, DEFAULT_GRID)? {
        PhaseClassification::SingleInteriorStationary { gamma, .. } => gamma,
        PhaseClassification::MonotoneNoStationary { min_abs_f1, .. } => {
            return Err(ExpandError::NotStationary {
                at: iv.midpoint(),
                f1: min_abs_f1,
            });
        }
        PhaseClassification::Degenerate { detail } => {
            return Err(ExpandError::Degenerate(detail));
        }
    };
    let gap_a = gamma - iv.a;
    let gap_b = iv.b - gamma;
    let distance = gap_a.min(gap_b);
    if distance <= 1e-9 * iv.width() {
        return Err(ExpandError::EndpointStationary { gamma, distance });
    }

    let params = estimate_parameters(&sc.phase, &sc.weight, iv, 2 * n + 3, sc.params.as_ref())?;
    let hyp = hypothesis_check(&params, iv, n);
    let checked = hyp.passes;
    let mut notes = Vec::new();
    if !checked {
        notes.push(format!("hypothesis not verified: {}", hyp.notes));
    }

    let f_jet = sc.phase.jet(gamma, 2 * n + 2)?;
    let g_jet = sc.weight.jet(gamma, 2 * n)?;
    let table = varpi_coefficients(&f_jet, &g_jet, n)?;
    let (main, per_order) = wsp_main_term(&table);

    let h_a = h_terms(&sc.phase, &sc.weight, iv.a, n + 1)?;
    let h_b = h_terms(&sc.phase, &sc.weight, iv.b, n + 1)?;
    let ea = e_unit(sc.phase.eval(iv.a));
    let eb = e_unit(sc.phase.eval(iv.b));
    let boundary: Complex64 = (0..=n).map(|i| eb * h_b[i] - ea * h_a[i]).sum();

    let error_bound = stationary_error_bound(
        params.t, params.m, params.u, params.n, gap_a, gap_b, n,
    );

    Ok(ExpansionResult {
        main,
        boundary,
        per_order,
        error_bound,
        diagnostics: Diagnostics {
            params,
            hypothesis: Some(hyp),
            checked,
            gamma: Some(gamma),
            notes: notes.join("; "),
        },
    })
}

/// `max |g| + total variation of g`, sampled on a uniform grid.
pub fn weight_variation(
    weight: &WeightSpec,
    iv: Interval,
    samples: usize,
) -> Result<f64, ExpandError> {
    let mut max = 0.0_f64;
    let mut var = 0.0_f64;
    let mut prev: Option<Complex64> = None;
    for i in 0..=samples {
        let x = if i == samples {
            iv.b
        } else {
            iv.a + iv.width() * i as f64 / samples as f64
        };
        let v = weight.eval(x);
        max = max.max(v.norm());
        if let Some(p) = prev {
            var += (v - p).norm();
        }
        prev = Some(v);
    }
    Ok(max + var)
}

/// Crude second-derivative-test bound `4·V/√(min |f''|)` on `|∫ g e(f)|`,
/// where `V` is the weight variation.  Useful as an a-priori magnitude check
/// when no expansion is attempted.
pub fn second_derivative_bound(weight_var: f64, min_f2: f64) -> f64 {
    if min_f2 <= 0.0 {
        return f64::INFINITY;
    }
    4.0 * weight_var / min_f2.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{PhaseSpec, Scenario};

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn varpi_equals_eta_for_pure_quadratic() {
        // Fresnel phase has no cubic or higher terms: the amplitude is g
        // itself.
        let phase = PhaseSpec::Fresnel {
            t: 3.0,
            shift: 0.2,
        };
        let weight = WeightSpec::Bump {
            p: 5,
            a: -1.0,
            b: 1.0,
            amp: 1.3,
        };
        let n = 3;
        let f_jet = phase.jet(0.2, 2 * n + 2).unwrap();
        let g_jet = weight.jet(0.2, 2 * n).unwrap();
        let table = varpi_coefficients(&f_jet, &g_jet, n).unwrap();
        assert_eq!(table.gamma, 0.2);
        for m in 0..=2 * n {
            assert!(
                (table.varpi[m] - table.eta[m]).norm() < 1e-14 * (1.0 + table.eta[m].norm()),
                "m={m}"
            );
        }
        assert!((table.lambda[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn varpi_cubic_reference_values() {
        // λ₃ = 1, all other λ_{k≥3} = 0, g(γ+h) = h:
        // G(h) = h·exp(2πih³) = h + 2πi·h⁴ + … ⇒ ϖ₁ = 1, ϖ₄ = 2πi,
        // everything else through degree 4 vanishes.
        let n = 2;
        let f = Jet::from_coeffs(
            0.0,
            vec![
                cx(0.0, 0.0),
                cx(0.0, 0.0),
                cx(1.0, 0.0),
                cx(1.0, 0.0),
                cx(0.0, 0.0),
                cx(0.0, 0.0),
                cx(0.0, 0.0),
            ],
        )
        .unwrap();
        let g = Jet::from_coeffs(
            0.0,
            vec![cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)],
        )
        .unwrap();
        let table = varpi_coefficients(&f, &g, n).unwrap();
        let expect = [
            cx(0.0, 0.0),
            cx(1.0, 0.0),
            cx(0.0, 0.0),
            cx(0.0, 0.0),
            cx(0.0, 2.0 * PI),
        ];
        for (m, e) in expect.iter().enumerate() {
            assert!(
                (table.varpi[m] - e).norm() < 1e-15,
                "m={m}: {} vs {e}",
                table.varpi[m]
            );
        }
    }

    #[test]
    fn varpi_rejects_bad_jets() {
        let f_moving = Jet::from_coeffs(
            0.0,
            vec![cx(0.0, 0.0), cx(0.5, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)],
        )
        .unwrap();
        let g = Jet::from_coeffs(0.0, vec![cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)]).unwrap();
        match varpi_coefficients(&f_moving, &g, 1) {
            Err(ExpandError::NotStationary { f1, .. }) => assert_eq!(f1, 0.5),
            other => panic!("expected NotStationary, got {other:?}"),
        }
        let f_flat = Jet::from_coeffs(
            0.0,
            vec![cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)],
        )
        .unwrap();
        match varpi_coefficients(&f_flat, &g, 1) {
            Err(ExpandError::DegenerateSecondDerivative { f2, .. }) => assert_eq!(f2, 0.0),
            other => panic!("expected DegenerateSecondDerivative, got {other:?}"),
        }
        // Insufficient jet order.
        let f_short = Jet::from_coeffs(0.0, vec![cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]).unwrap();
        assert!(matches!(
            varpi_coefficients(&f_short, &g, 1),
            Err(ExpandError::OrderOutOfRange { .. })
        ));
    }

    #[test]
    fn fresnel_leading_term_reference() {
        // ∫ e(T y²) with weight 1: leading term e(1/8)/√(2T).
        let t = 50.0;
        let scenario = Scenario::new(
            "fresnel",
            PhaseSpec::Fresnel { t, shift: 0.0 },
            WeightSpec::One { amp: 1.0 },
            (-1.0, 1.0),
        );
        let r = wsp_evaluate(&scenario, 0).unwrap();
        let expect = e_unit(0.125) / (2.0 * t).sqrt();
        assert!(
            (r.main - expect).norm() < 1e-12 * expect.norm(),
            "main = {}, expect = {expect}",
            r.main
        );
        assert_eq!(r.per_order.len(), 1);
        assert_eq!(r.diagnostics.gamma.map(|g| g.abs() < 1e-12), Some(true));
        // Constant weight ⇒ N is huge and the j ≥ 1 corrections vanish: the
        // order-2 main term is unchanged.
        let r2 = wsp_evaluate(&scenario, 2).unwrap();
        assert!((r2.main - expect).norm() < 1e-12 * expect.norm());
        assert!(r2.per_order[1].norm() < 1e-15);
        assert!(r2.per_order[2].norm() < 1e-15);
    }

    #[test]
    fn reflection_gives_complex_conjugate() {
        let mk = |t: f64| {
            Scenario::new(
                "refl",
                PhaseSpec::Fresnel { t, shift: 0.15 },
                WeightSpec::Bump {
                    p: 6,
                    a: -1.0,
                    b: 1.0,
                    amp: 1.0,
                },
                (-1.0, 1.0),
            )
        };
        for n in 0..=2 {
            let plus = wsp_evaluate(&mk(60.0), n).unwrap();
            let minus = wsp_evaluate(&mk(-60.0), n).unwrap();
            let v = plus.value();
            assert!(
                (minus.value() - v.conj()).norm() < 1e-12 * v.norm(),
                "n={n}: {} vs conj {}",
                minus.value(),
                v
            );
            assert!(
                (minus.error_bound - plus.error_bound).abs() < 1e-10 * plus.error_bound
            );
        }
    }

    #[test]
    fn main_term_ignores_phase_coefficients_beyond_declared_order() {
        // Two phases identical through degree 2n+2 but differing at degree
        // 2n+4 produce identical order-n tables and main terms.
        let n = 2;
        let mut base = vec![cx(0.0, 0.0); 2 * n + 7];
        base[2] = cx(1.0, 0.0);
        base[3] = cx(0.3, 0.0);
        base[4] = cx(0.1, 0.0);
        let mut bumped = base.clone();
        bumped[2 * n + 4] = cx(0.7, 0.0);
        let g = Jet::from_coeffs(
            0.0,
            vec![cx(1.0, 0.0); 2 * n + 1],
        )
        .unwrap();
        let fa = Jet::from_coeffs(0.0, base).unwrap();
        let fb = Jet::from_coeffs(0.0, bumped).unwrap();
        let ta = varpi_coefficients(&fa, &g, n).unwrap();
        let tb = varpi_coefficients(&fb, &g, n).unwrap();
        let (ma, _) = wsp_main_term(&ta);
        let (mb, _) = wsp_main_term(&tb);
        assert_eq!(ma, mb);
    }

    #[test]
    fn u2_phase_leading_term_matches_closed_form() {
        // u₂-type phase with x = 2, c = 1: γ = 4, λ₂ = 1/96,
        // u₂(4) = 4 − 3·2 = −2, so the leading term is
        // e(−2 + 1/8)·g(4)·√48.
        let scenario = Scenario::new(
            "u2",
            PhaseSpec::U2 {
                x: 2.0,
                c: 1.0,
                scale: 1.0,
            },
            WeightSpec::Bump {
                p: 6,
                a: 2.0,
                b: 7.0,
                amp: 1.0,
            },
            (1.0, 18.0),
        );
        let r = wsp_evaluate(&scenario, 0).unwrap();
        let g4 = 0.96_f64.powi(6);
        let expect = e_unit(-2.0 + 0.125) * g4 * 48.0_f64.sqrt();
        assert!(
            (r.main - expect).norm() < 1e-9 * expect.norm(),
            "main = {}, expect = {expect}",
            r.main
        );
        // Boundary terms vanish: the weight is supported inside the interval.
        assert_eq!(r.boundary, cx(0.0, 0.0));
    }

    #[test]
    fn rejects_monotone_and_endpoint_stationary() {
        let monotone = Scenario::new(
            "mono",
            PhaseSpec::Fresnel {
                t: 50.0,
                shift: 0.0,
            },
            WeightSpec::One { amp: 1.0 },
            (1.0, 2.0),
        );
        assert!(matches!(
            wsp_evaluate(&monotone, 1),
            Err(ExpandError::NotStationary { .. })
        ));
        let near_edge = Scenario::new(
            "edge",
            PhaseSpec::Fresnel {
                t: 50.0,
                shift: 1.0 + 1e-12,
            },
            WeightSpec::One { amp: 1.0 },
            (1.0, 2.0),
        );
        assert!(matches!(
            wsp_evaluate(&near_edge, 1),
            Err(ExpandError::EndpointStationary { .. })
        ));
        let degenerate = Scenario::new(
            "cubic",
            PhaseSpec::Cubic {
                t: 2.0,
                shift: 0.0,
            },
            WeightSpec::One { amp: 1.0 },
            (-1.0, 1.0),
        );
        assert!(matches!(
            wsp_evaluate(&degenerate, 1),
            Err(ExpandError::Degenerate(_))
        ));
    }

    #[test]
    fn order_cap_enforced_and_order_zero_allowed() {
        let scenario = Scenario::new(
            "cap",
            PhaseSpec::Fresnel {
                t: 40.0,
                shift: 0.0,
            },
            WeightSpec::One { amp: 1.0 },
            (-1.0, 1.0),
        );
        assert!(wsp_evaluate(&scenario, 0).is_ok());
        assert!(matches!(
            wsp_evaluate(&scenario, MAX_EXPANSION_ORDER + 1),
            Err(ExpandError::OrderOutOfRange { .. })
        ));
    }

    #[test]
    fn hypothesis_failure_flags_unchecked_but_still_computes() {
        // Tiny T: the smallness condition T^{1/(2n+3)}Δ > 1 fails, yet the
        // value and bound are produced.
        let scenario = Scenario::new(
            "small-t",
            PhaseSpec::Fresnel {
                t: 0.8,
                shift: 0.0,
            },
            WeightSpec::Bump {
                p: 4,
                a: -1.0,
                b: 1.0,
                amp: 1.0,
            },
            (-1.0, 1.0),
        );
        let r = wsp_evaluate(&scenario, 1).unwrap();
        assert!(!r.diagnostics.checked);
        let hyp = r.diagnostics.hypothesis.as_ref().unwrap();
        assert!(!hyp.passes);
        assert!(r.main.norm() > 0.0);
        assert!(r.error_bound.is_finite());
        assert!(r.diagnostics.notes.contains("hypothesis"));
    }

    #[test]
    fn second_derivative_bound_scales_as_inverse_sqrt() {
        // Sweeping the overall phase scale s multiplies min |f''| by s, so
        // the bound falls like s^{−1/2}.
        let weight = WeightSpec::Qj {
            j: 1,
            n1: 1.0,
            big_n: 1e6,
            big_m: 1.0,
            t: 100.0,
            c: 1.0,
            m: 1.0,
            p: 6,
        };
        let iv = Interval::new(1000.0, 2.0_f64.sqrt() * 1000.0).unwrap();
        let wv = weight_variation(&weight, iv, 2048).unwrap();
        assert!(wv > 0.0);
        let min_f2 = |s: f64| -> f64 {
            let phase = PhaseSpec::V2 {
                x: 1.0,
                t: 100.0,
                c: 1.0,
                m: 1.0,
                n1: 1.0,
                scale: s,
            };
            let mut min = f64::INFINITY;
            for i in 0..=512 {
                let y = iv.a + iv.width() * i as f64 / 512.0;
                let j = phase.jet(y, 2).unwrap();
                min = min.min((2.0 * j.coeff(2).re).abs());
            }
            min
        };
        let bounds: Vec<(f64, f64)> = [1.0, 4.0, 16.0]
            .iter()
            .map(|&s| (s, second_derivative_bound(wv, min_f2(s))))
            .collect();
        let slope = crate::report::StudyTable::fit_slope(&bounds).unwrap();
        assert!((slope + 0.5).abs() < 1e-6, "slope = {slope}");
        assert_eq!(second_derivative_bound(1.0, 0.0), f64::INFINITY);
    }
}
