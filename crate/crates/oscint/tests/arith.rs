//! Number-theoretic cross-checks: the brute-force exponential sums against
//! their classical closed forms and invariances, the dual-sum rearrangement
//! identity on a dense grid, and the desk-scale bound sweeps.

use num_complex::Complex64;
use oscint::arith::{
    divisor_count, divisors, dual_sum_identity_check, euler_phi, gcd, identity_sweep, kloosterman,
    mod_inverse, moebius, ramanujan, savings_bound_check, weil_check, ArithError,
};
use oscint::e_unit;

#[test]
fn small_sums_match_hand_computations() {
    // S(0,0;c) counts the units.
    for c in 1..=50u64 {
        assert_eq!(kloosterman(0, 0, c).unwrap(), euler_phi(c) as f64);
    }
    // S(1,1;2) = e(1) = 1 and S(1,1;3) = e(2/3) + e(4/3) = −1.
    assert!((kloosterman(1, 1, 2).unwrap() - 1.0).abs() <= 1e-12);
    assert!((kloosterman(1, 1, 3).unwrap() + 1.0).abs() <= 1e-12);
    // Modulus 1: the empty product convention, a single residue.
    assert_eq!(kloosterman(5, -3, 1).unwrap(), 1.0);
    assert!(matches!(
        kloosterman(1, 1, 0),
        Err(ArithError::InvalidModulus)
    ));
}

#[test]
fn kloosterman_sums_are_symmetric_and_reduce_to_ab() {
    for c in [4u64, 9, 12, 35] {
        for a in 1..=6i64 {
            for b in 1..=6i64 {
                let sab = kloosterman(a, b, c).unwrap();
                let sba = kloosterman(b, a, c).unwrap();
                assert!(
                    (sab - sba).abs() <= 1e-9,
                    "S({a},{b};{c}) = {sab} but S({b},{a};{c}) = {sba}"
                );
                // For gcd(a, c) = 1 the substitution v ↦ a·v gives
                // S(a, b; c) = S(1, ab; c).
                if gcd(a, c as i64) == 1 {
                    let reduced = kloosterman(1, a * b, c).unwrap();
                    assert!(
                        (sab - reduced).abs() <= 1e-9,
                        "S({a},{b};{c}) = {sab} but S(1,{};{c}) = {reduced}",
                        a * b
                    );
                }
            }
        }
    }
}

#[test]
fn ramanujan_sums_follow_the_divisor_formula() {
    // S(0, a; c) = Σ_{d | gcd(a,c)} d·μ(c/d): two independent routes, one
    // trigonometric and one arithmetic.
    for c in 1..=60u64 {
        for a in 0..=40i64 {
            let brute = ramanujan(a, c).unwrap();
            let g = gcd(a, c as i64) as u64;
            let closed: i64 = divisors(if a == 0 { c } else { g })
                .into_iter()
                .filter(|d| c % d == 0)
                .map(|d| d as i64 * moebius(c / d))
                .sum();
            assert_eq!(
                brute, closed as f64,
                "Ramanujan sum mismatch at a={a}, c={c}"
            );
        }
    }
}

#[test]
fn arithmetic_helpers_agree_with_spot_values() {
    assert_eq!(euler_phi(1), 1);
    assert_eq!(euler_phi(12), 4);
    assert_eq!(euler_phi(97), 96);
    assert_eq!(moebius(1), 1);
    assert_eq!(moebius(12), 0);
    assert_eq!(moebius(30), -1);
    assert_eq!(moebius(35), 1);
    assert_eq!(divisor_count(12), 6);
    assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    assert_eq!(divisors(1), vec![1]);
    assert_eq!(gcd(0, 0), 0);
    assert_eq!(gcd(-12, 18), 6);
    assert_eq!(mod_inverse(3, 7), Some(5));
    assert_eq!(mod_inverse(2, 4), None);
    assert_eq!(mod_inverse(7, 1), Some(0));

    // The unit character is exactly periodic thanks to range reduction.
    assert_eq!(e_unit(1.0), Complex64::new(1.0, 0.0));
    assert!((e_unit(1e15 + 0.25) - Complex64::new(0.0, 1.0)).norm() <= 1e-9);
}

#[test]
fn dual_sum_identity_holds_on_a_dense_grid() {
    // Includes negative n₂, which the CSV sweep does not visit.
    let n2_values: [i64; 5] = [-7, -1, 0, 3, 10];
    let mut checked = 0usize;
    for m in 1..=3u64 {
        for c in 1..=12u64 {
            for n1 in divisors(m * c) {
                for &n2 in &n2_values {
                    let check = dual_sum_identity_check(m, c, n1, n2).unwrap();
                    assert!(
                        check.pass,
                        "identity fails at m={m} c={c} n1={n1} n2={n2}: \
                         lhs={}, rhs={}, ratio={:.3e}",
                        check.lhs, check.rhs, check.ratio
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 300, "grid unexpectedly small: {checked}");
}

#[test]
fn identity_sweeps_are_exhaustive_and_ordered() {
    let rows = identity_sweep(2, 6, 3).unwrap();
    let expected: usize = (1..=2u64)
        .flat_map(|m| (1..=6u64).map(move |c| (m, c)))
        .map(|(m, c)| divisors(m * c).len() * 4)
        .sum();
    assert_eq!(rows.len(), expected);
    for w in rows.windows(2) {
        let key = |r: &oscint::report::ArithRow| (r.m, r.c, r.n1, r.n2);
        assert!(key(&w[0]) < key(&w[1]), "rows out of lexicographic order");
    }
    assert!(rows.iter().all(|r| r.pass));
    assert!(rows.iter().all(|r| r.ratio < 1e-9));
}

#[test]
fn contract_violations_are_rejected() {
    assert!(matches!(
        dual_sum_identity_check(1, 4, 3, 1),
        Err(ArithError::Divisibility { n1: 3, cm: 4 })
    ));
    assert!(matches!(
        dual_sum_identity_check(0, 4, 1, 1),
        Err(ArithError::InvalidModulus)
    ));
    assert!(matches!(
        savings_bound_check(1, 4, 2, &[0, 1], 0.0),
        Err(ArithError::Domain(_))
    ));
    assert!(matches!(weil_check(0, 5), Err(ArithError::Domain(_))));
    assert!(matches!(weil_check(2000, 5), Err(ArithError::Domain(_))));
}

#[test]
fn savings_normalization_stays_below_threshold() {
    let n2: Vec<i64> = (0..=8).collect();
    let report = savings_bound_check(2, 10, 2, &n2, 0.1).unwrap();
    assert_eq!(report.threshold, 2.0);
    assert!(
        report.pass,
        "normalized dual sum {} exceeded {} at {:?}",
        report.max_ratio, report.threshold, report.worst
    );
    assert_eq!((report.worst.0, report.worst.1, report.worst.2), (2, 10, 2));
    assert!(report.max_ratio > 0.0, "sweep should see non-zero sums");
}

#[test]
fn weil_bound_holds_at_desk_scale() {
    let report = weil_check(120, 8).unwrap();
    assert!(
        report.pass,
        "|S(a,b;c)| exceeded d(c)·√gcd(a,b,c)·√c at {:?} (ratio {})",
        report.worst, report.max_ratio
    );
    assert!(report.max_ratio > 0.3, "bound implausibly slack everywhere");
    let (_, _, c, _) = report.worst;
    assert!(c >= 1 && c <= 120);
}
