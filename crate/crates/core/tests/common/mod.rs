//! Test-only oracles and random instance generators.

#![allow(dead_code)]

use rand::Rng;
use rswap_core::{DiscountCurve, HazardCurve};

/// Adaptive trapezoid rule. An interval is split while the two-panel
/// estimate differs from the one-panel estimate by more than its share of
/// `tol`; intervals shorter than `min_width` are accepted as they are,
/// which bounds the work spent on jump discontinuities.
pub fn adaptive_trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    const MIN_WIDTH: f64 = 1e-11;
    if b <= a {
        return 0.0;
    }
    let total_width = b - a;
    let mut stack = vec![(a, b, f(a), f(b))];
    let mut sum = 0.0;
    while let Some((lo, hi, f_lo, f_hi)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        let coarse = 0.5 * (hi - lo) * (f_lo + f_hi);
        let fine = 0.25 * (hi - lo) * (f_lo + 2.0 * f_mid + f_hi);
        let budget = tol * (hi - lo) / total_width;
        if (fine - coarse).abs() <= budget || hi - lo < MIN_WIDTH {
            // error of `fine` is about a third of the difference
            sum += fine;
        } else {
            stack.push((lo, mid, f_lo, f_mid));
            stack.push((mid, hi, f_mid, f_hi));
        }
    }
    sum
}

/// `(∫ Z Q, ∫ Z h Q)` over `[0, t]` from pointwise curve evaluations.
pub fn trapezoid_legs(dc: &DiscountCurve, hc: &HazardCurve, t: f64, tol: f64) -> (f64, f64) {
    let zq = |u: f64| dc.discount_factor(u).unwrap() * hc.survival_probability(u).unwrap();
    let annuity = adaptive_trapezoid(zq, 0.0, t, tol);
    let protection = adaptive_trapezoid(|u| hc.hazard_at(u).unwrap() * zq(u), 0.0, t, tol);
    (annuity, protection)
}

/// Discount curve with 1–6 pillars and forwards in `[0, 12%]`.
pub fn random_discount_curve<R: Rng>(rng: &mut R, horizon: f64) -> DiscountCurve {
    let n = rng.random_range(1..=6);
    let mut times: Vec<f64> = (0..n - 1)
        .map(|_| rng.random_range(0.05..horizon))
        .collect();
    times.push(horizon);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut df = 1.0f64;
    let mut prev = 0.0;
    let pillars = times
        .into_iter()
        .map(|t| {
            df *= (-rng.random_range(0.0..0.12) * (t - prev)).exp();
            prev = t;
            (t, df)
        })
        .collect();
    DiscountCurve::new(pillars).unwrap()
}

/// Hazard curve with 1–6 segments and hazards in `[0, 30%]`.
pub fn random_hazard_curve<R: Rng>(rng: &mut R, horizon: f64) -> HazardCurve {
    let n = rng.random_range(1..=6);
    let mut ends: Vec<f64> = (0..n - 1)
        .map(|_| rng.random_range(0.05..horizon))
        .collect();
    ends.push(horizon);
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    HazardCurve::new(
        ends.into_iter()
            .map(|e| (e, rng.random_range(0.0..0.3)))
            .collect(),
    )
    .unwrap()
}
