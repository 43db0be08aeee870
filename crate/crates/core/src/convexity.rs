//! Fair recovery swap rates when future market recovery is uncertain.
//!
//! Because the mark-to-market of a recovery swap depends on market
//! recovery through `1 / (1 − R)`, the par rate is a spread-weighted
//! average of future recoveries rather than their plain mean:
//!
//! * [`fair_rate_scenarios`] weights recoveries by zero-recovery DDS
//!   spreads `S / (1 − R)` over a discrete joint scenario set;
//! * [`fair_rate_exact`] is the case of spreads independent of recovery,
//!   `1 − 1 / E[1 / (1 − R)]`, under a truncated normal law;
//! * [`fair_rate_approx`] is its small-variance expansion, and
//!   [`convexity_premium`] the excess over the mean, `σ² / (1 − R̄)`.
//!
//! [`par_consistency_residual`] evaluates the par condition that produces
//! the scenario formula, under frozen risky annuities.

use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::calibration::par_cds_spread;
use crate::curves::{leg_integrals, DiscountCurve, HazardCurve};
use crate::error::{Error, Result, RowError};
use crate::quadrature::GaussLegendre;

/// Upper bound on the support of a [`RecoveryDistribution`].
pub const MAX_SUPPORT: f64 = 0.99;
/// Tolerance on the sum of scenario weights.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;
/// Successive quadrature orders must agree to this before
/// [`fair_rate_exact`] accepts a value.
pub const QUADRATURE_TOLERANCE: f64 = 1e-12;
/// Default seed for [`fair_rate_monte_carlo`].
pub const DEFAULT_SEED: u64 = 0x5EED_2003;

const FIRST_ORDER: usize = 16;
const MAX_ORDER: usize = 4096;
// The density is below e^-72 of its peak beyond this many deviations.
const WINDOW_DEVIATIONS: f64 = 12.0;
const DRAWS_PER_STREAM: usize = 1 << 16;

/// Normal law of future market recovery, truncated to `[lo, hi]` and
/// renormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryDistribution {
    pub mean: f64,
    pub stdev: f64,
    pub lo: f64,
    pub hi: f64,
}

impl RecoveryDistribution {
    pub fn new(mean: f64, stdev: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo < hi && hi <= MAX_SUPPORT) {
            return Err(Error::Domain(format!(
                "support [{lo}, {hi}] must satisfy 0 <= lo < hi <= {MAX_SUPPORT}"
            )));
        }
        if !(mean > lo && mean < hi) {
            return Err(Error::Domain(format!("mean {mean} outside ({lo}, {hi})")));
        }
        if !(stdev > 0.0 && stdev.is_finite()) {
            return Err(Error::Domain(format!("stdev {stdev} must be > 0")));
        }
        Ok(Self {
            mean,
            stdev,
            lo,
            hi,
        })
    }

    /// Support `[0, 0.99]`.
    pub fn on_default_support(mean: f64, stdev: f64) -> Result<Self> {
        Self::new(mean, stdev, 0.0, MAX_SUPPORT)
    }

    fn standard(&self) -> Normal {
        Normal::standard()
    }

    // Support clipped to where the density is numerically non-zero.
    fn window(&self) -> (f64, f64) {
        (
            self.lo.max(self.mean - WINDOW_DEVIATIONS * self.stdev),
            self.hi.min(self.mean + WINDOW_DEVIATIONS * self.stdev),
        )
    }
}

/// Result of [`fair_rate_exact`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactFairRate {
    /// `1 − 1 / E[1/(1−R)]`.
    pub rate: f64,
    /// `E[1/(1−R)]` under the truncated law.
    pub mean_inverse_loss: f64,
    /// Mean of the truncated law.
    pub truncated_mean: f64,
    /// Quadrature order at which successive rates agreed.
    pub order: usize,
}

/// Fair recovery swap rate with CDS spreads independent of recovery,
/// by Gauss–Legendre quadrature with order doubling.
pub fn fair_rate_exact(dist: &RecoveryDistribution) -> Result<ExactFairRate> {
    let normal = dist.standard();
    let (a, b) = dist.window();
    let density = |r: f64| normal.pdf((r - dist.mean) / dist.stdev);
    let evaluate = |order: usize| {
        let rule = GaussLegendre::new(order);
        let mass = rule.integrate(a, b, density);
        let inverse_loss = rule.integrate(a, b, |r| density(r) / (1.0 - r));
        let first_moment = rule.integrate(a, b, |r| density(r) * r);
        ExactFairRate {
            rate: 1.0 - mass / inverse_loss,
            mean_inverse_loss: inverse_loss / mass,
            truncated_mean: first_moment / mass,
            order,
        }
    };
    let mut previous = evaluate(FIRST_ORDER);
    let mut order = 2 * FIRST_ORDER;
    while order <= MAX_ORDER {
        let current = evaluate(order);
        if !current.rate.is_finite() {
            break;
        }
        if (current.rate - previous.rate).abs() < QUADRATURE_TOLERANCE {
            return Ok(current);
        }
        previous = current;
        order *= 2;
    }
    Err(Error::Numeric(format!(
        "quadrature for mean {} stdev {} did not converge by order {MAX_ORDER}",
        dist.mean, dist.stdev
    )))
}

/// Both forms of the small-variance expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxFairRate {
    /// `1 − (1 − R̄) / (1 + σ² / (1 − R̄)²)`.
    pub intermediate: f64,
    /// `R̄ + σ² / (1 − R̄)`.
    pub first_order: f64,
}

pub fn fair_rate_approx(mean: f64, stdev: f64) -> Result<ApproxFairRate> {
    check_mean(mean)?;
    let loss = 1.0 - mean;
    let relative_variance = stdev * stdev / (loss * loss);
    Ok(ApproxFairRate {
        intermediate: 1.0 - loss / (1.0 + relative_variance),
        first_order: mean + stdev * stdev / loss,
    })
}

/// `σ² / (1 − R̄)`, the excess of the fair rate over the mean recovery.
pub fn convexity_premium(mean: f64, stdev: f64) -> Result<f64> {
    check_mean(mean)?;
    Ok(stdev * stdev / (1.0 - mean))
}

/// Fair DDS spread including the recovery convexity premium:
/// `S_CDS · (1 − R_DDS) / (1 − R̄) · (1 + σ² / (1 − R̄)²)`.
pub fn fair_dds_spread(s_cds: f64, r_dds: f64, mean: f64, stdev: f64) -> Result<f64> {
    check_mean(mean)?;
    if !(r_dds < 1.0) {
        return Err(Error::Domain(format!(
            "DDS contractual recovery {r_dds} must be < 1"
        )));
    }
    let loss = 1.0 - mean;
    Ok(s_cds * (1.0 - r_dds) / loss * (1.0 + stdev * stdev / (loss * loss)))
}

/// Second derivative of the no-premium DDS spread in mean recovery,
/// relative to the spread: `2 / (1 − R̄)²`.
pub fn dds_gamma(mean: f64) -> Result<f64> {
    check_mean(mean)?;
    let loss = 1.0 - mean;
    Ok(2.0 / (loss * loss))
}

fn check_mean(mean: f64) -> Result<()> {
    if !(mean < 1.0) {
        return Err(Error::Domain(format!("mean recovery {mean} must be < 1")));
    }
    Ok(())
}

/// Monte Carlo estimate of the fair rate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub rate: f64,
    /// Delta-method standard error of `rate`.
    pub std_error: f64,
    pub mean_inverse_loss: f64,
    pub mean_inverse_loss_std_error: f64,
    pub draws: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub draws: usize,
    pub seed: u64,
    /// Spread fixed-size streams across the rayon pool. The estimate is
    /// bit-identical either way.
    pub parallel: bool,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            draws: 1_000_000,
            seed: DEFAULT_SEED,
            parallel: true,
        }
    }
}

/// Inverse-CDF sampling of the truncated law.
///
/// Draws are split into consecutive streams of `2^16`; stream `k` uses
/// ChaCha8 seeded with `seed` on stream id `k`. Per-stream sums are
/// combined in stream order, so the result does not depend on how streams
/// are scheduled.
pub fn fair_rate_monte_carlo(
    dist: &RecoveryDistribution,
    config: MonteCarloConfig,
) -> Result<MonteCarloEstimate> {
    if config.draws < 2 {
        return Err(Error::Domain("Monte Carlo needs at least 2 draws".into()));
    }
    let normal = dist.standard();
    let p_lo = normal.cdf((dist.lo - dist.mean) / dist.stdev);
    let p_hi = normal.cdf((dist.hi - dist.mean) / dist.stdev);
    if !(p_hi > p_lo) {
        return Err(Error::Numeric(
            "truncated law has no probability mass".into(),
        ));
    }
    let streams = config.draws.div_ceil(DRAWS_PER_STREAM);
    let stream_sums = |k: usize| -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(k as u64);
        let n = DRAWS_PER_STREAM.min(config.draws - k * DRAWS_PER_STREAM);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let u: f64 = rng.random();
            let z = normal.inverse_cdf(p_lo + (p_hi - p_lo) * u);
            let r = (dist.mean + dist.stdev * z).clamp(dist.lo, dist.hi);
            let y = 1.0 / (1.0 - r);
            sum += y;
            sum_sq += y * y;
        }
        (sum, sum_sq)
    };
    let per_stream: Vec<(f64, f64)> = if config.parallel {
        (0..streams).into_par_iter().map(stream_sums).collect()
    } else {
        (0..streams).map(stream_sums).collect()
    };
    let (sum, sum_sq) = per_stream
        .iter()
        .fold((0.0, 0.0), |(s, q), &(a, b)| (s + a, q + b));
    let n = config.draws as f64;
    let mean = sum / n;
    let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    let se = (variance / n).sqrt();
    Ok(MonteCarloEstimate {
        rate: 1.0 - 1.0 / mean,
        std_error: se / (mean * mean),
        mean_inverse_loss: mean,
        mean_inverse_loss_std_error: se,
        draws: config.draws,
        seed: config.seed,
    })
}

/// One joint outcome of market recovery and CDS spread at the
/// intermediate date.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub weight: f64,
    pub recovery: f64,
    pub cds_spread: f64,
}

impl Scenario {
    /// `S / (1 − R)`.
    pub fn zero_recovery_dds_spread(&self) -> f64 {
        self.cds_spread / (1.0 - self.recovery)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    scenarios: Vec<Scenario>,
}

impl ScenarioSet {
    pub fn new(scenarios: Vec<Scenario>) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::Domain("scenario set is empty".into()));
        }
        for (i, s) in scenarios.iter().enumerate() {
            if !(s.weight >= 0.0 && s.weight <= 1.0) {
                return Err(Error::Domain(format!(
                    "scenario {i}: weight {} outside [0, 1]",
                    s.weight
                )));
            }
            if !(s.recovery >= 0.0 && s.recovery < 1.0) {
                return Err(Error::Domain(format!(
                    "scenario {i}: recovery {} outside [0, 1)",
                    s.recovery
                )));
            }
            if !(s.cds_spread >= 0.0 && s.cds_spread.is_finite()) {
                return Err(Error::Domain(format!(
                    "scenario {i}: CDS spread {} must be >= 0",
                    s.cds_spread
                )));
            }
        }
        let total: f64 = scenarios.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::Domain(format!(
                "scenario weights sum to {total}, not 1"
            )));
        }
        Ok(Self { scenarios })
    }

    /// Product of independent `(weight, recovery)` and
    /// `(weight, zero-recovery DDS spread)` marginals. The fair rate of
    /// such a set is the plain mean recovery.
    pub fn independent_dds(recoveries: &[(f64, f64)], dds_spreads: &[(f64, f64)]) -> Result<Self> {
        Self::product(recoveries, dds_spreads, |r, d| d * (1.0 - r))
    }

    /// Product of independent `(weight, recovery)` and `(weight, CDS
    /// spread)` marginals. The fair rate of such a set is
    /// `1 − 1 / E[1/(1−R)]` over the recovery marginal.
    pub fn independent_cds(recoveries: &[(f64, f64)], cds_spreads: &[(f64, f64)]) -> Result<Self> {
        Self::product(recoveries, cds_spreads, |_, s| s)
    }

    fn product(
        recoveries: &[(f64, f64)],
        spreads: &[(f64, f64)],
        to_cds: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let scenarios = recoveries
            .iter()
            .flat_map(|&(wr, r)| spreads.iter().map(move |&(ws, s)| (wr * ws, r, s)))
            .map(|(weight, recovery, s)| Scenario {
                weight,
                recovery,
                cds_spread: to_cds(recovery, s),
            })
            .collect();
        Self::new(scenarios)
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    /// Parses the `weight,recovery_pct,cds_spread_bp` format.
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        const HEADER: [&str; 3] = ["weight", "recovery_pct", "cds_spread_bp"];
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(source);
        let header = reader.headers().map_err(|e| {
            Error::Parse(vec![RowError {
                row: 0,
                message: e.to_string(),
            }])
        })?;
        if header.iter().collect::<Vec<_>>() != HEADER {
            return Err(Error::Parse(vec![RowError {
                row: 0,
                message: format!("expected header `{}`", HEADER.join(",")),
            }]));
        }
        let mut scenarios = Vec::new();
        let mut errors = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 1;
            let values: Option<Vec<f64>> = record
                .ok()
                .and_then(|r| (0..3).map(|k| r.get(k)?.parse::<f64>().ok()).collect());
            match values.as_deref() {
                Some(&[weight, pct, bp]) if (0.0..100.0).contains(&pct) => {
                    scenarios.push(Scenario {
                        weight,
                        recovery: pct / 1e2,
                        cds_spread: bp / 1e4,
                    })
                }
                Some(&[_, pct, _]) => errors.push(RowError {
                    row,
                    message: format!("recovery {pct}% outside [0, 100)"),
                }),
                _ => errors.push(RowError {
                    row,
                    message: "expected three numeric fields".into(),
                }),
            }
        }
        if !errors.is_empty() {
            return Err(Error::Parse(errors));
        }
        Self::new(scenarios)
    }
}

/// `E[R · S⁰] / E[S⁰]` with `S⁰ = S / (1 − R)`.
pub fn fair_rate_scenarios(set: &ScenarioSet) -> Result<f64> {
    let (num, den) = set.scenarios.iter().fold((0.0, 0.0), |(n, d), s| {
        let digital = s.weight * s.zero_recovery_dds_spread();
        (n + s.recovery * digital, d + digital)
    });
    if den <= 0.0 {
        return Err(Error::UndefinedRate(
            "all scenario spreads are zero; the weighted rate is 0/0".into(),
        ));
    }
    Ok(num / den)
}

/// Fair rates computed at several intermediate dates, to check how much
/// the result moves with the date.
#[derive(Debug, Clone, PartialEq)]
pub struct FairRateSweep {
    pub points: Vec<(f64, f64)>,
}

impl FairRateSweep {
    /// Largest minus smallest fair rate across the sweep.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, r)| {
                (lo.min(r), hi.max(r))
            });
        hi - lo
    }
}

pub fn fair_rate_sweep(sets: &[(f64, ScenarioSet)]) -> Result<FairRateSweep> {
    let points = sets
        .iter()
        .map(|(u, s)| Ok((*u, fair_rate_scenarios(s)?)))
        .collect::<Result<_>>()?;
    Ok(FairRateSweep { points })
}

/// The two terms of the par condition for a receiver recovery swap of
/// maturity `T` viewed through an intermediate date `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParResidual {
    /// Value of defaults before `u`: a swap to `u` struck at the flat rate
    /// against the flat market rate.
    pub short_term: f64,
    /// Survival-weighted, discounted scenario average of the residual
    /// swap's mark-to-market at `u`.
    pub residual_term: f64,
}

impl ParResidual {
    pub fn total(&self) -> f64 {
        self.short_term + self.residual_term
    }
}

/// Par consistency residual of a receiver recovery swap struck at
/// `r_swap_flat`.
///
/// Recovery swap rates are flat in tenor, so the market rate to `u` equals
/// `r_swap_flat`. Rates are independent of the scenarios, and every
/// scenario's forward risky annuity over `[u, T]` is frozen at its value on
/// `hc_long`. Under these conventions the residual vanishes exactly when
/// `r_swap_flat` equals [`fair_rate_scenarios`], and decreases strictly in
/// `r_swap_flat`.
pub fn par_consistency_residual(
    dc: &DiscountCurve,
    hc_short: &HazardCurve,
    hc_long: &HazardCurve,
    set: &ScenarioSet,
    r_swap_flat: f64,
    u: f64,
    maturity: f64,
) -> Result<ParResidual> {
    if !(r_swap_flat < 1.0) {
        return Err(Error::Domain(format!(
            "swap rate {r_swap_flat} must be < 1"
        )));
    }
    if !(u > 0.0 && u < maturity) {
        return Err(Error::Domain(format!(
            "intermediate date {u} must lie strictly inside (0, {maturity})"
        )));
    }
    if hc_short.horizon() < u {
        return Err(Error::Domain(format!(
            "short hazard curve ends at {} before u = {u}",
            hc_short.last_end()
        )));
    }
    if hc_long.horizon() < maturity || dc.horizon() < maturity {
        return Err(Error::Domain(format!(
            "long hazard or discount curve ends before maturity {maturity}"
        )));
    }

    let r_short = r_swap_flat;
    let s_short = par_cds_spread(dc, hc_short, r_short, u)?;
    let rpv01_short = leg_integrals(dc, hc_short, 0.0, u)?.annuity;
    let short_term = (r_short - r_swap_flat) / (1.0 - r_short) * s_short * rpv01_short;

    // Z(0,u) Q(0,u) RPV01(u,T) = ∫_u^T Z Q
    let forward_annuity = leg_integrals(dc, hc_long, u, maturity)?.annuity;
    let scenario_mtm: f64 = set
        .scenarios
        .iter()
        .map(|s| s.weight * (s.recovery - r_swap_flat) * s.zero_recovery_dds_spread())
        .sum();

    Ok(ParResidual {
        short_term,
        residual_term: forward_annuity * scenario_mtm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn scenario(weight: f64, recovery: f64, cds_spread: f64) -> Scenario {
        Scenario {
            weight,
            recovery,
            cds_spread,
        }
    }

    #[test]
    fn scenario_rate_examples() {
        let single = ScenarioSet::new(vec![scenario(1.0, 0.37, 0.02)]).unwrap();
        assert_relative_eq!(
            fair_rate_scenarios(&single).unwrap(),
            0.37,
            max_relative = 1e-15
        );

        let two =
            ScenarioSet::new(vec![scenario(0.5, 0.3, 0.01), scenario(0.5, 0.5, 0.01)]).unwrap();
        let by_hand = (0.3 / 0.7 + 0.5 / 0.5) / (1.0 / 0.7 + 1.0 / 0.5);
        assert_relative_eq!(
            fair_rate_scenarios(&two).unwrap(),
            by_hand,
            max_relative = 1e-15
        );
        assert!((fair_rate_scenarios(&two).unwrap() - 0.416667).abs() < 1e-6);

        let recoveries = [(0.2, 0.1), (0.5, 0.4), (0.3, 0.6)];
        let independent =
            ScenarioSet::independent_dds(&recoveries, &[(0.4, 0.01), (0.6, 0.03)]).unwrap();
        let mean: f64 = recoveries.iter().map(|(w, r)| w * r).sum();
        assert!((fair_rate_scenarios(&independent).unwrap() - mean).abs() < 1e-12);
    }

    #[test]
    fn independent_cds_spreads_give_harmonic_rate() {
        let recoveries = [(0.2, 0.1), (0.5, 0.4), (0.3, 0.6)];
        let set = ScenarioSet::independent_cds(&recoveries, &[(0.4, 0.01), (0.6, 0.03)]).unwrap();
        let inverse_loss: f64 = recoveries.iter().map(|(w, r)| w / (1.0 - r)).sum();
        assert_relative_eq!(
            fair_rate_scenarios(&set).unwrap(),
            1.0 - 1.0 / inverse_loss,
            max_relative = 1e-14
        );
    }

    #[test]
    fn zero_spreads_are_undefined() {
        let set = ScenarioSet::new(vec![scenario(0.5, 0.3, 0.0), scenario(0.5, 0.5, 0.0)]).unwrap();
        assert!(matches!(
            fair_rate_scenarios(&set),
            Err(Error::UndefinedRate(_))
        ));
    }

    #[test]
    fn scenario_set_validation() {
        assert!(ScenarioSet::new(vec![]).is_err());
        assert!(ScenarioSet::new(vec![scenario(0.5, 0.3, 0.01)]).is_err());
        assert!(ScenarioSet::new(vec![scenario(1.0, 1.0, 0.01)]).is_err());
        assert!(ScenarioSet::new(vec![scenario(1.0, 0.3, -0.01)]).is_err());
    }

    #[test]
    fn scenario_csv() {
        let csv = "weight,recovery_pct,cds_spread_bp\n0.5,30,100\n0.5,50,100\n";
        let set = ScenarioSet::from_csv(csv.as_bytes()).unwrap();
        assert_eq!(set.scenarios()[1], scenario(0.5, 0.5, 0.01));
        let csv = "weight,recovery_pct,cds_spread_bp\n0.5,130,100\n0.5,x,100\n";
        match ScenarioSet::from_csv(csv.as_bytes()) {
            Err(Error::Parse(rows)) => assert_eq!(rows.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn approx_examples() {
        let approx = fair_rate_approx(0.40, 0.15).unwrap();
        assert_eq!(approx.first_order, 0.4375);
        assert_relative_eq!(
            approx.intermediate,
            1.0 - 0.6 / 1.0625,
            max_relative = 1e-15
        );
        assert!((approx.intermediate - 0.435294).abs() < 1e-6);
        let zero = fair_rate_approx(0.33, 0.0).unwrap();
        assert_eq!(zero.first_order, 0.33);
        assert!((zero.intermediate - 0.33).abs() < 1e-15);
        assert!(fair_rate_approx(1.0, 0.1).is_err());
    }

    #[test]
    fn premium_examples() {
        assert_relative_eq!(
            convexity_premium(0.40, 0.15).unwrap(),
            0.0375,
            max_relative = 1e-15
        );
        assert_eq!(convexity_premium(0.7, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            convexity_premium(0.20, 0.10).unwrap(),
            0.0125,
            max_relative = 1e-15
        );
    }

    #[test]
    fn fair_dds_examples() {
        let s = fair_dds_spread(0.0100, 0.0, 0.40, 0.15).unwrap();
        assert_relative_eq!(s, 0.01 / 0.6 * 1.0625, max_relative = 1e-15);
        assert!((s - 0.0177083).abs() < 1e-7);
        let plain = crate::pricing::dds_spread_from_cds(0.013, 0.35, 0.2).unwrap();
        assert_relative_eq!(
            fair_dds_spread(0.013, 0.2, 0.35, 0.0).unwrap(),
            plain,
            max_relative = 1e-15
        );
        assert!(fair_dds_spread(0.01, 1.0, 0.4, 0.1).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_relative_eq!(dds_gamma(0.40).unwrap(), 2.0 / 0.36, max_relative = 1e-15);
        assert!((dds_gamma(0.40).unwrap() - 5.5556).abs() < 1e-4);
        assert_eq!(dds_gamma(0.0).unwrap(), 2.0);
    }

    #[test]
    fn exact_rate_degenerate_distribution() {
        let dist = RecoveryDistribution::on_default_support(0.40, 1e-8).unwrap();
        let exact = fair_rate_exact(&dist).unwrap();
        assert!((exact.rate - 0.40).abs() < 1e-6);
        assert!(exact.rate >= exact.truncated_mean);
    }

    #[test]
    fn exact_rate_matches_independent_quadrature() {
        // reference from an independent adaptive integrator on the same law
        let dist = RecoveryDistribution::on_default_support(0.40, 0.15).unwrap();
        let exact = fair_rate_exact(&dist).unwrap();
        assert!(
            (exact.rate - 0.446_398_924_081_770_8).abs() < 1e-10,
            "{}",
            exact.rate
        );
        assert!((exact.truncated_mean - 0.401_689_789_987_405_5).abs() < 1e-10);
        assert!(exact.rate > exact.truncated_mean);
    }

    #[test]
    fn approximation_gap_grows_with_sigma() {
        let mut last = 0.0;
        for sigma in [0.02, 0.05, 0.08, 0.11, 0.15] {
            let dist = RecoveryDistribution::on_default_support(0.40, sigma).unwrap();
            let exact = fair_rate_exact(&dist).unwrap().rate;
            let gap = (exact - fair_rate_approx(0.40, sigma).unwrap().first_order).abs();
            assert!(gap >= last, "sigma {sigma}: gap {gap} < {last}");
            last = gap;
        }
    }

    #[test]
    fn distribution_validation() {
        assert!(RecoveryDistribution::new(0.4, 0.1, 0.0, 1.0).is_err());
        assert!(RecoveryDistribution::new(0.4, 0.0, 0.0, 0.99).is_err());
        assert!(RecoveryDistribution::new(0.995, 0.1, 0.0, 0.99).is_err());
        assert!(RecoveryDistribution::new(0.4, 0.1, 0.5, 0.3).is_err());
    }

    #[test]
    fn monte_carlo_is_schedule_independent() {
        let dist = RecoveryDistribution::on_default_support(0.40, 0.15).unwrap();
        let config = MonteCarloConfig {
            draws: 200_001,
            seed: 7,
            parallel: true,
        };
        let parallel = fair_rate_monte_carlo(&dist, config).unwrap();
        let serial = fair_rate_monte_carlo(
            &dist,
            MonteCarloConfig {
                parallel: false,
                ..config
            },
        )
        .unwrap();
        assert_eq!(parallel.rate.to_bits(), serial.rate.to_bits());
        assert_eq!(parallel.std_error.to_bits(), serial.std_error.to_bits());
        let other_seed =
            fair_rate_monte_carlo(&dist, MonteCarloConfig { seed: 8, ..config }).unwrap();
        assert_ne!(parallel.rate, other_seed.rate);
    }

    #[test]
    fn monte_carlo_agrees_with_quadrature() {
        let dist = RecoveryDistribution::new(0.35, 0.10, 0.05, 0.9).unwrap();
        let exact = fair_rate_exact(&dist).unwrap();
        let mc = fair_rate_monte_carlo(
            &dist,
            MonteCarloConfig {
                draws: 300_000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            (mc.rate - exact.rate).abs() < 3.0 * mc.std_error,
            "{mc:?} vs {exact:?}"
        );
    }

    fn flat_curves() -> (DiscountCurve, HazardCurve, HazardCurve) {
        let dc = DiscountCurve::flat(0.03, 10.0).unwrap();
        (
            dc,
            HazardCurve::flat(0.015, 2.0).unwrap(),
            HazardCurve::flat(0.02, 5.0).unwrap(),
        )
    }

    #[test]
    fn par_residual_examples() {
        let (dc, short, long) = flat_curves();
        let single = ScenarioSet::new(vec![scenario(1.0, 0.4, 0.012)]).unwrap();
        let at_par = par_consistency_residual(&dc, &short, &long, &single, 0.4, 2.0, 5.0).unwrap();
        assert!(at_par.total().abs() < 1e-12);

        let two =
            ScenarioSet::new(vec![scenario(0.6, 0.3, 0.010), scenario(0.4, 0.5, 0.016)]).unwrap();
        let fair = fair_rate_scenarios(&two).unwrap();
        let residual = par_consistency_residual(&dc, &short, &long, &two, fair, 2.0, 5.0).unwrap();
        assert!(residual.total().abs() < 1e-10);
        assert_eq!(residual.short_term, 0.0);

        let above =
            par_consistency_residual(&dc, &short, &long, &two, fair + 0.01, 2.0, 5.0).unwrap();
        assert!(above.total() < 0.0);
    }

    #[test]
    fn par_residual_domain_checks() {
        let (dc, short, long) = flat_curves();
        let set = ScenarioSet::new(vec![scenario(1.0, 0.4, 0.012)]).unwrap();
        assert!(par_consistency_residual(&dc, &short, &long, &set, 0.4, 3.0, 5.0).is_err());
        assert!(par_consistency_residual(&dc, &short, &long, &set, 0.4, 2.0, 6.0).is_err());
        assert!(par_consistency_residual(&dc, &short, &long, &set, 0.4, 5.0, 5.0).is_err());
        assert!(par_consistency_residual(&dc, &short, &long, &set, 1.0, 2.0, 5.0).is_err());
    }

    #[test]
    fn sweep_reports_range() {
        let a = ScenarioSet::new(vec![scenario(0.5, 0.3, 0.01), scenario(0.5, 0.5, 0.01)]).unwrap();
        let b =
            ScenarioSet::new(vec![scenario(0.5, 0.3, 0.01), scenario(0.5, 0.5, 0.012)]).unwrap();
        let sweep = fair_rate_sweep(&[(1.0, a.clone()), (2.0, b), (3.0, a)]).unwrap();
        assert_eq!(sweep.points.len(), 3);
        assert!(sweep.range() > 0.0);
    }

    proptest! {
        #[test]
        fn scenario_rate_is_scale_invariant(
            raw in prop::collection::vec((0.01f64..1.0, 0.0f64..0.95, 1e-4f64..0.1), 1..6),
            lambda in 0.01f64..100.0,
        ) {
            let total: f64 = raw.iter().map(|r| r.0).sum();
            let scenarios: Vec<_> = raw.iter().map(|&(w, r, s)| scenario(w / total, r, s)).collect();
            let Ok(set) = ScenarioSet::new(scenarios.clone()) else { return Ok(()); };
            let scaled = ScenarioSet::new(
                scenarios.iter().map(|s| Scenario { cds_spread: s.cds_spread * lambda, ..*s }).collect(),
            ).unwrap();
            let a = fair_rate_scenarios(&set).unwrap();
            let b = fair_rate_scenarios(&scaled).unwrap();
            prop_assert!((a - b).abs() <= 1e-13);
            let lo = scenarios.iter().map(|s| s.recovery).fold(f64::INFINITY, f64::min);
            let hi = scenarios.iter().map(|s| s.recovery).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(a >= lo - 1e-15 && a <= hi + 1e-15);
        }

        #[test]
        fn exact_rate_exceeds_truncated_mean(mean in 0.05f64..0.8, stdev in 0.005f64..0.3) {
            let dist = RecoveryDistribution::on_default_support(mean, stdev).unwrap();
            let exact = fair_rate_exact(&dist).unwrap();
            prop_assert!(exact.rate >= exact.truncated_mean);
        }
    }
}
