//! Sequential bootstrap of a piecewise-constant hazard curve from a term
//! structure of CDS spreads and recovery swap rates.
//!
//! Each quote `(T, S, R)` fixes the zero-recovery digital spread
//! `S / (1 − R)`; the hazard on `(T_prev, T]` is solved so that this spread
//! times the risky annuity to `T` equals the protection integral to `T`.
//! Both sides integrate from 0, so earlier segments are held fixed while
//! the new one is solved.

use std::io::Read;

use crate::curves::{leg_integrals, DiscountCurve, HazardCurve, LegIntegrals};
use crate::error::{Error, Result, RowError};
use crate::solver::{brent, SolveError, Tolerance};

/// Lower end of the hazard search bracket, per annum.
pub const HAZARD_FLOOR: f64 = 1e-12;
/// Upper end of the hazard search bracket, per annum.
pub const HAZARD_CAP: f64 = 10.0;

/// One tenor of a CDS / recovery swap term structure, in decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdsQuote {
    pub tenor: f64,
    pub spread: f64,
    pub recovery_swap_rate: f64,
}

impl CdsQuote {
    pub fn new(tenor: f64, spread: f64, recovery_swap_rate: f64) -> Result<Self> {
        if !(tenor.is_finite() && tenor > 0.0) {
            return Err(Error::Domain(format!("tenor {tenor} must be > 0")));
        }
        if !(spread.is_finite() && spread >= 0.0) {
            return Err(Error::Domain(format!("spread {spread} must be >= 0")));
        }
        if !(0.0..1.0).contains(&recovery_swap_rate) {
            return Err(Error::Domain(format!(
                "recovery swap rate {recovery_swap_rate} outside [0, 1)"
            )));
        }
        Ok(Self {
            tenor,
            spread,
            recovery_swap_rate,
        })
    }

    /// Zero-recovery digital default swap spread `S / (1 − R)`.
    pub fn zero_recovery_dds_spread(&self) -> f64 {
        self.spread / (1.0 - self.recovery_swap_rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub hazard_curve: HazardCurve,
    /// `S/(1−R)·RPV01 − protection` at each tenor after solving.
    pub residuals: Vec<f64>,
    pub iterations: Vec<usize>,
}

/// Bootstraps the hazard curve tenor by tenor.
pub fn bootstrap_hazard(quotes: &[CdsQuote], dc: &DiscountCurve) -> Result<CalibrationReport> {
    if quotes.is_empty() {
        return Err(Error::Domain("no quotes to calibrate".into()));
    }
    for pair in quotes.windows(2) {
        if pair[1].tenor <= pair[0].tenor {
            return Err(Error::Domain(format!(
                "quote tenors must be strictly increasing: {} after {}",
                pair[1].tenor, pair[0].tenor
            )));
        }
    }
    let longest = quotes[quotes.len() - 1].tenor;
    if dc.horizon() < longest {
        return Err(Error::Domain(format!(
            "discount curve ends at {} before the longest tenor {longest}",
            dc.horizon()
        )));
    }

    let mut segments: Vec<(f64, f64)> = Vec::with_capacity(quotes.len());
    let mut residuals = Vec::with_capacity(quotes.len());
    let mut iterations = Vec::with_capacity(quotes.len());
    let mut accrued = LegIntegrals::default();
    let mut start = 0.0;

    for quote in quotes {
        let digital = quote.zero_recovery_dds_spread();
        let segment_legs = |h: f64| -> Result<LegIntegrals> {
            let mut trial = segments.clone();
            trial.push((quote.tenor, h));
            let curve = HazardCurve::new(trial)?;
            leg_integrals(dc, &curve, start, quote.tenor)
        };
        let residual = |legs: LegIntegrals| {
            digital * (accrued.annuity + legs.annuity) - (accrued.protection + legs.protection)
        };

        let (hazard, res, iters) = if quote.spread == 0.0 {
            if accrued.protection > 0.0 {
                return Err(Error::InconsistentQuotes {
                    tenor: quote.tenor,
                    reason: "zero spread after positive hazard on earlier segments".into(),
                });
            }
            (0.0, residual(segment_legs(0.0)?), 0)
        } else {
            // The closure cannot propagate errors; construction only fails
            // for non-finite hazards, which the bracket never produces.
            let mut failure = None;
            let root = brent(
                |h| match segment_legs(h) {
                    Ok(legs) => residual(legs),
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                },
                HAZARD_FLOOR,
                HAZARD_CAP,
                Tolerance::default(),
            );
            if let Some(e) = failure {
                return Err(e);
            }
            match root {
                Ok(root) => (root.x, root.residual, root.iterations),
                Err(SolveError::NoSignChange { f_lo, f_hi }) => {
                    return Err(Error::Calibration {
                        tenor: quote.tenor,
                        reason: format!(
                            "no root for hazard in [{HAZARD_FLOOR}, {HAZARD_CAP}] (residual {f_lo:e} .. {f_hi:e})"
                        ),
                    })
                }
                Err(other) => {
                    return Err(Error::Calibration {
                        tenor: quote.tenor,
                        reason: format!("{other:?}"),
                    })
                }
            }
        };

        let legs = segment_legs(hazard)?;
        accrued.annuity += legs.annuity;
        accrued.protection += legs.protection;
        segments.push((quote.tenor, hazard));
        residuals.push(res);
        iterations.push(iters);
        start = quote.tenor;
    }

    Ok(CalibrationReport {
        hazard_curve: HazardCurve::new(segments)?,
        residuals,
        iterations,
    })
}

/// Par CDS spread implied by the curves for a given recovery swap rate:
/// `(1 − R) · protection(T) / RPV01(T)`.
pub fn par_cds_spread(
    dc: &DiscountCurve,
    hc: &HazardCurve,
    recovery_swap_rate: f64,
    maturity: f64,
) -> Result<f64> {
    if !(recovery_swap_rate < 1.0) {
        return Err(Error::Domain(format!(
            "recovery swap rate {recovery_swap_rate} must be < 1"
        )));
    }
    if maturity <= 0.0 {
        return Err(Error::Domain(format!(
            "maturity {maturity} gives a zero risky annuity"
        )));
    }
    let legs = leg_integrals(dc, hc, 0.0, maturity)?;
    Ok((1.0 - recovery_swap_rate) * legs.protection / legs.annuity)
}

/// Parses the `tenor_years,cds_spread_bp,recovery_swap_rate_pct` format.
///
/// Every tenor must carry a recovery swap rate.
pub fn quotes_from_csv<R: Read>(source: R) -> Result<Vec<CdsQuote>> {
    const HEADER: [&str; 3] = ["tenor_years", "cds_spread_bp", "recovery_swap_rate_pct"];
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
    let mut quotes: Vec<CdsQuote> = Vec::new();
    let mut errors = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let mut fail = |message: String| errors.push(RowError { row, message });
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                fail(e.to_string());
                continue;
            }
        };
        let field = |k: usize| record.get(k).unwrap_or("");
        if field(2).is_empty() {
            fail(format!("missing recovery swap rate at tenor {}", field(0)));
            continue;
        }
        let values: Vec<Option<f64>> = (0..3).map(|k| field(k).parse::<f64>().ok()).collect();
        let (Some(tenor), Some(bp), Some(pct)) = (values[0], values[1], values[2]) else {
            fail("non-numeric field".into());
            continue;
        };
        if quotes.iter().any(|q| q.tenor == tenor) {
            fail(format!("duplicate tenor {tenor}"));
            continue;
        }
        match CdsQuote::new(tenor, bp / 1e4, pct / 1e2) {
            Ok(q) => quotes.push(q),
            Err(e) => fail(e.to_string()),
        }
    }
    if errors.is_empty() {
        Ok(quotes)
    } else {
        Err(Error::Parse(errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn quote(t: f64, s: f64, r: f64) -> CdsQuote {
        CdsQuote::new(t, s, r).unwrap()
    }

    #[test]
    fn credit_triangle_on_flat_inputs() {
        let dc = DiscountCurve::flat(0.0, 10.0).unwrap();
        let report = bootstrap_hazard(&[quote(5.0, 0.0060, 0.40)], &dc).unwrap();
        let (end, h) = report.hazard_curve.segments().next().unwrap();
        assert_eq!(end, 5.0);
        assert_relative_eq!(h, 0.01, max_relative = 1e-12);
        assert!(report.residuals[0].abs() <= 1e-12);
    }

    #[test]
    fn zero_spread_gives_zero_hazard() {
        let dc = DiscountCurve::flat(0.05, 10.0).unwrap();
        let report = bootstrap_hazard(&[quote(5.0, 0.0, 0.40)], &dc).unwrap();
        assert_eq!(report.hazard_curve.segments().next().unwrap().1, 0.0);
        assert_eq!(report.residuals[0], 0.0);
    }

    #[test]
    fn zero_spread_after_positive_hazard_is_inconsistent() {
        let dc = DiscountCurve::flat(0.05, 10.0).unwrap();
        let err =
            bootstrap_hazard(&[quote(1.0, 0.01, 0.4), quote(5.0, 0.0, 0.4)], &dc).unwrap_err();
        assert!(matches!(err, Error::InconsistentQuotes { tenor, .. } if tenor == 5.0));
    }

    #[test]
    fn collapsing_spread_has_no_root() {
        let dc = DiscountCurve::flat(0.05, 10.0).unwrap();
        let err =
            bootstrap_hazard(&[quote(1.0, 0.05, 0.4), quote(2.0, 0.001, 0.4)], &dc).unwrap_err();
        assert!(matches!(err, Error::Calibration { tenor, .. } if tenor == 2.0));
    }

    #[test]
    fn hazard_above_cap_has_no_root() {
        let dc = DiscountCurve::flat(0.0, 10.0).unwrap();
        let err = bootstrap_hazard(&[quote(1.0, 9.0, 0.5)], &dc).unwrap_err();
        assert!(matches!(err, Error::Calibration { .. }));
    }

    #[test]
    fn two_tenor_round_trip() {
        let dc = DiscountCurve::flat(0.03, 10.0).unwrap();
        let quotes = [quote(1.0, 0.0100, 0.40), quote(5.0, 0.0150, 0.35)];
        let report = bootstrap_hazard(&quotes, &dc).unwrap();
        assert_eq!(report.hazard_curve.segments().count(), 2);
        for q in &quotes {
            let par =
                par_cds_spread(&dc, &report.hazard_curve, q.recovery_swap_rate, q.tenor).unwrap();
            assert!((par - q.spread).abs() < 1e-8, "{par} vs {}", q.spread);
        }
        assert!(report.residuals.iter().all(|r| r.abs() <= 1e-12));
    }

    #[test]
    fn par_spread_examples() {
        let dc = DiscountCurve::flat(0.04, 10.0).unwrap();
        let hc = HazardCurve::flat(0.01, 10.0).unwrap();
        for t in [0.5, 1.0, 5.0, 10.0] {
            assert_relative_eq!(
                par_cds_spread(&dc, &hc, 0.40, t).unwrap(),
                0.0060,
                max_relative = 1e-12
            );
        }
        let hc0 = HazardCurve::flat(0.0, 10.0).unwrap();
        assert_eq!(par_cds_spread(&dc, &hc0, 0.40, 5.0).unwrap(), 0.0);
        assert!(matches!(
            par_cds_spread(&dc, &hc, 0.40, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(par_cds_spread(&dc, &hc, 1.0, 5.0).is_err());
    }

    #[test]
    fn rejects_unsorted_or_short_inputs() {
        let dc = DiscountCurve::flat(0.03, 3.0).unwrap();
        assert!(bootstrap_hazard(&[], &dc).is_err());
        assert!(bootstrap_hazard(&[quote(2.0, 0.01, 0.4), quote(1.0, 0.01, 0.4)], &dc).is_err());
        assert!(bootstrap_hazard(&[quote(5.0, 0.01, 0.4)], &dc).is_err());
    }

    #[test]
    fn quote_validation() {
        assert!(CdsQuote::new(0.0, 0.01, 0.4).is_err());
        assert!(CdsQuote::new(1.0, -0.01, 0.4).is_err());
        assert!(CdsQuote::new(1.0, 0.01, 1.0).is_err());
    }

    #[test]
    fn quote_csv() {
        let csv = "tenor_years,cds_spread_bp,recovery_swap_rate_pct\n1,100,40\n5,150,35\n";
        let quotes = quotes_from_csv(csv.as_bytes()).unwrap();
        assert_eq!(quotes, vec![quote(1.0, 0.01, 0.4), quote(5.0, 0.015, 0.35)]);

        let csv =
            "tenor_years,cds_spread_bp,recovery_swap_rate_pct\n1,100,\n5,x,35\n5,150,35\n7,1,100\n";
        match quotes_from_csv(csv.as_bytes()) {
            Err(Error::Parse(rows)) => {
                assert_eq!(
                    rows.iter().map(|r| r.row).collect::<Vec<_>>(),
                    vec![1, 2, 4]
                );
            }
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn raising_spread_raises_hazard(s in 0.001f64..0.05, bump in 1e-5f64..0.01, r in 0.0f64..0.6) {
            let dc = DiscountCurve::flat(0.03, 10.0).unwrap();
            let base = [quote(1.0, 0.01, 0.4), quote(3.0, s, r)];
            let bumped = [quote(1.0, 0.01, 0.4), quote(3.0, s + bump, r)];
            let (Ok(a), Ok(b)) = (bootstrap_hazard(&base, &dc), bootstrap_hazard(&bumped, &dc)) else {
                return Ok(());
            };
            let h = |rep: &CalibrationReport| rep.hazard_curve.segments().nth(1).unwrap().1;
            prop_assert!(h(&b) >= h(&a));
        }

        #[test]
        fn raising_recovery_raises_hazard(s in 0.001f64..0.05, r in 0.0f64..0.6, bump in 1e-3f64..0.3) {
            let dc = DiscountCurve::flat(0.03, 10.0).unwrap();
            let a = bootstrap_hazard(&[quote(5.0, s, r)], &dc).unwrap();
            let b = bootstrap_hazard(&[quote(5.0, s, r + bump)], &dc).unwrap();
            let h = |rep: &CalibrationReport| rep.hazard_curve.segments().next().unwrap().1;
            prop_assert!(h(&b) > h(&a));
        }

        #[test]
        fn flat_inputs_solve_to_credit_triangle(
            r in 0.0f64..0.1, s in 0.0005f64..0.08, rec in 0.0f64..0.8, n in 1usize..6,
        ) {
            let dc = DiscountCurve::flat(r, 10.0).unwrap();
            let quotes: Vec<_> = (1..=n).map(|k| quote(k as f64 * 1.5, s, rec)).collect();
            let report = bootstrap_hazard(&quotes, &dc).unwrap();
            let expected = s / (1.0 - rec);
            for (_, h) in report.hazard_curve.segments() {
                prop_assert!((h - expected).abs() <= 1e-10 * expected, "{} vs {}", h, expected);
            }
        }
    }
}
