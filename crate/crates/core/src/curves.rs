//! Riskless discount curve, piecewise-constant hazard curve, and the two
//! leg integrals every pricer in the crate is built on:
//!
//! * the risky annuity `∫ Z(0,u) Q(0,u) du`, and
//! * the protection integral `∫ Z(0,u) h(u) Q(0,u) du`.
//!
//! Discount factors interpolate log-linearly, so instantaneous forwards are
//! constant between pillars. Hazards are constant between segment ends. On
//! every interval of the merged [`TimeGrid`] the integrand is therefore a
//! single exponential and both integrals are evaluated in closed form.
//!
//! Time is a year fraction measured from the valuation date at `t = 0`.

use std::io::Read;

use crate::error::{Error, Result, RowError};

/// Riskless zero-coupon discount factors with log-linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountCurve {
    times: Vec<f64>,
    dfs: Vec<f64>,
    // forwards[i] applies on (times[i], times[i + 1]]
    forwards: Vec<f64>,
}

impl DiscountCurve {
    /// Builds a curve from `(time, discount factor)` pillars.
    ///
    /// A pillar at time 0 is optional and implied as `(0, 1)` when absent;
    /// if present its discount factor must be exactly 1. Times must be
    /// strictly increasing and discount factors in `(0, 1]` and
    /// non-increasing.
    pub fn new(pillars: Vec<(f64, f64)>) -> Result<Self> {
        if pillars.is_empty() {
            return Err(Error::Construction(
                "discount curve needs at least one pillar".into(),
            ));
        }
        let mut times = Vec::with_capacity(pillars.len() + 1);
        let mut dfs = Vec::with_capacity(pillars.len() + 1);
        if pillars[0].0 != 0.0 {
            times.push(0.0);
            dfs.push(1.0);
        }
        for (t, df) in pillars {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::Construction(format!("invalid pillar time {t}")));
            }
            if !(df.is_finite() && df > 0.0 && df <= 1.0) {
                return Err(Error::Construction(format!(
                    "discount factor {df} at t={t} outside (0, 1]"
                )));
            }
            if t == 0.0 && df != 1.0 {
                return Err(Error::Construction(format!(
                    "discount factor at t=0 must be 1, got {df}"
                )));
            }
            if let (Some(&prev_t), Some(&prev_df)) = (times.last(), dfs.last()) {
                if t <= prev_t {
                    return Err(Error::Construction(format!(
                        "pillar times not strictly increasing: {t} after {prev_t}"
                    )));
                }
                if df > prev_df {
                    return Err(Error::Construction(format!(
                        "negative forward rate: df {df} at t={t} exceeds {prev_df} at t={prev_t}"
                    )));
                }
            }
            times.push(t);
            dfs.push(df);
        }
        let forwards = times
            .windows(2)
            .zip(dfs.windows(2))
            .map(|(t, d)| (d[0] / d[1]).ln() / (t[1] - t[0]))
            .collect();
        Ok(Self {
            times,
            dfs,
            forwards,
        })
    }

    /// Flat continuously compounded curve with a single pillar at `horizon`.
    pub fn flat(rate: f64, horizon: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Construction(format!(
                "flat rate {rate} must be >= 0"
            )));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::Construction(format!(
                "horizon {horizon} must be > 0"
            )));
        }
        Self::new(vec![(0.0, 1.0), (horizon, (-rate * horizon).exp())])
    }

    /// Parses the `time_years,discount_factor` CSV format.
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(source);
        let header = reader
            .headers()
            .map_err(|e| parse_error(0, e.to_string()))?
            .clone();
        if header.iter().collect::<Vec<_>>() != ["time_years", "discount_factor"] {
            return Err(parse_error(
                0,
                format!(
                    "expected header `time_years,discount_factor`, got `{}`",
                    header.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        let mut pillars = Vec::new();
        let mut errors = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 1;
            let record = match record {
                Ok(r) => r,
                Err(e) => {
                    errors.push(RowError {
                        row,
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            let parsed = (
                record.get(0).and_then(|s| s.parse::<f64>().ok()),
                record.get(1).and_then(|s| s.parse::<f64>().ok()),
            );
            match parsed {
                (Some(t), Some(df)) => {
                    if let Some(&(prev, _)) = pillars.last() {
                        if t <= prev {
                            errors.push(RowError {
                                row,
                                message: format!("time {t} not after previous time {prev}"),
                            });
                            continue;
                        }
                    }
                    pillars.push((t, df));
                }
                _ => errors.push(RowError {
                    row,
                    message: "non-numeric field".into(),
                }),
            }
        }
        if !errors.is_empty() {
            return Err(Error::Parse(errors));
        }
        Self::new(pillars)
    }

    pub fn pillars(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.dfs.iter().copied())
    }

    /// Last pillar time; the curve is defined on `[0, horizon]`.
    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("curve has a pillar at 0")
    }

    /// `Z(0, u)`.
    pub fn discount_factor(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        let i = self.interval(u);
        if u == self.times[i] {
            return Ok(self.dfs[i]);
        }
        Ok(self.dfs[i] * (-self.forwards[i] * (u - self.times[i])).exp())
    }

    /// Instantaneous forward rate in force on the interval containing `u`.
    pub fn forward_rate(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        if self.forwards.is_empty() {
            return Ok(0.0);
        }
        let i = self.interval(u).min(self.forwards.len() - 1);
        Ok(self.forwards[i])
    }

    fn check_domain(&self, u: f64) -> Result<()> {
        if !(u >= 0.0 && u <= self.horizon()) {
            return Err(Error::Domain(format!(
                "time {u} outside discount curve domain [0, {}]",
                self.horizon()
            )));
        }
        Ok(())
    }

    // Index i with times[i] <= u, and u <= times[i + 1] when i is not the last pillar.
    fn interval(&self, u: f64) -> usize {
        let idx = self.times.partition_point(|&t| t < u);
        // idx is the first pillar >= u
        if idx < self.times.len() && self.times[idx] == u {
            idx
        } else {
            idx - 1
        }
    }
}

fn parse_error(row: usize, message: String) -> Error {
    Error::Parse(vec![RowError { row, message }])
}

/// Piecewise-constant hazard rate curve starting at `t = 0`.
///
/// Segment `i` covers `(end[i-1], end[i]]` with `end[-1] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardCurve {
    ends: Vec<f64>,
    hazards: Vec<f64>,
    // cumulative hazard at each segment end
    cumulative: Vec<f64>,
    extrapolate: bool,
}

impl HazardCurve {
    /// Builds a curve from `(end_time, hazard)` segments.
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Construction(
                "hazard curve needs at least one segment".into(),
            ));
        }
        let mut ends = Vec::with_capacity(segments.len());
        let mut hazards = Vec::with_capacity(segments.len());
        let mut cumulative = Vec::with_capacity(segments.len());
        let mut start = 0.0;
        let mut acc = 0.0;
        for (end, h) in segments {
            if !(end.is_finite() && end > start) {
                return Err(Error::Construction(format!(
                    "segment end {end} must be finite and after {start}"
                )));
            }
            if !(h.is_finite() && h >= 0.0) {
                return Err(Error::Construction(format!(
                    "hazard {h} on segment ending {end} must be finite and >= 0"
                )));
            }
            acc += h * (end - start);
            ends.push(end);
            hazards.push(h);
            cumulative.push(acc);
            start = end;
        }
        Ok(Self {
            ends,
            hazards,
            cumulative,
            extrapolate: false,
        })
    }

    /// Single flat segment out to `horizon`.
    pub fn flat(hazard: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![(horizon, hazard)])
    }

    /// Extends the last hazard flat beyond the last segment end. Without
    /// this, evaluating past the last segment is a domain error.
    pub fn with_flat_extrapolation(mut self) -> Self {
        self.extrapolate = true;
        self
    }

    pub fn extrapolates(&self) -> bool {
        self.extrapolate
    }

    pub fn segments(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ends.iter().copied().zip(self.hazards.iter().copied())
    }

    /// Last calibrated segment end.
    pub fn last_end(&self) -> f64 {
        *self.ends.last().expect("non-empty")
    }

    /// Upper end of the domain: the last segment end, or infinity when
    /// extrapolating.
    pub fn horizon(&self) -> f64 {
        if self.extrapolate {
            f64::INFINITY
        } else {
            self.last_end()
        }
    }

    fn check_domain(&self, u: f64) -> Result<()> {
        if !(u >= 0.0 && u <= self.horizon()) {
            return Err(Error::Domain(format!(
                "time {u} outside hazard curve domain [0, {}]",
                self.last_end()
            )));
        }
        Ok(())
    }

    // Segment whose interval (start, end] contains u; u = 0 maps to the first.
    fn segment(&self, u: f64) -> usize {
        self.ends
            .partition_point(|&e| e < u)
            .min(self.ends.len() - 1)
    }

    /// Hazard rate in force at `u` (left-open, right-closed segments).
    pub fn hazard_at(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.hazards[self.segment(u)])
    }

    /// `∫₀ᵘ h(s) ds`.
    pub fn cumulative_hazard(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        let i = self.segment(u);
        let (start, base) = if i == 0 {
            (0.0, 0.0)
        } else {
            (self.ends[i - 1], self.cumulative[i - 1])
        };
        Ok(base + self.hazards[i] * (u - start))
    }

    /// `Q(0, u) = exp(−∫₀ᵘ h(s) ds)`.
    pub fn survival_probability(&self, u: f64) -> Result<f64> {
        Ok((-self.cumulative_hazard(u)?).exp())
    }
}

/// Merged, strictly increasing breakpoints of both curves over `[from, to]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(dc: &DiscountCurve, hc: &HazardCurve, from: f64, to: f64) -> Result<Self> {
        if !(from >= 0.0 && from <= to) {
            return Err(Error::Domain(format!("invalid interval [{from}, {to}]")));
        }
        dc.check_domain(to)?;
        hc.check_domain(to)?;
        let mut points: Vec<f64> = dc
            .times
            .iter()
            .chain(hc.ends.iter())
            .copied()
            .filter(|&t| t > from && t < to)
            .collect();
        points.push(from);
        points.push(to);
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Consecutive `(start, end)` pairs; empty when the grid is a single point.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Both leg integrals over one interval.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LegIntegrals {
    /// `∫ Z Q du`, in years.
    pub annuity: f64,
    /// `∫ Z h Q du`.
    pub protection: f64,
}

/// `∫ₐᵇ exp(−k (u − a)) du`, with the linear limit at `k = 0`.
pub(crate) fn exp_integral(rate: f64, length: f64) -> f64 {
    if rate == 0.0 {
        length
    } else {
        -(-rate * length).exp_m1() / rate
    }
}

/// Closed-form leg integrals over `[from, to]`.
pub fn leg_integrals(
    dc: &DiscountCurve,
    hc: &HazardCurve,
    from: f64,
    to: f64,
) -> Result<LegIntegrals> {
    let grid = TimeGrid::new(dc, hc, from, to)?;
    let mut out = LegIntegrals::default();
    for (a, b) in grid.intervals() {
        let mid = 0.5 * (a + b);
        let f = dc.forward_rate(mid)?;
        let h = hc.hazard_at(mid)?;
        let weight = dc.discount_factor(a)? * hc.survival_probability(a)?;
        let piece = weight * exp_integral(f + h, b - a);
        out.annuity += piece;
        out.protection += h * piece;
    }
    Ok(out)
}

/// Risky annuity (RPV01) `∫₀ᵀ Z(0,u) Q(0,u) du`.
pub fn risky_annuity(dc: &DiscountCurve, hc: &HazardCurve, maturity: f64) -> Result<f64> {
    Ok(leg_integrals(dc, hc, 0.0, maturity)?.annuity)
}

/// Unit zero-recovery protection leg `∫₀ᵀ Z(0,u) h(u) Q(0,u) du`.
pub fn protection_integral(dc: &DiscountCurve, hc: &HazardCurve, maturity: f64) -> Result<f64> {
    Ok(leg_integrals(dc, hc, 0.0, maturity)?.protection)
}
