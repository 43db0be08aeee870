//! Recovery swap payoff and mark-to-market, DDS spreads from CDS spreads
//! and recovery swap rates, implied recovery, and the credit triangle.

use crate::calibration::par_cds_spread;
use crate::curves::{leg_integrals, DiscountCurve, HazardCurve};
use crate::error::{Error, Result};

/// Largest tolerated gap between the quoted CDS spread and the par spread
/// of the hazard curve handed to [`recovery_swap_pv`].
pub const CALIBRATION_CHECK_TOLERANCE: f64 = 1e-6;

/// Which side of the realized recovery a counterparty is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Pays realized recovery, receives the fixed swap rate on default.
    Payer,
    /// Receives realized recovery, pays the fixed swap rate on default.
    Receiver,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Payer => 1.0,
            Direction::Receiver => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoverySwapTrade {
    pub direction: Direction,
    pub swap_rate: f64,
    pub maturity: f64,
    pub notional: f64,
}

impl RecoverySwapTrade {
    pub fn new(direction: Direction, swap_rate: f64, maturity: f64, notional: f64) -> Result<Self> {
        if !(swap_rate < 1.0) {
            return Err(Error::Domain(format!("swap rate {swap_rate} must be < 1")));
        }
        if !(maturity > 0.0 && maturity.is_finite()) {
            return Err(Error::Domain(format!("maturity {maturity} must be > 0")));
        }
        if !(notional > 0.0 && notional.is_finite()) {
            return Err(Error::Domain(format!("notional {notional} must be > 0")));
        }
        Ok(Self {
            direction,
            swap_rate,
            maturity,
            notional,
        })
    }
}

/// Digital default swap terms: fixed payout `1 − contractual_recovery` on default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdsTerms {
    pub contractual_recovery: f64,
    pub maturity: f64,
}

impl DdsTerms {
    pub fn new(contractual_recovery: f64, maturity: f64) -> Result<Self> {
        check_recovery("contractual recovery", contractual_recovery)?;
        if !(maturity > 0.0) {
            return Err(Error::Domain(format!("maturity {maturity} must be > 0")));
        }
        Ok(Self {
            contractual_recovery,
            maturity,
        })
    }

    /// Fair running spread under the no-arbitrage relation with CDS and
    /// recovery swaps.
    pub fn fair_spread(&self, s_cds: f64, r_swap: f64) -> Result<f64> {
        dds_spread_from_cds(s_cds, r_swap, self.contractual_recovery)
    }
}

fn check_recovery(what: &str, r: f64) -> Result<()> {
    if !(r < 1.0) {
        return Err(Error::Domain(format!("{what} {r} must be < 1")));
    }
    Ok(())
}

/// Cash flow of a recovery swap at maturity or default.
pub fn recovery_swap_payoff(
    trade: &RecoverySwapTrade,
    realized_recovery: f64,
    defaulted: bool,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&realized_recovery) {
        return Err(Error::Domain(format!(
            "realized recovery {realized_recovery} outside [0, 1]"
        )));
    }
    if !defaulted {
        return Ok(0.0);
    }
    Ok(trade.direction.sign() * trade.notional * (trade.swap_rate - realized_recovery))
}

/// DDS spread for contractual recovery `r_dds` implied by a CDS spread and
/// the recovery swap rate: `S_CDS · (1 − r_dds) / (1 − r_swap)`.
pub fn dds_spread_from_cds(s_cds: f64, r_swap: f64, r_dds: f64) -> Result<f64> {
    check_recovery("recovery swap rate", r_swap)?;
    check_recovery("DDS contractual recovery", r_dds)?;
    if !(s_cds >= 0.0) {
        return Err(Error::Domain(format!("CDS spread {s_cds} must be >= 0")));
    }
    Ok(s_cds * (1.0 - r_dds) / (1.0 - r_swap))
}

/// Recovery rate implied by a CDS spread and a zero-recovery DDS spread.
///
/// A CDS spread above the zero-recovery DDS spread cannot be priced by any
/// recovery in `[0, 1)` and is reported as [`Error::Arbitrage`].
pub fn implied_recovery(s_cds: f64, s_dds_zero: f64) -> Result<f64> {
    if !(s_dds_zero > 0.0) {
        return Err(Error::Domain(format!(
            "zero-recovery DDS spread {s_dds_zero} must be > 0"
        )));
    }
    if !(s_cds >= 0.0) {
        return Err(Error::Domain(format!("CDS spread {s_cds} must be >= 0")));
    }
    if s_cds > s_dds_zero {
        return Err(Error::Arbitrage(format!(
            "CDS spread {s_cds} exceeds zero-recovery DDS spread {s_dds_zero}"
        )));
    }
    Ok(1.0 - s_cds / s_dds_zero)
}

/// Credit triangle spread `h · (1 − R)`.
pub fn credit_triangle_spread(hazard: f64, recovery: f64) -> Result<f64> {
    if !(hazard >= 0.0) {
        return Err(Error::Domain(format!("hazard {hazard} must be >= 0")));
    }
    check_recovery("recovery", recovery)?;
    Ok(hazard * (1.0 - recovery))
}

/// Options for [`recovery_swap_pv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PvOptions {
    /// Reprice the quoted CDS spread off the hazard curve and fail if it
    /// is off by more than [`CALIBRATION_CHECK_TOLERANCE`].
    pub verify_calibration: bool,
}

impl Default for PvOptions {
    fn default() -> Self {
        Self {
            verify_calibration: true,
        }
    }
}

/// Mark-to-market of a seasoned recovery swap:
/// receiver PV = `(R_mkt − R_swap) / (1 − R_mkt) · S_CDS · RPV01(T)`.
///
/// `hc` must be calibrated to `(s_cds, r_mkt)` at the trade maturity.
pub fn recovery_swap_pv(
    dc: &DiscountCurve,
    hc: &HazardCurve,
    trade: &RecoverySwapTrade,
    r_mkt: f64,
    s_cds: f64,
    options: PvOptions,
) -> Result<f64> {
    check_recovery("market recovery swap rate", r_mkt)?;
    if options.verify_calibration {
        let par = par_cds_spread(dc, hc, r_mkt, trade.maturity)?;
        if (par - s_cds).abs() > CALIBRATION_CHECK_TOLERANCE {
            return Err(Error::NotCalibrated { par, quoted: s_cds });
        }
    }
    let rpv01 = leg_integrals(dc, hc, 0.0, trade.maturity)?.annuity;
    let receiver = (r_mkt - trade.swap_rate) / (1.0 - r_mkt) * s_cds * rpv01;
    Ok(-trade.direction.sign() * trade.notional * receiver)
}

/// The same mark-to-market evaluated as `(R_mkt − R_swap) · protection(T)`,
/// without going through the CDS spread.
pub fn recovery_swap_pv_direct(
    dc: &DiscountCurve,
    hc: &HazardCurve,
    trade: &RecoverySwapTrade,
    r_mkt: f64,
) -> Result<f64> {
    check_recovery("market recovery swap rate", r_mkt)?;
    let protection = leg_integrals(dc, hc, 0.0, trade.maturity)?.protection;
    Ok(-trade.direction.sign() * trade.notional * (r_mkt - trade.swap_rate) * protection)
}
