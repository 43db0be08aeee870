//! Static replication of a payer recovery swap with a long DDS and a
//! short CDS position, and the check that the package has no default or
//! premium cash flow when hedge ratios and DDS spread are set at their
//! no-arbitrage values.

use std::fmt;

use crate::error::{Error, Result};
use crate::pricing::dds_spread_from_cds;

/// Bound on `|default cash flow|` accepted by [`verify_replication`].
pub const DEFAULT_FLOW_TOLERANCE: f64 = 1e-12;
/// Bound on `|net premium|` accepted by [`verify_replication`].
pub const PREMIUM_TOLERANCE: f64 = 1e-15;
/// Realized recovery grid step for [`verify_replication`].
pub const GRID_STEP: f64 = 0.01;

/// Notional multiples of the CDS and DDS legs per unit of recovery swap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgeRatios {
    pub cds: f64,
    pub dds: f64,
}

/// `H_CDS = 1`, `H_DDS = (1 − r_swap) / (1 − r_dds)`.
pub fn hedge_ratios(r_swap: f64, r_dds: f64) -> Result<HedgeRatios> {
    if !(r_dds < 1.0) {
        return Err(Error::Domain(format!(
            "DDS contractual recovery {r_dds} must be < 1"
        )));
    }
    if !(r_swap < 1.0) {
        return Err(Error::Domain(format!(
            "recovery swap rate {r_swap} must be < 1"
        )));
    }
    Ok(HedgeRatios {
        cds: 1.0,
        dds: (1.0 - r_swap) / (1.0 - r_dds),
    })
}

/// Payer recovery swap (notional 1), long DDS, short CDS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationPortfolio {
    pub r_swap: f64,
    pub r_dds: f64,
    pub ratios: HedgeRatios,
    pub s_cds: f64,
    pub s_dds: f64,
}

impl ReplicationPortfolio {
    /// The replicating package: hedge ratios from [`hedge_ratios`] and the
    /// DDS struck at its no-arbitrage spread.
    pub fn no_arbitrage(r_swap: f64, r_dds: f64, s_cds: f64) -> Result<Self> {
        Ok(Self {
            r_swap,
            r_dds,
            ratios: hedge_ratios(r_swap, r_dds)?,
            s_cds,
            s_dds: dds_spread_from_cds(s_cds, r_swap, r_dds)?,
        })
    }

    /// Net cash flow on default per unit recovery swap notional.
    pub fn default_cash_flow(&self, realized_recovery: f64) -> f64 {
        let HedgeRatios { cds, dds } = self.ratios;
        (self.r_swap - cds + dds * (1.0 - self.r_dds)) + (cds - 1.0) * realized_recovery
    }

    /// Net running premium received, per annum.
    pub fn net_premium(&self) -> f64 {
        self.ratios.cds * self.s_cds - self.ratios.dds * self.s_dds
    }
}

/// [`ReplicationPortfolio::default_cash_flow`] as a free function.
pub fn default_cash_flow(p: &ReplicationPortfolio, realized_recovery: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&realized_recovery) {
        return Err(Error::Domain(format!(
            "realized recovery {realized_recovery} outside [0, 1]"
        )));
    }
    Ok(p.default_cash_flow(realized_recovery))
}

pub fn net_premium(p: &ReplicationPortfolio) -> f64 {
    p.net_premium()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationReport {
    pub portfolio: ReplicationPortfolio,
    /// `(realized recovery, default cash flow)` over the grid.
    pub grid: Vec<(f64, f64)>,
    pub max_default_deviation: f64,
    /// Coefficient of realized recovery in the default cash flow, `H_CDS − 1`.
    pub recovery_coefficient: f64,
    pub net_premium: f64,
}

impl ReplicationReport {
    pub fn default_flow_ok(&self) -> bool {
        self.max_default_deviation < DEFAULT_FLOW_TOLERANCE && self.recovery_coefficient == 0.0
    }

    pub fn premium_ok(&self) -> bool {
        self.net_premium.abs() < PREMIUM_TOLERANCE
    }

    pub fn passed(&self) -> bool {
        self.default_flow_ok() && self.premium_ok()
    }
}

/// Builds the no-arbitrage replicating package and measures its cash flows
/// on default over realized recoveries `0, 0.01, …, 1` and its net premium.
pub fn verify_replication(r_swap: f64, r_dds: f64, s_cds: f64) -> Result<ReplicationReport> {
    let portfolio = ReplicationPortfolio::no_arbitrage(r_swap, r_dds, s_cds)?;
    let steps = (1.0 / GRID_STEP).round() as usize;
    let grid: Vec<(f64, f64)> = (0..=steps)
        .map(|k| {
            let r = k as f64 / steps as f64;
            (r, portfolio.default_cash_flow(r))
        })
        .collect();
    let max_default_deviation = grid.iter().map(|&(_, cf)| cf.abs()).fold(0.0, f64::max);
    Ok(ReplicationReport {
        portfolio,
        grid,
        max_default_deviation,
        recovery_coefficient: portfolio.ratios.cds - 1.0,
        net_premium: portfolio.net_premium(),
    })
}

impl fmt::Display for ReplicationReport {
    /// Plain-text table laid out as notional / premium / payoff on default /
    /// payoff with no default, followed by the measured deviations.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.portfolio;
        let rows = [
            [
                "Leg",
                "Notional",
                "Premium",
                "Payoff in case of default",
                "Payoff when no default",
            ],
            [
                "Payer Recovery Swap",
                "1",
                "-",
                &format!("{} - R", p.r_swap),
                "-",
            ],
            [
                "Buy: Digital CDS",
                &format!("{}", p.ratios.dds),
                &format!("-{}", p.s_dds),
                &format!("{}", 1.0 - p.r_dds),
                "-",
            ],
            [
                "Sell: Conventional CDS",
                &format!("{}", p.ratios.cds),
                &format!("+{}", p.s_cds),
                "-(1 - R)",
                "-",
            ],
            [
                "Net Payments",
                "",
                &format!("{}", self.net_premium),
                &format!(
                    "{} + {} * R",
                    p.default_cash_flow(0.0),
                    self.recovery_coefficient
                ),
                "0",
            ],
        ];
        let widths: Vec<usize> = (0..5)
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            writeln!(f, "{}", line.join("  ").trim_end())?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "max |default cash flow| over recovery grid: {:e} (tolerance {DEFAULT_FLOW_TOLERANCE:e})",
            self.max_default_deviation
        )?;
        writeln!(
            f,
            "|net premium|: {:e} (tolerance {PREMIUM_TOLERANCE:e})",
            self.net_premium.abs()
        )?;
        write!(
            f,
            "replication: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}
