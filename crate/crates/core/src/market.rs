//! Market quote files and the implied-recovery scanner.
//!
//! Quote files carry recoveries in percent and spreads in basis points;
//! everything in memory is a decimal.

use std::io::{Read, Write};

use crate::error::{Error, Result, RowError};
use crate::pricing::{dds_spread_from_cds, implied_recovery};

/// Header of the quote file, in column order.
pub const QUOTE_HEADER: [&str; 5] = [
    "ticker",
    "recovery_swap_rate_pct",
    "cds_spread_bp",
    "dds_spread_bp",
    "dds_contractual_recovery_pct",
];

/// Default `|implied − quoted|` recovery gap that raises a flag: one
/// percentage point.
pub const DEFAULT_GAP_THRESHOLD: f64 = 0.01;

const PCT: f64 = 1e2;
const BP: f64 = 1e4;

/// One reference entity's quotes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuoteRow {
    pub ticker: String,
    pub recovery_swap_rate: f64,
    pub cds_spread: f64,
    pub dds_spread: Option<f64>,
    pub dds_contractual_recovery: f64,
}

/// Parses a quote file. Blank DDS columns mean no DDS quote and a
/// contractual recovery of zero.
pub fn parse_quotes<R: Read>(source: R) -> Result<Vec<QuoteRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let header = reader.headers().map_err(|e| {
        Error::Parse(vec![RowError {
            row: 0,
            message: e.to_string(),
        }])
    })?;
    if header.iter().collect::<Vec<_>>() != QUOTE_HEADER {
        return Err(Error::Parse(vec![RowError {
            row: 0,
            message: format!("expected header `{}`", QUOTE_HEADER.join(",")),
        }]));
    }

    let mut rows: Vec<QuoteRow> = Vec::new();
    let mut errors = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        match record
            .map_err(|e| e.to_string())
            .and_then(|r| parse_row(&r))
        {
            Ok(quote) if rows.iter().any(|q| q.ticker == quote.ticker) => errors.push(RowError {
                row,
                message: format!("duplicate ticker {}", quote.ticker),
            }),
            Ok(quote) => rows.push(quote),
            Err(message) => errors.push(RowError { row, message }),
        }
    }
    if errors.is_empty() {
        Ok(rows)
    } else {
        Err(Error::Parse(errors))
    }
}

fn parse_row(record: &csv::StringRecord) -> std::result::Result<QuoteRow, String> {
    if record.len() != QUOTE_HEADER.len() {
        return Err(format!(
            "expected {} fields, found {}",
            QUOTE_HEADER.len(),
            record.len()
        ));
    }
    let ticker = record[0].to_string();
    if ticker.is_empty() {
        return Err("empty ticker".into());
    }
    let number = |k: usize| -> std::result::Result<Option<f64>, String> {
        let field = &record[k];
        if field.is_empty() {
            return Ok(None);
        }
        field
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| format!("{}: non-numeric value `{field}`", QUOTE_HEADER[k]))
    };
    let required =
        |k: usize| number(k)?.ok_or_else(|| format!("{}: missing value", QUOTE_HEADER[k]));

    let recovery_pct = required(1)?;
    let cds_bp = required(2)?;
    let dds_bp = number(3)?;
    let contractual_pct = number(4)?.unwrap_or(0.0);

    for (name, pct) in [
        (QUOTE_HEADER[1], recovery_pct),
        (QUOTE_HEADER[4], contractual_pct),
    ] {
        if !(0.0..100.0).contains(&pct) {
            return Err(format!("{name}: {pct}% outside [0, 100)"));
        }
    }
    if cds_bp < 0.0 || dds_bp.is_some_and(|s| s < 0.0) {
        return Err("negative spread".into());
    }
    Ok(QuoteRow {
        ticker,
        recovery_swap_rate: recovery_pct / PCT,
        cds_spread: cds_bp / BP,
        dds_spread: dds_bp.map(|s| s / BP),
        dds_contractual_recovery: contractual_pct / PCT,
    })
}

/// Value in file units whose parse-and-divide gives back `decimal` exactly.
/// Among the floats near `decimal · scale` that qualify, the one with the
/// shortest decimal form wins, so `0.0122` prints as `122` basis points.
pub fn to_file_units(decimal: f64, scale: f64) -> f64 {
    let guess = decimal * scale;
    let (mut best, mut best_len) = (None, usize::MAX);
    let (mut up, mut down) = (guess, guess);
    for step in 0..=16 {
        if step > 0 {
            up = up.next_up();
            down = down.next_down();
        }
        for x in [down, up] {
            if x / scale == decimal {
                let len = x.to_string().len();
                if len < best_len {
                    (best, best_len) = (Some(x), len);
                }
            }
        }
    }
    best.unwrap_or(guess)
}

pub fn percent(decimal: f64) -> f64 {
    to_file_units(decimal, PCT)
}

pub fn basis_points(decimal: f64) -> f64 {
    to_file_units(decimal, BP)
}

/// Writes rows in the quote file format. Parsing the output reproduces
/// rows read by [`parse_quotes`] bit for bit.
pub fn write_quotes<W: Write>(rows: &[QuoteRow], sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    writer.write_record(QUOTE_HEADER).map_err(csv_err)?;
    for q in rows {
        writer
            .write_record([
                q.ticker.clone(),
                percent(q.recovery_swap_rate).to_string(),
                basis_points(q.cds_spread).to_string(),
                q.dds_spread
                    .map(|s| basis_points(s).to_string())
                    .unwrap_or_default(),
                percent(q.dds_contractual_recovery).to_string(),
            ])
            .map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

/// Scanner output for one ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub ticker: String,
    pub quoted_recovery: f64,
    pub cds_spread: f64,
    /// DDS spread at the row's contractual recovery implied by the CDS
    /// spread and the quoted recovery swap rate.
    pub theoretical_dds: f64,
    /// Quoted DDS restated at zero contractual recovery.
    pub dds_zero_spread: Option<f64>,
    pub implied_recovery: Option<f64>,
    /// `implied − quoted`.
    pub gap: Option<f64>,
    pub arbitrage_flag: bool,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub gap_threshold: f64,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.arbitrage_flag)
    }
}

/// Implied recovery from each row's CDS / DDS pair, compared with the
/// quoted recovery swap rate.
///
/// A row is flagged when its quotes admit no recovery in `[0, 1)` or when
/// `|implied − quoted|` exceeds `gap_threshold`. Rows keep input order.
pub fn scan(rows: &[QuoteRow], gap_threshold: f64) -> ScanReport {
    let rows = rows.iter().map(|q| scan_row(q, gap_threshold)).collect();
    ScanReport {
        gap_threshold,
        rows,
    }
}

fn scan_row(q: &QuoteRow, gap_threshold: f64) -> ScanRow {
    let theoretical_dds = dds_spread_from_cds(
        q.cds_spread,
        q.recovery_swap_rate,
        q.dds_contractual_recovery,
    )
    .expect("parsed rows have recoveries below 1");
    let mut out = ScanRow {
        ticker: q.ticker.clone(),
        quoted_recovery: q.recovery_swap_rate,
        cds_spread: q.cds_spread,
        theoretical_dds,
        dds_zero_spread: None,
        implied_recovery: None,
        gap: None,
        arbitrage_flag: false,
        diagnostic: None,
    };
    let Some(dds) = q.dds_spread else {
        return out;
    };
    let zero = dds / (1.0 - q.dds_contractual_recovery);
    out.dds_zero_spread = Some(zero);
    match implied_recovery(q.cds_spread, zero) {
        Ok(implied) => {
            let gap = implied - q.recovery_swap_rate;
            out.implied_recovery = Some(implied);
            out.gap = Some(gap);
            if gap.abs() > gap_threshold {
                out.arbitrage_flag = true;
                out.diagnostic = Some(format!(
                    "implied recovery differs from quoted by {:.4} pp",
                    gap * PCT
                ));
            }
        }
        Err(e) => {
            out.arbitrage_flag = true;
            out.diagnostic = Some(e.to_string());
        }
    }
    out
}
