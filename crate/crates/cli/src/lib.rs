//! The `rswap` command line: calibration, recovery swap pricing, the
//! implied-recovery scanner, replication checks and the convexity tools.
//!
//! File units are percent for recoveries and basis points for spreads.
//! Exit status: 0 on success, 2 on bad input or a domain error, 3 when
//! `scan` flags a quote, 64 on a usage error.

mod output;

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use rswap_core::convexity::{
    convexity_premium, dds_gamma, fair_dds_spread, fair_rate_approx, fair_rate_exact,
    fair_rate_monte_carlo, fair_rate_scenarios, par_consistency_residual, MonteCarloConfig,
    RecoveryDistribution, ScenarioSet, DEFAULT_SEED,
};
use rswap_core::market::{basis_points, parse_quotes, percent, scan, ScanReport};
use rswap_core::pricing::{
    dds_spread_from_cds, recovery_swap_pv, recovery_swap_pv_direct, Direction, PvOptions,
    RecoverySwapTrade,
};
use rswap_core::replication::{
    verify_replication, ReplicationReport, DEFAULT_FLOW_TOLERANCE, PREMIUM_TOLERANCE,
};
use rswap_core::{
    bootstrap_hazard, calibration::quotes_from_csv, par_cds_spread, risky_annuity, DiscountCurve,
    HazardCurve,
};

pub use output::Numbers;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_ARBITRAGE: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

const PCT: f64 = 100.0;
const BP: f64 = 10_000.0;

#[derive(Debug, Parser)]
#[command(
    name = "rswap",
    version,
    about = "Recovery swap pricing and recovery arbitrage tools"
)]
struct Cli {
    /// Round displayed numbers to N decimals (default: full precision).
    #[arg(long, global = true, value_name = "N")]
    round: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bootstrap a hazard curve from CDS and recovery swap quotes.
    Calibrate(CalibrateArgs),
    /// Mark a seasoned recovery swap to market.
    PriceRs(PriceArgs),
    /// Implied recovery from CDS/DDS quotes, flagged against quoted recovery swap rates.
    #[command(visible_alias = "implied-recovery")]
    Scan(ScanArgs),
    /// Recovery swap replication with digital and conventional CDS.
    Replicate(ReplicateArgs),
    /// Fair recovery swap rate under a truncated normal recovery.
    FairRate(FairRateArgs),
    /// Fair DDS spread including the recovery convexity premium.
    FairDds(FairDdsArgs),
    /// Fair recovery swap rate from a scenario file, with the par residual.
    ScenarioRate(ScenarioArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScanFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Side {
    Payer,
    Receiver,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// CSV with header tenor_years,cds_spread_bp,recovery_swap_rate_pct.
    quotes: PathBuf,
    /// CSV with header time_years,discount_factor.
    #[arg(long)]
    discount: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct PriceArgs {
    #[arg(long)]
    discount: PathBuf,
    /// Hazard curve JSON as written by `calibrate`.
    #[arg(long)]
    hazard: PathBuf,
    #[arg(long, value_enum, default_value = "payer")]
    direction: Side,
    /// Contractual recovery swap rate, percent.
    #[arg(long)]
    swap_rate: f64,
    /// Current market recovery swap rate, percent.
    #[arg(long)]
    market_rate: f64,
    /// Current CDS spread to maturity, bp.
    #[arg(long)]
    cds_spread: f64,
    /// Remaining maturity, years.
    #[arg(long)]
    maturity: f64,
    #[arg(long, default_value_t = 1.0)]
    notional: f64,
    /// Skip repricing the CDS spread off the hazard curve.
    #[arg(long)]
    no_verify: bool,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Quote CSV with header
    /// ticker,recovery_swap_rate_pct,cds_spread_bp,dds_spread_bp,dds_contractual_recovery_pct.
    quotes: PathBuf,
    /// Flag when |implied − quoted| exceeds this many percentage points.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: ScanFormat,
}

#[derive(Debug, Args)]
struct ReplicateArgs {
    /// Recovery swap rate, percent.
    #[arg(long)]
    swap_rate: f64,
    /// DDS contractual recovery, percent.
    #[arg(long, default_value_t = 0.0)]
    dds_recovery: f64,
    /// CDS spread, bp.
    #[arg(long)]
    cds_spread: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct FairRateArgs {
    /// Mean recovery, percent.
    #[arg(long)]
    mean: f64,
    /// Recovery standard deviation, percent.
    #[arg(long)]
    stdev: f64,
    /// Lower truncation bound, percent.
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    /// Upper truncation bound, percent (at most 99).
    #[arg(long, default_value_t = 99.0)]
    hi: f64,
    /// Monte Carlo draws.
    #[arg(long, default_value_t = 1_000_000)]
    draws: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct FairDdsArgs {
    /// CDS spread, bp.
    #[arg(long)]
    cds_spread: f64,
    /// DDS contractual recovery, percent.
    #[arg(long, default_value_t = 0.0)]
    dds_recovery: f64,
    /// Mean recovery, percent.
    #[arg(long)]
    mean: f64,
    /// Recovery standard deviation, percent.
    #[arg(long)]
    stdev: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// CSV with header weight,recovery_pct,cds_spread_bp.
    scenarios: PathBuf,
    /// Discount curve CSV; enables the par residual.
    #[arg(long, requires_all = ["hazard", "u", "maturity"])]
    discount: Option<PathBuf>,
    /// Hazard curve JSON to maturity.
    #[arg(long, requires = "discount")]
    hazard: Option<PathBuf>,
    /// Hazard curve JSON to the intermediate date (default: --hazard).
    #[arg(long, requires = "discount")]
    hazard_short: Option<PathBuf>,
    /// Intermediate date, years.
    #[arg(long, requires = "discount")]
    u: Option<f64>,
    /// Swap maturity, years.
    #[arg(long, requires = "discount")]
    maturity: Option<f64>,
    /// Flat recovery swap rate for the residual, percent (default: the fair rate).
    #[arg(long, requires = "discount")]
    swap_rate: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status. Reports go to `out`, diagnostics and usage to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let numbers = Numbers { round: cli.round };
    let result = match &cli.command {
        Command::Calibrate(a) => calibrate(a, numbers, out),
        Command::PriceRs(a) => price_rs(a, numbers, out),
        Command::Scan(a) => scan_quotes(a, numbers, out),
        Command::Replicate(a) => replicate(a, numbers, out),
        Command::FairRate(a) => fair_rate(a, numbers, out),
        Command::FairDds(a) => fair_dds(a, numbers, out),
        Command::ScenarioRate(a) => scenario_rate(a, numbers, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {failure}");
            EXIT_INPUT
        }
    }
}

#[derive(Debug)]
struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<rswap_core::Error> for Failure {
    fn from(e: rswap_core::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_discount(path: &Path) -> Result<DiscountCurve, Failure> {
    DiscountCurve::from_csv(open(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

#[derive(Debug, Deserialize)]
struct HazardFile {
    segments: Vec<HazardSegment>,
}

#[derive(Debug, Deserialize)]
struct HazardSegment {
    end_time_years: f64,
    hazard_per_annum: f64,
}

fn read_hazard(path: &Path) -> Result<HazardCurve, Failure> {
    let file: HazardFile = serde_json::from_reader(io::BufReader::new(open(path)?))
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let segments = file
        .segments
        .iter()
        .map(|s| (s.end_time_years, s.hazard_per_annum))
        .collect();
    HazardCurve::new(segments).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn emit_json(out: &mut dyn Write, value: &Value) -> Outcome {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(EXIT_OK)
}

fn emit_pairs(out: &mut dyn Write, value: &Value, numbers: Numbers) -> Outcome {
    let Value::Object(map) = value else {
        unreachable!("reports are JSON objects")
    };
    let rows: Vec<(&str, String)> = map
        .iter()
        .map(|(k, v)| {
            let text = match v {
                Value::Number(n) if n.is_f64() => numbers.text(n.as_f64().unwrap_or(f64::NAN)),
                Value::Number(n) => n.to_string(),
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            (k.as_str(), text)
        })
        .collect();
    write!(out, "{}", output::pairs(&rows))?;
    Ok(EXIT_OK)
}

fn emit(out: &mut dyn Write, format: Format, value: &Value, numbers: Numbers) -> Outcome {
    match format {
        Format::Json => emit_json(out, value),
        Format::Table => emit_pairs(out, value, numbers),
    }
}

fn calibrate(a: &CalibrateArgs, n: Numbers, out: &mut dyn Write) -> Outcome {
    let quotes = quotes_from_csv(open(&a.quotes)?)
        .map_err(|e| Failure(format!("{}: {e}", a.quotes.display())))?;
    let dc = read_discount(&a.discount)?;
    let report = bootstrap_hazard(&quotes, &dc)?;
    let segments: Vec<(f64, f64)> = report.hazard_curve.segments().collect();
    match a.format {
        Format::Json => {
            let value = json!({
                "segments": segments
                    .iter()
                    .map(|&(end, h)| json!({
                        "end_time_years": n.json(end),
                        "hazard_per_annum": n.json(h),
                    }))
                    .collect::<Vec<_>>(),
                "residuals": report.residuals.iter().map(|&r| n.json(r)).collect::<Vec<_>>(),
            });
            emit_json(out, &value)
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = segments
                .iter()
                .zip(&report.residuals)
                .zip(&report.iterations)
                .map(|((&(end, h), &r), &it)| {
                    vec![n.text(end), n.text(h), n.text(r), it.to_string()]
                })
                .collect();
            let header = [
                "end_time_years",
                "hazard_per_annum",
                "residual",
                "iterations",
            ];
            write!(out, "{}", output::table(&header, &rows))?;
            Ok(EXIT_OK)
        }
    }
}

fn price_rs(a: &PriceArgs, n: Numbers, out: &mut dyn Write) -> Outcome {
    let dc = read_discount(&a.discount)?;
    let hc = read_hazard(&a.hazard)?;
    let direction = match a.direction {
        Side::Payer => Direction::Payer,
        Side::Receiver => Direction::Receiver,
    };
    let trade = RecoverySwapTrade::new(direction, a.swap_rate / PCT, a.maturity, a.notional)?;
    let r_mkt = a.market_rate / PCT;
    let s_cds = a.cds_spread / BP;
    let options = PvOptions {
        verify_calibration: !a.no_verify,
    };
    let pv = recovery_swap_pv(&dc, &hc, &trade, r_mkt, s_cds, options)?;
    let pv_direct = recovery_swap_pv_direct(&dc, &hc, &trade, r_mkt)?;
    let rpv01 = risky_annuity(&dc, &hc, a.maturity)?;
    let par = par_cds_spread(&dc, &hc, r_mkt, a.maturity)?;
    let direction = match a.direction {
        Side::Payer => "payer",
        Side::Receiver => "receiver",
    };
    let value = json!({
        "direction": direction,
        "notional": n.json(a.notional),
        "maturity_years": n.json(a.maturity),
        "swap_rate_pct": n.json(a.swap_rate),
        "market_rate_pct": n.json(a.market_rate),
        "cds_spread_bp": n.json(a.cds_spread),
        "par_cds_spread_bp": n.json(basis_points(par)),
        "risky_annuity": n.json(rpv01),
        "pv": n.json(pv),
        "pv_protection_leg_form": n.json(pv_direct),
    });
    emit(out, a.format, &value, n)
}

fn scan_quotes(a: &ScanArgs, n: Numbers, out: &mut dyn Write) -> Outcome {
    let rows = parse_quotes(open(&a.quotes)?)
        .map_err(|e| Failure(format!("{}: {e}", a.quotes.display())))?;
    let report = scan(&rows, a.threshold / PCT);
    write_scan(&report, a.format, n, out)?;
    Ok(if report.any_flagged() {
        EXIT_ARBITRAGE
    } else {
        EXIT_OK
    })
}

const SCAN_HEADER: [&str; 9] = [
    "ticker",
    "quoted_recovery_pct",
    "cds_spread_bp",
    "dds_zero_recovery_bp",
    "theoretical_dds_bp",
    "implied_recovery_pct",
    "gap_pp",
    "arbitrage_flag",
    "diagnostic",
];

fn write_scan(
    report: &ScanReport,
    format: ScanFormat,
    n: Numbers,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match format {
        ScanFormat::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "ticker": r.ticker,
                        "quoted_recovery_pct": n.json(percent(r.quoted_recovery)),
                        "cds_spread_bp": n.json(basis_points(r.cds_spread)),
                        "dds_zero_recovery_bp": n.opt_json(r.dds_zero_spread.map(basis_points)),
                        "theoretical_dds_bp": n.json(basis_points(r.theoretical_dds)),
                        "implied_recovery_pct": n.opt_json(r.implied_recovery.map(percent)),
                        "gap_pp": n.opt_json(r.gap.map(percent)),
                        "arbitrage_flag": r.arbitrage_flag,
                        "diagnostic": r.diagnostic,
                    })
                })
                .collect();
            let value = json!({
                "gap_threshold_pp": n.json(percent(report.gap_threshold)),
                "rows": rows,
            });
            emit_json(out, &value)?;
        }
        ScanFormat::Csv | ScanFormat::Table => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.ticker.clone(),
                        n.text(percent(r.quoted_recovery)),
                        n.text(basis_points(r.cds_spread)),
                        n.opt_text(r.dds_zero_spread.map(basis_points)),
                        n.text(basis_points(r.theoretical_dds)),
                        n.opt_text(r.implied_recovery.map(percent)),
                        n.opt_text(r.gap.map(percent)),
                        r.arbitrage_flag.to_string(),
                        r.diagnostic.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            if matches!(format, ScanFormat::Csv) {
                let mut writer = csv::Writer::from_writer(&mut *out);
                writer.write_record(SCAN_HEADER)?;
                for row in &rows {
                    writer.write_record(row)?;
                }
                writer.flush()?;
            } else {
                write!(out, "{}", output::table(&SCAN_HEADER, &rows))?;
                let flagged = report.rows.iter().filter(|r| r.arbitrage_flag).count();
                writeln!(
                    out,
                    "\n{} rows, {flagged} flagged (threshold {} pp)",
                    report.rows.len(),
                    n.text(percent(report.gap_threshold))
                )?;
            }
        }
    }
    Ok(())
}

fn replicate(a: &ReplicateArgs, n: Numbers, out: &mut dyn Write) -> Outcome {
    let report = verify_replication(a.swap_rate / PCT, a.dds_recovery / PCT, a.cds_spread / BP)?;
    match a.format {
        Format::Json => emit_json(out, &replication_json(&report, n)),
        Format::Table => {
            write!(out, "{}", replication_table(&report, n))?;
            Ok(EXIT_OK)
        }
    }
}

fn replication_json(report: &ReplicationReport, n: Numbers) -> Value {
    let p = &report.portfolio;
    json!({
        "swap_rate_pct": n.json(percent(p.r_swap)),
        "dds_recovery_pct": n.json(percent(p.r_dds)),
        "cds_spread_bp": n.json(basis_points(p.s_cds)),
        "dds_spread_bp": n.json(basis_points(p.s_dds)),
        "hedge_ratio_cds": n.json(p.ratios.cds),
        "hedge_ratio_dds": n.json(p.ratios.dds),
        "net_premium_bp": n.json(basis_points(report.net_premium)),
        "default_cash_flow_at_zero_recovery": n.json(p.default_cash_flow(0.0)),
        "recovery_coefficient": n.json(report.recovery_coefficient),
        "max_default_cash_flow_deviation": n.json(report.max_default_deviation),
        "default_flow_ok": report.default_flow_ok(),
        "premium_ok": report.premium_ok(),
        "passed": report.passed(),
    })
}

/// Legs in rows; premiums in bp per annum, payoffs per unit recovery swap
/// notional.
fn replication_table(report: &ReplicationReport, n: Numbers) -> String {
    let p = &report.portfolio;
    let rows = vec![
        vec![
            "Payer recovery swap".into(),
            n.text(1.0),
            "0".into(),
            format!("{} - R", n.text(p.r_swap)),
            "0".into(),
        ],
        vec![
            "Buy digital CDS".into(),
            n.text(p.ratios.dds),
            n.text(-basis_points(p.s_dds)),
            n.text(p.ratios.dds * (1.0 - p.r_dds)),
            "0".into(),
        ],
        vec![
            "Sell conventional CDS".into(),
            n.text(p.ratios.cds),
            n.text(basis_points(p.s_cds)),
            format!("-{} * (1 - R)", n.text(p.ratios.cds)),
            "0".into(),
        ],
        vec![
            "Net".into(),
            String::new(),
            n.text(basis_points(report.net_premium)),
            format!(
                "{} + {} * R",
                n.text(p.default_cash_flow(0.0)),
                n.text(report.recovery_coefficient)
            ),
            "0".into(),
        ],
    ];
    let header = [
        "leg",
        "notional",
        "premium_bp",
        "payoff_on_default",
        "payoff_no_default",
    ];
    let mut text = output::table(&header, &rows);
    text.push_str(&format!(
        "\nmax |default cash flow| over recovery grid: {} (tolerance {DEFAULT_FLOW_TOLERANCE:e})\n",
        n.text(report.max_default_deviation)
    ));
    text.push_str(&format!(
        "|net premium|: {} (tolerance {PREMIUM_TOLERANCE:e})\n",
        n.text(report.net_premium.abs())
    ));
    text.push_str(&format!(
        "replication: {}\n",
        if report.passed() { "PASS" } else { "FAIL" }
    ));
    text
}

fn fair_rate(a: &FairRateArgs, n: Numbers, out: &mut dyn Write) -> Outcome {
    let (mean, stdev) = (a.mean / PCT, a.stdev / PCT);
    let dist = RecoveryDistribution::new(mean, stdev, a.lo / PCT, a.hi / PCT)?;
    let exact = fair_rate_exact(&dist)?;
    let approx = fair_rate_approx(mean, stdev)?;
    let premium = convexity_premium(mean, stdev)?;
    let mc = fair_rate_monte_carlo(
        &dist,
        MonteCarloConfig {
            draws: a.draws,
            seed: a.seed,
            parallel: true,
        },
    )?;
    let value = json!({
        "mean_pct": n.json(a.mean),
        "stdev_pct": n.json(a.stdev),
        "support_lo_pct": n.json(a.lo),
        "support_hi_pct": n.json(a.hi),
        "truncated_mean_pct": n.json(percent(exact.truncated_mean)),
        "exact_rate_pct": n.json(percent(exact.rate)),
        "quadrature_order": exact.order,
        "approx_rate_pct": n.json(percent(approx.first_order)),
        "approx_rate_intermediate_pct": n.json(percent(approx.intermediate)),
        "convexity_premium_pct": n.json(percent(premium)),
        "exact_minus_approx_pp": n.json(percent(exact.rate - approx.first_order)),
        "monte_carlo_rate_pct": n.json(percent(mc.rate)),
        "monte_carlo_std_error_pct": n.json(percent(mc.std_error)),
        "monte_carlo_draws": mc.draws,
        "monte_carlo_seed": mc.seed,
    });
    emit(out, a.format, &value, n)
}

fn fair_dds(a: &FairDdsArgs, n: Numbers, out: &mut dyn Write) -> Outcome {
    let (s_cds, r_dds) = (a.cds_spread / BP, a.dds_recovery / PCT);
    let (mean, stdev) = (a.mean / PCT, a.stdev / PCT);
    let with_premium = fair_dds_spread(s_cds, r_dds, mean, stdev)?;
    let without = dds_spread_from_cds(s_cds, mean, r_dds)?;
    let value = json!({
        "cds_spread_bp": n.json(a.cds_spread),
        "dds_recovery_pct": n.json(a.dds_recovery),
        "mean_pct": n.json(a.mean),
        "stdev_pct": n.json(a.stdev),
        "fair_dds_spread_bp": n.json(basis_points(with_premium)),
        "dds_spread_at_mean_recovery_bp": n.json(basis_points(without)),
        "convexity_premium_pct": n.json(percent(convexity_premium(mean, stdev)?)),
        "relative_gamma": n.json(dds_gamma(mean)?),
    });
    emit(out, a.format, &value, n)
}

fn scenario_rate(a: &ScenarioArgs, n: Numbers, out: &mut dyn Write) -> Outcome {
    let set = ScenarioSet::from_csv(open(&a.scenarios)?)
        .map_err(|e| Failure(format!("{}: {e}", a.scenarios.display())))?;
    let rate = fair_rate_scenarios(&set)?;
    let mut value = json!({
        "scenarios": set.scenarios().len(),
        "fair_rate_pct": n.json(percent(rate)),
    });
    if let (Some(discount), Some(hazard), Some(u), Some(maturity)) =
        (&a.discount, &a.hazard, a.u, a.maturity)
    {
        let dc = read_discount(discount)?;
        let hc_long = read_hazard(hazard)?;
        let hc_short = match &a.hazard_short {
            Some(path) => read_hazard(path)?,
            None => hc_long.clone(),
        };
        let r_swap = a.swap_rate.map_or(rate, |r| r / PCT);
        let residual =
            par_consistency_residual(&dc, &hc_short, &hc_long, &set, r_swap, u, maturity)?;
        let map = value.as_object_mut().expect("object literal");
        map.insert("swap_rate_pct".into(), n.json(percent(r_swap)));
        map.insert("intermediate_date_years".into(), n.json(u));
        map.insert("maturity_years".into(), n.json(maturity));
        map.insert("residual_short_term".into(), n.json(residual.short_term));
        map.insert(
            "residual_scenario_term".into(),
            n.json(residual.residual_term),
        );
        map.insert("residual_total".into(), n.json(residual.total()));
    }
    emit(out, a.format, &value, n)
}
