use std::f64::consts::{LN_10, LOG2_E};
use std::io::Write;

use clap::ValueEnum;
use ppv_core::bounds::{
    converse_error_with, converse_rate_with, excess_db_from_rate, high_snr_excess, kappa_beta_rate,
    linear_excess_approx, min_ebn0, normal_approx_rate, omega_for_ebn0, BoundOptions,
    BoundQuery, BoundResult, MinEbN0,
};
use ppv_core::presets::{db_grid, Sweep};
use ppv_core::specfun::{ln_gaussian_q, Truncation};
use ppv_core::temme::{make_threshold, ChannelParams, Strategy};
use ppv_core::Error;
use rayon::prelude::*;

pub const HEADER: [&str; 13] = [
    "n",
    "snr_db",
    "snr_kind",
    "pe_target",
    "method",
    "rate_bits",
    "spectral_eff",
    "log10_pe_lower",
    "gamma_star",
    "lambda_prime",
    "certified",
    "status",
    "excess_db",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SnrKind {
    Symbol,
    Bit,
}

impl SnrKind {
    fn label(self) -> &'static str {
        match self {
            SnrKind::Symbol => "symbol",
            SnrKind::Bit => "bit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    Auto,
    Oracle,
    Integral,
    Series,
    Closed1,
    Closed2,
    NormalApprox,
    KappaBeta,
}

impl MethodName {
    fn label(self) -> &'static str {
        match self {
            MethodName::Auto => "auto",
            MethodName::Oracle => "oracle",
            MethodName::Integral => "integral",
            MethodName::Series => "series",
            MethodName::Closed1 => "closed1",
            MethodName::Closed2 => "closed2",
            MethodName::NormalApprox => "normal-approx",
            MethodName::KappaBeta => "kappa-beta",
        }
    }

    fn strategy(self) -> Option<Strategy> {
        match self {
            MethodName::Auto => Some(Strategy::Auto),
            MethodName::Oracle => Some(Strategy::Oracle),
            MethodName::Integral => Some(Strategy::Integral),
            MethodName::Series => Some(Strategy::Series(Truncation::Auto)),
            MethodName::Closed1 => Some(Strategy::ClosedForm(1)),
            MethodName::Closed2 => Some(Strategy::ClosedForm(2)),
            MethodName::NormalApprox | MethodName::KappaBeta => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub sweep: Sweep,
    pub n_list: Vec<u64>,
    pub snr_start: f64,
    pub snr_stop: f64,
    pub snr_step: f64,
    pub snr_kind: SnrKind,
    pub pe: f64,
    pub rate: f64,
    pub methods: Vec<MethodName>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err("block lengths must be a non-empty list of positive integers".into());
        }
        if !(self.snr_step > 0.0) {
            return Err(format!("SNR step must be positive, got {}", self.snr_step));
        }
        if self.sweep != Sweep::HighSnrAsymptote && self.snr_grid().is_empty() {
            return Err("SNR grid is empty".into());
        }
        if !(self.pe > 0.0 && self.pe < 0.5) {
            return Err(format!("error probability must lie in (0, 1/2), got {}", self.pe));
        }
        if !(self.rate > 0.0) || !self.rate.is_finite() {
            return Err(format!("rate must be positive, got {}", self.rate));
        }
        if self.methods.is_empty() {
            return Err("no methods selected".into());
        }
        if self.sweep == Sweep::ExcessPower && self.snr_kind == SnrKind::Bit {
            return Err("excess-power sweeps take a per-symbol SNR grid".into());
        }
        if self.sweep == Sweep::RateVsEbn0 && self.snr_kind == SnrKind::Symbol {
            return Err("rate-vs-ebn0 sweeps take an Eb/N0 grid; use rate-vs-snr for symbol SNR".into());
        }
        Ok(())
    }

    pub fn snr_grid(&self) -> Vec<f64> {
        db_grid(self.snr_start, self.snr_stop, self.snr_step)
    }
}

/// One CSV row, already formatted; empty strings are blank cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: u64,
    pub snr_db: String,
    pub snr_kind: &'static str,
    pub pe_target: String,
    pub method: &'static str,
    pub rate_bits: String,
    pub spectral_eff: String,
    pub log10_pe_lower: String,
    pub gamma_star: String,
    pub lambda_prime: String,
    pub certified: &'static str,
    pub status: String,
    pub excess_db: String,
}

impl Row {
    fn new(n: u64, method: &'static str) -> Self {
        Row {
            n,
            snr_db: String::new(),
            snr_kind: "",
            pe_target: String::new(),
            method,
            rate_bits: String::new(),
            spectral_eff: String::new(),
            log10_pe_lower: String::new(),
            gamma_star: String::new(),
            lambda_prime: String::new(),
            certified: "",
            status: "ok".into(),
            excess_db: String::new(),
        }
    }

    fn fields(&self) -> [String; 13] {
        [
            self.n.to_string(),
            self.snr_db.clone(),
            self.snr_kind.to_string(),
            self.pe_target.clone(),
            self.method.to_string(),
            self.rate_bits.clone(),
            self.spectral_eff.clone(),
            self.log10_pe_lower.clone(),
            self.gamma_star.clone(),
            self.lambda_prime.clone(),
            self.certified.to_string(),
            self.status.clone(),
            self.excess_db.clone(),
        ]
    }

    fn fail(mut self, e: &Error) -> Self {
        self.status = format!("error:{}", slug(e));
        self
    }

    fn bound(mut self, b: &BoundResult, certify: bool) -> Self {
        self.gamma_star = num(b.gamma_star);
        self.lambda_prime = num(b.lambda_prime_star);
        self.status = b.status.to_string();
        if certify {
            self.certified = if b.certified_bracket.is_some() { "true" } else { "false" };
        }
        self
    }

    fn with_rate(mut self, rate: f64) -> Self {
        self.rate_bits = num(rate);
        self.spectral_eff = num(2.0 * rate);
        self
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn slug(e: &Error) -> &'static str {
    match e {
        Error::Domain { .. } => "domain",
        Error::WindowViolation { .. } => "window_violation",
        Error::OracleRange { .. } => "oracle_range",
        Error::Pole { .. } => "pole",
        Error::OrderTwoBreakdown { .. } => "order_two_breakdown",
        Error::Quadrature { .. } => "quadrature",
        Error::NoBracket { .. } => "out_of_range",
        Error::ZeroLeading => "zero_leading",
        Error::NonFinite { .. } => "non_finite",
        Error::BelowFloor => "below_floor",
    }
}

fn options(method: MethodName) -> Option<BoundOptions> {
    method.strategy().map(|strategy| BoundOptions {
        strategy,
        certify: method == MethodName::Auto,
        ..BoundOptions::default()
    })
}

/// Every row of the sweep, in `n`, SNR, method order. Points are evaluated
/// in parallel and collected by index, so the output does not depend on
/// the thread count.
pub fn evaluate(cfg: &SweepConfig) -> Vec<Row> {
    match cfg.sweep {
        Sweep::HighSnrAsymptote => cfg.n_list.par_iter().flat_map_iter(|&n| high_snr_rows(cfg, n)).collect(),
        Sweep::RateVsEbn0 => ebn0_rows(cfg),
        Sweep::RateVsSnr if cfg.snr_kind == SnrKind::Bit => ebn0_rows(cfg),
        _ => {
            let grid = cfg.snr_grid();
            let points: Vec<(u64, f64)> =
                cfg.n_list.iter().flat_map(|&n| grid.iter().map(move |&s| (n, s))).collect();
            points
                .par_iter()
                .flat_map_iter(|&(n, snr)| point_rows(cfg, n, snr))
                .collect()
        }
    }
}

fn base(cfg: &SweepConfig, n: u64, snr_db: f64, method: &'static str) -> Row {
    let mut row = Row::new(n, method);
    row.snr_db = num(snr_db);
    row.snr_kind = cfg.snr_kind.label();
    row.pe_target = match cfg.sweep {
        Sweep::PerVsSnr => String::new(),
        _ => num(cfg.pe),
    };
    row
}

fn point_rows(cfg: &SweepConfig, n: u64, snr_db: f64) -> Vec<Row> {
    if cfg.sweep == Sweep::PerVsSnr && n == 1 {
        return vec![per_n1_row(cfg, snr_db)];
    }
    cfg.methods
        .iter()
        .map(|&m| {
            let row = base(cfg, n, snr_db, m.label());
            match cfg.sweep {
                Sweep::PerVsSnr => per_row(cfg, row, n, snr_db, m),
                Sweep::ExcessPower => rate_row(cfg, row, n, db_to_linear(snr_db), m, true),
                _ => rate_row(cfg, row, n, db_to_linear(snr_db), m, false),
            }
        })
        .collect()
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn rate_row(cfg: &SweepConfig, row: Row, n: u64, omega: f64, m: MethodName, excess: bool) -> Row {
    let finish = |mut row: Row, rate: f64| {
        if excess && row.status != "below_floor" {
            row.excess_db = num(excess_db_from_rate(omega, rate));
        }
        row.with_rate(rate)
    };
    match m {
        MethodName::NormalApprox => match normal_approx_rate(n, omega, cfg.pe) {
            Ok(r) => finish(row, r),
            Err(e) => row.fail(&e),
        },
        MethodName::KappaBeta => match kappa_beta_rate(n, omega, cfg.pe, Strategy::Auto) {
            Ok(kb) => {
                let mut row = finish(row, kb.rate_bits);
                row.gamma_star = num(kb.gamma);
                if let Ok(p) = ChannelParams::new(omega) {
                    if let Ok(g) = make_threshold(kb.gamma, &p) {
                        row.lambda_prime = num(g.lambda_prime);
                    }
                }
                row
            }
            Err(e) => row.fail(&e),
        },
        _ => {
            let opts = options(m).expect("strategy-backed method");
            match BoundQuery::rate(n, omega, cfg.pe).and_then(|q| converse_rate_with(&q, &opts)) {
                Ok(b) => finish(row.bound(&b, opts.certify), b.rate_bits),
                Err(e) => row.fail(&e),
            }
        }
    }
}

fn per_n1_row(cfg: &SweepConfig, snr_db: f64) -> Row {
    let mut row = base(cfg, 1, snr_db, "n1-reference");
    let omega = symbol_snr(cfg, snr_db);
    row.rate_bits = num(cfg.rate);
    row.spectral_eff = num(2.0 * cfg.rate);
    row.log10_pe_lower = num(ln_gaussian_q(omega.sqrt()) / LN_10);
    row
}

/// Per-symbol SNR for an error sweep, where the rate is fixed.
fn symbol_snr(cfg: &SweepConfig, snr_db: f64) -> f64 {
    match cfg.snr_kind {
        SnrKind::Symbol => db_to_linear(snr_db),
        SnrKind::Bit => db_to_linear(snr_db) * 2.0 * cfg.rate,
    }
}

fn per_row(cfg: &SweepConfig, row: Row, n: u64, snr_db: f64, m: MethodName) -> Row {
    let omega = symbol_snr(cfg, snr_db);
    let row = row.with_rate(cfg.rate);
    match m {
        MethodName::NormalApprox => match normal_approx_log10_pe(n, omega, cfg.rate) {
            Ok(l) => Row { log10_pe_lower: num(l), ..row },
            Err(e) => row.fail(&e),
        },
        MethodName::KappaBeta => Row { status: "unsupported".into(), ..row },
        _ => {
            let opts = options(m).expect("strategy-backed method");
            match BoundQuery::error(n, omega, cfg.rate).and_then(|q| converse_error_with(&q, &opts)) {
                Ok(b) => {
                    let mut row = row.bound(&b, opts.certify);
                    row.log10_pe_lower = num(b.log_pe.log10());
                    row
                }
                Err(e) => row.fail(&e),
            }
        }
    }
}

/// The normal approximation solved for the error probability at rate `R`.
fn normal_approx_log10_pe(n: u64, omega: f64, rate: f64) -> ppv_core::Result<f64> {
    let nf = n as f64;
    let c = ChannelParams::new(omega)?.capacity_bits;
    let dispersion = omega * (2.0 + omega) / (2.0 * nf * (1.0 + omega).powi(2));
    let x = (c - rate + nf.log2() / (2.0 * nf)) / (LOG2_E * dispersion.sqrt());
    Ok(ln_gaussian_q(x) / LN_10)
}

fn ebn0_rows(cfg: &SweepConfig) -> Vec<Row> {
    let grid = cfg.snr_grid();
    let pairs: Vec<(u64, MethodName)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| cfg.methods.iter().map(move |&m| (n, m)))
        .collect();
    let minima: Vec<Option<ppv_core::Result<MinEbN0>>> = pairs
        .par_iter()
        .map(|&(n, m)| m.strategy().map(|s| min_ebn0(n, cfg.pe, s)))
        .collect();
    let points: Vec<(usize, f64)> = cfg
        .n_list
        .iter()
        .enumerate()
        .flat_map(|(i, _)| grid.iter().map(move |&s| (i, s)))
        .collect();
    let methods = cfg.methods.len();
    points
        .par_iter()
        .flat_map_iter(|&(i, snr)| {
            let n = cfg.n_list[i];
            (0..methods)
                .map(|j| {
                    let m = cfg.methods[j];
                    let row = base(cfg, n, snr, m.label());
                    match &minima[i * methods + j] {
                        None => Row { status: "unsupported".into(), ..row },
                        Some(Err(e)) => row.fail(e),
                        Some(Ok(min)) if snr < min.ebn0_db => Row { status: "below_curve_minimum".into(), ..row },
                        Some(Ok(min)) => {
                            let s = m.strategy().expect("strategy-backed method");
                            match omega_for_ebn0(n, cfg.pe, snr, min, s) {
                                Ok((_, b)) => row.bound(&b, false).with_rate(b.rate_bits),
                                Err(e) => row.fail(&e),
                            }
                        }
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn high_snr_rows(cfg: &SweepConfig, n: u64) -> Vec<Row> {
    let mut exact = Row::new(n, "high-snr");
    exact.pe_target = num(cfg.pe);
    let exact = match high_snr_excess(n, cfg.pe) {
        Ok(h) => Row { excess_db: num(h.delta_db), lambda_prime: num(h.lambda_prime), ..exact },
        Err(e) => exact.fail(&e),
    };
    let mut lin = Row::new(n, "linear");
    lin.pe_target = num(cfg.pe);
    let lin = match linear_excess_approx(n, cfg.pe) {
        Ok(d) => Row { excess_db: num(d), ..lin },
        Err(e) => lin.fail(&e),
    };
    vec![exact, lin]
}

pub fn write_csv<W: Write>(sink: W, rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(sweep: Sweep) -> SweepConfig {
        SweepConfig {
            sweep,
            n_list: vec![100, 1000],
            snr_start: 0.0,
            snr_stop: 1.0,
            snr_step: 0.5,
            snr_kind: SnrKind::Symbol,
            pe: 1e-5,
            rate: 0.5,
            methods: vec![MethodName::Auto, MethodName::NormalApprox],
        }
    }

    #[test]
    fn config_validation() {
        assert!(cfg(Sweep::RateVsSnr).validate().is_ok());
        let bad = SweepConfig { snr_step: 0.0, ..cfg(Sweep::RateVsSnr) };
        assert!(bad.validate().is_err());
        let bad = SweepConfig { pe: 0.5, ..cfg(Sweep::RateVsSnr) };
        assert!(bad.validate().is_err());
        let bad = SweepConfig { snr_start: 2.0, ..cfg(Sweep::RateVsSnr) };
        assert!(bad.validate().is_err());
        let bad = SweepConfig { n_list: vec![], ..cfg(Sweep::RateVsSnr) };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn row_order_is_n_then_snr_then_method() {
        let rows = evaluate(&cfg(Sweep::RateVsSnr));
        assert_eq!(rows.len(), 2 * 3 * 2);
        let keys: Vec<(u64, String, &str)> = rows.iter().map(|r| (r.n, r.snr_db.clone(), r.method)).collect();
        assert_eq!(keys[0], (100, "0".to_string(), "auto"));
        assert_eq!(keys[1], (100, "0".to_string(), "normal-approx"));
        assert_eq!(keys[2], (100, "0.5".to_string(), "auto"));
        assert_eq!(keys[6].0, 1000);
    }

    #[test]
    fn failures_land_in_status() {
        let c = SweepConfig { n_list: vec![1000], methods: vec![MethodName::Oracle], ..cfg(Sweep::RateVsSnr) };
        let rows = evaluate(&c);
        assert!(rows.iter().all(|r| r.status == "error:oracle_range"), "{rows:?}");
    }

    #[test]
    fn normal_approx_inversion_is_consistent() {
        let (n, om) = (500u64, 2.0);
        let r = normal_approx_rate(n, om, 1e-4).unwrap();
        let l = normal_approx_log10_pe(n, om, r).unwrap();
        assert!((l - (-4.0)).abs() < 1e-9, "{l}");
    }

    #[test]
    fn method_labels() {
        assert_eq!(MethodName::NormalApprox.label(), "normal-approx");
        assert_eq!(MethodName::Closed2.label(), "closed2");
    }
}
