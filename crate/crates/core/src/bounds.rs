//! Converse rate and error bounds, the normal approximation, the κβ
//! achievability bound, excess power and its high-SNR asymptotics.

use std::f64::consts::{LN_10, LN_2, LOG2_E};
use std::fmt;

use crate::certify::{certify_sandwich, DEFAULT_GRID_SIZE};
use crate::error::{domain, Error, Result};
use crate::logprob::{LogProb, Method};
use crate::roots::{find_root, golden_max, RootOptions};
use crate::specfun::{erf, erf_inv, gaussian_q, gaussian_q_inv, ln_scaled_q};
use crate::temme::{
    in_window, log_prob, make_threshold, validity_window, ChannelParams, Kind, Strategy, ThresholdGeometry,
};

/// Residual tolerance of the threshold solves, relative to the target log-probability.
pub const SOLVE_REL_TOL: f64 = 1e-12;
/// Largest threshold the solver will probe; `sinh γ` overflows beyond ~710.
const GAMMA_CEILING: f64 = 700.0;
const BRACKET_STEPS: usize = 120;
const KAPPA_GRID: usize = 24;
const KAPPA_ALPHA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// Block error probability, for rate queries.
    ErrorProb(f64),
    /// Rate in bits per channel use, for error queries.
    Rate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub n: u64,
    pub omega: f64,
    pub target: Target,
}

impl BoundQuery {
    /// Rate query; requires `0 < pe < ½`.
    pub fn rate(n: u64, omega: f64, pe: f64) -> Result<Self> {
        check_common(n, omega)?;
        if !(pe > 0.0 && pe < 0.5) {
            return Err(domain("target error probability", pe));
        }
        Ok(BoundQuery { n, omega, target: Target::ErrorProb(pe) })
    }

    /// Error query; requires `rate ≥ 1/n`.
    pub fn error(n: u64, omega: f64, rate: f64) -> Result<Self> {
        check_common(n, omega)?;
        if !(rate >= 1.0 / n as f64) || !rate.is_finite() {
            return Err(domain("target rate", rate));
        }
        Ok(BoundQuery { n, omega, target: Target::Rate(rate) })
    }

    pub fn params(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.omega)
    }
}

fn check_common(n: u64, omega: f64) -> Result<()> {
    if n == 0 {
        return Err(domain("block length", 0.0));
    }
    ChannelParams::new(omega).map(|_| ())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The converse rate fell below `1/n` and was set to zero.
    BelowFloor,
    /// The solved threshold left the validity window; the integral or the
    /// oracle handled the step term.
    WindowFallback,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::BelowFloor => "below_floor",
            Status::WindowFallback => "window_fallback",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    /// `R̄` for rate queries, the target rate for error queries.
    pub rate_bits: f64,
    /// `P_MD` at the solved threshold: the target for rate queries, `P̲e` for error queries.
    pub log_pe: LogProb,
    pub gamma_star: f64,
    pub lambda_prime_star: f64,
    /// `2 R̄`.
    pub spectral_efficiency: f64,
    /// In bits for rate queries (`R̄^(1)`, `R̄^(2)`), as `ln P` for error
    /// queries (`ln P̲e^(2)`, `ln P̲e^(1)`). Present only when the (2,1)
    /// sandwich holds at every threshold involved.
    pub certified_bracket: Option<(f64, f64)>,
    pub method_used: Method,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    pub strategy: Strategy,
    /// Attach the certified bracket when possible.
    pub certify: bool,
    pub grid_size: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            strategy: Strategy::Auto,
            certify: true,
            grid_size: DEFAULT_GRID_SIZE,
        }
    }
}

fn needs_window(strategy: Strategy) -> bool {
    matches!(strategy, Strategy::Series(_) | Strategy::ClosedForm(_))
}

fn prob_at(gamma: f64, params: &ChannelParams, kind: Kind, n: u64, strategy: Strategy) -> Result<LogProb> {
    let g = make_threshold(gamma, params)?;
    log_prob(&g, params, kind, n, strategy)
}

/// Root of an increasing `f` on the open interval `(lo_lim, hi_lim)`,
/// starting from `guess` and expanding geometrically until bracketed.
fn solve_increasing<F>(mut f: F, guess: f64, step: f64, lo_lim: f64, hi_lim: f64, f_abs: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f0 = f(guess)?;
    if f0 == 0.0 {
        return Ok(guess);
    }
    let down = f0 > 0.0;
    let (mut x, mut fx) = (guess, f0);
    let mut h = step;
    let mut found = None;
    for _ in 0..BRACKET_STEPS {
        let mut nx = if down { x - h } else { x + h };
        if down && nx <= lo_lim {
            nx = 0.5 * (x + lo_lim);
        }
        if !down && nx >= hi_lim {
            nx = 0.5 * (x + hi_lim);
        }
        if nx == x {
            break;
        }
        let fn_ = f(nx)?;
        if (fn_ > 0.0) != down || fn_ == 0.0 {
            found = Some((nx, fn_));
            break;
        }
        x = nx;
        fx = fn_;
        h *= 2.0;
    }
    let Some((y, fy)) = found else {
        return Err(Error::NoBracket { lo: lo_lim, hi: hi_lim });
    };
    if fy == 0.0 {
        return Ok(y);
    }
    let (a, fa, b, fb) = if down { (y, fy, x, fx) } else { (x, fx, y, fy) };
    let opts = RootOptions { f_abs, ..RootOptions::default() };
    Ok(find_root(f, a, b, Some(fa), Some(fb), opts)?.x)
}

/// Search limits and a starting point clipped to them.
fn search_box(params: &ChannelParams, strategy: Strategy, guess: f64) -> (f64, f64, f64) {
    let (lo, hi) = if needs_window(strategy) {
        validity_window(params)
    } else {
        (0.0, GAMMA_CEILING)
    };
    let margin = if needs_window(strategy) { 1e-3 * (hi - lo) } else { 0.0 };
    let g = if guess > lo + margin && guess < hi - margin {
        guess
    } else if needs_window(strategy) {
        0.5 * (lo + hi)
    } else {
        0.5 * params.gamma_bar
    };
    (lo, hi, g)
}

/// Threshold with `ln P_MD(γ) = ln_target`.
fn solve_md(params: &ChannelParams, n: u64, ln_target: f64, strategy: Strategy) -> Result<f64> {
    let om = params.omega;
    let nf = n as f64;
    // normal-approximation starting point
    let qi = if ln_target < 0.5f64.ln() {
        gaussian_q_inv(ln_target.exp()).unwrap_or(0.0)
    } else {
        0.0
    };
    let spread = (om.powi(3) / (2.0 * nf * (1.0 + om).powi(2) * (2.0 + om))).sqrt();
    let d = qi * spread;
    let (lo, hi, guess) = search_box(params, strategy, params.gamma_bar - d);
    let step = 0.5 * d.abs().max(spread).max(1e-6 * params.gamma_bar);
    let f_abs = SOLVE_REL_TOL * ln_target.abs().max(1e-300);
    solve_increasing(
        |g| Ok(prob_at(g, params, Kind::Md, n, strategy)?.log_value - ln_target),
        guess,
        step,
        lo,
        hi,
        f_abs,
    )
}

/// Threshold with `ln P_FA(γ) = ln_target`.
fn solve_fa(params: &ChannelParams, n: u64, ln_target: f64, strategy: Strategy) -> Result<f64> {
    let om = params.omega;
    let gb = params.gamma_bar;
    // first-order rate relation R ln 2 ≈ γ̄ - ((2+Ω)/Ω)(γ̄ - γ)
    let r_nats = -ln_target / n as f64;
    let (lo, hi, guess) = search_box(params, strategy, gb - om / (2.0 + om) * (gb - r_nats));
    let step = 0.5 * (gb - guess).abs().max(1e-3 * gb);
    let f_abs = SOLVE_REL_TOL * ln_target.abs().max(1e-300);
    solve_increasing(
        |g| Ok(ln_target - prob_at(g, params, Kind::Fa, n, strategy)?.log_value),
        guess,
        step,
        lo,
        hi,
        f_abs,
    )
}

fn sandwich_holds(geoms: &[ThresholdGeometry], params: &ChannelParams, grid: usize) -> bool {
    geoms
        .iter()
        .all(|g| certify_sandwich(g, params, 2, 1, grid).is_ok_and(|c| c.holds))
}

/// Converse bound `R̄ = -(1/n) log2 P_FA(γ*)` with `P_MD(γ*) = Pe`.
pub fn converse_rate(query: &BoundQuery) -> Result<BoundResult> {
    converse_rate_with(query, &BoundOptions::default())
}

pub fn converse_rate_with(query: &BoundQuery, opts: &BoundOptions) -> Result<BoundResult> {
    let Target::ErrorProb(pe) = query.target else {
        return Err(domain("rate query target", f64::NAN));
    };
    let params = query.params()?;
    let n = query.n;
    let gamma = solve_md(&params, n, pe.ln(), opts.strategy)?;
    let geom = make_threshold(gamma, &params)?;
    let md = log_prob(&geom, &params, Kind::Md, n, opts.strategy)?;
    let fa = log_prob(&geom, &params, Kind::Fa, n, opts.strategy)?;
    let mut rate = -fa.log2() / n as f64;
    let mut status = if in_window(gamma, &params) { Status::Ok } else { Status::WindowFallback };
    if rate < 1.0 / n as f64 {
        rate = 0.0;
        status = Status::BelowFloor;
    }
    let certified_bracket = if opts.certify && status == Status::Ok {
        rate_bracket(query, &params, &geom, opts)
    } else {
        None
    };
    Ok(BoundResult {
        rate_bits: rate,
        log_pe: md,
        gamma_star: gamma,
        lambda_prime_star: geom.lambda_prime,
        spectral_efficiency: 2.0 * rate,
        certified_bracket,
        method_used: fa.method,
        status,
    })
}

/// `(R̄^(1), R̄^(2))` when both closed-form solves succeed and the (2,1)
/// sandwich holds at the three thresholds involved.
fn rate_bracket(
    query: &BoundQuery,
    params: &ChannelParams,
    geom: &ThresholdGeometry,
    opts: &BoundOptions,
) -> Option<(f64, f64)> {
    let sub = |order| BoundOptions {
        strategy: Strategy::ClosedForm(order),
        certify: false,
        grid_size: opts.grid_size,
    };
    let r1 = converse_rate_with(query, &sub(1)).ok()?;
    let r2 = converse_rate_with(query, &sub(2)).ok()?;
    let g1 = make_threshold(r1.gamma_star, params).ok()?;
    let g2 = make_threshold(r2.gamma_star, params).ok()?;
    sandwich_holds(&[*geom, g1, g2], params, opts.grid_size).then_some((r1.rate_bits, r2.rate_bits))
}

/// Error lower bound `P̲e = P_MD(γ*)` with `-(1/n) log2 P_FA(γ*) = R`.
pub fn converse_error(query: &BoundQuery) -> Result<BoundResult> {
    converse_error_with(query, &BoundOptions::default())
}

pub fn converse_error_with(query: &BoundQuery, opts: &BoundOptions) -> Result<BoundResult> {
    let Target::Rate(rate) = query.target else {
        return Err(domain("error query target", f64::NAN));
    };
    let params = query.params()?;
    let n = query.n;
    let gamma = solve_fa(&params, n, -(n as f64) * rate * LN_2, opts.strategy)?;
    let geom = make_threshold(gamma, &params)?;
    let md = log_prob(&geom, &params, Kind::Md, n, opts.strategy)?;
    let status = if in_window(gamma, &params) { Status::Ok } else { Status::WindowFallback };
    let certified_bracket = if opts.certify && status == Status::Ok {
        error_bracket(query, &params, &geom, opts)
    } else {
        None
    };
    Ok(BoundResult {
        rate_bits: rate,
        log_pe: md,
        gamma_star: gamma,
        lambda_prime_star: geom.lambda_prime,
        spectral_efficiency: 2.0 * rate,
        certified_bracket,
        method_used: md.method,
        status,
    })
}

/// `(ln P̲e^(2), ln P̲e^(1))`, under the same conditions as the rate bracket.
fn error_bracket(
    query: &BoundQuery,
    params: &ChannelParams,
    geom: &ThresholdGeometry,
    opts: &BoundOptions,
) -> Option<(f64, f64)> {
    let sub = |order| BoundOptions {
        strategy: Strategy::ClosedForm(order),
        certify: false,
        grid_size: opts.grid_size,
    };
    let e1 = converse_error_with(query, &sub(1)).ok()?;
    let e2 = converse_error_with(query, &sub(2)).ok()?;
    let g1 = make_threshold(e1.gamma_star, params).ok()?;
    let g2 = make_threshold(e2.gamma_star, params).ok()?;
    sandwich_holds(&[*geom, g1, g2], params, opts.grid_size)
        .then_some((e2.log_pe.log_value, e1.log_pe.log_value))
}

/// Error probability `Q(√Ω)` of uncoded antipodal signalling, the `n = 1` reference point.
pub fn n1_reference_pe(omega: f64) -> f64 {
    gaussian_q(omega.sqrt())
}

/// `C - log2(e) Q⁻¹(Pe) √(Ω(2+Ω) / (2n(1+Ω)²)) + log2(n)/(2n)`.
pub fn normal_approx_rate(n: u64, omega: f64, pe: f64) -> Result<f64> {
    check_common(n, omega)?;
    let params = ChannelParams::new(omega)?;
    let nf = n as f64;
    let qi = gaussian_q_inv(pe)?;
    let dispersion = omega * (2.0 + omega) / (2.0 * nf * (1.0 + omega).powi(2));
    Ok(params.capacity_bits - LOG2_E * qi * dispersion.sqrt() + nf.log2() / (2.0 * nf))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaBeta {
    pub rate_bits: f64,
    /// Maximizing `α`.
    pub alpha: f64,
    pub gamma: f64,
}

/// κβ achievability: the maximum over `α ∈ (0, erf⁻¹(Pe))` of
/// `(1/n) log2 erf(kα) - (1/n) log2 P_FA(γ)`, with `P_MD(γ) = Pe - erf(α)`
/// and `k = √(1+2Ω)/(1+Ω)`.
///
/// A coarse grid locates the best cell, then golden-section search refines
/// it, so a mildly non-unimodal objective still lands on the best cell.
pub fn kappa_beta_rate(n: u64, omega: f64, pe: f64, strategy: Strategy) -> Result<KappaBeta> {
    check_common(n, omega)?;
    if !(pe > 0.0 && pe < 1.0) {
        return Err(domain("target error probability", pe));
    }
    let params = ChannelParams::new(omega)?;
    let nf = n as f64;
    let k = (1.0 + 2.0 * omega).sqrt() / (1.0 + omega);
    let a_max = erf_inv(pe)?;
    let eval = |a: f64| -> Result<(f64, f64)> {
        let md_target = pe - erf(a);
        if !(md_target > 0.0) {
            return Err(domain("kappa-beta alpha", a));
        }
        let gamma = solve_md(&params, n, md_target.ln(), strategy)?;
        let fa = prob_at(gamma, &params, Kind::Fa, n, strategy)?;
        Ok(((erf(k * a).log2() - fa.log2()) / nf, gamma))
    };
    let objective = |a: f64| -> f64 { eval(a).map_or(f64::NEG_INFINITY, |v| v.0) };

    let cells = KAPPA_GRID + 1;
    let nodes: Vec<f64> = (0..=cells).map(|i| a_max * i as f64 / cells as f64).collect();
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 1..cells {
        let v = objective(nodes[i]);
        if v > best.0 {
            best = (v, i);
        }
    }
    if best.0 == f64::NEG_INFINITY {
        return Err(Error::NoBracket { lo: 0.0, hi: a_max });
    }
    let i = best.1;
    let (a, v) = golden_max(|a| Ok(objective(a)), nodes[i - 1], nodes[i + 1], KAPPA_ALPHA_TOL, 200)?;
    let alpha = if v >= best.0 { a } else { nodes[i] };
    let (rate_bits, gamma) = eval(alpha)?;
    Ok(KappaBeta { rate_bits, alpha, gamma })
}

/// `10 log10 Ω - 10 log10(2^{2R} - 1)`.
pub fn excess_db_from_rate(omega: f64, rate_bits: f64) -> f64 {
    10.0 * omega.log10() - 10.0 * (2.0 * rate_bits * LN_2).exp_m1().log10()
}

/// Excess power of the converse bound over capacity, in dB.
pub fn excess_power_db(n: u64, pe: f64, omega: f64) -> Result<f64> {
    let r = converse_rate(&BoundQuery::rate(n, omega, pe)?)?;
    if r.status == Status::BelowFloor {
        return Err(Error::BelowFloor);
    }
    Ok(excess_db_from_rate(omega, r.rate_bits))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighSnr {
    pub delta_db: f64,
    /// `R̄ - ½ log2 Ω` in the limit `Ω → ∞`.
    pub rate_offset_bits: f64,
    pub lambda_prime: f64,
}

/// Large-SNR limit of the excess power and the rate offset. `λ′ > 1` solves
/// `q(√(n/2)(λ′-1)) exp(-n(λ′-1-ln λ′)/2) = Pe`, with `q(x) = e^{x²/2} Q(x)`.
pub fn high_snr_excess(n: u64, pe: f64) -> Result<HighSnr> {
    if n == 0 {
        return Err(domain("block length", 0.0));
    }
    if !(pe > 0.0 && pe < 0.5) {
        return Err(domain("target error probability", pe));
    }
    let nf = n as f64;
    let ln_pe = pe.ln();
    let root_n2 = (0.5 * nf).sqrt();
    // decreasing in d = λ′ - 1
    let f = |d: f64| -> Result<f64> { Ok(ln_scaled_q(root_n2 * d) - 0.5 * nf * (d - d.ln_1p()) - ln_pe) };
    let mut hi = 1.0;
    while f(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoBracket { lo: 0.0, hi });
        }
    }
    let opts = RootOptions { f_abs: 0.0, ..RootOptions::default() };
    let d = find_root(f, 0.0, hi, None, None, opts)?.x;
    let ln_q = ln_scaled_q(root_n2);
    Ok(HighSnr {
        delta_db: 20.0 / nf * ln_q / LN_10 + 10.0 * d.ln_1p() / LN_10,
        rate_offset_bits: -(ln_q / nf + 0.5 * d.ln_1p()) * LOG2_E,
        lambda_prime: 1.0 + d,
    })
}

/// `10 log10(e) √(2/n) Q⁻¹(Pe)`.
pub fn linear_excess_approx(n: u64, pe: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("block length", 0.0));
    }
    Ok(10.0 / LN_10 * (2.0 / n as f64).sqrt() * gaussian_q_inv(pe)?)
}

/// `C - log2(e) Q⁻¹(Pe) √(1/(2n))`.
pub fn rate_approx(n: u64, pe: f64, omega: f64) -> Result<f64> {
    check_common(n, omega)?;
    let c = ChannelParams::new(omega)?.capacity_bits;
    Ok(c - LOG2_E * gaussian_q_inv(pe)? / (2.0 * n as f64).sqrt())
}

/// Shannon limit of `Eb/N0` in dB, `10 log10 ln 2`.
pub fn shannon_limit_ebn0_db() -> f64 {
    10.0 * LN_2.log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinEbN0 {
    pub ebn0_db: f64,
    pub omega_db: f64,
    pub rate_bits: f64,
}

const EBN0_SCAN: (f64, f64, f64) = (-15.0, 15.0, 0.5);
const EBN0_DB_TOL: f64 = 1e-7;

fn converse_rate_fast(n: u64, omega: f64, pe: f64, strategy: Strategy) -> Result<BoundResult> {
    let opts = BoundOptions { strategy, certify: false, grid_size: DEFAULT_GRID_SIZE };
    converse_rate_with(&BoundQuery::rate(n, omega, pe)?, &opts)
}

/// `Eb/N0 = Ω/ρ` in dB at `Ω = 10^{x/10}`, with `ρ = 2R̄(Ω)`; infinite below the floor.
fn ebn0_at(n: u64, pe: f64, omega_db: f64, strategy: Strategy) -> Result<(f64, BoundResult)> {
    let r = converse_rate_fast(n, 10f64.powf(omega_db / 10.0), pe, strategy)?;
    let e = if r.status == Status::BelowFloor {
        f64::INFINITY
    } else {
        omega_db - 10.0 * r.spectral_efficiency.log10()
    };
    Ok((e, r))
}

/// Minimum over the SNR of the converse `Eb/N0`: coarse scan, then golden section.
pub fn min_ebn0(n: u64, pe: f64, strategy: Strategy) -> Result<MinEbN0> {
    let (start, stop, step) = EBN0_SCAN;
    let count = ((stop - start) / step).round() as usize;
    let xs: Vec<f64> = (0..=count).map(|i| start + step * i as f64).collect();
    let mut best = (f64::INFINITY, 0);
    for (i, &x) in xs.iter().enumerate() {
        let e = ebn0_at(n, pe, x, strategy).map_or(f64::INFINITY, |v| v.0);
        if e < best.0 {
            best = (e, i);
        }
    }
    let i = best.1;
    if !best.0.is_finite() || i == 0 || i == count {
        return Err(Error::NoBracket { lo: start, hi: stop });
    }
    let neg = |x: f64| Ok(-ebn0_at(n, pe, x, strategy).map_or(f64::INFINITY, |v| v.0));
    // golden_max tolerance is relative; an absolute one in dB is wanted here, so shift away from 0
    let shift = 100.0;
    let (x, _) = golden_max(|y| neg(y - shift), xs[i - 1] + shift, xs[i + 1] + shift, EBN0_DB_TOL / shift, 200)?;
    let x = x - shift;
    let (e, r) = ebn0_at(n, pe, x, strategy)?;
    Ok(MinEbN0 { ebn0_db: e, omega_db: x, rate_bits: r.rate_bits })
}

/// Solves `Eb/N0 = Ω/(2R̄(Ω))` for `Ω` on the branch above the minimum,
/// to `1e-9` relative in `Ω`.
pub fn omega_for_ebn0(
    n: u64,
    pe: f64,
    ebn0_db: f64,
    min: &MinEbN0,
    strategy: Strategy,
) -> Result<(f64, BoundResult)> {
    if ebn0_db < min.ebn0_db {
        return Err(domain("Eb/N0 below the minimum of the curve", ebn0_db));
    }
    let h = |x: f64| -> Result<f64> { Ok(ebn0_at(n, pe, x, strategy)?.0 - ebn0_db) };
    let lo = min.omega_db;
    let mut hi = lo.max(ebn0_db) + 1.0;
    let mut f_hi = h(hi)?;
    while f_hi <= 0.0 {
        hi += 4.0;
        if hi > 80.0 {
            return Err(Error::NoBracket { lo, hi });
        }
        f_hi = h(hi)?;
    }
    let f_lo = min.ebn0_db - ebn0_db;
    // 1e-9 relative in Ω is 10 log10(1 + 1e-9) ≈ 4.3e-9 dB
    let opts = RootOptions { x_abs: 4e-9, x_rel: 0.0, f_abs: 0.0, max_iter: 200 };
    let x = find_root(h, lo, hi, Some(f_lo), Some(f_hi), opts)?.x;
    let omega = 10f64.powf(x / 10.0);
    Ok((omega, converse_rate_fast(n, omega, pe, strategy)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate(n: u64, omega: f64, pe: f64) -> BoundResult {
        converse_rate(&BoundQuery::rate(n, omega, pe).unwrap()).unwrap()
    }

    #[test]
    fn query_validation() {
        assert!(BoundQuery::rate(0, 1.0, 1e-3).is_err());
        assert!(BoundQuery::rate(10, 0.0, 1e-3).is_err());
        assert!(BoundQuery::rate(10, 1.0, 0.5).is_err());
        assert!(BoundQuery::error(10, 1.0, 0.05).is_err());
        assert!(BoundQuery::error(10, 1.0, 0.1).is_ok());
        let q = BoundQuery::error(10, 1.0, 0.5).unwrap();
        assert!(converse_rate(&q).is_err());
    }

    #[test]
    fn approaches_capacity() {
        let r = rate(10_000_000, 1.0, 1e-5);
        assert!((0.495..=0.5).contains(&r.rate_bits), "{r:?}");
        assert_eq!(r.status, Status::Ok);
        assert_eq!(r.spectral_efficiency, 2.0 * r.rate_bits);
    }

    #[test]
    fn solved_threshold_meets_target() {
        for n in [30u64, 500, 5000] {
            let r = rate(n, 1.0, 1e-5);
            assert!((r.log_pe.log_value / 1e-5f64.ln() - 1.0).abs() < 1e-10, "n={n} {r:?}");
        }
    }

    #[test]
    fn monotone_in_pe_and_n() {
        assert!(rate(500, 1.0, 1e-3).rate_bits >= rate(500, 1.0, 1e-5).rate_bits);
        let rs: Vec<f64> = [100u64, 1000, 10_000].iter().map(|&n| rate(n, 1.0, 1e-5).rate_bits).collect();
        assert!(rs.windows(2).all(|w| w[0] < w[1]), "{rs:?}");
    }

    #[test]
    fn never_exceeds_capacity() {
        for db in [-2.0, 5.0, 20.0] {
            let om = 10f64.powf(db / 10.0);
            for n in [20u64, 300, 3000] {
                let r = rate(n, om, 1e-5).rate_bits;
                assert!(r >= 0.0 && r <= ChannelParams::new(om).unwrap().capacity_bits, "{db} {n} {r}");
            }
        }
    }

    #[test]
    fn below_floor_is_clamped() {
        let r = rate(10, 10f64.powf(-0.2), 1e-5);
        assert_eq!(r.status, Status::BelowFloor);
        assert_eq!(r.rate_bits, 0.0);
    }

    #[test]
    fn rate_and_error_are_dual() {
        let r = rate(200, 1.0, 1e-4);
        let e = converse_error(&BoundQuery::error(200, 1.0, r.rate_bits).unwrap()).unwrap();
        assert!((e.log_pe.log_value / 1e-4f64.ln() - 1.0).abs() < 1e-8, "{e:?}");
        assert!((e.gamma_star - r.gamma_star).abs() < 1e-8);
    }

    #[test]
    fn error_bound_decreases_with_snr() {
        let mut prev = f64::INFINITY;
        for db in [-1.0, 0.0, 1.0, 2.0, 3.0, 4.0] {
            let om = 10f64.powf(db / 10.0);
            let e = converse_error(&BoundQuery::error(1000, om, 0.5).unwrap()).unwrap();
            assert!(e.log_pe.log_value < prev, "db={db}");
            prev = e.log_pe.log_value;
        }
    }

    #[test]
    fn n1_marker() {
        assert!((n1_reference_pe(1.0) - gaussian_q(1.0)).abs() < 1e-16);
        assert!((n1_reference_pe(1.0) - 0.158_655_253_931_457).abs() < 1e-12);
    }

    #[test]
    fn normal_approximation_terms() {
        let (n, om, pe) = (2000u64, 1.0, 1e-3);
        let got = normal_approx_rate(n, om, pe).unwrap();
        let qi = 3.090_232_306_167_813_5;
        let want = 0.5 - qi / 2f64.ln() * (3.0f64 / 16000.0).sqrt() + (2000f64).log2() / 4000.0;
        assert!((got - want).abs() < 1e-12, "{got} {want}");
        let half = normal_approx_rate(n, om, 0.5).unwrap();
        assert!((half - 0.5 - (2000f64).log2() / 4000.0).abs() < 1e-12);
    }

    #[test]
    fn normal_approximation_below_converse() {
        for n in [100u64, 1000, 10_000] {
            let na = normal_approx_rate(n, 1.0, 1e-5).unwrap();
            assert!(na <= rate(n, 1.0, 1e-5).rate_bits, "n={n}");
        }
    }

    #[test]
    fn kappa_beta_below_converse_and_gap_shrinks() {
        let mut gaps = Vec::new();
        for n in [1000u64, 10_000, 100_000] {
            let kb = kappa_beta_rate(n, 1.0, 1e-5, Strategy::Auto).unwrap();
            let r = rate(n, 1.0, 1e-5).rate_bits;
            assert!(kb.rate_bits <= r, "n={n} {kb:?} {r}");
            assert!(kb.alpha > 0.0 && kb.alpha < erf_inv(1e-5).unwrap());
            gaps.push(r - kb.rate_bits);
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    }

    #[test]
    fn excess_power_basics() {
        let om = 3.0;
        let c = ChannelParams::new(om).unwrap().capacity_bits;
        assert!(excess_db_from_rate(om, c).abs() < 1e-12);
        let d4 = excess_power_db(10_000, 1e-5, 1.0).unwrap();
        let d5 = excess_power_db(100_000, 1e-5, 1.0).unwrap();
        assert!(d4 > d5 && d5 > 0.1, "{d4} {d5}");
        assert!(matches!(excess_power_db(10, 1e-5, 10f64.powf(-0.2)), Err(Error::BelowFloor)));
    }

    #[test]
    fn high_snr_matches_excess_at_40db() {
        let hs = high_snr_excess(1000, 1e-5).unwrap();
        let ex = excess_power_db(1000, 1e-5, 1e4).unwrap();
        assert!((hs.delta_db - ex).abs() < 0.02, "{} vs {ex}", hs.delta_db);
        assert!(hs.lambda_prime > 1.0);
        let r = rate(1000, 1e4, 1e-5).rate_bits;
        assert!((r - 0.5 * 1e4f64.log2() - hs.rate_offset_bits).abs() < 0.01);
    }

    #[test]
    fn linear_and_rate_approximations() {
        let hs = high_snr_excess(100_000, 1e-5).unwrap();
        let lin = linear_excess_approx(100_000, 1e-5).unwrap();
        assert!((lin / hs.delta_db - 1.0).abs() < 0.05, "{lin} {}", hs.delta_db);
        let want = 10.0 * std::f64::consts::LOG10_E * (2.0f64 / 1000.0).sqrt() * gaussian_q_inv(1e-5).unwrap();
        assert!((linear_excess_approx(1000, 1e-5).unwrap() - want).abs() < 1e-14);
        assert!(linear_excess_approx(1000, 0.5).unwrap().abs() < 1e-12);
        // Ω → ∞ limit of the normal approximation, minus its log term
        let (n, om) = (500u64, 1e12);
        let c = ChannelParams::new(om).unwrap().capacity_bits;
        let na = normal_approx_rate(n, om, 1e-4).unwrap() - (n as f64).log2() / (2.0 * n as f64);
        assert!((na - rate_approx(n, 1e-4, om).unwrap()).abs() < 1e-9 * c);
    }

    #[test]
    fn ebn0_minimum_and_fixed_point() {
        let m = min_ebn0(10_000, 1e-5, Strategy::Auto).unwrap();
        let gap = m.ebn0_db - shannon_limit_ebn0_db();
        assert!((gap - 1.2).abs() < 0.1, "{m:?} gap {gap}");
        let target = m.ebn0_db + 1.0;
        let (om, r) = omega_for_ebn0(10_000, 1e-5, target, &m, Strategy::Auto).unwrap();
        let back = 10.0 * (om / r.spectral_efficiency).log10();
        assert!((back - target).abs() < 1e-8, "{back} {target}");
        assert!(10.0 * om.log10() > m.omega_db);
        assert!(omega_for_ebn0(10_000, 1e-5, m.ebn0_db - 0.1, &m, Strategy::Auto).is_err());
    }

    #[test]
    fn certified_rate_bracket() {
        for n in [100u64, 1000] {
            let r = rate(n, 1.0, 1e-5);
            let (r1, r2) = r.certified_bracket.expect("certificate holds at 0 dB");
            assert!(r1 <= r.rate_bits + 1e-12 && r.rate_bits <= r2 + 1e-12, "n={n} {r1} {} {r2}", r.rate_bits);
        }
        let e = converse_error(&BoundQuery::error(1000, 1.0, 0.4).unwrap()).unwrap();
        let (lo, hi) = e.certified_bracket.unwrap();
        assert!(lo <= e.log_pe.log_value + 1e-12 && e.log_pe.log_value <= hi + 1e-12);
    }
}
