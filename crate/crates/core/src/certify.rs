//! Grid verification of the polynomial sandwich for `c(φ)/c₀` on the descent
//! path, and the single-term majorant `b̄(φ)`.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::logprob::{LogProb, Method};
use crate::series::{build_coefficients, g_series, CoefficientTables, MAX_TERMS};
use crate::specfun::Truncation;
use crate::temme::{
    descent_path, in_window, kind_geometry, path_point, validity_window, ChannelParams, Kind, KindGeometry,
    ThresholdGeometry,
};

pub const DEFAULT_GRID_SIZE: usize = 2048;
/// Geometric nodes added at each end of the uniform grid.
pub const EDGE_NODES: usize = 64;
const EDGE_SMALLEST: f64 = 1e-6;
/// Rounding allowance per unit of polynomial scale.
const ROUNDOFF_ULPS: f64 = 32.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KindCheck {
    pub lower_terms: usize,
    pub upper_terms: usize,
    pub holds: bool,
    pub worst_margin: f64,
    /// Angle at which the worst margin occurred.
    pub worst_phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub md: KindCheck,
    pub fa: KindCheck,
    /// Requested `(L, U)`; per-kind values may differ for consecutive pairs.
    pub lower_terms: usize,
    pub upper_terms: usize,
    pub holds: bool,
    pub phi_grid_size: usize,
    pub worst_margin: f64,
}

impl Certificate {
    fn from_kinds(md: KindCheck, fa: KindCheck, lower_terms: usize, upper_terms: usize, size: usize) -> Self {
        let worst_margin = md.worst_margin.min(fa.worst_margin);
        Certificate {
            md,
            fa,
            lower_terms,
            upper_terms,
            holds: md.holds && fa.holds,
            phi_grid_size: size,
            worst_margin,
        }
    }

    pub fn kind(&self, kind: Kind) -> &KindCheck {
        match kind {
            Kind::Md => &self.md,
            Kind::Fa => &self.fa,
        }
    }
}

/// `size` uniform interior nodes of `(0, π)` plus [`EDGE_NODES`] geometric
/// nodes towards each end, sorted.
pub fn phi_grid(size: usize) -> Vec<f64> {
    let size = size.max(1);
    let step = PI / (size + 1) as f64;
    let mut grid: Vec<f64> = (1..=size).map(|i| i as f64 * step).collect();
    let ratio = (step / EDGE_SMALLEST).powf(1.0 / EDGE_NODES as f64);
    let mut d = EDGE_SMALLEST;
    for _ in 0..EDGE_NODES {
        grid.push(d);
        grid.push(PI - d);
        d *= ratio;
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// `c(φ)/c₀` at each node. Nodes outside `[0, π)` give NaN.
pub fn c_ratio_profile(geom: &ThresholdGeometry, kg: &KindGeometry, grid: &[f64]) -> Vec<f64> {
    let c0 = match path_point(0.0, geom, kg) {
        Ok(p) => p.c_of_phi,
        Err(_) => return vec![f64::NAN; grid.len()],
    };
    grid.iter()
        .map(|&phi| path_point(phi, geom, kg).map_or(f64::NAN, |p| p.c_of_phi / c0))
        .collect()
}

fn check_window(geom: &ThresholdGeometry, params: &ChannelParams) -> Result<()> {
    if in_window(geom.gamma, params) {
        return Ok(());
    }
    let (lo, hi) = validity_window(params);
    Err(Error::WindowViolation { gamma: geom.gamma, lo, hi })
}

fn kind_tables(geom: &ThresholdGeometry, kg: &KindGeometry, terms: usize) -> Result<CoefficientTables> {
    build_coefficients(geom, kg.theta, terms.max(2))
}

/// Checks `1 + Σ_{k<L} ρ_k u^{2k} ≤ c/c₀ ≤ 1 + Σ_{k<U} ρ_k u^{2k}`, with
/// `ρ_k = c_{2k}/c₀`, on every grid node.
///
/// A node counts as passing when the violation is within rounding of the
/// polynomial terms plus the propagated coefficient error.
fn check_kind(
    geom: &ThresholdGeometry,
    kg: &KindGeometry,
    tables: &CoefficientTables,
    lower: Option<usize>,
    upper: usize,
    grid: &[f64],
) -> KindCheck {
    let c0 = tables.c_even[0];
    let top = lower.unwrap_or(0).max(upper);
    let rho: Vec<f64> = tables.c_even[..top].iter().map(|c| c / c0).collect();
    let rho_err: Vec<f64> = tables.c_even_error[..top].iter().map(|e| e / c0.abs()).collect();
    let ratios = c_ratio_profile(geom, kg, grid);
    let mut worst = f64::INFINITY;
    let mut worst_phi = 0.0;
    for (&phi, &ratio) in grid.iter().zip(&ratios) {
        let u2 = match descent_path(phi, geom) {
            Ok(b) => b.u * b.u,
            Err(_) => f64::NAN,
        };
        let mut lo = if lower.is_some() { 1.0 } else { f64::NEG_INFINITY };
        let mut hi = 1.0;
        let (mut scale, mut err) = (1.0 + ratio.abs(), 0.0);
        let mut pw = 1.0;
        for k in 1..top {
            pw *= u2;
            let term = rho[k] * pw;
            if lower.is_some_and(|l| k < l) {
                lo += term;
            }
            if k < upper {
                hi += term;
            }
            scale += term.abs();
            err += rho_err[k] * pw;
        }
        let slack = (ratio - lo).min(hi - ratio) + ROUNDOFF_ULPS * f64::EPSILON * scale + err;
        // NaN propagates as a failure
        if !(slack >= worst) {
            worst = slack;
            worst_phi = phi;
        }
    }
    KindCheck {
        lower_terms: lower.unwrap_or(0),
        upper_terms: upper,
        holds: worst >= 0.0,
        worst_margin: worst,
        worst_phi,
    }
}

fn check_counts(lower: usize, upper: usize) -> Result<()> {
    for c in [lower, upper] {
        if c == 0 || c > MAX_TERMS {
            return Err(domain("sandwich term count", c as f64));
        }
    }
    Ok(())
}

/// Sandwich test with lower order `L` and upper order `U` for both kinds.
///
/// A failing check is a valid result; errors are reserved for bad
/// arguments and thresholds outside the window.
pub fn certify_sandwich(
    geom: &ThresholdGeometry,
    params: &ChannelParams,
    lower: usize,
    upper: usize,
    grid_size: usize,
) -> Result<Certificate> {
    check_counts(lower, upper)?;
    check_window(geom, params)?;
    let grid = phi_grid(grid_size);
    let mut checks = [None, None];
    for (slot, kind) in checks.iter_mut().zip(Kind::BOTH) {
        let kg = kind_geometry(geom, params, kind);
        let tables = kind_tables(geom, &kg, lower.max(upper))?;
        *slot = Some(check_kind(geom, &kg, &tables, Some(lower), upper, &grid));
    }
    let [md, fa] = checks.map(|c| c.expect("both kinds checked"));
    Ok(Certificate::from_kinds(md, fa, lower, upper, grid.len()))
}

/// Upper inequality only: `P ≤ P^(U)` for both kinds. `lower_terms` is 0.
pub fn certify_upper(
    geom: &ThresholdGeometry,
    params: &ChannelParams,
    upper: usize,
    grid_size: usize,
) -> Result<Certificate> {
    check_counts(upper, upper)?;
    check_window(geom, params)?;
    let grid = phi_grid(grid_size);
    let mut checks = [None, None];
    for (slot, kind) in checks.iter_mut().zip(Kind::BOTH) {
        let kg = kind_geometry(geom, params, kind);
        let tables = kind_tables(geom, &kg, upper)?;
        *slot = Some(check_kind(geom, &kg, &tables, None, upper, &grid));
    }
    let [md, fa] = checks.map(|c| c.expect("both kinds checked"));
    Ok(Certificate::from_kinds(md, fa, 0, upper, grid.len()))
}

/// The consecutive pair `{K, K+1}` ordered so that the `L` polynomial is the
/// one that undershoots at small `u`: `(K+1, K)` when `c_{2K}/c₀ < 0`.
pub fn consecutive_pair(tables: &CoefficientTables, k: usize) -> (usize, usize) {
    if tables.c_even[k] / tables.c_even[0] < 0.0 {
        (k + 1, k)
    } else {
        (k, k + 1)
    }
}

/// Certificate that the `K`-term series and the `K+1`-term series bracket
/// the exact value, for both kinds.
pub fn certify_consecutive(
    geom: &ThresholdGeometry,
    params: &ChannelParams,
    k: usize,
    grid_size: usize,
) -> Result<Certificate> {
    check_counts(k, k + 1)?;
    check_window(geom, params)?;
    let grid = phi_grid(grid_size);
    let mut checks = [None, None];
    for (slot, kind) in checks.iter_mut().zip(Kind::BOTH) {
        let kg = kind_geometry(geom, params, kind);
        let tables = kind_tables(geom, &kg, k + 1)?;
        let (lo, hi) = consecutive_pair(&tables, k);
        *slot = Some(check_kind(geom, &kg, &tables, Some(lo), hi, &grid));
    }
    let [md, fa] = checks.map(|c| c.expect("both kinds checked"));
    Ok(Certificate::from_kinds(md, fa, k + 1, k, grid.len()))
}

/// `ln P` from the `U`-term series, carrying the `[P^(L), P^(U)]` bracket
/// when the sandwich certificate for this kind holds.
pub fn certified_log_prob(
    geom: &ThresholdGeometry,
    params: &ChannelParams,
    kind: Kind,
    n: u64,
    lower: usize,
    upper: usize,
    grid_size: usize,
) -> Result<(LogProb, KindCheck)> {
    check_counts(lower, upper)?;
    check_window(geom, params)?;
    if n == 0 {
        return Err(domain("block length", 0.0));
    }
    let kg = kind_geometry(geom, params, kind);
    let tables = kind_tables(geom, &kg, lower.max(upper) + 1)?;
    let check = check_kind(geom, &kg, &tables, Some(lower), upper, &phi_grid(grid_size));
    let nf = n as f64;
    let ln_p = |terms: usize| -> Result<f64> {
        let g = g_series(&tables, geom, nf, Truncation::Terms(terms))?.g_value;
        Ok((kind.orientation() * g).ln() - 0.5 * nf * kg.v)
    };
    let value = ln_p(upper)?.min(0.0);
    let lp = LogProb::new(value, Method::Series { terms: upper });
    if !check.holds {
        return Ok((lp, check));
    }
    let low = ln_p(lower)?.min(value);
    Ok((lp.with_bracket(low, value), check))
}

/// `b̄(φ) = sinc(φ/2)/(1 + r′²) · √(c_γ/cosh r) · e^{r-γ}`.
pub fn bbar_bound(geom: &ThresholdGeometry, phi: f64) -> f64 {
    if phi == 0.0 {
        return 1.0;
    }
    let Ok(b) = descent_path(phi, geom) else {
        return f64::NAN;
    };
    let half = 0.5 * phi;
    let sinc_half = half.sin() / half;
    sinc_half / (1.0 + b.r_prime * b.r_prime) * (geom.c_gamma / b.cosh_r).sqrt() * b.r_minus_gamma.exp()
}
