//! Adaptive composite Gauss-Legendre quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `order`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let m = order;
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, p_prev) = legendre(m, x);
                dp = m as f64 * (x * p - p_prev) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (p, p_prev) = legendre(m, x);
            dp = if p.is_finite() { m as f64 * (x * p - p_prev) / (x * x - 1.0) } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared 20-point rule.
    pub fn default_rule() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn apply<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> f64 {
        self.apply_with_abs(f, a, b).0
    }

    /// Returns the rule applied to `f` and to `|f|` from one set of evaluations.
    pub fn apply_with_abs<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> (f64, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        let mut acc_abs = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            acc += w * v;
            acc_abs += w * v.abs();
        }
        (acc * half, acc_abs * half)
    }
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-13,
            abs_tol: 0.0,
            max_panels: 4000,
            initial_panels: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of per-panel `|whole - split|` differences.
    pub error: f64,
    /// Integral of `|f|`, a scale for cancellation-aware tolerances.
    pub abs_value: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    left_abs: f64,
    right_abs: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive integration: the panel with the largest error estimate
/// is bisected until the summed estimate meets the tolerance.
///
/// The tolerance is `max(abs_tol, rel_tol * |I|)`. Returns
/// [`Error::Quadrature`] when `max_panels` is exhausted first.
pub fn integrate<F>(mut f: F, a: f64, b: f64, rule: &GaussLegendre, opts: QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    let make = |a: f64, b: f64, whole: f64, f: &mut F| -> Panel {
        let m = 0.5 * (a + b);
        let (left, left_abs) = rule.apply_with_abs(f, a, m);
        let (right, right_abs) = rule.apply_with_abs(f, m, b);
        Panel {
            a,
            b,
            left,
            right,
            left_abs,
            right_abs,
            err: (whole - left - right).abs(),
        }
    };

    let mut heap = BinaryHeap::new();
    let n0 = opts.initial_panels.max(1);
    let h = (b - a) / n0 as f64;
    for i in 0..n0 {
        let pa = a + h * i as f64;
        let pb = if i + 1 == n0 { b } else { pa + h };
        let whole = rule.apply(&mut f, pa, pb);
        heap.push(make(pa, pb, whole, &mut f));
    }

    loop {
        let (value, abs_value, error) = heap.iter().fold((0.0, 0.0, 0.0), |acc, p| {
            (acc.0 + p.left + p.right, acc.1 + p.left_abs + p.right_abs, acc.2 + p.err)
        });
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= tol || !error.is_finite() || heap.len() >= opts.max_panels {
            if error <= tol {
                return Ok(Quadrature { value, error, abs_value, panels: heap.len() });
            }
            let estimate = if value != 0.0 { error / value.abs() } else { f64::INFINITY };
            return Err(Error::Quadrature { estimate });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        heap.push(make(worst.a, m, worst.left, &mut f));
        heap.push(make(m, worst.b, worst.right, &mut f));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(5);
        // Degree 9 is the exactness limit for 5 points.
        let v = rule.apply(&mut |x: f64| x.powi(9) + x.powi(8), -1.0, 1.0);
        assert!((v - 2.0 / 9.0).abs() < 1e-15);
        let w: f64 = GaussLegendre::new(20).weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_a_sharp_peak() {
        let eps = 1e-6;
        let q = integrate(
            |x| eps / (eps * eps + x * x),
            0.0,
            1.0,
            GaussLegendre::default_rule(),
            QuadOptions::default(),
        )
        .unwrap();
        let exact = (1.0 / eps).atan();
        assert!((q.value - exact).abs() < 1e-12 * exact, "{} vs {}", q.value, exact);
    }

    #[test]
    fn gives_up_when_panel_budget_is_exhausted() {
        let opts = QuadOptions { max_panels: 8, ..QuadOptions::default() };
        let r = integrate(|x: f64| (1.0 / (x + 1e-12)).sin(), 0.0, 1.0, GaussLegendre::default_rule(), opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
