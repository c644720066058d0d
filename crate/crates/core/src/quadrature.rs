//! Gauss-Legendre quadrature with phase-bounded panel subdivision.
//!
//! Spline-times-spline integrands use a plain `k + 2`-point rule per knot
//! span. Integrands with a trigonometric factor `cos(N θ)` are split into
//! panels small enough that the phase varies by at most `π/2` per panel
//! before the same rule is applied, which keeps the rule near machine
//! precision for any harmonic order.

use std::f64::consts::PI;

/// Largest phase advance allowed over a single quadrature panel.
pub const MAX_PHASE_PER_PANEL: f64 = PI / 2.0;

/// A one-dimensional quadrature rule on a reference interval `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Gauss-Legendre rule with `q` points, exact for polynomials of degree
    /// `2q - 1`. Nodes are roots of the Legendre polynomial `P_q`, found by
    /// Newton iteration from the Chebyshev initial guess.
    pub fn legendre(q: usize) -> Self {
        assert!(q >= 1, "quadrature rule needs at least one point");
        let mut nodes = vec![0.0; q];
        let mut weights = vec![0.0; q];
        let m = q.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_eval(q, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let dp = legendre_eval(q, x).1;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[q - 1 - i] = x;
            weights[i] = w;
            weights[q - 1 - i] = w;
        }
        if q % 2 == 1 {
            nodes[q / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

/// Value and derivative of the Legendre polynomial `P_q` at `x`.
fn legendre_eval(q: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=q {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let p = if q == 0 { p0 } else { p1 };
    let dp = if q == 0 {
        0.0
    } else {
        q as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, dp)
}

/// Splits `[a, b]` into panels so a factor oscillating with angular frequency
/// `freq` advances by at most [`MAX_PHASE_PER_PANEL`] per panel, additionally
/// cutting at the supplied breakpoints (sector boundaries of piecewise
/// sources). Breakpoints outside `(a, b)` are ignored.
pub fn phase_panels(a: f64, b: f64, freq: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    debug_assert!(b > a);
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&t| t > a + 1e-14 && t < b - 1e-14)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);

    let mut panels = Vec::new();
    let mut lo = a;
    for cut in cuts.into_iter().chain(std::iter::once(b)) {
        let n = ((freq.abs() * (cut - lo)) / MAX_PHASE_PER_PANEL).ceil().max(1.0) as usize;
        let w = (cut - lo) / n as f64;
        for i in 0..n {
            panels.push((lo + i as f64 * w, lo + (i + 1) as f64 * w));
        }
        lo = cut;
    }
    panels
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: &GaussRule, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        rule.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2q_minus_1() {
        for q in 1..=8 {
            let rule = GaussRule::legendre(q);
            for d in 0..=(2 * q - 1) {
                let exact = (3.0f64.powi(d as i32 + 1) - (-1.0f64).powi(d as i32 + 1))
                    / (d as f64 + 1.0);
                let got = integrate(&rule, -1.0, 3.0, |x| x.powi(d as i32));
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "q={q} d={d}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for q in 1..=10 {
            let rule = GaussRule::legendre(q);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn phase_panels_bound_the_phase() {
        let panels = phase_panels(0.0, 2.0 * PI, 36.0, &[]);
        for &(a, b) in &panels {
            assert!(36.0 * (b - a) <= MAX_PHASE_PER_PANEL + 1e-12);
        }
        let total: f64 = panels.iter().map(|(a, b)| b - a).sum();
        assert!((total - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn phase_panels_cut_at_breakpoints() {
        let panels = phase_panels(0.0, 1.0, 0.0, &[0.3, 0.7]);
        assert!(panels.iter().any(|&(_, b)| (b - 0.3).abs() < 1e-14));
        assert!(panels.iter().any(|&(a, _)| (a - 0.7).abs() < 1e-14));
    }

    #[test]
    fn oscillatory_integral_near_machine_precision() {
        // ∫ cos(Nθ) sin(θ) over a period, N=25: exact 0; with the panel rule
        // the computed value stays at round-off level.
        let rule = GaussRule::legendre(4);
        let n = 25.0;
        let mut total = 0.0;
        for (a, b) in phase_panels(0.0, 2.0 * PI, n, &[]) {
            total += integrate(&rule, a, b, |t| (n * t).cos() * t.sin());
        }
        assert!(total.abs() < 1e-13, "total = {total}");
    }
}
