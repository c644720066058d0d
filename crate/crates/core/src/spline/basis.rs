//! Univariate B-spline bases, open (clamped) and periodic.

use crate::{Error, Result};

/// A univariate spline space of degree `k` on sorted breakpoints.
///
/// The open variant clamps the ends (knot multiplicity `k + 1`), so exactly
/// one basis function is nonzero at each endpoint; dimension is
/// `spans + k`. The periodic variant wraps the knot vector around the
/// parametric interval; dimension equals the number of spans for every
/// degree.
#[derive(Debug, Clone)]
pub struct SplineSpace1D {
    degree: usize,
    breaks: Vec<f64>,
    periodic: bool,
    /// Extended knot vector; entry `i` is the knot with B-spline index `i`.
    knots: Vec<f64>,
    dim: usize,
}

/// Values and first derivatives of the `k + 1` basis functions active at one
/// parameter, together with the global index of the first of them.
#[derive(Debug, Clone)]
pub struct BasisEval {
    pub first: usize,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

impl SplineSpace1D {
    /// Open (clamped) space on `n_spans` uniform spans of `[a, b]`.
    pub fn open_uniform(a: f64, b: f64, n_spans: usize, degree: usize) -> Result<Self> {
        Self::validate(a, b, n_spans, degree)?;
        let breaks = uniform_breaks(a, b, n_spans);
        let mut knots = Vec::with_capacity(n_spans + 1 + 2 * degree);
        knots.extend(std::iter::repeat_n(a, degree));
        knots.extend(breaks.iter().copied());
        knots.extend(std::iter::repeat_n(b, degree));
        Ok(SplineSpace1D { degree, breaks, periodic: false, knots, dim: n_spans + degree })
    }

    /// Periodic space on `n_spans` uniform spans of `[a, b)`.
    ///
    /// Requires `n_spans > k` so the wrapped basis functions stay linearly
    /// independent.
    pub fn periodic_uniform(a: f64, b: f64, n_spans: usize, degree: usize) -> Result<Self> {
        Self::validate(a, b, n_spans, degree)?;
        if n_spans <= degree {
            return Err(Error::InvalidMesh(format!(
                "periodic spline space needs more spans than the degree \
                 (got {n_spans} spans, degree {degree})"
            )));
        }
        let breaks = uniform_breaks(a, b, n_spans);
        let period = b - a;
        let mut knots = Vec::with_capacity(n_spans + 1 + 2 * degree);
        for j in 0..degree {
            knots.push(breaks[n_spans - degree + j] - period);
        }
        knots.extend(breaks.iter().copied());
        for j in 0..degree {
            knots.push(breaks[j + 1] + period);
        }
        Ok(SplineSpace1D { degree, breaks, periodic: true, knots, dim: n_spans })
    }

    fn validate(a: f64, b: f64, n_spans: usize, degree: usize) -> Result<()> {
        if !a.is_finite() || !b.is_finite() || b <= a {
            return Err(Error::InvalidMesh(format!("invalid parametric interval [{a}, {b}]")));
        }
        if degree < 1 {
            return Err(Error::InvalidMesh("spline degree must be at least 1".into()));
        }
        if n_spans < 1 {
            return Err(Error::InvalidMesh("spline space needs at least one span".into()));
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_spans(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn span_width(&self, span: usize) -> f64 {
        self.breaks[span + 1] - self.breaks[span]
    }

    /// Global dof index of the `local`-th function active on `span`.
    pub fn global_index(&self, span: usize, local: usize) -> usize {
        debug_assert!(local <= self.degree);
        if self.periodic {
            (span + local) % self.dim
        } else {
            span + local
        }
    }

    /// Greville abscissa of basis function `i` (knot average), used as a
    /// collocation point for interpolation.
    pub fn greville(&self, i: usize) -> f64 {
        let k = self.degree;
        let s: f64 = self.knots[i + 1..=i + k].iter().sum();
        s / k as f64
    }

    /// Wraps a parameter into the fundamental interval (periodic case) or
    /// rejects it when outside the domain (open case).
    fn locate(&self, xi: f64) -> Result<(f64, usize)> {
        let (a, b) = self.domain();
        let x = if self.periodic {
            let mut x = (xi - a).rem_euclid(b - a) + a;
            if x >= b {
                x = a;
            }
            x
        } else {
            if !(a - 1e-12 * (b - a)..=b + 1e-12 * (b - a)).contains(&xi) {
                return Err(Error::OutOfDomain { xi, lo: a, hi: b });
            }
            xi.clamp(a, b)
        };
        let n = self.n_spans();
        let w = (b - a) / n as f64;
        let mut span = (((x - a) / w) as usize).min(n - 1);
        // Guard against rounding at span boundaries.
        while span + 1 < n && x >= self.breaks[span + 1] {
            span += 1;
        }
        while span > 0 && x < self.breaks[span] {
            span -= 1;
        }
        Ok((x, span))
    }

    /// Values and first derivatives of the `k + 1` active basis functions at
    /// `xi` (Cox-de Boor recursion).
    pub fn eval_basis(&self, xi: f64) -> Result<BasisEval> {
        let (x, span) = self.locate(xi)?;
        let k = self.degree;
        // B-spline knot index of the span: knots[mu] <= x < knots[mu+1].
        let mu = span + k;
        let knots = &self.knots;

        // Triangular Cox-de Boor table; `ndu[j]` holds degree-j values of
        // N_{mu-j..mu} when the loop over j completes.
        let mut values = vec![0.0; k + 1];
        let mut lower = vec![0.0; k + 1];
        let mut left = vec![0.0; k + 1];
        let mut right = vec![0.0; k + 1];
        values[0] = 1.0;
        for j in 1..=k {
            left[j] = x - knots[mu + 1 - j];
            right[j] = knots[mu + j] - x;
            if j == k {
                lower[..k].copy_from_slice(&values[..k]);
            }
            let mut saved = 0.0;
            for r in 0..j {
                let denom = right[r + 1] + left[j - r];
                let tmp = values[r] / denom;
                values[r] = saved + right[r + 1] * tmp;
                saved = left[j - r] * tmp;
            }
            values[j] = saved;
        }

        // First derivative from the degree-(k-1) values:
        // N'_{i,k} = k (N_{i,k-1}/(t_{i+k}-t_i) - N_{i+1,k-1}/(t_{i+k+1}-t_{i+1})).
        let mut derivs = vec![0.0; k + 1];
        for (r, d) in derivs.iter_mut().enumerate() {
            let i = mu - k + r;
            let left_term = if r > 0 {
                let den = knots[i + k] - knots[i];
                if den > 0.0 {
                    lower[r - 1] / den
                } else {
                    0.0
                }
            } else {
                0.0
            };
            let right_term = if r < k {
                let den = knots[i + k + 1] - knots[i + 1];
                if den > 0.0 {
                    lower[r] / den
                } else {
                    0.0
                }
            } else {
                0.0
            };
            *d = k as f64 * (left_term - right_term);
        }

        Ok(BasisEval { first: span, values, derivs })
    }

    /// Evaluates the spline with the given coefficients at `xi`.
    pub fn eval_function(&self, coeffs: &[f64], xi: f64) -> Result<f64> {
        debug_assert_eq!(coeffs.len(), self.dim);
        let be = self.eval_basis(xi)?;
        Ok(be
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| coeffs[self.global_index(be.first, j)] * v)
            .sum())
    }

    /// Evaluates the spline derivative with the given coefficients at `xi`.
    pub fn eval_derivative(&self, coeffs: &[f64], xi: f64) -> Result<f64> {
        debug_assert_eq!(coeffs.len(), self.dim);
        let be = self.eval_basis(xi)?;
        Ok(be
            .derivs
            .iter()
            .enumerate()
            .map(|(j, d)| coeffs[self.global_index(be.first, j)] * d)
            .sum())
    }
}

fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}
