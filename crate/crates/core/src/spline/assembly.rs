//! Assembly of stiffness, load, and interface operators on the polar
//! pullback.
//!
//! All integrals are computed on the reference rectangle with the exact
//! Jacobian weight `r dr dθ`; the gradient pulls back to
//! `∇v = (∂_r v) e_r + r^{-1} (∂_θ v) e_θ`.

use super::basis::SplineSpace1D;
use super::source::{ScalarField, SourceSpec};
use super::space::SplineSpace2D;
use crate::linalg::{CscMatrix, SparseCholesky, Triplets};
use crate::quadrature::{phase_panels, GaussRule};
use crate::{Error, Result};
use rayon::prelude::*;

/// Quadrature controls. `points_per_span = None` uses the default `k + 3`
/// Gauss points: exact for spline-times-spline integrands, and enough
/// margin for the rational `1/r` pullback weight to stay below 1e-12
/// relative even on coarse rings (`k + 2` leaves that factor two to three
/// digits short).
#[derive(Debug, Clone, Copy, Default)]
pub struct QuadOptions {
    pub points_per_span: Option<usize>,
}

impl QuadOptions {
    pub fn points(&self, degree: usize) -> usize {
        self.points_per_span.unwrap_or(degree + 3)
    }
}

/// Per-span tables of basis values and derivatives at mapped Gauss points.
struct Table1D {
    q: usize,
    n_funcs: usize,
    /// `[span * q + g]`
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `[(span * q + g) * n_funcs + j]`
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl Table1D {
    fn build(space: &SplineSpace1D, rule: &GaussRule) -> Result<Table1D> {
        let q = rule.nodes.len();
        let k = space.degree();
        let n_spans = space.n_spans();
        let mut t = Table1D {
            q,
            n_funcs: k + 1,
            nodes: Vec::with_capacity(n_spans * q),
            weights: Vec::with_capacity(n_spans * q),
            values: Vec::with_capacity(n_spans * q * (k + 1)),
            derivs: Vec::with_capacity(n_spans * q * (k + 1)),
        };
        let breaks = space.breakpoints();
        for s in 0..n_spans {
            for (x, w) in rule.mapped(breaks[s], breaks[s + 1]) {
                let be = space.eval_basis(x)?;
                debug_assert_eq!(be.first, s);
                t.nodes.push(x);
                t.weights.push(w);
                t.values.extend_from_slice(&be.values);
                t.derivs.extend_from_slice(&be.derivs);
            }
        }
        Ok(t)
    }

    #[inline]
    fn point(&self, span: usize, g: usize) -> (f64, f64) {
        let i = span * self.q + g;
        (self.nodes[i], self.weights[i])
    }

    #[inline]
    fn funcs(&self, span: usize, g: usize) -> (&[f64], &[f64]) {
        let i = (span * self.q + g) * self.n_funcs;
        (&self.values[i..i + self.n_funcs], &self.derivs[i..i + self.n_funcs])
    }
}

/// Assembles the stiffness matrix
/// `A_ij = ∫ ν (∂_r φ_i ∂_r φ_j + r^{-2} ∂_θ φ_i ∂_θ φ_j) r dr dθ`
/// over the kept dofs, returned as its upper triangle in CSC format.
///
/// `ν` is validated against `nu_bounds` at every quadrature point when bounds
/// are supplied. Angular quadrature panels are cut at sector boundaries of a
/// piecewise-constant `ν`, so misaligned sectors do not degrade the rule.
pub fn assemble_stiffness(
    space: &SplineSpace2D,
    nu: &ScalarField,
    nu_bounds: Option<(f64, f64)>,
    opts: QuadOptions,
) -> Result<CscMatrix> {
    let k = space.degree();
    let q = opts.points(k);
    let rule = GaussRule::legendre(q);
    let atab = Table1D::build(&space.angular, &rule)?;
    let rtab = Table1D::build(&space.radial, &rule)?;
    let n_theta = space.mesh.n_theta;
    let n_r = space.mesh.n_r;
    let n_dofs = space.n_dofs();
    let nloc = k + 1;
    let nu_breaks = nu.theta_breakpoints();
    let abr = space.angular.breakpoints().to_vec();

    let columns: Vec<Result<Triplets>> = (0..n_theta)
        .into_par_iter()
        .map(|st| {
            // Angular quadrature data of this span: the precomputed table,
            // or panel-split points when a ν sector boundary cuts the span.
            let cut = nu_breaks.iter().any(|&b| b > abr[st] + 1e-14 && b < abr[st + 1] - 1e-14);
            let apoints: Vec<(f64, f64, Vec<f64>, Vec<f64>)> = if !cut {
                (0..q)
                    .map(|g| {
                        let (theta, wt) = atab.point(st, g);
                        let (av, ad) = atab.funcs(st, g);
                        (theta, wt, av.to_vec(), ad.to_vec())
                    })
                    .collect()
            } else {
                let mut pts = Vec::new();
                for (a, b) in phase_panels(abr[st], abr[st + 1], 0.0, &nu_breaks) {
                    for (theta, wt) in rule.mapped(a, b) {
                        let be = space.angular.eval_basis(theta)?;
                        debug_assert_eq!(be.first, st);
                        pts.push((theta, wt, be.values, be.derivs));
                    }
                }
                pts
            };

            let mut trip = Triplets::new(n_dofs, n_dofs);
            let mut local = vec![0.0f64; nloc * nloc * nloc * nloc];
            for sr in 0..n_r {
                local.fill(0.0);
                for (theta, wt, av, ad) in &apoints {
                    let (theta, wt) = (*theta, *wt);
                    for h in 0..q {
                        let (r, wr) = rtab.point(sr, h);
                        let (rv, rd) = rtab.funcs(sr, h);
                        let nu_val = nu.eval(r, theta);
                        if !nu_val.is_finite() {
                            return Err(Error::NonFiniteAssembly {
                                element: st * n_r + sr,
                                context: format!("ν({r}, {theta}) = {nu_val}"),
                            });
                        }
                        if let Some((lo, hi)) = nu_bounds {
                            let tol = 1e-12 * hi;
                            if nu_val < lo - tol || nu_val > hi + tol {
                                return Err(Error::SourceBounds(format!(
                                    "ν({r}, {theta}) = {nu_val} outside [{lo}, {hi}]"
                                )));
                            }
                        }
                        let w = wt * wr * nu_val;
                        let c_rad = w * r; // ∂_r ∂_r term
                        let c_ang = w / r; // r^{-2} ∂_θ ∂_θ term, times jacobian r
                        for j1 in 0..nloc {
                            for p1 in 0..nloc {
                                let row = (j1 * nloc + p1) * nloc * nloc;
                                let t1 = c_rad * av[j1] * rd[p1];
                                let t2 = c_ang * ad[j1] * rv[p1];
                                for j2 in 0..nloc {
                                    for p2 in 0..nloc {
                                        local[row + j2 * nloc + p2] +=
                                            t1 * av[j2] * rd[p2] + t2 * ad[j2] * rv[p2];
                                    }
                                }
                            }
                        }
                    }
                }
                // Scatter the element matrix; keep the upper triangle only.
                for j1 in 0..nloc {
                    let gt1 = space.angular.global_index(st, j1);
                    for p1 in 0..nloc {
                        let Some(gi) = space.dof(gt1, sr + p1) else { continue };
                        for j2 in 0..nloc {
                            let gt2 = space.angular.global_index(st, j2);
                            for p2 in 0..nloc {
                                let Some(gj) = space.dof(gt2, sr + p2) else { continue };
                                if gi <= gj {
                                    let v = local[(j1 * nloc + p1) * nloc * nloc + j2 * nloc + p2];
                                    trip.push(gi, gj, v);
                                }
                            }
                        }
                    }
                }
            }
            Ok(trip)
        })
        .collect();

    let mut all = Triplets::new(n_dofs, n_dofs);
    for col in columns {
        all.extend_from(col?);
    }
    Ok(all.into_upper_csc())
}

/// Assembles the load vector
/// `f_i = ∫ j_s φ_i r dr dθ − ∫ m⊥ · ∇φ_i r dr dθ`,
/// with `m⊥ = (m_y, −m_x)`. The magnetization enters through its weak
/// divergence, so jumps of `m` across sector boundaries act as the
/// distributional surface currents without any explicit surface terms;
/// quadrature panels are cut at the sector boundaries.
pub fn assemble_rhs(space: &SplineSpace2D, src: &SourceSpec, opts: QuadOptions) -> Result<Vec<f64>> {
    let k = space.degree();
    // The polar unit vectors put trigonometric factors into the integrand,
    // so the load rule carries two extra points over the spline rule.
    let q = opts.points(k) + 2;
    let rule = GaussRule::legendre(q);
    let n_r = space.mesh.n_r;
    let mut breaks_theta = src.js.theta_breakpoints();
    breaks_theta.extend(src.m.theta_breakpoints());
    breaks_theta.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m_zero = src.m.is_zero();

    let mut f = vec![0.0f64; space.n_dofs()];
    let abr = space.angular.breakpoints().to_vec();
    let rbr = space.radial.breakpoints().to_vec();
    for st in 0..space.mesh.n_theta {
        for (ta, tb) in phase_panels(abr[st], abr[st + 1], 0.0, &breaks_theta) {
            for (theta, wt) in rule.mapped(ta, tb) {
                let ab = space.angular.eval_basis(theta)?;
                debug_assert_eq!(ab.first, st);
                let (sin_t, cos_t) = theta.sin_cos();
                for sr in 0..n_r {
                    for (r, wr) in rule.mapped(rbr[sr], rbr[sr + 1]) {
                        let rb = space.radial.eval_basis(r)?;
                        let js = src.js.eval(r, theta);
                        let m = if m_zero { [0.0, 0.0] } else { src.m.eval(r, theta) };
                        if !js.is_finite() || !m[0].is_finite() || !m[1].is_finite() {
                            return Err(Error::NonFiniteAssembly {
                                element: st * n_r + sr,
                                context: format!("source at ({r}, {theta})"),
                            });
                        }
                        // m⊥ in polar components.
                        let mp = [m[1], -m[0]];
                        let mp_r = mp[0] * cos_t + mp[1] * sin_t;
                        let mp_t = -mp[0] * sin_t + mp[1] * cos_t;
                        let w = wt * wr;
                        for (j, (av, ad)) in ab.values.iter().zip(&ab.derivs).enumerate() {
                            let gt = space.angular.global_index(st, j);
                            for (p, (rv, rd)) in rb.values.iter().zip(&rb.derivs).enumerate() {
                                let Some(gi) = space.dof(gt, rb.first + p) else { continue };
                                let mut val = js * av * rv * r;
                                if !m_zero {
                                    // −(m⊥ · ∇φ) r, with ∇φ = (a b', a' b / r).
                                    val -= (mp_r * av * rd + mp_t * ad * rv / r) * r;
                                }
                                f[gi] += w * val;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(f)
}

/// Interface mass matrix `M_ij = ∫ a_i a_j r_γ dθ` of the angular trace
/// space, as upper CSC.
pub fn trace_l2_gram(trace_space: &SplineSpace1D, r_gamma: f64, opts: QuadOptions) -> Result<CscMatrix> {
    let k = trace_space.degree();
    let q = opts.points(k);
    let rule = GaussRule::legendre(q);
    let tab = Table1D::build(trace_space, &rule)?;
    let n = trace_space.dim();
    let mut trip = Triplets::new(n, n);
    for s in 0..trace_space.n_spans() {
        for g in 0..q {
            let (_, w) = tab.point(s, g);
            let (av, _) = tab.funcs(s, g);
            for j1 in 0..=k {
                let g1 = trace_space.global_index(s, j1);
                for j2 in 0..=k {
                    let g2 = trace_space.global_index(s, j2);
                    if g1 <= g2 {
                        trip.push(g1, g2, w * r_gamma * av[j1] * av[j2]);
                    }
                }
            }
        }
    }
    Ok(trip.into_upper_csc())
}

/// `L²(Γ)` projection of `g` onto the interface trace space.
///
/// `freq_hint` bounds the angular frequency content of `g` so the quadrature
/// panels can be phase-limited. The returned coefficients satisfy the
/// orthogonality `∫ (g − π_h g) a_i r_γ dθ = 0` for every trace function.
pub fn l2_project_trace(
    trace_space: &SplineSpace1D,
    r_gamma: f64,
    g: &dyn Fn(f64) -> f64,
    freq_hint: f64,
    opts: QuadOptions,
) -> Result<Vec<f64>> {
    let k = trace_space.degree();
    let q = opts.points(k) + 2;
    let rule = GaussRule::legendre(q);
    let gram = trace_l2_gram(trace_space, r_gamma, opts)?;
    let chol = SparseCholesky::factor(&gram)?;
    let breaks = trace_space.breakpoints().to_vec();
    let mut rhs = vec![0.0f64; trace_space.dim()];
    for s in 0..trace_space.n_spans() {
        for (a, b) in phase_panels(breaks[s], breaks[s + 1], freq_hint, &[]) {
            for (theta, w) in rule.mapped(a, b) {
                let be = trace_space.eval_basis(theta)?;
                let gv = g(theta);
                for (j, av) in be.values.iter().enumerate() {
                    rhs[trace_space.global_index(be.first, j)] += w * r_gamma * gv * av;
                }
            }
        }
    }
    Ok(chol.solve(&rhs))
}

/// `H¹` seminorm of `u_h − u` with `grad_exact = (∂_r u, r^{-1} ∂_θ u)`,
/// integrated with an elevated quadrature order.
pub fn h1_seminorm_error(
    space: &SplineSpace2D,
    coeffs: &[f64],
    grad_exact: &(dyn Fn(f64, f64) -> (f64, f64) + Sync),
    extra_points: usize,
) -> Result<f64> {
    let k = space.degree();
    let q = k + 2 + extra_points;
    let rule = GaussRule::legendre(q);
    let atab = Table1D::build(&space.angular, &rule)?;
    let rtab = Table1D::build(&space.radial, &rule)?;
    let n_r = space.mesh.n_r;
    let nloc = k + 1;

    let total: f64 = (0..space.mesh.n_theta)
        .into_par_iter()
        .map(|st| {
            let mut acc = 0.0;
            for sr in 0..n_r {
                for g in 0..q {
                    let (theta, wt) = atab.point(st, g);
                    let (av, ad) = atab.funcs(st, g);
                    for h in 0..q {
                        let (r, wr) = rtab.point(sr, h);
                        let (rv, rd) = rtab.funcs(sr, h);
                        let (mut dr, mut dt) = (0.0, 0.0);
                        for j in 0..nloc {
                            let gt = space.angular.global_index(st, j);
                            for p in 0..nloc {
                                if let Some(gi) = space.dof(gt, sr + p) {
                                    dr += coeffs[gi] * av[j] * rd[p];
                                    dt += coeffs[gi] * ad[j] * rv[p];
                                }
                            }
                        }
                        dt /= r;
                        let (er, et) = grad_exact(r, theta);
                        acc += wt * wr * r * ((dr - er).powi(2) + (dt - et).powi(2));
                    }
                }
            }
            acc
        })
        .sum();
    Ok(total.sqrt())
}

/// `L²` norm of `u_h − u` with elevated quadrature order.
pub fn l2_error(
    space: &SplineSpace2D,
    coeffs: &[f64],
    exact: &(dyn Fn(f64, f64) -> f64 + Sync),
    extra_points: usize,
) -> Result<f64> {
    let k = space.degree();
    let q = k + 2 + extra_points;
    let rule = GaussRule::legendre(q);
    let atab = Table1D::build(&space.angular, &rule)?;
    let rtab = Table1D::build(&space.radial, &rule)?;
    let n_r = space.mesh.n_r;

    let total: f64 = (0..space.mesh.n_theta)
        .into_par_iter()
        .map(|st| {
            let mut acc = 0.0;
            for sr in 0..n_r {
                for g in 0..q {
                    let (theta, wt) = atab.point(st, g);
                    let (av, _) = atab.funcs(st, g);
                    for h in 0..q {
                        let (r, wr) = rtab.point(sr, h);
                        let (rv, _) = rtab.funcs(sr, h);
                        let mut uh = 0.0;
                        for (j, avj) in av.iter().enumerate() {
                            let gt = space.angular.global_index(st, j);
                            for (p, rvp) in rv.iter().enumerate() {
                                if let Some(gi) = space.dof(gt, sr + p) {
                                    uh += coeffs[gi] * avj * rvp;
                                }
                            }
                        }
                        acc += wt * wr * r * (uh - exact(r, theta)).powi(2);
                    }
                }
            }
            acc
        })
        .sum();
    Ok(total.sqrt())
}

/// Coefficients of the θ-independent interpolant of a radial profile,
/// collocated at the Greville abscissae of the radial space. Profiles that
/// vanish on the Dirichlet boundary are represented exactly by the kept
/// dofs.
pub fn interpolate_radial_profile(
    space: &SplineSpace2D,
    profile: &dyn Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    let radial = &space.radial;
    let dim = radial.dim();
    let mut mat = nalgebra::DMatrix::zeros(dim, dim);
    let mut rhs = nalgebra::DVector::zeros(dim);
    for i in 0..dim {
        let x = radial.greville(i);
        let be = radial.eval_basis(x)?;
        for (j, v) in be.values.iter().enumerate() {
            mat[(i, be.first + j)] = *v;
        }
        rhs[i] = profile(x);
    }
    let full = mat
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Incompatible("singular radial collocation system".into()))?;

    let mut coeffs = vec![0.0; space.n_dofs()];
    for it in 0..space.mesh.n_theta {
        for (kept, &fullidx) in space.radial_kept().iter().enumerate() {
            coeffs[it * space.radial_kept().len() + kept] = full[fullidx];
        }
    }
    Ok(coeffs)
}
