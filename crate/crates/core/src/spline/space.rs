//! Tensor-product spline spaces on one subdomain, with Dirichlet
//! elimination and the interface trace map.

use super::basis::SplineSpace1D;
use crate::geometry::{PolarMesh, Subdomain};
use crate::{Error, Result};
use std::f64::consts::TAU;

/// Spline space of degree `k` on one subdomain: periodic splines in the
/// angular direction times clamped splines in the radial direction.
///
/// The Dirichlet dof layer (outer radius for the stator, shaft radius for the
/// rotor) is eliminated; remaining dofs are indexed contiguously as
/// `i_theta * n_radial_kept + j`. Because the radial knot vector is clamped,
/// exactly one radial basis function is nonzero (with value one) on the
/// interface circle, so the interface trace of any discrete function is the
/// periodic angular spline whose coefficients sit in that radial layer. The
/// number of interface dofs therefore equals `n_theta` for every degree.
#[derive(Debug, Clone)]
pub struct SplineSpace2D {
    pub mesh: PolarMesh,
    pub angular: SplineSpace1D,
    pub radial: SplineSpace1D,
    /// Kept radial basis indices after Dirichlet elimination, in order.
    radial_kept: Vec<usize>,
    /// Map from full radial basis index to kept index.
    kept_of_full: Vec<Option<usize>>,
    /// Kept radial index of the interface layer.
    interface_layer: usize,
}

impl SplineSpace2D {
    pub fn new(mesh: PolarMesh, degree: usize) -> Result<Self> {
        let angular = SplineSpace1D::periodic_uniform(0.0, TAU, mesh.n_theta, degree)?;
        let radial = SplineSpace1D::open_uniform(mesh.r_lo, mesh.r_hi, mesh.n_r, degree)?;
        let dim_r = radial.dim();
        if dim_r < 2 {
            return Err(Error::InvalidMesh("radial space needs at least two functions".into()));
        }
        // Dirichlet on Σ_ℓ: the single clamped function that is nonzero there.
        let dirichlet_full = match mesh.subdomain {
            Subdomain::Stator => dim_r - 1, // r = r_outer
            Subdomain::Rotor => 0,          // r = r_shaft
        };
        let radial_kept: Vec<usize> = (0..dim_r).filter(|&i| i != dirichlet_full).collect();
        let mut kept_of_full = vec![None; dim_r];
        for (kept, &full) in radial_kept.iter().enumerate() {
            kept_of_full[full] = Some(kept);
        }
        let interface_full = match mesh.subdomain {
            Subdomain::Stator => 0,         // r = r_gamma is the inner end
            Subdomain::Rotor => dim_r - 1,  // r = r_gamma is the outer end
        };
        let interface_layer = kept_of_full[interface_full]
            .expect("interface layer must survive Dirichlet elimination");
        Ok(SplineSpace2D { mesh, angular, radial, radial_kept, kept_of_full, interface_layer })
    }

    pub fn degree(&self) -> usize {
        self.angular.degree()
    }

    pub fn subdomain(&self) -> Subdomain {
        self.mesh.subdomain
    }

    /// Interface radius of this subdomain.
    pub fn r_interface(&self) -> f64 {
        match self.mesh.subdomain {
            Subdomain::Stator => self.mesh.r_lo,
            Subdomain::Rotor => self.mesh.r_hi,
        }
    }

    pub fn n_radial_kept(&self) -> usize {
        self.radial_kept.len()
    }

    /// Number of dofs after Dirichlet elimination.
    pub fn n_dofs(&self) -> usize {
        self.mesh.n_theta * self.radial_kept.len()
    }

    /// Kept radial basis indices (full-space numbering).
    pub fn radial_kept(&self) -> &[usize] {
        &self.radial_kept
    }

    /// Global dof of angular function `i_theta` and full radial index
    /// `full_r`, or `None` if that layer was eliminated.
    pub fn dof(&self, i_theta: usize, full_r: usize) -> Option<usize> {
        self.kept_of_full[full_r].map(|j| i_theta * self.radial_kept.len() + j)
    }

    /// Restriction map from subdomain dofs to interface-trace coefficients.
    ///
    /// `trace(v)[i] = v[dofs[i]]`: the trace of the discrete function at the
    /// interface circle is the periodic angular spline with those
    /// coefficients.
    pub fn trace_matrix(&self) -> TraceMap {
        let stride = self.radial_kept.len();
        let dofs = (0..self.mesh.n_theta).map(|i| i * stride + self.interface_layer).collect();
        TraceMap { dofs, n_dofs: self.n_dofs() }
    }

    /// Evaluates a discrete function (kept-dof coefficients) at `(r, θ)`.
    pub fn eval(&self, coeffs: &[f64], r: f64, theta: f64) -> Result<f64> {
        let ab = self.angular.eval_basis(theta)?;
        let rb = self.radial.eval_basis(r)?;
        let mut total = 0.0;
        for (j, av) in ab.values.iter().enumerate() {
            let it = self.angular.global_index(ab.first, j);
            for (p, rv) in rb.values.iter().enumerate() {
                if let Some(g) = self.dof(it, rb.first + p) {
                    total += coeffs[g] * av * rv;
                }
            }
        }
        Ok(total)
    }

    /// Gradient in polar components `(∂_r v, r^{-1} ∂_θ v)` at `(r, θ)`.
    pub fn eval_gradient(&self, coeffs: &[f64], r: f64, theta: f64) -> Result<(f64, f64)> {
        let ab = self.angular.eval_basis(theta)?;
        let rb = self.radial.eval_basis(r)?;
        let (mut dr, mut dt) = (0.0, 0.0);
        for (j, (av, ad)) in ab.values.iter().zip(&ab.derivs).enumerate() {
            let it = self.angular.global_index(ab.first, j);
            for (p, (rv, rd)) in rb.values.iter().zip(&rb.derivs).enumerate() {
                if let Some(g) = self.dof(it, rb.first + p) {
                    dr += coeffs[g] * av * rd;
                    dt += coeffs[g] * ad * rv;
                }
            }
        }
        Ok((dr, dt / r))
    }
}

/// Selection of the interface dof layer; see [`SplineSpace2D::trace_matrix`].
#[derive(Debug, Clone)]
pub struct TraceMap {
    dofs: Vec<usize>,
    n_dofs: usize,
}

impl TraceMap {
    /// Map selecting every dof, for operators acting on a full vector.
    pub fn identity(n: usize) -> Self {
        TraceMap { dofs: (0..n).collect(), n_dofs: n }
    }

    /// Map selecting an explicit dof list.
    pub fn from_dofs(dofs: Vec<usize>, n_dofs: usize) -> Self {
        debug_assert!(dofs.iter().all(|&d| d < n_dofs));
        TraceMap { dofs, n_dofs }
    }

    pub fn n_trace(&self) -> usize {
        self.dofs.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    /// Dof index carrying trace coefficient `i`.
    pub fn dof_of_trace(&self, i: usize) -> usize {
        self.dofs[i]
    }

    /// Extracts trace coefficients from a dof vector.
    pub fn restrict(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n_dofs);
        self.dofs.iter().map(|&d| v[d]).collect()
    }

    /// Adds `values` into the trace dof slots of `out`.
    pub fn scatter_add(&self, values: &[f64], out: &mut [f64]) {
        debug_assert_eq!(values.len(), self.dofs.len());
        debug_assert_eq!(out.len(), self.n_dofs);
        for (&d, &v) in self.dofs.iter().zip(values) {
            out[d] += v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, AnnulusGeometry};

    fn spaces(n_theta: usize, n_r: usize, k: usize) -> (SplineSpace2D, SplineSpace2D) {
        let geom = AnnulusGeometry::default();
        let sm = build_mesh(&geom, Subdomain::Stator, n_theta, n_r).unwrap();
        let rm = build_mesh(&geom, Subdomain::Rotor, n_theta, n_r).unwrap();
        (SplineSpace2D::new(sm, k).unwrap(), SplineSpace2D::new(rm, k).unwrap())
    }

    #[test]
    fn interface_dof_count_equals_n_theta_for_all_degrees() {
        for k in 1..=5 {
            let (stator, rotor) = spaces(12, 3, k);
            assert_eq!(stator.trace_matrix().n_trace(), 12);
            assert_eq!(rotor.trace_matrix().n_trace(), 12);
            assert_eq!(stator.n_dofs(), 12 * (3 + k - 1));
            assert_eq!(rotor.n_dofs(), 12 * (3 + k - 1));
        }
    }

    #[test]
    fn constant_function_has_constant_trace() {
        let (stator, _) = spaces(8, 2, 2);
        let coeffs = vec![1.0; stator.n_dofs()];
        let tm = stator.trace_matrix();
        let trace = tm.restrict(&coeffs);
        assert!(trace.iter().all(|&t| (t - 1.0).abs() < 1e-15));
        // With all coefficients 1 the function is 1 wherever no eliminated
        // layer contributes; on the interface circle it is exactly 1.
        let v = stator.eval(&coeffs, stator.r_interface(), 0.37).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn zero_interface_layer_gives_zero_trace() {
        let (_, rotor) = spaces(8, 2, 3);
        let mut coeffs = vec![1.0; rotor.n_dofs()];
        let tm = rotor.trace_matrix();
        for i in 0..tm.n_trace() {
            coeffs[tm.dof_of_trace(i)] = 0.0;
        }
        for i in 0..8 {
            let theta = i as f64 * 0.7;
            let v = rotor.eval(&coeffs, rotor.r_interface(), theta).unwrap();
            assert!(v.abs() < 1e-14, "trace at θ={theta}: {v}");
        }
    }

    #[test]
    fn dirichlet_layer_vanishes_on_sigma() {
        let geom = AnnulusGeometry::default();
        let (stator, rotor) = spaces(8, 3, 2);
        // Any kept basis function vanishes on the Dirichlet boundary.
        for sp in [&stator, &rotor] {
            let r_dir = match sp.subdomain() {
                Subdomain::Stator => geom.r_outer,
                Subdomain::Rotor => geom.r_shaft,
            };
            for g in 0..sp.n_dofs() {
                let mut c = vec![0.0; sp.n_dofs()];
                c[g] = 1.0;
                let v = sp.eval(&c, r_dir, 1.1).unwrap();
                assert!(v.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn trace_is_the_angular_spline_with_selected_coefficients() {
        let (stator, _) = spaces(9, 2, 2);
        let mut coeffs = vec![0.0; stator.n_dofs()];
        let tm = stator.trace_matrix();
        for i in 0..tm.n_trace() {
            coeffs[tm.dof_of_trace(i)] = (i as f64 * 0.83).sin();
        }
        let trace = tm.restrict(&coeffs);
        for j in 0..20 {
            let theta = j as f64 * 0.31;
            let direct = stator.eval(&coeffs, stator.r_interface(), theta).unwrap();
            let via_trace = stator.angular.eval_function(&trace, theta).unwrap();
            assert!((direct - via_trace).abs() < 1e-13);
        }
    }
}
