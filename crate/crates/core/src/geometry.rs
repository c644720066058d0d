//! Annular two-domain geometry and structured polar meshes.
//!
//! The computational domain is a pair of concentric annuli separated by the
//! circular interface `Γ` at radius `r_gamma`: the stator ring `Ω₁` between
//! `r_gamma` and `r_outer`, and the rotor ring `Ω₂` between `r_shaft` and
//! `r_gamma`. Both are images of a reference rectangle `[0, 2π) × [r_lo, r_hi]`
//! under the polar map, so the geometry is exact and meshes are uniform
//! tensor grids in the reference coordinates.

use crate::{Error, Result};
use std::f64::consts::TAU;

/// Which of the two rings a mesh or spline space lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subdomain {
    /// Outer ring (stator), `r_gamma < |x| < r_outer`, Dirichlet on `r_outer`.
    Stator,
    /// Inner ring (rotor), `r_shaft < |x| < r_gamma`, Dirichlet on `r_shaft`.
    Rotor,
}

/// Radii of the stator/rotor rings and the coupling interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusGeometry {
    /// Inner Dirichlet radius of the rotor ring (boundary `Σ₂`).
    pub r_shaft: f64,
    /// Interface radius: `Γ = {|x| = r_gamma}`.
    pub r_gamma: f64,
    /// Outer Dirichlet radius of the stator ring (boundary `Σ₁`).
    pub r_outer: f64,
}

impl AnnulusGeometry {
    pub fn new(r_shaft: f64, r_gamma: f64, r_outer: f64) -> Result<Self> {
        if !(r_shaft.is_finite() && r_gamma.is_finite() && r_outer.is_finite()) {
            return Err(Error::InvalidGeometry("radii must be finite".into()));
        }
        if !(0.0 < r_shaft && r_shaft < r_gamma && r_gamma < r_outer) {
            return Err(Error::InvalidGeometry(format!(
                "radii must satisfy 0 < r_shaft < r_gamma < r_outer, got \
                 {r_shaft} / {r_gamma} / {r_outer}"
            )));
        }
        Ok(AnnulusGeometry { r_shaft, r_gamma, r_outer })
    }

    /// Radial interval `[r_lo, r_hi]` of a subdomain.
    pub fn radial_extent(&self, sub: Subdomain) -> (f64, f64) {
        match sub {
            Subdomain::Stator => (self.r_gamma, self.r_outer),
            Subdomain::Rotor => (self.r_shaft, self.r_gamma),
        }
    }

    /// Area of a subdomain, `π (r_hi² − r_lo²)`.
    pub fn area(&self, sub: Subdomain) -> f64 {
        let (lo, hi) = self.radial_extent(sub);
        std::f64::consts::PI * (hi * hi - lo * lo)
    }

    /// Arc length of the interface circle, `2π r_gamma`.
    pub fn interface_measure(&self) -> f64 {
        TAU * self.r_gamma
    }

    /// Number of radial spans that keeps elements of the given angular count
    /// near-isotropic: `⌈extent / (r_gamma Δθ)⌉`.
    pub fn isotropic_n_r(&self, sub: Subdomain, n_theta: usize) -> usize {
        let (lo, hi) = self.radial_extent(sub);
        let dtheta = TAU / n_theta as f64;
        (((hi - lo) / (self.r_gamma * dtheta)).ceil() as usize).max(1)
    }
}

impl Default for AnnulusGeometry {
    /// Reference machine dimensions: air-gap interface at 44.7 mm, stator
    /// yoke at 67.5 mm, shaft at 20 mm.
    fn default() -> Self {
        AnnulusGeometry { r_shaft: 0.02, r_gamma: 0.0447, r_outer: 0.0675 }
    }
}

/// The polar reference map `F(r, θ) = (r cos θ, r sin θ)`.
///
/// Its Jacobian determinant is `r`, so reference integrals carry the weight
/// `r dr dθ`.
pub fn polar_map(r: f64, theta: f64) -> Result<(f64, f64)> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidGeometry(format!("polar map needs r > 0, got {r}")));
    }
    Ok((r * theta.cos(), r * theta.sin()))
}

/// Uniform tensor-product mesh on the reference rectangle of one subdomain.
///
/// Angular spans cover `[0, 2π)` exactly once and are periodic; the physical
/// mesh is the image under the polar map. Stator and rotor meshes may use
/// different `n_theta`, so they are non-matching across the interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarMesh {
    pub subdomain: Subdomain,
    /// Number of angular knot spans (uniform, periodic).
    pub n_theta: usize,
    /// Number of radial knot spans (uniform).
    pub n_r: usize,
    /// Inner radius of the subdomain rectangle.
    pub r_lo: f64,
    /// Outer radius of the subdomain rectangle.
    pub r_hi: f64,
}

impl PolarMesh {
    pub fn delta_theta(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    pub fn delta_r(&self) -> f64 {
        (self.r_hi - self.r_lo) / self.n_r as f64
    }

    pub fn n_elements(&self) -> usize {
        self.n_theta * self.n_r
    }

    /// Reference rectangle of element `(i_theta, i_r)`:
    /// `[θ₀, θ₁] × [r₀, r₁]`.
    pub fn element_rect(&self, i_theta: usize, i_r: usize) -> (f64, f64, f64, f64) {
        let dt = self.delta_theta();
        let dr = self.delta_r();
        (
            i_theta as f64 * dt,
            (i_theta + 1) as f64 * dt,
            self.r_lo + i_r as f64 * dr,
            self.r_lo + (i_r + 1) as f64 * dr,
        )
    }

    /// Exact physical area of one element, `Δθ (r₁² − r₀²) / 2`.
    pub fn element_area(&self, i_theta: usize, i_r: usize) -> f64 {
        let (t0, t1, r0, r1) = self.element_rect(i_theta, i_r);
        0.5 * (t1 - t0) * (r1 * r1 - r0 * r0)
    }

    /// Mesh with both directions halved in span width.
    pub fn refine(&self) -> PolarMesh {
        PolarMesh { n_theta: 2 * self.n_theta, n_r: 2 * self.n_r, ..*self }
    }
}

/// Builds the uniform mesh of one subdomain.
pub fn build_mesh(
    geom: &AnnulusGeometry,
    subdomain: Subdomain,
    n_theta: usize,
    n_r: usize,
) -> Result<PolarMesh> {
    if n_theta < 3 {
        return Err(Error::InvalidMesh(format!("n_theta must be at least 3, got {n_theta}")));
    }
    if n_r < 1 {
        return Err(Error::InvalidMesh("n_r must be at least 1".into()));
    }
    let (r_lo, r_hi) = geom.radial_extent(subdomain);
    Ok(PolarMesh { subdomain, n_theta, n_r, r_lo, r_hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polar_map_examples() {
        assert_eq!(polar_map(1.0, 0.0).unwrap(), (1.0, 0.0));
        let (x, y) = polar_map(2.0, PI / 2.0).unwrap();
        assert!(x.abs() < 1e-15 && (y - 2.0).abs() < 1e-15);
        let (x, y) = polar_map(0.0447, PI).unwrap();
        assert!((x + 0.0447).abs() < 1e-15 && y.abs() < 1e-15);
    }

    #[test]
    fn polar_map_rejects_nonpositive_radius() {
        assert!(polar_map(0.0, 1.0).is_err());
        assert!(polar_map(-1.0, 1.0).is_err());
    }

    #[test]
    fn geometry_invariants_enforced() {
        assert!(AnnulusGeometry::new(0.02, 0.0447, 0.0675).is_ok());
        assert!(AnnulusGeometry::new(0.0, 0.0447, 0.0675).is_err());
        assert!(AnnulusGeometry::new(0.05, 0.0447, 0.0675).is_err());
        assert!(AnnulusGeometry::new(0.02, 0.07, 0.0675).is_err());
        assert!(AnnulusGeometry::new(0.02, f64::NAN, 0.0675).is_err());
    }

    #[test]
    fn interface_measure_is_circumference() {
        let geom = AnnulusGeometry::default();
        assert!((geom.interface_measure() - TAU * 0.0447).abs() < 1e-15);
    }

    #[test]
    fn mesh_validation() {
        let geom = AnnulusGeometry::default();
        assert!(build_mesh(&geom, Subdomain::Stator, 2, 1).is_err());
        assert!(build_mesh(&geom, Subdomain::Stator, 4, 0).is_err());
        let mesh = build_mesh(&geom, Subdomain::Stator, 144, 12).unwrap();
        assert_eq!(mesh.n_theta, 144);
    }

    #[test]
    fn four_elements_cover_full_angle() {
        let geom = AnnulusGeometry::default();
        let mesh = build_mesh(&geom, Subdomain::Stator, 4, 1).unwrap();
        assert_eq!(mesh.n_elements(), 4);
        let total: f64 = (0..4).map(|i| mesh.element_rect(i, 0).1 - mesh.element_rect(i, 0).0).sum();
        assert!((total - TAU).abs() < 1e-15);
    }

    #[test]
    fn refinement_doubles_counts_and_halves_widths() {
        let geom = AnnulusGeometry::default();
        let mesh = build_mesh(&geom, Subdomain::Stator, 144, 12).unwrap();
        let fine = mesh.refine();
        assert_eq!(fine.n_theta, 288);
        assert_eq!(fine.n_r, 24);
        assert_eq!(fine.delta_theta(), mesh.delta_theta() / 2.0);
        assert_eq!(fine.delta_r(), mesh.delta_r() / 2.0);
    }

    #[test]
    fn element_areas_sum_to_annulus_area() {
        let geom = AnnulusGeometry::default();
        for sub in [Subdomain::Stator, Subdomain::Rotor] {
            let mesh = build_mesh(&geom, sub, 17, 5).unwrap();
            let total: f64 = (0..mesh.n_theta)
                .flat_map(|i| (0..mesh.n_r).map(move |j| (i, j)))
                .map(|(i, j)| mesh.element_area(i, j))
                .sum();
            let exact = geom.area(sub);
            assert!((total - exact).abs() <= 1e-12 * exact, "{total} vs {exact}");
        }
    }

    #[test]
    fn isotropic_radial_resolution_at_reference_sizes() {
        let geom = AnnulusGeometry::default();
        // 144 interface spans: radial extent 0.0228 against arc step
        // 0.0447·2π/144 ≈ 1.95e-3 gives 12 spans.
        assert_eq!(geom.isotropic_n_r(Subdomain::Stator, 144), 12);
        assert_eq!(geom.isotropic_n_r(Subdomain::Rotor, 144), 13);
    }
}
