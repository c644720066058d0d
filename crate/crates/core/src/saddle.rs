//! Coupled mortar saddle-point system: assembly, Schur-complement solve,
//! rotor rotation sweeps, and the manufactured solution used for
//! convergence studies.
//!
//! The system is
//! `[[A, Bᵀ], [B, 0]] [u; λ] = [f; 0]` with `A` block-diagonal over the two
//! rings (physical reluctivity) and `B = [B₁ | −R(α)ᵀ B₂]` pairing the
//! multiplier against the interface jump `v₁ − v₂`. A rotor rotated by `α`
//! carries its mesh and sources along, so only its coupling block changes:
//! a rotor basis function seen from the stator frame is shifted by `α`,
//! which transforms the harmonic test functions by the block rotation
//! `R(α)ᵀ`.

use crate::geometry::AnnulusGeometry;
use crate::harmonics::{
    assemble_coupling, rotate_coeffs, rotate_rows, HarmonicSpace,
};
use crate::infsup::schur_complement;
use crate::linalg::{CscMatrix, SparseCholesky};
use crate::spline::{
    assemble_rhs, assemble_stiffness, QuadOptions, ScalarField, SourceSpec, SplineSpace2D,
    TraceMap,
};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Relative eigenvalue threshold below which the multiplier Schur complement
/// is treated as rank deficient and the solve refuses to proceed.
pub const RANK_DEFICIENCY_RATIO: f64 = 1e-12;

/// Assembled blocks of the coupled system at one rotor angle.
pub struct SaddleSystem {
    pub stator: SplineSpace2D,
    pub rotor: SplineSpace2D,
    pub harmonics: HarmonicSpace,
    pub alpha: f64,
    /// Stator stiffness (upper CSC), physical ν.
    pub a1: CscMatrix,
    /// Rotor stiffness (upper CSC), physical ν.
    pub a2: CscMatrix,
    /// Coupling rows over stator trace coefficients (sign +1).
    pub b1: DMatrix<f64>,
    /// Coupling rows over rotor trace coefficients at α = 0 (sign +1; the
    /// jump sign and the rotation are applied where the block is used).
    pub b2: DMatrix<f64>,
    pub trace1: TraceMap,
    pub trace2: TraceMap,
    pub rhs1: Vec<f64>,
    pub rhs2: Vec<f64>,
}

/// Field and multiplier coefficients with solve diagnostics.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u_stator: Vec<f64>,
    pub u_rotor: Vec<f64>,
    /// Harmonic multiplier coefficients (tangential field strength trace).
    pub lambda: Vec<f64>,
    /// `⟨[u_h], ψ_m⟩` for every harmonic basis function.
    pub jump_moments: Vec<f64>,
    /// Relative residual of the field equations.
    pub residual_rel: f64,
    /// `uᵀ A u = (ν ∇u, ∇u)`.
    pub energy: f64,
    /// `⟨j, u⟩`; equals `energy` by the discrete energy identity.
    pub load_pairing: f64,
}

impl SolveResult {
    pub fn max_jump_moment(&self) -> f64 {
        self.jump_moments.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Assembles stiffness blocks, couplings, and loads.
///
/// Warns via the result if the multiplier dimension exceeds either trace
/// dof count only at solve time; assembly itself allows any order.
pub fn assemble_system(
    geom: &AnnulusGeometry,
    stator: &SplineSpace2D,
    rotor: &SplineSpace2D,
    harmonics: &HarmonicSpace,
    src: &SourceSpec,
    alpha: f64,
) -> Result<SaddleSystem> {
    let r1 = stator.r_interface();
    let r2 = rotor.r_interface();
    if (r1 - r2).abs() > 1e-14 * geom.r_gamma || (r1 - harmonics.r_gamma).abs() > 1e-14 {
        return Err(Error::Incompatible(format!(
            "interface radii disagree: stator {r1}, rotor {r2}, multiplier {}",
            harmonics.r_gamma
        )));
    }
    let opts = QuadOptions::default();
    let bounds = Some((src.nu_lo, src.nu_hi));
    let a1 = assemble_stiffness(stator, &src.nu, bounds, opts)?;
    let a2 = assemble_stiffness(rotor, &src.nu, bounds, opts)?;
    let rhs1 = assemble_rhs(stator, &no_magnetization(src), opts)?;
    let rhs2 = assemble_rhs(rotor, src, opts)?;
    let b1 = assemble_coupling(&stator.angular, harmonics, 1.0)?;
    let b2 = assemble_coupling(&rotor.angular, harmonics, 1.0)?;
    Ok(SaddleSystem {
        stator: stator.clone(),
        rotor: rotor.clone(),
        harmonics: *harmonics,
        alpha,
        a1,
        a2,
        b1,
        b2,
        trace1: stator.trace_matrix(),
        trace2: rotor.trace_matrix(),
        rhs1,
        rhs2,
    })
}

/// The magnetization lives on the rotor; the stator load drops it.
fn no_magnetization(src: &SourceSpec) -> SourceSpec {
    SourceSpec { m: crate::spline::VectorField::zero(), ..src.clone() }
}

impl SaddleSystem {
    /// More multiplier functions than either interface trace can control;
    /// the solve will reject the system as rank deficient.
    pub fn multiplier_too_rich(&self) -> bool {
        let n_min = self.trace1.n_trace().min(self.trace2.n_trace());
        self.harmonics.dim() > n_min
    }

    pub fn n_field_dofs(&self) -> usize {
        self.stator.n_dofs() + self.rotor.n_dofs()
    }

    /// Total system dimension including the multiplier block.
    pub fn dim(&self) -> usize {
        self.n_field_dofs() + self.harmonics.dim()
    }

    /// Rotor coupling rows at the current angle: `R(α)ᵀ B₂`.
    pub fn b2_rotated(&self) -> DMatrix<f64> {
        rotate_rows(self.harmonics.n_max, -self.alpha, &self.b2)
    }
}

/// Factorizations and reduced operators reused across solves of the same
/// system family (fixed meshes and sources, varying rotor angle).
pub struct SaddleSolver {
    system: SaddleSystem,
    chol1: SparseCholesky,
    chol2: SparseCholesky,
    /// Schur parts `B₁ A₁⁻¹ B₁ᵀ` and `B₂ A₂⁻¹ B₂ᵀ` (unrotated).
    s1: DMatrix<f64>,
    s2: DMatrix<f64>,
    /// Coupling images `B_ℓ (A_ℓ⁻¹ f_ℓ)|_Γ` of the particular solutions.
    g1: DVector<f64>,
    g2: DVector<f64>,
}

impl SaddleSolver {
    pub fn new(system: SaddleSystem) -> Result<Self> {
        let chol1 = SparseCholesky::factor(&system.a1)?;
        let chol2 = SparseCholesky::factor(&system.a2)?;
        let s1 = schur_complement(&chol1, &system.b1, &system.trace1);
        let s2 = schur_complement(&chol2, &system.b2, &system.trace2);
        let y1 = chol1.solve(&system.rhs1);
        let y2 = chol2.solve(&system.rhs2);
        let g1 = &system.b1 * DVector::from_vec(system.trace1.restrict(&y1));
        let g2 = &system.b2 * DVector::from_vec(system.trace2.restrict(&y2));
        Ok(SaddleSolver { system, chol1, chol2, s1, s2, g1, g2 })
    }

    pub fn system(&self) -> &SaddleSystem {
        &self.system
    }

    /// Solves at the system's stored angle.
    pub fn solve(&self) -> Result<SolveResult> {
        self.solve_at(self.system.alpha)
    }

    /// Solves with the rotor rotated to `alpha`, reusing every factorization
    /// and rebuilding only the rotation blocks.
    pub fn solve_at(&self, alpha: f64) -> Result<SolveResult> {
        let sys = &self.system;
        let n_max = sys.harmonics.n_max;
        let dim = sys.harmonics.dim();

        // S(α) = S₁ + R(α)ᵀ S₂ R(α); with R orthogonal this is the Schur
        // complement of B(α) = [B₁ | −R(α)ᵀ B₂].
        let s2r = crate::harmonics::rotate_conjugate(n_max, -alpha, &self.s2);
        let s = &self.s1 + s2r;

        // Rank guard: multiplier space too rich makes S numerically singular.
        let eig = crate::linalg::sym_eigenvalues(&s)?;
        let lam_max = eig.last().copied().unwrap_or(0.0);
        let lam_min = eig.first().copied().unwrap_or(0.0);
        if lam_min <= RANK_DEFICIENCY_RATIO * lam_max {
            return Err(Error::InfSupViolated {
                ratio: if lam_max > 0.0 { lam_min / lam_max } else { 0.0 },
                threshold: RANK_DEFICIENCY_RATIO,
            });
        }

        // g = B A⁻¹ f; λ = S⁻¹ g.
        let g = &self.g1 - DVector::from_vec(rotate_coeffs(n_max, -alpha, self.g2.as_slice()));
        let lambda = s
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { column: 0, pivot: lam_min })?
            .solve(&g);

        // u₁ = A₁⁻¹ (f₁ − B₁ᵀ λ); u₂ = A₂⁻¹ (f₂ + B₂ᵀ R(α) λ).
        let bt_lambda_1 = self.system.b1.transpose() * &lambda;
        let mut rhs1 = sys.rhs1.clone();
        sys.trace1.scatter_add(
            &bt_lambda_1.iter().map(|v| -v).collect::<Vec<_>>(),
            &mut rhs1,
        );
        let u1 = self.chol1.solve(&rhs1);

        let r_lambda = rotate_coeffs(n_max, alpha, lambda.as_slice());
        let bt_lambda_2 = self.system.b2.transpose() * DVector::from_vec(r_lambda);
        let mut rhs2 = sys.rhs2.clone();
        sys.trace2.scatter_add(bt_lambda_2.as_slice(), &mut rhs2);
        let u2 = self.chol2.solve(&rhs2);

        // Jump moments B u = B₁ u₁|Γ − R(α)ᵀ B₂ u₂|Γ.
        let m1 = &sys.b1 * DVector::from_vec(sys.trace1.restrict(&u1));
        let m2 = &sys.b2 * DVector::from_vec(sys.trace2.restrict(&u2));
        let m2r = rotate_coeffs(n_max, -alpha, m2.as_slice());
        let jump_moments: Vec<f64> = (0..dim).map(|i| m1[i] - m2r[i]).collect();

        // Field residual ‖A u + Bᵀ λ − f‖ relative to ‖f‖ (or to the
        // multiplier forces for zero loads).
        let mut res1 = sys.a1.sym_upper_mul_vec(&u1);
        for (r, f) in res1.iter_mut().zip(&sys.rhs1) {
            *r -= f;
        }
        sys.trace1.scatter_add(bt_lambda_1.as_slice(), &mut res1);
        let mut res2 = sys.a2.sym_upper_mul_vec(&u2);
        for (r, f) in res2.iter_mut().zip(&sys.rhs2) {
            *r -= f;
        }
        sys.trace2.scatter_add(
            &bt_lambda_2.iter().map(|v| -v).collect::<Vec<_>>(),
            &mut res2,
        );
        let res_norm = norm2(&res1) + norm2(&res2);
        let ref_norm = (norm2(&sys.rhs1) + norm2(&sys.rhs2))
            .max(norm2(bt_lambda_1.as_slice()) + norm2(bt_lambda_2.as_slice()));
        let residual_rel =
            if ref_norm > 0.0 { (res_norm / ref_norm).sqrt() } else { res_norm.sqrt() };

        let energy = sys.a1.sym_upper_quadratic_form(&u1, &u1)
            + sys.a2.sym_upper_quadratic_form(&u2, &u2);
        let load_pairing = dot(&sys.rhs1, &u1) + dot(&sys.rhs2, &u2);

        Ok(SolveResult {
            u_stator: u1,
            u_rotor: u2,
            lambda: lambda.iter().copied().collect(),
            jump_moments,
            residual_rel,
            energy,
            load_pairing,
        })
    }

    /// Solves a list of rotor angles, reassembling only the rotation blocks.
    pub fn sweep_rotation(&self, angles: &[f64]) -> Result<Vec<SolveResult>> {
        angles
            .iter()
            .map(|&a| {
                if !a.is_finite() {
                    return Err(Error::Incompatible(format!("non-finite rotor angle {a}")));
                }
                self.solve_at(a)
            })
            .collect()
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Manufactured reference solution
/// `u(r, θ) = sin(π (r − r_shaft)/(r_outer − r_shaft)) · cos(3θ)`,
/// which vanishes on both Dirichlet circles, is continuous across the
/// interface, and has the analytic polar Laplacian
/// `Δu = (σ'' + σ'/r − 9 σ/r²) cos 3θ`.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedSolution {
    pub geom: AnnulusGeometry,
}

impl ManufacturedSolution {
    pub const ANGULAR_MODE: usize = 3;

    pub fn new(geom: AnnulusGeometry) -> Self {
        ManufacturedSolution { geom }
    }

    fn span(&self) -> f64 {
        self.geom.r_outer - self.geom.r_shaft
    }

    fn radial(&self, r: f64) -> (f64, f64, f64) {
        let l = self.span();
        let rho = (r - self.geom.r_shaft) / l;
        let s = (std::f64::consts::PI * rho).sin();
        let sp = (std::f64::consts::PI / l) * (std::f64::consts::PI * rho).cos();
        let spp = -(std::f64::consts::PI / l).powi(2) * s;
        (s, sp, spp)
    }

    pub fn value(&self, r: f64, theta: f64) -> f64 {
        let (s, _, _) = self.radial(r);
        s * (3.0 * theta).cos()
    }

    /// Gradient in polar components `(∂_r u, r^{-1} ∂_θ u)`.
    pub fn gradient(&self, r: f64, theta: f64) -> (f64, f64) {
        let (s, sp, _) = self.radial(r);
        (sp * (3.0 * theta).cos(), -3.0 * s * (3.0 * theta).sin() / r)
    }

    /// Source `j = −Δu` for unit reluctivity.
    pub fn source(&self) -> ScalarField {
        let m = *self;
        ScalarField::from_fn(move |r, theta| {
            let (s, sp, spp) = m.radial(r);
            -(spp + sp / r - 9.0 * s / (r * r)) * (3.0 * theta).cos()
        })
    }

    pub fn source_spec(&self) -> SourceSpec {
        SourceSpec {
            js: self.source(),
            m: crate::spline::VectorField::zero(),
            nu: ScalarField::Constant(1.0),
            nu_lo: 1.0,
            nu_hi: 1.0,
        }
    }

    /// Interface flux `λ = ∂_r u` at `r_gamma`: a pure `cos 3θ` profile with
    /// this amplitude.
    pub fn lambda_cos3_coefficient(&self) -> f64 {
        let (_, sp, _) = self.radial(self.geom.r_gamma);
        sp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, Subdomain};
    use crate::spline::VectorField;
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    fn setup(
        n_theta_s: usize,
        n_theta_r: usize,
        k: usize,
        n_order: usize,
    ) -> (AnnulusGeometry, SplineSpace2D, SplineSpace2D, HarmonicSpace) {
        let geom = AnnulusGeometry::default();
        let ms = build_mesh(&geom, Subdomain::Stator, n_theta_s, geom.isotropic_n_r(Subdomain::Stator, n_theta_s)).unwrap();
        let mr = build_mesh(&geom, Subdomain::Rotor, n_theta_r, geom.isotropic_n_r(Subdomain::Rotor, n_theta_r)).unwrap();
        (
            geom,
            SplineSpace2D::new(ms, k).unwrap(),
            SplineSpace2D::new(mr, k).unwrap(),
            HarmonicSpace::new(n_order, geom.r_gamma),
        )
    }

    #[test]
    fn manufactured_laplacian_matches_finite_differences() {
        let m = ManufacturedSolution::new(AnnulusGeometry::default());
        let j = m.source();
        let h = 1e-5;
        for &(r, t) in &[(0.05, 0.3), (0.031, 2.1), (0.062, 4.4), (0.0447, 1.0)] {
            let lap_fd = (m.value(r + h, t) - 2.0 * m.value(r, t) + m.value(r - h, t)) / (h * h)
                + (m.value(r + h, t) - m.value(r - h, t)) / (2.0 * h * r)
                + (m.value(r, t + h) - 2.0 * m.value(r, t) + m.value(r, t - h)) / (h * h * r * r);
            let j_v = j.eval(r, t);
            assert_relative_eq!(-lap_fd, j_v, max_relative = 1e-4);
        }
        // Dirichlet compatibility and interface continuity.
        assert!(m.value(m.geom.r_shaft, 0.7).abs() < 1e-14);
        assert!(m.value(m.geom.r_outer, 0.7).abs() < 1e-14);
    }

    #[test]
    fn zero_sources_give_zero_solution() {
        let (geom, ss, rs, hs) = setup(8, 8, 1, 2);
        let sys = assemble_system(&geom, &ss, &rs, &hs, &SourceSpec::vacuum(), 0.0).unwrap();
        assert!(sys.rhs1.iter().all(|&v| v == 0.0));
        assert_eq!(sys.dim(), ss.n_dofs() + rs.n_dofs() + 5);
        let sol = SaddleSolver::new(sys).unwrap().solve().unwrap();
        assert!(sol.u_stator.iter().all(|&v| v == 0.0));
        assert!(sol.u_rotor.iter().all(|&v| v == 0.0));
        assert!(sol.lambda.iter().all(|&v| v == 0.0));
        assert_eq!(sol.energy, 0.0);
    }

    #[test]
    fn alpha_zero_leaves_rotor_coupling_unrotated() {
        let (geom, ss, rs, hs) = setup(8, 6, 1, 2);
        let sys = assemble_system(&geom, &ss, &rs, &hs, &SourceSpec::vacuum(), 0.0).unwrap();
        assert_eq!(sys.b2_rotated(), sys.b2);
    }

    #[test]
    fn incompatible_interface_radii_rejected() {
        let (geom, ss, rs, _) = setup(8, 8, 1, 2);
        let wrong = HarmonicSpace::new(2, geom.r_gamma * 1.1);
        assert!(assemble_system(&geom, &ss, &rs, &wrong, &SourceSpec::vacuum(), 0.0).is_err());
    }

    #[test]
    fn energy_identity_and_mortar_orthogonality() {
        let (geom, ss, rs, hs) = setup(16, 12, 2, 3);
        let m = ManufacturedSolution::new(geom);
        let sys = assemble_system(&geom, &ss, &rs, &hs, &m.source_spec(), 0.0).unwrap();
        let sol = SaddleSolver::new(sys).unwrap().solve().unwrap();
        assert!(sol.energy > 0.0);
        assert_relative_eq!(sol.energy, sol.load_pairing, max_relative = 1e-10);
        let scale = sol.energy.sqrt();
        assert!(
            sol.max_jump_moment() <= 1e-10 * scale,
            "jump {} vs energy scale {scale}",
            sol.max_jump_moment()
        );
        assert!(sol.residual_rel < 1e-10);
    }

    #[test]
    fn too_rich_multiplier_space_is_diagnosed() {
        let (geom, ss, rs, hs) = setup(8, 8, 1, 5); // dim M = 11 > 8
        let m = ManufacturedSolution::new(geom);
        let sys = assemble_system(&geom, &ss, &rs, &hs, &m.source_spec(), 0.0).unwrap();
        match SaddleSolver::new(sys).unwrap().solve() {
            Err(Error::InfSupViolated { .. }) => {}
            other => panic!("expected inf-sup diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn manufactured_solution_converges_in_h1() {
        let m = ManufacturedSolution::new(AnnulusGeometry::default());
        let k = 1;
        let mut errs = Vec::new();
        for n_theta in [12usize, 24, 48] {
            let (geom, ss, rs, hs) = setup(n_theta, n_theta, k, 4);
            let sys = assemble_system(&geom, &ss, &rs, &hs, &m.source_spec(), 0.0).unwrap();
            let sol = SaddleSolver::new(sys).unwrap().solve().unwrap();
            let g = |r: f64, t: f64| m.gradient(r, t);
            let e1 = crate::spline::h1_seminorm_error(&ss, &sol.u_stator, &g, 2).unwrap();
            let e2 = crate::spline::h1_seminorm_error(&rs, &sol.u_rotor, &g, 2).unwrap();
            errs.push((e1 * e1 + e2 * e2).sqrt());
        }
        let rate = (errs[1] / errs[2]).log2();
        assert!((rate - k as f64).abs() < 0.2, "rate {rate}, errors {errs:?}");
    }

    #[test]
    fn lambda_recovers_interface_flux_mode() {
        let m = ManufacturedSolution::new(AnnulusGeometry::default());
        let (geom, ss, rs, hs) = setup(48, 48, 2, 4);
        let sys = assemble_system(&geom, &ss, &rs, &hs, &m.source_spec(), 0.0).unwrap();
        let sol = SaddleSolver::new(sys).unwrap().solve().unwrap();
        // cos 3θ coefficient sits at index 2·3−1 = 5.
        let lam3 = sol.lambda[5];
        let exact = m.lambda_cos3_coefficient();
        assert_relative_eq!(lam3, exact, max_relative = 1e-3);
        // All other coefficients are comparatively small.
        for (i, &l) in sol.lambda.iter().enumerate() {
            if i != 5 {
                assert!(l.abs() < 1e-3 * exact.abs(), "λ[{i}] = {l}");
            }
        }
    }

    #[test]
    fn enrichment_does_not_degrade_the_field_error() {
        // The exact interface flux is a pure mode-3 profile, so once N >= 3
        // the multiplier space is exact and the field error is flat in N.
        let m = ManufacturedSolution::new(AnnulusGeometry::default());
        let mut errors = Vec::new();
        for n_order in 3..=6usize {
            let (geom, ss, rs, _) = setup(16, 16, 2, n_order);
            let hs = HarmonicSpace::new(n_order, geom.r_gamma);
            let sys = assemble_system(&geom, &ss, &rs, &hs, &m.source_spec(), 0.0).unwrap();
            let sol = SaddleSolver::new(sys).unwrap().solve().unwrap();
            let g = |r: f64, t: f64| m.gradient(r, t);
            let e1 = crate::spline::h1_seminorm_error(&ss, &sol.u_stator, &g, 2).unwrap();
            let e2 = crate::spline::h1_seminorm_error(&rs, &sol.u_rotor, &g, 2).unwrap();
            errors.push((e1 * e1 + e2 * e2).sqrt());
        }
        for w in errors.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "error grew under enrichment: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn multiplier_richness_warning_flag() {
        let (geom, ss, rs, hs) = setup(8, 8, 1, 5); // dim 11 > 8
        let sys = assemble_system(&geom, &ss, &rs, &hs, &SourceSpec::vacuum(), 0.0).unwrap();
        assert!(sys.multiplier_too_rich());
        let (geom, ss, rs, hs) = setup(8, 8, 1, 3); // dim 7 <= 8
        let sys = assemble_system(&geom, &ss, &rs, &hs, &SourceSpec::vacuum(), 0.0).unwrap();
        assert!(!sys.multiplier_too_rich());
    }

    #[test]
    fn axisymmetric_source_is_rotation_invariant() {
        let (geom, ss, rs, hs) = setup(12, 10, 1, 3);
        let src = SourceSpec::new(
            ScalarField::from_fn(|r, _| r),
            VectorField::zero(),
            ScalarField::Constant(1.0),
            1.0,
            1.0,
        )
        .unwrap();
        let sys = assemble_system(&geom, &ss, &rs, &hs, &src, 0.0).unwrap();
        let solver = SaddleSolver::new(sys).unwrap();
        // A single-angle sweep is exactly the plain solve.
        let single = solver.sweep_rotation(&[0.0]).unwrap();
        assert_eq!(single[0].u_stator, solver.solve().unwrap().u_stator);
        let sols = solver.sweep_rotation(&[0.0, 0.4, 1.7]).unwrap();
        let scale = sols[0].u_stator.iter().chain(&sols[0].u_rotor).fold(0.0f64, |m, v| m.max(v.abs()));
        for s in &sols[1..] {
            for (a, b) in s.u_stator.iter().zip(&sols[0].u_stator) {
                assert!((a - b).abs() < 1e-10 * scale, "{a} vs {b}");
            }
            for (a, b) in s.u_rotor.iter().zip(&sols[0].u_rotor) {
                assert!((a - b).abs() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn rotating_a_cos_source_rotates_lambda_mode_one() {
        // cos θ' source carried by the rotor, axisymmetric stator: rotating
        // the rotor by α rigidly rotates the interface data, so
        // λ_lab(θ) = λ₀(θ − α) and the mode-1 pair transforms by R(α)ᵀ.
        let (geom, ss, rs, hs) = setup(16, 16, 1, 2);
        let r_gamma = geom.r_gamma;
        let src = SourceSpec::new(
            ScalarField::from_fn(move |r, t| if r < r_gamma { t.cos() } else { 0.0 }),
            VectorField::zero(),
            ScalarField::Constant(1.0),
            1.0,
            1.0,
        )
        .unwrap();
        let sys = assemble_system(&geom, &ss, &rs, &hs, &src, 0.0).unwrap();
        let solver = SaddleSolver::new(sys).unwrap();
        let alpha = 0.37;
        let sols = solver.sweep_rotation(&[0.0, alpha]).unwrap();
        let base = &sols[0].lambda;
        let rotated = &sols[1].lambda;
        let predicted = rotate_coeffs(2, -alpha, base);
        let scale = base.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..predicted.len() {
            assert_relative_eq!(rotated[i], predicted[i], epsilon = 1e-10 * scale);
        }
        // Mode-1 pair actually carries the signal.
        assert!(base[1].abs() > 1e-3 * scale);
    }

    #[test]
    fn periodic_shift_symmetry_after_index_shift() {
        // Rotating the rotor by one shared mesh period maps the whole
        // discrete configuration onto itself: rotor-frame coefficients are
        // unchanged, stator coefficients shift by one angular index, and the
        // multiplier rotates by R(Δθ)ᵀ.
        let (geom, ss, rs, hs) = setup(12, 12, 1, 3);
        let r_gamma = geom.r_gamma;
        let src = SourceSpec::new(
            ScalarField::from_fn(move |r, t| if r < r_gamma { (2.0 * t).cos() } else { 0.0 }),
            VectorField::zero(),
            ScalarField::Constant(1.0),
            1.0,
            1.0,
        )
        .unwrap();
        // Source fixed in the rotor frame.
        let sys = assemble_system(&geom, &ss, &rs, &hs, &src, 0.0).unwrap();
        let solver = SaddleSolver::new(sys).unwrap();
        let dtheta = TAU / 12.0;
        let sols = solver.sweep_rotation(&[0.0, dtheta]).unwrap();
        let scale = sols[0].u_stator.iter().fold(1e-30f64, |m, v| m.max(v.abs()));
        let kept_r = rs.n_radial_kept();
        for it in 0..12 {
            for p in 0..kept_r {
                let a = sols[1].u_rotor[it * kept_r + p];
                let b = sols[0].u_rotor[it * kept_r + p];
                assert!((a - b).abs() < 1e-10 * scale, "rotor it={it} p={p}: {a} vs {b}");
            }
        }
        let kept_s = ss.n_radial_kept();
        for it in 0..12 {
            for p in 0..kept_s {
                let shifted = sols[1].u_stator[((it + 1) % 12) * kept_s + p];
                let base = sols[0].u_stator[it * kept_s + p];
                assert!(
                    (shifted - base).abs() < 1e-10 * scale,
                    "stator it={it} p={p}: {shifted} vs {base}"
                );
            }
        }
        let lam_scale = sols[0].lambda.iter().fold(1e-30f64, |m, v| m.max(v.abs()));
        let lam_pred = rotate_coeffs(3, -dtheta, &sols[0].lambda);
        for (a, b) in sols[1].lambda.iter().zip(&lam_pred) {
            assert!((a - b).abs() < 1e-8 * lam_scale, "λ: {a} vs {b}");
        }
    }
}
