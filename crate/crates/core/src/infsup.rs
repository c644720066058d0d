//! Discrete inf-sup constants of the harmonic mortar coupling, and the
//! closed-form constant of the continuous problem on the annulus.
//!
//! The discrete constant is the square root of the smallest eigenvalue of
//! `D^{-1/2} S D^{-1/2}` where `S = B A^{-1} Bᵀ` is the Schur complement of
//! the coupling on the multiplier space and `D` the diagonal `H^{-1/2}(Γ)`
//! Gram matrix. `A` is the gradient-seminorm Gram matrix (unit reluctivity),
//! so the Rayleigh quotient of `S` realizes `sup_v ⟨μ, v⟩² / |v|²_{H¹}`.

use crate::geometry::{build_mesh, AnnulusGeometry, Subdomain};
use crate::harmonics::{assemble_coupling, HarmonicSpace, SobolevExponent};
use crate::linalg::{sym_eigenvalues, SparseCholesky};
use crate::spline::{assemble_stiffness, QuadOptions, ScalarField, SplineSpace2D, TraceMap};
use crate::{Error, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// β′ below this is reported as numerically zero (inf-sup violated); chosen
/// between the ~1e-1 constants of stable cells and the ~1e-8 round-off
/// values of rank-deficient ones.
pub const NUMERICALLY_ZERO_BETA: f64 = 1e-6;

/// Which field space the supremum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Test functions supported on the stator ring only (the lower-bound
    /// construction used for the reference tables). Default.
    StatorOnly,
    /// Both rings coupled through the jump.
    Full,
}

impl Scope {
    pub fn label(&self) -> &'static str {
        match self {
            Scope::StatorOnly => "stator",
            Scope::Full => "full",
        }
    }
}

/// Mesh-family parameters held fixed across a refinement sweep.
#[derive(Debug, Clone, Copy)]
pub struct DiscretizationParams {
    /// Interface spans of the stator mesh at level 1.
    pub base_n_theta: usize,
    /// Radial spans of the stator mesh at level 1; `None` picks the
    /// near-isotropic default.
    pub base_n_r: Option<usize>,
    /// Rotor interface spans at level 1 (`None`: same as stator).
    pub rotor_base_n_theta: Option<usize>,
}

impl Default for DiscretizationParams {
    fn default() -> Self {
        DiscretizationParams { base_n_theta: 144, base_n_r: None, rotor_base_n_theta: None }
    }
}

impl DiscretizationParams {
    /// Stator `(n_theta, n_r)` at a refinement level (level 1 is the base;
    /// both directions double per level).
    pub fn stator_mesh_at(&self, geom: &AnnulusGeometry, level: usize) -> (usize, usize) {
        let scale = 1usize << (level - 1);
        let base_r =
            self.base_n_r.unwrap_or_else(|| geom.isotropic_n_r(Subdomain::Stator, self.base_n_theta));
        (self.base_n_theta * scale, base_r * scale)
    }

    pub fn rotor_mesh_at(&self, geom: &AnnulusGeometry, level: usize) -> (usize, usize) {
        let scale = 1usize << (level - 1);
        let base_t = self.rotor_base_n_theta.unwrap_or(self.base_n_theta);
        let base_r = self.base_n_r.unwrap_or_else(|| geom.isotropic_n_r(Subdomain::Rotor, base_t));
        (base_t * scale, base_r * scale)
    }
}

/// Outcome of one discrete inf-sup evaluation.
#[derive(Debug, Clone)]
pub struct InfSupResult {
    /// β′ = sqrt of the smallest generalized eigenvalue, clipped at 0.
    pub beta_discrete: f64,
    /// All `2N + 1` generalized eigenvalues, ascending.
    pub spectrum: Vec<f64>,
    /// Analytic constant of the continuous annulus problem (minimum over the
    /// modes contained in the multiplier space).
    pub beta_continuous: f64,
    /// Harmonic order `N`.
    pub n_order: usize,
    /// Interface dof count `n` of the stator trace.
    pub n_interface: usize,
    /// Reference interface mesh size over degree: `(2/n)/k`.
    pub h_over_k: f64,
    /// `N·h/k`; the sufficient stability criterion compares this against 1.
    pub criterion_value: f64,
    pub scope: Scope,
    /// `beta_discrete >` [`NUMERICALLY_ZERO_BETA`].
    pub stable: bool,
}

/// Per-mode analytic inf-sup constants `β_n` of the annulus problem, from
/// the separated Fourier solution of the auxiliary Neumann problem:
/// `β₀² = R₁ ln(R₂/R₁)`, `β_n² = R₁ tanh(n ln(R₂/R₁)) √(1+n²)/n`.
pub fn analytic_beta_modes(geom: &AnnulusGeometry, n_max: usize) -> Vec<f64> {
    let r1 = geom.r_gamma;
    let ell = (geom.r_outer / geom.r_gamma).ln();
    (0..=n_max)
        .map(|n| {
            if n == 0 {
                (r1 * ell).sqrt()
            } else {
                let nf = n as f64;
                (r1 * (nf * ell).tanh() * (1.0 + nf * nf).sqrt() / nf).sqrt()
            }
        })
        .collect()
}

/// Minimum of [`analytic_beta_modes`] with the attaining mode.
pub fn analytic_beta_min(geom: &AnnulusGeometry, n_max: usize) -> (f64, usize) {
    let modes = analytic_beta_modes(geom, n_max);
    let (mode, beta) = modes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("mode list is nonempty");
    (*beta, mode)
}

/// Dense Schur complement `S = B A^{-1} Bᵀ` on the multiplier space.
///
/// `b_trace` holds the coupling rows over interface-trace coefficients; the
/// trace map embeds them into the full dof space of the factored matrix.
/// Built from `2N + 1` sparse solves, blocked so each pass over the factor
/// serves several right-hand sides, and parallelized over blocks.
pub fn schur_complement(
    chol: &SparseCholesky,
    b_trace: &DMatrix<f64>,
    trace: &TraceMap,
) -> DMatrix<f64> {
    let m = b_trace.nrows();
    let nt = trace.n_trace();
    let n = chol.n();
    debug_assert_eq!(b_trace.ncols(), nt);
    debug_assert_eq!(trace.n_dofs(), n);

    const BLOCK: usize = 16;
    let starts: Vec<usize> = (0..m).step_by(BLOCK).collect();
    let blocks: Vec<(usize, DMatrix<f64>)> = starts
        .into_par_iter()
        .map(|start| {
            let w = BLOCK.min(m - start);
            let mut rhs = vec![0.0f64; n * w];
            for c in 0..w {
                for i in 0..nt {
                    rhs[c * n + trace.dof_of_trace(i)] = b_trace[(start + c, i)];
                }
            }
            chol.solve_block_in_place(&mut rhs, w);
            // Restrict the solves back to the trace layer and pair with B.
            let xt = DMatrix::from_fn(nt, w, |i, c| rhs[c * n + trace.dof_of_trace(i)]);
            (start, b_trace * xt)
        })
        .collect();

    let mut s = DMatrix::zeros(m, m);
    for (start, block) in blocks {
        s.view_mut((0, start), (m, block.ncols())).copy_from(&block);
    }
    s
}

/// Generalized eigenvalues of `S μ = λ D μ` with `D` diagonal positive:
/// the spectrum of `D^{-1/2} S D^{-1/2}`, ascending.
pub fn min_generalized_eig(s: &DMatrix<f64>, d: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(s.nrows(), d.len(), "Gram dimension mismatch");
    if d.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::Incompatible("Gram matrix must be positive".into()));
    }
    let scale: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    let scaled = DMatrix::from_fn(s.nrows(), s.ncols(), |i, j| scale[i] * s[(i, j)] * scale[j]);
    sym_eigenvalues(&scaled)
}

/// Operators of one `(level, degree, scope)` cell family, reusable for all
/// harmonic orders up to `n_assembled`.
pub struct InfSupEngine {
    geom: AnnulusGeometry,
    scope: Scope,
    level: usize,
    degree: usize,
    n_interface: usize,
    stator_chol: SparseCholesky,
    stator_trace: TraceMap,
    stator_coupling: DMatrix<f64>,
    rotor: Option<(SparseCholesky, TraceMap, DMatrix<f64>)>,
    n_assembled: usize,
    schur_cache: DMatrix<f64>,
}

impl InfSupEngine {
    /// Builds spaces, factors the gradient-seminorm Gram matrices, and fills
    /// the Schur complement for all orders up to `n_max`.
    pub fn new(
        geom: &AnnulusGeometry,
        params: &DiscretizationParams,
        level: usize,
        degree: usize,
        n_max: usize,
        scope: Scope,
    ) -> Result<Self> {
        if level < 1 {
            return Err(Error::InvalidMesh("refinement level counts from 1".into()));
        }
        let hspace = HarmonicSpace::new(n_max, geom.r_gamma);

        let (nt, nr) = params.stator_mesh_at(geom, level);
        let mesh = build_mesh(geom, Subdomain::Stator, nt, nr)?;
        let space = SplineSpace2D::new(mesh, degree)?;
        let one = ScalarField::Constant(1.0);
        let a1 = assemble_stiffness(&space, &one, None, QuadOptions::default())?;
        let stator_chol = SparseCholesky::factor(&a1)?;
        let stator_trace = space.trace_matrix();
        let stator_coupling = assemble_coupling(&space.angular, &hspace, 1.0)?;

        let rotor = match scope {
            Scope::StatorOnly => None,
            Scope::Full => {
                let (nt2, nr2) = params.rotor_mesh_at(geom, level);
                let mesh2 = build_mesh(geom, Subdomain::Rotor, nt2, nr2)?;
                let space2 = SplineSpace2D::new(mesh2, degree)?;
                let a2 = assemble_stiffness(&space2, &one, None, QuadOptions::default())?;
                let chol2 = SparseCholesky::factor(&a2)?;
                let trace2 = space2.trace_matrix();
                let coupling2 = assemble_coupling(&space2.angular, &hspace, -1.0)?;
                Some((chol2, trace2, coupling2))
            }
        };

        let mut schur = schur_complement(&stator_chol, &stator_coupling, &stator_trace);
        if let Some((chol2, trace2, coupling2)) = &rotor {
            schur += schur_complement(chol2, coupling2, trace2);
        }

        Ok(InfSupEngine {
            geom: *geom,
            scope,
            level,
            degree,
            n_interface: nt,
            stator_chol,
            stator_trace,
            stator_coupling,
            rotor,
            n_assembled: n_max,
            schur_cache: schur,
        })
    }

    pub fn n_interface(&self) -> usize {
        self.n_interface
    }

    pub fn max_order(&self) -> usize {
        self.n_assembled
    }

    /// Schur complement for a sub-order `N ≤ n_max`: the leading principal
    /// block, since the basis ordering nests the multiplier spaces.
    pub fn schur_at(&self, n_order: usize) -> DMatrix<f64> {
        assert!(n_order <= self.n_assembled);
        let d = 2 * n_order + 1;
        self.schur_cache.view((0, 0), (d, d)).into_owned()
    }

    /// Recomputes the Schur complement at `n_order` directly from fresh
    /// solves (no cache slicing); used to cross-check the cached path.
    pub fn schur_direct(&self, n_order: usize) -> DMatrix<f64> {
        assert!(n_order <= self.n_assembled);
        let d = 2 * n_order + 1;
        let b1 = self.stator_coupling.view((0, 0), (d, self.stator_coupling.ncols())).into_owned();
        let mut s = schur_complement(&self.stator_chol, &b1, &self.stator_trace);
        if let Some((chol2, trace2, coupling2)) = &self.rotor {
            let b2 = coupling2.view((0, 0), (d, coupling2.ncols())).into_owned();
            s += schur_complement(chol2, &b2, trace2);
        }
        s
    }

    /// Evaluates the inf-sup constant for one harmonic order.
    pub fn evaluate(&self, n_order: usize) -> Result<InfSupResult> {
        let s = self.schur_at(n_order);
        let hspace = HarmonicSpace::new(n_order, self.geom.r_gamma);
        let d = hspace.gram(SobolevExponent::MinusHalf);
        let spectrum = min_generalized_eig(&s, &d.entries)?;
        Ok(self.package(n_order, spectrum))
    }

    fn package(&self, n_order: usize, spectrum: Vec<f64>) -> InfSupResult {
        let beta_discrete = spectrum.first().map_or(0.0, |l| l.max(0.0).sqrt());
        let (beta_continuous, _) = analytic_beta_min(&self.geom, n_order);
        let h_over_k = (2.0 / self.n_interface as f64) / self.degree as f64;
        InfSupResult {
            beta_discrete,
            spectrum,
            beta_continuous,
            n_order,
            n_interface: self.n_interface,
            h_over_k,
            criterion_value: n_order as f64 * h_over_k,
            scope: self.scope,
            stable: beta_discrete > NUMERICALLY_ZERO_BETA,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

/// Single-cell evaluation: builds the operators for exactly this order.
pub fn discrete_infsup(
    geom: &AnnulusGeometry,
    params: &DiscretizationParams,
    level: usize,
    degree: usize,
    n_order: usize,
    scope: Scope,
) -> Result<InfSupResult> {
    let engine = InfSupEngine::new(geom, params, level, degree, n_order, scope)?;
    engine.evaluate(n_order)
}

/// One sweep cell request: multiplier order given either by the scaling
/// `N = ⌊c·n⌋` or explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderRule {
    Scaling(f64),
    Explicit(usize),
}

impl OrderRule {
    pub fn order_for(&self, n_interface: usize) -> usize {
        match self {
            OrderRule::Scaling(c) => (c * n_interface as f64).floor() as usize,
            OrderRule::Explicit(n) => *n,
        }
    }

    pub fn scaling(&self) -> Option<f64> {
        match self {
            OrderRule::Scaling(c) => Some(*c),
            OrderRule::Explicit(_) => None,
        }
    }
}

/// Sweep over (level, degree, order) cells.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub params: DiscretizationParams,
    pub levels: Vec<usize>,
    pub degrees: Vec<usize>,
    pub orders: Vec<OrderRule>,
    pub scope: Scope,
}

/// One CSV row of the sweep output.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub level: usize,
    pub degree: usize,
    pub n_interface: usize,
    pub c: Option<f64>,
    pub n_order: usize,
    pub dim_mn: usize,
    pub scope: Scope,
    pub result: std::result::Result<InfSupResult, String>,
}

/// Runs the sweep; cells sharing `(level, degree)` reuse one factorization
/// and one Schur complement assembled at the largest requested order.
/// Failures are reported per cell and do not abort the sweep.
pub fn sweep(geom: &AnnulusGeometry, spec: &SweepSpec) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for &level in &spec.levels {
        for &degree in &spec.degrees {
            let (n_interface, _) = spec.params.stator_mesh_at(geom, level);
            let orders: Vec<usize> =
                spec.orders.iter().map(|r| r.order_for(n_interface)).collect();
            let n_max = orders.iter().copied().max().unwrap_or(0);
            let engine = InfSupEngine::new(geom, &spec.params, level, degree, n_max, spec.scope);
            match engine {
                Ok(engine) => {
                    let results: Vec<Result<InfSupResult>> =
                        orders.par_iter().map(|&n| engine.evaluate(n)).collect();
                    for (rule, (n, res)) in spec.orders.iter().zip(orders.iter().zip(results)) {
                        rows.push(SweepRow {
                            level,
                            degree,
                            n_interface,
                            c: rule.scaling(),
                            n_order: *n,
                            dim_mn: 2 * n + 1,
                            scope: spec.scope,
                            result: res.map_err(|e| e.to_string()),
                        });
                    }
                }
                Err(e) => {
                    let msg = e.to_string();
                    for (rule, n) in spec.orders.iter().zip(orders) {
                        rows.push(SweepRow {
                            level,
                            degree,
                            n_interface,
                            c: rule.scaling(),
                            n_order: n,
                            dim_mn: 2 * n + 1,
                            scope: spec.scope,
                            result: Err(msg.clone()),
                        });
                    }
                }
            }
        }
    }
    rows
}
