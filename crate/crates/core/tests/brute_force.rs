//! Dense full-inverse oracle for the Schur-complement pipeline on a toy
//! mesh, independent of the sparse factorization and the Jacobi
//! eigensolver.

use harmonic_mortar::geometry::{build_mesh, AnnulusGeometry, Subdomain};
use harmonic_mortar::harmonics::{assemble_coupling, HarmonicSpace, SobolevExponent};
use harmonic_mortar::infsup::{discrete_infsup, schur_complement, DiscretizationParams, Scope};
use harmonic_mortar::linalg::SparseCholesky;
use harmonic_mortar::spline::{assemble_stiffness, QuadOptions, ScalarField, SplineSpace2D};
use nalgebra::DMatrix;

fn dense_schur_oracle(
    geom: &AnnulusGeometry,
    n_theta: usize,
    n_r: usize,
    degree: usize,
    n_order: usize,
) -> (DMatrix<f64>, DMatrix<f64>, Vec<f64>) {
    let mesh = build_mesh(geom, Subdomain::Stator, n_theta, n_r).unwrap();
    let space = SplineSpace2D::new(mesh, degree).unwrap();
    let a = assemble_stiffness(&space, &ScalarField::Constant(1.0), None, QuadOptions::default())
        .unwrap();
    let hspace = HarmonicSpace::new(n_order, geom.r_gamma);
    let b_trace = assemble_coupling(&space.angular, &hspace, 1.0).unwrap();
    let trace = space.trace_matrix();

    // Route 1: sparse Cholesky + blocked solves.
    let chol = SparseCholesky::factor(&a).unwrap();
    let s_sparse = schur_complement(&chol, &b_trace, &trace);

    // Route 2: dense inverse of the full matrix, coupling embedded by hand.
    let a_dense = a.sym_upper_to_dense();
    let a_inv = a_dense.try_inverse().expect("toy stiffness is invertible");
    let n = space.n_dofs();
    let mut b_full = DMatrix::zeros(hspace.dim(), n);
    for m in 0..hspace.dim() {
        for i in 0..trace.n_trace() {
            b_full[(m, trace.dof_of_trace(i))] = b_trace[(m, i)];
        }
    }
    let s_dense = &b_full * a_inv * b_full.transpose();

    let d = hspace.gram(SobolevExponent::MinusHalf).entries;
    (s_sparse, s_dense, d)
}

#[test]
fn schur_matches_dense_inverse_on_4x2_toy_mesh() {
    let geom = AnnulusGeometry::default();
    let (s_sparse, s_dense, _) = dense_schur_oracle(&geom, 4, 2, 1, 1);
    let scale = s_dense.amax();
    for i in 0..s_sparse.nrows() {
        for j in 0..s_sparse.ncols() {
            assert!(
                (s_sparse[(i, j)] - s_dense[(i, j)]).abs() <= 1e-10 * scale,
                "({i},{j}): {} vs {}",
                s_sparse[(i, j)],
                s_dense[(i, j)]
            );
        }
    }
}

#[test]
fn beta_matches_dense_eigensolver_on_8x2_toy_mesh() {
    let geom = AnnulusGeometry::default();
    let (s_sparse, s_dense, d) = dense_schur_oracle(&geom, 8, 2, 1, 2);
    let scale = s_dense.amax();
    for i in 0..s_sparse.nrows() {
        for j in 0..s_sparse.ncols() {
            assert!((s_sparse[(i, j)] - s_dense[(i, j)]).abs() <= 1e-10 * scale);
        }
    }
    // β' from the production path.
    let params = DiscretizationParams { base_n_theta: 8, base_n_r: Some(2), rotor_base_n_theta: None };
    let result = discrete_infsup(&geom, &params, 1, 1, 2, Scope::StatorOnly).unwrap();
    // Independent eigensolver on the dense route.
    let scaled = DMatrix::from_fn(5, 5, |i, j| s_dense[(i, j)] / (d[i] * d[j]).sqrt());
    let mut eig: Vec<f64> = scaled.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let beta_dense = eig[0].max(0.0).sqrt();
    assert!(
        (result.beta_discrete - beta_dense).abs() <= 1e-10 * beta_dense.max(1.0),
        "{} vs {}",
        result.beta_discrete,
        beta_dense
    );
}
