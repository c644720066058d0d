//! Command implementations: inf-sup sweeps, the analytic oracle, field
//! solves, and convergence studies.

use crate::config::RunConfig;
use anyhow::Context;
use harmonic_mortar::geometry::{build_mesh, Subdomain};
use harmonic_mortar::harmonics::HarmonicSpace;
use harmonic_mortar::infsup::{analytic_beta_modes, sweep, Scope, SweepRow};
use harmonic_mortar::saddle::{assemble_system, ManufacturedSolution, SaddleSolver, SolveResult};
use harmonic_mortar::spline::{h1_seminorm_error, l2_error, SplineSpace2D};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// β formatted with six significant digits, matching the reference tables
/// (fixed-point for ordinary magnitudes, scientific for numerically-zero
/// values).
pub fn fmt_beta(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.abs() >= 1e-3 {
        format!("{x:.6}")
    } else {
        format!("{x:.5e}")
    }
}

fn write_output(path: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    if let Some(p) = path {
        std::fs::write(p, contents).with_context(|| format!("writing {}", p.display()))?;
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

/// Outcome summary of a sweep: (csv, grid, all_failed).
pub fn infsup_report(cfg: &RunConfig, rows: &[SweepRow]) -> (String, String, bool) {
    let mut csv = String::from(
        "level,k,n_interface,n_r,c,N,dim_MN,scope,beta_discrete,beta_continuous,criterion_Nh_over_k,stable,error\n",
    );
    let params = cfg.discretization_params();
    let geom = cfg.geometry().expect("validated");
    for row in rows {
        let (_, n_r) = params.stator_mesh_at(&geom, row.level);
        let c_str = row.c.map_or(String::new(), |c| format!("{c:.12}"));
        match &row.result {
            Ok(r) => {
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{:.12e},{:.12e},{:.6},{},",
                    row.level,
                    row.degree,
                    row.n_interface,
                    n_r,
                    c_str,
                    row.n_order,
                    row.dim_mn,
                    row.scope.label(),
                    r.beta_discrete,
                    r.beta_continuous,
                    r.criterion_value,
                    r.stable,
                )
                .unwrap();
            }
            Err(e) => {
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},,,,,\"{}\"",
                    row.level,
                    row.degree,
                    row.n_interface,
                    n_r,
                    c_str,
                    row.n_order,
                    row.dim_mn,
                    row.scope.label(),
                    e.replace('"', "'"),
                )
                .unwrap();
            }
        }
    }

    // Grid: one line per order rule, one column per (level, degree) cell.
    let mut grid = String::new();
    let mut columns: Vec<(usize, usize)> = Vec::new();
    for row in rows {
        if !columns.contains(&(row.level, row.degree)) {
            columns.push((row.level, row.degree));
        }
    }
    let mut row_keys: Vec<String> = Vec::new();
    for row in rows {
        let key = row.c.map_or(format!("N={}", row.n_order), |c| format!("c={c:.4}"));
        if !row_keys.contains(&key) {
            row_keys.push(key);
        }
    }
    write!(grid, "{:>12} |", "c \\ cell").unwrap();
    for (l, k) in &columns {
        write!(grid, " {:>12}", format!("l={l},k={k}")).unwrap();
    }
    grid.push('\n');
    let width = 13 + 13 * columns.len();
    grid.push_str(&"-".repeat(width));
    grid.push('\n');
    for key in &row_keys {
        write!(grid, "{key:>12} |").unwrap();
        for (l, k) in &columns {
            let cell = rows
                .iter()
                .find(|r| {
                    r.level == *l
                        && r.degree == *k
                        && r.c.map_or(format!("N={}", r.n_order), |c| format!("c={c:.4}")) == *key
                })
                .map(|r| match &r.result {
                    Ok(v) => fmt_beta(v.beta_discrete),
                    Err(_) => "error".to_string(),
                })
                .unwrap_or_default();
            write!(grid, " {cell:>12}").unwrap();
        }
        grid.push('\n');
    }

    let all_failed = !rows.is_empty() && rows.iter().all(|r| r.result.is_err());
    (csv, grid, all_failed)
}

pub fn cmd_infsup(
    cfg: &RunConfig,
    scope_override: Option<Scope>,
    out: Option<PathBuf>,
) -> anyhow::Result<i32> {
    let geom = cfg.geometry()?;
    let spec = cfg.sweep_spec(scope_override);
    let rows = sweep(&geom, &spec);
    let (csv, grid, all_failed) = infsup_report(cfg, &rows);
    println!("discrete inf-sup constants (beta'), scope = {}", spec.scope.label());
    println!("{grid}");
    let (_, base_n_r) = spec.params.stator_mesh_at(&geom, 1);
    println!(
        "radial resolution: {base_n_r} stator spans at level 1, doubled per level \
         (beta' values are insensitive to further radial refinement; \
         the n_r column in the CSV records the value used)"
    );
    let beta_ref = rows.iter().find_map(|r| r.result.as_ref().ok().map(|v| v.beta_continuous));
    if let Some(b) = beta_ref {
        println!("analytic reference beta = {}", fmt_beta(b));
    }
    for row in &rows {
        if let Err(e) = &row.result {
            eprintln!(
                "cell level={} k={} c={:?} N={}: {e}",
                row.level, row.degree, row.c, row.n_order
            );
        }
    }
    write_output(out.as_deref().or(cfg.output.csv.as_deref()), &csv)?;
    Ok(if all_failed { 3 } else { 0 })
}

pub fn cmd_oracle(cfg: &RunConfig, n_max: usize, out: Option<PathBuf>) -> anyhow::Result<i32> {
    let geom = cfg.geometry()?;
    let modes = analytic_beta_modes(&geom, n_max);
    let (min_beta, min_mode) =
        modes.iter().enumerate().fold((f64::INFINITY, 0), |(mb, mm), (i, &b)| {
            if b < mb {
                (b, i)
            } else {
                (mb, mm)
            }
        });
    let mut csv = String::from("mode,beta_n,is_min\n");
    println!("analytic per-mode inf-sup constants beta_n");
    println!("{:>6} {:>14}", "mode", "beta_n");
    for (n, b) in modes.iter().enumerate() {
        let marker = if n == min_mode { "  <- min" } else { "" };
        println!("{n:>6} {:>14}{marker}", fmt_beta(*b));
        writeln!(csv, "{n},{b:.12e},{}", n == min_mode).unwrap();
    }
    println!("min beta = {} at mode {min_mode}", fmt_beta(min_beta));
    write_output(out.as_deref().or(cfg.output.csv.as_deref()), &csv)?;
    Ok(0)
}

pub struct SolveArtifacts {
    pub solve: SolveResult,
    pub stator: SplineSpace2D,
    pub rotor: SplineSpace2D,
    pub summary: String,
}

/// Builds spaces at the base discretization and solves; shared by the CLI
/// command and the tests.
pub fn run_solve(cfg: &RunConfig, manufactured: bool, alpha: f64) -> anyhow::Result<SolveArtifacts> {
    let geom = cfg.geometry()?;
    let params = cfg.discretization_params();
    let k = cfg.discretization.degree;
    let level = *cfg.discretization.levels.first().unwrap_or(&1);
    let (nt1, nr1) = params.stator_mesh_at(&geom, level);
    let (nt2, nr2) = params.rotor_mesh_at(&geom, level);
    let stator = SplineSpace2D::new(build_mesh(&geom, Subdomain::Stator, nt1, nr1)?, k)?;
    let rotor = SplineSpace2D::new(build_mesh(&geom, Subdomain::Rotor, nt2, nr2)?, k)?;
    let hspace = HarmonicSpace::new(cfg.solve_order(), geom.r_gamma);

    let (src, reference) = if manufactured {
        let m = ManufacturedSolution::new(geom);
        (m.source_spec(), Some(m))
    } else {
        (cfg.source_spec()?, None)
    };

    let system = assemble_system(&geom, &stator, &rotor, &hspace, &src, alpha)?;
    if system.multiplier_too_rich() {
        eprintln!(
            "warning: multiplier dimension {} exceeds an interface trace dof count \
             ({} stator / {} rotor); the solve will report an inf-sup violation",
            hspace.dim(),
            stator.trace_matrix().n_trace(),
            rotor.trace_matrix().n_trace(),
        );
    }
    let solver = SaddleSolver::new(system)?;
    let solve = solver.solve_at(alpha)?;

    let mut summary = String::new();
    writeln!(summary, "degree k                = {k}").unwrap();
    writeln!(summary, "stator mesh             = {nt1} x {nr1}").unwrap();
    writeln!(summary, "rotor mesh              = {nt2} x {nr2}").unwrap();
    writeln!(summary, "harmonic order N        = {}", hspace.n_max).unwrap();
    writeln!(summary, "rotor angle alpha       = {alpha}").unwrap();
    writeln!(summary, "energy (nu grad u, grad u) = {:.12e}", solve.energy).unwrap();
    writeln!(summary, "load pairing <j, u>     = {:.12e}", solve.load_pairing).unwrap();
    writeln!(summary, "field residual (rel)    = {:.3e}", solve.residual_rel).unwrap();
    writeln!(summary, "max jump moment         = {:.3e}", solve.max_jump_moment()).unwrap();
    if let Some(m) = &reference {
        let g = |r: f64, t: f64| m.gradient(r, t);
        let e1 = h1_seminorm_error(&stator, &solve.u_stator, &g, 2)?;
        let e2 = h1_seminorm_error(&rotor, &solve.u_rotor, &g, 2)?;
        let v = |r: f64, t: f64| m.value(r, t);
        let l1 = l2_error(&stator, &solve.u_stator, &v, 2)?;
        let l2v = l2_error(&rotor, &solve.u_rotor, &v, 2)?;
        let lam_exact = m.lambda_cos3_coefficient();
        let lam_err = (solve.lambda[5] - lam_exact).abs() / lam_exact.abs();
        writeln!(summary, "manufactured H1 error   = {:.6e}", (e1 * e1 + e2 * e2).sqrt())
            .unwrap();
        writeln!(summary, "manufactured L2 error   = {:.6e}", (l1 * l1 + l2v * l2v).sqrt())
            .unwrap();
        writeln!(summary, "lambda cos3 rel error   = {lam_err:.6e}").unwrap();
    }
    Ok(SolveArtifacts { solve, stator, rotor, summary })
}

/// Field and multiplier CSV exports for one solve.
pub fn solve_csvs(art: &SolveArtifacts) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for (name, space, u) in [
        ("u_stator.csv", &art.stator, &art.solve.u_stator),
        ("u_rotor.csv", &art.rotor, &art.solve.u_rotor),
    ] {
        let mut csv = String::from("dof,value\n");
        for (i, v) in u.iter().enumerate() {
            writeln!(csv, "{i},{v:.12e}").unwrap();
        }
        files.push((name.to_string(), csv));
        // Sampled physical field grid for plotting.
        let mut grid = String::from("r,theta,u\n");
        let mesh = &space.mesh;
        for it in 0..mesh.n_theta {
            for ir in 0..=mesh.n_r {
                let theta = it as f64 * mesh.delta_theta();
                let r = mesh.r_lo + ir as f64 * mesh.delta_r();
                let v = space.eval(u, r, theta).unwrap_or(f64::NAN);
                writeln!(grid, "{r:.9e},{theta:.9e},{v:.9e}").unwrap();
            }
        }
        let gridname = name.replace("u_", "field_");
        files.push((gridname, grid));
    }
    let mut lam = String::from("index,mode,kind,value\n");
    for (i, v) in art.solve.lambda.iter().enumerate() {
        let mode = i.div_ceil(2);
        let kind = if i == 0 || i % 2 == 1 { "cos" } else { "sin" };
        writeln!(lam, "{i},{mode},{kind},{v:.12e}").unwrap();
    }
    files.push(("lambda.csv".to_string(), lam));
    files
}

pub fn cmd_solve(
    cfg: &RunConfig,
    manufactured: bool,
    alpha_override: Option<f64>,
    out_dir: Option<PathBuf>,
    dump_matrices: bool,
) -> anyhow::Result<i32> {
    let angles: Vec<f64> = if let Some(a) = alpha_override {
        vec![a]
    } else if !cfg.sources.rotor_angles.is_empty() {
        cfg.sources.rotor_angles.clone()
    } else {
        vec![cfg.sources.rotor_angle]
    };

    for (idx, &alpha) in angles.iter().enumerate() {
        let art = run_solve(cfg, manufactured, alpha)?;
        println!("--- solve {idx} (alpha = {alpha}) ---");
        print!("{}", art.summary);
        if let Some(dir) = &out_dir {
            std::fs::create_dir_all(dir)?;
            let prefix = if angles.len() > 1 { format!("a{idx}_") } else { String::new() };
            for (name, contents) in solve_csvs(&art) {
                let path = dir.join(format!("{prefix}{name}"));
                std::fs::write(&path, contents)?;
            }
            if dump_matrices {
                dump_system_matrices(cfg, manufactured, alpha, dir, &prefix)?;
            }
            eprintln!("wrote solve artifacts to {}", dir.display());
        } else if dump_matrices {
            anyhow::bail!("--dump-matrices needs --out <dir>");
        }
    }
    Ok(0)
}

fn dump_system_matrices(
    cfg: &RunConfig,
    manufactured: bool,
    alpha: f64,
    dir: &Path,
    prefix: &str,
) -> anyhow::Result<()> {
    let geom = cfg.geometry()?;
    let params = cfg.discretization_params();
    let k = cfg.discretization.degree;
    let level = *cfg.discretization.levels.first().unwrap_or(&1);
    let (nt1, nr1) = params.stator_mesh_at(&geom, level);
    let (nt2, nr2) = params.rotor_mesh_at(&geom, level);
    let stator = SplineSpace2D::new(build_mesh(&geom, Subdomain::Stator, nt1, nr1)?, k)?;
    let rotor = SplineSpace2D::new(build_mesh(&geom, Subdomain::Rotor, nt2, nr2)?, k)?;
    let hspace = HarmonicSpace::new(cfg.solve_order(), geom.r_gamma);
    let src = if manufactured {
        ManufacturedSolution::new(geom).source_spec()
    } else {
        cfg.source_spec()?
    };
    let system = assemble_system(&geom, &stator, &rotor, &hspace, &src, alpha)?;
    std::fs::write(dir.join(format!("{prefix}A1.txt")), system.a1.to_coordinate_text())?;
    std::fs::write(dir.join(format!("{prefix}A2.txt")), system.a2.to_coordinate_text())?;
    let dump_dense = |m: &harmonic_mortar::nalgebra::DMatrix<f64>| {
        let mut out = String::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    writeln!(out, "{i} {j} {:.17e}", m[(i, j)]).unwrap();
                }
            }
        }
        out
    };
    std::fs::write(dir.join(format!("{prefix}B1.txt")), dump_dense(&system.b1))?;
    std::fs::write(dir.join(format!("{prefix}B2_rotated.txt")), dump_dense(&system.b2_rotated()))?;
    Ok(())
}

/// One row of the convergence study.
pub struct ConvergenceRow {
    pub degree: usize,
    pub level: usize,
    pub n_theta: usize,
    pub h1_error: f64,
    pub l2_error: f64,
    pub lambda_rel_error: f64,
    pub rate: Option<f64>,
}

pub fn convergence_study(cfg: &RunConfig) -> anyhow::Result<Vec<ConvergenceRow>> {
    let geom = cfg.geometry()?;
    let m = ManufacturedSolution::new(geom);
    let params = cfg.discretization_params();
    let lam_exact = m.lambda_cos3_coefficient();
    let mut rows = Vec::new();
    for &k in &cfg.sweep_degrees() {
        let mut prev: Option<f64> = None;
        for &level in &cfg.discretization.levels {
            let (nt1, nr1) = params.stator_mesh_at(&geom, level);
            let (nt2, nr2) = params.rotor_mesh_at(&geom, level);
            let stator = SplineSpace2D::new(build_mesh(&geom, Subdomain::Stator, nt1, nr1)?, k)?;
            let rotor = SplineSpace2D::new(build_mesh(&geom, Subdomain::Rotor, nt2, nr2)?, k)?;
            let hspace = HarmonicSpace::new(
                cfg.multiplier.solve_order.unwrap_or(2 * ManufacturedSolution::ANGULAR_MODE),
                geom.r_gamma,
            );
            let system = assemble_system(&geom, &stator, &rotor, &hspace, &m.source_spec(), 0.0)?;
            let sol = SaddleSolver::new(system)?.solve_at(0.0)?;
            let g = |r: f64, t: f64| m.gradient(r, t);
            let e1 = h1_seminorm_error(&stator, &sol.u_stator, &g, 2)?;
            let e2 = h1_seminorm_error(&rotor, &sol.u_rotor, &g, 2)?;
            let h1 = (e1 * e1 + e2 * e2).sqrt();
            let v = |r: f64, t: f64| m.value(r, t);
            let l1 = l2_error(&stator, &sol.u_stator, &v, 2)?;
            let l2v = l2_error(&rotor, &sol.u_rotor, &v, 2)?;
            let l2 = (l1 * l1 + l2v * l2v).sqrt();
            let lam_err = (sol.lambda[2 * ManufacturedSolution::ANGULAR_MODE - 1] - lam_exact)
                .abs()
                / lam_exact.abs();
            let rate = prev.map(|p| (p / h1).log2());
            rows.push(ConvergenceRow {
                degree: k,
                level,
                n_theta: nt1,
                h1_error: h1,
                l2_error: l2,
                lambda_rel_error: lam_err,
                rate,
            });
            prev = Some(h1);
        }
    }
    Ok(rows)
}

pub fn cmd_convergence(cfg: &RunConfig, out: Option<PathBuf>) -> anyhow::Result<i32> {
    let rows = convergence_study(cfg)?;
    let mut csv = String::from("k,level,n_theta,h1_error,l2_error,lambda_rel_error,rate\n");
    println!(
        "{:>3} {:>6} {:>8} {:>13} {:>13} {:>13} {:>7}",
        "k", "level", "n_theta", "H1_error", "L2_error", "lam_rel_err", "rate"
    );
    for r in &rows {
        let rate_str = r.rate.map_or(String::new(), |x| format!("{x:.3}"));
        println!(
            "{:>3} {:>6} {:>8} {:>13.4e} {:>13.4e} {:>13.4e} {:>7}",
            r.degree, r.level, r.n_theta, r.h1_error, r.l2_error, r.lambda_rel_error, rate_str
        );
        writeln!(
            csv,
            "{},{},{},{:.12e},{:.12e},{:.12e},{}",
            r.degree, r.level, r.n_theta, r.h1_error, r.l2_error, r.lambda_rel_error, rate_str
        )
        .unwrap();
    }
    write_output(out.as_deref().or(cfg.output.csv.as_deref()), &csv)?;
    Ok(0)
}
