//! Source data: current density, magnetization and reluctivity fields.

use std::f64::consts::TAU;
use std::sync::Arc;

/// Piecewise-constant angular sector `theta ∈ [start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularSector {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

/// Constant-vector angular sector (Cartesian components).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorSector {
    pub start: f64,
    pub end: f64,
    pub value: [f64; 2],
}

/// A scalar field on a subdomain, in polar coordinates.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    /// Piecewise constant per angular sector; zero outside all sectors.
    Sectors(Vec<AngularSector>),
    /// Arbitrary callable `(r, θ) -> value`.
    Function(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarField::Constant(c) => write!(f, "Constant({c})"),
            ScalarField::Sectors(s) => write!(f, "Sectors({} sectors)", s.len()),
            ScalarField::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl ScalarField {
    pub fn zero() -> Self {
        ScalarField::Constant(0.0)
    }

    pub fn from_fn(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::Function(Arc::new(f))
    }

    pub fn eval(&self, r: f64, theta: f64) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Sectors(sectors) => {
                let t = wrap_angle(theta);
                sectors
                    .iter()
                    .find(|s| t >= s.start && t < s.end)
                    .map_or(0.0, |s| s.value)
            }
            ScalarField::Function(f) => f(r, theta),
        }
    }

    /// Angular discontinuity locations, used to split quadrature panels.
    pub fn theta_breakpoints(&self) -> Vec<f64> {
        match self {
            ScalarField::Sectors(sectors) => sector_breaks(sectors.iter().map(|s| (s.start, s.end))),
            _ => Vec::new(),
        }
    }
}

/// A Cartesian vector field on a subdomain, in polar coordinates.
#[derive(Clone)]
pub enum VectorField {
    Constant([f64; 2]),
    Sectors(Vec<VectorSector>),
    Function(Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>),
}

impl std::fmt::Debug for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VectorField::Constant(c) => write!(f, "Constant({c:?})"),
            VectorField::Sectors(s) => write!(f, "Sectors({} sectors)", s.len()),
            VectorField::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl VectorField {
    pub fn zero() -> Self {
        VectorField::Constant([0.0, 0.0])
    }

    pub fn from_fn(f: impl Fn(f64, f64) -> [f64; 2] + Send + Sync + 'static) -> Self {
        VectorField::Function(Arc::new(f))
    }

    pub fn eval(&self, r: f64, theta: f64) -> [f64; 2] {
        match self {
            VectorField::Constant(c) => *c,
            VectorField::Sectors(sectors) => {
                let t = wrap_angle(theta);
                sectors
                    .iter()
                    .find(|s| t >= s.start && t < s.end)
                    .map_or([0.0, 0.0], |s| s.value)
            }
            VectorField::Function(f) => f(r, theta),
        }
    }

    pub fn theta_breakpoints(&self) -> Vec<f64> {
        match self {
            VectorField::Sectors(sectors) => sector_breaks(sectors.iter().map(|s| (s.start, s.end))),
            _ => Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, VectorField::Constant([x, y]) if *x == 0.0 && *y == 0.0)
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

fn sector_breaks(sectors: impl Iterator<Item = (f64, f64)>) -> Vec<f64> {
    let mut b: Vec<f64> = sectors.flat_map(|(s, e)| [wrap_angle(s), wrap_angle(e)]).collect();
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
    b
}

/// Generalized source data for one solve: source current density `j_s`,
/// magnetization `m` (rotor only, entering through its weak divergence), and
/// reluctivity `ν` with declared positive bounds.
///
/// Rotor fields are expressed in rotor-fixed coordinates; for rotor angle
/// zero the frames coincide.
#[derive(Debug, Clone)]
pub struct SourceSpec {
    pub js: ScalarField,
    pub m: VectorField,
    pub nu: ScalarField,
    pub nu_lo: f64,
    pub nu_hi: f64,
}

impl SourceSpec {
    pub fn new(
        js: ScalarField,
        m: VectorField,
        nu: ScalarField,
        nu_lo: f64,
        nu_hi: f64,
    ) -> crate::Result<Self> {
        if !(nu_lo > 0.0 && nu_hi >= nu_lo && nu_hi.is_finite()) {
            return Err(crate::Error::SourceBounds(format!(
                "reluctivity bounds must satisfy 0 < nu_lo <= nu_hi < inf, got [{nu_lo}, {nu_hi}]"
            )));
        }
        Ok(SourceSpec { js, m, nu, nu_lo, nu_hi })
    }

    /// No sources, unit reluctivity.
    pub fn vacuum() -> Self {
        SourceSpec {
            js: ScalarField::zero(),
            m: VectorField::zero(),
            nu: ScalarField::Constant(1.0),
            nu_lo: 1.0,
            nu_hi: 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_lookup_wraps() {
        let f = ScalarField::Sectors(vec![
            AngularSector { start: 0.0, end: 1.0, value: 2.0 },
            AngularSector { start: 1.0, end: 2.0, value: -3.0 },
        ]);
        assert_eq!(f.eval(1.0, 0.5), 2.0);
        assert_eq!(f.eval(1.0, 1.5), -3.0);
        assert_eq!(f.eval(1.0, 0.5 + TAU), 2.0);
        assert_eq!(f.eval(1.0, 3.0), 0.0);
    }

    #[test]
    fn breakpoints_deduplicated() {
        let f = ScalarField::Sectors(vec![
            AngularSector { start: 0.0, end: 1.0, value: 1.0 },
            AngularSector { start: 1.0, end: 2.0, value: 2.0 },
        ]);
        assert_eq!(f.theta_breakpoints(), vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn nu_bounds_validated() {
        assert!(SourceSpec::new(
            ScalarField::zero(),
            VectorField::zero(),
            ScalarField::Constant(1.0),
            0.0,
            1.0
        )
        .is_err());
        assert!(SourceSpec::new(
            ScalarField::zero(),
            VectorField::zero(),
            ScalarField::Constant(1.0),
            2.0,
            1.0
        )
        .is_err());
    }
}
