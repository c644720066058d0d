//! Spline approximation spaces on the mapped polar meshes, and the assembly
//! of stiffness, load, trace and interface-projection operators.

mod assembly;
mod basis;
mod source;
mod space;

pub use assembly::{
    assemble_rhs, assemble_stiffness, h1_seminorm_error, interpolate_radial_profile, l2_error,
    l2_project_trace, trace_l2_gram, QuadOptions,
};
pub use basis::{BasisEval, SplineSpace1D};
pub use source::{AngularSector, ScalarField, SourceSpec, VectorField, VectorSector};
pub use space::{SplineSpace2D, TraceMap};
