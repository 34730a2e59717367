//! Weierstrass curves over Q, points over Q and quadratic fields, and
//! reduction modulo primes.

pub mod point;
pub mod reduction;
pub mod search;
pub mod torsion;
pub mod weierstrass;

pub use point::{group_op, parse_quadratic_point, parse_rational_point, scalar_mul, CurvePoint};
pub use reduction::{
    count_points_mod_p, in_kernel_of_reduction, reduce_point, reduction_type, z_coordinate, KernelWitness, PointReduction,
    ReducedCurve, ReducedPoint, ReductionInfo, ReductionKind,
};
pub use search::{quadratic_x_scan, search_rational_points};
pub use torsion::{torsion_test, TorsionConfig, TorsionOutcome};
pub use weierstrass::{CurveSpec, WeierstrassCurve};
