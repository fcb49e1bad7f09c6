//! Empirical verification engines: specialization at rational parameters,
//! division hulls over Q via division polynomials, rational torsion
//! subgroups, finite-field reductions with brute-force hulls, and the
//! prime-density scan.

pub mod curve_fp;
pub mod curve_q;
pub mod divpoly;
pub mod hull_q;
pub mod scan;
pub mod torsion;

pub use curve_fp::{
    ell_preimages_fp_divpoly, hull_count_fp, hull_count_fp_divpoly, reduce_curve, reduce_point,
    CurveFp, EllMap, PointFp,
};
pub use curve_q::{specialize, CurveQ, PointQ};
pub use divpoly::{CoeffField, DivisionPolys, FpElem};
pub use hull_q::{ell_preimages_q, hull_count_q, HullQ};
pub use scan::{
    enumerate_fibers, fiber_scan, prime_density_scan, torsion_scan, FiberRecord, FiberScanReport,
    PrimeRecord, PrimeScanReport, TorsionRecord, TorsionScanReport,
};
pub use torsion::{is_torsion_point, torsion_q, TorsionInfo};
