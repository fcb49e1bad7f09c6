//! Scan drivers: per-fiber division-hull scans, per-fiber torsion scans, and
//! the prime-density scan over finite-field reductions. Work items are
//! independent and results are emitted in deterministic sorted order.

use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

use super::curve_fp::{reduce_curve, reduce_point, EllMap};
use super::curve_q::{specialize, CurveQ, PointQ};
use super::hull_q::hull_count_q;
use super::torsion::{is_torsion_point, order_factorization, torsion_q};
use crate::error::{Error, Result};
use crate::exactalg::rational_to_string;
use crate::surface::{Section, SurfaceModel};

/// Rationals p/q in lowest terms with |p|, q <= height, sorted by value.
pub fn enumerate_fibers(height: u64) -> Vec<BigRational> {
    use num::Integer;
    let mut out = Vec::new();
    let h = height as i64;
    for q in 1..=h {
        for p in -h..=h {
            if BigInt::from(p).gcd(&BigInt::from(q)).is_one() {
                out.push(BigRational::new(BigInt::from(p), BigInt::from(q)));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberRecord {
    pub t: String,
    pub status: String,
    pub hull_count: Option<u64>,
    pub depth_reached: Option<u32>,
    pub stabilized: Option<bool>,
    pub exceeds_bound: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberScanReport {
    pub ell: u64,
    pub height_max: u64,
    pub n_max: u32,
    /// Bound checked against (from the pole-count decision), if any.
    pub bound: Option<u64>,
    pub scanned: u64,
    pub skipped_singular: u64,
    pub exceptions: Vec<String>,
    pub records: Vec<FiberRecord>,
}

/// Scan all good fibers of height <= height_max, recording the rational
/// division hull of the specialized section and flagging fibers that exceed
/// the expected bound.
pub fn fiber_scan(
    model: &SurfaceModel,
    section: &Section,
    ell: u64,
    height_max: u64,
    n_max: u32,
    bound: Option<u64>,
) -> Result<FiberScanReport> {
    let mut records = Vec::new();
    let mut exceptions = Vec::new();
    let mut scanned = 0;
    let mut skipped = 0;
    for t in enumerate_fibers(height_max) {
        let t_str = rational_to_string(&t);
        match specialize(model, section, &t) {
            Err(e) => {
                skipped += 1;
                records.push(FiberRecord {
                    t: t_str,
                    status: if e.to_string().contains("section pole") {
                        "section_pole".to_string()
                    } else {
                        "singular".to_string()
                    },
                    hull_count: None,
                    depth_reached: None,
                    stabilized: None,
                    exceeds_bound: None,
                });
            }
            Ok((curve, point)) => {
                scanned += 1;
                let hull = hull_count_q(&curve, &point, ell, n_max)?;
                let exceeds = bound.map(|b| hull.count > b);
                if exceeds == Some(true) {
                    exceptions.push(t_str.clone());
                }
                records.push(FiberRecord {
                    t: t_str,
                    status: "ok".to_string(),
                    hull_count: Some(hull.count),
                    depth_reached: Some(hull.depth_reached),
                    stabilized: Some(hull.stabilized),
                    exceeds_bound: exceeds,
                });
            }
        }
    }
    Ok(FiberScanReport {
        ell,
        height_max,
        n_max,
        bound,
        scanned,
        skipped_singular: skipped,
        exceptions,
        records,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionRecord {
    pub t: String,
    pub status: String,
    pub torsion_order: Option<u64>,
    pub structure: Option<String>,
    pub order_factors: Option<String>,
    pub all_factors_special: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionScanReport {
    pub height_max: u64,
    pub special_primes: Vec<u64>,
    pub scanned: u64,
    pub skipped_singular: u64,
    pub violations: Vec<String>,
    pub records: Vec<TorsionRecord>,
}

/// Scan good fibers and compare each torsion order's prime factors against
/// the surface's special primes.
pub fn torsion_scan(model: &SurfaceModel, height_max: u64) -> Result<TorsionScanReport> {
    let special = model.special_primes()?;
    let mut records = Vec::new();
    let mut violations = Vec::new();
    let mut scanned = 0;
    let mut skipped = 0;
    for t in enumerate_fibers(height_max) {
        let t_str = rational_to_string(&t);
        match specialize(model, &Section::Identity, &t) {
            Err(_) => {
                skipped += 1;
                records.push(TorsionRecord {
                    t: t_str,
                    status: "singular".to_string(),
                    torsion_order: None,
                    structure: None,
                    order_factors: None,
                    all_factors_special: None,
                });
            }
            Ok((curve, _)) => {
                scanned += 1;
                let info = torsion_q(&curve)?;
                let factors = order_factorization(info.order);
                let all_special = factors.iter().all(|(p, _)| special.contains(p));
                if !all_special {
                    violations.push(t_str.clone());
                }
                records.push(TorsionRecord {
                    t: t_str,
                    status: "ok".to_string(),
                    torsion_order: Some(info.order),
                    structure: Some(info.structure),
                    order_factors: Some(
                        factors
                            .iter()
                            .map(|(p, e)| {
                                if *e == 1 {
                                    p.to_string()
                                } else {
                                    format!("{p}^{e}")
                                }
                            })
                            .collect::<Vec<_>>()
                            .join("*"),
                    ),
                    all_factors_special: Some(all_special),
                });
            }
        }
    }
    Ok(TorsionScanReport {
        height_max,
        special_primes: special,
        scanned,
        skipped_singular: skipped,
        violations,
        records,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeRecord {
    pub p: u64,
    pub hull_count: u64,
    pub qualifies: bool,
    pub full_ell_torsion: bool,
    pub in_ell_image: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeScanReport {
    pub ell: u64,
    pub threshold_m: u64,
    pub p_max: u64,
    pub scanned: u64,
    pub qualifying: u64,
    /// Exact qualifying/scanned fraction and its floating approximation.
    pub density: String,
    pub density_f64: f64,
    /// Level n of the splitting condition guaranteeing >= M points.
    pub guarantee_level: u32,
    /// Hull size guaranteed under full level-n splitting.
    pub full_split_guarantee: u64,
    /// Chebotarev-style lower bound l^(-5n) for the qualifying density.
    pub theory_floor: String,
    pub theory_floor_f64: f64,
    pub records: Vec<PrimeRecord>,
}

/// Least n >= 1 with l^(2n) >= M.
pub fn guarantee_level(ell: u64, m_thresh: u64) -> u32 {
    let mut n = 1u32;
    let mut val = (ell as u128) * (ell as u128);
    while val < m_thresh as u128 {
        val *= (ell as u128) * (ell as u128);
        n += 1;
    }
    n
}

/// Hull size guaranteed when E[l^n] is rational and P is an l^n-th multiple:
/// (l^(2(n+1)) - 1)/(l^2 - 1) - 1.
pub fn full_split_guarantee(ell: u64, n: u32) -> u64 {
    let l2 = (ell as u128) * (ell as u128);
    (((l2.pow(n + 1) - 1) / (l2 - 1)) - 1) as u64
}

/// Scan all good primes up to p_max and count those whose finite-field hull
/// reaches the threshold M. The base point must have infinite order.
pub fn prime_density_scan(
    curve: &CurveQ,
    point: &PointQ,
    ell: u64,
    m_thresh: u64,
    p_max: u64,
) -> Result<PrimeScanReport> {
    if m_thresh < 1 {
        return Err(Error::math("threshold M must be at least 1"));
    }
    if is_torsion_point(curve, point)? {
        return Err(Error::math(
            "prime-density scan requires a non-torsion base point",
        ));
    }
    let mut records = Vec::new();
    let mut scanned = 0u64;
    let mut qualifying = 0u64;
    for p in crate::exactalg::intfactor::primes_up_to(p_max) {
        let Some(cf) = reduce_curve(curve, p) else {
            continue;
        };
        scanned += 1;
        let map = EllMap::new(cf, ell);
        let pf = reduce_point(point, p);
        let hull = map.hull_count(&pf);
        let qualifies = hull >= m_thresh;
        if qualifies {
            qualifying += 1;
        }
        records.push(PrimeRecord {
            p,
            hull_count: hull,
            qualifies,
            full_ell_torsion: map.has_full_ell_torsion(),
            in_ell_image: map.in_ell_image(&pf),
        });
    }
    let n = guarantee_level(ell, m_thresh);
    let floor = BigRational::new(BigInt::one(), BigInt::from(ell).pow(5 * n));
    let density = if scanned == 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(qualifying), BigInt::from(scanned))
    };
    use num::ToPrimitive;
    Ok(PrimeScanReport {
        ell,
        threshold_m: m_thresh,
        p_max,
        scanned,
        qualifying,
        density: rational_to_string(&density),
        density_f64: density.to_f64().unwrap_or(0.0),
        guarantee_level: n,
        full_split_guarantee: full_split_guarantee(ell, n),
        theory_floor: rational_to_string(&floor),
        theory_floor_f64: floor.to_f64().unwrap_or(0.0),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::fixture_t_cubic;

    #[test]
    fn fiber_enumeration_height_two() {
        let fibers = enumerate_fibers(2);
        let strings: Vec<String> = fibers.iter().map(rational_to_string).collect();
        assert_eq!(strings, vec!["-2", "-1", "-1/2", "0", "1/2", "1", "2"]);
    }

    #[test]
    fn guarantee_levels() {
        assert_eq!(guarantee_level(3, 1), 1);
        assert_eq!(guarantee_level(3, 9), 1);
        assert_eq!(guarantee_level(3, 10), 2);
        assert_eq!(guarantee_level(3, 81), 2);
        assert_eq!(full_split_guarantee(3, 1), 9);
        assert_eq!(full_split_guarantee(3, 2), 90);
    }

    #[test]
    fn small_fiber_scan_runs() {
        let (model, section) = fixture_t_cubic();
        let report = fiber_scan(&model, &section, 3, 3, 2, Some(9)).unwrap();
        assert!(report.scanned > 0);
        // t = 0 is singular on this surface
        assert!(report
            .records
            .iter()
            .any(|r| r.t == "0" && r.status == "singular"));
        for r in &report.records {
            if r.status == "ok" {
                assert!(r.hull_count.unwrap() <= 9, "t = {}", r.t);
            }
        }
        assert!(report.exceptions.is_empty());
    }

    #[test]
    fn small_torsion_scan_sees_eta_fibers() {
        let (model, _) = fixture_t_cubic();
        let report = torsion_scan(&model, 8).unwrap();
        // t = 8 = 2^3/(2-1) carries (2, 0): even torsion, 2 is special
        let rec = report.records.iter().find(|r| r.t == "8").unwrap();
        assert_eq!(rec.status, "ok");
        assert_eq!(rec.torsion_order.unwrap() % 2, 0);
        assert_eq!(rec.all_factors_special, Some(true));
    }

    #[test]
    fn prime_scan_rejects_torsion_point() {
        use num::BigRational;
        let rat = |v: i64| BigRational::from_integer(v.into());
        let c = CurveQ::new(rat(0), rat(1)).unwrap();
        let p = PointQ::Affine(rat(2), rat(3)); // order 6
        assert!(prime_density_scan(&c, &p, 3, 9, 100).is_err());
    }

    #[test]
    fn tiny_prime_scan() {
        use num::BigRational;
        let rat = |v: i64| BigRational::from_integer(v.into());
        let c = CurveQ::new(rat(-8), rat(8)).unwrap();
        let p = PointQ::Affine(rat(1), rat(1));
        let report = prime_density_scan(&c, &p, 3, 1, 300).unwrap();
        assert!(report.scanned > 0);
        // M = 1 qualifiers are exactly the primes with P in 3E(F_p)
        for r in &report.records {
            assert_eq!(r.qualifies, r.hull_count >= 1);
            assert_eq!(r.hull_count >= 1, r.in_ell_image, "p = {}", r.p);
        }
        let d = report.density_f64;
        assert!(d > 0.0 && d < 1.0, "density {d}");
    }
}
