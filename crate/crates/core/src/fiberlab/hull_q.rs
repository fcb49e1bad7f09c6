//! Division hulls over Q: rational l-th preimages via rational-root
//! extraction on the division step polynomial, and breadth-first closure up
//! to a depth cap.

use std::collections::BTreeSet;

use num::{BigRational, Signed, Zero};
use serde::Serialize;

use super::curve_q::{CurveQ, PointQ};
use super::divpoly::{DPoly, DivisionPolys};
use crate::error::{Error, Result};
use crate::exactalg::{poly_factor, Poly};

/// Exact square root of a non-negative rational, if it is a square.
pub fn sqrt_rational(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(BigRational::zero());
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

fn dpoly_to_poly(p: &DPoly<BigRational>) -> Poly {
    Poly::new(p.coeffs.clone())
}

/// Rational roots of a polynomial over Q, via full factorization.
fn rational_roots(p: &Poly) -> Result<Vec<BigRational>> {
    if p.is_zero() {
        return Err(Error::math("root extraction on the zero polynomial"));
    }
    if p.is_constant() {
        return Ok(vec![]);
    }
    let (_, factors) = poly_factor(p)?;
    let mut out = Vec::new();
    for (g, _) in factors {
        if g.deg() == 1 {
            out.push(-g.coeff(0));
        }
    }
    Ok(out)
}

/// All Q in E(Q) with l\*Q = P: rational roots of the degree-l^2 step
/// polynomial give candidate x-coordinates, square-testing the curve cubic
/// lifts them, and the group law verifies each candidate exactly. For
/// P = O the step polynomial degenerates to psi_l^2 and the identity itself
/// joins the preimages.
pub fn ell_preimages_q(curve: &CurveQ, point: &PointQ, ell: u64) -> Result<Vec<PointQ>> {
    if !curve.on_curve(point) {
        return Err(Error::math("point does not lie on the curve"));
    }
    let dp = DivisionPolys::new((), curve.a(), curve.b(), ell)?;
    let theta = match point {
        PointQ::Infinity => dp.psi_squared(ell),
        PointQ::Affine(x, _) => dp.step_polynomial(x),
    };
    let mut out = Vec::new();
    if *point == PointQ::Infinity {
        out.push(PointQ::Infinity);
    }
    for x0 in rational_roots(&dpoly_to_poly(&theta))? {
        let rhs = curve.rhs(&x0);
        let Some(y0) = sqrt_rational(&rhs) else {
            continue;
        };
        let mut cands = vec![PointQ::Affine(x0.clone(), y0.clone())];
        if !y0.is_zero() {
            cands.push(PointQ::Affine(x0.clone(), -y0));
        }
        for cand in cands {
            if curve.mul(ell, &cand) == *point && !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct HullQ {
    pub count: u64,
    /// Depth of the deepest newly discovered preimage (0 when empty).
    pub depth_reached: u32,
    /// True when a level came back empty before the cap, so the hull is
    /// provably complete.
    pub stabilized: bool,
    #[serde(serialize_with = "serialize_points")]
    pub points: Vec<PointQ>,
}

fn serialize_points<S: serde::Serializer>(
    points: &[PointQ],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(points.len()))?;
    for p in points {
        seq.serialize_element(&p.to_string())?;
    }
    seq.end()
}

/// Breadth-first closure of rational l-th preimages of `point`, to depth
/// `n_max`, deduplicated by exact coordinates.
pub fn hull_count_q(curve: &CurveQ, point: &PointQ, ell: u64, n_max: u32) -> Result<HullQ> {
    if n_max < 1 {
        return Err(Error::math("n_max must be at least 1"));
    }
    let mut visited: BTreeSet<PointQ> = BTreeSet::new();
    let mut frontier = vec![point.clone()];
    let mut depth_reached = 0;
    let mut stabilized = false;
    for depth in 1..=n_max {
        let mut next = Vec::new();
        for q in &frontier {
            for r in ell_preimages_q(curve, q, ell)? {
                if visited.insert(r.clone()) {
                    next.push(r);
                }
            }
        }
        if next.is_empty() {
            stabilized = true;
            break;
        }
        depth_reached = depth;
        frontier = next;
    }
    Ok(HullQ {
        count: visited.len() as u64,
        depth_reached,
        stabilized,
        points: visited.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn two_torsion_preimage_of_identity() {
        // y^2 = x^3 - 8x + 8 at t = 8: (2, 0) is a 2-torsion point
        let c = CurveQ::new(rat(-8), rat(8)).unwrap();
        let pre = ell_preimages_q(&c, &PointQ::Infinity, 2).unwrap();
        assert!(pre.contains(&PointQ::Affine(rat(2), rat(0))));
        assert!(pre.contains(&PointQ::Infinity));
    }

    #[test]
    fn constructed_preimage_recovered() {
        let c = CurveQ::new(rat(-8), rat(8)).unwrap();
        let g = PointQ::Affine(rat(1), rat(1));
        for ell in [2u64, 3] {
            let p = c.mul(ell, &g);
            let pre = ell_preimages_q(&c, &p, ell).unwrap();
            assert!(pre.contains(&g), "ell = {ell}");
            for q in &pre {
                assert_eq!(c.mul(ell, q), p);
            }
        }
    }

    #[test]
    fn empty_preimage_is_fine() {
        // no rational 3-division of (1, 1) on this fiber (checked mod p:
        // no F_p preimage exists for p = 7)
        let c = CurveQ::new(rat(-8), rat(8)).unwrap();
        let p = PointQ::Affine(rat(1), rat(1));
        let pre = ell_preimages_q(&c, &p, 3).unwrap();
        for q in &pre {
            assert_eq!(c.mul(3, q), p);
        }
        let hull = hull_count_q(&c, &p, 3, 4).unwrap();
        if pre.is_empty() {
            assert_eq!(hull.count, 0);
            assert!(hull.stabilized);
        }
    }

    #[test]
    fn hull_of_doubled_point() {
        let c = CurveQ::new(rat(-8), rat(8)).unwrap();
        let g = PointQ::Affine(rat(1), rat(1));
        let p = c.mul(2, &g);
        let hull = hull_count_q(&c, &p, 2, 1).unwrap();
        assert!(hull.count >= 1);
        assert!(hull.points.contains(&g));
    }

    #[test]
    fn hull_monotone_in_depth() {
        let c = CurveQ::new(rat(0), rat(1)).unwrap();
        // P = O: the hull closure collects the 2-power torsion
        let mut prev = 0;
        for n_max in 1..=3 {
            let hull = hull_count_q(&c, &PointQ::Infinity, 2, n_max).unwrap();
            assert!(hull.count >= prev);
            prev = hull.count;
        }
    }
}
