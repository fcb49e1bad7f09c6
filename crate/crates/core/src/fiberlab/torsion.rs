//! Rational torsion subgroups: a gcd-of-point-counts bound over several good
//! primes, Lutz-Nagell candidate search on a short integral model, and exact
//! order verification of every candidate.

use num::{BigInt, BigRational, Integer, One, Zero};
use serde::Serialize;

use super::curve_fp::CurveFp;
use super::curve_q::{CurveQ, PointQ};
use crate::error::Result;
use crate::exactalg::intfactor::{factor_u64, square_divisors};
use crate::exactalg::{poly_factor, Poly};

#[derive(Clone, Debug, Serialize)]
pub struct TorsionInfo {
    pub order: u64,
    /// "trivial", "Z/n", or "Z/2 x Z/n".
    pub structure: String,
    /// The affine torsion points, in the original model's coordinates.
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

impl TorsionInfo {
    pub fn contains(&self, p: &PointQ) -> bool {
        *p == PointQ::Infinity || self.points.contains(p)
    }
}

/// Scale to y^2 = x^3 + a u^4 x + b u^6 with integer coefficients; points map
/// by (x, y) -> (u^2 x, u^3 y).
fn integral_model(curve: &CurveQ) -> (BigInt, BigInt, BigInt) {
    let u = curve.a().denom().lcm(curve.b().denom());
    let u2 = &u * &u;
    let u4 = &u2 * &u2;
    let u6 = &u4 * &u2;
    let a = curve.a() * BigRational::from_integer(u4);
    let b = curve.b() * BigRational::from_integer(u6);
    debug_assert!(a.denom().is_one() && b.denom().is_one());
    (a.numer().clone(), b.numer().clone(), u)
}

/// Upper bound for the torsion order: gcd of #E(F_p) over the first three
/// good primes p >= 5.
fn torsion_order_bound(a: &BigInt, b: &BigInt) -> u64 {
    let mut bound: u64 = 0;
    let mut used = 0;
    let mut p = 5u64;
    while used < 3 {
        if crate::exactalg::intfactor::is_prime_u64(p) {
            let pb = BigInt::from(p);
            let ar = a.mod_floor(&pb);
            let br = b.mod_floor(&pb);
            use num::ToPrimitive;
            if let Ok(curve) = CurveFp::new(p, ar.to_u64().unwrap(), br.to_u64().unwrap()) {
                bound = num::integer::gcd(bound, curve.count_points());
                used += 1;
                if bound == 1 {
                    return 1;
                }
            }
        }
        p += 2;
    }
    bound
}

/// Integer roots of a monic-or-not integer cubic (or any small polynomial),
/// via exact factorization over Q.
fn integer_roots(coeffs: &[BigInt]) -> Result<Vec<BigInt>> {
    let poly = Poly::new(
        coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect(),
    );
    if poly.is_zero() || poly.is_constant() {
        return Ok(vec![]);
    }
    let (_, factors) = poly_factor(&poly)?;
    let mut out = Vec::new();
    for (g, _) in factors {
        if g.deg() == 1 {
            let root = -g.coeff(0);
            if root.denom().is_one() {
                out.push(root.numer().clone());
            }
        }
    }
    Ok(out)
}

/// The full rational torsion subgroup of the curve.
pub fn torsion_q(curve: &CurveQ) -> Result<TorsionInfo> {
    let (a, b, u) = integral_model(curve);
    let bound = torsion_order_bound(&a, &b);
    if bound == 1 {
        return Ok(TorsionInfo {
            order: 1,
            structure: "trivial".to_string(),
            points: vec![],
        });
    }
    let model = CurveQ::new(
        BigRational::from_integer(a.clone()),
        BigRational::from_integer(b.clone()),
    )?;

    // Lutz-Nagell candidates: y = 0 at integer roots of the cubic, else
    // y^2 divides 4a^3 + 27b^2
    let mut candidates: Vec<(BigInt, BigInt)> = Vec::new();
    for x in integer_roots(&[b.clone(), a.clone(), BigInt::zero(), BigInt::one()])? {
        candidates.push((x, BigInt::zero()));
    }
    let d = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;
    for y in square_divisors(&d)? {
        if y.is_zero() {
            continue;
        }
        let shifted = &b - &y * &y;
        for x in integer_roots(&[shifted.clone(), a.clone(), BigInt::zero(), BigInt::one()])? {
            candidates.push((x.clone(), y.clone()));
            candidates.push((x, -&y));
        }
    }

    // verify each candidate's order against the gcd bound
    let mut points: Vec<(PointQ, u64)> = Vec::new();
    for (x, y) in candidates {
        let pt = PointQ::Affine(BigRational::from_integer(x), BigRational::from_integer(y));
        if !model.on_curve(&pt) {
            continue;
        }
        // at entry of step k the accumulator holds k * pt; the first k
        // reaching the identity is the exact order, and anything that
        // survives past the gcd bound is not torsion
        let mut acc = pt.clone();
        let mut order = 0u64;
        for k in 1..=bound {
            if acc == PointQ::Infinity {
                order = k;
                break;
            }
            acc = model.add(&acc, &pt);
        }
        if order >= 1 && bound.is_multiple_of(order) && !points.iter().any(|(q, _)| *q == pt) {
            points.push((pt, order));
        }
    }

    // map back to the original model: x = X/u^2, y = Y/u^3
    let u2 = BigRational::from_integer(&u * &u);
    let u3 = BigRational::from_integer(&u * &u * &u);
    let mut back: Vec<(PointQ, u64)> = points
        .into_iter()
        .map(|(p, ord)| match p {
            PointQ::Affine(x, y) => (PointQ::Affine(x / &u2, y / &u3), ord),
            PointQ::Infinity => (PointQ::Infinity, ord),
        })
        .collect();
    back.sort_by(|x, y| x.0.cmp(&y.0));

    let order = back.len() as u64 + 1;
    let max_order = back.iter().map(|(_, o)| *o).max().unwrap_or(1);
    let two_torsion = back.iter().filter(|(_, o)| *o == 2).count();
    let structure = if order == 1 {
        "trivial".to_string()
    } else if two_torsion == 3 {
        format!("Z/2 x Z/{}", order / 2)
    } else {
        debug_assert_eq!(max_order, order, "cyclic torsion order mismatch");
        format!("Z/{order}")
    };
    Ok(TorsionInfo {
        order,
        structure,
        points: back.into_iter().map(|(p, _)| p).collect(),
    })
}

/// Is the point of finite order? Exact: torsion injects into E(F_p) at good
/// odd primes, so an order must divide the gcd bound.
pub fn is_torsion_point(curve: &CurveQ, pt: &PointQ) -> Result<bool> {
    if *pt == PointQ::Infinity {
        return Ok(true);
    }
    if !curve.on_curve(pt) {
        return Err(crate::error::Error::math("point does not lie on the curve"));
    }
    let info = torsion_q(curve)?;
    Ok(info.contains(pt))
}

/// Prime factorization of the torsion order, for the special-prime check.
pub fn order_factorization(order: u64) -> Vec<(u64, u32)> {
    if order <= 1 {
        return vec![];
    }
    factor_u64(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn ratq(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn torsion_of_eta_fiber() {
        // y^2 = x^3 - 8x + 8 contains the order-2 point (2, 0)
        let c = CurveQ::new(rat(-8), rat(8)).unwrap();
        let info = torsion_q(&c).unwrap();
        assert_eq!(info.order % 2, 0);
        assert!(info.contains(&PointQ::Affine(rat(2), rat(0))));
    }

    #[test]
    fn torsion_of_mordell_curve() {
        // y^2 = x^3 + 1: Z/6 generated by (2, 3)
        let c = CurveQ::new(rat(0), rat(1)).unwrap();
        let info = torsion_q(&c).unwrap();
        assert_eq!(info.order, 6);
        assert_eq!(info.structure, "Z/6");
        assert!(info.contains(&PointQ::Affine(rat(2), rat(3))));
        assert!(info.contains(&PointQ::Affine(rat(-1), rat(0))));
    }

    #[test]
    fn torsion_consistent_with_gcd_bound() {
        // y^2 = x^3 - x + 1: whatever the gcd bound allows, the realized
        // torsion divides it (here trivial)
        let c = CurveQ::new(rat(-1), rat(1)).unwrap();
        let info = torsion_q(&c).unwrap();
        let (a, b, _) = integral_model(&c);
        let bound = torsion_order_bound(&a, &b);
        assert_eq!(bound % info.order, 0);
    }

    #[test]
    fn full_two_torsion_structure() {
        // y^2 = x^3 - x = x(x-1)(x+1): Z/2 x Z/2
        let c = CurveQ::new(rat(-1), rat(0)).unwrap();
        let info = torsion_q(&c).unwrap();
        assert_eq!(info.order, 4);
        assert_eq!(info.structure, "Z/2 x Z/2");
    }

    #[test]
    fn non_torsion_point_detected() {
        // (1, 1) on y^2 = x^3 - 8x + 8 is non-torsion: 2P has non-integral
        // coordinates on the integral model
        let c = CurveQ::new(rat(-8), rat(8)).unwrap();
        let p = PointQ::Affine(rat(1), rat(1));
        assert!(!is_torsion_point(&c, &p).unwrap());
        let two_p = c.double(&p);
        assert_eq!(two_p, PointQ::Affine(ratq(17, 4), ratq(57, 8)));
    }

    #[test]
    fn rational_coefficient_curve() {
        // scaling handles non-integral models: y^2 = x^3 - x/4 has (0,0) of
        // order 2 plus (±1/2, 0)
        let c = CurveQ::new(ratq(-1, 4), rat(0)).unwrap();
        let info = torsion_q(&c).unwrap();
        assert_eq!(info.order, 4);
        assert!(info.contains(&PointQ::Affine(rat(0), rat(0))));
        assert!(info.contains(&PointQ::Affine(ratq(1, 2), rat(0))));
    }
}
