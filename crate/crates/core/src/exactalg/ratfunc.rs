//! Rational functions over Q(t), places of the function field, and valuations.
//!
//! A `RatFunc` is always reduced with a monic denominator, so equality is
//! plain structural equality. Places are the monic irreducible polynomials
//! together with the place at infinity; a finite place of degree d stands for
//! d conjugate geometric points sharing the same valuation data.

use num::{BigRational, One, Zero};
use serde::Serialize;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::factor::poly_factor;
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Build `num/den` in canonical form: reduced, denominator monic.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::math("zero denominator"));
        }
        if num.is_zero() {
            return Ok(RatFunc {
                num: Poly::zero(),
                den: Poly::one(),
            });
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g)?;
        let mut den = den.div_exact(&g)?;
        let lc = den.leading_coeff();
        if !lc.is_one() {
            let inv = BigRational::one() / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn div(&self, rhs: &RatFunc) -> Result<RatFunc> {
        if rhs.is_zero() {
            return Err(Error::math("division by zero rational function"));
        }
        RatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn inv(&self) -> Result<RatFunc> {
        RatFunc::one().div(self)
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        RatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Evaluate at `t0`; None at a pole.
    pub fn eval(&self, t0: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(t0);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(t0) / d)
        }
    }

    pub fn parse(s: &str) -> Result<RatFunc> {
        super::parse::parse_ratfunc(s)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::parse::ratfunc_to_string(self))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominator")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

/// A place of Q(t): a monic irreducible polynomial, or the point at infinity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

impl Place {
    /// Finite place from a polynomial, monicized; errors unless irreducible
    /// of degree >= 1.
    pub fn finite(p: &Poly) -> Result<Place> {
        if p.is_zero() || p.is_constant() {
            return Err(Error::math("a finite place needs degree >= 1"));
        }
        let monic = p.monic();
        let (_, factors) = poly_factor(&monic)?;
        if factors.len() != 1 || factors[0].1 != 1 {
            return Err(Error::math(format!("{monic} is not irreducible over Q")));
        }
        Ok(Place::Finite(monic))
    }

    /// Finite place without the irreducibility check, for factors we already
    /// know are irreducible.
    pub(crate) fn finite_unchecked(p: Poly) -> Place {
        Place::Finite(p)
    }

    /// Residue degree: deg of the defining polynomial, 1 at infinity.
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(p) => p.deg(),
            Place::Infinity => 1,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Place({self})")
    }
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Order of vanishing of `f` at `v`; negative at a pole. Undefined for 0.
pub fn valuation(f: &RatFunc, v: &Place) -> Result<i64> {
    if f.is_zero() {
        return Err(Error::math("valuation of the zero function is undefined"));
    }
    match v {
        Place::Finite(pi) => {
            let up = f.num().multiplicity(pi) as i64;
            let down = f.den().multiplicity(pi) as i64;
            Ok(up - down)
        }
        Place::Infinity => Ok(f.den().deg() as i64 - f.num().deg() as i64),
    }
}

/// A pole of a rational function: the place, the (common) order at each of
/// the `geometric_points` conjugate points the place represents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pole {
    pub place: Place,
    pub order: u32,
    pub geometric_points: usize,
}

/// All poles of `f`, the place at infinity included, in a deterministic order.
pub fn poles(f: &RatFunc) -> Result<Vec<Pole>> {
    if f.is_zero() {
        return Err(Error::math("the zero function has no pole divisor"));
    }
    let mut out = Vec::new();
    // num and den are coprime, so every irreducible factor of den is a pole
    let (_, factors) = poly_factor(f.den())?;
    for (pi, mult) in factors {
        let geometric_points = pi.deg();
        out.push(Pole {
            place: Place::finite_unchecked(pi),
            order: mult,
            geometric_points,
        });
    }
    let v_inf = valuation(f, &Place::Infinity)?;
    if v_inf < 0 {
        out.push(Pole {
            place: Place::Infinity,
            order: (-v_inf) as u32,
            geometric_points: 1,
        });
    }
    out.sort_by_key(|p| (p.place.degree(), p.place.to_string()));
    Ok(out)
}
