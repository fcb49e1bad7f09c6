//! Exact elliptic curves y^2 = x^3 + a x + b over Q: the affine group law,
//! scalar multiplication, and specialization of surfaces at rational fibers.

use num::{BigInt, BigRational, Signed, Zero};

use crate::error::{Error, Result};
use crate::surface::{Section, SurfaceModel};

#[derive(Clone, Debug, PartialEq)]
pub struct CurveQ {
    a: BigRational,
    b: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointQ {
    Infinity,
    Affine(BigRational, BigRational),
}

impl std::fmt::Display for PointQ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointQ::Infinity => write!(f, "O"),
            PointQ::Affine(x, y) => write!(
                f,
                "({}, {})",
                crate::exactalg::rational_to_string(x),
                crate::exactalg::rational_to_string(y)
            ),
        }
    }
}

impl CurveQ {
    pub fn new(a: BigRational, b: BigRational) -> Result<Self> {
        let four = BigRational::from_integer(4.into());
        let twenty_seven = BigRational::from_integer(27.into());
        let disc = four * &a * &a * &a + twenty_seven * &b * &b;
        if disc.is_zero() {
            return Err(Error::math("singular curve: 4a^3 + 27b^2 = 0"));
        }
        Ok(CurveQ { a, b })
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    /// 4a^3 + 27b^2, nonzero by construction.
    pub fn disc_core(&self) -> BigRational {
        let four = BigRational::from_integer(4.into());
        let twenty_seven = BigRational::from_integer(27.into());
        four * &self.a * &self.a * &self.a + twenty_seven * &self.b * &self.b
    }

    /// x^3 + a x + b.
    pub fn rhs(&self, x: &BigRational) -> BigRational {
        x * x * x + &self.a * x + &self.b
    }

    pub fn on_curve(&self, p: &PointQ) -> bool {
        match p {
            PointQ::Infinity => true,
            PointQ::Affine(x, y) => y * y == self.rhs(x),
        }
    }

    pub fn neg(&self, p: &PointQ) -> PointQ {
        match p {
            PointQ::Infinity => PointQ::Infinity,
            PointQ::Affine(x, y) => PointQ::Affine(x.clone(), -y),
        }
    }

    pub fn add(&self, p: &PointQ, q: &PointQ) -> PointQ {
        match (p, q) {
            (PointQ::Infinity, _) => q.clone(),
            (_, PointQ::Infinity) => p.clone(),
            (PointQ::Affine(x1, y1), PointQ::Affine(x2, y2)) => {
                let lambda = if x1 == x2 {
                    if (y1 + y2).is_zero() {
                        return PointQ::Infinity;
                    }
                    // tangent slope (3x^2 + a) / 2y
                    let three = BigRational::from_integer(3.into());
                    let two = BigRational::from_integer(2.into());
                    (three * x1 * x1 + &self.a) / (two * y1)
                } else {
                    (y2 - y1) / (x2 - x1)
                };
                let x3 = &lambda * &lambda - x1 - x2;
                let y3 = lambda * (x1 - &x3) - y1;
                PointQ::Affine(x3, y3)
            }
        }
    }

    pub fn double(&self, p: &PointQ) -> PointQ {
        self.add(p, p)
    }

    pub fn mul(&self, k: u64, p: &PointQ) -> PointQ {
        let mut acc = PointQ::Infinity;
        let mut base = p.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.double(&base);
            }
        }
        acc
    }

    /// Naive height of a point: max of |numerator|, |denominator| over the
    /// x-coordinate, used only for reporting.
    pub fn naive_height(p: &PointQ) -> BigInt {
        match p {
            PointQ::Infinity => BigInt::from(1),
            PointQ::Affine(x, _) => x.numer().abs().max(x.denom().abs()),
        }
    }
}

/// Specialize the surface and a section at t0. Singular fibers (a pole of A
/// or B, or a zero of the discriminant) and section poles are rejected.
pub fn specialize(
    model: &SurfaceModel,
    section: &Section,
    t0: &BigRational,
) -> Result<(CurveQ, PointQ)> {
    let a = model
        .a()
        .eval(t0)
        .ok_or_else(|| Error::math(format!("singular fiber: A has a pole at t = {t0}")))?;
    let b = model
        .b()
        .eval(t0)
        .ok_or_else(|| Error::math(format!("singular fiber: B has a pole at t = {t0}")))?;
    let delta = model
        .delta()
        .eval(t0)
        .ok_or_else(|| Error::math(format!("singular fiber: delta has a pole at t = {t0}")))?;
    if delta.is_zero() {
        return Err(Error::math(format!(
            "singular fiber: delta vanishes at t = {t0}"
        )));
    }
    let curve = CurveQ::new(a, b)?;
    let point = match section {
        Section::Identity => PointQ::Infinity,
        Section::Affine { x, y } => {
            let x0 = x
                .eval(t0)
                .ok_or_else(|| Error::math(format!("section pole: x(t) at t = {t0}")))?;
            let y0 = y
                .eval(t0)
                .ok_or_else(|| Error::math(format!("section pole: y(t) at t = {t0}")))?;
            PointQ::Affine(x0, y0)
        }
    };
    debug_assert!(curve.on_curve(&point));
    Ok((curve, point))
}
