//! Division polynomials for y^2 = x^3 + a x + b, generic over the
//! coefficient field so the same recurrences serve exact curves over Q and
//! reductions over F_p.
//!
//! psi_n is stored as a polynomial in x times an optional factor of y
//! (parity bit), with y^2 rewritten as x^3 + a x + b throughout. The
//! multiplication-by-l step polynomial theta = phi_l - x_P psi_l^2 then
//! comes out as a pure polynomial in x of degree l^2.

use crate::error::{Error, Result};

/// Minimal field interface: a context value (unit for Q, the prime for F_p)
/// makes constants, and elements carry ordinary arithmetic.
pub trait CoeffField: Clone + PartialEq + std::fmt::Debug {
    type Ctx: Copy;
    fn from_i64(ctx: Self::Ctx, v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
}

impl CoeffField for num::BigRational {
    type Ctx = ();
    fn from_i64(_: (), v: i64) -> Self {
        num::BigRational::from_integer(v.into())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if num::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_zero(&self) -> bool {
        num::Zero::is_zero(self)
    }
}

/// An element of F_p carrying its modulus.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FpElem {
    pub v: u64,
    pub p: u64,
}

impl CoeffField for FpElem {
    type Ctx = u64;
    fn from_i64(p: u64, v: i64) -> Self {
        let r = v.rem_euclid(p as i64) as u64;
        FpElem { v: r, p }
    }
    fn add(&self, o: &Self) -> Self {
        FpElem {
            v: (self.v + o.v) % self.p,
            p: self.p,
        }
    }
    fn sub(&self, o: &Self) -> Self {
        FpElem {
            v: (self.v + self.p - o.v) % self.p,
            p: self.p,
        }
    }
    fn mul(&self, o: &Self) -> Self {
        FpElem {
            v: ((self.v as u128 * o.v as u128) % self.p as u128) as u64,
            p: self.p,
        }
    }
    fn neg(&self) -> Self {
        FpElem {
            v: (self.p - self.v % self.p) % self.p,
            p: self.p,
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.v == 0 {
            return None;
        }
        // p is prime in every use here
        let mut result = 1u64;
        let mut base = self.v;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = ((result as u128 * base as u128) % self.p as u128) as u64;
            }
            base = ((base as u128 * base as u128) % self.p as u128) as u64;
            e >>= 1;
        }
        Some(FpElem {
            v: result,
            p: self.p,
        })
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
}

/// Dense polynomial over F, lowest degree first, trailing zeros stripped.
#[derive(Clone, Debug, PartialEq)]
pub struct DPoly<F: CoeffField> {
    pub coeffs: Vec<F>,
}

impl<F: CoeffField> DPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        DPoly { coeffs }
    }

    pub fn zero() -> Self {
        DPoly { coeffs: vec![] }
    }

    pub fn constant(c: F) -> Self {
        DPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn add(&self, o: &Self, ctx: F::Ctx) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = F::from_i64(ctx, 0);
        DPoly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).unwrap_or(&zero);
                    let b = o.coeffs.get(i).unwrap_or(&zero);
                    a.add(b)
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self, ctx: F::Ctx) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = F::from_i64(ctx, 0);
        DPoly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).unwrap_or(&zero);
                    let b = o.coeffs.get(i).unwrap_or(&zero);
                    a.sub(b)
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self, ctx: F::Ctx) -> Self {
        if self.is_zero() || o.is_zero() {
            return DPoly::zero();
        }
        let zero = F::from_i64(ctx, 0);
        let mut out = vec![zero; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        DPoly::new(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        DPoly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Exact division; errors on nonzero remainder (divisor monic-led or
    /// any invertible leading coefficient).
    pub fn div_exact(&self, d: &Self, ctx: F::Ctx) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::math("division by zero polynomial"));
        }
        let zero = F::from_i64(ctx, 0);
        let lc_inv = d
            .coeffs
            .last()
            .unwrap()
            .inv()
            .ok_or_else(|| Error::math("leading coefficient not invertible"))?;
        let dd = d.degree();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![zero; rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap().mul(&lc_inv);
            for i in 0..dd {
                rem[k + i] = rem[k + i].sub(&c.mul(&d.coeffs[i]));
            }
            rem.pop();
            while rem.last().map(|x| x.is_zero()).unwrap_or(false) {
                rem.pop();
            }
            quot[k] = c;
        }
        if !rem.is_empty() {
            return Err(Error::math("inexact polynomial division"));
        }
        Ok(DPoly::new(quot))
    }

    pub fn eval(&self, x: &F, ctx: F::Ctx) -> F {
        let mut acc = F::from_i64(ctx, 0);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
}

/// psi_n as poly * y^parity.
#[derive(Clone, Debug)]
struct ParityPoly<F: CoeffField> {
    poly: DPoly<F>,
    parity: u8,
}

/// Division polynomials psi_1 .. psi_(l+1) for a fixed curve, plus the curve
/// cubic, ready to produce the degree-l^2 step polynomial.
pub struct DivisionPolys<F: CoeffField> {
    pub ell: u64,
    ctx: F::Ctx,
    cubic: DPoly<F>,
    psi: Vec<ParityPoly<F>>,
}

impl<F: CoeffField> DivisionPolys<F> {
    pub fn new(ctx: F::Ctx, a: &F, b: &F, ell: u64) -> Result<Self> {
        if ell < 2 {
            return Err(Error::math("division polynomials need l >= 2"));
        }
        let c = |v: i64| F::from_i64(ctx, v);
        let cubic = DPoly::new(vec![b.clone(), a.clone(), c(0), c(1)]);
        let mut this = DivisionPolys {
            ell,
            ctx,
            cubic,
            psi: Vec::new(),
        };
        this.fill(ell + 1, a, b)?;
        Ok(this)
    }

    fn mul_parity(&self, x: &ParityPoly<F>, y: &ParityPoly<F>) -> ParityPoly<F> {
        let mut poly = x.poly.mul(&y.poly, self.ctx);
        let total = x.parity + y.parity;
        if total >= 2 {
            for _ in 0..total / 2 {
                poly = poly.mul(&self.cubic, self.ctx);
            }
        }
        ParityPoly {
            poly,
            parity: total % 2,
        }
    }

    fn sub_parity(&self, x: &ParityPoly<F>, y: &ParityPoly<F>) -> ParityPoly<F> {
        assert_eq!(x.parity, y.parity, "parity mismatch in psi recurrence");
        ParityPoly {
            poly: x.poly.sub(&y.poly, self.ctx),
            parity: x.parity,
        }
    }

    fn fill(&mut self, up_to: u64, a: &F, b: &F) -> Result<()> {
        let c = |v: i64| F::from_i64(self.ctx, v);
        let a2 = a.mul(a);
        let a3 = a2.mul(a);
        let b2 = b.mul(b);
        let ab = a.mul(b);
        // psi_0 = 0, psi_1 = 1, psi_2 = 2y
        self.psi.push(ParityPoly {
            poly: DPoly::zero(),
            parity: 0,
        });
        self.psi.push(ParityPoly {
            poly: DPoly::constant(c(1)),
            parity: 0,
        });
        self.psi.push(ParityPoly {
            poly: DPoly::constant(c(2)),
            parity: 1,
        });
        // psi_3 = 3x^4 + 6a x^2 + 12b x - a^2
        self.psi.push(ParityPoly {
            poly: DPoly::new(vec![a2.neg(), c(12).mul(b), c(6).mul(a), c(0), c(3)]),
            parity: 0,
        });
        // psi_4 = 4y (x^6 + 5a x^4 + 20b x^3 - 5a^2 x^2 - 4ab x - 8b^2 - a^3)
        self.psi.push(ParityPoly {
            poly: DPoly::new(vec![
                c(-8).mul(&b2).sub(&a3),
                c(-4).mul(&ab),
                c(-5).mul(&a2),
                c(20).mul(b),
                c(5).mul(a),
                c(0),
                c(1),
            ])
            .scale(&c(4)),
            parity: 1,
        });
        let half = c(2).inv().ok_or_else(|| Error::math("characteristic 2"))?;
        for n in 5..=up_to {
            let m = (n / 2) as usize;
            let next = if n % 2 == 1 {
                // psi_(2m+1) = psi_(m+2) psi_m^3 - psi_(m-1) psi_(m+1)^3
                let t1 =
                    self.mul_parity(&self.psi[m + 2].clone(), &self.cube(&self.psi[m].clone()));
                let t2 = self.mul_parity(
                    &self.psi[m - 1].clone(),
                    &self.cube(&self.psi[m + 1].clone()),
                );
                self.sub_parity(&t1, &t2)
            } else {
                // psi_(2m) = psi_m (psi_(m+2) psi_(m-1)^2 - psi_(m-2) psi_(m+1)^2) / (2y)
                let t1 = self.mul_parity(
                    &self.psi[m + 2].clone(),
                    &self.square(&self.psi[m - 1].clone()),
                );
                let t2 = self.mul_parity(
                    &self.psi[m - 2].clone(),
                    &self.square(&self.psi[m + 1].clone()),
                );
                let bracket = self.sub_parity(&t1, &t2);
                let prod = self.mul_parity(&self.psi[m].clone(), &bracket);
                // divide by 2y: the parity-0 product carries an exact factor
                // of the curve cubic
                assert_eq!(prod.parity, 0, "even psi pre-division parity");
                let poly = prod.poly.div_exact(&self.cubic, self.ctx)?.scale(&half);
                ParityPoly { poly, parity: 1 }
            };
            self.psi.push(next);
        }
        Ok(())
    }

    fn square(&self, x: &ParityPoly<F>) -> ParityPoly<F> {
        self.mul_parity(x, x)
    }

    fn cube(&self, x: &ParityPoly<F>) -> ParityPoly<F> {
        self.mul_parity(&self.square(x), x)
    }

    /// psi_n^2 as a pure polynomial in x.
    pub fn psi_squared(&self, n: u64) -> DPoly<F> {
        let sq = self.square(&self.psi[n as usize].clone());
        debug_assert_eq!(sq.parity, 0);
        sq.poly
    }

    /// phi_n = x psi_n^2 - psi_(n+1) psi_(n-1), a pure polynomial in x.
    pub fn phi(&self, n: u64) -> DPoly<F> {
        let c0 = F::from_i64(self.ctx, 0);
        let c1 = F::from_i64(self.ctx, 1);
        let x = DPoly::new(vec![c0, c1]);
        let xpsi2 = x.mul(&self.psi_squared(n), self.ctx);
        let tail = self.mul_parity(
            &self.psi[(n + 1) as usize].clone(),
            &self.psi[(n - 1) as usize].clone(),
        );
        debug_assert_eq!(tail.parity % 2, 0);
        xpsi2.sub(&tail.poly, self.ctx)
    }

    /// theta(x) = phi_l(x) - x_P psi_l(x)^2; its roots are the x-coordinates
    /// of the candidates Q with l\*Q = P for affine P. Degree l^2 away from
    /// the characteristic.
    pub fn step_polynomial(&self, x_p: &F) -> DPoly<F> {
        let phi = self.phi(self.ell);
        let psi2 = self.psi_squared(self.ell).scale(x_p);
        phi.sub(&psi2, self.ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn rat(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn theta_degree_is_ell_squared() {
        // curve y^2 = x^3 - 8x + 8
        for ell in [2u64, 3, 5, 7] {
            let dp = DivisionPolys::new((), &rat(-8), &rat(8), ell).unwrap();
            let theta = dp.step_polynomial(&rat(1));
            assert_eq!(theta.degree() as u64, ell * ell, "ell = {ell}");
        }
    }

    #[test]
    fn psi3_roots_are_three_torsion() {
        // y^2 = x^3 + 1 has 3-torsion at x = 0 (points (0, +-1))
        let dp = DivisionPolys::new((), &rat(0), &rat(1), 3).unwrap();
        let psi3_sq = dp.psi_squared(3);
        assert!(psi3_sq.eval(&rat(0), ()).is_zero());
    }

    #[test]
    fn phi_matches_group_law_multiplication() {
        use crate::fiberlab::curve_q::{CurveQ, PointQ};
        // x([l]Q) = phi_l(x) / psi_l(x)^2 checked against the group law
        let curve = CurveQ::new(rat(-8), rat(8)).unwrap();
        let q = PointQ::Affine(rat(1), rat(1));
        for ell in [2u64, 3, 5] {
            let dp = DivisionPolys::new((), &rat(-8), &rat(8), ell).unwrap();
            let lq = curve.mul(ell, &q);
            let (x_lq, _) = match &lq {
                PointQ::Affine(x, y) => (x.clone(), y.clone()),
                PointQ::Infinity => panic!("unexpected torsion"),
            };
            let x = rat(1);
            let num = dp.phi(ell).eval(&x, ());
            let den = dp.psi_squared(ell).eval(&x, ());
            assert_eq!(num / den, x_lq, "ell = {ell}");
        }
    }

    #[test]
    fn works_mod_p() {
        // same identity over F_101
        let p = 101u64;
        let a = FpElem { v: 101 - 8, p };
        let b = FpElem { v: 8, p };
        let dp = DivisionPolys::new(p, &a, &b, 3).unwrap();
        let theta = dp.step_polynomial(&FpElem { v: 1, p });
        assert_eq!(theta.degree(), 9);
    }
}
