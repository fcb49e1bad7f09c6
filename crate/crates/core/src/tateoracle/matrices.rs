//! 2x2 matrices over Z/l^K: group orders of SL2 over Z/l^k by enumeration
//! against the closed form, and the four-elementary-factor diagonal identity
//! used to place diag(1 + l^2N gamma, ...) in the congruence subgroup.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exactalg::intfactor::is_prime_u64;

/// A 2x2 matrix with entries in Z/l^K at recorded precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub e: [[u64; 2]; 2],
    pub modulus: u64,
    pub precision: u32,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl Mat2 {
    pub fn new(e: [[u64; 2]; 2], modulus: u64, precision: u32) -> Self {
        let e = [
            [e[0][0] % modulus, e[0][1] % modulus],
            [e[1][0] % modulus, e[1][1] % modulus],
        ];
        Mat2 {
            e,
            modulus,
            precision,
        }
    }

    pub fn identity(modulus: u64, precision: u32) -> Self {
        Mat2::new([[1, 0], [0, 1]], modulus, precision)
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        assert_eq!(self.modulus, other.modulus);
        let m = self.modulus;
        let a = &self.e;
        let b = &other.e;
        Mat2::new(
            [
                [
                    (mulmod(a[0][0], b[0][0], m) + mulmod(a[0][1], b[1][0], m)) % m,
                    (mulmod(a[0][0], b[0][1], m) + mulmod(a[0][1], b[1][1], m)) % m,
                ],
                [
                    (mulmod(a[1][0], b[0][0], m) + mulmod(a[1][1], b[1][0], m)) % m,
                    (mulmod(a[1][0], b[0][1], m) + mulmod(a[1][1], b[1][1], m)) % m,
                ],
            ],
            m,
            self.precision,
        )
    }

    pub fn det(&self) -> u64 {
        let m = self.modulus;
        (mulmod(self.e[0][0], self.e[1][1], m) + m - mulmod(self.e[0][1], self.e[1][0], m)) % m
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Inverse of a modulo m (m not necessarily prime); None if not coprime.
fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

/// |SL2(Z/l^k)| : the closed form l^(3k-2)(l^2 - 1), cross-checked by full
/// enumeration whenever l^4k fits the budget.
pub fn sl2_order(ell: u64, k: u32, budget: &Budget) -> Result<u128> {
    if !is_prime_u64(ell) {
        return Err(Error::math(format!("ell must be prime, got {ell}")));
    }
    if k < 1 {
        return Err(Error::math("k must be at least 1"));
    }
    let closed = (ell as u128).pow(3 * k - 2) * ((ell as u128) * (ell as u128) - 1);
    let lk = (ell as u128).pow(k);
    let grid = lk.checked_pow(4);
    if let Some(grid) = grid {
        if grid <= budget.limit() as u128 {
            let lk = lk as u64;
            let mut count: u128 = 0;
            for a in 0..lk {
                for b in 0..lk {
                    for c in 0..lk {
                        for d in 0..lk {
                            let det = (mulmod(a, d, lk) + lk - mulmod(b, c, lk)) % lk;
                            if det == 1 {
                                count += 1;
                            }
                        }
                    }
                }
            }
            if count != closed {
                return Err(Error::math(format!(
                    "SL2 enumeration ({count}) disagrees with the closed form ({closed})"
                )));
            }
        }
    }
    Ok(closed)
}

/// Exact index of the level-l^2N congruence subgroup in SL2(Z_l), which is
/// |SL2(Z/l^2N)| = l^(6N-2)(l^2-1), together with the coarser bound
/// l^(1+6N)(l^2-1); both are reported, the coarse bound being the one used
/// in hand estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CongruenceIndex {
    pub exact: u128,
    pub coarse_bound: u128,
}

pub fn congruence_index(ell: u64, n_level: u32) -> CongruenceIndex {
    let l = ell as u128;
    CongruenceIndex {
        exact: l.pow(6 * n_level - 2) * (l * l - 1),
        coarse_bound: l.pow(1 + 6 * n_level) * (l * l - 1),
    }
}

/// Verify that the four-factor product of elementary matrices
///
/// ```text
///   [[1,0],[-l^N/alpha,1]] [[1,l^N g],[0,1]] [[1,0],[l^N,1]] [[1,-l^N g/alpha],[0,1]]
/// ```
///
/// with alpha = 1 + l^2N gamma equals diag(alpha, alpha^-1) mod l^K. The
/// denominators must be alpha itself for the product to close; gamma = 0
/// degenerates to the identity.
pub fn verify_matrix_identity(
    ell: u64,
    n_level: u32,
    gamma: u64,
    precision_k: u32,
) -> Result<bool> {
    if !is_prime_u64(ell) {
        return Err(Error::math(format!("ell must be prime, got {ell}")));
    }
    if precision_k <= 2 * n_level {
        return Err(Error::math(
            "working precision K must exceed 2N to see the diagonal entries",
        ));
    }
    let modulus = (ell as u128).checked_pow(precision_k);
    let modulus = match modulus {
        Some(m) if m < (1u128 << 63) => m as u64,
        _ => return Err(Error::math("l^K exceeds the working word size")),
    };
    let ln = ell.pow(n_level) % modulus;
    let l2n = mulmod(ln, ln, modulus);
    let alpha = (1 + mulmod(l2n, gamma % modulus, modulus)) % modulus;
    let alpha_inv = inv_mod(alpha, modulus)
        .ok_or_else(|| Error::math("denominator not invertible at this precision"))?;
    let neg = |x: u64| (modulus - x % modulus) % modulus;

    let lng = mulmod(ln, gamma % modulus, modulus);
    let m1 = Mat2::new(
        [[1, 0], [neg(mulmod(ln, alpha_inv, modulus)), 1]],
        modulus,
        precision_k,
    );
    let m2 = Mat2::new([[1, lng], [0, 1]], modulus, precision_k);
    let m3 = Mat2::new([[1, 0], [ln, 1]], modulus, precision_k);
    let m4 = Mat2::new(
        [[1, neg(mulmod(lng, alpha_inv, modulus))], [0, 1]],
        modulus,
        precision_k,
    );
    let product = m1.mul(&m2).mul(&m3).mul(&m4);
    let expected = Mat2::new([[alpha, 0], [0, alpha_inv]], modulus, precision_k);
    Ok(product == expected)
}
