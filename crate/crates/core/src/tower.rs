//! Tower bookkeeping: the constants n0, epsilon, delta derived from the
//! linear lower bound rho(phi_n) >= c1 2^n - c2, the level threshold N(B)
//! beyond which low-degree points die out, and the per-fiber count bound
//! from the surviving shallow levels.

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::rational_to_string;
use crate::ramtree::TreeSummary;

#[derive(Clone, Debug, PartialEq)]
pub struct TowerParams {
    pub c1: BigRational,
    pub c2: BigRational,
    pub n0: u32,
    pub epsilon: BigRational,
    pub delta: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerParamsReport {
    pub c1: String,
    pub c2: String,
    pub n0: u32,
    pub epsilon: String,
    pub delta: String,
}

impl TowerParams {
    pub fn report(&self) -> TowerParamsReport {
        TowerParamsReport {
            c1: rational_to_string(&self.c1),
            c2: rational_to_string(&self.c2),
            n0: self.n0,
            epsilon: rational_to_string(&self.epsilon),
            delta: rational_to_string(&self.delta),
        }
    }
}

fn pow2(e: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << e)
}

/// Smallest non-negative integer n with 2^n > x.
fn smallest_pow2_exceeding(x: &BigRational) -> u32 {
    let mut n = 0u32;
    let mut p = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    while p <= *x {
        p *= &two;
        n += 1;
    }
    n
}

/// Derive (n0, epsilon, delta) from the linear bound constants:
/// n0 = 0 when c2 <= 0, else the smallest integer > log2(2 c2 / c1);
/// epsilon = c1/2 and delta = epsilon 2^(2 - n0).
pub fn derive_params(c1: &BigRational, c2: &BigRational) -> Result<TowerParams> {
    if !c1.is_positive() {
        return Err(Error::math("c1 must be positive"));
    }
    let n0 = if c2.is_positive() {
        let x = BigRational::from_integer(BigInt::from(2)) * c2 / c1;
        smallest_pow2_exceeding(&x)
    } else {
        0
    };
    let epsilon = c1 / BigRational::from_integer(BigInt::from(2));
    // delta = epsilon * 2^(2 - n0), exactly
    let delta = if n0 <= 2 {
        &epsilon * pow2(2 - n0)
    } else {
        &epsilon / pow2(n0 - 2)
    };
    Ok(TowerParams {
        c1: c1.clone(),
        c2: c2.clone(),
        n0,
        epsilon,
        delta,
    })
}

/// Smallest integer N with N > n0 and 2^N > B / delta.
pub fn n_of_b(params: &TowerParams, b: u64) -> Result<u32> {
    if b < 1 {
        return Err(Error::math("B must be at least 1"));
    }
    let target = BigRational::from_integer(BigInt::from(b)) / &params.delta;
    let mut n = params.n0 + 1;
    loop {
        if pow2(n) > target {
            return Ok(n);
        }
        n += 1;
    }
}

/// Sum of the shallow-level fiber counts: l^2 + l^4 + ... + l^(2 n0),
/// computed as the explicit sum.
pub fn count_bound(ell: u64, n0: u32) -> BigInt {
    let l2 = BigInt::from(ell) * BigInt::from(ell);
    let mut term = BigInt::one();
    let mut total = BigInt::zero();
    for _ in 1..=n0 {
        term *= &l2;
        total += &term;
    }
    total
}

/// Read (c1, c2) off a tree summary: c1 = (l-1)/l^(n0+2), with c2 the largest
/// shortfall of the per-level rho lower bounds against c1 2^n.
pub fn c1_c2_from_tree(summary: &TreeSummary, n0: u32) -> Result<(BigRational, BigRational)> {
    if summary.depth <= n0 {
        return Err(Error::math(format!(
            "summary of depth {} too shallow for n0 = {n0}",
            summary.depth
        )));
    }
    let ell = summary.ell;
    let c1 = BigRational::new(BigInt::from(ell - 1), BigInt::from(ell).pow(n0 + 2));
    let mut c2 = BigRational::zero();
    for n in 1..=summary.depth {
        let rho = summary.rho_lower_at(n)?;
        let shortfall = &c1 * pow2(n) - rho;
        if shortfall > c2 {
            c2 = shortfall;
        }
    }
    Ok((c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::ramtree::build_tree;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn derive_params_worked_values() {
        let p = derive_params(&rat(1, 1), &rat(0, 1)).unwrap();
        assert_eq!(p.n0, 0);
        assert_eq!(p.epsilon, rat(1, 2));
        assert_eq!(p.delta, rat(2, 1));

        let p = derive_params(&rat(1, 1), &rat(4, 1)).unwrap();
        assert_eq!(p.n0, 4);
        assert_eq!(p.epsilon, rat(1, 2));
        assert_eq!(p.delta, rat(1, 8));

        let p = derive_params(&rat(2, 1), &rat(1, 1)).unwrap();
        assert_eq!(p.n0, 1);
        assert_eq!(p.epsilon, rat(1, 1));
        assert_eq!(p.delta, rat(2, 1));
    }

    #[test]
    fn derive_params_rejects_nonpositive_c1() {
        assert!(derive_params(&rat(0, 1), &rat(1, 1)).is_err());
        assert!(derive_params(&rat(-1, 1), &rat(1, 1)).is_err());
    }

    #[test]
    fn n_of_b_worked_values() {
        let p = derive_params(&rat(1, 1), &rat(0, 1)).unwrap();
        assert_eq!(n_of_b(&p, 16).unwrap(), 4);
        assert_eq!(n_of_b(&p, 1).unwrap(), 1);

        let p = derive_params(&rat(1, 1), &rat(4, 1)).unwrap();
        assert_eq!(n_of_b(&p, 16).unwrap(), 8);
    }

    #[test]
    fn count_bound_values() {
        assert_eq!(count_bound(3, 1), BigInt::from(9));
        assert_eq!(count_bound(3, 2), BigInt::from(90)); // 9 + 81 by direct summation
        assert_eq!(count_bound(7, 0), BigInt::zero());
    }

    #[test]
    fn count_bound_recurrence() {
        for ell in [3u64, 5, 7] {
            for n0 in 0..4u32 {
                let step = BigInt::from(ell).pow(2 * (n0 + 1));
                assert_eq!(count_bound(ell, n0 + 1), count_bound(ell, n0) + step);
            }
        }
    }

    #[test]
    fn c1_c2_from_tree_m0() {
        let budget = Budget::default();
        let (_, s) = build_tree(3, 0, 4, &budget).unwrap();
        let (c1, c2) = c1_c2_from_tree(&s, 0).unwrap();
        assert_eq!(c1, rat(2, 9));
        assert_eq!(c2, rat(0, 1));

        let (_, s) = build_tree(5, 0, 3, &budget).unwrap();
        let (c1, c2) = c1_c2_from_tree(&s, 0).unwrap();
        assert_eq!(c1, rat(4, 25));
        assert_eq!(c2, rat(0, 1));
    }

    #[test]
    fn c1_c2_from_tree_unramified_level_forces_shortfall() {
        // m >= 1: level 1 carries no ramification, so c2 >= 2 c1
        let budget = Budget::default();
        let (_, s) = build_tree(3, 1, 4, &budget).unwrap();
        let (c1, c2) = c1_c2_from_tree(&s, 1).unwrap();
        assert!(c2 >= &c1 * rat(2, 1));
    }

    #[test]
    fn defining_inequality_holds_on_tree_grid() {
        let budget = Budget::default();
        for (ell, m, depth) in [
            (3u64, 0u32, 4u32),
            (3, 1, 4),
            (3, 2, 4),
            (5, 0, 3),
            (5, 1, 3),
        ] {
            let (_, s) = build_tree(ell, m, depth, &budget).unwrap();
            let n0 = m; // ramification grows past level m
            if depth <= n0 {
                continue;
            }
            let (c1, c2) = c1_c2_from_tree(&s, n0).unwrap();
            for n in 1..=depth {
                let rho = s.rho_lower_at(n).unwrap();
                assert!(
                    rho >= &c1 * pow2(n) - &c2,
                    "ell={ell} m={m} n={n}: {rho} < c1 2^n - c2"
                );
            }
        }
    }

    #[test]
    fn shallow_summary_rejected() {
        let budget = Budget::default();
        let (_, s) = build_tree(3, 0, 2, &budget).unwrap();
        assert!(c1_c2_from_tree(&s, 2).is_err());
    }

    #[test]
    fn n_of_b_monotone_and_log_bounded() {
        let p = derive_params(&rat(1, 1), &rat(4, 1)).unwrap();
        let mut prev = 0;
        for b in 1..=1024u64 {
            let n = n_of_b(&p, b).unwrap();
            assert!(n >= prev);
            prev = n;
            let log2b = 64 - b.leading_zeros() - 1; // floor(log2 b)
                                                    // N(B) <= log2 B + constant; the constant here is n0 + 5
            assert!(n <= log2b + p.n0 + 5, "B={b}: N={n}");
        }
    }
}
