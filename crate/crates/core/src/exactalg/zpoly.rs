//! Polynomial arithmetic over F_p (p an odd machine-word prime), supporting
//! the distinct-degree / equal-degree factorization behind `poly_factor`.
//!
//! Polynomials are coefficient vectors, lowest degree first, normalized.

use num::BigUint;
use num::One;
use rand::Rng;

pub type ZPoly = Vec<u64>;

fn norm(mut v: ZPoly) -> ZPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn deg(a: &ZPoly) -> usize {
    a.len().saturating_sub(1)
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub fn add(p: u64, a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + y) % p;
    }
    norm(out)
}

pub fn sub(p: u64, a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    norm(out)
}

pub fn mul(p: u64, a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    norm(out)
}

pub fn scale(p: u64, a: &ZPoly, c: u64) -> ZPoly {
    norm(a.iter().map(|&x| mulmod(x, c, p)).collect())
}

pub fn monic(p: u64, a: &ZPoly) -> ZPoly {
    match a.last() {
        None => vec![],
        Some(1) => a.clone(),
        Some(&lc) => scale(p, a, inv_mod(lc, p)),
    }
}

/// (quotient, remainder) with b nonzero.
pub fn divrem(p: u64, a: &ZPoly, b: &ZPoly) -> (ZPoly, ZPoly) {
    assert!(!b.is_empty(), "division by zero polynomial mod p");
    let db = deg(b);
    let lb_inv = inv_mod(*b.last().unwrap(), p);
    let mut rem = a.clone();
    let mut quot = vec![0u64; a.len().saturating_sub(db)];
    while rem.len() > db {
        let k = rem.len() - 1 - db;
        let c = mulmod(*rem.last().unwrap(), lb_inv, p);
        for i in 0..db {
            rem[k + i] = (rem[k + i] + p - mulmod(c, b[i], p)) % p;
        }
        rem.pop();
        while rem.last() == Some(&0) {
            rem.pop();
        }
        quot[k] = c;
    }
    (norm(quot), norm(rem))
}

pub fn rem(p: u64, a: &ZPoly, b: &ZPoly) -> ZPoly {
    divrem(p, a, b).1
}

pub fn gcd(p: u64, a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_empty() {
        let r = rem(p, &x, &y);
        x = y;
        y = r;
    }
    monic(p, &x)
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g, g monic.
pub fn xgcd(p: u64, a: &ZPoly, b: &ZPoly) -> (ZPoly, ZPoly, ZPoly) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut s0: ZPoly = vec![1];
    let mut s1: ZPoly = vec![];
    let mut t0: ZPoly = vec![];
    let mut t1: ZPoly = vec![1];
    while !r1.is_empty() {
        let (q, r) = divrem(p, &r0, &r1);
        let s = sub(p, &s0, &mul(p, &q, &s1));
        let t = sub(p, &t0, &mul(p, &q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    if let Some(&lc) = r0.last() {
        if lc != 1 {
            let c = inv_mod(lc, p);
            return (scale(p, &r0, c), scale(p, &s0, c), scale(p, &t0, c));
        }
    }
    (r0, s0, t0)
}

pub fn derivative(p: u64, a: &ZPoly) -> ZPoly {
    if a.len() <= 1 {
        return vec![];
    }
    norm(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mulmod(c, (i as u64) % p, p))
            .collect(),
    )
}

/// b^e mod (f, p) with a BigUint exponent.
pub fn powmod_poly(p: u64, b: &ZPoly, e: &BigUint, f: &ZPoly) -> ZPoly {
    let mut acc: ZPoly = vec![1];
    let mut base = rem(p, b, f);
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            acc = rem(p, &mul(p, &acc, &base), f);
        }
        if i + 1 < bits {
            base = rem(p, &mul(p, &base, &base), f);
        }
    }
    acc
}

/// Distinct-degree factorization of a monic squarefree f: (degree d, product
/// of the irreducible factors of degree d).
fn distinct_degree(p: u64, f: &ZPoly) -> Vec<(usize, ZPoly)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x: ZPoly = vec![0, 1];
    let mut h = x.clone(); // x^(p^i) mod f, running
    let mut i = 0usize;
    while deg(&f) >= 1 {
        i += 1;
        if 2 * i > deg(&f) {
            out.push((deg(&f), f.clone()));
            break;
        }
        h = powmod_poly(p, &h, &BigUint::from(p), &f);
        let g = gcd(p, &f, &sub(p, &h, &x));
        if deg(&g) >= 1 {
            out.push((i, g.clone()));
            f = divrem(p, &f, &g).0;
            h = rem(p, &h, &f);
        }
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting: f monic squarefree, all
/// irreducible factors of degree d. p odd.
fn equal_degree<R: Rng>(p: u64, f: &ZPoly, d: usize, rng: &mut R, out: &mut Vec<ZPoly>) {
    if deg(f) == d {
        out.push(monic(p, f));
        return;
    }
    let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    loop {
        let r: ZPoly = norm((0..deg(f)).map(|_| rng.gen_range(0..p)).collect());
        if r.is_empty() {
            continue;
        }
        let g = gcd(p, f, &r);
        let g = if deg(&g) >= 1 && deg(&g) < deg(f) {
            g
        } else {
            let h = powmod_poly(p, &r, &e, f);
            let h1 = sub(p, &h, &vec![1]);
            let g = gcd(p, f, &h1);
            if deg(&g) >= 1 && deg(&g) < deg(f) {
                g
            } else {
                continue;
            }
        };
        let rest = divrem(p, f, &g).0;
        equal_degree(p, &g, d, rng, out);
        equal_degree(p, &rest, d, rng, out);
        return;
    }
}

/// Full factorization of a monic squarefree polynomial mod an odd prime p.
pub fn factor_squarefree_modp<R: Rng>(p: u64, f: &ZPoly, rng: &mut R) -> Vec<ZPoly> {
    let mut out = Vec::new();
    for (d, g) in distinct_degree(p, f) {
        equal_degree(p, &g, d, rng, &mut out);
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn modp_factor_reconstructs() {
        let p = 13u64;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        // (x+1)(x+2)(x^2+1)(x^3+x+4) mod 13  -- x^2+1 irreducible mod 13? 5^2=25=12=-1, reducible.
        let f = [vec![1u64, 1], vec![2, 1], vec![1, 0, 1], vec![4, 1, 0, 1]]
            .iter()
            .fold(vec![1u64], |acc, g| mul(p, &acc, g));
        let sq = gcd(p, &f, &derivative(p, &f));
        assert_eq!(deg(&sq), 0); // squarefree
        let factors = factor_squarefree_modp(p, &monic(p, &f), &mut rng);
        let back = factors.iter().fold(vec![1u64], |acc, g| mul(p, &acc, g));
        assert_eq!(back, monic(p, &f));
        for g in &factors {
            assert!(deg(g) >= 1);
        }
    }

    #[test]
    fn xgcd_bezout() {
        let p = 11u64;
        let a = vec![3u64, 0, 1];
        let b = vec![1u64, 1];
        let (g, s, t) = xgcd(p, &a, &b);
        let lhs = add(p, &mul(p, &s, &a), &mul(p, &t, &b));
        assert_eq!(lhs, g);
    }
}
