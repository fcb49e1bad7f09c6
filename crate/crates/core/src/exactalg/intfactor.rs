//! Integer factorization at desk scale: deterministic Miller-Rabin below
//! 2^64 plus Brent-cycle Pollard rho, with a trial-division front end.

use num::bigint::Sign;
use num::{BigInt, BigUint, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all n < 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho; n must be odd composite, not a prime power
/// obstacle in practice since we retry with shifted parameters.
fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
            count += 1;
            if count > 1 << 24 {
                break;
            }
        }
        if d != n && d != 1 {
            return d;
        }
        c += 1;
    }
}

fn factor_u64_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

/// Prime factorization of n >= 1 as sorted (prime, exponent) pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
    }
    factor_u64_into(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Factor |n| for a nonzero BigInt. Values beyond u64 get trial division up
/// to 10^6 first; a remaining cofactor that still exceeds u64 and is not a
/// probable prime is a desk-scale overflow and reported as an error.
pub fn factor_bigint(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    if n.is_zero() {
        return Err(Error::math("cannot factor zero"));
    }
    let mut m = n.abs().to_biguint().expect("abs");
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, e: u32, out: &mut Vec<(BigInt, u32)>| match out
        .iter_mut()
        .find(|(q, _)| *q == p)
    {
        Some((_, e0)) => *e0 += e,
        None => out.push((p, e)),
    };
    if let Some(small) = m
        .to_u64_digits()
        .first()
        .copied()
        .filter(|_| m.bits() <= 64)
    {
        for (p, e) in factor_u64(small) {
            push(BigInt::from(p), e, &mut out);
        }
        out.sort();
        return Ok(out);
    }
    let mut d = 2u64;
    while d <= 1_000_000 {
        let db = BigUint::from(d);
        while (&m % &db).is_zero() {
            m /= &db;
            push(BigInt::from(d), 1, &mut out);
        }
        d += if d == 2 { 1 } else { 2 };
        if m.is_one() {
            break;
        }
    }
    if !m.is_one() {
        if m.bits() <= 64 {
            let small = m.to_u64_digits()[0];
            for (p, e) in factor_u64(small) {
                push(BigInt::from(p), e, &mut out);
            }
        } else if is_probable_prime(&m) {
            push(BigInt::from_biguint(Sign::Plus, m), 1, &mut out);
        } else {
            return Err(Error::math(
                "integer factorization beyond desk scale (large composite cofactor)",
            ));
        }
    }
    out.sort();
    Ok(out)
}

/// Miller-Rabin with fixed witnesses; probabilistic above 2^64.
fn is_probable_prime(n: &BigUint) -> bool {
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    let n_minus_1 = n - &one;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        s += 1;
    }
    'witness: for a in [
        2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
    ] {
        let a = BigUint::from(a);
        if &a % n == BigUint::zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Simple sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &is_p)| is_p)
        .map(|(i, _)| i as u64)
        .collect()
}

/// All y >= 1 with y^2 dividing |d|, from the factorization of d.
pub fn square_divisors(d: &BigInt) -> Result<Vec<BigInt>> {
    let factors = factor_bigint(d)?;
    let mut ys = vec![BigInt::one()];
    for (p, e) in factors {
        let half = e / 2;
        if half == 0 {
            continue;
        }
        let mut next = Vec::new();
        for y in &ys {
            let mut pk = BigInt::one();
            for _ in 0..=half {
                next.push(y * &pk);
                pk *= &p;
            }
        }
        ys = next;
    }
    ys.sort();
    ys.dedup();
    Ok(ys)
}
