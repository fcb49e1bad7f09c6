//! Exact factorization over Q: Yun squarefree decomposition, then Zassenhaus
//! (modular factorization, multifactor Hensel lifting to a Mignotte-bound
//! modulus, subset recombination) on each squarefree part.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::poly::Poly;
use super::zpoly::{self, ZPoly};
use crate::error::{Error, Result};

type IPoly = Vec<BigInt>;

fn inorm(mut v: IPoly) -> IPoly {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

fn ideg(a: &[BigInt]) -> usize {
    a.len().saturating_sub(1)
}

fn imul(a: &[BigInt], b: &[BigInt]) -> IPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn iadd(a: &[BigInt], b: &[BigInt]) -> IPoly {
    let n = a.len().max(b.len());
    inorm(
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_else(BigInt::zero)
                    + b.get(i).cloned().unwrap_or_else(BigInt::zero)
            })
            .collect(),
    )
}

fn isub(a: &[BigInt], b: &[BigInt]) -> IPoly {
    let n = a.len().max(b.len());
    inorm(
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_else(BigInt::zero)
                    - b.get(i).cloned().unwrap_or_else(BigInt::zero)
            })
            .collect(),
    )
}

fn iscale(a: &[BigInt], c: &BigInt) -> IPoly {
    inorm(a.iter().map(|x| x * c).collect())
}

/// Reduce coefficients into [0, m).
fn itrunc(a: &[BigInt], m: &BigInt) -> IPoly {
    inorm(a.iter().map(|c| c.mod_floor(m)).collect())
}

/// Reduce coefficients into the symmetric range (-m/2, m/2].
fn itrunc_symmetric(a: &[BigInt], m: &BigInt) -> IPoly {
    let half = m / 2;
    inorm(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// Long division by a divisor monic modulo m; all arithmetic mod m.
fn idivrem_monic_mod(a: &[BigInt], h: &[BigInt], m: &BigInt) -> (IPoly, IPoly) {
    let dh = ideg(h);
    let mut rem = itrunc(a, m);
    let mut quot = vec![BigInt::zero(); rem.len().saturating_sub(dh)];
    while rem.len() > dh {
        let k = rem.len() - 1 - dh;
        let c = rem.last().unwrap().clone();
        for i in 0..dh {
            rem[k + i] = (&rem[k + i] - &c * &h[i]).mod_floor(m);
        }
        rem.pop();
        while rem.last().map(|x| x.is_zero()).unwrap_or(false) {
            rem.pop();
        }
        quot[k] = c;
    }
    (inorm(quot), inorm(rem))
}

fn ext_gcd_bigint(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if b.is_zero() {
        (a.clone(), BigInt::one(), BigInt::zero())
    } else {
        let (g, x, y) = ext_gcd_bigint(b, &a.mod_floor(b));
        (g, y.clone(), x - a.div_floor(b) * y)
    }
}

fn inv_mod_bigint(a: &BigInt, m: &BigInt) -> BigInt {
    let (g, x, _) = ext_gcd_bigint(&a.mod_floor(m), m);
    debug_assert!(g.is_one());
    x.mod_floor(m)
}

fn zpoly_to_ipoly(a: &ZPoly) -> IPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

fn ipoly_to_zpoly(a: &[BigInt], p: u64) -> ZPoly {
    let pm = BigInt::from(p);
    let mut out: ZPoly = a
        .iter()
        .map(|c| {
            let r = c.mod_floor(&pm);
            r.to_u64_digits().1.first().copied().unwrap_or(0)
        })
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// One quadratic Hensel step: from f = g*h (mod m), s*g + t*h = 1 (mod m),
/// h monic, to the same data mod m^2.
fn hensel_step(
    m: &BigInt,
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
) -> (IPoly, IPoly, IPoly, IPoly) {
    let m2 = m * m;
    let e = itrunc(&isub(f, &imul(g, h)), &m2);
    let (q, r) = idivrem_monic_mod(&imul(s, &e), h, &m2);
    let g1 = itrunc(&iadd(&iadd(g, &imul(t, &e)), &imul(&q, g)), &m2);
    let h1 = itrunc(&iadd(h, &r), &m2);
    let b = itrunc(
        &isub(&iadd(&imul(s, &g1), &imul(t, &h1)), &[BigInt::one()]),
        &m2,
    );
    let (c, d) = idivrem_monic_mod(&imul(s, &b), &h1, &m2);
    let s1 = itrunc(&isub(s, &d), &m2);
    let t1 = itrunc(&isub(&isub(t, &imul(t, &b)), &imul(&c, &g1)), &m2);
    (g1, h1, s1, t1)
}

/// Lift the mod-p factorization `f_list` of `f` (monic factors, f = lc * prod
/// mod p) to monic factors mod p^l with f = lc * prod mod p^l.
fn hensel_lift(p: u64, f: &[BigInt], f_list: &[ZPoly], l: u32) -> Vec<IPoly> {
    let pl = BigInt::from(p).pow(l);
    let r = f_list.len();
    let lc = f.last().expect("nonzero").clone();
    if r == 1 {
        let inv = inv_mod_bigint(&lc, &pl);
        return vec![itrunc(&iscale(f, &inv), &pl)];
    }
    let k = r / 2;
    let steps = {
        let mut d = 0u32;
        while (1u64 << d) < l as u64 {
            d += 1;
        }
        d
    };
    let lc_p = ipoly_to_zpoly(std::slice::from_ref(&lc), p);
    let mut g_p = lc_p;
    for fi in &f_list[..k] {
        g_p = zpoly::mul(p, &g_p, fi);
    }
    let mut h_p: ZPoly = vec![1];
    for fi in &f_list[k..] {
        h_p = zpoly::mul(p, &h_p, fi);
    }
    let (one, s_p, t_p) = zpoly::xgcd(p, &g_p, &h_p);
    debug_assert_eq!(one, vec![1]);
    let mut g = zpoly_to_ipoly(&g_p);
    let mut h = zpoly_to_ipoly(&h_p);
    let mut s = zpoly_to_ipoly(&s_p);
    let mut t = zpoly_to_ipoly(&t_p);
    let mut m = BigInt::from(p);
    for _ in 0..steps {
        let (g1, h1, s1, t1) = hensel_step(&m, f, &g, &h, &s, &t);
        g = g1;
        h = h1;
        s = s1;
        t = t1;
        m = &m * &m;
    }
    let mut out = hensel_lift(p, &g, &f_list[..k], l);
    out.extend(hensel_lift(p, &h, &f_list[k..], l));
    out
}

fn ipoly_content(a: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in a {
        g = g.gcd(c);
    }
    g
}

fn primitive_part(a: &[BigInt]) -> IPoly {
    if a.is_empty() {
        return vec![];
    }
    let mut g = ipoly_content(a);
    if a.last().unwrap().is_negative() {
        g = -g;
    }
    a.iter().map(|c| c / &g).collect()
}

fn ipoly_to_poly(a: &[BigInt]) -> Poly {
    Poly::new(
        a.iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect(),
    )
}

/// Does the primitive integer polynomial g divide the integer polynomial f?
/// Returns the quotient when it does (integral by Gauss's lemma).
fn try_divide(f: &[BigInt], g: &[BigInt]) -> Option<IPoly> {
    let fq = ipoly_to_poly(f);
    let gq = ipoly_to_poly(g);
    let (q, r) = fq.divrem(&gq).ok()?;
    if !r.is_zero() {
        return None;
    }
    let mut out = Vec::with_capacity(q.coeffs().len());
    for c in q.coeffs() {
        if !c.denom().is_one() {
            return None;
        }
        out.push(c.numer().clone());
    }
    Some(out)
}

/// Mignotte-style bound: any factor of f has coefficients bounded by
/// sqrt(n+1) * 2^n * max|c_i| * |lc|.
fn coeff_bound(f: &[BigInt]) -> BigInt {
    let n = ideg(f);
    let a = f.iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::one);
    let lc = f.last().unwrap().abs();
    let root = BigInt::from(n as u64 + 1).sqrt() + 1;
    root * (BigInt::one() << n) * a * lc
}

/// Factor a primitive squarefree integer polynomial of degree >= 1 into
/// primitive irreducible integer polynomials (positive leading coefficients).
fn zassenhaus(f: &[BigInt]) -> Result<Vec<IPoly>> {
    let n = ideg(f);
    if n == 1 {
        return Ok(vec![f.to_vec()]);
    }
    let lc = f.last().unwrap().clone();

    // deterministic source for the equal-degree splitting
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1f7);

    const PRIMES: [u64; 25] = [
        3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
        97, 101,
    ];
    let mut best: Option<(u64, Vec<ZPoly>)> = None;
    let mut tried = 0;
    for &p in PRIMES.iter() {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = ipoly_to_zpoly(f, p);
        if zpoly::deg(&fp) != n {
            continue;
        }
        let dfp = zpoly::derivative(p, &fp);
        if zpoly::deg(&zpoly::gcd(p, &fp, &dfp)) != 0 {
            continue; // not squarefree mod p
        }
        let factors = zpoly::factor_squarefree_modp(p, &zpoly::monic(p, &fp), &mut rng);
        let better = match &best {
            None => true,
            Some((_, fs)) => factors.len() < fs.len(),
        };
        if better {
            best = Some((p, factors));
        }
        tried += 1;
        if tried >= 4 || best.as_ref().map(|(_, fs)| fs.len()) == Some(1) {
            break;
        }
    }
    let (p, modular) = best.ok_or_else(|| {
        Error::math("no usable prime found for modular factorization (degenerate input?)")
    })?;
    if modular.len() == 1 {
        return Ok(vec![primitive_part(f)]);
    }

    let bound = coeff_bound(f);
    let two_b = BigInt::from(2) * &bound;
    let mut l = 1u32;
    let mut pl = BigInt::from(p);
    while pl <= two_b {
        pl *= BigInt::from(p);
        l += 1;
    }
    let lifted = hensel_lift(p, f, &modular, l);
    let pl = BigInt::from(p).pow(l);

    // subset recombination against the remaining cofactor
    let mut remaining: Vec<IPoly> = lifted;
    let mut f_rem: IPoly = f.to_vec();
    let mut out = Vec::new();
    let mut s = 1usize;
    while 2 * s <= remaining.len() {
        let mut found = None;
        let idx: Vec<usize> = (0..remaining.len()).collect();
        'subsets: for combo in combinations(&idx, s) {
            let lc_rem = f_rem.last().unwrap();
            let mut cand: IPoly = vec![lc_rem.clone()];
            for &i in &combo {
                cand = itrunc(&imul(&cand, &remaining[i]), &pl);
            }
            let cand = itrunc_symmetric(&cand, &pl);
            let cand = primitive_part(&cand);
            if cand.is_empty() || ideg(&cand) == 0 {
                continue;
            }
            if let Some(q) = try_divide(&f_rem, &cand) {
                found = Some((combo, cand, q));
                break 'subsets;
            }
        }
        match found {
            Some((combo, cand, q)) => {
                out.push(cand);
                f_rem = primitive_part(&q);
                let keep: Vec<IPoly> = remaining
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !combo.contains(i))
                    .map(|(_, g)| g.clone())
                    .collect();
                remaining = keep;
            }
            None => s += 1,
        }
    }
    if ideg(&f_rem) >= 1 {
        out.push(primitive_part(&f_rem));
    }
    Ok(out)
}

/// Iterator over all size-k index subsets, lexicographic.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Yun's squarefree decomposition of a monic polynomial over Q:
/// f = prod part_i ^ i with the parts pairwise coprime and squarefree.
pub fn squarefree_decomposition(f: &Poly) -> Result<Vec<(Poly, u32)>> {
    if f.is_zero() {
        return Err(Error::math("squarefree decomposition of zero"));
    }
    let f = f.monic();
    if f.is_constant() {
        return Ok(vec![]);
    }
    let df = f.derivative();
    let g = f.gcd(&df);
    if g.is_one() {
        return Ok(vec![(f, 1)]);
    }
    let mut out = Vec::new();
    let mut b = f.div_exact(&g)?;
    let mut d = &f.derivative().div_exact(&g)? - &b.derivative();
    let mut i = 1u32;
    while !b.is_constant() {
        let a = b.gcd(&d);
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a)?;
        d = &d.div_exact(&a)? - &b.derivative();
        i += 1;
    }
    Ok(out)
}

/// Factor a nonzero polynomial over Q: returns the leading coefficient and
/// the monic irreducible factors with multiplicities, so that
/// `constant * prod factor^mult` reconstructs the input exactly.
pub fn poly_factor(f: &Poly) -> Result<(BigRational, Vec<(Poly, u32)>)> {
    if f.is_zero() {
        return Err(Error::math("cannot factor the zero polynomial"));
    }
    let constant = f.leading_coeff();
    let mut work = f.monic();
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    if work.is_constant() {
        return Ok((constant, factors));
    }

    // split off the t^k part so the squarefree machinery sees a nonzero
    // constant term
    let k = work
        .coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero");
    if k > 0 {
        let (q, _) = work.divrem(&Poly::var().pow(k as u32))?;
        work = q;
        factors.push((Poly::var(), k as u32));
    }

    for (part, mult) in squarefree_decomposition(&work)? {
        let (_, prim) = part.content_primitive();
        let irreducibles = zassenhaus(&prim)?;
        for g in irreducibles {
            factors.push((ipoly_to_poly(&g).monic(), mult));
        }
    }
    factors.sort_by_key(|(g, _)| (g.deg(), g.to_string()));

    #[cfg(debug_assertions)]
    {
        let mut back = Poly::constant(constant.clone());
        for (g, m) in &factors {
            back = &back * &g.pow(*m);
        }
        debug_assert_eq!(&back, f, "factorization must reconstruct the input");
    }
    Ok((constant, factors))
}

/// True when f is irreducible over Q (degree >= 1).
pub fn is_irreducible(f: &Poly) -> Result<bool> {
    if f.is_zero() || f.is_constant() {
        return Ok(false);
    }
    let (_, factors) = poly_factor(f)?;
    Ok(factors.len() == 1 && factors[0].1 == 1)
}
