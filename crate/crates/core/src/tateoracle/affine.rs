//! Orbit counting for the affine action (a, b) -> M (a, b) + v on the
//! preimage classes (Z/l^n)^2, by union-find closure over the generating
//! set: the two elementary matrices and the two coordinate translations,
//! scaled by the congruence level.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exactalg::intfactor::is_prime_u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// Translations (Z/l^n)^2 with all of SL2(Z/l^n).
    Full,
    /// Translations and elementary matrices scaled by l^N.
    Congruence(u32),
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, x: u32, y: u32) {
        let rx = self.find(x);
        let ry = self.find(y);
        if rx != ry {
            self.parent[ry as usize] = rx;
        }
    }

    fn count_roots(&mut self) -> u64 {
        let n = self.parent.len();
        let mut count = 0;
        for i in 0..n {
            if self.find(i as u32) == i as u32 {
                count += 1;
            }
        }
        count
    }
}

/// Number of orbits of the chosen group on the l^(2n) classes (a, b).
pub fn affine_orbit_count(ell: u64, n: u32, subgroup: Subgroup, budget: &Budget) -> Result<u64> {
    if !is_prime_u64(ell) {
        return Err(Error::math(format!("ell must be prime, got {ell}")));
    }
    if n < 1 {
        return Err(Error::math("level n must be at least 1"));
    }
    let ln = ell
        .checked_pow(n)
        .ok_or_else(|| Error::budget("l^n overflows"))?;
    let total = ln
        .checked_mul(ln)
        .ok_or_else(|| Error::budget("l^2n overflows"))?;
    budget.charge(total, "affine orbit enumeration")?;
    if total > u32::MAX as u64 {
        return Err(Error::budget("point set too large for union-find index"));
    }

    let scale = match subgroup {
        Subgroup::Full => 1u64,
        Subgroup::Congruence(level) => {
            if level >= n {
                0
            } else {
                ell.pow(level)
            }
        }
    };

    let idx = |a: u64, b: u64| (a * ln + b) as u32;
    let mut uf = UnionFind::new(total as usize);
    for a in 0..ln {
        for b in 0..ln {
            let i = idx(a, b);
            // upper elementary: (a + s b, b); lower: (a, s a + b)
            uf.union(i, idx((a + scale * b) % ln, b));
            uf.union(i, idx(a, (scale * a + b) % ln));
            // translations by s e1, s e2
            uf.union(i, idx((a + scale) % ln, b));
            uf.union(i, idx(a, (b + scale) % ln));
        }
    }
    Ok(uf.count_roots())
}
