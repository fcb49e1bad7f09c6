//! Brute-force ground truth for the division-tower combinatorics: explicit
//! enumeration of preimage exponent pairs and their decomposition orbits,
//! an oracle ramification tree built from the enumeration alone, orbit
//! counting under the full affine semidirect-product action, and the
//! elementary-matrix identities in SL2 over truncated l-adic integers.

mod affine;
mod matrices;

pub use affine::{affine_orbit_count, Subgroup};
pub use matrices::{congruence_index, sl2_order, verify_matrix_identity, CongruenceIndex, Mat2};

use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exactalg::intfactor::is_prime_u64;
use crate::ramtree::{node_type_for, LevelSummary, NodeType, TreeSummary};

/// A preimage of the marked point at level n, indexed by the exponent pair
/// (a, b) in (Z/l^n)^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentPoint {
    pub n: u32,
    pub a: u64,
    pub b: u64,
}

/// A decomposition orbit: the points (a, b_rep + c * l^(n-s)) for c in Z/l^s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitClass {
    pub n: u32,
    pub a: u64,
    pub b_rep: u64,
    /// Orbit size is l^s.
    pub s: u32,
}

fn pow_u64(base: u64, e: u32) -> u64 {
    base.checked_pow(e).expect("power fits u64")
}

/// min(ord_l(a), cap) with a read as a residue mod l^cap.
fn ord_capped(ell: u64, a: u64, cap: u32) -> u32 {
    if a == 0 {
        return cap;
    }
    let mut a = a;
    let mut e = 0;
    while a.is_multiple_of(ell) && e < cap {
        a /= ell;
        e += 1;
    }
    e
}

/// Orbit-size exponent of (a, *) at level n: s = max(0, n - m - min(ord_l(a), n)).
pub fn orbit_exponent(ell: u64, n: u32, m: u32, a: u64) -> u32 {
    let e = ord_capped(ell, a, n);
    (n as i64 - m as i64 - e as i64).max(0) as u32
}

impl OrbitClass {
    pub fn size(&self, ell: u64) -> u64 {
        pow_u64(ell, self.s)
    }

    pub fn node_type(&self, ell: u64, m: u32) -> NodeType {
        let e = ord_capped(ell, self.a, self.n);
        node_type_for(self.n, e, m)
    }

    pub fn members(&self, ell: u64) -> Vec<ExponentPoint> {
        let step = pow_u64(ell, self.n - self.s);
        (0..self.size(ell))
            .map(|c| ExponentPoint {
                n: self.n,
                a: self.a,
                b: self.b_rep + c * step,
            })
            .collect()
    }
}

/// Partition all l^(2n) exponent points at level n into decomposition orbits,
/// sorted by (a, b_rep).
pub fn enumerate_orbits(ell: u64, n: u32, m: u32, budget: &Budget) -> Result<Vec<OrbitClass>> {
    if ell < 3 || !is_prime_u64(ell) {
        return Err(Error::math(format!("ell must be an odd prime, got {ell}")));
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
    budget.charge(total, "orbit enumeration")?;
    let mut out = Vec::new();
    for a in 0..ln {
        let s = orbit_exponent(ell, n, m, a);
        let reps = pow_u64(ell, n - s);
        for b_rep in 0..reps {
            out.push(OrbitClass { n, a, b_rep, s });
        }
    }
    Ok(out)
}

/// A node of the explicitly enumerated tree.
#[derive(Clone, Debug)]
pub struct OrbitNode {
    pub orbit: OrbitClass,
    pub node_type: NodeType,
    /// Ramification index of the edge to the parent (1 for the root).
    pub weight: u64,
    pub children: Vec<OrbitNode>,
}

/// Build the ramification tree by explicit orbit enumeration level by level:
/// a child orbit at level n+1 hangs under the level-n orbit its members
/// reduce into, with weight the ratio of orbit sizes.
pub fn oracle_tree(
    ell: u64,
    m: u32,
    depth: u32,
    budget: &Budget,
) -> Result<(OrbitNode, TreeSummary)> {
    if depth < 1 {
        return Err(Error::math("depth must be at least 1"));
    }
    let mut levels: Vec<Vec<OrbitClass>> = vec![vec![OrbitClass {
        n: 0,
        a: 0,
        b_rep: 0,
        s: 0,
    }]];
    for n in 1..=depth {
        levels.push(enumerate_orbits(ell, n, m, budget)?);
    }

    // children[level n][parent index] = indices into level n+1
    let mut children_of: Vec<Vec<Vec<usize>>> = Vec::new();
    for n in 0..depth {
        let ln = pow_u64(ell, n);
        let parents = &levels[n as usize];
        let kids = &levels[(n + 1) as usize];
        let mut index: HashMap<(u64, u64), usize> = HashMap::new();
        for (i, p) in parents.iter().enumerate() {
            index.insert((p.a, p.b_rep), i);
        }
        let mut out = vec![Vec::new(); parents.len()];
        for (j, k) in kids.iter().enumerate() {
            let pa = k.a % ln;
            let pb = k.b_rep % ln;
            let ps = orbit_exponent(ell, n, m, pa);
            let prep = pb % pow_u64(ell, n - ps);
            let pi = *index
                .get(&(pa, prep))
                .expect("child orbit reduces into an existing parent orbit");
            out[pi].push(j);
        }
        children_of.push(out);
    }

    fn assemble(
        ell: u64,
        m: u32,
        levels: &[Vec<OrbitClass>],
        children_of: &[Vec<Vec<usize>>],
        n: usize,
        idx: usize,
        weight: u64,
    ) -> OrbitNode {
        let orbit = levels[n][idx];
        let kids = if n < children_of.len() {
            children_of[n][idx]
                .iter()
                .map(|&j| {
                    let child = levels[n + 1][j];
                    let w = child.size(ell) / orbit.size(ell);
                    assemble(ell, m, levels, children_of, n + 1, j, w)
                })
                .collect()
        } else {
            Vec::new()
        };
        OrbitNode {
            orbit,
            node_type: orbit.node_type(ell, m),
            weight,
            children: kids,
        }
    }

    let root = assemble(ell, m, &levels, &children_of, 0, 0, 1);
    let summary = summarize_oracle(ell, m, depth, &levels, &root);
    Ok((root, summary))
}

fn summarize_oracle(
    ell: u64,
    m: u32,
    depth: u32,
    levels: &[Vec<OrbitClass>],
    root: &OrbitNode,
) -> TreeSummary {
    let mut ram: Vec<u128> = vec![0; depth as usize + 1];
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        if node.orbit.n > 0 {
            ram[node.orbit.n as usize] += node.weight as u128 - 1;
        }
        stack.extend(node.children.iter());
    }
    let level_summaries = (0..=depth)
        .map(|n| {
            let mut counts: BTreeMap<String, u128> = BTreeMap::new();
            for orbit in &levels[n as usize] {
                *counts
                    .entry(orbit.node_type(ell, m).to_string())
                    .or_insert(0) += 1;
            }
            LevelSummary {
                n,
                counts,
                ram_degree: ram[n as usize],
                rho_lower: crate::exactalg::rational_to_string(&num::BigRational::new(
                    num::BigInt::from(ram[n as usize]),
                    num::BigInt::from(ell * ell),
                )),
            }
        })
        .collect();
    TreeSummary {
        ell,
        m,
        depth,
        levels: level_summaries,
    }
}

/// Canonical form of the oracle tree as a weighted typed tree; comparable
/// with `ramtree::canonical_form` output.
pub fn canonical_form(root: &OrbitNode) -> String {
    fn canon(node: &OrbitNode) -> String {
        let mut kids: BTreeMap<String, u128> = BTreeMap::new();
        for c in &node.children {
            *kids.entry(canon(c)).or_insert(0) += 1;
        }
        let inner: Vec<String> = kids
            .into_iter()
            .map(|(k, count)| format!("{count}x{k}"))
            .collect();
        format!("{}:{}[{}]", node.node_type, node.weight, inner.join(","))
    }
    canon(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbits_level_one_m0() {
        let orbits = enumerate_orbits(3, 1, 0, &Budget::default()).unwrap();
        assert_eq!(orbits.len(), 5);
        let sizes: Vec<u64> = orbits.iter().map(|o| o.size(3)).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 1).count(), 3);
        assert_eq!(sizes.iter().filter(|&&s| s == 3).count(), 2);
        let total: u64 = sizes.iter().sum();
        assert_eq!(total, 9);
    }

    #[test]
    fn orbits_level_one_m1_all_singletons() {
        let orbits = enumerate_orbits(3, 1, 1, &Budget::default()).unwrap();
        assert_eq!(orbits.len(), 9);
        assert!(orbits.iter().all(|o| o.s == 0));
    }

    #[test]
    fn orbits_partition_exactly() {
        for (ell, n, m) in [(3u64, 2u32, 0u32), (3, 2, 1), (3, 3, 2), (5, 2, 1)] {
            let orbits = enumerate_orbits(ell, n, m, &Budget::default()).unwrap();
            let total: u64 = orbits.iter().map(|o| o.size(ell)).sum();
            assert_eq!(total, pow_u64(ell, 2 * n), "sizes sum to l^2n");
            let mut seen = std::collections::HashSet::new();
            for o in &orbits {
                for pt in o.members(ell) {
                    assert!(seen.insert((pt.a, pt.b)), "orbits must be disjoint");
                }
            }
            assert_eq!(seen.len() as u64, pow_u64(ell, 2 * n));
        }
    }

    #[test]
    fn level_two_orbit_census_m0() {
        // 9 singletons (a=0), 6 of size 3 (ord a = 1), 6 of size 9 (ord a = 0)
        let orbits = enumerate_orbits(3, 2, 0, &Budget::default()).unwrap();
        assert_eq!(orbits.len(), 21);
        let mut by_size: BTreeMap<u64, usize> = BTreeMap::new();
        for o in &orbits {
            *by_size.entry(o.size(3)).or_insert(0) += 1;
        }
        assert_eq!(by_size.get(&1), Some(&9));
        assert_eq!(by_size.get(&3), Some(&6));
        assert_eq!(by_size.get(&9), Some(&6));
    }

    #[test]
    fn oracle_matches_rule_tree_depth_one() {
        let budget = Budget::default();
        let (oracle_root, _) = oracle_tree(3, 0, 1, &budget).unwrap();
        let (rule_root, _) = crate::ramtree::build_tree(3, 0, 1, &budget).unwrap();
        assert_eq!(
            canonical_form(&oracle_root),
            crate::ramtree::canonical_form(&rule_root)
        );
    }

    #[test]
    fn oracle_level_m_census() {
        // at level m = 2: l^m phi(l^(m-r)) nodes of type B_r
        let (_, summary) = oracle_tree(3, 2, 2, &Budget::default()).unwrap();
        let counts = &summary.level(2).unwrap().counts;
        assert_eq!(counts.get("B2"), Some(&9)); // 9 * phi(1)
        assert_eq!(counts.get("B1"), Some(&18)); // 9 * phi(3)
        assert_eq!(counts.get("B0"), Some(&54)); // 9 * phi(9)
        assert_eq!(counts.values().sum::<u128>(), 81);
    }

    #[test]
    fn oracle_weights_above_b_m_nodes() {
        // l = 5, m = 1: every level-1 B1 node carries 5 weight-1 B1 children
        // and 20 weight-1 B0 children (the exponent model forces weight 1:
        // q is a 5th power, so order-25 lifts of a = 0 stay rational).
        let (root, _) = oracle_tree(5, 1, 2, &Budget::default()).unwrap();
        for child in &root.children {
            if child.node_type == NodeType::B(1) {
                assert_eq!(child.children.len(), 25);
                let b1 = child
                    .children
                    .iter()
                    .filter(|c| c.node_type == NodeType::B(1))
                    .count();
                let b0 = child
                    .children
                    .iter()
                    .filter(|c| c.node_type == NodeType::B(0))
                    .count();
                assert_eq!(b1, 5);
                assert_eq!(b0, 20);
                assert!(child.children.iter().all(|c| c.weight == 1));
            }
        }
    }

    #[test]
    fn budget_enforced() {
        let tiny = Budget::new(8);
        assert!(matches!(
            enumerate_orbits(3, 2, 0, &tiny),
            Err(Error::Budget(_))
        ));
    }
}
