//! Rule-based construction of the ramification tree above a fixed place of
//! multiplicative reduction, with per-level type counts, ramification-divisor
//! degrees, rho lower bounds, and the Riemann-Hurwitz genus bounds.
//!
//! Nodes are kept compressed: a node stores the invariant
//! `state_e = min(ord_l(a), n)` of its exponent class together with a
//! multiplicity, since nodes sharing `(level, state_e)` branch identically.
//! The expansion of the compressed tree is checked against the explicit
//! orbit enumeration in `tateoracle` over the whole test grid.

use num::{BigInt, BigRational};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exactalg::intfactor::is_prime_u64;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum NodeType {
    A,
    B(u32),
    C,
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeType::A => write!(f, "A"),
            NodeType::B(r) => write!(f, "B{r}"),
            NodeType::C => write!(f, "C"),
        }
    }
}

/// Type of a node at `level` with compressed state `e = min(ord_l(a), level)`.
pub fn node_type_for(level: u32, state_e: u32, m: u32) -> NodeType {
    if level < m {
        NodeType::A
    } else if state_e + m >= level {
        NodeType::B((state_e + m - level).min(m))
    } else {
        NodeType::C
    }
}

#[derive(Clone, Debug)]
pub struct RamNode {
    pub level: u32,
    /// min(ord_l(a), level) for the underlying exponent class a in Z/l^level.
    pub state_e: u32,
    pub node_type: NodeType,
    /// Ramification index of the edge to the parent (1 for the root).
    pub weight_from_parent: u64,
    /// Number of identical orbit-nodes sharing this state.
    pub multiplicity: u128,
    pub children: Vec<RamNode>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSummary {
    pub n: u32,
    pub counts: BTreeMap<String, u128>,
    pub ram_degree: u128,
    /// ram_degree / l^2, the v-local lower bound for rho at this level.
    pub rho_lower: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeSummary {
    pub ell: u64,
    pub m: u32,
    pub depth: u32,
    pub levels: Vec<LevelSummary>,
}

impl TreeSummary {
    pub fn level(&self, n: u32) -> Result<&LevelSummary> {
        self.levels
            .iter()
            .find(|l| l.n == n)
            .ok_or_else(|| Error::math(format!("level {n} not present in summary")))
    }

    pub fn rho_lower_at(&self, n: u32) -> Result<BigRational> {
        let lvl = self.level(n)?;
        Ok(BigRational::new(
            BigInt::from(lvl.ram_degree),
            BigInt::from(self.ell * self.ell),
        ))
    }
}

/// Child generation rule in compressed form: from a node at `level` with
/// state `e`, the children are groups (state_e', weight, count).
///
/// Derivation from the exponent model: a child lifts a to a' in Z/l^(n+1),
/// and its orbit size is l^s' with s' = max(0, n+1 - m - min(ord_l(a'), n+1)).
/// Lifting a = 0 gives one a' = 0 (state n+1) and l-1 lifts of exact order n;
/// lifting a != 0 preserves ord_l(a). Weights are quotients of orbit sizes.
fn child_groups(ell: u64, m: u32, level: u32, e: u32) -> Vec<(u32, u64, u64)> {
    let n = level;
    if e == n {
        // a = 0 in Z/l^n
        let mut out = vec![(n + 1, 1, ell)];
        if m == 0 {
            // fresh order-n lifts pick up the full l-cycle: one orbit each
            out.push((n, ell, ell - 1));
        } else {
            // q is already an l-th power, so the lifts stay rational
            out.push((n, 1, (ell - 1) * ell));
        }
        out
    } else if e as i64 <= n as i64 - m as i64 {
        // orbit grows by a factor of l: each lift is one ramified child
        vec![(e, ell, ell)]
    } else {
        // orbit size is pinned at 1 on both levels: l^2 unramified children
        vec![(e, 1, ell * ell)]
    }
}

struct TreeBuilder<'a> {
    ell: u64,
    m: u32,
    depth: u32,
    spent: u128,
    budget: &'a Budget,
}

impl TreeBuilder<'_> {
    fn build(&mut self, level: u32, e: u32, weight: u64, multiplicity: u128) -> Result<RamNode> {
        self.spent += multiplicity;
        if self.spent > self.budget.limit() as u128 {
            return Err(Error::budget(format!(
                "ramification tree for ell={}, m={}, depth={} exceeds {} expanded nodes",
                self.ell,
                self.m,
                self.depth,
                self.budget.limit()
            )));
        }
        let mut children = Vec::new();
        if level < self.depth {
            for (e2, w, count) in child_groups(self.ell, self.m, level, e) {
                children.push(self.build(level + 1, e2, w, multiplicity * count as u128)?);
            }
        }
        Ok(RamNode {
            level,
            state_e: e,
            node_type: node_type_for(level, e, self.m),
            weight_from_parent: weight,
            multiplicity,
            children,
        })
    }
}

fn summarize(ell: u64, m: u32, depth: u32, root: &RamNode) -> TreeSummary {
    let mut counts: Vec<BTreeMap<String, u128>> = vec![BTreeMap::new(); depth as usize + 1];
    let mut ram: Vec<u128> = vec![0; depth as usize + 1];
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        let lvl = node.level as usize;
        *counts[lvl].entry(node.node_type.to_string()).or_insert(0) += node.multiplicity;
        if node.level > 0 {
            ram[lvl] += (node.weight_from_parent as u128 - 1) * node.multiplicity;
        }
        stack.extend(node.children.iter());
    }
    let ell2 = BigInt::from(ell * ell);
    let levels = (0..=depth)
        .map(|n| LevelSummary {
            n,
            counts: std::mem::take(&mut counts[n as usize]),
            ram_degree: ram[n as usize],
            rho_lower: crate::exactalg::rational_to_string(&BigRational::new(
                BigInt::from(ram[n as usize]),
                ell2.clone(),
            )),
        })
        .collect();
    TreeSummary {
        ell,
        m,
        depth,
        levels,
    }
}

/// Build the ramification tree for an odd prime `ell`, tree parameter
/// `m = ord_l(v(q))`, down to `depth` levels.
pub fn build_tree(ell: u64, m: u32, depth: u32, budget: &Budget) -> Result<(RamNode, TreeSummary)> {
    if ell < 3 || ell.is_multiple_of(2) || !is_prime_u64(ell) {
        return Err(Error::math(format!("ell must be an odd prime, got {ell}")));
    }
    if depth < 1 {
        return Err(Error::math("depth must be at least 1"));
    }
    let mut builder = TreeBuilder {
        ell,
        m,
        depth,
        spent: 0,
        budget,
    };
    let root = builder.build(0, 0, 1, 1)?;
    let summary = summarize(ell, m, depth, &root);
    Ok((root, summary))
}

/// The exact v-local ramification-divisor degree at a level of the summary.
pub fn ram_degree(summary: &TreeSummary, level: u32) -> Result<u128> {
    if level < 1 || level > summary.depth {
        return Err(Error::math(format!(
            "level {level} out of range 1..={}",
            summary.depth
        )));
    }
    Ok(summary.level(level)?.ram_degree)
}

/// rho(phi_n) >= l^(n-n0) (l-1) / l^2 for n > n0.
pub fn rho_lower(ell: u64, n0: u32, n: u32) -> Result<BigRational> {
    if n <= n0 {
        return Err(Error::math(format!(
            "rho lower bound needs n > n0, got n={n}, n0={n0}"
        )));
    }
    let num = BigInt::from(ell).pow(n - n0) * BigInt::from(ell - 1);
    Ok(BigRational::new(num, BigInt::from(ell * ell)))
}

fn ceil_div(a: i128, b: i128) -> i128 {
    let q = a.div_euclid(b);
    if a.rem_euclid(b) != 0 {
        q + 1
    } else {
        q
    }
}

/// Smallest integer g with 2g - 2 >= map_degree (2 g_base - 2) + ram_lower.
pub fn hurwitz_bound(g_base: i64, map_degree: u64, ram_degree_lower: u64) -> i64 {
    let rhs = map_degree as i128 * (2 * g_base as i128 - 2) + ram_degree_lower as i128 + 2;
    ceil_div(rhs, 2) as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenusBounds {
    /// Lower bound for the genus of the first preimage curve from N poles.
    pub gamma1: i64,
    /// Lower bound for the genus of the second preimage curve (base P^1).
    pub gamma2: i64,
    /// Lower bound for the genus of the nontrivial component of the
    /// l-torsion curve, from N poles.
    pub torsion_curve: i64,
    /// First-preimage bound when the base curve has genus >= 1. The stated
    /// threshold >= 3 holds for l >= 3; at l = 2 the formula gives 3/2.
    pub gamma1_genus1: i64,
}

/// The four genus lower bounds for an odd prime `ell` and `n_poles` distinct
/// geometric poles of the j-invariant.
pub fn genus_bounds(ell: u64, n_poles: u64, _base_genus: i64) -> GenusBounds {
    let l = ell as i128;
    let n = n_poles as i128;
    let lm1sq = (l - 1) * (l - 1);
    GenusBounds {
        gamma1: ceil_div(2 - 2 * l * l + n * lm1sq, 2) as i64,
        gamma2: (l * l * l - 3 * l * l + l + 1) as i64,
        torsion_curve: ceil_div(4 - 2 * l * l + n * lm1sq, 2) as i64,
        gamma1_genus1: ceil_div(2 + lm1sq, 2) as i64,
    }
}

/// GraphViz dump of the compressed tree, for eyeballing small cases.
pub fn tree_to_dot(root: &RamNode) -> String {
    fn walk(node: &RamNode, id: &mut usize, out: &mut String) -> usize {
        let me = *id;
        *id += 1;
        out.push_str(&format!(
            "  n{me} [label=\"{} x{} (e={})\"];\n",
            node.node_type, node.multiplicity, node.state_e
        ));
        for child in &node.children {
            let c = walk(child, id, out);
            out.push_str(&format!(
                "  n{me} -> n{c} [label=\"w={}\"];\n",
                child.weight_from_parent
            ));
        }
        me
    }
    let mut out = String::from("digraph ramtree {\n  rankdir=BT;\n");
    let mut id = 0;
    walk(root, &mut id, &mut out);
    out.push_str("}\n");
    out
}

/// Canonical form of the compressed tree as a weighted typed tree, with
/// multiplicities; two trees are isomorphic iff their canonical forms match.
pub fn canonical_form(root: &RamNode) -> String {
    fn canon(node: &RamNode) -> String {
        let mut kids: BTreeMap<String, u128> = BTreeMap::new();
        for c in &node.children {
            let key = canon(c);
            *kids.entry(key).or_insert(0) += c.multiplicity / node.multiplicity.max(1);
        }
        let inner: Vec<String> = kids
            .into_iter()
            .map(|(k, count)| format!("{count}x{k}"))
            .collect();
        format!(
            "{}:{}[{}]",
            node.node_type,
            node.weight_from_parent,
            inner.join(",")
        )
    }
    canon(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts_at(summary: &TreeSummary, n: u32) -> &BTreeMap<String, u128> {
        &summary.level(n).unwrap().counts
    }

    #[test]
    fn rule_2a_level_one() {
        let (_, s) = build_tree(3, 0, 1, &Budget::default()).unwrap();
        let c = counts_at(&s, 1);
        assert_eq!(c.get("B0"), Some(&3));
        assert_eq!(c.get("C"), Some(&2));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn level_m_census_small() {
        // l=3, m=1, depth 1: 3 B1 and 6 B0 nodes, all weight 1
        let (root, s) = build_tree(3, 1, 1, &Budget::default()).unwrap();
        let c = counts_at(&s, 1);
        assert_eq!(c.get("B1"), Some(&3));
        assert_eq!(c.get("B0"), Some(&6));
        for child in &root.children {
            assert_eq!(child.weight_from_parent, 1);
        }
        assert_eq!(ram_degree(&s, 1).unwrap(), 0);
    }

    #[test]
    fn level_two_c_count_and_ram_degree() {
        // oracle-checked: 12 weight-3 C nodes at level 2, ram degree 24
        let (_, s) = build_tree(3, 0, 2, &Budget::default()).unwrap();
        let c = counts_at(&s, 2);
        assert_eq!(c.get("C"), Some(&12));
        assert_eq!(c.get("B0"), Some(&9));
        assert_eq!(ram_degree(&s, 2).unwrap(), 24);
    }

    #[test]
    fn ram_degree_closed_form_m0() {
        // oracle-checked closed form for l=3, m=0: 4 n 3^(n-1)
        let (_, s) = build_tree(3, 0, 4, &Budget::default()).unwrap();
        for n in 1..=4u32 {
            let expect = 4 * n as u128 * 3u128.pow(n - 1);
            assert_eq!(ram_degree(&s, n).unwrap(), expect, "level {n}");
        }
    }

    #[test]
    fn weight_conservation() {
        for (ell, m) in [(3u64, 0u32), (3, 1), (3, 2), (5, 0), (5, 1)] {
            let (root, _) = build_tree(ell, m, 3, &Budget::default()).unwrap();
            fn check(node: &RamNode, ell: u64) {
                if !node.children.is_empty() {
                    let total: u128 = node
                        .children
                        .iter()
                        .map(|c| c.weight_from_parent as u128 * c.multiplicity)
                        .sum();
                    assert_eq!(total, (ell * ell) as u128 * node.multiplicity);
                }
                for c in &node.children {
                    check(c, ell);
                }
            }
            check(&root, ell);
        }
    }

    #[test]
    fn type_transition_closure() {
        // no A below level m-1; C children are all C; B(r>=1) with r<m
        // children are exactly B(r-1)
        let (root, _) = build_tree(3, 2, 4, &Budget::default()).unwrap();
        fn check(node: &RamNode, m: u32) {
            if node.level >= m {
                assert_ne!(node.node_type, NodeType::A);
            }
            if node.node_type == NodeType::C {
                for c in &node.children {
                    assert_eq!(c.node_type, NodeType::C);
                }
            }
            if let NodeType::B(r) = node.node_type {
                if r >= 1 && r < m {
                    for c in &node.children {
                        assert_eq!(c.node_type, NodeType::B(r - 1));
                    }
                }
            }
            for c in &node.children {
                check(c, m);
            }
        }
        check(&root, 2);
    }

    #[test]
    fn ram_degree_eventually_multiplies_by_ell() {
        for (ell, m) in [(3u64, 0u32), (3, 1), (5, 0)] {
            let (_, s) = build_tree(ell, m, 4, &Budget::default()).unwrap();
            for n in (m + 1)..4 {
                let here = ram_degree(&s, n).unwrap();
                let next = ram_degree(&s, n + 1).unwrap();
                assert!(
                    next >= ell as u128 * here,
                    "ell={ell} m={m} n={n}: {next} < {ell}*{here}"
                );
            }
        }
    }

    #[test]
    fn ram_degree_divisible_by_ell_minus_one() {
        for (ell, m) in [(3u64, 0u32), (3, 2), (5, 1)] {
            let (_, s) = build_tree(ell, m, 3, &Budget::default()).unwrap();
            for n in 1..=3 {
                assert_eq!(ram_degree(&s, n).unwrap() % (ell as u128 - 1), 0);
            }
        }
    }

    #[test]
    fn rho_lower_values() {
        assert_eq!(
            rho_lower(3, 0, 2).unwrap(),
            BigRational::from_integer(2.into())
        );
        assert_eq!(
            rho_lower(3, 1, 2).unwrap(),
            BigRational::new(2.into(), 3.into())
        );
        assert_eq!(
            rho_lower(5, 0, 1).unwrap(),
            BigRational::new(4.into(), 5.into())
        );
        assert!(rho_lower(3, 2, 2).is_err());
    }

    #[test]
    fn hurwitz_examples() {
        assert_eq!(hurwitz_bound(0, 9, 24), 4);
        assert_eq!(hurwitz_bound(1, 9, 0), 1);
        assert_eq!(hurwitz_bound(0, 8, 20), 3);
    }

    #[test]
    fn genus_table() {
        assert_eq!(genus_bounds(3, 1, 0).gamma2, 4);
        let g35 = genus_bounds(3, 5, 0);
        assert_eq!(g35.gamma1, 2);
        assert_eq!(g35.torsion_curve, 3);
        assert_eq!(genus_bounds(5, 4, 0).gamma1, 8);
        assert_eq!(genus_bounds(7, 3, 0).gamma1, 6);
        assert_eq!(genus_bounds(3, 5, 1).gamma1_genus1, 3);
    }

    #[test]
    fn rejects_bad_ell_and_budget() {
        assert!(build_tree(2, 0, 1, &Budget::default()).is_err());
        assert!(build_tree(9, 0, 1, &Budget::default()).is_err());
        assert!(build_tree(4, 0, 1, &Budget::default()).is_err());
        let tiny = Budget::new(10);
        assert!(matches!(build_tree(3, 0, 3, &tiny), Err(Error::Budget(_))));
    }

    #[test]
    fn root_type_by_m() {
        let (root, _) = build_tree(3, 0, 1, &Budget::default()).unwrap();
        assert_eq!(root.node_type, NodeType::B(0));
        let (root, _) = build_tree(3, 2, 1, &Budget::default()).unwrap();
        assert_eq!(root.node_type, NodeType::A);
    }

    #[test]
    fn summary_json_schema() {
        let (_, s) = build_tree(3, 0, 2, &Budget::default()).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["ell"], 3);
        assert_eq!(v["m"], 0);
        assert_eq!(v["levels"][1]["counts"]["B0"], 3);
        assert_eq!(v["levels"][1]["counts"]["C"], 2);
        assert_eq!(v["levels"][1]["ram_degree"], 4);
    }
}
