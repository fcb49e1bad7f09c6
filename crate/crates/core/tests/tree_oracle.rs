//! Cross-checks between the rule-based ramification tree and the explicit
//! orbit enumeration: the two constructions must produce isomorphic weighted
//! typed trees on the whole grid, with matching summaries.

use divhull::budget::Budget;
use divhull::ramtree;
use divhull::tateoracle;

fn grid() -> Vec<(u64, u32, u32)> {
    let mut out = Vec::new();
    for m in 0..=2u32 {
        out.push((3u64, m, 4u32));
        out.push((5u64, m, 3u32));
    }
    out
}

#[test]
fn tree_and_oracle_are_isomorphic_on_grid() {
    let budget = Budget::default();
    for (ell, m, depth) in grid() {
        let (rule_root, _) = ramtree::build_tree(ell, m, depth, &budget).unwrap();
        let (oracle_root, _) = tateoracle::oracle_tree(ell, m, depth, &budget).unwrap();
        assert_eq!(
            ramtree::canonical_form(&rule_root),
            tateoracle::canonical_form(&oracle_root),
            "ell={ell} m={m} depth={depth}"
        );
    }
}

#[test]
fn summaries_agree_on_grid() {
    let budget = Budget::default();
    for (ell, m, depth) in grid() {
        let (_, rule_summary) = ramtree::build_tree(ell, m, depth, &budget).unwrap();
        let (_, oracle_summary) = tateoracle::oracle_tree(ell, m, depth, &budget).unwrap();
        let a = serde_json::to_value(&rule_summary).unwrap();
        let b = serde_json::to_value(&oracle_summary).unwrap();
        assert_eq!(a, b, "ell={ell} m={m} depth={depth}");
    }
}

#[test]
fn level_m_census_matches_totient_formula() {
    fn phi_of_prime_power(ell: u64, k: u32) -> u128 {
        if k == 0 {
            1
        } else {
            (ell as u128 - 1) * (ell as u128).pow(k - 1)
        }
    }
    let budget = Budget::default();
    for (ell, m, depth) in grid() {
        if m == 0 || m > depth {
            continue;
        }
        let (_, summary) = ramtree::build_tree(ell, m, depth, &budget).unwrap();
        let counts = &summary.level(m).unwrap().counts;
        let mut total = 0u128;
        for r in 0..=m {
            let expect = (ell as u128).pow(m) * phi_of_prime_power(ell, m - r);
            assert_eq!(
                counts.get(&format!("B{r}")).copied().unwrap_or(0),
                expect,
                "ell={ell} m={m} r={r}"
            );
            total += expect;
        }
        assert_eq!(total, (ell as u128).pow(2 * m));
    }
}

#[test]
fn enumerate_orbits_matches_level_nodes_of_tree() {
    // the level-2 orbit multiset equals the level-2 node multiset of the tree
    let budget = Budget::default();
    let orbits = tateoracle::enumerate_orbits(3, 2, 0, &budget).unwrap();
    let (_, summary) = ramtree::build_tree(3, 0, 2, &budget).unwrap();
    let node_total: u128 = summary.level(2).unwrap().counts.values().sum();
    assert_eq!(orbits.len() as u128, node_total);
}
