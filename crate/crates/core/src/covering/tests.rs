use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::*;
use crate::group::{FiniteSubset, GroupContext, GroupElement};

fn z(x: i64) -> GroupElement {
    GroupElement::Zd(vec![x])
}

fn z1() -> Arc<GroupContext> {
    Arc::new(GroupContext::zd(1))
}

fn heis() -> Arc<GroupContext> {
    Arc::new(GroupContext::heisenberg())
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn fam(ctx: &Arc<GroupContext>, members: &[(u64, GroupElement)]) -> TranslateFamily {
    let ms = members.iter().map(|(r, c)| Member::new(*r, c.clone())).collect();
    TranslateFamily::balls(ctx.clone(), ms).unwrap()
}

#[test]
fn overlapping_intervals_have_multiplicity_two() {
    let f = fam(&z1(), &[(1, z(0)), (1, z(1))]);
    let rep = multiplicity(&f).unwrap();
    assert_eq!(rep.multiplicity, 2);
    // Both 0 and 1 are doubly covered; the canonical tie-break picks 0.
    assert_eq!(rep.witness, z(0));
    assert_eq!(multiplicity_at(&f, &z(0)).unwrap(), 2);
    assert_eq!(multiplicity_at(&f, &z(7)).unwrap(), 0);
    let hist = rep.histogram.unwrap();
    assert_eq!(hist.values().copied().max(), Some(2));
}

#[test]
fn single_member_has_multiplicity_one() {
    let f = fam(&heis(), &[(3, GroupElement::heis(1, 2, 3))]);
    assert_eq!(multiplicity(&f).unwrap().multiplicity, 1);
    assert_eq!(is_incremental(&f).unwrap(), None);
}

#[test]
fn incremental_examples_on_the_line() {
    let ctx = z1();
    let bad = fam(&ctx, &[(2, z(0)), (1, z(1))]);
    assert_eq!(is_incremental(&bad).unwrap(), Some(Violation::CenterCovered { j: 2, i: 1 }));
    let good = fam(&ctx, &[(2, z(0)), (2, z(5)), (1, z(10))]);
    assert_eq!(is_incremental(&good).unwrap(), None);
    let grow = fam(&ctx, &[(1, z(0)), (2, z(10))]);
    assert_eq!(is_incremental(&grow).unwrap(), Some(Violation::RadiusIncrease { j: 2, i: 1 }));
}

#[test]
fn greedy_keeps_every_other_center() {
    let ctx = z1();
    let f = fam(&ctx, &[(1, z(0)), (1, z(1)), (1, z(2)), (1, z(3))]);
    let seq = greedy_incremental(&f).unwrap();
    let centers: Vec<_> = seq.members().iter().map(|m| m.center.clone()).collect();
    assert_eq!(centers, vec![z(0), z(2)]);
}

#[test]
fn greedy_keeps_far_apart_centers() {
    let ctx = z1();
    let f = fam(&ctx, &[(2, z(0)), (2, z(10)), (2, z(20))]);
    assert_eq!(greedy_incremental(&f).unwrap().len(), 3);
    let single = fam(&ctx, &[(4, z(3))]);
    assert_eq!(greedy_incremental(&single).unwrap().len(), 1);
}

#[test]
fn greedy_rejects_bad_input() {
    let ctx = z1();
    let unsorted = fam(&ctx, &[(1, z(0)), (2, z(5))]);
    assert!(matches!(greedy_incremental(&unsorted), Err(crate::Error::Precondition(_))));
    // An explicit set without the identity.
    let mut sets = BTreeMap::new();
    sets.insert(0, [z(1)].into_iter().collect::<FiniteSubset>());
    let f = TranslateFamily::new(ctx, SetProvider::Explicit(sets), vec![Member::new(0, z(0))]).unwrap();
    assert!(matches!(greedy_incremental(&f), Err(crate::Error::Precondition(_))));
}

/// Brute force over all center choices in a window, independent of the DFS.
fn line_witness_exists(r: i64, k: usize) -> bool {
    fn rec(chosen: &mut Vec<i64>, r: i64, k: usize, next: i64) -> bool {
        if chosen.len() == k {
            return true;
        }
        for c in next..=r {
            if chosen.iter().all(|&p| (c - p).abs() > r) {
                chosen.push(c);
                if rec(chosen, r, k, c + 1) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    rec(&mut Vec::new(), r, k, -r)
}

#[test]
fn witness_search_on_the_line() {
    let ctx = z1();
    for r in 1..6u64 {
        let three = incremental_witness_search(&ctx, &[r], 3, 1_000_000).unwrap();
        assert!(matches!(three, SearchOutcome::Exhausted { complete: true, .. }));
        assert!(!line_witness_exists(r as i64, 3));
        let two = incremental_witness_search(&ctx, &[r], 2, 1_000_000).unwrap();
        assert_eq!(two.found().is_some(), line_witness_exists(r as i64, 2));
    }
    let one = incremental_witness_search(&ctx, &[2], 1, 10).unwrap();
    assert_eq!(one.found().unwrap().len(), 1);
}

#[test]
fn witness_search_budget_is_reported() {
    let out = incremental_witness_search(&heis(), &[3], 12, 5).unwrap();
    assert!(matches!(out, SearchOutcome::Exhausted { complete: false, .. }));
}

#[test]
fn witness_search_heisenberg_three() {
    let ctx = heis();
    let seq = incremental_witness_search(&ctx, &[2, 1], 3, 100_000).unwrap();
    let seq = seq.found().unwrap();
    assert_eq!(multiplicity_at(seq.family(), &ctx.identity()).unwrap(), 3);
}

#[test]
fn heisenberg_incremental_small_k() {
    let ctx = heis();
    for k in 1..=4 {
        let out = heisenberg_incremental(&ctx, k, RecipeBudget::default()).unwrap();
        let seq = &out.sequence;
        assert_eq!(seq.len(), k);
        assert_eq!(is_incremental(seq.family()).unwrap(), None);
        assert_eq!(multiplicity_at(seq.family(), &ctx.identity()).unwrap(), k);
        assert_eq!(multiplicity(seq.family()).unwrap().multiplicity, k);
        assert_eq!(out.recipe.verified, k == 1);
    }
}

#[test]
fn recipe_gaps_are_unit_for_standard_generators() {
    let ctx = heis();
    let out = heisenberg_incremental(&ctx, 2, RecipeBudget { r_max: 15, nodes: 10_000 }).unwrap();
    assert!(!out.recipe.gaps.is_empty());
    for &(r, s, t) in &out.recipe.gaps {
        assert_eq!(t - s, 1, "r = {r}");
        assert_eq!(s, -((r * r) as i64));
    }
}

#[test]
fn max_gap_examples() {
    assert_eq!(max_internal_gap(&[0]), None);
    assert_eq!(max_internal_gap(&[-1, 0, 1]), Some((-1, 0)));
    assert_eq!(max_internal_gap(&[0, 1, 5, 6, 10]), Some((1, 5)));
}

#[test]
fn expander_examples() {
    let z2 = GroupContext::zd(2);
    assert_eq!(almost_central_expander(&z2, &z2.identity(), 5).unwrap(), 0);
    assert_eq!(almost_central_expander(&z2, &GroupElement::Zd(vec![3, -1]), 5).unwrap(), 4);
    let h = GroupContext::heisenberg();
    assert_eq!(almost_central_expander(&h, &GroupElement::heis(0, -1, 0), 6).unwrap(), 4);
}

#[test]
fn bound_constant_examples() {
    let one = rat(1, 1);
    let b = besicovitch_bound_constant(1, &one, &one).unwrap();
    assert_eq!(b.value, rat(6, 1));
    assert!(!b.degenerate);
    let b = besicovitch_bound_constant(4, &one, &rat(2, 1)).unwrap();
    assert_eq!(b.value, rat(2592, 1));
    let b = besicovitch_bound_constant(0, &rat(2, 1), &rat(3, 1)).unwrap();
    assert_eq!(b.value, rat(3, 2));
    assert!(b.degenerate);
    assert!(besicovitch_bound_constant(2, &rat(0, 1), &one).is_err());
}

#[test]
fn growth_fit_for_the_plane() {
    let ctx = GroupContext::zd(2);
    let g = fit_growth_constants(&ctx, 10, 40).unwrap();
    assert_eq!(g.exponent, 2);
    // |B_n| = 2n² + 2n + 1: the ratio is largest at n = 1 and decreases.
    assert_eq!(g.upper, rat(5, 1));
    assert_eq!(g.lower, rat(2 * 1600 + 80 + 1, 1600));
}

#[test]
fn bounded_radius_checks() {
    let plane = GroupContext::zd(2);
    let growth = fit_growth_constants(&plane, 5, 20).unwrap();
    let ctx = Arc::new(plane.with_growth(growth));
    let f = fam(&ctx, &[(6, GroupElement::Zd(vec![0, 0])), (4, GroupElement::Zd(vec![9, 0]))]);
    let seq = IncrementalSequence::verify(f).unwrap();
    let rep = verify_bounded_radius_multiplicity(&seq, 3).unwrap();
    assert!(rep.holds);
    assert_eq!(rep.measured, 2);
    assert!(matches!(
        verify_bounded_radius_multiplicity(&seq, 5),
        Err(crate::Error::Precondition(_))
    ));
}

#[test]
fn json_shape() {
    let ctx = heis();
    let out = heisenberg_incremental(&ctx, 2, RecipeBudget::default()).unwrap();
    let json = serde_json::to_value(out.sequence.to_json()).unwrap();
    assert_eq!(json["group"], "Heisenberg");
    assert_eq!(json["members"].as_array().unwrap().len(), 2);
    assert_eq!(json["certificate"]["multiplicity"], 2);
    assert_eq!(json["certificate"]["incremental"], true);
}
