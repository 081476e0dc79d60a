use std::sync::Arc;

use proptest::prelude::*;
use ratiolab::covering::{
    fit_growth_constants, greedy_incremental, heisenberg_incremental, is_incremental, verify_bounded_radius_multiplicity,
    Member, RecipeBudget, TranslateFamily,
};
use ratiolab::group::{GroupContext, GroupElement};

/// ℓ¹ distance on Z^d, independent of the library metric.
fn l1(a: &[i64], b: &[i64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).sum()
}

fn coords(g: &GroupElement) -> Vec<i64> {
    match g {
        GroupElement::Zd(v) => v.clone(),
        _ => panic!("not a lattice point"),
    }
}

/// Largest number of `(radius, center)` balls sharing a point, by scanning
/// the bounding box.
fn brute_multiplicity(members: &[(u64, Vec<i64>)]) -> usize {
    let d = members[0].1.len();
    let reach = members.iter().map(|(r, c)| c.iter().map(|x| x.unsigned_abs()).max().unwrap() + r).max().unwrap() as i64;
    let mut best = 0;
    let mut p = vec![-reach; d];
    loop {
        best = best.max(members.iter().filter(|(r, c)| l1(&p, c) <= *r).count());
        let mut i = 0;
        while i < d {
            p[i] += 1;
            if p[i] <= reach {
                break;
            }
            p[i] = -reach;
            i += 1;
        }
        if i == d {
            return best;
        }
    }
}

fn family(d: usize, mut raw: Vec<(u64, Vec<i64>)>) -> TranslateFamily {
    raw.sort_by(|a, b| b.0.cmp(&a.0));
    let members = raw.into_iter().map(|(r, c)| Member::new(r, GroupElement::Zd(c))).collect();
    TranslateFamily::balls(Arc::new(GroupContext::zd(d)), members).unwrap()
}

fn lattice_family(d: usize) -> impl Strategy<Value = Vec<(u64, Vec<i64>)>> {
    prop::collection::vec((0u64..=6, prop::collection::vec(-10i64..=10, d)), 1..=12)
}

fn check_greedy(d: usize, raw: Vec<(u64, Vec<i64>)>) -> Result<(), TestCaseError> {
    let fam = family(d, raw);
    let seq = greedy_incremental(&fam).unwrap();
    prop_assert!(is_incremental(seq.family()).unwrap().is_none());
    let kept: Vec<(u64, Vec<i64>)> = seq.members().iter().map(|m| (m.radius, coords(&m.center))).collect();
    for m in fam.members() {
        let c = coords(&m.center);
        prop_assert!(kept.iter().any(|(r, k)| l1(&c, k) <= *r), "center {:?} uncovered", c);
    }
    for (j, (_, c)) in kept.iter().enumerate() {
        prop_assert!(kept[..j].iter().all(|(r, k)| l1(c, k) > *r));
    }
    prop_assert_eq!(seq.certificate().multiplicity, brute_multiplicity(&kept));
    Ok(())
}

/// Does the subfamily `mask` cover every center of `members`?
fn covers(members: &[(u64, Vec<i64>)], mask: u32) -> bool {
    members.iter().all(|(_, c)| {
        members.iter().enumerate().any(|(i, (r, k))| mask & (1 << i) != 0 && l1(c, k) <= *r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn greedy_on_the_line(raw in lattice_family(1)) {
        check_greedy(1, raw)?;
    }

    #[test]
    fn greedy_on_the_plane(raw in lattice_family(2)) {
        check_greedy(2, raw)?;
    }

    #[test]
    fn only_the_full_incremental_family_covers_its_centers(raw in lattice_family(2)) {
        let seq = greedy_incremental(&family(2, raw)).unwrap();
        let kept: Vec<(u64, Vec<i64>)> = seq.members().iter().map(|m| (m.radius, coords(&m.center))).collect();
        let full = (1u32 << kept.len()) - 1;
        prop_assert!(covers(&kept, full));
        for mask in 0..full {
            prop_assert!(!covers(&kept, mask), "mask {:b} covers", mask);
        }
    }
}

#[test]
fn heisenberg_witnesses_have_no_proper_cover() {
    let ctx = Arc::new(GroupContext::heisenberg());
    for k in 1..=4 {
        let found = heisenberg_incremental(&ctx, k, RecipeBudget::default()).unwrap();
        let fam = found.sequence.family();
        let n = fam.len();
        let full = (1u32 << n) - 1;
        for mask in 0..full {
            let covered = (0..n).all(|j| {
                (0..n).any(|i| mask & (1 << i) != 0 && fam.contains(i, &fam.members()[j].center).unwrap())
            });
            assert!(!covered, "k={k} mask {mask:b}");
        }
    }
}

fn bounded_families(ctx: Arc<GroupContext>, n: u64, count: usize, seed: u64, center: impl Fn(&mut u64) -> GroupElement) {
    let mut state = seed;
    let step = |s: &mut u64| {
        *s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        *s >> 33
    };
    for _ in 0..count {
        let size = 2 + step(&mut state) % 10;
        let mut raw: Vec<Member> = (0..size)
            .map(|_| {
                let r = n + step(&mut state) % (n + 1);
                Member::new(r, center(&mut state))
            })
            .collect();
        raw.sort_by(|a, b| b.radius.cmp(&a.radius));
        let fam = TranslateFamily::balls(ctx.clone(), raw).unwrap();
        let seq = greedy_incremental(&fam).unwrap();
        let report = verify_bounded_radius_multiplicity(&seq, n).unwrap();
        assert!(report.holds, "measured {} above {:?}", report.measured, report.bound.value);
    }
}

fn lcg(s: &mut u64) -> i64 {
    *s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (*s >> 33) as i64
}

#[test]
fn bounded_radius_in_the_plane() {
    let base = GroupContext::zd(2);
    let growth = fit_growth_constants(&base, 4, 30).unwrap();
    let ctx = Arc::new(base.with_growth(growth));
    for n in 3..=5 {
        bounded_families(ctx.clone(), n, 50, n, |s| GroupElement::Zd(vec![lcg(s) % 13 - 6, lcg(s) % 13 - 6]));
    }
}

#[test]
fn bounded_radius_in_heisenberg() {
    let base = GroupContext::heisenberg();
    let growth = fit_growth_constants(&base, 8, 16).unwrap();
    let ctx = Arc::new(base.with_growth(growth));
    for n in 3..=5 {
        bounded_families(ctx.clone(), n, 50, 10 + n, |s| {
            GroupElement::heis(lcg(s) % 9 - 4, lcg(s) % 21 - 10, lcg(s) % 9 - 4)
        });
    }
}
