use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::group::{FiniteSubset, GroupContext, GroupElement};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn heis() -> Arc<GroupContext> {
    Arc::new(GroupContext::heisenberg())
}

fn three_stages() -> (Vec<TowerStage>, Vec<StageTransitionPlan>) {
    let (history, plans, err) = build_tower(stage_init(heis()), &HeisenbergProvider::default(), 3);
    assert!(err.is_none(), "{err:?}");
    (history, plans)
}

#[test]
fn hopf_examples() {
    let delta = ZFunction::delta(0);
    for n in 0..20u32 {
        assert_eq!(delta.window_sum(&BigUint::from(n), 0), BigRational::one());
    }
    let phi = ZFunction::new([(0, q(1, 1)), (5, q(1, 1))]);
    assert_eq!(phi.window_sum(&BigUint::from(7u32), 0), q(2, 1));
    let sys = HopfSystem::new(phi.clone(), ZFunction::delta(0)).unwrap();
    assert_eq!(sys.ratio(&BigUint::from(7u32), 0).unwrap(), q(2, 1));
    assert_eq!(sys.ratio(&BigUint::from(3u32), 0).unwrap(), q(1, 1));
    assert_eq!(sys.limit(), q(2, 1));
    assert_eq!(sys.absorption_threshold(0), 5);
    let same = HopfSystem::new(phi.clone(), phi).unwrap();
    assert_eq!(same.ratio(&BigUint::from(5u32), 3).unwrap(), q(1, 1));
}

#[test]
fn hopf_rejects_zero_total() {
    let psi = ZFunction::new([(0, q(1, 1)), (1, q(-1, 1))]);
    assert_eq!(HopfSystem::new(ZFunction::delta(0), psi).unwrap_err(), Error::ZeroDenominator);
    let sys = HopfSystem::new(ZFunction::delta(0), ZFunction::delta(10)).unwrap();
    assert_eq!(sys.ratio(&BigUint::from(2u32), 0).unwrap_err(), Error::ZeroDenominator);
}

#[test]
fn stage_one() {
    let s = stage_init(heis());
    assert_eq!(s.norm_l1(Observable::Phi), q(1, 1));
    assert_eq!(s.norm_l1(Observable::Psi), q(1, 1));
    assert_eq!(s.i_star(), 1);
    assert_eq!(s.interval(&GroupElement::heis(0, 0, 0)), Some((q(0, 1), q(1, 1))));
    let e = FiniteSubset::from_iter([GroupElement::heis(0, 0, 0)]);
    let x = q(3, 10);
    let got = s.eval_s(Window::Set(&e), Observable::Phi, &x).unwrap();
    assert_eq!(got.value, q(1, 1));
    assert_eq!(s.eval_r(Window::Ball(5), &x).unwrap(), q(1, 1));
    assert!(s.locate(&q(1, 1)).is_err());
    s.check_invariants().unwrap();
}

#[test]
fn act_allocates_lazily_inside_the_shape() {
    let mut s = stage_init(heis());
    let a = GroupElement::heis(1, 0, 0);
    assert_eq!(s.act(&a, &q(1, 2)).unwrap(), None);
    assert!(matches!(s.act_alloc(&a, &q(1, 2)), Err(Error::Precondition(_))));
}

#[test]
fn first_plan() {
    let s = stage_init(heis());
    let plan = plan_transition(&s, &HeisenbergProvider::default()).unwrap();
    assert_eq!(plan.phi_sup, q(1, 1));
    assert_eq!(plan.psi_sup, q(1, 1));
    assert_eq!(plan.v, q(2, 1));
    assert_eq!(plan.hitting, vec![GroupElement::heis(0, 0, 0)]);
    // |H|·v·r/N < 1 needs N > 2.
    assert_eq!(plan.cuts, 4);
    assert_eq!(plan.sign, -1);
    let mut gammas: Vec<_> = plan.translates.iter().map(|t| t.gamma.clone()).collect();
    gammas.sort();
    let mut want = vec![
        GroupElement::heis(-2, 0, 0),
        GroupElement::heis(0, 0, -2),
        GroupElement::heis(0, 0, 2),
        GroupElement::heis(2, 0, 0),
    ];
    want.sort();
    assert_eq!(gammas, want);
    assert!(plan.translates.iter().all(|t| t.radius == 2));
}

#[test]
fn second_stage() {
    let s = stage_init(heis());
    let plan = plan_transition(&s, &HeisenbergProvider::default()).unwrap();
    let t = apply_transition(&s, &plan).unwrap();
    assert_eq!(t.r(), &q(1, 4));
    assert_eq!(t.pieces().len(), 4);
    assert_eq!(t.norm_l1(Observable::Phi), q(3, 2));
    assert_eq!(t.integral(Observable::Phi), q(1, 2));
    assert_eq!(t.norm_l1(Observable::Psi), q(1, 1));
    for w in t.pieces() {
        assert_eq!(t.index_of(w), Some(2));
        let x = t.interval(w).unwrap().0;
        assert!(t.eval_r(Window::Ball(2), &x).unwrap() <= -BigRational::one());
    }
    assert!(compatibility(&s, &t, 100).unwrap().is_empty());
}

#[test]
fn plan_rejects_a_stage_without_mass_left() {
    let mut s = stage_init(heis());
    s.cells.values_mut().for_each(|c| c.phi = q(2, 1));
    assert!(matches!(plan_transition(&s, &HeisenbergProvider::default()), Err(Error::Verification(_))));
}

#[test]
fn verifier_names_conditions() {
    let ctx = GroupContext::heisenberg();
    let e = Shape::point(ctx.identity());
    let h = vec![ctx.identity()];
    let t = |k, a, b| Translate { radius: k, gamma: GroupElement::heis(a, 0, b) };
    let good = [t(2, 2, 0), t(2, -2, 0)];
    assert_eq!(verify_translates(&ctx, &e, &h, &good, 2, 1000).unwrap(), None);
    assert_eq!(
        verify_translates(&ctx, &e, &h, &good, 3, 1000).unwrap(),
        Some(Condition::RadiusTooSmall { j: 0, radius: 2, min: 3 })
    );
    assert_eq!(
        verify_translates(&ctx, &e, &h, &[t(2, 3, 0)], 2, 1000).unwrap(),
        Some(Condition::MissesHittingSet { j: 0, component: 0 })
    );
    assert_eq!(
        verify_translates(&ctx, &e, &h, &[t(2, 0, 0)], 2, 1000).unwrap(),
        Some(Condition::MeetsHittingSet { j: 0 })
    );
    assert_eq!(
        verify_translates(&ctx, &e, &h, &[t(2, 2, 0), t(2, 1, 0)], 2, 1000).unwrap(),
        Some(Condition::NotIncremental { j: 1, i: 0 })
    );
    // With E = B_1 and k = 4, a³ and a⁻² are 5 apart: incremental and
    // disjoint, but B_4·E·a⁻² reaches E·a³.
    let thick = Shape::from_components(vec![Component { radius: 1, center: ctx.identity() }]);
    assert_eq!(
        verify_translates(&ctx, &thick, &h, &[t(4, 3, 0), t(4, -2, 0)], 4, 1000).unwrap(),
        Some(Condition::ReachesOtherTranslate { j: 0, other: 1 })
    );
    assert!(Condition::MeetsHittingSet { j: 0 }.to_string().starts_with("copies-avoid-H"));
}

#[test]
fn hitting_enumerates_when_the_triangle_bound_is_loose() {
    let ctx = GroupContext::heisenberg();
    // B_1·a² lies within 3 of H = {a, a³} although |a²| + 1 > 3 from either.
    let shape = Shape::from_components(vec![Component { radius: 1, center: ctx.identity() }]);
    let h = vec![GroupElement::heis(1, 0, 0), GroupElement::heis(3, 0, 0)];
    let t = [Translate { radius: 2, gamma: GroupElement::heis(2, 0, 0) }];
    let got = verify_translates(&ctx, &shape, &h, &t, 1, 1000).unwrap();
    assert_eq!(got, Some(Condition::MeetsHittingSet { j: 0 }));
}

#[test]
fn provider_needs_heisenberg() {
    let ctx = GroupContext::zd(2);
    let p = HeisenbergProvider::default();
    assert!(matches!(p.hitting_set(&ctx, &[], &Shape::point(ctx.identity())), Err(Error::GroupMismatch(_))));
}

#[test]
fn provider_single_translate() {
    let ctx = GroupContext::heisenberg();
    let e = Shape::point(ctx.identity());
    let p = HeisenbergProvider::default();
    let h = p.hitting_set(&ctx, &[GroupElement::heis(5, 0, 0)], &e).unwrap();
    assert!(h.contains(&GroupElement::heis(5, 0, 0)));
    let got = p.translates(&ctx, &e, &h, 1, 2).unwrap();
    assert_eq!(got.len(), 1);
    assert_eq!(verify_translates(&ctx, &e, &h, &got, 2, 1000).unwrap(), None);
}

#[test]
fn provider_reports_exhaustion() {
    let ctx = GroupContext::heisenberg();
    let e = Shape::point(ctx.identity());
    let p = HeisenbergProvider { max_radius: 3, ..HeisenbergProvider::default() };
    let h = vec![ctx.identity()];
    assert!(matches!(p.translates(&ctx, &e, &h, 64, 2), Err(Error::Exhausted { .. })));
}

#[test]
fn support_sum_matches_brute_force() {
    let s = stage_init(heis());
    let plan = plan_transition(&s, &HeisenbergProvider::default()).unwrap();
    let t = apply_transition(&s, &plan).unwrap();
    for g in t.cells().keys() {
        let x = t.interval(g).unwrap().0;
        for k in 0..=8 {
            for obs in [Observable::Phi, Observable::Psi] {
                let fast = t.eval_s(Window::Ball(k), obs, &x).unwrap().value;
                assert_eq!(fast, t.eval_s_brute(k, obs, &x).unwrap(), "{g} k={k}");
            }
        }
    }
}

#[test]
fn strict_mode_flags_windows_leaving_the_shape() {
    let s = stage_init(heis()).with_strict(true);
    let x = q(1, 3);
    assert!(s.eval_s(Window::Ball(0), Observable::Phi, &x).unwrap().defined);
    assert!(!s.eval_s(Window::Ball(1), Observable::Phi, &x).unwrap().defined);
    let lax = stage_init(heis());
    assert!(lax.eval_s(Window::Ball(1), Observable::Phi, &x).unwrap().defined);
}

#[test]
fn three_stage_build() {
    let (history, plans) = three_stages();
    assert_eq!(history.len(), 3);
    assert_eq!(plans.iter().map(|p| p.cuts).collect::<Vec<_>>(), vec![4, 4]);
    assert_eq!(plans[1].v, q(6, 1));
    assert_eq!(plans[1].sign, 1);
    assert_eq!(history[2].norm_l1(Observable::Phi), q(15, 8));
    for s in &history {
        s.check_invariants().unwrap();
        assert!(s.norm_l1(Observable::Psi) < q(2, 1));
    }
    let report = verify_alternation(&history).unwrap();
    assert!(report.passed(), "{report:?}");
    assert_eq!(report.depth(), 3);
    for pair in history.windows(2) {
        assert!(compatibility(&pair[0], &pair[1], 200).unwrap().is_empty());
    }
    let i3: Vec<u64> = history[2].pieces().iter().map(|w| history[2].index_of(w).unwrap()).collect();
    assert!(i3.iter().all(|&k| k > history[1].i_star()));
}

#[test]
fn snapshot_is_exact() {
    let s = stage_init(heis());
    let json = serde_json::to_value(s.snapshot()).unwrap();
    assert_eq!(json["n"], 1);
    assert_eq!(json["r_n"]["num"], "1");
    assert_eq!(json["pieces"][0]["interval"][1]["den"], "1");
    assert_eq!(json["norms"]["phi_l1"]["num"], "1");
    assert_eq!(json["pieces"][0]["idx"], 1);
}

#[test]
fn shuffled_placement_keeps_values() {
    let s = stage_init(heis()).with_placement(Placement::Shuffled { seed: 7 });
    let plan = plan_transition(&s, &HeisenbergProvider::default()).unwrap();
    let a = apply_transition(&s, &plan).unwrap();
    let b = apply_transition(&stage_init(heis()), &plan).unwrap();
    assert_eq!(a.norm_l1(Observable::Phi), b.norm_l1(Observable::Phi));
    for w in a.pieces() {
        let x = a.interval(w).unwrap().0;
        assert_eq!(a.eval_r(Window::Ball(2), &x).unwrap(), b.eval_r(Window::Ball(2), &x).unwrap());
    }
    let again = apply_transition(&s, &plan).unwrap();
    assert_eq!(again.snapshot(), a.snapshot());
}

proptest! {
    #[test]
    fn hopf_ratio_absorbs(
        phi in prop::collection::vec((-20i64..20, -5i64..6), 1..6),
        psi in prop::collection::vec((-20i64..20, 1i64..6), 1..6),
        x in -10i64..10,
    ) {
        let f = |v: Vec<(i64, i64)>| ZFunction::new(v.into_iter().map(|(s, a)| (s, q(a, 1))));
        let sys = HopfSystem::new(f(phi), f(psi)).unwrap();
        let t = sys.absorption_threshold(x);
        for n in t..t + 5 {
            prop_assert_eq!(sys.ratio(&BigUint::from(n), x).unwrap(), sys.limit());
        }
    }

    #[test]
    fn hopf_translation_equivariant(s in -10i64..10, t in -10i64..10, n in 0u32..15) {
        let phi = ZFunction::new([(s, q(3, 1)), (s + 4, q(-1, 1))]);
        let psi = ZFunction::new([(s + 1, q(2, 1))]);
        let a = HopfSystem::new(phi.clone(), psi.clone()).unwrap();
        let b = HopfSystem::new(phi.shifted(t), psi.shifted(t)).unwrap();
        let n = BigUint::from(n);
        prop_assert_eq!(a.ratio(&n, 0).ok(), b.ratio(&n, t).ok());
    }

    #[test]
    fn window_sum_zero_function(n in 0u32..50, x in -100i64..100) {
        prop_assert!(ZFunction::default().window_sum(&BigUint::from(n), x).is_zero());
    }
}
