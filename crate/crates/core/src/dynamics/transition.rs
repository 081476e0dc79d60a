use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupElement;

use super::provider::{verify_translates, IncrementalProvider, Translate};
use super::shape::{Component, Shape};
use super::tower::{int, Cell, Observable, TowerStage, Window};

/// Largest cut count tried before giving up on the mass budget.
const MAX_CUTS: u64 = 1 << 20;

/// Everything decided before stage `n + 1` is built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageTransitionPlan {
    pub from: u32,
    /// `Φ_n`.
    pub phi_sup: BigRational,
    /// `Ψ_n`.
    pub psi_sup: BigRational,
    pub v: BigRational,
    pub hitting: Vec<GroupElement>,
    pub cuts: u64,
    pub translates: Vec<Translate>,
    /// `+1` when stage `n + 1` is odd.
    pub sign: i8,
    pub expander: Option<u64>,
}

/// Computes `Φ_n`, `Ψ_n`, `v`, asks the provider for `H`, takes the least
/// power of two `N` with `|H|·v·r_n/N < 2 − ‖φ‖₁`, then asks for `N`
/// translates of radius above `i_n*` and checks them.
pub fn plan_transition(stage: &TowerStage, provider: &dyn IncrementalProvider) -> Result<StageTransitionPlan> {
    let ctx = stage.ctx.as_ref();
    let phi_sup = stage.piece_sup(Observable::Phi)?;
    let psi_sup = stage.piece_sup(Observable::Psi)?;
    let v = &phi_sup + &psi_sup;
    let hitting = provider.hitting_set(ctx, &[ctx.identity()], &stage.shape)?;
    let room = int(2) - stage.norm_l1(Observable::Phi);
    if !room.is_positive() {
        return Err(Error::Verification(format!("no mass left at stage {}", stage.n)));
    }
    let mass = &v * int(hitting.len() as i64) * &stage.r;
    let mut cuts = 1u64;
    while mass.clone() / int(cuts as i64) >= room {
        cuts *= 2;
        if cuts > MAX_CUTS {
            return Err(Error::Budget { limit: MAX_CUTS as usize, layers: stage.n as u64 });
        }
    }
    let min_radius = stage.i_star + 1;
    let translates = provider.translates(ctx, &stage.shape, &hitting, cuts as usize, min_radius)?;
    if translates.len() != cuts as usize {
        return Err(Error::Verification(format!("provider returned {} of {cuts} translates", translates.len())));
    }
    if let Some(c) = verify_translates(ctx, &stage.shape, &hitting, &translates, min_radius, ctx.budget())? {
        return Err(Error::Verification(c.to_string()));
    }
    let expander = provider.expander(ctx, &stage.shape)?;
    let sign = if (stage.n + 1) % 2 == 1 { 1 } else { -1 };
    Ok(StageTransitionPlan { from: stage.n, phi_sup, psi_sup, v, hitting, cuts, translates, sign, expander })
}

/// Cuts every interval into `N` pieces, sends piece `j` of `I_{n,g}` to
/// `g·γ_j`, and gives each `h ∈ H` a fresh interval carrying `φ = ±v`,
/// `ψ = 0`.
pub fn apply_transition(stage: &TowerStage, plan: &StageTransitionPlan) -> Result<TowerStage> {
    let ctx = stage.ctx.clone();
    if plan.from != stage.n {
        return Err(Error::Precondition(format!("plan is for stage {}, not {}", plan.from, stage.n)));
    }
    let r = &stage.r / int(plan.cuts as i64);
    let step = stage.n as u64 + 1;
    let mut next = TowerStage {
        ctx: ctx.clone(),
        n: stage.n + 1,
        r: r.clone(),
        shape: Shape::default(),
        cells: BTreeMap::new(),
        by_start: BTreeMap::new(),
        pieces: Vec::new(),
        index: BTreeMap::new(),
        i_star: 0,
        cursor: stage.cursor.clone(),
        placement: stage.placement,
        fresh: 0,
        strict: stage.strict,
    };

    for (g, cell) in &stage.cells {
        for (j, t) in plan.translates.iter().enumerate() {
            let target = ctx.multiply(g, &t.gamma)?;
            let start = &cell.start + &r * int(j as i64);
            let new = Cell { start: start.clone(), phi: cell.phi.clone(), psi: cell.psi.clone() };
            if next.cells.insert(target.clone(), new).is_some() || next.by_start.insert(start, target.clone()).is_some() {
                return Err(Error::Internal(format!("interval collision at {target}")));
            }
        }
    }
    let value = int(plan.sign as i64) * &plan.v;
    for h in &plan.hitting {
        next.allocate(h.clone(), value.clone(), BigRational::zero())?;
    }

    for w in &stage.pieces {
        for t in &plan.translates {
            let piece = ctx.multiply(w, &t.gamma)?;
            next.index.insert(piece.clone(), t.radius);
            next.pieces.push(piece);
        }
    }
    next.i_star = plan.translates.iter().map(|t| t.radius).max().unwrap_or(0);

    let mut comps = Vec::new();
    for t in &plan.translates {
        let moved = stage.shape.right_translate(&ctx, &t.gamma)?.thicken(t.radius + step);
        comps.extend(moved.components().iter().cloned());
    }
    for h in &plan.hitting {
        comps.push(Component { radius: step, center: h.clone() });
    }
    next.shape = Shape::from_components(comps);

    let expected = stage.integral(Observable::Phi) + &value * int(plan.hitting.len() as i64) * &r;
    if next.integral(Observable::Phi) != expected {
        return Err(Error::Internal("∫φ does not match the mass update".into()));
    }
    next.check_invariants()?;
    Ok(next)
}

/// Builds stages `1..=stages`, starting from `first`.
pub fn build_tower(
    first: TowerStage,
    provider: &dyn IncrementalProvider,
    stages: u32,
) -> (Vec<TowerStage>, Vec<StageTransitionPlan>, Option<Error>) {
    let mut history = vec![first];
    let mut plans = Vec::new();
    while history.len() < stages as usize {
        let last = history.last().expect("non-empty");
        let step = plan_transition(last, provider).and_then(|plan| apply_transition(last, &plan).map(|s| (plan, s)));
        match step {
            Ok((plan, s)) => {
                plans.push(plan);
                history.push(s);
            }
            Err(e) => return (history, plans, Some(e)),
        }
    }
    (history, plans, None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlternationViolation {
    pub stage: u32,
    pub piece: String,
    pub index: u64,
    /// `None` when the denominator vanished.
    pub ratio: Option<String>,
    /// True when the value was taken at the last stage rather than at
    /// `stage` itself.
    pub persisted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageAlternation {
    pub stage: u32,
    pub pieces: usize,
    pub alternation: bool,
    pub persisted: bool,
    pub index_increasing: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AlternationReport {
    pub stages: Vec<StageAlternation>,
    pub violations: Vec<AlternationViolation>,
    pub index_failures: Vec<(u32, String)>,
}

impl AlternationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.index_failures.is_empty()
    }

    /// Number of consecutive stages, from the first, that alternate.
    pub fn depth(&self) -> usize {
        self.stages.iter().take_while(|s| s.alternation && s.persisted).count()
    }
}

fn alternates(n: u32, ratio: &BigRational) -> bool {
    if n % 2 == 1 {
        *ratio >= BigRational::one()
    } else {
        *ratio <= -BigRational::one()
    }
}

/// For every piece `w` of `[0, 1]` at stage `n`, checks
/// `R_{B_{i_n(w)}}(φ, ψ, x) ≥ 1` for odd `n` and `≤ −1` for even `n`, at the
/// left end `x` of the piece. Values are constant on a piece. The check runs
/// on stage `n` and again on the last stage, since later stages must not
/// disturb it. Also checks that `i_n` strictly increases along each point.
pub fn verify_alternation(history: &[TowerStage]) -> Result<AlternationReport> {
    let last = history.last().ok_or_else(|| Error::Precondition("empty history".into()))?;
    let mut report = AlternationReport::default();
    for (s, stage) in history.iter().enumerate() {
        let mut row = StageAlternation {
            stage: stage.n,
            pieces: stage.pieces.len(),
            alternation: true,
            persisted: true,
            index_increasing: true,
        };
        for w in &stage.pieces {
            let x = stage.cells[w].start.clone();
            let k = stage.index[w];
            for (target, persisted) in [(stage, false), (last, true)] {
                let ratio = match target.eval_r(Window::Ball(k), &x) {
                    Ok(r) => Some(r),
                    Err(Error::ZeroDenominator) => None,
                    Err(e) => return Err(e),
                };
                if !ratio.as_ref().is_some_and(|r| alternates(stage.n, r)) {
                    if persisted {
                        row.persisted = false;
                    } else {
                        row.alternation = false;
                    }
                    report.violations.push(AlternationViolation {
                        stage: stage.n,
                        piece: w.to_string(),
                        index: k,
                        ratio: ratio.map(|r| crate::exact::rat_str(&r)),
                        persisted,
                    });
                }
            }
            if s > 0 {
                let prev = &history[s - 1];
                let parent = prev.locate(&x)?;
                if prev.index[parent] >= k {
                    row.index_increasing = false;
                    report.index_failures.push((stage.n, w.to_string()));
                }
            }
        }
        report.stages.push(row);
    }
    Ok(report)
}

/// A point where two stages disagree about `T^h x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityFailure {
    pub stage: u32,
    pub element: String,
    pub generator: String,
    pub point: String,
}

/// Compares `T_{n+1}^h x` with `T_n^h x` for generators `h` and sample
/// points `x` in the first `samples` cells of `prev`, wherever stage `n`
/// defines the translate.
pub fn compatibility(prev: &TowerStage, next: &TowerStage, samples: usize) -> Result<Vec<CompatibilityFailure>> {
    let ctx = prev.ctx.as_ref();
    let mut out = Vec::new();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for (g, cell) in prev.cells.iter().take(samples) {
        for h in ctx.generators() {
            for x in [cell.start.clone(), &cell.start + &prev.r * &half] {
                let Some(before) = prev.act(h, &x)? else { continue };
                let after = next.act(h, &x)?;
                if after.as_ref() != Some(&before) {
                    out.push(CompatibilityFailure {
                        stage: next.n,
                        element: g.to_string(),
                        generator: h.to_string(),
                        point: crate::exact::rat_str(&x),
                    });
                }
            }
        }
    }
    Ok(out)
}
