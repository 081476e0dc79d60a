use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{central_powers_in_ball, GroupContext, GroupElement, GroupKind};

use super::{
    incremental_witness_search, is_incremental, multiplicity_at, IncrementalSequence, Member,
    SearchOutcome, TranslateFamily,
};

/// Limits for [`heisenberg_incremental`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecipeBudget {
    /// Largest `r` examined by the gap recipe and largest fallback radius.
    pub r_max: u64,
    /// Node budget for each fallback search.
    pub nodes: u64,
}

pub const HEISENBERG_DEFAULT_BUDGET: RecipeBudget = RecipeBudget { r_max: 63, nodes: 2_000_000 };

impl Default for RecipeBudget {
    fn default() -> Self {
        HEISENBERG_DEFAULT_BUDGET
    }
}

/// Log of the gap-based recipe.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeAttempt {
    /// `(r, s_r, t_r)` for every scanned `r`.
    pub gaps: Vec<(u64, i64, i64)>,
    /// The radii `r(i)` accepted by the growth condition.
    pub radii: Vec<u64>,
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct HeisenbergIncremental {
    pub sequence: IncrementalSequence,
    pub recipe: RecipeAttempt,
    /// Radius used by the search fallback, if the recipe did not verify.
    pub fallback_radius: Option<u64>,
}

/// Widest gap `(s, t)` between consecutive elements of a sorted set,
/// leftmost on ties. `None` for fewer than two elements.
pub fn max_internal_gap(m: &[i64]) -> Option<(i64, i64)> {
    let mut best: Option<(i64, i64)> = None;
    for w in m.windows(2) {
        if best.map_or(true, |(s, t)| w[1] - w[0] > t - s) {
            best = Some((w[0], w[1]));
        }
    }
    best
}

fn central(j: i64) -> GroupElement {
    // c = (0, -1, 0), so c^j = (0, -j, 0).
    GroupElement::heis(0, -j, 0)
}

fn recipe_family(
    ctx: &Arc<GroupContext>,
    chosen: &[(u64, i64, i64)],
) -> Result<TranslateFamily> {
    let mut members: Vec<Member> =
        chosen.iter().map(|&(r, s, t)| Member::new(4 * r, central(s - t))).collect();
    members.sort_by(|a, b| b.radius.cmp(&a.radius));
    TranslateFamily::balls(ctx.clone(), members)
}

fn run_recipe(
    ctx: &Arc<GroupContext>,
    k: usize,
    budget: RecipeBudget,
) -> Result<(RecipeAttempt, Option<IncrementalSequence>)> {
    let mut log = RecipeAttempt::default();
    let mut chosen: Vec<(u64, i64, i64)> = Vec::new();
    let e = ctx.identity();
    let mut r = 1u64;
    while r <= budget.r_max {
        let m = central_powers_in_ball(ctx, r)?;
        if let Some((s, t)) = max_internal_gap(&m) {
            log.gaps.push((r, s, t));
            let grows = chosen.last().map_or(true, |&(prev, _, _)| (t - s) as u128 > (prev as u128).pow(2));
            if grows {
                chosen.push((r, s, t));
                if chosen.len() == k {
                    let fam = recipe_family(ctx, &chosen)?;
                    if is_incremental(&fam)?.is_none() && multiplicity_at(&fam, &e)? == k {
                        log.radii = chosen.iter().map(|c| c.0).collect();
                        log.verified = true;
                        return Ok((log, Some(IncrementalSequence::verify(fam)?)));
                    }
                    // Drop the newest radius and keep scanning.
                    chosen.pop();
                }
            }
        }
        r = 2 * r + 1;
    }
    log.radii = chosen.iter().map(|c| c.0).collect();
    Ok((log, None))
}

/// An incremental sequence of `k` balls in the Heisenberg group, all
/// containing the identity.
///
/// The gap recipe is tried first: translates `B_{4r}·c^{s_r - t_r}` for the
/// widest gap `(s_r, t_r)` of `M_r`, with radii accepted once the gap exceeds
/// the square of the previous radius. For the standard generators `M_r` is an
/// interval, so the recipe only verifies for `k = 1`; the attempt is logged
/// and a deterministic search over single radii `R = 1, 2, …` takes over.
pub fn heisenberg_incremental(
    ctx: &Arc<GroupContext>,
    k: usize,
    budget: RecipeBudget,
) -> Result<HeisenbergIncremental> {
    if ctx.kind() != GroupKind::Heisenberg {
        return Err(Error::GroupMismatch("heisenberg_incremental needs the Heisenberg group".into()));
    }
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let (recipe, found) = run_recipe(ctx, k, budget)?;
    if let Some(sequence) = found {
        return Ok(HeisenbergIncremental { sequence, recipe, fallback_radius: None });
    }
    let mut nodes = 0u64;
    for radius in 1..=budget.r_max {
        let outcome = match incremental_witness_search(ctx, &[radius], k, budget.nodes) {
            Ok(o) => o,
            Err(Error::Budget { .. }) => break,
            Err(e) => return Err(e),
        };
        match outcome {
            SearchOutcome::Found(sequence) => {
                return Ok(HeisenbergIncremental { sequence, recipe, fallback_radius: Some(radius) })
            }
            SearchOutcome::Exhausted { nodes: n, .. } => nodes += n,
        }
    }
    Err(Error::Exhausted { nodes })
}
