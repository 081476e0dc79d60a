use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::covering::almost_central_expander;
use crate::error::{Error, Result};
use crate::group::{heisenberg_sphere, Automorphism, GroupContext, GroupElement, GroupKind};

use super::shape::{Component, Shape};

/// One translate `B_k·γ` of the next stage.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Translate {
    pub radius: u64,
    pub gamma: GroupElement,
}

/// A condition on `(E, H, {(k_j, γ_j)})` that a provider must satisfy.
/// Here `E` is the current shape and each `E·γ_j` is one copy of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `k_j` does not exceed the previous stage's largest index.
    RadiusTooSmall { j: usize, radius: u64, min: u64 },
    /// Radii increase, or `γ_j` lies in an earlier member `B_{k_i}·γ_i`.
    NotIncremental { j: usize, i: usize },
    /// Some `B_{k_j}·g·γ_j` with `g ∈ E` misses `H`.
    MissesHittingSet { j: usize, component: usize },
    /// `H` meets the copy `E·γ_j`.
    MeetsHittingSet { j: usize },
    /// The copy `E·γ_j` meets `B_{k_other}·E·γ_other`.
    ReachesOtherTranslate { j: usize, other: usize },
    /// The copies `E·γ_j` and `E·γ_other` overlap.
    CopiesOverlap { j: usize, other: usize },
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::RadiusTooSmall { j, radius, min } => {
                write!(f, "radius-above-previous-index: k_{j} = {radius} < {min}")
            }
            Condition::NotIncremental { j, i } => write!(f, "incremental: member {j} lies in member {i}"),
            Condition::MissesHittingSet { j, component } => {
                write!(f, "every-ball-meets-H: translate {j} misses H from component {component}")
            }
            Condition::MeetsHittingSet { j } => write!(f, "copies-avoid-H: H meets copy {j}"),
            Condition::ReachesOtherTranslate { j, other } => {
                write!(f, "copies-separated: copy {j} meets the thickened copy {other}")
            }
            Condition::CopiesOverlap { j, other } => write!(f, "copies-disjoint: copies {j} and {other} overlap"),
        }
    }
}

/// Supplies the hitting set `H` and the translates used by one transition.
///
/// `H` is requested first because the number of translates depends on `|H|`.
pub trait IncrementalProvider {
    fn hitting_set(&self, ctx: &GroupContext, d: &[GroupElement], e: &Shape) -> Result<Vec<GroupElement>>;

    /// `len` translates with radii at least `min_radius`, satisfying every
    /// [`Condition`].
    fn translates(
        &self,
        ctx: &GroupContext,
        e: &Shape,
        h: &[GroupElement],
        len: usize,
        min_radius: u64,
    ) -> Result<Vec<Translate>>;

    /// A radius `m` with `F_n·E ⊆ B_m·F_n`, if the provider tracks one.
    fn expander(&self, _ctx: &GroupContext, _e: &Shape) -> Result<Option<u64>> {
        Ok(None)
    }
}

/// `min_h |h·x⁻¹|`.
fn dist_to_set(ctx: &GroupContext, h: &[GroupElement], x: &GroupElement) -> Result<u64> {
    let x_inv = ctx.invert(x)?;
    let mut best = u64::MAX;
    for y in h {
        best = best.min(ctx.word_length(&ctx.multiply(y, &x_inv)?)?);
    }
    Ok(best)
}

fn dist(ctx: &GroupContext, x: &GroupElement, y: &GroupElement) -> Result<u64> {
    ctx.word_length(&ctx.multiply(x, &ctx.invert(y)?)?)
}

/// Does every point of `B_r·x` lie within `k` of `H`? Tries the triangle
/// inequality first and enumerates `B_r` only when that is inconclusive.
fn ball_hits(ctx: &GroupContext, h: &[GroupElement], r: u64, x: &GroupElement, k: u64, budget: usize) -> Result<bool> {
    let near = dist_to_set(ctx, h, x)?;
    if near.saturating_add(r) <= k {
        return Ok(true);
    }
    if near > k {
        return Ok(false);
    }
    let ball = ctx.ball(r)?;
    if ball.len() > budget {
        return Err(Error::Budget { limit: budget, layers: r });
    }
    for b in ball.iter() {
        if dist_to_set(ctx, h, &ctx.multiply(b, x)?)? > k {
            return Ok(false);
        }
    }
    Ok(true)
}

fn copy_avoids(ctx: &GroupContext, h: &[GroupElement], c: &Component, gamma: &GroupElement) -> Result<bool> {
    let x = ctx.multiply(&c.center, gamma)?;
    Ok(dist_to_set(ctx, h, &x)? > c.radius)
}

/// `B_a·E·γ ∩ B_b·E·γ' = ∅`, component by component.
fn copies_apart(ctx: &GroupContext, e: &Shape, gamma: &GroupElement, other: &GroupElement, slack: u64) -> Result<bool> {
    for p in e.components() {
        let x = ctx.multiply(&p.center, gamma)?;
        for q in e.components() {
            let y = ctx.multiply(&q.center, other)?;
            if dist(ctx, &x, &y)? <= p.radius + q.radius + slack {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks every [`Condition`] exactly. Balls are enumerated only when the
/// hitting condition is not settled by the triangle inequality, and never
/// beyond `budget` elements.
pub fn verify_translates(
    ctx: &GroupContext,
    e: &Shape,
    h: &[GroupElement],
    translates: &[Translate],
    min_radius: u64,
    budget: usize,
) -> Result<Option<Condition>> {
    for (j, t) in translates.iter().enumerate() {
        if t.radius < min_radius {
            return Ok(Some(Condition::RadiusTooSmall { j, radius: t.radius, min: min_radius }));
        }
        for (i, s) in translates[..j].iter().enumerate() {
            if t.radius > s.radius || dist(ctx, &t.gamma, &s.gamma)? <= s.radius {
                return Ok(Some(Condition::NotIncremental { j, i }));
            }
        }
        for (component, c) in e.components().iter().enumerate() {
            let x = ctx.multiply(&c.center, &t.gamma)?;
            if !ball_hits(ctx, h, c.radius, &x, t.radius, budget)? {
                return Ok(Some(Condition::MissesHittingSet { j, component }));
            }
            if !copy_avoids(ctx, h, c, &t.gamma)? {
                return Ok(Some(Condition::MeetsHittingSet { j }));
            }
        }
    }
    for (j, t) in translates.iter().enumerate() {
        for (other, s) in translates.iter().enumerate() {
            if j == other {
                continue;
            }
            if !copies_apart(ctx, e, &t.gamma, &s.gamma, 0)? {
                return Ok(Some(Condition::CopiesOverlap { j, other }));
            }
            if !copies_apart(ctx, e, &t.gamma, &s.gamma, s.radius)? {
                return Ok(Some(Condition::ReachesOtherTranslate { j, other }));
            }
        }
    }
    Ok(None)
}

/// Provider for the Heisenberg group with balls as averaging sets.
///
/// `H = D ∪ {1_G}`. Translates all share one radius `k`, tried on an
/// increasing schedule starting at the requested minimum. For each `k` the
/// candidates `γ` come from a band of spheres whose outer edge is the
/// largest length compatible with the hitting condition. Candidates are
/// grouped into orbits of the automorphisms fixing `E` and `H`, and a
/// depth-first clique search over orbits picks pairwise separated ones.
#[derive(Clone, Debug)]
pub struct HeisenbergProvider {
    pub max_radius: u64,
    /// Number of sphere lengths searched for each `k`.
    pub shell_width: u64,
    /// Clique nodes per radius.
    pub node_budget: u64,
    /// Largest ball enumerated while verifying.
    pub enum_budget: usize,
}

impl Default for HeisenbergProvider {
    fn default() -> Self {
        HeisenbergProvider { max_radius: 40, shell_width: 8, node_budget: 200_000, enum_budget: 200_000 }
    }
}

struct Unit {
    members: Vec<GroupElement>,
    length: u64,
}

impl HeisenbergProvider {
    fn check_group(ctx: &GroupContext) -> Result<()> {
        if ctx.kind() != GroupKind::Heisenberg || !ctx.is_standard() {
            return Err(Error::GroupMismatch(format!(
                "the Heisenberg provider needs the standard Heisenberg context, got {}",
                ctx.kind().name()
            )));
        }
        Ok(())
    }

    fn stabilizer(e: &Shape, h: &[GroupElement], ctx: &GroupContext) -> Vec<Automorphism> {
        let comps: BTreeSet<&Component> = e.components().iter().collect();
        let hs: BTreeSet<&GroupElement> = h.iter().collect();
        ctx.automorphisms()
            .into_iter()
            .filter(|s| {
                let moved: BTreeSet<Component> = comps
                    .iter()
                    .map(|c| Component { radius: c.radius, center: s.apply(&c.center) })
                    .collect();
                let moved_h: BTreeSet<GroupElement> = hs.iter().map(|g| s.apply(g)).collect();
                moved.iter().eq(comps.iter().copied()) && moved_h.iter().eq(hs.iter().copied())
            })
            .collect()
    }

    fn candidate(&self, ctx: &GroupContext, e: &Shape, h: &[GroupElement], k: u64, gamma: &GroupElement) -> Result<bool> {
        for c in e.components() {
            let x = ctx.multiply(&c.center, gamma)?;
            let near = dist_to_set(ctx, h, &x)?;
            if near <= c.radius || near + c.radius > k {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn units(&self, ctx: &GroupContext, e: &Shape, h: &[GroupElement], k: u64, stab: &[Automorphism]) -> Result<Vec<Unit>> {
        let hmax = h.iter().map(|g| ctx.word_length(g)).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0);
        let mut hi = (k + hmax) as i64;
        let mut slack = i64::MAX;
        for c in e.components() {
            slack = slack.min(ctx.word_length(&c.center)? as i64 - c.radius as i64);
        }
        hi += slack;
        if hi < 0 {
            return Ok(Vec::new());
        }
        let hi = hi as u64;
        let lo = hi.saturating_sub(self.shell_width.saturating_sub(1));
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut units = Vec::new();
        let mut scanned = 0usize;
        for len in lo..=hi {
            for [a, m, b] in heisenberg_sphere(len) {
                scanned += 1;
                if scanned > ctx.budget() {
                    return Err(Error::Budget { limit: ctx.budget(), layers: len });
                }
                let gamma = GroupElement::heis(a, m, b);
                if seen.contains(&gamma) || !self.candidate(ctx, e, h, k, &gamma)? {
                    continue;
                }
                let orbit: BTreeSet<GroupElement> = stab.iter().map(|s| s.apply(&gamma)).collect();
                seen.extend(orbit.iter().cloned());
                let members: Vec<GroupElement> = orbit.into_iter().collect();
                let mut ok = true;
                'pairs: for (i, x) in members.iter().enumerate() {
                    for y in &members[i + 1..] {
                        if !copies_apart(ctx, e, x, y, k)? {
                            ok = false;
                            break 'pairs;
                        }
                    }
                }
                if ok {
                    units.push(Unit { members, length: len });
                }
            }
        }
        units.sort_by(|x, y| {
            y.members.len().cmp(&x.members.len()).then(y.length.cmp(&x.length)).then(x.members.cmp(&y.members))
        });
        Ok(units)
    }

    /// Depth-first search for pairwise compatible units of total size at
    /// least `len`. `None` when the space or the node budget runs out.
    fn clique(&self, ctx: &GroupContext, e: &Shape, k: u64, units: &[Unit], len: usize) -> Result<Option<Vec<usize>>> {
        struct Search<'a> {
            ctx: &'a GroupContext,
            e: &'a Shape,
            k: u64,
            units: &'a [Unit],
            len: usize,
            suffix: Vec<usize>,
            memo: HashMap<(usize, usize), bool>,
            nodes: u64,
            budget: u64,
            chosen: Vec<usize>,
        }

        impl Search<'_> {
            fn compatible(&mut self, i: usize, j: usize) -> Result<bool> {
                if let Some(&v) = self.memo.get(&(i, j)) {
                    return Ok(v);
                }
                let mut ok = true;
                'outer: for x in &self.units[i].members {
                    for y in &self.units[j].members {
                        if !copies_apart(self.ctx, self.e, x, y, self.k)? {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
                self.memo.insert((i, j), ok);
                Ok(ok)
            }

            fn run(&mut self, start: usize, weight: usize) -> Result<bool> {
                for i in start..self.units.len() {
                    if weight + self.suffix[i] < self.len || self.nodes >= self.budget {
                        return Ok(false);
                    }
                    let mut ok = true;
                    for c in self.chosen.clone() {
                        if !self.compatible(c, i)? {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        continue;
                    }
                    self.nodes += 1;
                    self.chosen.push(i);
                    let w = weight + self.units[i].members.len();
                    if w >= self.len || self.run(i + 1, w)? {
                        return Ok(true);
                    }
                    self.chosen.pop();
                }
                Ok(false)
            }
        }

        let mut suffix = vec![0usize; units.len() + 1];
        for i in (0..units.len()).rev() {
            suffix[i] = suffix[i + 1] + units[i].members.len();
        }
        let mut search = Search {
            ctx,
            e,
            k,
            units,
            len,
            suffix,
            memo: HashMap::new(),
            nodes: 0,
            budget: self.node_budget,
            chosen: Vec::new(),
        };
        Ok(search.run(0, 0)?.then_some(search.chosen))
    }
}

impl IncrementalProvider for HeisenbergProvider {
    fn hitting_set(&self, ctx: &GroupContext, d: &[GroupElement], _e: &Shape) -> Result<Vec<GroupElement>> {
        Self::check_group(ctx)?;
        let mut h: BTreeSet<GroupElement> = d.iter().cloned().collect();
        h.insert(ctx.identity());
        Ok(h.into_iter().collect())
    }

    fn translates(
        &self,
        ctx: &GroupContext,
        e: &Shape,
        h: &[GroupElement],
        len: usize,
        min_radius: u64,
    ) -> Result<Vec<Translate>> {
        Self::check_group(ctx)?;
        if len == 0 {
            return Ok(Vec::new());
        }
        let stab = Self::stabilizer(e, h, ctx);
        let mut k = min_radius.max(1);
        let mut explored = 0u64;
        while k <= self.max_radius {
            let units = self.units(ctx, e, h, k, &stab)?;
            explored += units.len() as u64;
            if let Some(picked) = self.clique(ctx, e, k, &units, len)? {
                let mut gammas: Vec<GroupElement> =
                    picked.iter().flat_map(|&i| units[i].members.iter().cloned()).collect();
                gammas.sort();
                gammas.truncate(len);
                let out: Vec<Translate> = gammas.into_iter().map(|gamma| Translate { radius: k, gamma }).collect();
                if let Some(c) = verify_translates(ctx, e, h, &out, min_radius, self.enum_budget)? {
                    return Err(Error::Verification(c.to_string()));
                }
                return Ok(out);
            }
            k += (k / 4).max(1);
        }
        Err(Error::Exhausted { nodes: explored })
    }

    fn expander(&self, ctx: &GroupContext, e: &Shape) -> Result<Option<u64>> {
        let mut m = 0;
        for c in e.components() {
            m = m.max(almost_central_expander(ctx, &c.center, 2)? + c.radius);
        }
        Ok(Some(m))
    }
}
