//! Finitely generated groups with canonical element encodings, the word
//! metric, and breadth-first ball enumeration.
//!
//! Four families are built in: `Z^d`, the discrete Heisenberg group, free
//! groups of finite rank and the restricted direct sum `Z^∞`. Every element
//! has exactly one encoding, so structural equality is group equality and
//! elements can be hashed freely during large searches.
//!
//! Translated balls follow the convention `B_n·g` (set on the left, center on
//! the right). Membership therefore reduces to `|x·g⁻¹| ≤ n`.

mod automorphism;
mod element;
mod heisenberg;
mod subset;

pub use automorphism::Automorphism;
pub use element::GroupElement;
pub use heisenberg::{heisenberg_area_range, heisenberg_sphere, heisenberg_word_length};
pub use subset::FiniteSubset;

use std::collections::VecDeque;
use std::sync::Mutex;

use indexmap::{IndexMap, IndexSet};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of elements any explicit enumeration may hold.
pub const DEFAULT_ELEMENT_BUDGET: usize = 5_000_000;

/// The group family an element or context belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    /// Free abelian group of the given rank.
    Zd(usize),
    /// Integer upper unitriangular 3×3 matrices.
    Heisenberg,
    /// Free group of the given rank.
    Free(usize),
    /// Finitely supported integer sequences.
    ZInfinity,
}

impl GroupKind {
    pub fn name(&self) -> String {
        match self {
            GroupKind::Zd(d) => format!("Z^{d}"),
            GroupKind::Heisenberg => "Heisenberg".to_string(),
            GroupKind::Free(r) => format!("F_{r}"),
            GroupKind::ZInfinity => "Z^inf".to_string(),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match *self {
            GroupKind::Zd(d) => GroupElement::Zd(vec![0; d]),
            GroupKind::Heisenberg => GroupElement::Heisenberg([0, 0, 0]),
            GroupKind::Free(_) => GroupElement::Free(Vec::new()),
            GroupKind::ZInfinity => GroupElement::ZInf(Vec::new()),
        }
    }

    fn owns(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (GroupKind::Zd(d), GroupElement::Zd(v)) => v.len() == *d,
            (GroupKind::Heisenberg, GroupElement::Heisenberg(_)) => true,
            (GroupKind::Free(r), GroupElement::Free(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *r)
            }
            (GroupKind::ZInfinity, GroupElement::ZInf(_)) => true,
            _ => false,
        }
    }
}

/// Bass growth constants `c₁ n^c ≤ |B_n| ≤ c₂ n^c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthConstants {
    pub exponent: u32,
    pub lower: BigRational,
    pub upper: BigRational,
}

#[derive(Default)]
struct BallCache {
    /// Every element reached so far with its word length.
    lengths: IndexMap<GroupElement, u64>,
    /// `layers[n]` holds the sphere of radius `n`.
    layers: Vec<Vec<GroupElement>>,
}

/// A group together with a finite symmetric generating set.
///
/// The context owns a cache of ball layers so that nested balls are built
/// incrementally. All public methods take `&self`; the cache is guarded by a
/// mutex so a context can be shared across threads.
pub struct GroupContext {
    kind: GroupKind,
    generators: Vec<GroupElement>,
    standard: bool,
    growth: Option<GrowthConstants>,
    budget: usize,
    cache: Mutex<BallCache>,
}

impl std::fmt::Debug for GroupContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupContext")
            .field("kind", &self.kind)
            .field("generators", &self.generators)
            .field("standard", &self.standard)
            .field("budget", &self.budget)
            .finish()
    }
}

impl Clone for GroupContext {
    fn clone(&self) -> Self {
        GroupContext {
            kind: self.kind,
            generators: self.generators.clone(),
            standard: self.standard,
            growth: self.growth.clone(),
            budget: self.budget,
            cache: Mutex::new(BallCache::default()),
        }
    }
}

impl GroupContext {
    fn build(kind: GroupKind, generators: Vec<GroupElement>, standard: bool) -> Self {
        GroupContext {
            kind,
            generators,
            standard,
            growth: None,
            budget: DEFAULT_ELEMENT_BUDGET,
            cache: Mutex::new(BallCache::default()),
        }
    }

    /// `Z^d` with the generators `±e_i`.
    pub fn zd(d: usize) -> Self {
        let mut gens = Vec::with_capacity(2 * d);
        for i in 0..d {
            for s in [1, -1] {
                let mut v = vec![0; d];
                v[i] = s;
                gens.push(GroupElement::Zd(v));
            }
        }
        Self::build(GroupKind::Zd(d), gens, true)
    }

    /// The discrete Heisenberg group with generators `a^±1, b^±1`.
    pub fn heisenberg() -> Self {
        let gens = vec![
            GroupElement::Heisenberg([1, 0, 0]),
            GroupElement::Heisenberg([-1, 0, 0]),
            GroupElement::Heisenberg([0, 0, 1]),
            GroupElement::Heisenberg([0, 0, -1]),
        ];
        Self::build(GroupKind::Heisenberg, gens, true)
    }

    /// The free group of rank `r` with its free basis and inverses.
    pub fn free(r: usize) -> Self {
        let mut gens = Vec::with_capacity(2 * r);
        for i in 1..=r as i32 {
            gens.push(GroupElement::Free(vec![i]));
            gens.push(GroupElement::Free(vec![-i]));
        }
        Self::build(GroupKind::Free(r), gens, true)
    }

    /// `Z^∞` with the basis vectors `±e_0, …, ±e_{d-1}`. Balls in `Z^∞` only
    /// make sense relative to such an explicit finite list.
    pub fn zinf(d: u32) -> Self {
        let mut gens = Vec::new();
        for i in 0..d {
            gens.push(GroupElement::ZInf(vec![(i, 1)]));
            gens.push(GroupElement::ZInf(vec![(i, -1)]));
        }
        Self::build(GroupKind::ZInfinity, gens, false)
    }

    /// A context with an arbitrary finite generating list. The list must be
    /// closed under inverses; the identity is rejected unless `allow_identity`.
    pub fn with_generators(
        kind: GroupKind,
        generators: Vec<GroupElement>,
        allow_identity: bool,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Invalid("empty generating set".into()));
        }
        let ctx = Self::build(kind, Vec::new(), false);
        let mut gens: IndexSet<GroupElement> = IndexSet::new();
        for g in generators {
            ctx.check(&g)?;
            if g.is_identity() && !allow_identity {
                return Err(Error::Invalid("identity in generating set".into()));
            }
            gens.insert(g);
        }
        for g in &gens {
            if !gens.contains(&ctx.invert(g)?) {
                return Err(Error::Invalid(format!("generating set not symmetric at {g}")));
            }
        }
        Ok(Self::build(kind, gens.into_iter().collect(), false))
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_growth(mut self, growth: GrowthConstants) -> Self {
        self.growth = Some(growth);
        self
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn growth(&self) -> Option<&GrowthConstants> {
        self.growth.as_ref()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// True when the generating set is the standard one and closed-form
    /// word lengths apply.
    pub fn is_standard(&self) -> bool {
        self.standard
    }

    pub fn identity(&self) -> GroupElement {
        self.kind.identity()
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.kind.owns(g) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!("{g} is not in {}", self.kind.name())))
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(g.mul_unchecked(h))
    }

    pub fn invert(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(g.inv_unchecked())
    }

    /// Word length of `g` with respect to the context's generators.
    pub fn word_length(&self, g: &GroupElement) -> Result<u64> {
        self.check(g)?;
        if self.standard {
            return Ok(match g {
                GroupElement::Zd(v) => v.iter().map(|x| x.unsigned_abs()).sum(),
                GroupElement::Heisenberg([k, m, n]) => heisenberg_word_length(*k, *m, *n),
                GroupElement::Free(w) => w.len() as u64,
                GroupElement::ZInf(_) => unreachable!("Z^inf contexts are never standard"),
            });
        }
        if let Some(&len) = self.cache.lock().unwrap().lengths.get(g) {
            return Ok(len);
        }
        self.bidirectional_length(g)
    }

    /// Word length by meet-in-the-middle breadth-first search, ignoring any
    /// closed form. Used as an oracle and for non-standard generators.
    pub fn bfs_word_length(&self, g: &GroupElement) -> Result<u64> {
        self.check(g)?;
        self.bidirectional_length(g)
    }

    fn bidirectional_length(&self, target: &GroupElement) -> Result<u64> {
        let e = self.identity();
        if *target == e {
            return Ok(0);
        }
        // Forward frontier grows from e by right multiplication; backward
        // grows from the target by right multiplication with inverses, which
        // is the same set because the generators are symmetric.
        let mut fwd: IndexMap<GroupElement, u64> = IndexMap::new();
        let mut bwd: IndexMap<GroupElement, u64> = IndexMap::new();
        fwd.insert(e.clone(), 0);
        bwd.insert(target.clone(), 0);
        let mut f_front = vec![e];
        let mut b_front = vec![target.clone()];
        let (mut f_depth, mut b_depth) = (0u64, 0u64);
        loop {
            if f_front.is_empty() || b_front.is_empty() {
                return Err(Error::Internal("element unreachable from generators".into()));
            }
            let forward = f_front.len() <= b_front.len();
            let (front, seen, other, depth) = if forward {
                (&mut f_front, &mut fwd, &bwd, &mut f_depth)
            } else {
                (&mut b_front, &mut bwd, &fwd, &mut b_depth)
            };
            *depth += 1;
            let mut best: Option<u64> = None;
            let mut next = Vec::new();
            for x in front.iter() {
                for s in &self.generators {
                    let y = x.mul_unchecked(s);
                    if seen.contains_key(&y) {
                        continue;
                    }
                    if let Some(&d) = other.get(&y) {
                        let total = *depth + d;
                        best = Some(best.map_or(total, |b| b.min(total)));
                    }
                    seen.insert(y.clone(), *depth);
                    next.push(y);
                }
            }
            if let Some(b) = best {
                return Ok(b);
            }
            if fwd.len() + bwd.len() > self.budget {
                return Err(Error::Budget {
                    limit: self.budget,
                    layers: f_depth.min(b_depth),
                });
            }
            *front = next;
        }
    }

    fn extend_cache(&self, cache: &mut BallCache, n: u64) -> Result<()> {
        if cache.layers.is_empty() {
            let e = self.identity();
            cache.lengths.insert(e.clone(), 0);
            cache.layers.push(vec![e]);
        }
        while (cache.layers.len() as u64) <= n {
            let depth = cache.layers.len() as u64;
            let mut next = Vec::new();
            for x in cache.layers.last().unwrap() {
                for s in &self.generators {
                    let y = x.mul_unchecked(s);
                    if !cache.lengths.contains_key(&y) {
                        cache.lengths.insert(y.clone(), depth);
                        next.push(y);
                    }
                }
                if cache.lengths.len() > self.budget {
                    // Drop the partial layer so the cache stays consistent.
                    for y in &next {
                        cache.lengths.shift_remove(y);
                    }
                    return Err(Error::Budget {
                        limit: self.budget,
                        layers: depth - 1,
                    });
                }
            }
            cache.layers.push(next);
        }
        Ok(())
    }

    /// The ball `B_n = A^n`, enumerated layer by layer. Elements appear in
    /// order of word length.
    pub fn ball(&self, n: u64) -> Result<FiniteSubset> {
        Ok(FiniteSubset::from_ball(n, self.ball_with_lengths(n)?.into_iter().map(|(g, _)| g)))
    }

    /// `B_n` as a list of `(element, word length)` pairs.
    pub fn ball_with_lengths(&self, n: u64) -> Result<Vec<(GroupElement, u64)>> {
        let mut cache = self.cache.lock().unwrap();
        self.extend_cache(&mut cache, n)?;
        let mut out = Vec::new();
        for (r, layer) in cache.layers.iter().enumerate().take(n as usize + 1) {
            out.extend(layer.iter().map(|g| (g.clone(), r as u64)));
        }
        Ok(out)
    }

    /// `|B_n|` for every `n ≤ max`.
    pub fn ball_sizes(&self, max: u64) -> Result<Vec<usize>> {
        let mut cache = self.cache.lock().unwrap();
        self.extend_cache(&mut cache, max)?;
        let mut total = 0;
        Ok(cache
            .layers
            .iter()
            .take(max as usize + 1)
            .map(|l| {
                total += l.len();
                total
            })
            .collect())
    }

    /// Implicit test for `g ∈ B_n·center`.
    pub fn translated_ball_contains(
        &self,
        n: u64,
        center: &GroupElement,
        g: &GroupElement,
    ) -> Result<bool> {
        let x = self.multiply(g, &self.invert(center)?)?;
        Ok(self.word_length(&x)? <= n)
    }

    /// The product set `AB = {ab}`.
    pub fn set_product(&self, a: &FiniteSubset, b: &FiniteSubset) -> Result<FiniteSubset> {
        let mut out = FiniteSubset::new();
        for x in a.iter() {
            for y in b.iter() {
                out.insert(self.multiply(x, y)?);
                if out.len() > self.budget {
                    return Err(Error::Budget { limit: self.budget, layers: 0 });
                }
            }
        }
        Ok(out)
    }

    /// Elements reachable in one generator step, used by breadth-first
    /// searches outside this module.
    pub fn neighbours(&self, g: &GroupElement) -> Vec<GroupElement> {
        self.generators.iter().map(|s| g.mul_unchecked(s)).collect()
    }
}

/// `M_r = {m : c^m ∈ B_{4r}}` in the Heisenberg group, where `c = b⁻¹a⁻¹ba`
/// is the central generator `(0, -1, 0)`. Sorted ascending.
pub fn central_powers_in_ball(ctx: &GroupContext, r: u64) -> Result<Vec<i64>> {
    if ctx.kind() != GroupKind::Heisenberg {
        return Err(Error::GroupMismatch("central powers need the Heisenberg group".into()));
    }
    let limit = 4 * r;
    if !ctx.is_standard() {
        let mut out: Vec<i64> = ctx
            .ball(limit)?
            .iter()
            .filter_map(|g| match g {
                GroupElement::Heisenberg([0, m, 0]) => Some(-m),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        return Ok(out);
    }
    // A closed path of length 4r encloses area at most r².
    let span = ((r + 2) * (r + 2)) as i64;
    let mut out = Vec::new();
    for m in -span..=span {
        if heisenberg_word_length(0, -m, 0) <= limit {
            out.push(m);
        }
    }
    Ok(out)
}

/// Breadth-first distances from the identity inside `B_n`, used where a
/// plain queue is more convenient than the layer cache.
pub fn bfs_lengths(ctx: &GroupContext, n: u64) -> Result<IndexMap<GroupElement, u64>> {
    let mut seen = IndexMap::new();
    let mut queue = VecDeque::new();
    let e = ctx.identity();
    seen.insert(e.clone(), 0);
    queue.push_back(e);
    while let Some(x) = queue.pop_front() {
        let d = seen[&x];
        if d == n {
            continue;
        }
        for y in ctx.neighbours(&x) {
            if !seen.contains_key(&y) {
                seen.insert(y.clone(), d + 1);
                queue.push_back(y);
                if seen.len() > ctx.budget() {
                    return Err(Error::Budget { limit: ctx.budget(), layers: d });
                }
            }
        }
    }
    Ok(seen)
}
