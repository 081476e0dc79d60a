use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteSubset, GroupContext, GroupElement};

/// Maps a radius index `n` to the set `F_n`.
#[derive(Clone, Debug)]
pub enum SetProvider {
    /// `F_n = B_n`, tested implicitly through the word metric.
    Balls,
    /// Explicitly listed sets, one per admissible index.
    Explicit(BTreeMap<u64, FiniteSubset>),
}

impl SetProvider {
    pub fn is_valid(&self, n: u64) -> bool {
        match self {
            SetProvider::Balls => true,
            SetProvider::Explicit(sets) => sets.contains_key(&n),
        }
    }

    /// Is `x ∈ F_n`?
    pub fn contains(&self, ctx: &GroupContext, n: u64, x: &GroupElement) -> Result<bool> {
        match self {
            SetProvider::Balls => Ok(ctx.word_length(x)? <= n),
            SetProvider::Explicit(sets) => sets
                .get(&n)
                .map(|s| s.contains(x))
                .ok_or_else(|| Error::Invalid(format!("no set for index {n}"))),
        }
    }

    /// The elements of `F_n`.
    pub fn enumerate(&self, ctx: &GroupContext, n: u64) -> Result<Vec<GroupElement>> {
        match self {
            SetProvider::Balls => Ok(ctx.ball(n)?.iter().cloned().collect()),
            SetProvider::Explicit(sets) => sets
                .get(&n)
                .map(|s| s.iter().cloned().collect())
                .ok_or_else(|| Error::Invalid(format!("no set for index {n}"))),
        }
    }
}

/// One translate `F_n·g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Member {
    pub radius: u64,
    pub center: GroupElement,
}

impl Member {
    pub fn new(radius: u64, center: GroupElement) -> Self {
        Member { radius, center }
    }
}

/// An ordered family of translates `F_{n(i)}·g_i`.
#[derive(Clone, Debug)]
pub struct TranslateFamily {
    ctx: Arc<GroupContext>,
    provider: SetProvider,
    members: Vec<Member>,
}

impl TranslateFamily {
    pub fn new(ctx: Arc<GroupContext>, provider: SetProvider, members: Vec<Member>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Invalid("a family needs at least one member".into()));
        }
        for m in &members {
            ctx.invert(&m.center)?;
            if !provider.is_valid(m.radius) {
                return Err(Error::Invalid(format!("radius index {} not provided", m.radius)));
            }
        }
        Ok(TranslateFamily { ctx, provider, members })
    }

    /// A family of translated word-metric balls.
    pub fn balls(ctx: Arc<GroupContext>, members: Vec<Member>) -> Result<Self> {
        Self::new(ctx, SetProvider::Balls, members)
    }

    pub fn ctx(&self) -> &Arc<GroupContext> {
        &self.ctx
    }

    pub fn provider(&self) -> &SetProvider {
        &self.provider
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Is `x ∈ F_{n(i)}·g_i`? Indices are 0-based.
    pub fn contains(&self, i: usize, x: &GroupElement) -> Result<bool> {
        let m = &self.members[i];
        let y = self.ctx.multiply(x, &self.ctx.invert(&m.center)?)?;
        self.provider.contains(&self.ctx, m.radius, &y)
    }

    /// The points of member `i`.
    pub fn member_points(&self, i: usize) -> Result<Vec<GroupElement>> {
        let m = &self.members[i];
        self.provider
            .enumerate(&self.ctx, m.radius)?
            .iter()
            .map(|x| self.ctx.multiply(x, &m.center))
            .collect()
    }

    /// The members at the given 0-based indices, in that order.
    pub fn subfamily(&self, indices: &[usize]) -> Result<Self> {
        let members = indices.iter().map(|&i| self.members[i].clone()).collect();
        Self::new(self.ctx.clone(), self.provider.clone(), members)
    }
}
