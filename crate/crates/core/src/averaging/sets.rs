use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ser_biguint, ser_opt_biguint};
use crate::group::{FiniteSubset, GroupContext, GroupElement};

use super::index::{block_of, IndexSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Materialization {
    Implicit,
    Enumerated,
}

/// The annulus `B_outer \ B_inner`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Annulus {
    #[serde(serialize_with = "ser_biguint")]
    pub outer: BigUint,
    #[serde(serialize_with = "ser_biguint")]
    pub inner: BigUint,
}

impl Annulus {
    pub fn contains_length(&self, len: u64) -> bool {
        let len = BigUint::from(len);
        len <= self.outer && len > self.inner
    }
}

#[derive(Clone, Debug)]
pub struct EnumeratedSets {
    pub f: FiniteSubset,
    pub f_plus: FiniteSubset,
    pub boundary: Option<FiniteSubset>,
}

/// Radii of `F_i = B_{n(i)}`, `F_i⁺ = B_{n(i)+N(m)}` and
/// `∂*F_i = B_{n(i)+N(m)} \ B_{n(i)-N(m)}` for `i ∈ J_m`.
#[derive(Clone, Debug)]
pub struct AveragingSets {
    pub i: u64,
    pub m: u32,
    pub f: BigUint,
    pub f_plus: BigUint,
    /// `None` for `i = 1`, which has no predecessor.
    pub boundary: Option<Annulus>,
    /// Radius of `F_{i-1}⁺`.
    pub prev_plus: Option<BigUint>,
    pub enumerated: Option<EnumeratedSets>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    F,
    FPlus,
    Boundary,
    PrevPlus,
}

impl AveragingSets {
    pub fn new(seq: &IndexSequence, i: u64) -> Self {
        let m = block_of(i);
        let n = seq.n(i);
        let big_n = seq.big_n(m);
        let f_plus = &n + &big_n;
        let (boundary, prev_plus) = if i >= 2 {
            let prev = seq.n(i - 1) + seq.big_n(block_of(i - 1));
            let inner = n.clone() - &big_n;
            (Some(Annulus { outer: f_plus.clone(), inner }), Some(prev))
        } else {
            (None, None)
        };
        AveragingSets { i, m, f: n, f_plus, boundary, prev_plus, enumerated: None }
    }

    /// `F_{i-1}⁺ ∪ ∂*F_i ⊆ F_i⁺` and `∂*F_i ∩ F_{i-1}⁺ = ∅`, as radius
    /// inequalities.
    pub fn nested(&self) -> Option<bool> {
        let (b, p) = (self.boundary.as_ref()?, self.prev_plus.as_ref()?);
        Some(*p <= self.f_plus && *p <= b.inner && b.outer <= self.f_plus)
    }

    /// Implicit membership of `g`.
    pub fn contains(&self, ctx: &GroupContext, which: Which, g: &GroupElement) -> Result<bool> {
        if let Some(e) = &self.enumerated {
            let set = match which {
                Which::F => Some(&e.f),
                Which::FPlus => Some(&e.f_plus),
                Which::Boundary => e.boundary.as_ref(),
                Which::PrevPlus => None,
            };
            if let Some(set) = set {
                return Ok(set.contains(g));
            }
        }
        let len = ctx.word_length(g)?;
        let within = |r: &BigUint| BigUint::from(len) <= *r;
        Ok(match which {
            Which::F => within(&self.f),
            Which::FPlus => within(&self.f_plus),
            Which::Boundary => self.boundary.as_ref().is_some_and(|b| b.contains_length(len)),
            Which::PrevPlus => self.prev_plus.as_ref().is_some_and(within),
        })
    }

    /// Enumerates the three sets. Fails with a budget error if `F_i⁺` is too
    /// large for the context.
    pub fn materialize(&mut self, ctx: &GroupContext) -> Result<()> {
        let too_big = || Error::Budget { limit: ctx.budget(), layers: 0 };
        let outer = self.f_plus.to_u64().ok_or_else(too_big)?;
        let f = self.f.to_u64().ok_or_else(too_big)?;
        let ball = ctx.ball_with_lengths(outer)?;
        let pick = |keep: &dyn Fn(u64) -> bool| -> FiniteSubset {
            ball.iter().filter(|(_, l)| keep(*l)).map(|(g, _)| g.clone()).collect()
        };
        let boundary = self.boundary.as_ref().map(|b| pick(&|l| b.contains_length(l)));
        self.enumerated = Some(EnumeratedSets {
            f: pick(&|l| l <= f),
            f_plus: pick(&|_| true),
            boundary,
        });
        Ok(())
    }
}

pub fn averaging_sets(
    ctx: &GroupContext,
    seq: &IndexSequence,
    i: u64,
    mode: Materialization,
) -> Result<AveragingSets> {
    let mut sets = AveragingSets::new(seq, i);
    if mode == Materialization::Enumerated {
        sets.materialize(ctx)?;
    }
    Ok(sets)
}

/// One row of the exported index table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexRow {
    pub i: u64,
    pub m: u32,
    #[serde(serialize_with = "ser_biguint")]
    pub n: BigUint,
    #[serde(serialize_with = "ser_biguint")]
    pub big_n: BigUint,
    #[serde(serialize_with = "ser_opt_biguint")]
    pub l: Option<BigUint>,
    #[serde(serialize_with = "ser_biguint")]
    pub f_radius: BigUint,
    #[serde(serialize_with = "ser_biguint")]
    pub f_plus_radius: BigUint,
    #[serde(serialize_with = "ser_opt_biguint")]
    pub boundary_inner: Option<BigUint>,
    /// `None` at `i = 1`.
    pub nested: Option<bool>,
}

pub fn index_table(seq: &IndexSequence, lo: u64, hi: u64) -> Vec<IndexRow> {
    (lo.max(1)..=hi)
        .map(|i| {
            let s = AveragingSets::new(seq, i);
            IndexRow {
                i,
                m: s.m,
                n: s.f.clone(),
                big_n: seq.big_n(s.m),
                l: seq.l(s.m),
                f_radius: s.f.clone(),
                f_plus_radius: s.f_plus.clone(),
                boundary_inner: s.boundary.as_ref().map(|b| b.inner.clone()),
                nested: s.nested(),
            }
        })
        .collect()
}
