use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FiniteSubset, GroupContext, GroupElement};

use super::shape::Shape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Observable {
    Phi,
    Psi,
}

/// The interval `[start, start + r_n)` owned by one group element, and the
/// constant values of `φ` and `ψ` on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub start: BigRational,
    pub phi: BigRational,
    pub psi: BigRational,
}

impl Cell {
    pub fn value(&self, obs: Observable) -> &BigRational {
        match obs {
            Observable::Phi => &self.phi,
            Observable::Psi => &self.psi,
        }
    }
}

/// The averaging window of a sum.
#[derive(Clone, Copy, Debug)]
pub enum Window<'a> {
    /// `F = B_k`.
    Ball(u64),
    Set(&'a FiniteSubset),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalS {
    pub value: BigRational,
    /// False only in strict mode, when the window reaches outside `G_n`.
    pub defined: bool,
}

/// Where fresh intervals go.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Placement {
    /// Packed to the right of all existing mass.
    #[default]
    Packed,
    /// Separated by seeded random gaps. Only changes positions, never
    /// values, so every ratio is unaffected.
    Shuffled { seed: u64 },
}

/// One stage of the cutting-and-stacking construction.
///
/// Only cells that carry mass, cover `[0, 1]`, or were touched by an
/// evaluation are allocated. Every other element of `G_n` has zero `φ` and
/// `ψ` and receives an interval the first time something needs it.
#[derive(Clone, Debug)]
pub struct TowerStage {
    pub(super) ctx: Arc<GroupContext>,
    pub(super) n: u32,
    pub(super) r: BigRational,
    pub(super) shape: Shape,
    pub(super) cells: BTreeMap<GroupElement, Cell>,
    pub(super) by_start: BTreeMap<BigRational, GroupElement>,
    /// Elements whose intervals tile `[0, 1]`, left to right.
    pub(super) pieces: Vec<GroupElement>,
    pub(super) index: BTreeMap<GroupElement, u64>,
    pub(super) i_star: u64,
    pub(super) cursor: BigRational,
    pub(super) placement: Placement,
    pub(super) fresh: u64,
    pub(super) strict: bool,
}

pub(super) fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `G_1 = {1_G}`, `I_{1,1_G} = [0, 1)`, and `φ = ψ = i_1 = 1`.
pub fn stage_init(ctx: Arc<GroupContext>) -> TowerStage {
    let e = ctx.identity();
    let mut cells = BTreeMap::new();
    cells.insert(e.clone(), Cell { start: BigRational::zero(), phi: BigRational::one(), psi: BigRational::one() });
    let mut by_start = BTreeMap::new();
    by_start.insert(BigRational::zero(), e.clone());
    TowerStage {
        ctx,
        n: 1,
        r: BigRational::one(),
        shape: Shape::point(e.clone()),
        cells,
        by_start,
        pieces: vec![e.clone()],
        index: [(e, 1)].into_iter().collect(),
        i_star: 1,
        cursor: BigRational::one(),
        placement: Placement::Packed,
        fresh: 0,
        strict: false,
    }
}

impl TowerStage {
    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    pub fn with_strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn ctx(&self) -> &Arc<GroupContext> {
        &self.ctx
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Common interval length `r_n`.
    pub fn r(&self) -> &BigRational {
        &self.r
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn cells(&self) -> &BTreeMap<GroupElement, Cell> {
        &self.cells
    }

    pub fn pieces(&self) -> &[GroupElement] {
        &self.pieces
    }

    /// `i_n` on a piece of `[0, 1]`.
    pub fn index_of(&self, w: &GroupElement) -> Option<u64> {
        self.index.get(w).copied()
    }

    pub fn i_star(&self) -> u64 {
        self.i_star
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    pub fn value(&self, obs: Observable, g: &GroupElement) -> BigRational {
        self.cells.get(g).map(|c| c.value(obs).clone()).unwrap_or_default()
    }

    /// Elements where `obs` is non-zero.
    pub fn support(&self, obs: Observable) -> impl Iterator<Item = (&GroupElement, &BigRational)> {
        self.cells.iter().map(move |(g, c)| (g, c.value(obs))).filter(|(_, v)| !v.is_zero())
    }

    pub fn integral(&self, obs: Observable) -> BigRational {
        self.support(obs).map(|(_, v)| v).sum::<BigRational>() * &self.r
    }

    pub fn norm_l1(&self, obs: Observable) -> BigRational {
        self.support(obs).map(|(_, v)| v.abs()).sum::<BigRational>() * &self.r
    }

    /// The element whose interval contains `x`.
    pub fn locate(&self, x: &BigRational) -> Result<&GroupElement> {
        let (start, g) = self
            .by_start
            .range(..=x.clone())
            .next_back()
            .ok_or_else(|| Error::Invalid(format!("{x} lies in no interval")))?;
        if *x < start + &self.r {
            Ok(g)
        } else {
            Err(Error::Invalid(format!("{x} lies in no interval")))
        }
    }

    pub fn interval(&self, g: &GroupElement) -> Option<(BigRational, BigRational)> {
        self.cells.get(g).map(|c| (c.start.clone(), &c.start + &self.r))
    }

    /// `T^h x`, or `None` when the target element has no interval yet.
    pub fn act(&self, h: &GroupElement, x: &BigRational) -> Result<Option<BigRational>> {
        let w = self.locate(x)?;
        let target = self.ctx.multiply(h, w)?;
        let from = &self.cells[w].start;
        Ok(self.cells.get(&target).map(|c| &c.start + (x - from)))
    }

    /// `T^h x`, allocating the target interval if it lies in `G_n`.
    pub fn act_alloc(&mut self, h: &GroupElement, x: &BigRational) -> Result<BigRational> {
        let w = self.locate(x)?.clone();
        let target = self.ctx.multiply(h, &w)?;
        if !self.cells.contains_key(&target) {
            if !self.shape.contains(&self.ctx, &target)? {
                return Err(Error::Precondition(format!("T^{h} x leaves G_{}", self.n)));
            }
            self.allocate(target.clone(), BigRational::zero(), BigRational::zero())?;
        }
        let from = &self.cells[&w].start;
        Ok(&self.cells[&target].start + (x - from))
    }

    pub(super) fn fresh_start(&mut self) -> BigRational {
        let gap = match self.placement {
            Placement::Packed => 0,
            Placement::Shuffled { seed } => {
                let mix = seed ^ ((self.n as u64) << 40) ^ self.fresh.wrapping_mul(0x9E37_79B9_7F4A_7C15);
                ChaCha8Rng::seed_from_u64(mix).gen_range(0..8)
            }
        };
        self.fresh += 1;
        let start = &self.cursor + &self.r * int(gap);
        self.cursor = &start + &self.r;
        start
    }

    pub(super) fn allocate(&mut self, g: GroupElement, phi: BigRational, psi: BigRational) -> Result<()> {
        if self.cells.contains_key(&g) {
            return Err(Error::Internal(format!("{g} already owns an interval")));
        }
        let start = self.fresh_start();
        self.by_start.insert(start.clone(), g.clone());
        self.cells.insert(g, Cell { start, phi, psi });
        Ok(())
    }

    /// `S_F(obs, x)`, summing only over the support.
    pub fn eval_s(&self, window: Window<'_>, obs: Observable, x: &BigRational) -> Result<EvalS> {
        let w = self.locate(x)?;
        match window {
            Window::Ball(k) => {
                let w_inv = self.ctx.invert(w)?;
                let mut value = BigRational::zero();
                for (u, v) in self.support(obs) {
                    if self.ctx.word_length(&self.ctx.multiply(u, &w_inv)?)? <= k {
                        value += v;
                    }
                }
                let defined = !self.strict || self.shape.contains_ball(&self.ctx, k, w)?;
                Ok(EvalS { value, defined })
            }
            Window::Set(f) => {
                let mut value = BigRational::zero();
                let mut defined = true;
                for h in f.iter() {
                    let u = self.ctx.multiply(h, w)?;
                    value += self.value(obs, &u);
                    if self.strict && defined && !self.shape.contains(&self.ctx, &u)? {
                        defined = false;
                    }
                }
                Ok(EvalS { value, defined })
            }
        }
    }

    /// `S_{B_k}(obs, x)` by visiting every `h ∈ B_k`. Only feasible for
    /// small `k`; used to check [`eval_s`](Self::eval_s).
    pub fn eval_s_brute(&self, k: u64, obs: Observable, x: &BigRational) -> Result<BigRational> {
        let w = self.locate(x)?;
        let mut value = BigRational::zero();
        for h in self.ctx.ball(k)?.iter() {
            value += self.value(obs, &self.ctx.multiply(h, w)?);
        }
        Ok(value)
    }

    /// `R_F(φ, ψ, x)`.
    pub fn eval_r(&self, window: Window<'_>, x: &BigRational) -> Result<BigRational> {
        let den = self.eval_s(window, Observable::Psi, x)?.value;
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.eval_s(window, Observable::Phi, x)?.value / den)
    }

    /// `max |S_{B_k}(obs, x)|` over the pieces of `[0, 1]` and all
    /// `k > i_n*`. Finite because the support is finite: past the farthest
    /// support point the sums stop changing.
    pub fn piece_sup(&self, obs: Observable) -> Result<BigRational> {
        let mut best = BigRational::zero();
        for w in &self.pieces {
            let w_inv = self.ctx.invert(w)?;
            let mut at: BTreeMap<u64, BigRational> = BTreeMap::new();
            for (u, v) in self.support(obs) {
                let d = self.ctx.word_length(&self.ctx.multiply(u, &w_inv)?)?;
                *at.entry(d).or_default() += v;
            }
            let first = self.i_star + 1;
            let mut sum: BigRational = at.range(..=first).map(|(_, v)| v).sum();
            best = best.max(sum.abs());
            for (_, v) in at.range(first + 1..) {
                sum += v;
                best = best.max(sum.abs());
            }
        }
        Ok(best)
    }

    /// Disjoint equal-length intervals, pieces tiling `[0, 1]`, and both
    /// norms below 2.
    pub fn check_invariants(&self) -> Result<()> {
        let mut prev_end: Option<BigRational> = None;
        for start in self.by_start.keys() {
            if let Some(end) = &prev_end {
                if start < end {
                    return Err(Error::Internal(format!("intervals overlap at {start}")));
                }
            }
            prev_end = Some(start + &self.r);
        }
        if self.by_start.len() != self.cells.len() {
            return Err(Error::Internal("interval index out of sync".into()));
        }
        let mut pos = BigRational::zero();
        for w in &self.pieces {
            let c = self.cells.get(w).ok_or_else(|| Error::Internal(format!("piece {w} has no interval")))?;
            if c.start != pos {
                return Err(Error::Internal(format!("gap in [0, 1] before {w}")));
            }
            pos += &self.r;
        }
        if pos != BigRational::one() {
            return Err(Error::Internal("pieces do not cover [0, 1]".into()));
        }
        let two = int(2);
        for obs in [Observable::Phi, Observable::Psi] {
            if self.norm_l1(obs) >= two {
                return Err(Error::Verification(format!("‖{obs:?}‖₁ reached 2 at stage {}", self.n)));
            }
        }
        Ok(())
    }

    pub fn snapshot(&self) -> StageSnapshot {
        let mut pieces: Vec<(&BigRational, &GroupElement)> = self.by_start.iter().collect();
        pieces.sort();
        StageSnapshot {
            n: self.n,
            r_n: ExactJson::from(&self.r),
            i_star: self.i_star,
            shape: self
                .shape
                .components()
                .iter()
                .map(|c| BallJson { radius: c.radius, center: c.center.to_string() })
                .collect(),
            pieces: pieces
                .into_iter()
                .map(|(start, g)| {
                    let c = &self.cells[g];
                    PieceJson {
                        element: g.to_string(),
                        interval: [ExactJson::from(start), ExactJson::from(&(start + &self.r))],
                        phi: ExactJson::from(&c.phi),
                        psi: ExactJson::from(&c.psi),
                        idx: self.index.get(g).copied(),
                    }
                })
                .collect(),
            norms: Norms {
                phi_l1: ExactJson::from(&self.norm_l1(Observable::Phi)),
                psi_l1: ExactJson::from(&self.norm_l1(Observable::Psi)),
            },
        }
    }
}

/// A rational as an exact numerator/denominator pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactJson {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for ExactJson {
    fn from(q: &BigRational) -> Self {
        ExactJson { num: q.numer().to_string(), den: q.denom().to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceJson {
    pub element: String,
    /// Half-open `[a, b)`.
    pub interval: [ExactJson; 2],
    pub phi: ExactJson,
    pub psi: ExactJson,
    pub idx: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallJson {
    pub radius: u64,
    pub center: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Norms {
    pub phi_l1: ExactJson,
    pub psi_l1: ExactJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageSnapshot {
    pub n: u32,
    pub r_n: ExactJson,
    pub i_star: u64,
    /// `G_n` as a union of balls `B_radius·center`.
    pub shape: Vec<BallJson>,
    pub pieces: Vec<PieceJson>,
    pub norms: Norms,
}
