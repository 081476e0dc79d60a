use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{GroupContext, GroupElement};

use super::{multiplicity_at, IncrementalSequence, Member, TranslateFamily};

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(IncrementalSequence),
    /// No witness was found. `complete` is true when the candidate space was
    /// fully explored; this still says nothing about the covering property
    /// for radii outside the list.
    Exhausted { nodes: u64, complete: bool },
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&IncrementalSequence> {
        match self {
            SearchOutcome::Found(s) => Some(s),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

struct Dfs<'a> {
    ctx: &'a GroupContext,
    radii: Vec<u64>,
    /// `candidates[r]` lists the centers `c` with `1_G ∈ B_{radii[r]}·c`.
    candidates: Vec<Vec<GroupElement>>,
    k: usize,
    nodes: u64,
    budget: u64,
    chosen: Vec<(usize, usize)>,
}

impl Dfs<'_> {
    fn compatible(&self, c: &GroupElement) -> Result<bool> {
        for &(ri, ci) in &self.chosen {
            let prev = &self.candidates[ri][ci];
            let d = self.ctx.word_length(&self.ctx.multiply(c, &self.ctx.invert(prev)?)?)?;
            if d <= self.radii[ri] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Returns `Ok(true)` once `k` members are chosen, `Err(Exhausted)` when
    /// the node budget runs out.
    fn run(&mut self) -> Result<bool> {
        if self.chosen.len() == self.k {
            return Ok(true);
        }
        let (r0, c0) = match self.chosen.last() {
            Some(&(r, c)) => (r, c + 1),
            None => (0, 0),
        };
        for r in r0..self.radii.len() {
            let start = if r == r0 { c0 } else { 0 };
            let cands = self.candidates[r].len();
            for ci in start..cands {
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(Error::Exhausted { nodes: self.nodes });
                }
                let c = self.candidates[r][ci].clone();
                if !self.compatible(&c)? {
                    continue;
                }
                self.chosen.push((r, ci));
                if self.run()? {
                    return Ok(true);
                }
                self.chosen.pop();
            }
        }
        Ok(false)
    }
}

/// Deterministic backtracking for an incremental sequence of `k` balls, all
/// containing the identity, with radii drawn from `radii` (non-increasing
/// along the sequence). Centers are tried in canonical order; equal radii
/// are taken with increasing centers, which loses nothing because the
/// incremental condition is symmetric for equal radii.
pub fn incremental_witness_search(
    ctx: &Arc<GroupContext>,
    radii: &[u64],
    k: usize,
    node_budget: u64,
) -> Result<SearchOutcome> {
    if radii.is_empty() || k == 0 {
        return Err(Error::Invalid("need at least one radius and k ≥ 1".into()));
    }
    let mut rs = radii.to_vec();
    rs.sort_unstable_by(|a, b| b.cmp(a));
    rs.dedup();
    let mut candidates = Vec::with_capacity(rs.len());
    for &r in &rs {
        // 1 ∈ B_r·c iff |c⁻¹| = |c| ≤ r.
        candidates.push(ctx.ball(r)?.sorted());
    }
    let mut dfs = Dfs {
        ctx,
        radii: rs,
        candidates,
        k,
        nodes: 0,
        budget: node_budget,
        chosen: Vec::new(),
    };
    match dfs.run() {
        Ok(true) => {}
        Ok(false) => return Ok(SearchOutcome::Exhausted { nodes: dfs.nodes, complete: true }),
        Err(Error::Exhausted { nodes }) => {
            return Ok(SearchOutcome::Exhausted { nodes, complete: false })
        }
        Err(e) => return Err(e),
    }
    let members: Vec<Member> = dfs
        .chosen
        .iter()
        .map(|&(r, c)| Member::new(dfs.radii[r], dfs.candidates[r][c].clone()))
        .collect();
    let fam = TranslateFamily::balls(ctx.clone(), members)?;
    let at_e = multiplicity_at(&fam, &ctx.identity())?;
    if at_e < k {
        return Err(Error::Internal(format!("witness has multiplicity {at_e} < {k} at 1")));
    }
    Ok(SearchOutcome::Found(IncrementalSequence::verify(fam)?))
}
