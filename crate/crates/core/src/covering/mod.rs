//! Multiplicity of translate families, incremental sequences, and
//! diagnostics for the Besicovitch covering property.
//!
//! A family `{F_{n(i)} g_i}` is *incremental* when the radii are
//! non-increasing and each center avoids every earlier member. An incremental
//! family of multiplicity `k` witnesses failure of the covering property at
//! level `k`; searches here can only ever certify such failures.

mod bounded;
mod family;
mod heisenberg;
mod search;

pub use bounded::{
    besicovitch_bound_constant, fit_growth_constants, log_log_slope,
    verify_bounded_radius_multiplicity, BoundConstant, BoundedRadiusReport,
};
pub use family::{Member, SetProvider, TranslateFamily};
pub use heisenberg::{
    heisenberg_incremental, max_internal_gap, HeisenbergIncremental, RecipeAttempt, RecipeBudget,
    HEISENBERG_DEFAULT_BUDGET,
};
pub use search::{incremental_witness_search, SearchOutcome};

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupContext, GroupElement};

/// Largest union for which the per-point histogram is kept.
pub const HISTOGRAM_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityReport {
    pub multiplicity: usize,
    /// Canonically smallest point attaining the multiplicity.
    pub witness: GroupElement,
    pub histogram: Option<BTreeMap<GroupElement, usize>>,
}

/// Exact multiplicity by enumerating every member.
pub fn multiplicity(fam: &TranslateFamily) -> Result<MultiplicityReport> {
    let budget = fam.ctx().budget();
    let mut counts: IndexMap<GroupElement, usize> = IndexMap::new();
    let mut best = 0usize;
    for i in 0..fam.len() {
        for x in fam.member_points(i)? {
            let c = counts.entry(x).or_insert(0);
            *c += 1;
            best = best.max(*c);
        }
        if counts.len() > budget {
            return Err(Error::Budget { limit: budget, layers: i as u64 });
        }
    }
    let witness = counts
        .iter()
        .filter(|(_, &c)| c == best)
        .map(|(g, _)| g)
        .min()
        .cloned()
        .expect("members are non-empty");
    let histogram = (counts.len() <= HISTOGRAM_LIMIT).then(|| counts.into_iter().collect());
    Ok(MultiplicityReport { multiplicity: best, witness, histogram })
}

/// Number of members containing `g`.
pub fn multiplicity_at(fam: &TranslateFamily, g: &GroupElement) -> Result<usize> {
    let mut count = 0;
    for i in 0..fam.len() {
        if fam.contains(i, g)? {
            count += 1;
        }
    }
    Ok(count)
}

/// First violation of the incremental conditions; indices are 1-based as in
/// the usual `j > i` notation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// `n(j) > n(i)` with `j = i + 1`.
    RadiusIncrease { j: usize, i: usize },
    /// `g_j ∈ F_{n(i)} g_i` with `i < j`.
    CenterCovered { j: usize, i: usize },
}

/// `None` when the family is incremental, otherwise the first violation in
/// order of `j`, then `i`.
pub fn is_incremental(fam: &TranslateFamily) -> Result<Option<Violation>> {
    let ms = fam.members();
    for j in 0..ms.len() {
        if j > 0 && ms[j].radius > ms[j - 1].radius {
            return Ok(Some(Violation::RadiusIncrease { j: j + 1, i: j }));
        }
        for i in 0..j {
            if fam.contains(i, &ms[j].center)? {
                return Ok(Some(Violation::CenterCovered { j: j + 1, i: i + 1 }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub incremental: bool,
    pub multiplicity: usize,
    pub witness: GroupElement,
}

/// A family together with its verification certificate.
#[derive(Clone, Debug)]
pub struct IncrementalSequence {
    family: TranslateFamily,
    certificate: Certificate,
}

impl IncrementalSequence {
    /// Checks the family and computes its certificate. Fails when the family
    /// is not incremental.
    pub fn verify(family: TranslateFamily) -> Result<Self> {
        if let Some(v) = is_incremental(&family)? {
            return Err(Error::Verification(format!("not incremental: {v:?}")));
        }
        let report = multiplicity(&family)?;
        let certificate = Certificate {
            incremental: true,
            multiplicity: report.multiplicity,
            witness: report.witness,
        };
        Ok(IncrementalSequence { family, certificate })
    }

    pub fn family(&self) -> &TranslateFamily {
        &self.family
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn members(&self) -> &[Member] {
        self.family.members()
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn to_json(&self) -> FamilyJson {
        FamilyJson::new(&self.family, Some(&self.certificate))
    }
}

/// Serialized form of a family and its certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub group: String,
    pub generators: Vec<String>,
    pub members: Vec<MemberJson>,
    pub certificate: Option<CertificateJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberJson {
    pub radius: u64,
    pub center: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub incremental: bool,
    pub multiplicity: usize,
    pub witness: String,
}

impl FamilyJson {
    pub fn new(fam: &TranslateFamily, cert: Option<&Certificate>) -> Self {
        FamilyJson {
            group: fam.ctx().kind().name(),
            generators: fam.ctx().generators().iter().map(|g| g.to_string()).collect(),
            members: fam
                .members()
                .iter()
                .map(|m| MemberJson { radius: m.radius, center: m.center.to_string() })
                .collect(),
            certificate: cert.map(|c| CertificateJson {
                incremental: c.incremental,
                multiplicity: c.multiplicity,
                witness: c.witness.to_string(),
            }),
        }
    }
}

/// Greedy incremental subsequence of a family sorted by non-increasing
/// radius: keep the first member, then repeatedly the first member whose
/// center is not yet covered. Every input center ends up covered.
pub fn greedy_incremental(fam: &TranslateFamily) -> Result<IncrementalSequence> {
    let ms = fam.members();
    if ms.windows(2).any(|w| w[1].radius > w[0].radius) {
        return Err(Error::Precondition("radii must be non-increasing".into()));
    }
    let e = fam.ctx().identity();
    for m in ms {
        if !fam.provider().contains(fam.ctx(), m.radius, &e)? {
            return Err(Error::Precondition(format!("F_{} misses the identity", m.radius)));
        }
    }
    let mut kept: Vec<usize> = Vec::new();
    for j in 0..ms.len() {
        let mut covered = false;
        for &i in &kept {
            if fam.contains(i, &ms[j].center)? {
                covered = true;
                break;
            }
        }
        if !covered {
            kept.push(j);
        }
    }
    IncrementalSequence::verify(fam.subfamily(&kept)?)
}

/// Returns `m = |g|` and checks `B_n·g ⊆ B_m·B_n = B_{m+n}` for `n ≤ n_max`
/// on a deterministic sample of each ball.
pub fn almost_central_expander(ctx: &GroupContext, g: &GroupElement, n_max: u64) -> Result<u64> {
    const SAMPLE: usize = 2000;
    let m = ctx.word_length(g)?;
    for n in 0..=n_max {
        let ball = ctx.ball(n)?;
        let stride = (ball.len() / SAMPLE).max(1);
        for x in ball.iter().step_by(stride) {
            let y = ctx.multiply(x, g)?;
            if ctx.word_length(&y)? > m + n {
                return Err(Error::Internal(format!("{x}·{g} escapes B_{}", m + n)));
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests;
