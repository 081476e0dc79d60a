use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ser_rat;

fn ratio(p: u64, q: u64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Finite-horizon density of an index set `I ⊆ {1, 2, …}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityEstimate {
    pub horizon: u64,
    pub hits: u64,
    /// `|I ∩ [1, N]| / N`.
    #[serde(serialize_with = "ser_rat")]
    pub estimate: BigRational,
    /// `max_{M ≤ N} |I ∩ [1, M]| / M`.
    #[serde(serialize_with = "ser_rat")]
    pub running_max: BigRational,
    pub running_max_at: u64,
    /// Exact density, known when the set is periodic.
    #[serde(skip)]
    pub exact: Option<BigRational>,
}

/// Scans `1..=horizon`. The running max only changes at hits, so it is
/// tracked with one comparison per hit.
pub fn upper_density(member: impl Fn(u64) -> bool, horizon: u64) -> Result<DensityEstimate> {
    if horizon == 0 {
        return Err(Error::Invalid("horizon must be positive".into()));
    }
    let mut hits = 0u64;
    let (mut best_p, mut best_q) = (0u64, 1u64);
    for m in 1..=horizon {
        if member(m) {
            hits += 1;
            if (hits as u128) * (best_q as u128) > (best_p as u128) * (m as u128) {
                best_p = hits;
                best_q = m;
            }
        }
    }
    Ok(DensityEstimate {
        horizon,
        hits,
        estimate: ratio(hits, horizon),
        running_max: ratio(best_p, best_q),
        running_max_at: if best_p == 0 { 0 } else { best_q },
        exact: None,
    })
}

/// Density of `{n : n mod period ∈ residues}`, with the exact value attached.
pub fn upper_density_periodic(period: u64, residues: &[u64], horizon: u64) -> Result<DensityEstimate> {
    if period == 0 || residues.iter().any(|&r| r >= period) {
        return Err(Error::Invalid("residues must lie in [0, period)".into()));
    }
    let mut rs = residues.to_vec();
    rs.sort_unstable();
    rs.dedup();
    let mut est = upper_density(|n| rs.binary_search(&(n % period)).is_ok(), horizon)?;
    est.exact = Some(ratio(rs.len() as u64, period));
    Ok(est)
}

/// When a finite-horizon threshold set counts as having density zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZeroDensityRule {
    /// No hits at all.
    Exact,
    /// `hits² ≤ horizon`, which admits sparse sets such as the squares.
    #[default]
    Sqrt,
}

impl ZeroDensityRule {
    pub fn is_zero(self, hits: u64, horizon: u64) -> bool {
        match self {
            ZeroDensityRule::Exact => hits == 0,
            ZeroDensityRule::Sqrt => (hits as u128) * (hits as u128) <= horizon as u128,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DlsPoint {
    #[serde(serialize_with = "ser_rat")]
    pub threshold: BigRational,
    pub hits: u64,
    #[serde(serialize_with = "ser_rat")]
    pub density: BigRational,
    pub zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlsReport {
    /// Smallest grid threshold whose superlevel set has density zero;
    /// `None` when no grid point qualifies.
    pub value: Option<BigRational>,
    pub profile: Vec<DlsPoint>,
}

/// Density-limsup of `a_1, a_2, …` (given as `values[0], values[1], …`),
/// resolved on a sorted threshold grid.
pub fn dls(values: &[BigRational], grid: &[BigRational], rule: ZeroDensityRule) -> Result<DlsReport> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty threshold grid".into()));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Invalid("threshold grid must be sorted".into()));
    }
    if values.is_empty() {
        return Err(Error::Invalid("empty sequence".into()));
    }
    let horizon = values.len() as u64;
    let mut profile = Vec::with_capacity(grid.len());
    let mut value = None;
    for t in grid {
        let hits = values.iter().filter(|a| *a > t).count() as u64;
        let zero = rule.is_zero(hits, horizon);
        if zero && value.is_none() {
            value = Some(t.clone());
        }
        profile.push(DlsPoint { threshold: t.clone(), hits, density: ratio(hits, horizon), zero });
    }
    Ok(DlsReport { value, profile })
}

/// `|a_n - limit|` termwise, the usual input to [`dls`].
pub fn abs_deviation(values: &[BigRational], limit: &BigRational) -> Vec<BigRational> {
    values.iter().map(|a| (a - limit).abs()).collect()
}
