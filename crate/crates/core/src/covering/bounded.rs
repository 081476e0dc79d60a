use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{GroupContext, GrowthConstants};

use super::{multiplicity, IncrementalSequence};

/// The constant `6^c·c₂/c₁` bounding the multiplicity of incremental
/// families whose radii lie in `[N, 2N]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundConstant {
    pub value: BigRational,
    /// Set for `c = 0`, where the bound carries no geometric content.
    pub degenerate: bool,
}

pub fn besicovitch_bound_constant(c: u32, c1: &BigRational, c2: &BigRational) -> Result<BoundConstant> {
    if !c1.is_positive() || !c2.is_positive() {
        return Err(Error::Invalid("growth constants must be positive".into()));
    }
    let six = BigRational::from_integer(BigInt::from(6));
    let mut value = BigRational::one();
    for _ in 0..c {
        value *= &six;
    }
    value = value * c2 / c1;
    Ok(BoundConstant { value, degenerate: c == 0 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedRadiusReport {
    pub holds: bool,
    pub measured: usize,
    pub bound: BoundConstant,
}

/// Checks that a verified incremental sequence with radii in `[n, 2n]` has
/// multiplicity at most the bound built from the context's growth constants.
pub fn verify_bounded_radius_multiplicity(seq: &IncrementalSequence, n: u64) -> Result<BoundedRadiusReport> {
    for m in seq.members() {
        if m.radius < n || m.radius > 2 * n {
            return Err(Error::Precondition(format!("radius {} outside [{n}, {}]", m.radius, 2 * n)));
        }
    }
    let growth = seq
        .family()
        .ctx()
        .growth()
        .ok_or_else(|| Error::Precondition("context has no growth constants".into()))?;
    let bound = besicovitch_bound_constant(growth.exponent, &growth.lower, &growth.upper)?;
    let measured = multiplicity(seq.family())?.multiplicity;
    let holds = BigRational::from_integer(BigInt::from(measured)) <= bound.value;
    Ok(BoundedRadiusReport { holds, measured, bound })
}

/// Least-squares slope of `log |B_n|` against `log n` over `lo ≤ n ≤ hi`.
/// `sizes[n]` is `|B_n|`.
pub fn log_log_slope(sizes: &[usize], lo: u64, hi: u64) -> f64 {
    let pts: Vec<(f64, f64)> = (lo.max(1)..=hi)
        .map(|n| ((n as f64).ln(), (sizes[n as usize] as f64).ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Growth constants for `c₁ n^c ≤ |B_n| ≤ c₂ n^c` on `1 ≤ n ≤ hi`. The
/// exponent is the rounded log-log slope over `[lo, hi]`; `c₁`, `c₂` are the
/// exact extreme ratios `|B_n| / n^c`.
pub fn fit_growth_constants(ctx: &GroupContext, lo: u64, hi: u64) -> Result<GrowthConstants> {
    if lo < 1 || hi <= lo {
        return Err(Error::Invalid("need 1 ≤ lo < hi".into()));
    }
    let sizes = ctx.ball_sizes(hi)?;
    let exponent = log_log_slope(&sizes, lo, hi)
        .round()
        .to_u32()
        .ok_or_else(|| Error::Internal("negative growth exponent".into()))?;
    let mut lower: Option<BigRational> = None;
    let mut upper = BigRational::zero();
    for n in 1..=hi {
        let ratio = BigRational::new(BigInt::from(sizes[n as usize]), BigInt::from(n).pow(exponent));
        if lower.as_ref().map_or(true, |l| ratio < *l) {
            lower = Some(ratio.clone());
        }
        if ratio > upper {
            upper = ratio;
        }
    }
    Ok(GrowthConstants { exponent, lower: lower.expect("hi ≥ 1"), upper })
}
