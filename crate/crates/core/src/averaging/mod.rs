//! The averaging subsequence for groups of polynomial growth, and the
//! density statistics used to test convergence along it.
//!
//! Indices are grouped into blocks `J_m = [2^{m-1}, 2^m)`. Inside a block the
//! radii `n(i)` form an arithmetic progression whose step `3N(m)` is three
//! times the last radius of the previous block, which makes the boundary
//! annuli `∂*F_i` of consecutive sets nest cleanly.

mod density;
mod index;
mod sets;

pub use density::{
    abs_deviation, dls, upper_density, upper_density_periodic, DensityEstimate, DlsPoint,
    DlsReport, ZeroDensityRule,
};
pub use index::{block_of, growth_bound, BlockData, IndexSequence};
pub use sets::{
    averaging_sets, index_table, Annulus, AveragingSets, EnumeratedSets, IndexRow,
    Materialization, Which,
};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Sums `S_{B_r}(f, x) = Σ_{|h| ≤ r} f(T^h x)` of one fixed function.
pub trait BallSums {
    type Point;

    fn ball_sum(&self, r: &BigUint, x: &Self::Point) -> Result<BigRational>;

    /// `Σ` over `B_outer \ B_inner`, visiting every group element of the
    /// annulus rather than only the support. Used as an oracle.
    fn annulus_sum_direct(&self, annulus: &Annulus, x: &Self::Point, budget: usize) -> Result<BigRational>;
}

/// `φ_i(x) = S_{∂*F_i}(φ, x) / S_{F_{i-1}⁺}(φ, x)`, with the numerator taken
/// as a difference of two ball sums.
pub fn boundary_ratio_phi_i<E: BallSums>(
    eval: &E,
    seq: &IndexSequence,
    i: u64,
    x: &E::Point,
) -> Result<BigRational> {
    let (annulus, prev) = parts(seq, i)?;
    let den = eval.ball_sum(&prev, x)?;
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let num = eval.ball_sum(&annulus.outer, x)? - eval.ball_sum(&annulus.inner, x)?;
    Ok(num / den)
}

/// The same statistic with the numerator summed element by element.
pub fn boundary_ratio_phi_i_direct<E: BallSums>(
    eval: &E,
    seq: &IndexSequence,
    i: u64,
    x: &E::Point,
    budget: usize,
) -> Result<BigRational> {
    let (annulus, prev) = parts(seq, i)?;
    let den = eval.ball_sum(&prev, x)?;
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(eval.annulus_sum_direct(&annulus, x, budget)? / den)
}

fn parts(seq: &IndexSequence, i: u64) -> Result<(Annulus, BigUint)> {
    let sets = AveragingSets::new(seq, i);
    match (sets.boundary, sets.prev_plus) {
        (Some(a), Some(p)) => Ok((a, p)),
        _ => Err(Error::Precondition("the boundary statistic needs i ≥ 2".into())),
    }
}
