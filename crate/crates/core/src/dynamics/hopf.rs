use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::averaging::{Annulus, BallSums};
use crate::error::{Error, Result};

/// A finitely supported rational function on `Z`. Zero values are never
/// stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZFunction {
    values: BTreeMap<i64, BigRational>,
}

impl ZFunction {
    pub fn new(pairs: impl IntoIterator<Item = (i64, BigRational)>) -> Self {
        let mut values: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (s, v) in pairs {
            *values.entry(s).or_default() += v;
        }
        values.retain(|_, v| !v.is_zero());
        ZFunction { values }
    }

    /// The indicator `δ_s`.
    pub fn delta(s: i64) -> Self {
        Self::new([(s, BigRational::from_integer(1.into()))])
    }

    pub fn get(&self, s: i64) -> BigRational {
        self.values.get(&s).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = (&i64, &BigRational)> {
        self.values.iter()
    }

    pub fn total(&self) -> BigRational {
        self.values.values().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.values().all(|v| !v.is_negative())
    }

    /// `x ↦ f(x - t)`.
    pub fn shifted(&self, t: i64) -> Self {
        ZFunction { values: self.values.iter().map(|(s, v)| (s + t, v.clone())).collect() }
    }

    /// `S_{[-n, n]}(f, x) = Σ_{|h| ≤ n} f(x + h)`, summed over the support.
    pub fn window_sum(&self, n: &BigUint, x: i64) -> BigRational {
        let lo = BigInt::from(x) - BigInt::from(n.clone());
        let hi = BigInt::from(x) + BigInt::from(n.clone());
        let lo = lo.to_i64().unwrap_or(i64::MIN);
        let hi = hi.to_i64().unwrap_or(i64::MAX);
        self.values.range(lo..=hi).map(|(_, v)| v).sum()
    }

    /// `Σ_{h ∈ offsets} f(x + h)` for an arbitrary finite window.
    pub fn set_sum(&self, offsets: &[i64], x: i64) -> BigRational {
        offsets.iter().map(|h| self.get(x + h)).sum()
    }

    /// Largest `|s - x|` over the support, `0` for the zero function.
    pub fn reach(&self, x: i64) -> u64 {
        let ends = [self.values.keys().next(), self.values.keys().next_back()];
        ends.iter().flatten().map(|s| (**s - x).unsigned_abs()).max().unwrap_or(0)
    }
}

impl BallSums for ZFunction {
    type Point = i64;

    fn ball_sum(&self, r: &BigUint, x: &i64) -> Result<BigRational> {
        Ok(self.window_sum(r, *x))
    }

    fn annulus_sum_direct(&self, a: &Annulus, x: &i64, budget: usize) -> Result<BigRational> {
        let outer = a.outer.to_i64().filter(|o| (*o as u128) * 2 < budget as u128);
        let outer = outer.ok_or(Error::Budget { limit: budget, layers: 0 })?;
        let inner = a.inner.to_i64().unwrap_or(i64::MAX);
        let mut total = BigRational::zero();
        for h in -outer..=outer {
            if h.abs() > inner {
                total += self.get(x + h);
            }
        }
        Ok(total)
    }
}

/// `Z` acting on itself by translation with counting measure: the setting
/// where ratio averages over intervals always converge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopfSystem {
    pub phi: ZFunction,
    pub psi: ZFunction,
}

impl HopfSystem {
    pub fn new(phi: ZFunction, psi: ZFunction) -> Result<Self> {
        if psi.total().is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(HopfSystem { phi, psi })
    }

    /// `Σφ / Σψ`.
    pub fn limit(&self) -> BigRational {
        self.phi.total() / self.psi.total()
    }

    /// `R_{[-n, n]}(φ, ψ, x)`.
    pub fn ratio(&self, n: &BigUint, x: i64) -> Result<BigRational> {
        let den = self.psi.window_sum(n, x);
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.phi.window_sum(n, x) / den)
    }

    /// Ratio over an arbitrary finite window of offsets.
    pub fn ratio_over(&self, offsets: &[i64], x: i64) -> Result<BigRational> {
        let den = self.psi.set_sum(offsets, x);
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.phi.set_sum(offsets, x) / den)
    }

    /// Once `n` reaches this value both supports lie in `[x - n, x + n]` and
    /// the ratio equals [`limit`](Self::limit).
    pub fn absorption_threshold(&self, x: i64) -> u64 {
        self.phi.reach(x).max(self.psi.reach(x))
    }
}
