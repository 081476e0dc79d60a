use std::sync::RwLock;

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::exact::{ser_biguint, ser_opt_biguint};

/// Block `m` of the index recursion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockData {
    pub m: u32,
    /// `J_m = [start, end)`.
    pub start: u64,
    pub end: u64,
    #[serde(serialize_with = "ser_biguint")]
    pub big_n: BigUint,
    /// Start of the arithmetic block; undefined for `m = 1`.
    #[serde(serialize_with = "ser_opt_biguint")]
    pub l: Option<BigUint>,
}

/// The averaging radii `n(i)`.
///
/// `n(1) = 1`. For `m ≥ 2` and `i ∈ J_m = [2^{m-1}, 2^m)`,
/// `n(i) = L(m) + 3N(m)·(i - 2^{m-1})` where `N(m) = n(2^{m-1} - 1)` and
/// `L(m) = 2^{m-1}·3N(m)`. `N(1)` is taken to be 0.
///
/// Only the per-block pair `(N(m), L(m))` is stored; `n(i)` is one
/// multiply-add away. The table grows under a write lock and is shared
/// freely otherwise.
#[derive(Debug, Default)]
pub struct IndexSequence {
    blocks: RwLock<Vec<(BigUint, Option<BigUint>)>>,
}

/// The block `m` with `i ∈ J_m`.
pub fn block_of(i: u64) -> u32 {
    assert!(i >= 1, "indices start at 1");
    64 - i.leading_zeros()
}

impl IndexSequence {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure(&self, m: u32) {
        assert!((1..=64).contains(&m), "block {m} out of range");
        if self.blocks.read().unwrap().len() >= m as usize {
            return;
        }
        let mut blocks = self.blocks.write().unwrap();
        if blocks.is_empty() {
            blocks.push((BigUint::zero(), None));
        }
        while blocks.len() < m as usize {
            let next = blocks.len() as u32 + 1;
            // N(next) = n(2^{next-1} - 1), the last index of the previous block.
            let big_n = if next == 2 {
                BigUint::one()
            } else {
                let (pn, pl) = &blocks[next as usize - 2];
                let steps = (1u64 << (next - 2)) - 1;
                pl.as_ref().expect("m ≥ 2 has L") + BigUint::from(3u32) * pn * steps
            };
            let l = BigUint::from(1u64 << (next - 1)) * 3u32 * &big_n;
            blocks.push((big_n, Some(l)));
        }
    }

    pub fn n(&self, i: u64) -> BigUint {
        let m = block_of(i);
        if m == 1 {
            return BigUint::one();
        }
        self.ensure(m);
        let blocks = self.blocks.read().unwrap();
        let (big_n, l) = &blocks[m as usize - 1];
        let t = i - (1u64 << (m - 1));
        l.as_ref().unwrap() + BigUint::from(3u32) * big_n * t
    }

    /// `N(m)`.
    pub fn big_n(&self, m: u32) -> BigUint {
        self.ensure(m);
        self.blocks.read().unwrap()[m as usize - 1].0.clone()
    }

    /// `L(m)`, `None` for `m = 1`.
    pub fn l(&self, m: u32) -> Option<BigUint> {
        self.ensure(m);
        self.blocks.read().unwrap()[m as usize - 1].1.clone()
    }

    pub fn block_data(&self, m: u32) -> BlockData {
        let end = if m == 64 { u64::MAX } else { 1u64 << m };
        BlockData { m, start: 1u64 << (m - 1), end, big_n: self.big_n(m), l: self.l(m) }
    }

    /// `n(i-1) + N(m(i-1)) ≤ n(i) - N(m(i))`, i.e. `F_{i-1}⁺` and `∂*F_i`
    /// sit inside `F_i⁺` without overlapping. Requires `i ≥ 2`.
    pub fn nesting_holds(&self, i: u64) -> bool {
        assert!(i >= 2, "nesting compares with i - 1");
        let lhs = self.n(i - 1) + self.big_n(block_of(i - 1));
        let n = self.n(i);
        let inner = self.big_n(block_of(i));
        n >= inner && lhs <= n - inner
    }

    /// First `2 ≤ i ≤ max_i` where nesting fails.
    pub fn first_nesting_failure(&self, max_i: u64) -> Option<u64> {
        (2..=max_i).find(|&i| !self.nesting_holds(i))
    }

    /// Checks `N(m) ≤ (6·2^{m-1})^m`.
    pub fn growth_bound_holds(&self, m: u32) -> bool {
        self.big_n(m) <= growth_bound(m)
    }
}

/// `(6·2^{m-1})^m`.
pub fn growth_bound(m: u32) -> BigUint {
    Pow::pow(BigUint::from(6u32) << (m - 1) as usize, m)
}
