//! Exact word length in the discrete Heisenberg group for the generators
//! `a^±1, b^±1`.
//!
//! Reading a word left to right traces a lattice path in the `(k, n)` plane:
//! `a^±1` moves horizontally and `b^±1` moves vertically, and right
//! multiplication by `b^±1` adds `±k` to the central coordinate. So `(k, m, n)`
//! is reached by a word of length `L` exactly when some path of `L` steps from
//! the origin to `(k, n)` has `∫ x dy = m`.
//!
//! For a fixed step count the attainable values of `∫ x dy` form an integer
//! interval: swapping two adjacent perpendicular steps moves the integral by
//! one, and inserting a cancelling pair never shrinks the attainable set. The
//! maximum is attained by a path that does all of its downward steps at its
//! leftmost column and all upward steps at its rightmost column, which leaves
//! a small optimisation over the number of vertical steps.

/// Largest `∫ x dy` over paths of exactly `len` unit steps from the origin to
/// `(k, n)`, or `None` when no such path exists.
fn max_area(k: i64, n: i64, len: i64) -> Option<i128> {
    let (ak, an) = (k.abs(), n.abs());
    if len < ak + an || (len - ak - an) % 2 != 0 {
        return None;
    }
    // Column extremes: x_min = -alpha, x_max = beta with alpha >= a0, beta >= b0.
    let a0 = (-k).max(0) as i128;
    let b0 = k.max(0) as i128;
    let n = n as i128;
    let mut best = i128::MIN;
    let mut v = an;
    while v <= len - ak {
        let h = (len - v) as i128;
        // Visiting both extremes and ending at k costs 2(alpha+beta) - |k|.
        let p = (h + ak as i128) / 2;
        let up = (v as i128 + n) / 2;
        let down = (v as i128 - n) / 2;
        let area = if up >= down {
            up * (p - a0) + down * a0
        } else {
            down * (p - b0) + up * b0
        };
        best = best.max(area);
        v += 2;
    }
    Some(best)
}

/// The closed range of central coordinates reachable at `(k, ·, n)` by words
/// of length exactly `len`.
pub fn heisenberg_area_range(k: i64, n: i64, len: u64) -> Option<(i128, i128)> {
    let len = len as i64;
    let hi = max_area(k, n, len)?;
    // Mirroring x -> -x negates the integral.
    let lo = -max_area(-k, n, len)?;
    Some((lo, hi))
}

fn reachable(k: i64, m: i64, n: i64, len: i64) -> bool {
    match heisenberg_area_range(k, n, len as u64) {
        Some((lo, hi)) => lo <= m as i128 && (m as i128) <= hi,
        None => false,
    }
}

/// Word length of `(k, m, n)`.
pub fn heisenberg_word_length(k: i64, m: i64, n: i64) -> u64 {
    let base = k.abs() + n.abs();
    // Lengths of the right parity form a monotone family of reachable sets.
    let mut hi = base;
    let mut step = 2;
    while !reachable(k, m, n, hi) {
        hi += step;
        step *= 2;
    }
    let mut lo = base;
    if reachable(k, m, n, lo) {
        return lo as u64;
    }
    // Invariant: lo unreachable, hi reachable, both of the right parity.
    while hi - lo > 2 {
        let mid = lo + ((hi - lo) / 4) * 2;
        if reachable(k, m, n, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi as u64
}

/// All `(k, m, n)` of word length exactly `len`, in lexicographic order.
///
/// Attainable sets grow with the length within a parity class, so the
/// sphere at `(k, ·, n)` is the range for `len` minus the range for `len - 2`.
pub fn heisenberg_sphere(len: u64) -> Vec<[i64; 3]> {
    let l = len as i64;
    let mut out = Vec::new();
    for k in -l..=l {
        let rest = l - k.abs();
        for n in -rest..=rest {
            if (rest - n.abs()) % 2 != 0 {
                continue;
            }
            let (lo, hi) = heisenberg_area_range(k, n, len).expect("parity checked");
            let inner = if len >= 2 { heisenberg_area_range(k, n, len - 2) } else { None };
            match inner {
                None => out.extend((lo..=hi).map(|m| [k, m as i64, n])),
                Some((ilo, ihi)) => {
                    out.extend((lo..ilo).map(|m| [k, m as i64, n]));
                    out.extend((ihi + 1..=hi).map(|m| [k, m as i64, n]));
                }
            }
        }
    }
    out
}
