use std::fmt;

use serde::{Deserialize, Serialize};

/// A group element in canonical form.
///
/// Equality is structural. The derived ordering (variant, then
/// lexicographic on the encoding) is the canonical order used for
/// tie-breaking throughout the crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupElement {
    /// Integer vector.
    Zd(Vec<i64>),
    /// `(k, m, n)` for the matrix with rows `(1, k, m)`, `(0, 1, n)`, `(0, 0, 1)`.
    Heisenberg([i64; 3]),
    /// Freely reduced word; letter `i` is the `i`-th basis element and `-i`
    /// its inverse.
    Free(Vec<i32>),
    /// Sorted `(coordinate, value)` pairs with no zero values.
    ZInf(Vec<(u32, i64)>),
}

impl GroupElement {
    pub fn heis(k: i64, m: i64, n: i64) -> Self {
        GroupElement::Heisenberg([k, m, n])
    }

    /// Builds a free-group element, reducing the word.
    pub fn free_word(letters: &[i32]) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            assert!(l != 0, "free-group letters are non-zero");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupElement::Free(out)
    }

    /// Builds a `Z^∞` element from arbitrary pairs, summing duplicates and
    /// dropping zeros.
    pub fn zinf(pairs: &[(u32, i64)]) -> Self {
        let mut v: Vec<(u32, i64)> = pairs.to_vec();
        v.sort_unstable_by_key(|p| p.0);
        let mut out: Vec<(u32, i64)> = Vec::with_capacity(v.len());
        for (i, x) in v {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += x,
                _ => out.push((i, x)),
            }
        }
        out.retain(|p| p.1 != 0);
        GroupElement::ZInf(out)
    }

    pub fn as_heis(&self) -> Option<&[i64; 3]> {
        match self {
            GroupElement::Heisenberg(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Zd(v) => v.iter().all(|&x| x == 0),
            GroupElement::Heisenberg(t) => *t == [0, 0, 0],
            GroupElement::Free(w) => w.is_empty(),
            GroupElement::ZInf(p) => p.is_empty(),
        }
    }

    /// Group law. Callers guarantee both operands come from the same group.
    pub(crate) fn mul_unchecked(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::Zd(a), GroupElement::Zd(b)) => {
                GroupElement::Zd(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupElement::Heisenberg([k, m, n]), GroupElement::Heisenberg([k2, m2, n2])) => {
                GroupElement::Heisenberg([k + k2, m + m2 + k * n2, n + n2])
            }
            (GroupElement::Free(a), GroupElement::Free(b)) => {
                let mut out = a.clone();
                let mut rest = b.as_slice();
                while let (Some(&x), Some(&y)) = (out.last(), rest.first()) {
                    if x == -y {
                        out.pop();
                        rest = &rest[1..];
                    } else {
                        break;
                    }
                }
                out.extend_from_slice(rest);
                GroupElement::Free(out)
            }
            (GroupElement::ZInf(a), GroupElement::ZInf(b)) => {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let pick = match (a.get(i), b.get(j)) {
                        (Some(x), Some(y)) if x.0 == y.0 => {
                            i += 1;
                            j += 1;
                            (x.0, x.1 + y.1)
                        }
                        (Some(x), Some(y)) if x.0 < y.0 => {
                            i += 1;
                            *x
                        }
                        (Some(x), None) => {
                            i += 1;
                            *x
                        }
                        (_, Some(y)) => {
                            j += 1;
                            *y
                        }
                        (None, None) => unreachable!(),
                    };
                    if pick.1 != 0 {
                        out.push(pick);
                    }
                }
                GroupElement::ZInf(out)
            }
            _ => panic!("mixed group kinds: {self} and {other}"),
        }
    }

    pub(crate) fn inv_unchecked(&self) -> GroupElement {
        match self {
            GroupElement::Zd(v) => GroupElement::Zd(v.iter().map(|x| -x).collect()),
            // (k,m,n)⁻¹ = (-k, kn - m, -n)
            GroupElement::Heisenberg([k, m, n]) => GroupElement::Heisenberg([-k, k * n - m, -n]),
            GroupElement::Free(w) => GroupElement::Free(w.iter().rev().map(|l| -l).collect()),
            GroupElement::ZInf(p) => GroupElement::ZInf(p.iter().map(|&(i, x)| (i, -x)).collect()),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Zd(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Heisenberg([k, m, n]) => write!(f, "[{k},{m},{n}]"),
            GroupElement::Free(w) => {
                if w.is_empty() {
                    return write!(f, "e");
                }
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "<{}>", parts.join(" "))
            }
            GroupElement::ZInf(p) => {
                let parts: Vec<String> = p.iter().map(|(i, x)| format!("{i}:{x}")).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}
