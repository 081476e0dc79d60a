use super::{GroupContext, GroupElement, GroupKind};

/// An automorphism that permutes the standard generating set, and therefore
/// preserves word length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Automorphism {
    Identity,
    /// Coordinate `i` of the image is `signs[i]` times coordinate `perm[i]`.
    SignedPermutation { perm: Vec<usize>, signs: Vec<i8> },
    /// Heisenberg: optionally invert `a`, optionally invert `b`, then
    /// optionally swap `a` and `b`.
    Heisenberg { invert_a: bool, invert_b: bool, swap: bool },
}

impl Automorphism {
    pub fn apply(&self, g: &GroupElement) -> GroupElement {
        match (self, g) {
            (Automorphism::Identity, _) => g.clone(),
            (Automorphism::SignedPermutation { perm, signs }, GroupElement::Zd(v)) => {
                GroupElement::Zd((0..v.len()).map(|i| signs[i] as i64 * v[perm[i]]).collect())
            }
            (Automorphism::SignedPermutation { perm, signs }, GroupElement::Free(w)) => {
                // Letter l is sent to ±(p+1) where perm[p] = |l|-1.
                let mut inv = vec![0usize; perm.len()];
                for (i, &p) in perm.iter().enumerate() {
                    inv[p] = i;
                }
                let letters: Vec<i32> = w
                    .iter()
                    .map(|&l| {
                        let i = inv[l.unsigned_abs() as usize - 1];
                        l.signum() * signs[i] as i32 * (i as i32 + 1)
                    })
                    .collect();
                GroupElement::Free(letters)
            }
            (Automorphism::Heisenberg { invert_a, invert_b, swap }, GroupElement::Heisenberg(t)) => {
                let [mut k, mut m, mut n] = *t;
                if *invert_a {
                    k = -k;
                    m = -m;
                }
                if *invert_b {
                    m = -m;
                    n = -n;
                }
                if *swap {
                    let (k2, m2, n2) = (n, k * n - m, k);
                    k = k2;
                    m = m2;
                    n = n2;
                }
                GroupElement::Heisenberg([k, m, n])
            }
            _ => panic!("automorphism does not act on {g}"),
        }
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn signed_permutations(d: usize) -> Vec<Automorphism> {
    let mut out = Vec::new();
    for perm in permutations(d) {
        for mask in 0..(1u32 << d) {
            let signs = (0..d).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            out.push(Automorphism::SignedPermutation { perm: perm.clone(), signs });
        }
    }
    out
}

/// Largest rank for which the full signed permutation group is listed.
const MAX_PERMUTED_RANK: usize = 5;

impl GroupContext {
    /// Automorphisms permuting the generating set. Only standard contexts
    /// have a non-trivial list; otherwise just the identity map is returned.
    /// The first entry acts as the identity.
    pub fn automorphisms(&self) -> Vec<Automorphism> {
        if !self.is_standard() {
            return vec![Automorphism::Identity];
        }
        match self.kind() {
            GroupKind::Heisenberg => {
                let mut out = Vec::new();
                for swap in [false, true] {
                    for invert_a in [false, true] {
                        for invert_b in [false, true] {
                            out.push(Automorphism::Heisenberg { invert_a, invert_b, swap });
                        }
                    }
                }
                out
            }
            GroupKind::Zd(d) | GroupKind::Free(d) if d <= MAX_PERMUTED_RANK => signed_permutations(d),
            _ => vec![Automorphism::Identity],
        }
    }
}
