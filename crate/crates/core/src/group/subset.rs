use indexmap::IndexSet;

use super::GroupElement;

/// A finite set of group elements with constant-time membership and
/// deterministic (insertion) iteration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteSubset {
    elements: IndexSet<GroupElement>,
    ball_radius: Option<u64>,
}

impl FiniteSubset {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn from_ball(radius: u64, elems: impl IntoIterator<Item = GroupElement>) -> Self {
        FiniteSubset {
            elements: elems.into_iter().collect(),
            ball_radius: Some(radius),
        }
    }

    /// `Some(n)` when this set was produced as the ball `B_n`.
    pub fn ball_radius(&self) -> Option<u64> {
        self.ball_radius
    }

    pub fn insert(&mut self, g: GroupElement) -> bool {
        let fresh = self.elements.insert(g);
        if fresh {
            self.ball_radius = None;
        }
        fresh
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.contains(g)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroupElement> {
        self.elements.iter()
    }

    /// Elements in canonical order.
    pub fn sorted(&self) -> Vec<GroupElement> {
        let mut v: Vec<GroupElement> = self.elements.iter().cloned().collect();
        v.sort();
        v
    }

    pub fn is_subset(&self, other: &FiniteSubset) -> bool {
        self.elements.iter().all(|g| other.contains(g))
    }
}

impl FromIterator<GroupElement> for FiniteSubset {
    fn from_iter<I: IntoIterator<Item = GroupElement>>(iter: I) -> Self {
        FiniteSubset {
            elements: iter.into_iter().collect(),
            ball_radius: None,
        }
    }
}

impl<'a> IntoIterator for &'a FiniteSubset {
    type Item = &'a GroupElement;
    type IntoIter = indexmap::set::Iter<'a, GroupElement>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}
