use serde::Serialize;

use crate::error::Result;
use crate::group::{GroupContext, GroupElement};

/// A translated ball `B_r·c`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Component {
    pub radius: u64,
    pub center: GroupElement,
}

/// A finite union of translated balls, the exact form of every `G_n` when
/// the averaging sets are balls: `B_a·(B_r·c) = B_{a+r}·c`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Shape {
    components: Vec<Component>,
}

impl Shape {
    pub fn point(g: GroupElement) -> Self {
        Shape { components: vec![Component { radius: 0, center: g }] }
    }

    pub fn from_components(mut components: Vec<Component>) -> Self {
        components.sort();
        components.dedup();
        Shape { components }
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn contains(&self, ctx: &GroupContext, g: &GroupElement) -> Result<bool> {
        for c in &self.components {
            if ctx.translated_ball_contains(c.radius, &c.center, g)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// True when some single component contains `B_k·g`. Sufficient for
    /// `B_k·g ⊆ self`, and exact whenever the components are far apart.
    pub fn contains_ball(&self, ctx: &GroupContext, k: u64, g: &GroupElement) -> Result<bool> {
        for c in &self.components {
            if c.radius >= k && ctx.translated_ball_contains(c.radius - k, &c.center, g)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `self·γ`.
    pub fn right_translate(&self, ctx: &GroupContext, gamma: &GroupElement) -> Result<Shape> {
        let mut comps = Vec::with_capacity(self.components.len());
        for c in &self.components {
            comps.push(Component { radius: c.radius, center: ctx.multiply(&c.center, gamma)? });
        }
        Ok(Shape::from_components(comps))
    }

    /// `B_a·self`.
    pub fn thicken(&self, a: u64) -> Shape {
        Shape::from_components(
            self.components.iter().map(|c| Component { radius: c.radius + a, center: c.center.clone() }).collect(),
        )
    }

    pub fn union(mut self, other: Shape) -> Shape {
        self.components.extend(other.components);
        Shape::from_components(self.components)
    }

    /// `max (|c| + r)`, so that the shape lies in `B_m`.
    pub fn outer_radius(&self, ctx: &GroupContext) -> Result<u64> {
        let mut m = 0;
        for c in &self.components {
            m = m.max(ctx.word_length(&c.center)? + c.radius);
        }
        Ok(m)
    }
}
