pub mod averaging;
pub mod cli;
pub mod covering;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod group;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/covering.md")]
    mod covering {}
    #[doc = include_str!("../../../book/src/averaging.md")]
    mod averaging {}
    #[doc = include_str!("../../../book/src/stacking.md")]
    mod stacking {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
