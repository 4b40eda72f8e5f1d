//! Texture and scene recognition from normalized wavelet features.

// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod dynamics;
pub mod error;
pub mod feedback;
pub mod ingest;
pub mod patches;
pub mod pipeline;
pub mod plane;
pub mod pooling;
pub mod select;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/images.md")]
    mod images {}
    #[doc = include_str!("../../../book/src/wavelet.md")]
    mod wavelet {}
    #[doc = include_str!("../../../book/src/patches.md")]
    mod patches {}
    #[doc = include_str!("../../../book/src/classify.md")]
    mod classify {}
    #[doc = include_str!("../../../book/src/feedback.md")]
    mod feedback {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
