//! Progression covers of integer intervals, Kakeya and Besicovitch sets
//! over `Z^n` and `F_p^n`, and the entropy machinery that links them.
//!
//! Every construction returns a certificate that is re-checked
//! independently; [`oracle`] gives exact small optima to compare against.
//! The guide in `book/` walks through the modules with runnable examples.

pub mod checks;
pub mod compression;
pub mod constructions;
pub mod covering;
pub mod entropy;
pub mod erdos_selfridge;
pub mod error;
pub mod fp;
pub mod numbers;
pub mod oracle;
pub mod pipeline;
pub mod sets;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/projections.md")]
    mod projections {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/covering.md")]
    mod covering {}
    #[doc = include_str!("../../../book/src/compression.md")]
    mod compression {}
    #[doc = include_str!("../../../book/src/entropy.md")]
    mod entropy {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/intervals.md")]
    mod intervals {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
