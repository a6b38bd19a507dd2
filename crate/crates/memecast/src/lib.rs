//! Order-of-magnitude popularity forecasting for hashtags.
//!
//! Given a follower network, a community assignment, and the first few
//! adoption events of each hashtag, this crate extracts thirteen
//! topology-, community-, and growth-based features, trains a random
//! forest to predict the order of magnitude a hashtag's final popularity
//! will reach, and compares it against a set of simpler reference models
//! under stratified cross-validation.
//!
//! The `memecast` binary exposes the same pipeline as subcommands:
//! `simulate`, `detect`, `features`, `evaluate`, and `predict`.

pub mod baselines;
pub mod cascade;
pub mod cli;
pub mod community;
pub mod error;
pub mod eval;
pub mod features;
pub mod forest;
pub mod graph;
pub mod seeds;
pub mod simgen;

pub use error::{Error, Result};

/// The guide under `book/` mounted as documentation, so `cargo test --doc`
/// compiles and runs every code block in it — the book cannot drift from
/// the library.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/data-formats.md")]
    pub mod data_formats {}
    #[doc = include_str!("../../../book/src/networks.md")]
    pub mod networks {}
    #[doc = include_str!("../../../book/src/communities.md")]
    pub mod communities {}
    #[doc = include_str!("../../../book/src/windows-and-features.md")]
    pub mod windows_and_features {}
    #[doc = include_str!("../../../book/src/popularity-classes.md")]
    pub mod popularity_classes {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub mod simulation {}
    #[doc = include_str!("../../../book/src/forest.md")]
    pub mod forest_guide {}
    #[doc = include_str!("../../../book/src/reference-models.md")]
    pub mod reference_models {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    pub mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli_guide {}
}
