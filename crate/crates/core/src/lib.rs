//! Beer-recipe corpus analytics: completeness filtering, grist and hop
//! statistics, robust hypothesis tests, Gower dissimilarities, a relational
//! self-organizing map taxonomy and optimal leaf ordering for heatmaps.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod export;
pub mod gower;
pub mod grist;
pub mod hops;
pub mod inference;
pub mod matrix;
pub mod rng;
pub mod seriate;
pub mod pipeline;
pub mod report;
pub mod som;
pub mod synth;

pub use corpus::{filter_complete, parse_corpus, Corpus, Recipe, RejectionReport};
pub use error::{Error, Result};
pub use matrix::DissimilarityMatrix;
