//! Capacity-constrained two-sided re-ranking of recommendations.
//!
//! Users and items both rank each other by a predicted relevance score. Many-to-many
//! deferred acceptance turns those rankings into a stable matching in which every
//! user receives `k` items and no item is shown to more users than its cap allows.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix it to `f64`.
//!
//! ```
//! use stable_rerank::{mmda_rerank, CapacityConfig, PreferenceProfile};
//!
//! // both users want item 0 first, item 0 prefers user 1
//! let prefs = PreferenceProfile::from_rankings(
//!     vec![vec![0, 1], vec![0, 1]],
//!     vec![vec![1, 0], vec![0, 1]],
//!     None,
//! )?;
//! let caps = CapacityConfig::uniform(1, 1, 2)?;
//! let m = mmda_rerank(&prefs, &caps)?;
//! assert_eq!(m.user_items(0), &[1]);
//! assert_eq!(m.user_items(1), &[0]);
//! # Ok::<(), stable_rerank::Error>(())
//! ```

pub mod baselines;
pub mod capacity;
pub mod dataset;
pub mod error;
pub mod knn;
pub mod matching;
pub mod metrics;
pub mod mmda;
pub mod prefs;
pub mod scalar;
pub mod scores;
pub mod split;

pub use baselines::{
    bayesian_rerank, bayesian_rescore, enumerate_stable_matchings, topk_identity,
    user_optimal_oracle, BrConfig,
};
pub use capacity::{validate_feasibility, CapacityConfig};
pub use dataset::{load_interactions, EntityIndex, Format, Interaction, InteractionDataset};
pub use error::{Error, Result};
pub use knn::{knn_scores, KnnConfig};
pub use matching::Matching;
pub use metrics::{evaluate, EvaluationReport};
pub use mmda::{
    blocking_pairs, is_stable, mmda_rerank, mmda_rerank_filled, mmda_rerank_partial, mmda_run,
    mmda_trace, Discipline, FilledMatching, MmdaObserver, MmdaTrace, PartialMatching,
};
pub use prefs::{build_preferences, Completion, PreferenceProfile};
pub use scalar::Scalar;
pub use scores::{load_external_scores, ScoreMatrix};
pub use split::{read_manifest, split_dataset, DatasetSplit, Role, SplitRatios};

pub type Dataset = InteractionDataset<f64>;
pub type Split = DatasetSplit<f64>;
pub type Scores = ScoreMatrix<f64>;
pub type Report = EvaluationReport<f64>;
pub type Trace = MmdaTrace<f64>;
pub type Br = BrConfig<f64>;
