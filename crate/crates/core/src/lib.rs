//! Multivariate independence and K-sample tests built from univariate
//! tests on distances from center points.
//!
//! The core procedure: choose one or more center points, project every
//! observation to its Euclidean distance from the center, apply a
//! consistent univariate test to the projected distances, and pool the
//! per-center results into a single permutation-calibrated (or
//! Bonferroni/Hommel global) decision.

pub mod error;
pub mod generate;
pub mod io;
pub mod power;
pub mod pipeline;
pub mod model;
pub mod permutation;
pub mod pooling;
pub mod projection;
pub mod reference;
pub mod univariate;

pub use error::{Error, Result};
pub use model::{
    CenterOrigin, CenterPoint, CenterSpec, LabeledDataset, PairedDataset, ProjectedSample,
    TestReport,
};
pub use pipeline::{run_pipeline, run_pipeline_multi, PipelineConfig, Problem};
pub use pooling::PoolingRule;
pub use projection::CenterStrategy;
pub use univariate::TestId;
