//! Propagating a per-pixel quantum advantage in loss-channel discrimination
//! through classical clustering.
//!
//! The crate computes classical and quantum ROC curves for a pair of
//! pure-loss channels ([`roc`]), generates surface patterns for two imaging
//! scenarios ([`scene`]), corrupts them with per-pixel measurement errors
//! ([`channel`]), clusters the result ([`clustering`]) and estimates the
//! mutual information between the ground truth and the clustering estimate
//! ([`infotheory`]). [`pipeline`] ties the stages into reproducible Monte
//! Carlo sweeps.

pub mod channel;
pub mod clustering;
pub mod error;
pub mod infotheory;
pub mod linalg;
pub mod pipeline;
pub mod roc;
pub mod scene;

pub use error::{Error, Result};
pub use channel::ErrorPair;
pub use infotheory::{CategoricalHistogram, MiEstimate};
pub use pipeline::{ExperimentConfig, Family, Scenario, ScenarioKind};
pub use roc::{LossChannelPair, RocCurve};
pub use scene::{ChannelPattern, GridSpec, Pixel};
