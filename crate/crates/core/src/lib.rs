//! Toolkit for visual inference with the lineup protocol.
//!
//! A lineup hides a plot of the real data among `m − 1` plots of null data.
//! This crate generates the nulls, assembles and renders lineups, measures
//! plot-to-plot distances, estimates a metric's null distribution, scores
//! how hard a lineup is (δ and γ), and runs a small service that collects
//! observer picks so detection rates can be compared with those scores.

pub mod binsweep;
pub mod dataset;
pub mod error;
pub mod export;
pub mod inference;
pub mod metrics;
pub mod nullgen;
pub mod render;
pub mod rng;
pub mod service;
pub mod stats;
pub mod study;

pub use dataset::{assemble_lineup, load_dataset, Dataset, Lineup, PlotType, Schema, Variable, VariableKind};
pub use error::{Error, ErrorClass, Result};
pub use inference::{difficulty, empirical_distribution, mean_distances, DifficultyReport, EmpiricalDistribution, MeanDistances, Verdict};
pub use metrics::{distance, MetricKind};
pub use nullgen::{generate_lineup, simulate_null_dataset, MechanismKind, NullMechanism};
