//! Plot-to-plot distances.
//!
//! Every distance is reported on the Euclidean (square-root) scale.
//! Variable roles come from column order: the first two variables are the
//! binned axes, the first two continuous variables are X₁/X₂ for the
//! regression distance, and the first categorical variable is the group.

mod binned;
mod boxplot;
mod regression;
mod separation;

use serde::{Deserialize, Serialize};

pub use binned::{bin_counts, dist_binned, dist_binned_with_grid, Axis, BinGrid, CountMatrix};
pub use boxplot::{dist_boxplot, quartile_differences};
pub use regression::{bin_fits, dist_regression};
pub use separation::{dist_separation, separation_vector, SeparationMode};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// `{"kind":"BN","p":8,"q":8} | {"kind":"RG","b":2} | {"kind":"BX"} | {"kind":"MS"} | {"kind":"AS"} | {"kind":"CMS"}`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MetricKind {
    #[serde(rename = "BN")]
    Binned { p: usize, q: usize },
    #[serde(rename = "BX")]
    Boxplot,
    #[serde(rename = "RG")]
    Regression { b: usize },
    #[serde(rename = "MS")]
    MinSeparation,
    #[serde(rename = "AS")]
    AvgSeparation,
    #[serde(rename = "CMS")]
    ClusterMeanSeparation,
}

impl MetricKind {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let kind: MetricKind = serde_json::from_str(s)?;
        match kind {
            MetricKind::Binned { p, q } if p == 0 || q == 0 => {
                Err(Error::Precondition("BN bin counts must be at least 1".into()))
            }
            MetricKind::Regression { b: 0 } => {
                Err(Error::Precondition("RG bin count must be at least 1".into()))
            }
            k => Ok(k),
        }
    }

    pub fn label(&self) -> String {
        match self {
            MetricKind::Binned { p, q } => format!("BN({p},{q})"),
            MetricKind::Boxplot => "BX".into(),
            MetricKind::Regression { b } => format!("RG({b})"),
            MetricKind::MinSeparation => "MS".into(),
            MetricKind::AvgSeparation => "AS".into(),
            MetricKind::ClusterMeanSeparation => "CMS".into(),
        }
    }

    /// Checks that `data` has the variable structure this metric needs.
    pub fn validate(&self, data: &Dataset) -> Result<()> {
        match self {
            MetricKind::Binned { p, q } => {
                if *p == 0 || *q == 0 {
                    return Err(Error::Precondition("BN bin counts must be at least 1".into()));
                }
                Ok(())
            }
            MetricKind::Boxplot => boxplot::roles(data).map(|_| ()),
            MetricKind::Regression { b } => {
                if *b == 0 {
                    return Err(Error::Precondition("RG bin count must be at least 1".into()));
                }
                regression::roles(data).map(|_| ())
            }
            MetricKind::MinSeparation
            | MetricKind::AvgSeparation
            | MetricKind::ClusterMeanSeparation => separation::roles(data).map(|_| ()),
        }
    }
}

/// Distance between two structurally identical datasets under `kind`.
pub fn distance(x: &Dataset, y: &Dataset, kind: &MetricKind) -> Result<f64> {
    match *kind {
        MetricKind::Binned { p, q } => dist_binned(x, y, p, q),
        MetricKind::Boxplot => dist_boxplot(x, y),
        MetricKind::Regression { b } => dist_regression(x, y, b),
        MetricKind::MinSeparation => dist_separation(x, y, SeparationMode::Min),
        MetricKind::AvgSeparation => dist_separation(x, y, SeparationMode::Avg),
        MetricKind::ClusterMeanSeparation => dist_separation(x, y, SeparationMode::ClusterMean),
    }
}

/// Euclidean norm of the element-wise difference, summed in index order.
pub(crate) fn euclidean(a: impl IntoIterator<Item = f64>, b: impl IntoIterator<Item = f64>) -> f64 {
    a.into_iter()
        .zip(b)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}
