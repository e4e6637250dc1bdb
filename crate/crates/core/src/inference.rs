//! Mean distances within a lineup, the empirical null distribution of a
//! metric, and lineup difficulty (δ and γ).
//!
//! Parallel work is always reduced in a fixed order, so results are
//! bit-identical to a sequential run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Lineup};
use crate::error::{Error, Result};
use crate::metrics::{distance, MetricKind};
use crate::nullgen::{simulate_null_dataset, NullMechanism};
use crate::rng;

/// Symmetric m×m matrix of panel-to-panel distances (panel order).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub m: usize,
    pub values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

pub fn distance_matrix(panels: &[Dataset], metric: &MetricKind) -> Result<DistanceMatrix> {
    let m = panels.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| ((i + 1)..m).map(move |j| (i, j))).collect();
    let dists = pairs
        .par_iter()
        .map(|&(i, j)| distance(&panels[i], &panels[j], metric))
        .collect::<Result<Vec<f64>>>()?;
    let mut values = vec![vec![0.0; m]; m];
    for (&(i, j), d) in pairs.iter().zip(dists) {
        values[i][j] = d;
        values[j][i] = d;
    }
    Ok(DistanceMatrix { m, values })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanDistances {
    /// Mean distance from the true panel to the m−1 nulls.
    pub d_true: f64,
    /// For each null (panel order), mean distance to the other m−2 nulls.
    pub d_null: Vec<f64>,
}

/// Means from a precomputed matrix; `true_index` is 0-based.
pub fn mean_distances_from_matrix(matrix: &DistanceMatrix, true_index: usize) -> Result<MeanDistances> {
    let m = matrix.m;
    if m < 3 {
        return Err(Error::Precondition(format!(
            "mean distances need m >= 3 panels, got {m}"
        )));
    }
    let nulls: Vec<usize> = (0..m).filter(|&i| i != true_index).collect();
    let d_true = nulls.iter().map(|&j| matrix.get(true_index, j)).sum::<f64>() / (m - 1) as f64;
    let d_null = nulls
        .iter()
        .map(|&j| {
            nulls
                .iter()
                .filter(|&&k| k != j)
                .map(|&k| matrix.get(j, k))
                .sum::<f64>()
                / (m - 2) as f64
        })
        .collect();
    Ok(MeanDistances { d_true, d_null })
}

pub fn mean_distances(lineup: &Lineup, metric: &MetricKind) -> Result<MeanDistances> {
    if lineup.m() < 3 {
        return Err(Error::Precondition(format!(
            "mean distances need m >= 3 panels, got {}",
            lineup.m()
        )));
    }
    metric.validate(lineup.true_panel())?;
    let matrix = distance_matrix(lineup.panels(), metric)?;
    mean_distances_from_matrix(&matrix, lineup.true_position() - 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    pub samples: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub mechanism: NullMechanism,
    pub metric: MetricKind,
    pub seed: u64,
}

/// One replicate: a pseudo-true null drawn from `true_data`, m−2 nulls
/// drawn from the pseudo-true, and the mean of their distances to it.
fn replicate(
    true_data: &Dataset,
    mechanism: &NullMechanism,
    metric: &MetricKind,
    m: usize,
    seed: u64,
) -> Result<f64> {
    let pseudo_true = simulate_null_dataset(true_data, mechanism, rng::derive_seed(seed, rng::stream::NULL_PANEL, 0))?;
    let mut total = 0.0;
    for k in 1..=(m - 2) {
        let null = simulate_null_dataset(
            &pseudo_true,
            mechanism,
            rng::derive_seed(seed, rng::stream::NULL_PANEL, k as u64),
        )?;
        total += distance(&pseudo_true, &null, metric)?;
    }
    Ok(total / (m - 2) as f64)
}

pub fn empirical_distribution(
    true_data: &Dataset,
    mechanism: &NullMechanism,
    metric: &MetricKind,
    m: usize,
    n: usize,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    if n == 0 {
        return Err(Error::Precondition("replicate count N must be at least 1".into()));
    }
    if m < 3 {
        return Err(Error::Precondition(format!("m = {m}; need m >= 3")));
    }
    mechanism.validate(true_data)?;
    metric.validate(true_data)?;
    let samples = (0..n as u64)
        .into_par_iter()
        .map(|r| {
            replicate(
                true_data,
                mechanism,
                metric,
                m,
                rng::derive_seed(seed, rng::stream::REPLICATE, r),
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EmpiricalDistribution {
        samples,
        n,
        m,
        mechanism: mechanism.clone(),
        metric: *metric,
        seed,
    })
}

impl EmpiricalDistribution {
    /// Single-column CSV with header `distance`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("distance\n");
        for s in &self.samples {
            out.push_str(&crate::dataset::format_number(*s));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Easy,
    Difficult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifficultyReport {
    pub delta: f64,
    pub gamma: usize,
    pub mean_distances: MeanDistances,
    pub verdict: Verdict,
}

/// δ = d̄_true − max d̄_null; γ = #{null means strictly above d̄_true};
/// the lineup is easy iff δ > 0.
pub fn difficulty(md: &MeanDistances) -> Result<DifficultyReport> {
    if md.d_null.is_empty() {
        return Err(Error::Precondition("no null mean distances".into()));
    }
    if !md.d_true.is_finite() || md.d_null.iter().any(|d| !d.is_finite()) {
        return Err(Error::Precondition("mean distances must be finite".into()));
    }
    let max_null = md.d_null.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let delta = md.d_true - max_null;
    let gamma = md.d_null.iter().filter(|&&d| d > md.d_true).count();
    Ok(DifficultyReport {
        delta,
        gamma,
        mean_distances: md.clone(),
        verdict: if delta > 0.0 { Verdict::Easy } else { Verdict::Difficult },
    })
}

pub fn lineup_difficulty(lineup: &Lineup, metric: &MetricKind) -> Result<DifficultyReport> {
    difficulty(&mean_distances(lineup, metric)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{PlotType, Variable};

    fn md(d_true: f64, d_null: &[f64]) -> MeanDistances {
        MeanDistances {
            d_true,
            d_null: d_null.to_vec(),
        }
    }

    #[test]
    fn easy_lineup() {
        let r = difficulty(&md(5.0, &[1.0, 2.0, 3.0])).unwrap();
        assert_eq!((r.delta, r.gamma, r.verdict), (2.0, 0, Verdict::Easy));
    }

    #[test]
    fn difficult_lineup() {
        let r = difficulty(&md(2.0, &[1.0, 3.0, 4.0])).unwrap();
        assert_eq!((r.delta, r.gamma, r.verdict), (-2.0, 2, Verdict::Difficult));
    }

    #[test]
    fn tie_is_difficult() {
        let r = difficulty(&md(3.0, &[1.0, 3.0])).unwrap();
        assert_eq!((r.delta, r.gamma, r.verdict), (0.0, 0, Verdict::Difficult));
    }

    #[test]
    fn three_panel_arithmetic() {
        // d(T,N1)=1, d(T,N2)=3, d(N1,N2)=2 with T in the middle
        let matrix = DistanceMatrix {
            m: 3,
            values: vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 3.0], vec![2.0, 3.0, 0.0]],
        };
        let md = mean_distances_from_matrix(&matrix, 1).unwrap();
        assert_eq!(md, self::md(2.0, &[2.0, 2.0]));
    }

    fn panel(shift: f64) -> Dataset {
        Dataset::new(vec![
            Variable::continuous("x", vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
            Variable::continuous("y", vec![shift, 1.0, 0.0, 2.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn identical_panels_are_all_zero() {
        let l = Lineup::from_parts(vec![panel(0.0); 5], 2, 0, PlotType::Scatter, String::new()).unwrap();
        let md = mean_distances(&l, &MetricKind::Binned { p: 2, q: 2 }).unwrap();
        assert_eq!(md, self::md(0.0, &[0.0; 4]));
        let r = difficulty(&md).unwrap();
        assert_eq!((r.delta, r.gamma, r.verdict), (0.0, 0, Verdict::Difficult));
    }

    #[test]
    fn two_panels_is_too_few() {
        let l = Lineup::from_parts(vec![panel(0.0); 2], 1, 0, PlotType::Scatter, String::new()).unwrap();
        assert!(matches!(
            mean_distances(&l, &MetricKind::Binned { p: 2, q: 2 }),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn constant_data_distribution_is_zero() {
        let d = Dataset::new(vec![
            Variable::continuous("x", vec![1.0; 5]).unwrap(),
            Variable::continuous("y", vec![2.0; 5]).unwrap(),
        ])
        .unwrap();
        let e = empirical_distribution(
            &d,
            &NullMechanism::permutation("x"),
            &MetricKind::Binned { p: 3, q: 3 },
            20,
            1,
            4,
        )
        .unwrap();
        assert_eq!(e.samples, vec![0.0]);
    }

    #[test]
    fn distribution_rejects_zero_replicates() {
        let d = panel(0.0);
        let err = empirical_distribution(
            &d,
            &NullMechanism::permutation("x"),
            &MetricKind::Binned { p: 2, q: 2 },
            20,
            0,
            1,
        );
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn samples_csv() {
        let d = panel(5.0);
        let e = empirical_distribution(
            &d,
            &NullMechanism::permutation("y"),
            &MetricKind::Binned { p: 2, q: 2 },
            5,
            3,
            9,
        )
        .unwrap();
        let csv = e.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(csv.lines().next(), Some("distance"));
    }
}
