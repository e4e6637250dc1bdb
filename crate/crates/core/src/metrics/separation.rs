use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

use super::euclidean;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationMode {
    /// Minimum distance from a cluster's points to any point outside it.
    Min,
    /// Mean distance over all (inside, outside) point pairs.
    Avg,
    /// Distance from the cluster centroid to the nearest other centroid.
    ClusterMean,
}

/// (group index, coordinate indices): first categorical variable and the
/// one or two continuous variables.
pub(crate) fn roles(data: &Dataset) -> Result<(usize, Vec<usize>)> {
    let group = *data
        .categorical_indices()
        .first()
        .ok_or_else(|| Error::Structure("separation distance needs a group variable".into()))?;
    let coords = data.continuous_indices();
    if !(1..=2).contains(&coords.len()) {
        return Err(Error::Structure(format!(
            "separation distance needs 1 or 2 continuous coordinates, found {}",
            coords.len()
        )));
    }
    let g = data.variables()[group].levels().map_or(0, <[String]>::len);
    if g < 2 {
        return Err(Error::Structure(format!("separation needs at least 2 groups, found {g}")));
    }
    Ok((group, coords))
}

struct Clusters {
    codes: Vec<usize>,
    points: Vec<[f64; 2]>,
    sizes: Vec<usize>,
}

fn clusters(data: &Dataset) -> Result<Clusters> {
    let (group, coords) = roles(data)?;
    let vars = data.variables();
    let levels = vars[group].levels().expect("categorical");
    let codes: Vec<usize> = vars[group].codes().expect("categorical").iter().map(|&c| c as usize).collect();
    let c0 = vars[coords[0]].as_continuous().expect("continuous");
    let c1 = coords.get(1).map(|&i| vars[i].as_continuous().expect("continuous"));
    let points = (0..data.n())
        .map(|i| [c0[i], c1.map_or(0.0, |c| c[i])])
        .collect();
    let mut sizes = vec![0; levels.len()];
    for &c in &codes {
        sizes[c] += 1;
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Precondition(format!("cluster `{}` is empty", levels[i])));
    }
    Ok(Clusters { codes, points, sizes })
}

fn point_distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Per-cluster separation, indexed by group level.
pub fn separation_vector(data: &Dataset, mode: SeparationMode) -> Result<Vec<f64>> {
    let c = clusters(data)?;
    let g = c.sizes.len();
    let n = c.points.len();
    match mode {
        SeparationMode::Min | SeparationMode::Avg => {
            let mut min = vec![f64::INFINITY; g];
            let mut sum = vec![0.0; g];
            for i in 0..n {
                for j in (i + 1)..n {
                    let (gi, gj) = (c.codes[i], c.codes[j]);
                    if gi == gj {
                        continue;
                    }
                    let d = point_distance(&c.points[i], &c.points[j]);
                    min[gi] = min[gi].min(d);
                    min[gj] = min[gj].min(d);
                    sum[gi] += d;
                    sum[gj] += d;
                }
            }
            Ok(match mode {
                SeparationMode::Min => min,
                _ => (0..g)
                    .map(|k| sum[k] / (c.sizes[k] * (n - c.sizes[k])) as f64)
                    .collect(),
            })
        }
        SeparationMode::ClusterMean => {
            let mut centroids = vec![[0.0; 2]; g];
            for (p, &k) in c.points.iter().zip(&c.codes) {
                centroids[k][0] += p[0];
                centroids[k][1] += p[1];
            }
            for (cen, &size) in centroids.iter_mut().zip(&c.sizes) {
                cen[0] /= size as f64;
                cen[1] /= size as f64;
            }
            Ok((0..g)
                .map(|k| {
                    (0..g)
                        .filter(|&j| j != k)
                        .map(|j| point_distance(&centroids[k], &centroids[j]))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect())
        }
    }
}

/// Euclidean distance between separation vectors, paired by group level.
pub fn dist_separation(x: &Dataset, y: &Dataset, mode: SeparationMode) -> Result<f64> {
    x.check_same_structure(y)?;
    let sx = separation_vector(x, mode)?;
    let sy = separation_vector(y, mode)?;
    Ok(euclidean(sx, sy))
}
