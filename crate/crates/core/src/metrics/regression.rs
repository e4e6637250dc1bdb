use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::stats::{combined_range, ols, LineFit};

use super::binned::Axis;

/// First two continuous variables: (X₁, X₂).
pub(crate) fn roles(data: &Dataset) -> Result<(usize, usize)> {
    match data.continuous_indices()[..] {
        [x, y, ..] => Ok((x, y)),
        _ => Err(Error::Structure(
            "regression distance needs two continuous variables".into(),
        )),
    }
}

fn columns(data: &Dataset) -> Result<(&[f64], &[f64])> {
    let (x, y) = roles(data)?;
    let vars = data.variables();
    Ok((
        vars[x].as_continuous().expect("continuous"),
        vars[y].as_continuous().expect("continuous"),
    ))
}

/// OLS fit of X₂ on X₁ within each vertical strip of `strips`.
pub fn bin_fits(data: &Dataset, strips: &Axis) -> Result<Vec<LineFit>> {
    let (xs, ys) = columns(data)?;
    let b = strips.bins();
    let mut bx: Vec<Vec<f64>> = vec![Vec::new(); b];
    let mut by: Vec<Vec<f64>> = vec![Vec::new(); b];
    for (&x, &y) in xs.iter().zip(ys) {
        let i = strips
            .index_of(x)
            .ok_or_else(|| Error::Precondition(format!("{x} lies outside the strips")))?;
        bx[i].push(x);
        by[i].push(y);
    }
    bx.iter()
        .zip(&by)
        .enumerate()
        .map(|(i, (x, y))| ols(x, y).map_err(|e| Error::Singular(format!("vertical bin {}: {e}", i + 1))))
        .collect()
}

/// Euclidean distance between stacked per-strip (intercept, slope) rows.
/// Strips split the combined X₁ range of both datasets into `b` equal widths.
pub fn dist_regression(x: &Dataset, y: &Dataset, b: usize) -> Result<f64> {
    x.check_same_structure(y)?;
    if b == 0 {
        return Err(Error::Precondition("RG bin count must be at least 1".into()));
    }
    let (x1, _) = columns(x)?;
    let (y1, _) = columns(y)?;
    let (lo, hi) = combined_range([x1, y1]);
    let strips = Axis::Equal { bins: b, lo, hi };
    let fx = bin_fits(x, &strips)?;
    let fy = bin_fits(y, &strips)?;
    let sum_sq: f64 = fx
        .iter()
        .zip(&fy)
        .map(|(a, c)| {
            let di = a.intercept - c.intercept;
            let ds = a.slope - c.slope;
            di * di + ds * ds
        })
        .sum();
    Ok(sum_sq.sqrt())
}
