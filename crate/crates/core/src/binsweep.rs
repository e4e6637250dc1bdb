//! Exhaustive search over binned-distance bin counts for the (p, q) pair
//! that makes the true panel of a lineup most detectable (largest δ).

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Lineup;
use crate::error::{Error, Result};
use crate::inference::{difficulty, mean_distances};
use crate::metrics::MetricKind;

pub const DEFAULT_RANGE: RangeInclusive<usize> = 2..=10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p: usize,
    pub q: usize,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub p: usize,
    pub q: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub p_values: Vec<usize>,
    pub q_values: Vec<usize>,
    /// Evaluated cells, ordered by p then q.
    pub grid: Vec<SweepCell>,
    pub best: Option<SweepCell>,
    pub worst: Option<f64>,
    pub skipped: Vec<SkippedCell>,
}

fn check_range(name: &str, r: &RangeInclusive<usize>) -> Result<()> {
    if r.is_empty() || *r.start() == 0 {
        return Err(Error::Precondition(format!(
            "{name} range {}..={} must be nonempty and start at 1 or more",
            r.start(),
            r.end()
        )));
    }
    Ok(())
}

pub fn sweep_bins(
    lineup: &Lineup,
    p_range: RangeInclusive<usize>,
    q_range: RangeInclusive<usize>,
) -> Result<SweepResult> {
    check_range("p", &p_range)?;
    check_range("q", &q_range)?;
    let p_values: Vec<usize> = p_range.collect();
    let q_values: Vec<usize> = q_range.collect();
    let cells: Vec<(usize, usize)> = p_values
        .iter()
        .flat_map(|&p| q_values.iter().map(move |&q| (p, q)))
        .collect();

    let outcomes: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(p, q)| {
            let md = mean_distances(lineup, &MetricKind::Binned { p, q })?;
            Ok(difficulty(&md)?.delta)
        })
        .collect();

    let mut grid = Vec::new();
    let mut skipped = Vec::new();
    for (&(p, q), outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok(delta) => grid.push(SweepCell { p, q, delta }),
            Err(e) => skipped.push(SkippedCell {
                p,
                q,
                reason: e.to_string(),
            }),
        }
    }

    let best = pick_best(&grid);
    let worst = grid.iter().map(|c| c.delta).reduce(f64::min);

    Ok(SweepResult {
        p_values,
        q_values,
        grid,
        best,
        worst,
        skipped,
    })
}

/// Largest δ; ties go to the smallest p, then the smallest q.
fn pick_best(grid: &[SweepCell]) -> Option<SweepCell> {
    let mut best: Option<SweepCell> = None;
    for cell in grid {
        let better = match best {
            None => true,
            Some(b) => cell.delta > b.delta || (cell.delta == b.delta && (cell.p, cell.q) < (b.p, b.q)),
        };
        if better {
            best = Some(*cell);
        }
    }
    best
}

/// Arg-max of the default 2..=10 × 2..=10 sweep.
pub fn optimal_bins(lineup: &Lineup) -> Result<(usize, usize)> {
    let sweep = sweep_bins(lineup, DEFAULT_RANGE, DEFAULT_RANGE)?;
    sweep.optimum()
}

impl SweepResult {
    pub fn optimum(&self) -> Result<(usize, usize)> {
        self.best
            .map(|b| (b.p, b.q))
            .ok_or_else(|| Error::Precondition("every sweep cell failed".into()))
    }

    pub fn delta_at(&self, p: usize, q: usize) -> Option<f64> {
        self.grid.iter().find(|c| c.p == p && c.q == q).map(|c| c.delta)
    }

    /// `p,q,delta` with one row per (p, q) in range; skipped cells have an
    /// empty delta.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,q,delta\n");
        for &p in &self.p_values {
            for &q in &self.q_values {
                let delta = self
                    .delta_at(p, q)
                    .map(crate::dataset::format_number)
                    .unwrap_or_default();
                out.push_str(&format!("{p},{q},{delta}\n"));
            }
        }
        out
    }

    /// Tile-plot description: x = p, y = q, fill = δ (darker is higher).
    pub fn tile_spec(&self) -> serde_json::Value {
        serde_json::json!({
            "mark": "tile",
            "x": {"field": "p", "values": self.p_values},
            "y": {"field": "q", "values": self.q_values},
            "fill": {"field": "delta", "low": "#ffffff", "high": "#08306b"},
            "cells": self.grid,
            "best": self.best,
            "worst": self.worst,
            "skipped": self.skipped,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Dataset, PlotType, Variable};

    fn identical_lineup() -> Lineup {
        let d = Dataset::new(vec![
            Variable::continuous("x", vec![0.0, 0.3, 0.6, 1.0]).unwrap(),
            Variable::continuous("y", vec![1.0, 0.2, 0.5, 0.0]).unwrap(),
        ])
        .unwrap();
        Lineup::from_parts(vec![d; 6], 3, 0, PlotType::Scatter, String::new()).unwrap()
    }

    #[test]
    fn identical_panels_sweep_to_zero() {
        let s = sweep_bins(&identical_lineup(), DEFAULT_RANGE, DEFAULT_RANGE).unwrap();
        assert_eq!(s.grid.len(), 81);
        assert!(s.skipped.is_empty());
        assert!(s.grid.iter().all(|c| c.delta == 0.0));
        assert_eq!(s.best, Some(SweepCell { p: 2, q: 2, delta: 0.0 }));
        assert_eq!(s.worst, Some(0.0));
        assert_eq!(s.to_csv().lines().count(), 82);
    }

    #[test]
    fn tie_rule_prefers_smallest_bins() {
        let s = sweep_bins(&identical_lineup(), 2..=3, 2..=3).unwrap();
        assert_eq!(s.optimum().unwrap(), (2, 2));
    }

    fn cell(p: usize, q: usize, delta: f64) -> SweepCell {
        SweepCell { p, q, delta }
    }

    #[test]
    fn unique_maximum() {
        let grid = [cell(2, 2, -1.0), cell(2, 3, 0.5), cell(3, 2, 2.0), cell(3, 3, 1.0)];
        assert_eq!(pick_best(&grid), Some(cell(3, 2, 2.0)));
    }

    #[test]
    fn tie_between_neighbours() {
        let grid = [cell(2, 3, 1.0), cell(2, 2, 1.0), cell(3, 2, 0.0)];
        assert_eq!(pick_best(&grid), Some(cell(2, 2, 1.0)));
    }

    #[test]
    fn bad_range() {
        assert!(sweep_bins(&identical_lineup(), 0..=3, 2..=3).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 5..=2;
        assert!(sweep_bins(&identical_lineup(), empty, 2..=3).is_err());
    }

    #[test]
    fn all_cells_skipped() {
        // two panels: mean distances need three
        let d = identical_lineup().panels()[0].clone();
        let l = Lineup::from_parts(vec![d.clone(), d], 1, 0, PlotType::Scatter, String::new()).unwrap();
        let s = sweep_bins(&l, 2..=3, 2..=2).unwrap();
        assert_eq!(s.skipped.len(), 2);
        assert!(s.optimum().is_err());
        assert_eq!(s.to_csv(), "p,q,delta\n2,2,\n3,2,\n");
    }
}
