use crate::dataset::{Dataset, Values, Variable};
use crate::error::{Error, Result};
use crate::stats::combined_range;

/// Binning rule for one axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Axis {
    /// `bins` equal-width bins over `[lo, hi]`, left-closed right-open except
    /// the last, which is closed. A zero-width range puts everything in bin 0.
    Equal { bins: usize, lo: f64, hi: f64 },
    /// One bin per category level.
    Levels(usize),
}

impl Axis {
    pub fn bins(&self) -> usize {
        match *self {
            Axis::Equal { bins, .. } => bins,
            Axis::Levels(n) => n,
        }
    }

    pub fn index_of(&self, v: f64) -> Option<usize> {
        match *self {
            Axis::Equal { bins, lo, hi } => {
                if !(lo..=hi).contains(&v) {
                    return None;
                }
                if hi == lo {
                    return Some(0);
                }
                let i = ((v - lo) / (hi - lo) * bins as f64).floor() as usize;
                Some(i.min(bins - 1))
            }
            Axis::Levels(n) => {
                let c = v as usize;
                (v >= 0.0 && c < n && c as f64 == v).then_some(c)
            }
        }
    }

    /// Axis for `var` shared with its counterpart `other`.
    fn shared(var: &Variable, other: &Variable, bins: usize) -> Axis {
        match (var.values(), other.values()) {
            (Values::Continuous(a), Values::Continuous(b)) => {
                let (lo, hi) = combined_range([a.as_slice(), b.as_slice()]);
                Axis::Equal { bins, lo, hi }
            }
            _ => Axis::Levels(var.levels().map_or(1, <[String]>::len)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinGrid {
    pub x: Axis,
    pub y: Axis,
}

impl BinGrid {
    pub fn new(p: usize, q: usize, range_x: (f64, f64), range_y: (f64, f64)) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::Precondition("bin counts must be at least 1".into()));
        }
        for (lo, hi) in [range_x, range_y] {
            // NaN bounds fail too
            if lo.partial_cmp(&hi).is_none_or(|o| o.is_gt()) {
                return Err(Error::Precondition(format!("invalid range [{lo}, {hi}]")));
            }
        }
        Ok(BinGrid {
            x: Axis::Equal { bins: p, lo: range_x.0, hi: range_x.1 },
            y: Axis::Equal { bins: q, lo: range_y.0, hi: range_y.1 },
        })
    }

    /// Grid anchored on the combined per-axis range of `a` and `b`.
    /// Categorical axes get one bin per level regardless of `p`/`q`; a
    /// dataset with one variable gets a single bin on the second axis.
    pub fn shared(a: &Dataset, b: &Dataset, p: usize, q: usize) -> Result<Self> {
        a.check_same_structure(b)?;
        if p == 0 || q == 0 {
            return Err(Error::Precondition("bin counts must be at least 1".into()));
        }
        let (va, vb) = (a.variables(), b.variables());
        let x = Axis::shared(&va[0], &vb[0], p);
        let y = match (va.get(1), vb.get(1)) {
            (Some(u), Some(v)) => Axis::shared(u, v, q),
            _ => Axis::Levels(1),
        };
        Ok(BinGrid { x, y })
    }

    pub fn p(&self) -> usize {
        self.x.bins()
    }

    pub fn q(&self) -> usize {
        self.y.bins()
    }
}

/// p×q cell counts, row-major (`i` indexes the X₁ axis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountMatrix {
    p: usize,
    q: usize,
    counts: Vec<u64>,
}

impl CountMatrix {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.q + j]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.counts.chunks(self.q)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }
}

fn axis_value(var: &Variable, row: usize) -> f64 {
    match var.values() {
        Values::Continuous(xs) => xs[row],
        Values::Categorical { codes, .. } => codes[row] as f64,
    }
}

pub fn bin_counts(data: &Dataset, grid: &BinGrid) -> Result<CountMatrix> {
    let vars = data.variables();
    let (p, q) = (grid.p(), grid.q());
    let mut counts = vec![0u64; p * q];
    for row in 0..data.n() {
        let xv = axis_value(&vars[0], row);
        let i = grid
            .x
            .index_of(xv)
            .ok_or_else(|| Error::Precondition(format!("row {row}: {xv} lies outside the grid")))?;
        let j = match vars.get(1) {
            Some(v) => {
                let yv = axis_value(v, row);
                grid.y.index_of(yv).ok_or_else(|| {
                    Error::Precondition(format!("row {row}: {yv} lies outside the grid"))
                })?
            }
            None => 0,
        };
        counts[i * q + j] += 1;
    }
    Ok(CountMatrix { p, q, counts })
}

pub fn dist_binned_with_grid(x: &Dataset, y: &Dataset, grid: &BinGrid) -> Result<f64> {
    x.check_same_structure(y)?;
    let cx = bin_counts(x, grid)?;
    let cy = bin_counts(y, grid)?;
    let sum_sq: u64 = cx
        .counts
        .iter()
        .zip(&cy.counts)
        .map(|(&a, &b)| a.abs_diff(b).pow(2))
        .sum();
    Ok((sum_sq as f64).sqrt())
}

/// Binned distance on a p×q grid anchored on the pair's combined range.
pub fn dist_binned(x: &Dataset, y: &Dataset, p: usize, q: usize) -> Result<f64> {
    let grid = BinGrid::shared(x, y, p, q)?;
    dist_binned_with_grid(x, y, &grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(pts: &[(f64, f64)]) -> Dataset {
        Dataset::new(vec![
            Variable::continuous("x1", pts.iter().map(|p| p.0).collect()).unwrap(),
            Variable::continuous("x2", pts.iter().map(|p| p.1).collect()).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn corners_fill_each_cell() {
        let d = points(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);
        let grid = BinGrid::new(2, 2, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let c = bin_counts(&d, &grid).unwrap();
        assert_eq!(c.rows().collect::<Vec<_>>(), vec![&[1, 1][..], &[1, 1][..]]);
    }

    #[test]
    fn identical_points_share_one_cell() {
        let d = points(&[(2.0, 3.0); 7]);
        let grid = BinGrid::shared(&d, &d, 4, 3).unwrap();
        let c = bin_counts(&d, &grid).unwrap();
        assert_eq!(c.get(0, 0), 7);
        assert_eq!(c.total(), 7);
    }

    #[test]
    fn counts_are_conserved() {
        let pts: Vec<(f64, f64)> = (0..100)
            .map(|i| ((i * 37 % 100) as f64 / 100.0, (i * 61 % 100) as f64 / 100.0))
            .collect();
        let d = points(&pts);
        let grid = BinGrid::shared(&d, &d, 2, 2).unwrap();
        assert_eq!(bin_counts(&d, &grid).unwrap().total(), 100);
    }

    #[test]
    fn interior_boundary_goes_right() {
        let grid = BinGrid::new(2, 1, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert_eq!(grid.x.index_of(0.5), Some(1));
        assert_eq!(grid.x.index_of(1.0), Some(1));
        assert_eq!(grid.x.index_of(0.0), Some(0));
        assert_eq!(grid.x.index_of(1.0001), None);
    }

    #[test]
    fn out_of_range_point_is_an_error() {
        let d = points(&[(0.0, 0.0), (2.0, 0.0)]);
        let grid = BinGrid::new(2, 2, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert!(matches!(bin_counts(&d, &grid), Err(Error::Precondition(_))));
    }

    #[test]
    fn categorical_axis_uses_levels() {
        let d = Dataset::new(vec![
            Variable::categorical("g", &["a", "b", "c", "a"]),
            Variable::continuous("y", vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
        ])
        .unwrap();
        let grid = BinGrid::shared(&d, &d, 9, 2).unwrap();
        assert_eq!(grid.p(), 3);
        let c = bin_counts(&d, &grid).unwrap();
        assert_eq!(c.as_slice(), &[1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn univariate_data_bins_on_one_axis() {
        let d = Dataset::new(vec![Variable::continuous("x", vec![0.0, 0.1, 1.0]).unwrap()]).unwrap();
        let grid = BinGrid::shared(&d, &d, 2, 5).unwrap();
        assert_eq!(grid.q(), 1);
        assert_eq!(bin_counts(&d, &grid).unwrap().as_slice(), &[2, 1]);
    }

    #[test]
    fn sqrt_42_example() {
        // counts differ by (5, -1, -4, 0) across the four cells
        let mut a = vec![(0.0, 0.0); 5];
        a.push((0.0, 0.1));
        a.extend([(1.0, 1.0), (0.9, 0.9), (0.9, 1.0), (1.0, 0.9)]);
        let mut b = vec![(0.0, 0.0), (0.0, 1.0)];
        b.extend([(1.0, 0.0); 4]);
        b.extend([(1.0, 1.0); 4]);
        let (a, b) = (points(&a), points(&b));
        let grid = BinGrid::shared(&a, &b, 2, 2).unwrap();
        assert_eq!(bin_counts(&a, &grid).unwrap().as_slice(), &[6, 0, 0, 4]);
        assert_eq!(bin_counts(&b, &grid).unwrap().as_slice(), &[1, 1, 4, 4]);
        let d = dist_binned(&a, &b, 2, 2).unwrap();
        assert_eq!(d, 42f64.sqrt());
        assert_eq!(format!("{d:.4}"), "6.4807");
    }
}
