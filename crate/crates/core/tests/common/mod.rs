//! Independent oracles and data generators for integration tests.
//!
//! Nothing in here calls into the metric implementations: every expected
//! value is computed by a separate, deliberately naive route.

#![allow(dead_code)]

use lineup::rng::{normal, rng_from_seed};
use lineup::{Dataset, Variable};
use rand::Rng;

// ---------- generators ----------

pub fn scatter(xs: Vec<f64>, ys: Vec<f64>) -> Dataset {
    Dataset::new(vec![
        Variable::continuous("x1", xs).unwrap(),
        Variable::continuous("x2", ys).unwrap(),
    ])
    .unwrap()
}

pub fn uniform_scatter(n: usize, seed: u64) -> Dataset {
    let mut r = rng_from_seed(seed);
    let xs = (0..n).map(|_| r.random::<f64>()).collect();
    let ys = (0..n).map(|_| r.random::<f64>()).collect();
    scatter(xs, ys)
}

/// Two groups, sizes in 1..=12 each, values spread with a group shift.
pub fn two_groups(seed: u64) -> Dataset {
    let mut r = rng_from_seed(seed);
    let na = r.random_range(1..=12);
    let nb = r.random_range(1..=12);
    let shift = r.random_range(-3.0..3.0);
    let mut labels = Vec::new();
    let mut vals = Vec::new();
    for _ in 0..na {
        labels.push("A");
        vals.push(normal(&mut r, 0.0, 1.0));
    }
    for _ in 0..nb {
        labels.push("B");
        vals.push(normal(&mut r, shift, 2.0));
    }
    // interleave so group order is not positional
    let mut order: Vec<usize> = (0..labels.len()).collect();
    lineup::rng::shuffle(&mut r, &mut order);
    let labels: Vec<&str> = order.iter().map(|&i| labels[i]).collect();
    let vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    // fix level order to A, B
    Dataset::new(vec![
        Variable::categorical_with_levels(
            "group",
            vec!["A".into(), "B".into()],
            labels.iter().map(|l| if *l == "A" { 0 } else { 1 }).collect(),
        )
        .unwrap(),
        Variable::continuous("y", vals).unwrap(),
    ])
    .unwrap()
}

/// `g` clusters with Gaussian spread around random centres; every cluster
/// has at least one point. Total size ≤ `max_n`.
pub fn clusters(g: usize, max_n: usize, seed: u64) -> Dataset {
    let mut r = rng_from_seed(seed);
    let n = r.random_range(g..=max_n);
    let centres: Vec<(f64, f64)> = (0..g)
        .map(|_| (r.random_range(-5.0..5.0), r.random_range(-5.0..5.0)))
        .collect();
    let mut codes: Vec<u32> = (0..g as u32).collect();
    while codes.len() < n {
        codes.push(r.random_range(0..g as u32));
    }
    lineup::rng::shuffle(&mut r, &mut codes);
    let xs = codes.iter().map(|&c| normal(&mut r, centres[c as usize].0, 1.0)).collect();
    let ys = codes.iter().map(|&c| normal(&mut r, centres[c as usize].1, 1.0)).collect();
    Dataset::new(vec![
        Variable::continuous("x1", xs).unwrap(),
        Variable::continuous("x2", ys).unwrap(),
        Variable::categorical_with_levels("cluster", (0..g).map(|i| format!("c{i}")).collect(), codes).unwrap(),
    ])
    .unwrap()
}

pub fn col(d: &Dataset, i: usize) -> Vec<f64> {
    d.variables()[i].as_continuous().unwrap().to_vec()
}

pub fn codes(d: &Dataset, name: &str) -> Vec<u32> {
    d.variable(name).unwrap().codes().unwrap().to_vec()
}

// ---------- binned oracle ----------

/// Bin membership by explicit edge comparison.
pub fn edge_bin(v: f64, lo: f64, hi: f64, bins: usize) -> usize {
    if hi == lo {
        return 0;
    }
    for k in 0..bins {
        let left = lo + (hi - lo) * k as f64 / bins as f64;
        let right = lo + (hi - lo) * (k + 1) as f64 / bins as f64;
        if v >= left && (v < right || k == bins - 1) {
            return k;
        }
    }
    unreachable!("{v} outside [{lo}, {hi}]")
}

pub fn brute_counts(pts: &[(f64, f64)], p: usize, q: usize, rx: (f64, f64), ry: (f64, f64)) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; q]; p];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = pts
                .iter()
                .filter(|&&(x, y)| edge_bin(x, rx.0, rx.1, p) == i && edge_bin(y, ry.0, ry.1, q) == j)
                .count() as i64;
        }
    }
    c
}

pub fn brute_binned(a: &[(f64, f64)], b: &[(f64, f64)], p: usize, q: usize) -> f64 {
    let all: Vec<&(f64, f64)> = a.iter().chain(b).collect();
    let rx = (
        all.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        all.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
    );
    let ry = (
        all.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        all.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
    );
    let (ca, cb) = (brute_counts(a, p, q, rx, ry), brute_counts(b, p, q, rx, ry));
    let mut s = 0i64;
    for i in 0..p {
        for j in 0..q {
            s += (ca[i][j] - cb[i][j]).pow(2);
        }
    }
    (s as f64).sqrt()
}

// ---------- quantile oracle ----------

/// Interpolated quantile at 1-based position 1 + (n − 1)p, written as a
/// weighted average of the neighbouring order statistics.
pub fn quantile_oracle(values: &[f64], p: f64) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = 1.0 + (s.len() as f64 - 1.0) * p;
    let j = pos.floor() as usize; // 1-based
    let g = pos - j as f64;
    if j >= s.len() {
        return s[s.len() - 1];
    }
    (1.0 - g) * s[j - 1] + g * s[j]
}

pub fn quartile_vector_oracle(d: &Dataset) -> [f64; 3] {
    let g = codes(d, "group");
    let y = col(d, 1);
    let a: Vec<f64> = y.iter().zip(&g).filter(|(_, &c)| c == 0).map(|(v, _)| *v).collect();
    let b: Vec<f64> = y.iter().zip(&g).filter(|(_, &c)| c == 1).map(|(v, _)| *v).collect();
    [0.25, 0.5, 0.75].map(|p| (quantile_oracle(&a, p) - quantile_oracle(&b, p)).abs())
}

pub fn boxplot_oracle(x: &Dataset, y: &Dataset) -> f64 {
    let (a, b) = (quartile_vector_oracle(x), quartile_vector_oracle(y));
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

// ---------- regression oracle ----------

/// Normal-equations fit (Cramer's rule on the 2×2 system).
pub fn normal_equations(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    (intercept, slope)
}

pub fn regression_oracle(a: &Dataset, b: &Dataset, bins: usize) -> f64 {
    let (ax, ay, bx, by) = (col(a, 0), col(a, 1), col(b, 0), col(b, 1));
    let lo = ax.iter().chain(&bx).copied().fold(f64::INFINITY, f64::min);
    let hi = ax.iter().chain(&bx).copied().fold(f64::NEG_INFINITY, f64::max);
    let fits = |xs: &[f64], ys: &[f64]| -> Vec<(f64, f64)> {
        (0..bins)
            .map(|k| {
                let (sx, sy): (Vec<f64>, Vec<f64>) = xs
                    .iter()
                    .zip(ys)
                    .filter(|(x, _)| edge_bin(**x, lo, hi, bins) == k)
                    .map(|(x, y)| (*x, *y))
                    .unzip();
                normal_equations(&sx, &sy)
            })
            .collect()
    };
    let (fa, fb) = (fits(&ax, &ay), fits(&bx, &by));
    fa.iter()
        .zip(&fb)
        .map(|(u, v)| (u.0 - v.0).powi(2) + (u.1 - v.1).powi(2))
        .sum::<f64>()
        .sqrt()
}

// ---------- separation oracle ----------

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// (min, avg, cluster-mean) separation vectors by direct enumeration.
pub fn separation_oracle(d: &Dataset) -> [Vec<f64>; 3] {
    let (xs, ys) = (col(d, 0), col(d, 1));
    let cs = codes(d, "cluster");
    let g = d.variable("cluster").unwrap().levels().unwrap().len();
    let pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    let mut min = Vec::new();
    let mut avg = Vec::new();
    let mut cen = Vec::new();
    for k in 0..g as u32 {
        let inside: Vec<(f64, f64)> = pts.iter().zip(&cs).filter(|(_, &c)| c == k).map(|(p, _)| *p).collect();
        let outside: Vec<(f64, f64)> = pts.iter().zip(&cs).filter(|(_, &c)| c != k).map(|(p, _)| *p).collect();
        let mut all = Vec::new();
        for u in &inside {
            for v in &outside {
                all.push(dist2(*u, *v));
            }
        }
        min.push(all.iter().copied().fold(f64::INFINITY, f64::min));
        avg.push(all.iter().sum::<f64>() / all.len() as f64);
        let n = inside.len() as f64;
        cen.push((inside.iter().map(|p| p.0).sum::<f64>() / n, inside.iter().map(|p| p.1).sum::<f64>() / n));
    }
    let cms = (0..g)
        .map(|i| {
            (0..g)
                .filter(|&j| j != i)
                .map(|j| dist2(cen[i], cen[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    [min, avg, cms]
}

pub fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

// ---------- statistics ----------

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at level 0.001.
pub fn ks_critical_001(na: usize, nb: usize) -> f64 {
    let c = (-(0.001f64 / 2.0).ln() / 2.0).sqrt();
    c * (((na + nb) as f64) / ((na * nb) as f64)).sqrt()
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}
