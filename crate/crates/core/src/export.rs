//! Writing analysis results to disk. The format follows the file
//! extension: `.json`, `.csv` or `.svg`.

use std::path::Path;

use crate::binsweep::SweepResult;
use crate::error::{Error, Result};
use crate::inference::{DifficultyReport, EmpiricalDistribution, MeanDistances};
use crate::render::{render_distribution, render_sweep};

pub enum Analysis<'a> {
    Difficulty(&'a DifficultyReport),
    /// Samples plus, optionally, a lineup's mean distances for the rug.
    Distribution(&'a EmpiricalDistribution, Option<&'a MeanDistances>),
    Sweep(&'a SweepResult),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Ok(Format::Json),
            Some("csv") => Ok(Format::Csv),
            Some("svg") => Ok(Format::Svg),
            other => Err(Error::Precondition(format!(
                "cannot infer export format from extension {other:?}; use .json, .csv or .svg"
            ))),
        }
    }
}

pub fn render_analysis(report: &Analysis<'_>, format: Format) -> Result<String> {
    let text = match (report, format) {
        (Analysis::Difficulty(r), Format::Json) => serde_json::to_string_pretty(r)?,
        (Analysis::Difficulty(r), Format::Csv) => {
            let verdict = serde_json::to_value(r.verdict)?;
            format!(
                "delta,gamma,verdict,d_true\n{},{},{},{}\n",
                r.delta,
                r.gamma,
                verdict.as_str().unwrap_or_default(),
                r.mean_distances.d_true
            )
        }
        (Analysis::Distribution(d, md), Format::Json) => match md {
            None => serde_json::to_string_pretty(d)?,
            Some(md) => serde_json::to_string_pretty(&serde_json::json!({
                "distribution": d,
                "mean_distances": md,
            }))?,
        },
        (Analysis::Distribution(d, _), Format::Csv) => d.to_csv(),
        (Analysis::Distribution(d, md), Format::Svg) => render_distribution(d, *md),
        (Analysis::Sweep(s), Format::Json) => serde_json::to_string_pretty(&s.tile_spec())?,
        (Analysis::Sweep(s), Format::Csv) => s.to_csv(),
        (Analysis::Sweep(s), Format::Svg) => render_sweep(s),
        (Analysis::Difficulty(_), Format::Svg) => {
            return Err(Error::Precondition("difficulty reports have no SVG form".into()))
        }
    };
    Ok(text)
}

pub fn export_analysis(report: &Analysis<'_>, path: &Path) -> Result<()> {
    let text = render_analysis(report, Format::from_path(path)?)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
