//! Tabular data model: variables, datasets and lineups.
//!
//! Column order is significant. Metrics pick their roles from the order in
//! which variables appear (first two continuous variables are the X₁/X₂ axes,
//! the categorical variable is the group).

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Continuous,
    Categorical,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Continuous(Vec<f64>),
    /// Labels stored as codes into `levels`. Levels keep first-appearance order.
    Categorical { levels: Vec<String>, codes: Vec<u32> },
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Continuous(v) => v.len(),
            Values::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> VariableKind {
        match self {
            Values::Continuous(_) => VariableKind::Continuous,
            Values::Categorical { .. } => VariableKind::Categorical,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    name: String,
    values: Values,
}

impl Variable {
    pub fn continuous(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse(format!(
                "non-finite value {bad} in continuous variable `{name}`"
            )));
        }
        Ok(Variable {
            name,
            values: Values::Continuous(values),
        })
    }

    /// Builds a categorical variable; levels are the distinct labels in
    /// order of first appearance.
    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, labels: &[S]) -> Self {
        let mut levels: Vec<String> = Vec::new();
        let codes = labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                match levels.iter().position(|x| x == l) {
                    Some(i) => i as u32,
                    None => {
                        levels.push(l.to_string());
                        (levels.len() - 1) as u32
                    }
                }
            })
            .collect();
        Variable {
            name: name.into(),
            values: Values::Categorical { levels, codes },
        }
    }

    /// Categorical variable with an explicit level list.
    pub fn categorical_with_levels(
        name: impl Into<String>,
        levels: Vec<String>,
        codes: Vec<u32>,
    ) -> Result<Self> {
        let name = name.into();
        if levels.is_empty() {
            return Err(Error::Schema(format!("categorical `{name}` has no levels")));
        }
        let distinct: HashSet<&String> = levels.iter().collect();
        if distinct.len() != levels.len() {
            return Err(Error::Schema(format!("categorical `{name}` repeats a level")));
        }
        if let Some(c) = codes.iter().find(|&&c| c as usize >= levels.len()) {
            return Err(Error::Schema(format!(
                "categorical `{name}` code {c} out of range"
            )));
        }
        Ok(Variable {
            name,
            values: Values::Categorical { levels, codes },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> VariableKind {
        self.values.kind()
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_continuous(&self) -> Option<&[f64]> {
        match &self.values {
            Values::Continuous(v) => Some(v),
            _ => None,
        }
    }

    pub fn levels(&self) -> Option<&[String]> {
        match &self.values {
            Values::Categorical { levels, .. } => Some(levels),
            _ => None,
        }
    }

    pub fn codes(&self) -> Option<&[u32]> {
        match &self.values {
            Values::Categorical { codes, .. } => Some(codes),
            _ => None,
        }
    }

    /// Label of row `i` as text (shortest round-trip form for numbers).
    pub fn label(&self, i: usize) -> String {
        match &self.values {
            Values::Continuous(v) => format_number(v[i]),
            Values::Categorical { levels, codes } => levels[codes[i] as usize].clone(),
        }
    }

    pub(crate) fn with_values(&self, values: Values) -> Variable {
        Variable {
            name: self.name.clone(),
            values,
        }
    }
}

/// Shortest decimal that round-trips to the same `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    variables: Vec<Variable>,
    n: usize,
}

impl Dataset {
    pub fn new(variables: Vec<Variable>) -> Result<Self> {
        let first = variables
            .first()
            .ok_or_else(|| Error::Empty("dataset has no variables".into()))?;
        let n = first.len();
        if n == 0 {
            return Err(Error::Empty("dataset has no rows".into()));
        }
        let mut names = HashSet::new();
        for v in &variables {
            if !names.insert(v.name()) {
                return Err(Error::Schema(format!("duplicate variable `{}`", v.name())));
            }
            if v.len() != n {
                return Err(Error::Structure(format!(
                    "variable `{}` has {} rows, expected {n}",
                    v.name(),
                    v.len()
                )));
            }
        }
        Ok(Dataset { variables, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn variable(&self, name: &str) -> Result<&Variable> {
        Ok(&self.variables[self.index_of(name)?])
    }

    /// Copy of `self` with variable `index` swapped for `replacement`.
    pub(crate) fn replace_variable(&self, index: usize, replacement: Variable) -> Dataset {
        debug_assert_eq!(replacement.len(), self.n);
        let mut variables = self.variables.clone();
        variables[index] = replacement;
        Dataset {
            variables,
            n: self.n,
        }
    }

    /// Indices of continuous variables, in column order.
    pub fn continuous_indices(&self) -> Vec<usize> {
        self.indices_of_kind(VariableKind::Continuous)
    }

    pub fn categorical_indices(&self) -> Vec<usize> {
        self.indices_of_kind(VariableKind::Categorical)
    }

    fn indices_of_kind(&self, kind: VariableKind) -> Vec<usize> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind() == kind)
            .map(|(i, _)| i)
            .collect()
    }

    /// Same variable names, kinds, level sets and row count.
    pub fn check_same_structure(&self, other: &Dataset) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Structure(format!(
                "row counts differ ({} vs {})",
                self.n, other.n
            )));
        }
        if self.variables.len() != other.variables.len() {
            return Err(Error::Structure("variable counts differ".into()));
        }
        for (a, b) in self.variables.iter().zip(&other.variables) {
            if a.name() != b.name() || a.kind() != b.kind() {
                return Err(Error::Structure(format!(
                    "variable `{}` ({:?}) does not match `{}` ({:?})",
                    a.name(),
                    a.kind(),
                    b.name(),
                    b.kind()
                )));
            }
            if a.levels() != b.levels() {
                return Err(Error::Structure(format!(
                    "levels of `{}` differ",
                    a.name()
                )));
            }
        }
        Ok(())
    }

    pub fn schema(&self) -> Schema {
        Schema {
            columns: self
                .variables
                .iter()
                .map(|v| ColumnSpec {
                    name: v.name().to_string(),
                    kind: v.kind(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: VariableKind,
}

/// Schema sidecar: `{"columns": [{"name": .., "kind": "continuous"|"categorical"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<ColumnSpec>,
}

impl Schema {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let schema: Schema = serde_json::from_str(s)?;
        let mut names = HashSet::new();
        for c in &schema.columns {
            if !names.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column `{}`", c.name)));
            }
        }
        Ok(schema)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&read_to_string(path)?)
    }

    fn kind_of(&self, name: &str) -> Option<VariableKind> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.kind)
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    let mut s = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|e| Error::io(path, e))?;
    Ok(s)
}

pub fn load_dataset(path: &Path, schema: &Schema) -> Result<Dataset> {
    parse_csv(&read_to_string(path)?, schema)
}

/// Parses CSV text (header row required). Columns keep file order.
pub fn parse_csv(text: &str, schema: &Schema) -> Result<Dataset> {
    if text.trim().is_empty() {
        return Err(Error::Empty("file is empty".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();

    let mut kinds = Vec::with_capacity(header.len());
    for name in &header {
        let kind = schema
            .kind_of(name)
            .ok_or_else(|| Error::Schema(format!("column `{name}` not declared in schema")))?;
        kinds.push(kind);
    }
    if let Some(missing) = schema
        .columns
        .iter()
        .find(|c| !header.iter().any(|h| h == &c.name))
    {
        return Err(Error::Schema(format!(
            "schema column `{}` missing from file",
            missing.name
        )));
    }

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("row {}: {e}", row + 1)))?;
        for (col, field) in record.iter().enumerate() {
            raw[col].push(field.to_string());
        }
    }
    if raw.first().is_none_or(|c| c.is_empty()) {
        return Err(Error::Empty("file has a header but no data rows".into()));
    }

    let variables = header
        .iter()
        .zip(kinds)
        .zip(raw)
        .map(|((name, kind), fields)| match kind {
            VariableKind::Categorical => Ok(Variable::categorical(name.clone(), &fields)),
            VariableKind::Continuous => {
                let values = fields
                    .iter()
                    .enumerate()
                    .map(|(row, f)| {
                        let v: f64 = f.trim().parse().map_err(|_| {
                            Error::Parse(format!("row {}: `{f}` in `{name}` is not a number", row + 1))
                        })?;
                        if !v.is_finite() {
                            return Err(Error::Parse(format!(
                                "row {}: non-finite value `{f}` in `{name}`",
                                row + 1
                            )));
                        }
                        Ok(v)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Variable::continuous(name.clone(), values)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(variables)
}

pub fn write_csv<W: Write>(data: &Dataset, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(data.variables().iter().map(Variable::name))?;
    for i in 0..data.n() {
        writer.write_record(data.variables().iter().map(|v| v.label(i)))?;
    }
    writer.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn save_dataset(data: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(data, file)
}

// JSON form: {"n": .., "columns": [{"name", "kind", "levels"?, "values"}]}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ColumnValues {
    Numbers(Vec<f64>),
    Labels(Vec<String>),
}

#[derive(Serialize, Deserialize)]
struct ColumnRepr {
    name: String,
    kind: VariableKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<String>>,
    values: ColumnValues,
}

#[derive(Serialize, Deserialize)]
struct DatasetRepr {
    n: usize,
    columns: Vec<ColumnRepr>,
}

impl From<&Dataset> for DatasetRepr {
    fn from(d: &Dataset) -> Self {
        let columns = d
            .variables
            .iter()
            .map(|v| match &v.values {
                Values::Continuous(xs) => ColumnRepr {
                    name: v.name.clone(),
                    kind: VariableKind::Continuous,
                    levels: None,
                    values: ColumnValues::Numbers(xs.clone()),
                },
                Values::Categorical { levels, codes } => ColumnRepr {
                    name: v.name.clone(),
                    kind: VariableKind::Categorical,
                    levels: Some(levels.clone()),
                    values: ColumnValues::Labels(
                        codes.iter().map(|&c| levels[c as usize].clone()).collect(),
                    ),
                },
            })
            .collect();
        DatasetRepr { n: d.n, columns }
    }
}

impl TryFrom<DatasetRepr> for Dataset {
    type Error = Error;

    fn try_from(r: DatasetRepr) -> Result<Self> {
        let variables = r
            .columns
            .into_iter()
            .map(|c| match (c.kind, c.values) {
                (VariableKind::Continuous, ColumnValues::Numbers(xs)) => {
                    Variable::continuous(c.name, xs)
                }
                // an empty array deserializes as Numbers
                (VariableKind::Categorical, ColumnValues::Numbers(xs)) if xs.is_empty() => {
                    Err(Error::Empty(format!("column `{}` has no values", c.name)))
                }
                (VariableKind::Categorical, ColumnValues::Labels(labels)) => match c.levels {
                    None => Ok(Variable::categorical(c.name, &labels)),
                    Some(levels) => {
                        let codes = labels
                            .iter()
                            .map(|l| {
                                levels.iter().position(|x| x == l).map(|i| i as u32).ok_or_else(
                                    || Error::Schema(format!("label `{l}` not among levels of `{}`", c.name)),
                                )
                            })
                            .collect::<Result<Vec<u32>>>()?;
                        Variable::categorical_with_levels(c.name, levels, codes)
                    }
                },
                (kind, _) => Err(Error::Schema(format!(
                    "column `{}` values do not match kind {kind:?}",
                    c.name
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        let d = Dataset::new(variables)?;
        if d.n != r.n {
            return Err(Error::Structure(format!("declared n={} but columns hold {}", r.n, d.n)));
        }
        Ok(d)
    }
}

impl Serialize for Dataset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DatasetRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dataset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = DatasetRepr::deserialize(d)?;
        Dataset::try_from(repr).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotType {
    Scatter,
    ScatterWithRegression,
    BoxplotPair,
    #[serde(rename = "projection_1d")]
    Projection1d,
    #[serde(rename = "projection_2d")]
    Projection2d,
}

impl std::str::FromStr for PlotType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Parse(format!("unknown plot type `{s}`")))
    }
}

/// One real dataset hidden among `m - 1` nulls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LineupRepr")]
pub struct Lineup {
    m: usize,
    true_position: usize,
    seed: u64,
    plot_type: PlotType,
    question: String,
    panels: Vec<Dataset>,
}

#[derive(Deserialize)]
struct LineupRepr {
    m: usize,
    true_position: usize,
    seed: u64,
    plot_type: PlotType,
    question: String,
    panels: Vec<Dataset>,
}

impl TryFrom<LineupRepr> for Lineup {
    type Error = Error;

    fn try_from(r: LineupRepr) -> Result<Self> {
        if r.m != r.panels.len() {
            return Err(Error::Structure(format!(
                "m = {} but {} panels present",
                r.m,
                r.panels.len()
            )));
        }
        Lineup::from_parts(r.panels, r.true_position, r.seed, r.plot_type, r.question)
    }
}

impl Lineup {
    /// Validates and builds a lineup from already-ordered panels.
    /// `true_position` is 1-based.
    pub fn from_parts(
        panels: Vec<Dataset>,
        true_position: usize,
        seed: u64,
        plot_type: PlotType,
        question: String,
    ) -> Result<Self> {
        let m = panels.len();
        if m < 2 {
            return Err(Error::Precondition(format!(
                "a lineup needs at least 2 panels, got {m}"
            )));
        }
        if !(1..=m).contains(&true_position) {
            return Err(Error::Precondition(format!(
                "true_position {true_position} outside 1..={m}"
            )));
        }
        for p in &panels[1..] {
            panels[0].check_same_structure(p)?;
        }
        Ok(Lineup {
            m,
            true_position,
            seed,
            plot_type,
            question,
            panels,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// 1-based position of the real data.
    pub fn true_position(&self) -> usize {
        self.true_position
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn plot_type(&self) -> PlotType {
        self.plot_type
    }

    pub fn question(&self) -> &str {
        &self.question
    }

    pub fn panels(&self) -> &[Dataset] {
        &self.panels
    }

    pub fn true_panel(&self) -> &Dataset {
        &self.panels[self.true_position - 1]
    }

    /// Null panels in panel order.
    pub fn null_panels(&self) -> impl Iterator<Item = &Dataset> {
        let t = self.true_position - 1;
        self.panels
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != t)
            .map(|(_, p)| p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }
}

/// Places `true_data` uniformly at random among `nulls`.
pub fn assemble_lineup(
    true_data: Dataset,
    nulls: Vec<Dataset>,
    seed: u64,
    plot_type: PlotType,
    question: impl Into<String>,
) -> Result<Lineup> {
    if nulls.is_empty() {
        return Err(Error::Precondition("at least one null dataset is required".into()));
    }
    for n in &nulls {
        true_data.check_same_structure(n)?;
    }
    let m = nulls.len() + 1;
    let mut rng = rng::rng_from_seed(rng::derive_seed(seed, rng::stream::POSITION, 0));
    let true_position = rng::uniform_index(&mut rng, m) + 1;

    let mut panels = nulls;
    panels.insert(true_position - 1, true_data);
    Lineup::from_parts(panels, true_position, seed, plot_type, question.into())
}
