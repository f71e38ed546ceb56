//! Grid search spaces, configurations and the d=1 neighborhood structure.
//!
//! A configuration is stored as one grid index per hyperparameter. The
//! lexicographic order of index vectors is the canonical order used by every
//! other module; it coincides with the mixed-radix linear index computed by
//! [`SearchSpace::linear_index`] (first hyperparameter most significant).

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HpKind {
    Categorical,
    Numerical,
}

/// One admissible grid value. `None` is the distinguished none-marker
/// (spelled `null` in schema files).
#[derive(Debug, Clone, PartialEq)]
pub enum GridValue {
    Str(String),
    Num(f64),
    None,
}

impl GridValue {
    pub fn is_none(&self) -> bool {
        matches!(self, GridValue::None)
    }

    /// Text form used in CSV files and configuration keys.
    pub fn label(&self) -> String {
        match self {
            GridValue::Str(s) => s.clone(),
            GridValue::Num(x) => format!("{x}"),
            GridValue::None => "None".to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            GridValue::Str(s) => Value::String(s.clone()),
            GridValue::Num(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            GridValue::None => Value::Null,
        }
    }
}

impl fmt::Display for GridValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn is_none_spelling(cell: &str) -> bool {
    matches!(cell, "" | "None" | "none" | "null" | "NULL")
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperparameterDecl {
    pub name: String,
    pub kind: HpKind,
    pub values: Vec<GridValue>,
}

impl HyperparameterDecl {
    pub fn categorical<S: Into<String>>(name: &str, values: impl IntoIterator<Item = S>) -> Self {
        HyperparameterDecl {
            name: name.to_string(),
            kind: HpKind::Categorical,
            values: values.into_iter().map(|v| GridValue::Str(v.into())).collect(),
        }
    }

    pub fn numerical(name: &str, values: impl IntoIterator<Item = f64>) -> Self {
        HyperparameterDecl {
            name: name.to_string(),
            kind: HpKind::Numerical,
            values: values.into_iter().map(GridValue::Num).collect(),
        }
    }

    /// Appends the none-marker as the last grid position.
    pub fn with_none(mut self) -> Self {
        self.values.push(GridValue::None);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid index of a CSV cell, or `None` when the cell is off-grid.
    pub fn index_of_cell(&self, cell: &str) -> Option<u32> {
        let cell = cell.trim();
        let by_position = |pred: &dyn Fn(&GridValue) -> bool| {
            self.values.iter().position(pred).map(|i| i as u32)
        };
        match self.kind {
            HpKind::Categorical => by_position(&|v| matches!(v, GridValue::Str(s) if s == cell))
                .or_else(|| {
                    if is_none_spelling(cell) {
                        by_position(&|v| v.is_none())
                    } else {
                        None
                    }
                }),
            HpKind::Numerical => {
                if is_none_spelling(cell) {
                    return by_position(&|v| v.is_none());
                }
                let x: f64 = cell.parse().ok()?;
                by_position(&|v| matches!(v, GridValue::Num(y) if *y == x))
            }
        }
    }

    fn validate(&self, position: usize) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::EmptyValues {
                position,
                name: self.name.clone(),
            });
        }
        let bad = |value_position: usize, reason: &'static str| Error::BadGridValue {
            position,
            name: self.name.clone(),
            value_position,
            value: self.values[value_position].label(),
            reason,
        };
        match self.kind {
            HpKind::Categorical => {
                let mut seen = HashSet::new();
                let mut seen_none = false;
                for (i, v) in self.values.iter().enumerate() {
                    match v {
                        GridValue::Str(s) => {
                            if !seen.insert(s.as_str()) {
                                return Err(bad(i, "is duplicated"));
                            }
                        }
                        GridValue::None => {
                            if seen_none {
                                return Err(bad(i, "is duplicated"));
                            }
                            seen_none = true;
                        }
                        GridValue::Num(_) => return Err(bad(i, "is not a categorical label")),
                    }
                }
            }
            HpKind::Numerical => {
                let mut prev: Option<f64> = None;
                for (i, v) in self.values.iter().enumerate() {
                    match v {
                        GridValue::Num(x) => {
                            if !x.is_finite() {
                                return Err(bad(i, "is not finite"));
                            }
                            if let Some(p) = prev {
                                if *x <= p {
                                    return Err(bad(i, "breaks the strictly increasing grid"));
                                }
                            }
                            prev = Some(*x);
                        }
                        GridValue::None => {
                            if i + 1 != self.values.len() {
                                return Err(bad(i, "must occupy the last grid position"));
                            }
                        }
                        GridValue::Str(_) => return Err(bad(i, "is not a number")),
                    }
                }
            }
        }
        Ok(())
    }
}

/// A configuration, identified by its grid-index vector in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(pub Vec<u32>);

impl Configuration {
    pub fn new(indices: Vec<u32>) -> Self {
        Configuration(indices)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for Configuration {
    fn from(v: Vec<u32>) -> Self {
        Configuration(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    hps: Vec<HyperparameterDecl>,
    strides: Vec<u64>,
    cardinality: u64,
}

#[derive(Deserialize)]
struct RawSchema {
    hps: Vec<RawHp>,
}

#[derive(Deserialize)]
struct RawHp {
    name: String,
    kind: HpKind,
    values: Vec<Value>,
}

impl SearchSpace {
    pub fn new(hps: Vec<HyperparameterDecl>) -> Result<Self> {
        let mut names = HashSet::new();
        for (position, hp) in hps.iter().enumerate() {
            if !names.insert(hp.name.as_str()) {
                return Err(Error::DuplicateHp {
                    position,
                    name: hp.name.clone(),
                });
            }
            hp.validate(position)?;
        }
        let mut strides = vec![0u64; hps.len()];
        let mut acc: u64 = 1;
        for (i, hp) in hps.iter().enumerate().rev() {
            strides[i] = acc;
            acc = acc
                .checked_mul(hp.len() as u64)
                .ok_or(Error::SpaceTooLarge)?;
        }
        Ok(SearchSpace {
            hps,
            strides,
            cardinality: acc,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawSchema =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_json_value(value: Value) -> Result<Self> {
        let raw: RawSchema =
            serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawSchema) -> Result<Self> {
        let mut hps = Vec::with_capacity(raw.hps.len());
        for (position, rh) in raw.hps.into_iter().enumerate() {
            let mut values = Vec::with_capacity(rh.values.len());
            for (vp, v) in rh.values.into_iter().enumerate() {
                let gv = match (&rh.kind, v) {
                    (_, Value::Null) => GridValue::None,
                    (HpKind::Numerical, Value::Number(n)) => {
                        GridValue::Num(n.as_f64().ok_or_else(|| {
                            Error::Schema(format!("hps[{position}].values[{vp}]: bad number"))
                        })?)
                    }
                    (HpKind::Categorical, Value::String(s)) => GridValue::Str(s),
                    (HpKind::Categorical, Value::Number(n)) => GridValue::Str(n.to_string()),
                    (HpKind::Categorical, Value::Bool(b)) => GridValue::Str(b.to_string()),
                    (_, other) => {
                        return Err(Error::Schema(format!(
                            "hps[{position}].values[{vp}]: unsupported value {other}"
                        )))
                    }
                };
                values.push(gv);
            }
            hps.push(HyperparameterDecl {
                name: rh.name,
                kind: rh.kind,
                values,
            });
        }
        SearchSpace::new(hps)
    }

    pub fn to_json_value(&self) -> Value {
        let hps: Vec<Value> = self
            .hps
            .iter()
            .map(|hp| {
                let mut m = serde_json::Map::new();
                m.insert("name".into(), Value::String(hp.name.clone()));
                m.insert(
                    "kind".into(),
                    serde_json::to_value(hp.kind).expect("kind serializes"),
                );
                m.insert(
                    "values".into(),
                    Value::Array(hp.values.iter().map(GridValue::to_json).collect()),
                );
                Value::Object(m)
            })
            .collect();
        let mut root = serde_json::Map::new();
        root.insert("hps".into(), Value::Array(hps));
        Value::Object(root)
    }

    pub fn hps(&self) -> &[HyperparameterDecl] {
        &self.hps
    }

    pub fn dims(&self) -> usize {
        self.hps.len()
    }

    pub fn cardinality(&self) -> u64 {
        self.cardinality
    }

    pub fn position_of(&self, name: &str) -> Option<usize> {
        self.hps.iter().position(|hp| hp.name == name)
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        c.0.len() == self.hps.len()
            && c.0
                .iter()
                .zip(&self.hps)
                .all(|(&i, hp)| (i as usize) < hp.len())
    }

    pub fn check(&self, c: &Configuration) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::NotInSpace(c.0.clone()))
        }
    }

    /// Mixed-radix index; increasing in canonical order.
    pub fn linear_index(&self, c: &Configuration) -> u64 {
        c.0.iter()
            .zip(&self.strides)
            .map(|(&i, &s)| i as u64 * s)
            .sum()
    }

    pub fn from_linear_index(&self, mut linear: u64) -> Configuration {
        let mut out = vec![0u32; self.hps.len()];
        for (slot, &stride) in out.iter_mut().zip(&self.strides) {
            *slot = (linear / stride) as u32;
            linear %= stride;
        }
        Configuration(out)
    }

    /// Every configuration of the space in canonical order.
    pub fn iter_all(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.cardinality).map(move |i| self.from_linear_index(i))
    }

    /// Labels of the values a configuration selects, in declaration order.
    pub fn labels(&self, c: &Configuration) -> Vec<String> {
        c.0.iter()
            .zip(&self.hps)
            .map(|(&i, hp)| hp.values[i as usize].label())
            .collect()
    }

    /// Sum of per-hyperparameter distances: 0/1 mismatch for categorical,
    /// grid-index difference for numerical (the none-marker sits one step
    /// past the last numeric value).
    pub fn distance(&self, a: &Configuration, b: &Configuration) -> u64 {
        a.0.iter()
            .zip(&b.0)
            .zip(&self.hps)
            .map(|((&x, &y), hp)| match hp.kind {
                HpKind::Categorical => u64::from(x != y),
                HpKind::Numerical => x.abs_diff(y) as u64,
            })
            .sum()
    }

    /// Grid moves of exactly one distance unit on a single hyperparameter,
    /// as `(hp position, new index)`.
    fn unit_moves(&self, c: &Configuration) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for (h, hp) in self.hps.iter().enumerate() {
            let cur = c.0[h];
            let m = hp.len() as u32;
            match hp.kind {
                HpKind::Categorical => {
                    out.extend((0..m).filter(|&v| v != cur).map(|v| (h, v)));
                }
                HpKind::Numerical => {
                    if cur > 0 {
                        out.push((h, cur - 1));
                    }
                    if cur + 1 < m {
                        out.push((h, cur + 1));
                    }
                }
            }
        }
        out
    }

    /// All configurations at distance exactly 1, in canonical order.
    pub fn neighbors(&self, c: &Configuration) -> Vec<Configuration> {
        let mut out: Vec<Configuration> = self
            .unit_moves(c)
            .into_iter()
            .map(|(h, v)| {
                let mut n = c.clone();
                n.0[h] = v;
                n
            })
            .collect();
        out.sort();
        out
    }

    /// All configurations at distance exactly 2 (two-step perturbations),
    /// in canonical order.
    pub fn perturbations2(&self, c: &Configuration) -> Vec<Configuration> {
        let mut out = Vec::new();
        for (h, hp) in self.hps.iter().enumerate() {
            if hp.kind == HpKind::Numerical {
                let cur = c.0[h];
                if cur >= 2 {
                    let mut n = c.clone();
                    n.0[h] = cur - 2;
                    out.push(n);
                }
                if cur + 2 < hp.len() as u32 {
                    let mut n = c.clone();
                    n.0[h] = cur + 2;
                    out.push(n);
                }
            }
        }
        let moves = self.unit_moves(c);
        for (i, &(h1, v1)) in moves.iter().enumerate() {
            for &(h2, v2) in &moves[i + 1..] {
                if h1 != h2 {
                    let mut n = c.clone();
                    n.0[h1] = v1;
                    n.0[h2] = v2;
                    out.push(n);
                }
            }
        }
        out.sort();
        out
    }
}

pub fn parse_space(schema_file: impl AsRef<Path>) -> Result<SearchSpace> {
    let path = schema_file.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SearchSpace::from_json_str(&text)
}
