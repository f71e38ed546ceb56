//! Evaluated configurations as a directed landscape graph.
//!
//! Nodes are the evaluated configurations in canonical order; node ids are
//! positions in that order. Each pair of present d=1 neighbors is either a
//! directed edge pointing at the strictly better endpoint or, when the losses
//! are exactly equal, a neutral pair.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::{Configuration, SearchSpace};
use crate::stats;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Minimize,
    Maximize,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minimize" | "min" => Ok(Direction::Minimize),
            "maximize" | "max" => Ok(Direction::Maximize),
            other => Err(Error::InvalidParameter(format!(
                "direction must be minimize or maximize, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Split {
    Train,
    #[default]
    Test,
    Other(String),
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Train => f.write_str("train"),
            Split::Test => f.write_str("test"),
            Split::Other(s) => f.write_str(s),
        }
    }
}

impl From<&str> for Split {
    fn from(s: &str) -> Self {
        match s {
            "train" => Split::Train,
            "test" => Split::Test,
            other => Split::Other(other.to_string()),
        }
    }
}

impl Serialize for Split {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Split {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Split::from(s.as_str()))
    }
}

/// What the loss column means. The fidelity fields are labels only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub loss_column: String,
    pub direction: Direction,
    pub fidelity_alpha: Option<f64>,
    pub fidelity_epochs: Option<u32>,
    pub split: Split,
}

impl Scenario {
    pub fn new(loss_column: impl Into<String>, direction: Direction) -> Self {
        Scenario {
            loss_column: loss_column.into(),
            direction,
            fidelity_alpha: None,
            fidelity_epochs: None,
            split: Split::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.fidelity_alpha {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "fidelity alpha must lie in (0, 1], got {a}"
                )));
            }
        }
        if self.fidelity_epochs == Some(0) {
            return Err(Error::InvalidParameter(
                "fidelity epochs must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Evaluated configurations before the graph is built.
#[derive(Debug, Clone)]
pub struct Evaluations {
    pub space: SearchSpace,
    pub scenario: Scenario,
    pub rows: Vec<(Configuration, f64)>,
}

#[derive(Debug, Clone)]
pub struct Landscape {
    space: SearchSpace,
    scenario: Scenario,
    configs: Vec<Configuration>,
    losses: Vec<f64>,
    costs: Vec<f64>,
    index: HashMap<u64, NodeId>,
    adj_offsets: Vec<usize>,
    adj: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
    neutral: Vec<(NodeId, NodeId)>,
}

/// Builds the landscape graph: sorts nodes canonically, links every present
/// d=1 pair, and orients each link towards the strictly better loss.
pub fn build_landscape_graph(evals: Evaluations) -> Result<Landscape> {
    let Evaluations {
        space,
        scenario,
        mut rows,
    } = evals;
    scenario.validate()?;
    for (c, loss) in &rows {
        space.check(c)?;
        if !loss.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "configuration {:?} has non-finite loss {loss}",
                c.0
            )));
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidParameter(format!(
            "duplicate configuration {:?}",
            w[0].0 .0
        )));
    }

    let n = rows.len();
    let mut configs = Vec::with_capacity(n);
    let mut losses = Vec::with_capacity(n);
    let mut index = HashMap::with_capacity(n);
    for (id, (c, loss)) in rows.into_iter().enumerate() {
        index.insert(space.linear_index(&c), id);
        configs.push(c);
        losses.push(loss);
    }
    let costs: Vec<f64> = match scenario.direction {
        Direction::Minimize => losses.clone(),
        Direction::Maximize => losses.iter().map(|l| -l).collect(),
    };

    let mut adj_offsets = Vec::with_capacity(n + 1);
    let mut adj = Vec::new();
    adj_offsets.push(0);
    for c in &configs {
        let mut ns: Vec<NodeId> = space
            .neighbors(c)
            .iter()
            .filter_map(|nb| index.get(&space.linear_index(nb)).copied())
            .collect();
        ns.sort_unstable();
        adj.extend(ns);
        adj_offsets.push(adj.len());
    }

    let mut edges = Vec::new();
    let mut neutral = Vec::new();
    for u in 0..n {
        for &v in &adj[adj_offsets[u]..adj_offsets[u + 1]] {
            if v <= u {
                continue;
            }
            if costs[v] < costs[u] {
                edges.push((u, v));
            } else if costs[u] < costs[v] {
                edges.push((v, u));
            } else {
                neutral.push((u, v));
            }
        }
    }
    edges.sort_unstable();

    Ok(Landscape {
        space,
        scenario,
        configs,
        losses,
        costs,
        index,
        adj_offsets,
        adj,
        edges,
        neutral,
    })
}

impl Landscape {
    pub fn from_rows(
        space: SearchSpace,
        scenario: Scenario,
        rows: Vec<(Configuration, f64)>,
    ) -> Result<Self> {
        build_landscape_graph(Evaluations {
            space,
            scenario,
            rows,
        })
    }

    /// Complete-grid landscape with losses given in canonical order.
    pub fn from_full_grid(space: SearchSpace, scenario: Scenario, losses: Vec<f64>) -> Result<Self> {
        if losses.len() as u64 != space.cardinality() {
            return Err(Error::InvalidParameter(format!(
                "expected {} losses, got {}",
                space.cardinality(),
                losses.len()
            )));
        }
        let rows = space.iter_all().zip(losses).collect();
        Landscape::from_rows(space, scenario, rows)
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn config(&self, id: NodeId) -> &Configuration {
        &self.configs[id]
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn loss(&self, id: NodeId) -> f64 {
        self.losses[id]
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    /// Loss oriented so that smaller is always better.
    pub fn cost(&self, id: NodeId) -> f64 {
        self.costs[id]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn is_better(&self, a: NodeId, b: NodeId) -> bool {
        self.costs[a] < self.costs[b]
    }

    pub fn node_of(&self, c: &Configuration) -> Option<NodeId> {
        if !self.space.contains(c) {
            return None;
        }
        self.index.get(&self.space.linear_index(c)).copied()
    }

    /// Present d=1 neighbors of a node, ascending by id.
    pub fn neighbors_of(&self, id: NodeId) -> &[NodeId] {
        &self.adj[self.adj_offsets[id]..self.adj_offsets[id + 1]]
    }

    /// Present configurations at distance exactly 2, ascending by id.
    pub fn perturbations2_of(&self, id: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .space
            .perturbations2(&self.configs[id])
            .iter()
            .filter_map(|c| self.index.get(&self.space.linear_index(c)).copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> u64 {
        self.space.distance(&self.configs[a], &self.configs[b])
    }

    /// Directed edges `(worse, better)`, sorted.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Exactly tied neighbor pairs `(a, b)` with `a < b`, sorted.
    pub fn neutral_pairs(&self) -> &[(NodeId, NodeId)] {
        &self.neutral
    }

    /// Number of linked (d=1) pairs: edges plus neutral pairs.
    pub fn adjacency_count(&self) -> usize {
        self.edges.len() + self.neutral.len()
    }

    /// Best node; ties go to the canonically first node.
    pub fn best_node(&self) -> Option<NodeId> {
        (0..self.len()).min_by(|&a, &b| self.costs[a].total_cmp(&self.costs[b]).then(a.cmp(&b)))
    }

    /// Fractional ranks (1 = best, ties share their mean position).
    pub fn ranks(&self) -> Vec<f64> {
        stats::fractional_ranks(&self.costs)
    }

    /// Returns a copy with losses replaced; graph structure is rebuilt.
    pub fn with_losses(&self, losses: Vec<f64>) -> Result<Self> {
        if losses.len() != self.len() {
            return Err(Error::InvalidParameter("loss vector length mismatch".into()));
        }
        let rows = self.configs.iter().cloned().zip(losses).collect();
        Landscape::from_rows(self.space.clone(), self.scenario.clone(), rows)
    }

    pub fn to_export(&self) -> GraphExport {
        GraphExport {
            nodes: (0..self.len())
                .map(|id| NodeExport {
                    id,
                    config: self.configs[id].clone(),
                    loss: self.losses[id],
                })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            neutral: self.neutral.iter().map(|&(a, b)| [a, b]).collect(),
            scenario: self.scenario.clone(),
            space: self.space.to_json_value(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_export()).expect("graph export serializes")
    }

    pub fn from_export(export: GraphExport) -> Result<Self> {
        let space = SearchSpace::from_json_value(export.space)?;
        for (pos, node) in export.nodes.iter().enumerate() {
            if node.id != pos {
                return Err(Error::GraphExport(format!(
                    "node at position {pos} has id {}",
                    node.id
                )));
            }
        }
        let rows = export
            .nodes
            .into_iter()
            .map(|n| (n.config, n.loss))
            .collect();
        let l = Landscape::from_rows(space, export.scenario, rows)?;
        let edges: Vec<(usize, usize)> = export.edges.iter().map(|e| (e[0], e[1])).collect();
        let neutral: Vec<(usize, usize)> = export.neutral.iter().map(|e| (e[0], e[1])).collect();
        if edges != l.edges || neutral != l.neutral {
            return Err(Error::GraphExport(
                "edge lists disagree with node losses and the search space".into(),
            ));
        }
        Ok(l)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let export: GraphExport = serde_json::from_str(text)?;
        Landscape::from_export(export)
    }

    pub fn read_graph(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Landscape::from_json_str(&text)
    }

    /// Evaluations CSV: one column per hyperparameter, then the loss column.
    pub fn write_evaluations_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = self.space.hps().iter().map(|h| h.name.clone()).collect();
        header.push(self.scenario.loss_column.clone());
        wtr.write_record(&header).map_err(|e| Error::Csv(e.to_string()))?;
        for id in 0..self.len() {
            let mut rec = self.space.labels(&self.configs[id]);
            rec.push(format!("{}", self.losses[id]));
            wtr.write_record(&rec).map_err(|e| Error::Csv(e.to_string()))?;
        }
        wtr.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeExport {
    pub id: usize,
    pub config: Configuration,
    pub loss: f64,
}

/// Graph export file; nodes are in canonical order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphExport {
    pub nodes: Vec<NodeExport>,
    pub edges: Vec<[usize; 2]>,
    pub neutral: Vec<[usize; 2]>,
    pub scenario: Scenario,
    pub space: serde_json::Value,
}

/// Reads an evaluations CSV against a declared space.
pub fn parse_evaluations(
    space: &SearchSpace,
    table_file: impl AsRef<Path>,
    scenario: &Scenario,
) -> Result<Landscape> {
    let path = table_file.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_evaluations(space, file, scenario)
}

pub fn read_evaluations<R: std::io::Read>(
    space: &SearchSpace,
    reader: R,
    scenario: &Scenario,
) -> Result<Landscape> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let hp_cols = space
        .hps()
        .iter()
        .map(|hp| col(&hp.name))
        .collect::<Result<Vec<_>>>()?;
    let loss_col = col(&scenario.loss_column)?;

    let mut rows = Vec::new();
    let mut first_row: HashMap<u64, usize> = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Csv(format!("row {row}: {e}")))?;
        let mut idx = Vec::with_capacity(hp_cols.len());
        for (hp, &c) in space.hps().iter().zip(&hp_cols) {
            let cell = rec.get(c).unwrap_or("");
            let v = hp.index_of_cell(cell).ok_or_else(|| Error::OffGrid {
                row,
                column: hp.name.clone(),
                value: cell.to_string(),
            })?;
            idx.push(v);
        }
        let cell = rec.get(loss_col).unwrap_or("").trim();
        if cell.is_empty() {
            return Err(Error::MissingLoss {
                row,
                column: scenario.loss_column.clone(),
            });
        }
        let loss: f64 = cell
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite())
            .ok_or_else(|| Error::NonFiniteLoss {
                row,
                column: scenario.loss_column.clone(),
                value: cell.to_string(),
            })?;
        let c = Configuration::new(idx);
        if let Some(&first) = first_row.get(&space.linear_index(&c)) {
            return Err(Error::DuplicateConfiguration { row, first });
        }
        first_row.insert(space.linear_index(&c), row);
        rows.push((c, loss));
    }
    Landscape::from_rows(space.clone(), scenario.clone(), rows)
}

/// Fractional ranks keyed by node id (1 = best).
pub fn rank_losses(l: &Landscape) -> Vec<f64> {
    l.ranks()
}

pub fn config_distance(space: &SearchSpace, a: &Configuration, b: &Configuration) -> Result<u64> {
    space.check(a)?;
    space.check(b)?;
    Ok(space.distance(a, b))
}

pub fn neighbors(space: &SearchSpace, c: &Configuration) -> Result<Vec<Configuration>> {
    space.check(c)?;
    Ok(space.neighbors(c))
}
