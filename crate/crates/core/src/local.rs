//! Best-improvement local search, basins of attraction, local optima networks
//! and escape statistics.
//!
//! Local search moves to the strictly best present neighbor until none is
//! strictly better; equally good candidates are resolved by node id. Since the
//! search is deterministic, the whole basin map is computed with one successor
//! per node, resolving nodes in ascending cost order.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::landscape::{Landscape, NodeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchTrace {
    pub optimum: NodeId,
    pub steps: usize,
    pub path: Vec<NodeId>,
}

/// The strictly best improving neighbor, if any.
pub fn best_improving_neighbor(l: &Landscape, node: NodeId) -> Option<NodeId> {
    let mut best: Option<NodeId> = None;
    let mut best_cost = l.cost(node);
    for &nb in l.neighbors_of(node) {
        if l.cost(nb) < best_cost {
            best = Some(nb);
            best_cost = l.cost(nb);
        }
    }
    best
}

pub fn local_search(l: &Landscape, start: NodeId) -> SearchTrace {
    let mut path = vec![start];
    let mut cur = start;
    while let Some(next) = best_improving_neighbor(l, cur) {
        path.push(next);
        cur = next;
    }
    SearchTrace {
        optimum: cur,
        steps: path.len() - 1,
        path,
    }
}

#[derive(Debug, Clone)]
pub struct BasinMap {
    optimum_of: Vec<NodeId>,
    steps: Vec<usize>,
    optima: Vec<NodeId>,
    members: Vec<Vec<NodeId>>,
    slot: HashMap<NodeId, usize>,
    global: NodeId,
}

impl BasinMap {
    pub fn optimum_of(&self, node: NodeId) -> NodeId {
        self.optimum_of[node]
    }

    pub fn steps(&self, node: NodeId) -> usize {
        self.steps[node]
    }

    /// Local optima in ascending id order.
    pub fn optima(&self) -> &[NodeId] {
        &self.optima
    }

    pub fn n_optima(&self) -> usize {
        self.optima.len()
    }

    pub fn is_optimum(&self, node: NodeId) -> bool {
        self.optimum_of[node] == node
    }

    pub fn members(&self, optimum: NodeId) -> &[NodeId] {
        &self.members[self.slot[&optimum]]
    }

    pub fn basin_size(&self, optimum: NodeId) -> usize {
        self.members(optimum).len()
    }

    /// Mean number of local-search steps from a basin member to its optimum.
    pub fn basin_radius(&self, optimum: NodeId) -> f64 {
        let m = self.members(optimum);
        m.iter().map(|&n| self.steps[n] as f64).sum::<f64>() / m.len() as f64
    }

    /// The global optimum; among equally good optima the lowest id wins.
    pub fn global_optimum(&self) -> NodeId {
        self.global
    }

    /// Basin map as CSV rows `config_id,optimum_id,steps`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("config_id,optimum_id,steps\n");
        for (node, (&o, &s)) in self.optimum_of.iter().zip(&self.steps).enumerate() {
            out.push_str(&format!("{node},{o},{s}\n"));
        }
        out
    }
}

/// Runs best-improvement local search from every node.
pub fn find_local_optima(l: &Landscape) -> BasinMap {
    let n = l.len();
    let succ: Vec<Option<NodeId>> = (0..n)
        .into_par_iter()
        .map(|u| best_improving_neighbor(l, u))
        .collect();

    let mut order: Vec<NodeId> = (0..n).collect();
    order.sort_by(|&a, &b| l.cost(a).total_cmp(&l.cost(b)).then(a.cmp(&b)));
    let mut optimum_of = vec![usize::MAX; n];
    let mut steps = vec![0usize; n];
    for &u in &order {
        match succ[u] {
            None => optimum_of[u] = u,
            Some(v) => {
                // succ has strictly lower cost, so it is already resolved
                optimum_of[u] = optimum_of[v];
                steps[u] = steps[v] + 1;
            }
        }
    }

    let optima: Vec<NodeId> = (0..n).filter(|&u| optimum_of[u] == u).collect();
    let slot: HashMap<NodeId, usize> = optima.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    let mut members = vec![Vec::new(); optima.len()];
    for u in 0..n {
        members[slot[&optimum_of[u]]].push(u);
    }
    let global = l.best_node().unwrap_or(0);
    BasinMap {
        optimum_of,
        steps,
        optima,
        members,
        slot,
        global,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasinSizeSummary {
    pub mean_basin_size: f64,
    /// True when there is no local optimum besides the global one.
    pub unimodal: bool,
}

/// Mean basin size over every local optimum except the global one.
pub fn mean_basin_size(b: &BasinMap) -> BasinSizeSummary {
    let sizes: Vec<f64> = b
        .optima()
        .iter()
        .filter(|&&o| o != b.global_optimum())
        .map(|&o| b.basin_size(o) as f64)
        .collect();
    if sizes.is_empty() {
        BasinSizeSummary {
            mean_basin_size: 0.0,
            unimodal: true,
        }
    } else {
        BasinSizeSummary {
            mean_basin_size: sizes.iter().sum::<f64>() / sizes.len() as f64,
            unimodal: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LonVertex {
    pub id: NodeId,
    pub loss: f64,
    pub basin_size: usize,
    pub basin_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LonEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalOptimaNetwork {
    pub vertices: Vec<LonVertex>,
    pub edges: Vec<LonEdge>,
    #[serde(skip)]
    perturbation_counts: BTreeMap<NodeId, usize>,
}

impl LocalOptimaNetwork {
    /// Number of present distance-2 configurations around an optimum.
    pub fn perturbation_count(&self, optimum: NodeId) -> usize {
        self.perturbation_counts.get(&optimum).copied().unwrap_or(0)
    }

    /// Edge weights divided by the source optimum's perturbation count,
    /// aligned with `edges`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.edges
            .iter()
            .map(|e| e.weight as f64 / self.perturbation_count(e.src) as f64)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("LON serializes")
    }
}

/// For every optimum, searches from each present configuration at distance
/// exactly 2 and counts arrivals at strictly better optima.
pub fn build_lon(l: &Landscape, b: &BasinMap) -> LocalOptimaNetwork {
    let per_optimum: Vec<(usize, BTreeMap<NodeId, u64>)> = b
        .optima()
        .par_iter()
        .map(|&o| {
            let n2 = l.perturbations2_of(o);
            let mut w = BTreeMap::new();
            for &p in &n2 {
                let target = b.optimum_of(p);
                if l.is_better(target, o) {
                    *w.entry(target).or_insert(0u64) += 1;
                }
            }
            (n2.len(), w)
        })
        .collect();

    let mut vertices = Vec::with_capacity(b.n_optima());
    let mut edges = Vec::new();
    let mut perturbation_counts = BTreeMap::new();
    for (&o, (count, w)) in b.optima().iter().zip(per_optimum) {
        vertices.push(LonVertex {
            id: o,
            loss: l.loss(o),
            basin_size: b.basin_size(o),
            basin_radius: b.basin_radius(o),
        });
        perturbation_counts.insert(o, count);
        edges.extend(w.into_iter().map(|(dst, weight)| LonEdge {
            src: o,
            dst,
            weight,
        }));
    }
    LocalOptimaNetwork {
        vertices,
        edges,
        perturbation_counts,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscapeConfig {
    /// Basins with fewer (member, perturbation) pairs than this are enumerated.
    pub enumeration_limit: u64,
    /// Pairs drawn per basin above the limit.
    pub samples: u64,
    pub seed: u64,
}

impl Default for EscapeConfig {
    fn default() -> Self {
        EscapeConfig {
            enumeration_limit: 1_000_000,
            samples: 100_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeEntry {
    pub optimum: NodeId,
    /// Pairs evaluated (all pairs when `exact`).
    pub pairs: u64,
    pub exact: bool,
    pub escape_rate: Option<f64>,
    pub improve_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeStats {
    pub entries: Vec<EscapeEntry>,
    pub config: EscapeConfig,
}

/// Escape and improve rates of every non-global optimum: the share of
/// (basin member, distance-2 perturbation) pairs whose local search ends at a
/// different optimum, respectively at a strictly better one.
pub fn escape_improve_rates(l: &Landscape, b: &BasinMap, cfg: &EscapeConfig) -> EscapeStats {
    let targets: Vec<NodeId> = b
        .optima()
        .iter()
        .copied()
        .filter(|&o| o != b.global_optimum())
        .collect();
    let entries = targets
        .par_iter()
        .map(|&o| escape_entry(l, b, o, cfg))
        .collect();
    EscapeStats {
        entries,
        config: *cfg,
    }
}

fn escape_entry(l: &Landscape, b: &BasinMap, o: NodeId, cfg: &EscapeConfig) -> EscapeEntry {
    let perturbations: Vec<Vec<NodeId>> = b
        .members(o)
        .iter()
        .map(|&m| l.perturbations2_of(m))
        .collect();
    let total: u64 = perturbations.iter().map(|p| p.len() as u64).sum();
    let classify = |p: NodeId| {
        let t = b.optimum_of(p);
        (t != o, l.is_better(t, o))
    };
    let (mut escaped, mut improved) = (0u64, 0u64);
    let exact = total < cfg.enumeration_limit;
    let pairs = if exact {
        for &p in perturbations.iter().flatten() {
            let (e, i) = classify(p);
            escaped += u64::from(e);
            improved += u64::from(i);
        }
        total
    } else {
        let mut prefix = Vec::with_capacity(perturbations.len());
        let mut acc = 0u64;
        for p in &perturbations {
            acc += p.len() as u64;
            prefix.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(o as u64);
        for _ in 0..cfg.samples {
            let k = rng.random_range(0..total);
            let member = prefix.partition_point(|&c| c <= k);
            let before = if member == 0 { 0 } else { prefix[member - 1] };
            let (e, i) = classify(perturbations[member][(k - before) as usize]);
            escaped += u64::from(e);
            improved += u64::from(i);
        }
        cfg.samples
    };
    let rate = |x: u64| (pairs > 0).then(|| x as f64 / pairs as f64);
    EscapeEntry {
        optimum: o,
        pairs,
        exact,
        escape_rate: rate(escaped),
        improve_rate: rate(improved),
    }
}
