//! Landscape topography metrics: random-walk autocorrelation, loss
//! assortativity, neutrality and neutrality-distance correlation, bundled with
//! the local-optima counts into a [`FlaReport`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::landscape::{Landscape, NodeId};
use crate::local::{self, find_local_optima, mean_basin_size};
use crate::stats;

pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Absolute floor of the neutrality tolerance scale; keeps losses of exactly
/// zero from demanding exact equality.
pub const NEUTRALITY_FLOOR_SCALE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WalkConfig {
    pub n_walks: usize,
    pub walk_length: usize,
    pub lag: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            n_walks: 100,
            walk_length: 100,
            lag: 1,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn with_seed(seed: u64) -> Self {
        WalkConfig {
            seed,
            ..WalkConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_walks == 0 || self.walk_length == 0 || self.lag == 0 {
            return Err(Error::InvalidParameter(
                "walk count, walk length and lag must be positive".into(),
            ));
        }
        if self.walk_length <= self.lag {
            return Err(Error::InvalidParameter(format!(
                "walk length {} must exceed lag {}",
                self.walk_length, self.lag
            )));
        }
        Ok(())
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "epsilon must be a non-negative fraction, got {epsilon}"
        )))
    }
}

/// Loss series of one random walk. Walk `index` draws from its own ChaCha
/// stream, so results do not depend on how walks are scheduled.
pub fn random_walk(l: &Landscape, w: &WalkConfig, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(w.seed);
    rng.set_stream(index as u64);
    let mut cur: NodeId = rng.random_range(0..l.len());
    let mut series = Vec::with_capacity(w.walk_length);
    series.push(l.loss(cur));
    for _ in 1..w.walk_length {
        let nbs = l.neighbors_of(cur);
        if nbs.is_empty() {
            break;
        }
        cur = nbs[rng.random_range(0..nbs.len())];
        series.push(l.loss(cur));
    }
    series
}

/// Mean lag-k autocorrelation over seeded random walks; walks with zero
/// variance are skipped. `None` when every walk is degenerate.
pub fn autocorrelation(l: &Landscape, w: &WalkConfig) -> Result<Option<f64>> {
    w.validate()?;
    if l.is_empty() || l.adjacency_count() == 0 {
        return Ok(None);
    }
    let per_walk: Vec<Option<f64>> = (0..w.n_walks)
        .into_par_iter()
        .map(|i| stats::autocorrelation(&random_walk(l, w, i), w.lag))
        .collect();
    let valid: Vec<f64> = per_walk.into_iter().flatten().collect();
    Ok(stats::mean(&valid).map(|x| x.clamp(-1.0, 1.0)))
}

/// Pearson correlation of losses across linked neighbor pairs (directed edges
/// and neutral pairs, each counted in both orientations).
pub fn loss_assortativity(l: &Landscape) -> Option<f64> {
    let pairs = l.edges().iter().chain(l.neutral_pairs());
    let mut xs = Vec::with_capacity(2 * l.adjacency_count());
    let mut ys = Vec::with_capacity(2 * l.adjacency_count());
    for &(u, v) in pairs {
        xs.push(l.loss(u));
        ys.push(l.loss(v));
        xs.push(l.loss(v));
        ys.push(l.loss(u));
    }
    stats::pearson(&xs, &ys)
}

pub fn is_neutral_move(a: f64, b: f64, epsilon: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(NEUTRALITY_FLOOR_SCALE);
    (a - b).abs() <= epsilon * scale
}

/// Share of present neighbors within the relative tolerance; `None` for an
/// isolated node.
pub fn neutrality_of(l: &Landscape, node: NodeId, epsilon: f64) -> Option<f64> {
    let nbs = l.neighbors_of(node);
    if nbs.is_empty() {
        return None;
    }
    let own = l.loss(node);
    let neutral = nbs
        .iter()
        .filter(|&&nb| is_neutral_move(own, l.loss(nb), epsilon))
        .count();
    Some(neutral as f64 / nbs.len() as f64)
}

pub fn mean_neutrality(l: &Landscape, epsilon: f64) -> Result<Option<f64>> {
    check_epsilon(epsilon)?;
    let vals: Vec<f64> = (0..l.len())
        .filter_map(|u| neutrality_of(l, u, epsilon))
        .collect();
    Ok(stats::mean(&vals))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NdcResult {
    /// Pearson of (improvement per local-search step, distance of the step's
    /// target to the nearest global optimum), pooled over every adaptive walk
    /// that ends at a global optimum. Positive when the terrain flattens
    /// towards the optimum.
    pub walk: Option<f64>,
    /// Pearson of (node neutrality, distance to the nearest global optimum).
    pub direct: Option<f64>,
}

struct GlobalSet {
    members: Vec<NodeId>,
    is_member: Vec<bool>,
}

impl GlobalSet {
    fn new(l: &Landscape) -> Option<Self> {
        let best = l.best_node()?;
        let c = l.cost(best);
        let members: Vec<NodeId> = (0..l.len()).filter(|&u| l.cost(u) == c).collect();
        let mut is_member = vec![false; l.len()];
        for &m in &members {
            is_member[m] = true;
        }
        Some(GlobalSet { members, is_member })
    }

    fn distance(&self, l: &Landscape, u: NodeId) -> u64 {
        if self.is_member[u] {
            return 0;
        }
        self.members
            .iter()
            .map(|&g| l.distance(u, g))
            .min()
            .unwrap_or(0)
    }
}

pub fn ndc(l: &Landscape, epsilon: f64) -> Result<NdcResult> {
    check_epsilon(epsilon)?;
    let Some(global) = GlobalSet::new(l) else {
        return Ok(NdcResult {
            walk: None,
            direct: None,
        });
    };

    let walk_pairs: Vec<Vec<(f64, f64)>> = (0..l.len())
        .into_par_iter()
        .map(|s| {
            let trace = local::local_search(l, s);
            if trace.steps == 0 || !global.is_member[trace.optimum] {
                return Vec::new();
            }
            trace
                .path
                .windows(2)
                .map(|p| {
                    let gain = (l.loss(p[1]) - l.loss(p[0])).abs();
                    (gain, global.distance(l, p[1]) as f64)
                })
                .collect()
        })
        .collect();
    let (gains, dists): (Vec<f64>, Vec<f64>) = walk_pairs.into_iter().flatten().unzip();
    let walk = if distinct_count(&dists) >= 3 {
        stats::pearson(&gains, &dists)
    } else {
        None
    };

    let direct_pairs: Vec<(f64, f64)> = (0..l.len())
        .into_par_iter()
        .filter_map(|u| neutrality_of(l, u, epsilon).map(|nu| (nu, global.distance(l, u) as f64)))
        .collect();
    let (nus, ds): (Vec<f64>, Vec<f64>) = direct_pairs.into_iter().unzip();
    let direct = if distinct_count(&ds) >= 3 {
        stats::pearson(&nus, &ds)
    } else {
        None
    };
    Ok(NdcResult { walk, direct })
}

fn distinct_count(xs: &[f64]) -> usize {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlaParameters {
    pub epsilon: f64,
    pub n_walks: usize,
    pub walk_length: usize,
    pub lag: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlaReport {
    pub n_nodes: usize,
    pub autocorrelation: Option<f64>,
    pub assortativity: Option<f64>,
    pub mean_neutrality: Option<f64>,
    pub ndc: Option<f64>,
    pub ndc_direct: Option<f64>,
    pub n_local_optima: usize,
    pub mean_basin_size: f64,
    pub unimodal: bool,
    pub parameters: FlaParameters,
}

impl FlaReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn fla_report(l: &Landscape, w: &WalkConfig, epsilon: f64) -> Result<FlaReport> {
    w.validate()?;
    check_epsilon(epsilon)?;
    if l.is_empty() {
        return Err(Error::EmptyLandscape);
    }
    let basins = find_local_optima(l);
    let bs = mean_basin_size(&basins);
    let ndc = ndc(l, epsilon)?;
    Ok(FlaReport {
        n_nodes: l.len(),
        autocorrelation: autocorrelation(l, w)?,
        assortativity: loss_assortativity(l),
        mean_neutrality: mean_neutrality(l, epsilon)?,
        ndc: ndc.walk,
        ndc_direct: ndc.direct,
        n_local_optima: basins.n_optima(),
        mean_basin_size: bs.mean_basin_size,
        unimodal: bs.unimodal,
        parameters: FlaParameters {
            epsilon,
            n_walks: w.n_walks,
            walk_length: w.walk_length,
            lag: w.lag,
            seed: w.seed,
        },
    })
}
