//! Rank-based comparison of two landscapes over their shared configurations.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::landscape::{Landscape, NodeId};
use crate::stats;

pub const DEFAULT_GAMMA: f64 = 0.10;

/// Node pairs `(in l1, in l2)` for configurations present in both, in the
/// canonical order of `l1`.
pub fn shared_nodes(l1: &Landscape, l2: &Landscape) -> Vec<(NodeId, NodeId)> {
    if l1.space() == l2.space() {
        return (0..l1.len())
            .filter_map(|a| l2.node_of(l1.config(a)).map(|b| (a, b)))
            .collect();
    }
    let key = |l: &Landscape, id: NodeId| {
        let mut k: Vec<(String, String)> = l
            .space()
            .hps()
            .iter()
            .map(|h| h.name.clone())
            .zip(l.space().labels(l.config(id)))
            .collect();
        k.sort();
        k
    };
    let right: HashMap<Vec<(String, String)>, NodeId> =
        (0..l2.len()).map(|b| (key(l2, b), b)).collect();
    (0..l1.len())
        .filter_map(|a| right.get(&key(l1, a)).map(|&b| (a, b)))
        .collect()
}

fn shared_ranks(l1: &Landscape, l2: &Landscape, shared: &[(NodeId, NodeId)]) -> (Vec<f64>, Vec<f64>) {
    let c1: Vec<f64> = shared.iter().map(|&(a, _)| l1.cost(a)).collect();
    let c2: Vec<f64> = shared.iter().map(|&(_, b)| l2.cost(b)).collect();
    (stats::fractional_ranks(&c1), stats::fractional_ranks(&c2))
}

/// Pearson correlation of fractional ranks; `None` with fewer than three
/// shared configurations or a constant ranking.
pub fn spearman(l1: &Landscape, l2: &Landscape) -> Option<f64> {
    let shared = shared_nodes(l1, l2);
    spearman_on(l1, l2, &shared)
}

fn spearman_on(l1: &Landscape, l2: &Landscape, shared: &[(NodeId, NodeId)]) -> Option<f64> {
    if shared.len() < 3 {
        return None;
    }
    let (r1, r2) = shared_ranks(l1, l2, shared);
    stats::pearson(&r1, &r2)
}

/// Mean absolute rank displacement divided by the number of configurations.
pub fn shakeup(l1: &Landscape, l2: &Landscape) -> Option<f64> {
    let shared = shared_nodes(l1, l2);
    shakeup_on(l1, l2, &shared)
}

fn shakeup_on(l1: &Landscape, l2: &Landscape, shared: &[(NodeId, NodeId)]) -> Option<f64> {
    if shared.is_empty() {
        return None;
    }
    let n = shared.len() as f64;
    let (r1, r2) = shared_ranks(l1, l2, shared);
    let total: f64 = r1.iter().zip(&r2).map(|(a, b)| (a - b).abs()).sum();
    Some(total / n / n)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )))
    }
}

/// Size of a top-γ set over `n` configurations: `max(1, floor(γ·n))`.
pub fn top_count(gamma: f64, n: usize) -> usize {
    let raw = gamma * n as f64;
    // absorb representation error such as 0.29 * 100 = 28.999999999999996
    let t = (raw + raw.abs() * 1e-12).floor() as usize;
    t.clamp(1, n.max(1))
}

/// Intersection over union of the two top-γ sets.
pub fn gamma_set(l1: &Landscape, l2: &Landscape, gamma: f64) -> Result<Option<f64>> {
    check_gamma(gamma)?;
    let shared = shared_nodes(l1, l2);
    Ok(gamma_set_on(l1, l2, &shared, gamma))
}

fn gamma_set_on(
    l1: &Landscape,
    l2: &Landscape,
    shared: &[(NodeId, NodeId)],
    gamma: f64,
) -> Option<f64> {
    if shared.is_empty() {
        return None;
    }
    let t = top_count(gamma, shared.len());
    // positions in `shared` follow canonical order, which breaks cut ties
    let top = |cost: &dyn Fn(usize) -> f64| {
        let mut pos: Vec<usize> = (0..shared.len()).collect();
        pos.sort_by(|&a, &b| cost(a).total_cmp(&cost(b)).then(a.cmp(&b)));
        let mut t_set = pos[..t].to_vec();
        t_set.sort_unstable();
        t_set
    };
    let t1 = top(&|p| l1.cost(shared[p].0));
    let t2 = top(&|p| l2.cost(shared[p].1));
    let inter = t1.iter().filter(|p| t2.binary_search(p).is_ok()).count();
    let union = t1.len() + t2.len() - inter;
    Some(inter as f64 / union as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub spearman: Option<f64>,
    pub shakeup: Option<f64>,
    pub gamma_set: Option<f64>,
    pub gamma: f64,
    pub n_compared: usize,
    pub n_left: usize,
    pub n_right: usize,
    pub warnings: Vec<String>,
}

impl SimilarityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn compare_report(l1: &Landscape, l2: &Landscape, gamma: f64) -> Result<SimilarityReport> {
    check_gamma(gamma)?;
    let shared = shared_nodes(l1, l2);
    if shared.is_empty() {
        return Err(Error::InvalidParameter(
            "the two landscapes share no configuration".into(),
        ));
    }
    let mut warnings = Vec::new();
    if shared.len() < l1.len() || shared.len() < l2.len() {
        warnings.push(format!(
            "comparing {} shared configurations out of {} and {}",
            shared.len(),
            l1.len(),
            l2.len()
        ));
    }
    Ok(SimilarityReport {
        spearman: spearman_on(l1, l2, &shared),
        shakeup: shakeup_on(l1, l2, &shared),
        gamma_set: gamma_set_on(l1, l2, &shared, gamma),
        gamma,
        n_compared: shared.len(),
        n_left: l1.len(),
        n_right: l2.len(),
        warnings,
    })
}

/// Long-format CSV `landscape_a,landscape_b,metric,value` over all unordered
/// pairs; undefined values are left empty.
pub fn pairwise_long_csv(named: &[(String, Landscape)], gamma: f64) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Csv(e.to_string());
    wtr.write_record(["landscape_a", "landscape_b", "metric", "value"])
        .map_err(csv_err)?;
    for (i, (na, la)) in named.iter().enumerate() {
        for (nb, lb) in &named[i + 1..] {
            let r = compare_report(la, lb, gamma)?;
            for (metric, v) in [
                ("spearman", r.spearman),
                ("shakeup", r.shakeup),
                ("gamma_set", r.gamma_set),
            ] {
                let value = v.map(|x| format!("{x}")).unwrap_or_default();
                wtr.write_record([na.as_str(), nb.as_str(), metric, value.as_str()])
                    .map_err(csv_err)?;
            }
        }
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
