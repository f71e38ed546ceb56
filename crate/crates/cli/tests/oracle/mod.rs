//! Brute-force reference for the local-structure analysis. Everything is
//! recomputed from raw configurations and losses: distance-1 and distance-2
//! sets come from a full pairwise scan, and every descent is walked step by
//! step.

use std::collections::BTreeMap;

use hplscape::{Direction, HpKind, Landscape};

pub struct Oracle {
    configs: Vec<Vec<u32>>,
    kinds: Vec<HpKind>,
    cost: Vec<f64>,
    ring1: Vec<Vec<usize>>,
    ring2: Vec<Vec<usize>>,
}

pub struct Reference {
    pub edges: Vec<(usize, usize)>,
    pub neutral: Vec<(usize, usize)>,
    pub optima: Vec<usize>,
    pub optimum_of: Vec<usize>,
    pub steps: Vec<usize>,
    pub global: usize,
    /// (src, dst, weight)
    pub lon_edges: Vec<(usize, usize, u64)>,
    pub n2_counts: Vec<usize>,
    /// (optimum, pairs, escaped, improved) for non-global optima
    pub escape: Vec<(usize, u64, u64, u64)>,
}

impl Oracle {
    pub fn new(l: &Landscape) -> Self {
        let configs: Vec<Vec<u32>> = l.configs().iter().map(|c| c.indices().to_vec()).collect();
        assert!(configs.windows(2).all(|w| w[0] < w[1]), "node order is not lexicographic");
        let sign = match l.scenario().direction {
            Direction::Minimize => 1.0,
            Direction::Maximize => -1.0,
        };
        let mut o = Oracle {
            configs,
            kinds: l.space().hps().iter().map(|h| h.kind).collect(),
            cost: l.losses().iter().map(|x| sign * x).collect(),
            ring1: Vec::new(),
            ring2: Vec::new(),
        };
        let n = o.configs.len();
        let (mut ring1, mut ring2) = (vec![Vec::new(); n], vec![Vec::new(); n]);
        for u in 0..n {
            for v in 0..n {
                match o.dist(u, v) {
                    1 => ring1[u].push(v),
                    2 => ring2[u].push(v),
                    _ => {}
                }
            }
        }
        o.ring1 = ring1;
        o.ring2 = ring2;
        o
    }

    fn dist(&self, a: usize, b: usize) -> u64 {
        let (x, y) = (&self.configs[a], &self.configs[b]);
        (0..x.len())
            .map(|i| match self.kinds[i] {
                HpKind::Categorical => u64::from(x[i] != y[i]),
                HpKind::Numerical => u64::from(x[i].abs_diff(y[i])),
            })
            .sum()
    }

    fn descend(&self, mut u: usize) -> (usize, usize) {
        let mut steps = 0;
        loop {
            let mut best: Option<usize> = None;
            for &v in &self.ring1[u] {
                if self.cost[v] < self.cost[u] && best.is_none_or(|b| self.cost[v] < self.cost[b]) {
                    best = Some(v);
                }
            }
            match best {
                Some(v) => {
                    u = v;
                    steps += 1;
                }
                None => return (u, steps),
            }
        }
    }

    pub fn reference(&self) -> Reference {
        let n = self.configs.len();
        let (mut edges, mut neutral) = (Vec::new(), Vec::new());
        for u in 0..n {
            for v in u + 1..n {
                if self.dist(u, v) != 1 {
                    continue;
                }
                if self.cost[u] == self.cost[v] {
                    neutral.push((u, v));
                } else if self.cost[v] < self.cost[u] {
                    edges.push((u, v));
                } else {
                    edges.push((v, u));
                }
            }
        }
        edges.sort_unstable();

        let (optimum_of, steps): (Vec<usize>, Vec<usize>) = (0..n).map(|u| self.descend(u)).unzip();
        let end = |p: usize| optimum_of[p];
        let optima: Vec<usize> = (0..n)
            .filter(|&u| self.ring1[u].iter().all(|&v| self.cost[v] >= self.cost[u]))
            .collect();
        let mut global = optima[0];
        for &o in &optima {
            if self.cost[o] < self.cost[global] {
                global = o;
            }
        }

        let mut lon_edges = Vec::new();
        let mut n2_counts = Vec::new();
        for &o in &optima {
            n2_counts.push(self.ring2[o].len());
            let mut w: BTreeMap<usize, u64> = BTreeMap::new();
            for &p in &self.ring2[o] {
                let t = end(p);
                if self.cost[t] < self.cost[o] {
                    *w.entry(t).or_default() += 1;
                }
            }
            lon_edges.extend(w.into_iter().map(|(t, c)| (o, t, c)));
        }

        let mut escape = Vec::new();
        for &o in optima.iter().filter(|&&o| o != global) {
            let (mut pairs, mut escaped, mut improved) = (0, 0, 0);
            for m in (0..n).filter(|&m| optimum_of[m] == o) {
                for &p in &self.ring2[m] {
                    let t = end(p);
                    pairs += 1;
                    escaped += u64::from(t != o);
                    improved += u64::from(self.cost[t] < self.cost[o]);
                }
            }
            escape.push((o, pairs, escaped, improved));
        }

        Reference {
            edges,
            neutral,
            optima,
            optimum_of,
            steps,
            global,
            lon_edges,
            n2_counts,
            escape,
        }
    }
}
