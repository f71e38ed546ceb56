//! Seedable ground-truth landscapes: Kauffman NK models and grid-sampled test
//! functions.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{Direction, Landscape, Scenario};
use crate::space::{HyperparameterDecl, SearchSpace};

/// Largest supported NK size; the landscape enumerates all 2^n bit strings.
pub const MAX_NK_LOCI: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NeighborModel {
    /// Locus `i` interacts with loci `i+1 .. i+k` (cyclic).
    #[default]
    Adjacent,
    /// Locus `i` interacts with `k` distinct other loci drawn from the seed.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NkSpec {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub neighbor_model: NeighborModel,
}

impl NkSpec {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        NkSpec {
            n,
            k,
            seed,
            neighbor_model: NeighborModel::Adjacent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_NK_LOCI {
            return Err(Error::InvalidParameter(format!(
                "NK n must lie in 1..={MAX_NK_LOCI}, got {}",
                self.n
            )));
        }
        if self.k >= self.n {
            return Err(Error::InvalidParameter(format!(
                "NK k must lie in 0..={} for n={}, got {}",
                self.n - 1,
                self.n,
                self.k
            )));
        }
        Ok(())
    }
}

/// Interaction structure and contribution tables of one NK instance.
#[derive(Debug, Clone)]
pub struct NkModel {
    n: usize,
    interactions: Vec<Vec<usize>>,
    tables: Vec<Vec<f64>>,
}

impl NkModel {
    pub fn new(spec: &NkSpec) -> Result<Self> {
        spec.validate()?;
        let NkSpec { n, k, .. } = *spec;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let interactions: Vec<Vec<usize>> = (0..n)
            .map(|i| match spec.neighbor_model {
                NeighborModel::Adjacent => (1..=k).map(|j| (i + j) % n).collect(),
                NeighborModel::Random => {
                    let mut picked: Vec<usize> = index::sample(&mut rng, n - 1, k)
                        .into_iter()
                        .map(|j| if j >= i { j + 1 } else { j })
                        .collect();
                    picked.sort_unstable();
                    picked
                }
            })
            .collect();
        let tables = (0..n)
            .map(|_| (0..1usize << (k + 1)).map(|_| rng.random::<f64>()).collect())
            .collect();
        Ok(NkModel {
            n,
            interactions,
            tables,
        })
    }

    pub fn interactions(&self, locus: usize) -> &[usize] {
        &self.interactions[locus]
    }

    /// Mean per-locus contribution; `bits` holds one 0/1 entry per locus.
    pub fn fitness(&self, bits: &[u32]) -> f64 {
        assert_eq!(bits.len(), self.n);
        let total: f64 = (0..self.n)
            .map(|i| {
                let mut idx = bits[i] as usize;
                for &j in &self.interactions[i] {
                    idx = (idx << 1) | bits[j] as usize;
                }
                self.tables[i][idx]
            })
            .sum();
        total / self.n as f64
    }
}

fn nk_space(n: usize) -> Result<SearchSpace> {
    SearchSpace::new(
        (0..n)
            .map(|i| HyperparameterDecl::categorical(&format!("x{i}"), ["0", "1"]))
            .collect(),
    )
}

/// Full NK landscape over binary categorical loci; loss = −fitness, minimized.
pub fn gen_nk(spec: &NkSpec) -> Result<Landscape> {
    let model = NkModel::new(spec)?;
    let space = nk_space(spec.n)?;
    let losses: Vec<f64> = space.iter_all().map(|c| -model.fitness(c.indices())).collect();
    Landscape::from_full_grid(space, Scenario::new("loss", Direction::Minimize), losses)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridFunction {
    /// Sum of squares.
    Sphere,
    /// `10·d + Σ (x² − 10·cos 2πx)`.
    Rastrigin,
}

impl std::str::FromStr for GridFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(GridFunction::Sphere),
            "rastrigin" => Ok(GridFunction::Rastrigin),
            other => Err(Error::InvalidParameter(format!(
                "unknown grid function `{other}`"
            ))),
        }
    }
}

impl GridFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            GridFunction::Sphere => x.iter().map(|v| v * v).sum(),
            GridFunction::Rastrigin => {
                10.0 * x.len() as f64
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                        .sum::<f64>()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.min + span * i as f64 / last)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunctionSpec {
    pub function: GridFunction,
    pub axes: Vec<GridAxis>,
    /// When set, the function is evaluated at `x - shift` with a per-axis
    /// shift drawn uniformly from ±10% of the axis span.
    pub shift_seed: Option<u64>,
}

impl GridFunctionSpec {
    pub fn square(function: GridFunction, dims: usize, min: f64, max: f64, points: usize) -> Self {
        GridFunctionSpec {
            function,
            axes: vec![GridAxis { min, max, points }; dims],
            shift_seed: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::InvalidParameter("grid function needs at least one axis".into()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            let ok = a.points >= 1
                && a.min.is_finite()
                && a.max.is_finite()
                && (a.points == 1 || a.min < a.max);
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "axis {i}: need points >= 1 and min < max"
                )));
            }
        }
        Ok(())
    }

    pub fn shifts(&self) -> Vec<f64> {
        match self.shift_seed {
            None => vec![0.0; self.axes.len()],
            Some(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                self.axes
                    .iter()
                    .map(|a| (rng.random::<f64>() * 2.0 - 1.0) * 0.1 * (a.max - a.min))
                    .collect()
            }
        }
    }
}

pub fn gen_grid_function(spec: &GridFunctionSpec) -> Result<Landscape> {
    spec.validate()?;
    let grids: Vec<Vec<f64>> = spec.axes.iter().map(GridAxis::values).collect();
    let space = SearchSpace::new(
        grids
            .iter()
            .enumerate()
            .map(|(i, g)| HyperparameterDecl::numerical(&format!("x{i}"), g.iter().copied()))
            .collect(),
    )?;
    let shifts = spec.shifts();
    let losses: Vec<f64> = space
        .iter_all()
        .map(|c| {
            let x: Vec<f64> = c
                .indices()
                .iter()
                .zip(&grids)
                .zip(&shifts)
                .map(|((&i, g), s)| g[i as usize] - s)
                .collect();
            spec.function.eval(&x)
        })
        .collect();
    Landscape::from_full_grid(space, Scenario::new("loss", Direction::Minimize), losses)
}
