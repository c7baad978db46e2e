//! Path-level Monte Carlo and batch exit-time collection.
//!
//! Path `i` of a batch draws from its own ChaCha8 stream, selected by
//! `(seed, i)`, so batches do not depend on how paths are scheduled.

mod io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrete::graph::{build_gasket_domain, Graph};
use crate::space::{heisenberg_relative, koranyi_gauge, DomainSpec, SpaceKind, SpaceSpec};
use crate::{Error, Result};

pub use io::{read_batch, read_batch_csv, write_batch, write_batch_csv, BATCH_FORMAT_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Time step `h`.
    pub step_size: f64,
    /// Censoring horizon.
    pub t_max: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Brownian-bridge crossing test between steps (Euclidean only).
    #[serde(default = "default_true")]
    pub bridge_correction: bool,
    /// Sub-intervals per step for the Lévy area.
    #[serde(default = "default_substeps")]
    pub substeps: usize,
}

fn default_true() -> bool {
    true
}

fn default_substeps() -> usize {
    1
}

impl SimConfig {
    pub fn new(step_size: f64, t_max: f64, n_paths: usize, seed: u64) -> Self {
        Self {
            step_size,
            t_max,
            n_paths,
            seed,
            bridge_correction: true,
            substeps: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::Precondition(format!("step_size must be positive, got {}", self.step_size)));
        }
        if !(self.t_max > self.step_size && self.t_max.is_finite()) {
            return Err(Error::Precondition(format!(
                "t_max must exceed step_size, got t_max = {}",
                self.t_max
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::Precondition("n_paths must be at least 1".into()));
        }
        if self.substeps == 0 {
            return Err(Error::Precondition("substeps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitRecord {
    pub path_index: u64,
    pub tau: f64,
    /// `false` when the path was censored at `t_max`.
    pub exited: bool,
    pub exit_point: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitBatch {
    pub records: Vec<ExitRecord>,
    pub config: SimConfig,
    pub space: SpaceSpec,
    pub domain: DomainSpec,
    pub start: Vec<f64>,
}

impl ExitBatch {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn censored_fraction(&self) -> f64 {
        let c = self.records.iter().filter(|r| !r.exited).count();
        c as f64 / self.records.len().max(1) as f64
    }

    pub fn mean_tau(&self) -> f64 {
        self.records.iter().map(|r| r.tau).sum::<f64>() / self.records.len().max(1) as f64
    }

    pub fn taus(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.tau).collect()
    }
}

/// Independent stream for path `index` under `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Adds independent `N(0, σ²h)` increments to every coordinate.
pub fn step_euclidean(state: &mut [f64], h: f64, sigma2: f64, rng: &mut impl Rng) {
    let s = (sigma2 * h).sqrt();
    for x in state.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *x += s * z;
    }
}

/// Horizontal Brownian motion on `H^{2n+1}`: `(U, V)` move by exact
/// Gaussian increments over `substeps` sub-intervals and the area
/// coordinate accumulates the left-point sums `U·ΔV − V·ΔU`.
pub fn step_heisenberg(state: &mut [f64], h: f64, sigma2: f64, substeps: usize, rng: &mut impl Rng) {
    let k = state.len() - 1;
    let n = k / 2;
    let s = (sigma2 * h / substeps as f64).sqrt();
    for _ in 0..substeps {
        let mut area = 0.0;
        for i in 0..n {
            let du: f64 = s * rng.sample::<f64, _>(StandardNormal);
            let dv: f64 = s * rng.sample::<f64, _>(StandardNormal);
            area += state[i] * dv - state[n + i] * du;
            state[i] += du;
            state[n + i] += dv;
        }
        state[k] += area;
    }
}

/// Lévy areas `A_t` of `n_paths` independent planar Brownian motions
/// started at the origin, each discretised into `substeps` pieces.
pub fn levy_area_samples(n_paths: usize, t: f64, sigma2: f64, substeps: usize, seed: u64) -> Result<Vec<f64>> {
    if !(t > 0.0 && t.is_finite()) || !(sigma2 > 0.0) || substeps == 0 || n_paths == 0 {
        return Err(Error::Precondition(format!(
            "levy area needs t > 0, sigma2 > 0, substeps >= 1, n_paths >= 1; got t = {t}, sigma2 = {sigma2}, substeps = {substeps}, n_paths = {n_paths}"
        )));
    }
    Ok((0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut x = [0.0; 3];
            step_heisenberg(&mut x, t, sigma2, substeps, &mut rng);
            x[2]
        })
        .collect())
}

/// One step of the simple random walk from an interior vertex.
pub fn step_gasket(graph: &Graph, vertex: usize, rng: &mut impl Rng) -> Result<usize> {
    if graph.is_boundary(vertex) {
        return Err(Error::Contract(format!(
            "random walk stepped from absorbing vertex {vertex}"
        )));
    }
    let nbrs = graph.neighbors(vertex);
    Ok(nbrs[rng.random_range(0..nbrs.len())].0)
}

/// A simulation set up once per batch.
pub struct Simulator {
    space: SpaceSpec,
    domain: DomainSpec,
    start: Vec<f64>,
    config: SimConfig,
    kind: Kind,
}

enum Kind {
    Euclidean,
    Heisenberg { center: Vec<f64>, radius: f64 },
    Gasket { graph: Graph, start: usize, dt: f64 },
}

impl Simulator {
    pub fn new(space: &SpaceSpec, domain: &DomainSpec, start: &[f64], config: &SimConfig) -> Result<Self> {
        space.validate()?;
        domain.validate(space)?;
        config.validate()?;
        let kind = match (&space.kind, domain) {
            (SpaceKind::Euclidean { d }, _) => {
                if start.len() != *d {
                    return Err(Error::Precondition(format!("start must have {d} coordinates")));
                }
                if !domain.contains(start) {
                    return Err(Error::Precondition(format!("start {start:?} is not inside {}", domain.label())));
                }
                Kind::Euclidean
            }
            (SpaceKind::Heisenberg { .. }, DomainSpec::KoranyiBall { center, radius }) => {
                if start.len() != space.coordinate_dim() || !domain.contains(start) {
                    return Err(Error::Precondition(format!("start {start:?} is not inside {}", domain.label())));
                }
                Kind::Heisenberg {
                    center: center.clone(),
                    radius: *radius,
                }
            }
            (SpaceKind::Gasket { m }, DomainSpec::GasketSubset { region }) => {
                let (graph, reference) = build_gasket_domain(*m, region)?;
                let v = if start.is_empty() {
                    reference
                } else if start.len() == 2 {
                    graph.nearest_vertex(start).expect("gasket graph has vertices")
                } else {
                    return Err(Error::Precondition("gasket start must be a planar point".into()));
                };
                if graph.is_boundary(v) {
                    return Err(Error::Precondition(format!(
                        "start {start:?} snaps to absorbing vertex {v}"
                    )));
                }
                Kind::Gasket {
                    graph,
                    start: v,
                    dt: 5f64.powi(-(*m as i32)),
                }
            }
            _ => {
                return Err(Error::Precondition(format!(
                    "no sampler for {} on {}",
                    domain.label(),
                    space.label()
                )))
            }
        };
        Ok(Self {
            space: space.clone(),
            domain: domain.clone(),
            start: start.to_vec(),
            config: config.clone(),
            kind,
        })
    }

    /// The vertex a gasket walk starts from.
    pub fn gasket_start(&self) -> Option<usize> {
        match &self.kind {
            Kind::Gasket { start, .. } => Some(*start),
            _ => None,
        }
    }

    pub fn run_path(&self, index: u64) -> Result<ExitRecord> {
        let mut rng = path_rng(self.config.seed, index);
        match &self.kind {
            Kind::Euclidean => Ok(self.run_euclidean(index, &mut rng)),
            Kind::Heisenberg { center, radius } => Ok(self.run_heisenberg(index, center, *radius, &mut rng)),
            Kind::Gasket { graph, start, dt } => self.run_gasket(index, graph, *start, *dt, &mut rng),
        }
    }

    fn steps(&self) -> u64 {
        (self.config.t_max / self.config.step_size * (1.0 + 1e-12)).floor() as u64
    }

    fn censored(&self, index: u64, point: Vec<f64>) -> ExitRecord {
        ExitRecord {
            path_index: index,
            tau: self.config.t_max,
            exited: false,
            exit_point: point,
        }
    }

    fn run_euclidean(&self, index: u64, rng: &mut ChaCha8Rng) -> ExitRecord {
        let h = self.config.step_size;
        let sigma2 = self.space.generator_scale;
        let bridge = self.config.bridge_correction;
        let mut x = self.start.clone();
        let mut d1 = self.domain.boundary_distance(&x).unwrap_or(f64::INFINITY);
        for k in 1..=self.steps() {
            step_euclidean(&mut x, h, sigma2, rng);
            let t = k as f64 * h;
            if !self.domain.contains(&x) {
                return ExitRecord {
                    path_index: index,
                    tau: t,
                    exited: true,
                    exit_point: x,
                };
            }
            let d2 = self.domain.boundary_distance(&x).unwrap_or(f64::INFINITY);
            if bridge {
                let expo = 2.0 * d1 * d2 / (sigma2 * h);
                // beyond this the crossing probability is below 1e-21
                if expo < 48.0 && rng.random::<f64>() < (-expo).exp() {
                    return ExitRecord {
                        path_index: index,
                        tau: t,
                        exited: true,
                        exit_point: x,
                    };
                }
            }
            d1 = d2;
        }
        self.censored(index, x)
    }

    fn run_heisenberg(&self, index: u64, center: &[f64], radius: f64, rng: &mut ChaCha8Rng) -> ExitRecord {
        let h = self.config.step_size;
        let sigma2 = self.space.generator_scale;
        let mut x = self.start.clone();
        let mut rel = vec![0.0; x.len()];
        for k in 1..=self.steps() {
            step_heisenberg(&mut x, h, sigma2, self.config.substeps, rng);
            heisenberg_relative(center, &x, &mut rel);
            if koranyi_gauge(&rel) >= radius {
                return ExitRecord {
                    path_index: index,
                    tau: k as f64 * h,
                    exited: true,
                    exit_point: x,
                };
            }
        }
        self.censored(index, x)
    }

    /// The walk clock is `5^{-m}` per step; `step_size` is not used.
    fn run_gasket(&self, index: u64, graph: &Graph, start: usize, dt: f64, rng: &mut ChaCha8Rng) -> Result<ExitRecord> {
        let max_steps = (self.config.t_max / dt * (1.0 + 1e-12)).floor() as u64;
        let mut v = start;
        for k in 1..=max_steps {
            v = step_gasket(graph, v, rng)?;
            if graph.is_boundary(v) {
                return Ok(ExitRecord {
                    path_index: index,
                    tau: k as f64 * dt,
                    exited: true,
                    exit_point: graph.position(v).to_vec(),
                });
            }
        }
        Ok(self.censored(index, graph.position(v).to_vec()))
    }

    pub fn run_batch(&self) -> Result<ExitBatch> {
        let records = (0..self.config.n_paths as u64)
            .into_par_iter()
            .map(|i| self.run_path(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExitBatch {
            records,
            config: self.config.clone(),
            space: self.space.clone(),
            domain: self.domain.clone(),
            start: self.start.clone(),
        })
    }
}

/// First exit of path `path_index` from `domain`.
pub fn run_exit(
    space: &SpaceSpec,
    domain: &DomainSpec,
    start: &[f64],
    config: &SimConfig,
    path_index: u64,
) -> Result<ExitRecord> {
    Simulator::new(space, domain, start, config)?.run_path(path_index)
}

/// `n_paths` independent exits, in path order.
pub fn run_batch(space: &SpaceSpec, domain: &DomainSpec, start: &[f64], config: &SimConfig) -> Result<ExitBatch> {
    Simulator::new(space, domain, start, config)?.run_batch()
}
