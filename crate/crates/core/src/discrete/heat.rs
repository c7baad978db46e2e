//! Dense spectral heat kernels of small graphs.

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::discrete::graph::{build_gasket_graph_with, GasketBoundary, Graph};
use crate::discrete::sparse::Laplacian;
use crate::{Error, Result};

/// Largest active dimension accepted for a dense decomposition.
pub const MAX_DENSE_VERTICES: usize = 5000;

/// Scaling-regime margins: the fit window must start after
/// `MICRO_MARGIN / laplacian_scale` and end before `MACRO_MARGIN / gap`.
const MICRO_MARGIN: f64 = 10.0;
const MACRO_MARGIN: f64 = 0.1;

/// `p(x, y, t) = Σ_k e^{−λ_k t} u_k(x) u_k(y) / m` with `u_k` orthonormal
/// eigenvectors of the active generator and `m` the vertex mass.
pub struct HeatKernel {
    n_vertices: usize,
    mass: f64,
    laplacian_scale: f64,
    position: Vec<Option<usize>>,
    eigenvalues: Vec<f64>,
    // row-major: vectors[i * dim + k] = u_k(active vertex i)
    vectors: Vec<f64>,
    column_sums: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayFit {
    /// `−d log p(x,x,t) / d log t` over the window.
    pub exponent: f64,
    pub r2: f64,
    pub window: (f64, f64),
    pub points: usize,
    pub vertex: usize,
    pub level: Option<u32>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct SpectralDecayScan {
    pub checked: usize,
    pub violations: usize,
    /// Largest observed `lhs / rhs`.
    pub worst_ratio: f64,
}

impl HeatKernel {
    pub fn new(graph: &Graph) -> Result<Self> {
        let lap = Laplacian::new(graph);
        let dim = lap.dim();
        if dim > MAX_DENSE_VERTICES {
            return Err(Error::TooLarge(format!(
                "dense heat kernel for {dim} vertices exceeds {MAX_DENSE_VERTICES}"
            )));
        }
        if dim == 0 {
            return Err(Error::Precondition("graph has no active vertices".into()));
        }
        let mut a = Mat::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for (j, v) in lap.matrix.row(i) {
                a[(i, j)] = v;
            }
        }
        let evd = a
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Singular(format!("dense eigendecomposition failed: {e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| s[k].max(0.0)).collect();
        let mut vectors = vec![0.0; dim * dim];
        let mut column_sums = vec![0.0; dim];
        for i in 0..dim {
            for (kk, &k) in order.iter().enumerate() {
                let v = u[(i, k)];
                vectors[i * dim + kk] = v;
                column_sums[kk] += v;
            }
        }
        Ok(Self {
            n_vertices: graph.n(),
            mass: graph.vertex_mass,
            laplacian_scale: graph.laplacian_scale,
            position: lap.position,
            eigenvalues,
            vectors,
            column_sums,
        })
    }

    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Smallest eigenvalue (zero up to round-off for Neumann graphs).
    pub fn bottom(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Smallest eigenvalue that is not a round-off zero.
    pub fn gap(&self) -> f64 {
        let top = *self.eigenvalues.last().expect("nonempty spectrum");
        self.eigenvalues
            .iter()
            .cloned()
            .find(|&l| l > 1e-9 * top)
            .unwrap_or(top)
    }

    fn active(&self, v: usize) -> Option<usize> {
        self.position.get(v).copied().flatten()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n_vertices {
            return Err(Error::Precondition(format!("vertex {v} out of range")));
        }
        Ok(())
    }

    /// Heat-kernel density with respect to the vertex measure; zero when
    /// either vertex is absorbing.
    pub fn p(&self, x: usize, y: usize, t: f64) -> Result<f64> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
        }
        let (Some(i), Some(j)) = (self.active(x), self.active(y)) else {
            return Ok(0.0);
        };
        let d = self.dim();
        let (ri, rj) = (&self.vectors[i * d..(i + 1) * d], &self.vectors[j * d..(j + 1) * d]);
        let s: f64 = self
            .eigenvalues
            .iter()
            .zip(ri.iter().zip(rj))
            .map(|(l, (a, b))| (-l * t).exp() * a * b)
            .sum();
        Ok(s / self.mass)
    }

    /// `P_x(τ > t) = Σ_y p(x, y, t) m(y)`.
    pub fn survival(&self, x: usize, t: f64) -> Result<f64> {
        self.check_vertex(x)?;
        let Some(i) = self.active(x) else { return Ok(0.0) };
        let d = self.dim();
        let r = &self.vectors[i * d..(i + 1) * d];
        Ok(self
            .eigenvalues
            .iter()
            .zip(r.iter().zip(&self.column_sums))
            .map(|(l, (a, c))| (-l * t).exp() * a * c)
            .sum())
    }

    /// Relative defect of `∫ p(x,z,s) p(z,y,t) dμ(z) = p(x,y,s+t)`.
    pub fn chapman_kolmogorov_defect(&self, x: usize, y: usize, s: f64, t: f64) -> Result<f64> {
        let mut acc = 0.0;
        for z in 0..self.n_vertices {
            if self.active(z).is_some() {
                acc += self.p(x, z, s)? * self.p(z, y, t)? * self.mass;
            }
        }
        let direct = self.p(x, y, s + t)?;
        Ok((acc - direct).abs() / direct.abs().max(f64::MIN_POSITIVE))
    }

    /// Scans `p(x,x,t) ≤ e^{−(1−ε)λ₁t} p(x,x,εt)` over all active
    /// vertices and the given grids. A violation must exceed relative
    /// round-off `1e-10`.
    pub fn spectral_decay_scan(&self, times: &[f64], eps: &[f64]) -> Result<SpectralDecayScan> {
        if eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::Domain("epsilon must lie in (0, 1)".into()));
        }
        let lambda = self.bottom();
        let mut out = SpectralDecayScan::default();
        for x in 0..self.n_vertices {
            if self.active(x).is_none() {
                continue;
            }
            for &t in times {
                let lhs = self.p(x, x, t)?;
                for &e in eps {
                    let rhs = (-(1.0 - e) * lambda * t).exp() * self.p(x, x, e * t)?;
                    out.checked += 1;
                    let ratio = lhs / rhs;
                    out.worst_ratio = out.worst_ratio.max(ratio);
                    if lhs > rhs * (1.0 + 1e-10) {
                        out.violations += 1;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Window in which `p(x,x,t)` is expected to follow a power law.
    pub fn scaling_regime(&self) -> (f64, f64) {
        (MICRO_MARGIN / self.laplacian_scale, MACRO_MARGIN / self.gap())
    }

    /// Least-squares slope of `log p(x,x,t)` against `log t` on `points`
    /// log-spaced times in `[t_lo, t_hi]`.
    pub fn ondiag_decay_fit(&self, x: usize, t_lo: f64, t_hi: f64, points: usize) -> Result<DecayFit> {
        let (lo, hi) = self.scaling_regime();
        if !(t_lo < t_hi) || t_lo < lo * (1.0 - 1e-12) || t_hi > hi * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "window [{t_lo:e}, {t_hi:e}] leaves the scaling regime [{lo:e}, {hi:e}]"
            )));
        }
        if points < 3 {
            return Err(Error::InsufficientSample("decay fit needs at least 3 times".into()));
        }
        let mut xs = Vec::with_capacity(points);
        let mut ys = Vec::with_capacity(points);
        for k in 0..points {
            let lt = t_lo.ln() + (t_hi / t_lo).ln() * k as f64 / (points - 1) as f64;
            let p = self.p(x, x, lt.exp())?;
            if !(p > 0.0) {
                return Err(Error::Precondition(format!("vertex {x} is absorbing")));
            }
            xs.push(lt);
            ys.push(p.ln());
        }
        let (slope, _, r2) = linear_fit(&xs, &ys);
        Ok(DecayFit {
            exponent: -slope,
            r2,
            window: (t_lo, t_hi),
            points,
            vertex: x,
            level: None,
        })
    }

    /// Exponential decay rate of `P_x(τ > t)` between two times.
    pub fn survival_decay_rate(&self, x: usize, t1: f64, t2: f64) -> Result<f64> {
        let s1 = self.survival(x, t1)?;
        let s2 = self.survival(x, t2)?;
        Ok(-(s2.ln() - s1.ln()) / (t2 - t1))
    }
}

/// Ordinary least squares `y ≈ a x + b`; returns `(a, b, r²)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Reference vertex for on-diagonal fits: the junction point at
/// `(1/4, √3/8)`, away from the outer triangle.
pub fn gasket_reference_vertex(g: &Graph) -> usize {
    g.nearest_vertex(&[0.25, 3f64.sqrt() / 8.0]).expect("gasket graph has vertices")
}

/// On-diagonal decay exponent of the whole-gasket Neumann heat kernel at
/// each level. Without an explicit window the common scaling regime of
/// all levels is used.
pub fn gasket_ondiag_decay(levels: &[u32], window: Option<(f64, f64)>) -> Result<Vec<DecayFit>> {
    if levels.is_empty() {
        return Err(Error::InsufficientSample("no gasket levels given".into()));
    }
    let kernels = levels
        .iter()
        .map(|&m| {
            let g = build_gasket_graph_with(m, GasketBoundary::None)?;
            let x = gasket_reference_vertex(&g);
            Ok((m, x, HeatKernel::new(&g)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = window.unwrap_or_else(|| {
        kernels.iter().fold((0.0, f64::INFINITY), |(lo, hi), (_, _, k)| {
            let (a, b) = k.scaling_regime();
            (f64::max(lo, a), f64::min(hi, b))
        })
    });
    kernels
        .iter()
        .map(|(m, x, k)| {
            let mut fit = k.ondiag_decay_fit(*x, lo, hi, 60)?;
            fit.level = Some(*m);
            Ok(fit)
        })
        .collect()
}
