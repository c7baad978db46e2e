//! Compressed sparse rows for graph Laplacians and a conjugate-gradient
//! solver.

use crate::discrete::graph::{BoundaryCondition, Graph};
use crate::{Error, Result};

/// Symmetric CSR matrix stored as `scale · C` with `C` holding the raw
/// conductances, so that integer stencils stay exact.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    scale: f64,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_start[i]..self.row_start[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = self.scale * acc;
        }
    }

    /// Gershgorin bound on the spectral radius (max absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.vals[self.row_start[i]..self.row_start[i + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
                    * self.scale
            })
            .fold(0.0, f64::max)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_start[i]..self.row_start[i + 1]).map(move |k| (self.cols[k], self.scale * self.vals[k]))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

/// Generator restricted to the active vertices of a graph: interior
/// vertices for Dirichlet graphs, all vertices for Neumann graphs.
#[derive(Clone, Debug)]
pub struct Laplacian {
    pub matrix: CsrMatrix,
    /// active index → graph vertex
    pub active: Vec<usize>,
    /// graph vertex → active index
    pub position: Vec<Option<usize>>,
    pub bc: BoundaryCondition,
}

impl Laplacian {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.n();
        let mut position = vec![None; n];
        let mut active = Vec::new();
        for v in 0..n {
            if !graph.is_boundary(v) {
                position[v] = Some(active.len());
                active.push(v);
            }
        }
        let scale = graph.laplacian_scale;
        let mut row_start = Vec::with_capacity(active.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for (i, &v) in active.iter().enumerate() {
            let mut diag = 0.0;
            let mut entries: Vec<(usize, f64)> = Vec::with_capacity(graph.degree(v) + 1);
            for &(w, c) in graph.neighbors(v) {
                diag += c;
                if let Some(j) = position[w] {
                    entries.push((j, -c));
                }
            }
            entries.push((i, diag));
            entries.sort_by_key(|e| e.0);
            for (j, val) in entries {
                cols.push(j);
                vals.push(val);
            }
            row_start.push(cols.len());
        }
        Laplacian {
            matrix: CsrMatrix {
                n: active.len(),
                scale,
                row_start,
                cols,
                vals,
            },
            active,
            position,
            bc: graph.bc,
        }
    }

    pub fn dim(&self) -> usize {
        self.active.len()
    }

    /// Expands an active-index vector to all graph vertices (zero on the
    /// boundary).
    pub fn scatter(&self, x: &[f64], n_vertices: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_vertices];
        for (i, &v) in self.active.iter().enumerate() {
            out[v] = x[i];
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CgOutcome {
    pub iterations: usize,
    /// Normwise backward error `‖b − A x‖ / (‖A‖ ‖x‖ + ‖b‖)` at exit, with
    /// `‖A‖` the Gershgorin bound.
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// Minimum number of iterations between residual refreshes; the interval
/// grows with the system size so a refresh never cuts a Krylov sweep short.
const REFRESH: usize = 500;

/// Conjugate gradients for a symmetric positive (semi-)definite system,
/// starting from the contents of `x`. Stops once the normwise backward
/// error drops below `rel_tol`; every `max(REFRESH, 2n)` iterations the
/// residual is recomputed and the search direction restarted. With `deflate_constants`
/// the iteration runs in the mean-zero subspace, which makes the singular
/// Neumann Laplacian solvable for mean-zero right-hand sides.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
    deflate_constants: bool,
) -> Result<CgOutcome> {
    let n = a.n();
    let mut rhs = b.to_vec();
    if deflate_constants {
        remove_mean(&mut rhs);
        remove_mean(x);
    }
    let b_norm = dot(&rhs, &rhs).sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgOutcome {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let refresh = REFRESH.max(2 * n);
    let a_norm = a.norm_bound();
    let scale_of = |x: &[f64]| a_norm * dot(x, x).sqrt() + b_norm;
    let mut ax = vec![0.0; n];
    let true_residual = |x: &[f64], ax: &mut [f64], r: &mut Vec<f64>| {
        a.mul_vec(x, ax);
        for i in 0..n {
            r[i] = rhs[i] - ax[i];
        }
        if deflate_constants {
            remove_mean(r);
        }
    };
    let mut r = vec![0.0; n];
    true_residual(x, &mut ax, &mut r);
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut it = 0;
    let mut best_refresh = f64::INFINITY;
    let mut stalled = 0;
    loop {
        if rr.sqrt() <= rel_tol * scale_of(x) {
            // confirm against the true residual before accepting
            true_residual(x, &mut ax, &mut r);
            rr = dot(&r, &r);
            let backward = rr.sqrt() / scale_of(x);
            if backward <= rel_tol {
                if deflate_constants {
                    remove_mean(x);
                }
                return Ok(CgOutcome {
                    iterations: it,
                    relative_residual: backward,
                });
            }
            p.copy_from_slice(&r);
        }
        if it >= max_iter || stalled >= 4 {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: rr.sqrt() / scale_of(x),
            });
        }
        a.mul_vec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Singular(format!(
                "conjugate gradients met non-positive curvature {pap:e}"
            )));
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if deflate_constants {
            remove_mean(&mut r);
        }
        it += 1;
        if it % refresh == 0 {
            true_residual(x, &mut ax, &mut r);
            rr = dot(&r, &r);
            p.copy_from_slice(&r);
            let backward = rr.sqrt() / scale_of(x);
            if backward < 0.5 * best_refresh {
                best_refresh = backward;
                stalled = 0;
            } else {
                stalled += 1;
            }
            continue;
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
}
