//! Extreme eigenpairs by inverse power iteration with CG inner solves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discrete::graph::{BoundaryCondition, Graph};
use crate::discrete::sparse::{conjugate_gradient, Laplacian};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Target for `‖Lv − λv‖ / (‖L‖ ‖v‖)` with `‖L‖` the Gershgorin bound.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub inner_tolerance: f64,
    pub inner_max_iterations: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10_000,
            inner_tolerance: 1e-12,
            inner_max_iterations: 200_000,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenResult {
    pub eigenvalue: f64,
    /// One value per graph vertex, zero on the boundary, unit max-norm.
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl EigenResult {
    /// Writes `vertex,value` rows.
    pub fn write_csv(&self, mut out: impl std::io::Write) -> Result<()> {
        writeln!(out, "# exitlab-eigenvector v1")?;
        writeln!(out, "vertex,value")?;
        for (i, v) in self.eigenvector.iter().enumerate() {
            writeln!(out, "{i},{v}")?;
        }
        Ok(())
    }
}

fn normalize2(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

fn inverse_iteration(lap: &Laplacian, start: Vec<f64>, deflate: bool, opts: &EigenOptions) -> Result<(f64, Vec<f64>, f64, usize)> {
    let a = &lap.matrix;
    let n = a.n();
    let norm = a.norm_bound();
    let mut v = start;
    if deflate {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
    }
    normalize2(&mut v);
    let mut av = vec![0.0; n];
    a.mul_vec(&v, &mut av);
    let mut lambda: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        // warm start: once converged, L^{-1} v ≈ v / λ
        let mut w: Vec<f64> = v.iter().map(|x| x / lambda.max(f64::MIN_POSITIVE)).collect();
        conjugate_gradient(a, &v, &mut w, opts.inner_tolerance, opts.inner_max_iterations, deflate)?;
        normalize2(&mut w);
        v = w;
        a.mul_vec(&v, &mut av);
        lambda = v.iter().zip(&av).map(|(x, y)| x * y).sum();
        residual = av
            .iter()
            .zip(&v)
            .map(|(y, x)| (y - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt()
            / norm;
        if residual <= opts.tolerance {
            return Ok((lambda, v, residual, it));
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        residual,
    })
}

fn finish(lap: &Laplacian, graph: &Graph, lambda: f64, v: Vec<f64>, residual: f64, iterations: usize) -> EigenResult {
    let mut full = lap.scatter(&v, graph.n());
    let (imax, _) = full
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("nonempty eigenvector");
    let s = full[imax];
    full.iter_mut().for_each(|x| *x /= s);
    EigenResult {
        eigenvalue: lambda,
        eigenvector: full,
        residual,
        iterations,
    }
}

/// Bottom of the Dirichlet spectrum of the interior-restricted generator.
/// The eigenvector is the positive ground state with unit maximum.
pub fn dirichlet_lambda(graph: &Graph, opts: &EigenOptions) -> Result<EigenResult> {
    if graph.bc != BoundaryCondition::Dirichlet || graph.boundary_vertices().is_empty() {
        return Err(Error::Precondition(
            "dirichlet_lambda needs a graph with a nonempty Dirichlet boundary".into(),
        ));
    }
    let lap = Laplacian::new(graph);
    let start = vec![1.0; lap.dim()];
    let (lambda, v, residual, it) = inverse_iteration(&lap, start, false, opts)?;
    Ok(finish(&lap, graph, lambda, v, residual, it))
}

/// First nontrivial Neumann eigenpair (the constant mode deflated).
pub fn neumann_eigenpair(graph: &Graph, opts: &EigenOptions) -> Result<EigenResult> {
    if graph.bc != BoundaryCondition::Neumann {
        return Err(Error::Precondition("neumann_eigenpair needs a Neumann graph".into()));
    }
    let lap = Laplacian::new(graph);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e65_756d);
    let start: Vec<f64> = (0..lap.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (lambda, v, residual, it) = inverse_iteration(&lap, start, true, opts)?;
    Ok(finish(&lap, graph, lambda, v, residual, it))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::graph::{build_gasket_graph, build_grid_graph};
    use crate::space::DomainSpec;
    use std::f64::consts::PI;

    // exact spectrum of the vertex-centred Dirichlet stencil on (a, b):
    // λ_k = σ²/(2h²) · 4 sin²(kπh / (2L))
    fn stencil_lambda(len: f64, h: f64, sigma2: f64) -> f64 {
        sigma2 / (2.0 * h * h) * 4.0 * (PI * h / (2.0 * len)).sin().powi(2)
    }

    #[test]
    fn interval_ground_state_matches_stencil_oracle() {
        let h = 0.01;
        let g = build_grid_graph(&DomainSpec::interval(-1.0, 1.0), h, BoundaryCondition::Dirichlet, 1.0).unwrap();
        let e = dirichlet_lambda(&g, &EigenOptions::default()).unwrap();
        assert!((e.eigenvalue - stencil_lambda(2.0, h, 1.0)).abs() < 1e-10);
        assert!(e.residual <= 1e-10);
        assert!(e.eigenvector.iter().all(|&x| x >= 0.0));
        let max = e.eigenvector.iter().cloned().fold(0.0, f64::max);
        assert_eq!(max, 1.0);
    }

    #[test]
    fn domain_monotonicity_and_scaling() {
        let h = 0.005;
        let big = build_grid_graph(&DomainSpec::interval(-1.0, 1.0), h, BoundaryCondition::Dirichlet, 1.0).unwrap();
        let small = build_grid_graph(&DomainSpec::interval(-0.5, 0.5), h, BoundaryCondition::Dirichlet, 1.0).unwrap();
        let lb = dirichlet_lambda(&big, &EigenOptions::default()).unwrap().eigenvalue;
        let ls = dirichlet_lambda(&small, &EigenOptions::default()).unwrap().eigenvalue;
        assert!(lb < ls);
        assert!((ls / lb - 4.0).abs() < 1e-3);
    }

    #[test]
    fn unit_square_dirichlet_is_second_order() {
        let g = build_grid_graph(&DomainSpec::unit_square(), 1.0 / 64.0, BoundaryCondition::Dirichlet, 1.0).unwrap();
        let e = dirichlet_lambda(&g, &EigenOptions::default()).unwrap();
        let exact = PI * PI; // σ²/2 · 2π²
        assert!((e.eigenvalue / exact - 1.0).abs() < 2e-3, "{}", e.eigenvalue);
    }

    #[test]
    fn neumann_square_cosine_mode() {
        let g = build_grid_graph(&DomainSpec::unit_square(), 1.0 / 32.0, BoundaryCondition::Neumann, 2.0).unwrap();
        let e = neumann_eigenpair(&g, &EigenOptions::default()).unwrap();
        assert!((e.eigenvalue / (PI * PI) - 1.0).abs() < 5e-3, "{}", e.eigenvalue);
        let mean = e.eigenvector.iter().sum::<f64>() / e.eigenvector.len() as f64;
        assert!(mean.abs() <= 1e-10);
    }

    #[test]
    fn gasket_spectrum_is_positive() {
        let g = build_gasket_graph(3).unwrap();
        let e = dirichlet_lambda(&g, &EigenOptions::default()).unwrap();
        assert!(e.eigenvalue > 0.0);
        assert!(e.eigenvector.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn dirichlet_requires_boundary() {
        let g = build_grid_graph(&DomainSpec::unit_square(), 0.1, BoundaryCondition::Neumann, 1.0).unwrap();
        assert!(matches!(dirichlet_lambda(&g, &EigenOptions::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let g = build_gasket_graph(4).unwrap();
        let opts = EigenOptions {
            max_iterations: 1,
            tolerance: 1e-15,
            ..EigenOptions::default()
        };
        assert!(matches!(dirichlet_lambda(&g, &opts), Err(Error::NoConvergence { .. })));
    }
}
