//! Hot-spots ratio of the first nontrivial Neumann eigenfunction.

use serde::{Deserialize, Serialize};

use crate::discrete::eigen::{dirichlet_lambda, neumann_eigenpair, EigenOptions, EigenResult};
use crate::discrete::graph::{build_grid_graph, BoundaryCondition, Graph};
use crate::space::DomainSpec;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HotSpots {
    pub mu2: f64,
    pub lambda1: f64,
    pub mu2_over_lambda1: f64,
    /// `max(sup_D φ₂ / sup_∂D φ₂, sup_D (−φ₂) / sup_∂D (−φ₂))`.
    pub ratio: f64,
    pub rim_vertices: usize,
    pub neumann_residual: f64,
    pub dirichlet_residual: f64,
}

/// Ratio for one Neumann eigenvector on a grid graph; the rim stands in for
/// the boundary.
pub fn hot_spots_ratio(graph: &Graph, phi: &[f64]) -> Result<f64> {
    let rim = graph.rim_vertices();
    if rim.is_empty() {
        return Err(Error::Precondition("graph has no rim vertices".into()));
    }
    let mut worst: f64 = 0.0;
    for sign in [1.0, -1.0] {
        let all = phi.iter().map(|v| sign * v).fold(f64::NEG_INFINITY, f64::max);
        let edge = rim.iter().map(|&v| sign * phi[v]).fold(f64::NEG_INFINITY, f64::max);
        if !(edge > 0.0) {
            return Err(Error::Contract(format!(
                "eigenfunction has no positive boundary maximum for sign {sign}"
            )));
        }
        worst = worst.max(all / edge);
    }
    Ok(worst)
}

/// Neumann `μ₂`, Dirichlet `λ₁` and the hot-spots ratio of a planar domain.
pub fn hot_spots(domain: &DomainSpec, h: f64, generator_scale: f64, opts: &EigenOptions) -> Result<HotSpots> {
    let (lo, _) = domain
        .bounding_box()
        .ok_or_else(|| Error::Precondition(format!("no grid for {}", domain.label())))?;
    if lo.len() != 2 {
        return Err(Error::Precondition("hot spots are computed for planar domains".into()));
    }
    let neumann_graph = build_grid_graph(domain, h, BoundaryCondition::Neumann, generator_scale)?;
    let neumann: EigenResult = neumann_eigenpair(&neumann_graph, opts)?;
    let dirichlet_graph = build_grid_graph(domain, h, BoundaryCondition::Dirichlet, generator_scale)?;
    let dirichlet = dirichlet_lambda(&dirichlet_graph, opts)?;
    let ratio = hot_spots_ratio(&neumann_graph, &neumann.eigenvector)?;
    Ok(HotSpots {
        mu2: neumann.eigenvalue,
        lambda1: dirichlet.eigenvalue,
        mu2_over_lambda1: neumann.eigenvalue / dirichlet.eigenvalue,
        ratio,
        rim_vertices: neumann_graph.rim_vertices().len(),
        neumann_residual: neumann.residual,
        dirichlet_residual: dirichlet.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_square_cosine_mode() {
        let r = hot_spots(&DomainSpec::unit_square(), 1.0 / 32.0, 2.0, &EigenOptions::default()).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-6, "{r:?}");
        // μ₂ = π², λ₁ = 2π² for the pure Laplacian
        assert!((r.mu2_over_lambda1 - 0.5).abs() < 5e-3);
        assert!((r.mu2 / (PI * PI) - 1.0).abs() < 5e-3);
    }

    #[test]
    fn interior_bump_is_detected() {
        let g = build_grid_graph(&DomainSpec::unit_square(), 0.25, BoundaryCondition::Neumann, 1.0).unwrap();
        let mut phi = vec![0.5; g.n()];
        for v in g.rim_vertices() {
            phi[v] = if g.position(v)[0] < 0.5 { -0.5 } else { 0.5 };
        }
        let inner = (0..g.n()).find(|v| !g.rim_vertices().contains(v)).unwrap();
        phi[inner] = 1.0;
        assert!((hot_spots_ratio(&g, &phi).unwrap() - 2.0).abs() < 1e-12);
    }
}
