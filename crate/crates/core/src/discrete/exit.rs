//! Mean exit times by a sparse Dirichlet solve.

use serde::{Deserialize, Serialize};

use crate::discrete::graph::{build_gasket_graph, BoundaryCondition, Graph};
use crate::discrete::sparse::{conjugate_gradient, Laplacian};
use crate::{Error, Result};

const CG_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExitSolution {
    /// `E_x[τ]` per graph vertex, zero on the boundary.
    pub values: Vec<f64>,
    pub cg_iterations: usize,
    pub relative_residual: f64,
}

impl ExitSolution {
    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Writes `vertex,coordinates...,value` rows.
    pub fn write_csv(&self, graph: &Graph, mut out: impl std::io::Write) -> Result<()> {
        writeln!(out, "# exitlab-mean-exit v1")?;
        let coords: Vec<String> = (0..graph.coord_dim()).map(|k| format!("x{k}")).collect();
        writeln!(out, "vertex,{},mean_exit", coords.join(","))?;
        for (v, e) in self.values.iter().enumerate() {
            let p: Vec<String> = graph.position(v).iter().map(|x| x.to_string()).collect();
            writeln!(out, "{v},{},{e}", p.join(","))?;
        }
        Ok(())
    }
}

fn solve(graph: &Graph, rhs_of: impl Fn(usize) -> f64) -> Result<ExitSolution> {
    if graph.bc != BoundaryCondition::Dirichlet || graph.boundary_vertices().is_empty() {
        return Err(Error::Precondition("mean exit solve needs a nonempty Dirichlet boundary".into()));
    }
    if let Some((comp, _)) = graph.interior_components().into_iter().find(|c| !c.1) {
        return Err(Error::Singular(format!(
            "interior component of {} vertices (containing vertex {}) never reaches the boundary",
            comp.len(),
            comp[0]
        )));
    }
    let lap = Laplacian::new(graph);
    let b: Vec<f64> = lap.active.iter().map(|&v| rhs_of(v)).collect();
    let mut x = vec![0.0; lap.dim()];
    let out = conjugate_gradient(&lap.matrix, &b, &mut x, CG_TOL, 20 * lap.dim() + 1000, false)?;
    Ok(ExitSolution {
        values: lap.scatter(&x, graph.n()),
        cg_iterations: out.iterations,
        relative_residual: out.relative_residual,
    })
}

/// Solves `L E = 1` on the interior with `E = 0` on the boundary.
pub fn mean_exit_solve(graph: &Graph) -> Result<ExitSolution> {
    let sol = solve(graph, |_| 1.0)?;
    if let Some(v) = graph.interior_vertices().into_iter().find(|&v| !(sol.values[v] > 0.0)) {
        return Err(Error::Singular(format!("mean exit time not positive at vertex {v}")));
    }
    Ok(sol)
}

/// Expected number of simple-random-walk steps before absorption.
pub fn expected_steps(graph: &Graph) -> Result<ExitSolution> {
    let s = graph.laplacian_scale;
    solve(graph, |v| s * graph.degree(v) as f64)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelRatio {
    pub level: u32,
    /// `max_x E_x[τ]` for the scaled generator.
    pub max_exit: f64,
    /// `max_x` expected walk steps to reach a corner.
    pub max_steps: f64,
    /// `max_steps(m) / max_steps(m − 1)`, absent for the first level.
    pub step_ratio: Option<f64>,
}

/// Whole-gasket exit statistics across consecutive levels.
pub fn gasket_level_ratios(levels: std::ops::RangeInclusive<u32>) -> Result<Vec<LevelRatio>> {
    let mut out: Vec<LevelRatio> = Vec::new();
    for m in levels {
        let g = build_gasket_graph(m)?;
        let max_exit = mean_exit_solve(&g)?.max();
        let max_steps = expected_steps(&g)?.max();
        let step_ratio = out.last().map(|p| max_steps / p.max_steps);
        out.push(LevelRatio {
            level: m,
            max_exit,
            max_steps,
            step_ratio,
        });
    }
    Ok(out)
}
