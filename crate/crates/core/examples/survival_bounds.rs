//! Runs the survival check suite on the unit disk and prints the report.
//!
//! `cargo run --release --example survival_bounds`

use exitlab::discrete::{build_grid_graph, dirichlet_lambda, BoundaryCondition, EigenOptions};
use exitlab::estimate::{
    exp_moment, moment, start_set, survival_curve, tail_slope, uniform_grid, SurvivalCurve, TailWindow,
    DEFAULT_CENSOR_THRESHOLD,
};
use exitlab::param::exponent_dprime;
use exitlab::sampler::{run_batch, SimConfig};
use exitlab::space::{DomainSpec, SpaceSpec};
use exitlab::verify::{survival_suite, SuiteInputs, Tolerance, SURVIVAL_SUITE};
use exitlab::BESSEL_J0_FIRST_ZERO;

fn main() -> exitlab::Result<()> {
    let space = SpaceSpec::euclidean(2);
    let disk = DomainSpec::ball(vec![0.0, 0.0], 1.0);
    let lambda = dirichlet_lambda(
        &build_grid_graph(&disk, 1.0 / 64.0, BoundaryCondition::Dirichlet, 1.0)?,
        &EigenOptions::default(),
    )?
    .eigenvalue;
    println!("lambda grid {lambda:.4}, j0^2/2 = {:.4}", BESSEL_J0_FIRST_ZERO.powi(2) / 2.0);

    // the supremum over starts is approximated by a few interior points
    let cfg = SimConfig::new(1e-4, 4.0, 10_000, 1);
    let grid = uniform_grid(0.05, 1.5, 59);
    let mut curves = Vec::new();
    let mut best = None;
    for (i, x) in start_set(&disk, 4)?.iter().enumerate() {
        let batch = run_batch(&space, &disk, x, &SimConfig { seed: 1 + i as u64, ..cfg.clone() })?;
        curves.push(survival_curve(&batch, &grid)?);
        if i == 0 {
            best = Some(batch);
        }
    }
    let center = best.expect("center batch");
    let curve = SurvivalCurve::pointwise_max(&curves)?;
    let tail = tail_slope(&survival_curve(&center, &uniform_grid(0.05, 3.5, 200))?, &TailWindow::default())?;

    let inputs = SuiteInputs {
        label: "unit disk".into(),
        curve,
        lambda,
        lambda_source: "dirichlet_lambda".into(),
        generator_scale: 1.0,
        dprime: exponent_dprime(2.0, 2.0, 2.0)?,
        moments: vec![
            moment(&center, 1.0, DEFAULT_CENSOR_THRESHOLD)?,
            moment(&center, 2.0, DEFAULT_CENSOR_THRESHOLD)?,
        ],
        exp_moments: vec![exp_moment(&center, 0.4 * lambda, DEFAULT_CENSOR_THRESHOLD)?],
        tail: Some(tail),
        lambda_eigen: Some(lambda),
    };
    let suite: Vec<String> = SURVIVAL_SUITE.iter().map(|s| s.to_string()).collect();
    let report = survival_suite(&inputs, &suite, &Tolerance::default(), 1.0)?;
    println!("\n{}", report.to_markdown());
    println!("all mandatory checks pass: {}", report.all_mandatory_pass());
    Ok(())
}
