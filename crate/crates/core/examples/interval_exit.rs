//! Brownian motion on (-1, 1): Monte Carlo exit times against the exact
//! mean, survival series and ground-state eigenvalue.
//!
//! `cargo run --release --example interval_exit -- [paths] [step]`

use std::f64::consts::PI;

use exitlab::discrete::{build_grid_graph, dirichlet_lambda, BoundaryCondition, EigenOptions};
use exitlab::estimate::{moment, survival_curve, tail_slope, uniform_grid, TailWindow, DEFAULT_CENSOR_THRESHOLD};
use exitlab::sampler::{run_batch, SimConfig};
use exitlab::space::{DomainSpec, SpaceSpec};

fn exact_survival(t: f64) -> f64 {
    let lambda = PI * PI / 8.0;
    4.0 / PI
        * (0..100)
            .map(|k| {
                let n = (2 * k + 1) as f64;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign / n * (-n * n * lambda * t).exp()
            })
            .sum::<f64>()
}

fn main() -> exitlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let paths: usize = args.next().map(|s| s.parse().expect("paths")).unwrap_or(50_000);
    let step: f64 = args.next().map(|s| s.parse().expect("step")).unwrap_or(1e-4);

    let domain = DomainSpec::interval(-1.0, 1.0);
    let batch = run_batch(&SpaceSpec::euclidean(1), &domain, &[0.0], &SimConfig::new(step, 20.0, paths, 1))?;
    let m1 = moment(&batch, 1.0, DEFAULT_CENSOR_THRESHOLD)?;
    let m2 = moment(&batch, 2.0, DEFAULT_CENSOR_THRESHOLD)?;
    println!("E[tau]   = {:.4} +/- {:.4}  (exact 1)", m1.value, m1.ci_halfwidth);
    println!("E[tau^2] = {:.4} +/- {:.4}  (exact 5/3)", m2.value, m2.ci_halfwidth);

    let g = build_grid_graph(&domain, 5e-4, BoundaryCondition::Dirichlet, 1.0)?;
    let eig = dirichlet_lambda(&g, &EigenOptions::default())?;
    println!("lambda grid = {:.6}, pi^2/8 = {:.6}", eig.eigenvalue, PI * PI / 8.0);

    let curve = survival_curve(&batch, &uniform_grid(0.25, 4.0, 16))?;
    println!("\n   t      S_mc     S_exact  e^(-lambda t)");
    for (t, s) in curve.t.iter().zip(&curve.s) {
        println!("{t:5.2}  {s:8.5}  {:8.5}  {:8.5}", exact_survival(*t), (-eig.eigenvalue * t).exp());
    }

    let fine = survival_curve(&batch, &uniform_grid(0.05, 8.0, 400))?;
    let tail = tail_slope(&fine, &TailWindow::default())?;
    println!(
        "\ntail rate {:.4} +/- {:.4} on t in [{:.2}, {:.2}], r2 {:.4}",
        tail.lambda_hat, tail.se, tail.window.0, tail.window.1, tail.r2
    );
    Ok(())
}
