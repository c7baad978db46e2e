//! Horizontal Brownian motion on the Heisenberg group: Lévy-area moments,
//! exits from the Korányi ball and the space-time scaling exponent.
//!
//! `cargo run --release --example heisenberg_levy_area`

use exitlab::estimate::{moment, survival_curve, tail_slope, uniform_grid, walk_dimension_fit, TailWindow};
use exitlab::sampler::{levy_area_samples, run_batch, SimConfig};
use exitlab::space::{koranyi_unit_volume, DomainSpec, SpaceSpec};

fn main() -> exitlab::Result<()> {
    let k = 100;
    let areas = levy_area_samples(200_000, 1.0, 1.0, k, 3)?;
    let n = areas.len() as f64;
    let mean = areas.iter().sum::<f64>() / n;
    let var = areas.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0);
    println!("A_1: mean {mean:.4}, variance {var:.4} (1 - 1/k = {:.4})", 1.0 - 1.0 / k as f64);

    let space = SpaceSpec::heisenberg(1);
    println!("Koranyi unit ball volume {:.4}", koranyi_unit_volume(1));
    let mut cfg = SimConfig::new(1e-3, 20.0, 20_000, 5);
    cfg.substeps = 4;
    let batch = run_batch(&space, &DomainSpec::koranyi_ball(vec![0.0; 3], 1.0), &[0.0; 3], &cfg)?;
    let e = moment(&batch, 1.0, 1e-3)?;
    let tail = tail_slope(&survival_curve(&batch, &uniform_grid(0.02, 2.0, 100))?, &TailWindow::default())?;
    println!(
        "exit from the unit ball: E[tau] {:.4} +/- {:.4}, tail rate {:.3}, product {:.3} (>= 1)",
        e.value,
        e.ci_halfwidth,
        tail.lambda_hat,
        e.value * tail.lambda_hat
    );

    cfg.n_paths = 5_000;
    let fit = walk_dimension_fit(&space, &[0.0; 3], &[1.0, 0.3, 0.1, 0.03], &cfg)?;
    for (r, m) in fit.radii.iter().zip(&fit.mean_exit) {
        println!("  r = {r:5.2}  E[tau] = {m:.3e}");
    }
    println!("walk dimension {:.3} (diffusive scaling gives 2)", fit.beta_hat);
    Ok(())
}
