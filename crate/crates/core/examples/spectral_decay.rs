//! Exact heat kernels on small graphs: semigroup identity, sub-Markov
//! property and the spectral decay inequality
//! `p(x,x,t) <= e^{-(1-eps) lambda t} p(x,x,eps t)`.
//!
//! `cargo run --release --example spectral_decay`

use exitlab::discrete::{build_gasket_graph, build_grid_graph, BoundaryCondition, HeatKernel};
use exitlab::space::DomainSpec;

fn main() -> exitlab::Result<()> {
    let mut kernels = vec![(
        "interval h=1/50".to_string(),
        HeatKernel::new(&build_grid_graph(&DomainSpec::interval(-1.0, 1.0), 0.02, BoundaryCondition::Dirichlet, 1.0)?)?,
    )];
    for m in 1..=5 {
        kernels.push((format!("gasket m={m}"), HeatKernel::new(&build_gasket_graph(m)?)?));
    }
    let eps: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    for (name, hk) in &kernels {
        let lambda = hk.bottom();
        let times: Vec<f64> = (0..20).map(|i| 1e-3 / lambda * 1e4f64.powf(i as f64 / 19.0)).collect();
        let scan = hk.spectral_decay_scan(&times, &eps)?;
        println!(
            "{name:16} lambda {lambda:10.4}  {} checks, {} violations, worst ratio {:.6}",
            scan.checked,
            scan.violations,
            scan.worst_ratio
        );
    }
    let (_, hk) = &kernels[3];
    let defect = hk.chapman_kolmogorov_defect(1, 2, 0.01, 0.02)?;
    println!("\nChapman-Kolmogorov defect on gasket m=3: {defect:.2e}");
    Ok(())
}
