//! Random walk on Sierpinski-gasket graphs: the factor-5 time
//! renormalisation, the walk dimension and on-diagonal heat-kernel decay.
//!
//! `cargo run --release --example gasket_renormalization`

use exitlab::discrete::{gasket_level_ratios, gasket_ondiag_decay};
use exitlab::estimate::walk_dimension_fit;
use exitlab::param::{gasket_hausdorff_dimension, gasket_walk_dimension};
use exitlab::sampler::SimConfig;
use exitlab::space::SpaceSpec;

fn main() -> exitlab::Result<()> {
    println!("level  max steps to a corner  ratio");
    for l in gasket_level_ratios(1..=8)? {
        let ratio = l.step_ratio.map(|r| format!("{r:.4}")).unwrap_or_default();
        println!("{:5}  {:21.1}  {ratio}", l.level, l.max_steps);
    }

    let radii: Vec<f64> = (1..=6).map(|k| 0.5f64.powi(k)).collect();
    let fit = walk_dimension_fit(&SpaceSpec::gasket(8), &[0.5, 0.0], &radii, &SimConfig::new(1e-3, 1.0, 1, 1))?;
    println!("\nwalk dimension {:.4} (log5/log2 = {:.4})", fit.beta_hat, gasket_walk_dimension());

    let target = gasket_hausdorff_dimension() / gasket_walk_dimension();
    for m in [6, 7] {
        let f = gasket_ondiag_decay(&[m], None)?.remove(0);
        println!(
            "m = {}: p(x,x,t) ~ t^-{:.4} on [{:.1e}, {:.1e}] (log3/log5 = {target:.4})",
            m,
            f.exponent,
            f.window.0,
            f.window.1
        );
    }
    Ok(())
}
