//! Fits the scaling conditions on the disk and on the gasket, then checks
//! them against the on-diagonal decay of the heat kernel. A wrong
//! parameter function fails both sides together.
//!
//! `cargo run --release --example condition_suite`

use exitlab::param::{gasket_walk_dimension, ParameterFunction};
use exitlab::space::{DomainSpec, GasketRegion, SpaceSpec};
use exitlab::verify::{
    check_condition_ebar, check_condition_ebar_prime, check_envelope_shape, consistency_prop43, fit_condition_e_f,
    fit_condition_fk, fit_condition_lambda_f, ondiag_decay, ConditionOptions, VerificationReport,
};

fn run(
    space: &SpaceSpec,
    pf: &ParameterFunction,
    center: &[f64],
    radii: &[f64],
    fk: (&[f64], &[DomainSpec]),
    opts: &ConditionOptions,
) -> exitlab::Result<VerificationReport> {
    let centers = [center.to_vec()];
    let mut r = VerificationReport::new(format!("{} F=r^{:.3}", space.label(), pf.beta()));
    r.conditions = vec![
        fit_condition_lambda_f(space, pf, &centers, radii, opts)?,
        fit_condition_e_f(space, pf, &centers, radii, opts)?,
        fit_condition_fk(space, pf, fk.0, 1.0, fk.1, opts)?,
        check_condition_ebar(space, &centers, radii, opts)?,
        check_condition_ebar_prime(space, &centers, radii, 0.5, opts)?,
    ];
    let shape = check_envelope_shape(&ondiag_decay(space, opts)?, space.alpha(), pf, 0.05);
    r.checks.push(consistency_prop43(&r.conditions, &shape)?);
    r.checks.push(shape);
    Ok(r)
}

fn main() -> exitlab::Result<()> {
    let opts = ConditionOptions {
        cap: 2.0,
        grid_resolution: 32,
        ..Default::default()
    };
    let square = ParameterFunction::power(2.0)?;
    let boxed = |x: f64, y: f64, w: f64, h: f64| DomainSpec::Box {
        lower: vec![x, y],
        upper: vec![x + w, y + h],
    };
    let family = [
        DomainSpec::ball(vec![0.0, 0.0], 1.0),
        boxed(-0.7, -0.7, 1.4, 1.4),
        boxed(0.0, 0.0, 0.5, 0.5),
        boxed(0.0, 0.0, 0.25, 0.5),
    ];
    let disk = run(
        &SpaceSpec::euclidean(2),
        &square,
        &[0.0, 0.0],
        &[1.0, 0.3, 0.1, 0.03],
        (&[0.0, 0.0], &family),
        &opts,
    )?;
    println!("{}", disk.to_markdown());

    let gasket = SpaceSpec::gasket(8);
    let radii: Vec<f64> = (1..=6).map(|k| 0.5f64.powi(k)).collect();
    let mut family = vec![DomainSpec::GasketSubset { region: GasketRegion::Whole }];
    family.extend((1..=3).map(|k| DomainSpec::GasketSubset {
        region: GasketRegion::Cell { address: vec![0; k] },
    }));
    for pf in [ParameterFunction::power(gasket_walk_dimension())?, square] {
        let r = run(&gasket, &pf, &[0.5, 0.0], &radii, (&[0.5, 0.25], &family), &opts)?;
        println!("{}", r.to_markdown());
        println!("verdict: {}\n", r.checks[0].note);
    }
    Ok(())
}
