//! Parameter functions, their Legendre-type transform, the envelope
//! exponent and the layer-cake identity.
//!
//! `cargo run --release --example parameter_functions`

use exitlab::layercake::{check_layercake, RadialProfile};
use exitlab::param::{exponent_dprime, gasket_walk_dimension, ue_envelope, EnvelopeParams, ParameterFunction};
use exitlab::space::SpaceSpec;

fn main() -> exitlab::Result<()> {
    let fns = [
        ("Gaussian", ParameterFunction::power(2.0)?),
        ("gasket", ParameterFunction::power(gasket_walk_dimension())?),
        ("fractal-like manifold", ParameterFunction::fractal_manifold()),
    ];
    for (name, pf) in &fns {
        println!(
            "{name}: beta {:.4}, beta' {:.4}, C_F {:.3}",
            pf.beta(),
            pf.beta_prime(),
            pf.regularity_constant()
        );
        for r in [0.1, 1.0, 10.0] {
            let f = pf.eval(r)?;
            println!("  F({r}) = {f:.4e}, R(F(r)) = {:.4}, Phi({r}) = {:.4e}", pf.inverse(f)?, pf.phi(r)?);
        }
    }

    println!("\nd' for (alpha, beta, beta'):");
    for (a, b, bp) in [(1.0, 2.0, 2.0), (2.0, 2.0, 2.0), (4.0, 2.0, 2.0), (3f64.ln() / 2f64.ln(), gasket_walk_dimension(), gasket_walk_dimension())] {
        println!("  ({a:.4}, {b:.4}, {bp:.4}) -> {:.4}", exponent_dprime(a, b, bp)?);
    }

    let env = EnvelopeParams::new(1.0, 1.0, 1.0, 1.0)?;
    let pf = ParameterFunction::power(2.0)?;
    println!("\nsub-Gaussian envelope on the line, t = 1:");
    for d in [0.0, 1.0, 2.0, 4.0] {
        let t = 1.0;
        let vol = 2.0 * pf.inverse(t)?;
        println!("  dist {d}: {:.4e}", ue_envelope(&pf, &env, vol, d, t)?);
    }

    let gauss = |r: f64| (-r * r).exp();
    let dgauss = |r: f64| -2.0 * r * (-r * r).exp();
    let profile = RadialProfile { phi: &gauss, dphi: &dgauss };
    println!("\nlayer-cake residuals, Gaussian profile outside B(0, 0.5):");
    for d in 1..=3 {
        let res = check_layercake(&SpaceSpec::euclidean(d), &vec![0.0; d], 0.5, &profile, 12.0)?;
        println!("  d = {d}: {res:.2e}");
    }
    Ok(())
}
