//! First nontrivial Neumann eigenfunction of the unit disk: where it peaks
//! and how its eigenvalue compares with the Dirichlet ground state.
//!
//! `cargo run --release --example hot_spots_disk -- [cells per unit]`

use exitlab::discrete::{hot_spots, EigenOptions};
use exitlab::space::DomainSpec;
use exitlab::verify::check_hot_spots;
use exitlab::{BESSEL_J0_FIRST_ZERO, BESSEL_J1_PRIME_FIRST_ZERO};

fn main() -> exitlab::Result<()> {
    let cells: f64 = std::env::args().nth(1).map(|s| s.parse().expect("cells")).unwrap_or(64.0);
    let hs = hot_spots(&DomainSpec::ball(vec![0.0, 0.0], 1.0), 1.0 / cells, 1.0, &EigenOptions::default())?;
    println!("mu2 = {:.5}, lambda1 = {:.5}", hs.mu2, hs.lambda1);
    println!(
        "mu2/lambda1 = {:.5} (Bessel zeros give {:.5})",
        hs.mu2_over_lambda1,
        (BESSEL_J1_PRIME_FIRST_ZERO / BESSEL_J0_FIRST_ZERO).powi(2)
    );
    let c = check_hot_spots(&hs, 1.02);
    println!("sup phi2 / sup over the rim = {:.5}, bound 1.02: {}", hs.ratio, if c.pass { "holds" } else { "violated" });
    Ok(())
}
