//! Layer-cake identity for radial integrals outside a ball:
//!
//! ```text
//! ∫_{B(x,R)^c} φ(d(x,y)) dμ(y) = −φ(R) μ(B(x,R)) − ∫_R^∞ μ(B(x,r)) φ'(r) dr
//! ```
//!
//! for decreasing `φ` with `φ(∞) = 0`. The left side is integrated directly
//! in polar/spherical coordinates around `x`; the right side uses only the
//! ball-volume function of the space.

use std::f64::consts::PI;

use crate::quadrature::integrate;
use crate::space::{SpaceKind, SpaceSpec};
use crate::{Error, Result};

const REL_TOL: f64 = 1e-11;

/// Radial test function with its derivative.
pub struct RadialProfile<'a> {
    pub phi: &'a dyn Fn(f64) -> f64,
    pub dphi: &'a dyn Fn(f64) -> f64,
}

/// Returns `|LHS − RHS| / |RHS|`. Both sides are truncated at `truncation`,
/// which must be large enough that `φ` has decayed to round-off there.
pub fn check_layercake(
    space: &SpaceSpec,
    center: &[f64],
    radius: f64,
    profile: &RadialProfile<'_>,
    truncation: f64,
) -> Result<f64> {
    let d = match space.kind {
        SpaceKind::Euclidean { d } if d <= 3 => d,
        _ => {
            return Err(Error::Precondition(format!(
                "layer-cake quadrature is implemented for euclidean d <= 3, got {}",
                space.label()
            )))
        }
    };
    if center.len() != d {
        return Err(Error::Precondition(format!("center must have {d} coordinates")));
    }
    if !(radius >= 0.0 && truncation > radius) {
        return Err(Error::Precondition(format!(
            "need 0 <= R < truncation, got R = {radius}, truncation = {truncation}"
        )));
    }
    check_profile(profile, radius, truncation)?;
    let phi = profile.phi;

    let lhs = match d {
        1 => {
            // the two half-lines left and right of the excluded interval
            let x = center[0];
            integrate(|y| phi(x - y), x - truncation, x - radius, REL_TOL, 0.0)
                + integrate(|y| phi(y - x), x + radius, x + truncation, REL_TOL, 0.0)
        }
        _ => {
            // polar (d = 2) or spherical (d = 3) coordinates about x: the
            // angular Jacobian integrates to the sphere area, the radial
            // factor carries r^{d-1}
            let angular = if d == 2 {
                integrate(|_| 1.0, 0.0, 2.0 * PI, REL_TOL, 0.0)
            } else {
                2.0 * PI * integrate(|polar: f64| polar.sin(), 0.0, PI, REL_TOL, 0.0)
            };
            let radial = integrate(|r| phi(r) * r.powi(d as i32 - 1), radius, truncation, REL_TOL, 0.0);
            angular * radial
        }
    };

    let vol = |r: f64| if r > 0.0 { space.volume(r).unwrap_or(0.0) } else { 0.0 };
    let rhs = -phi(radius) * vol(radius)
        - integrate(|r| vol(r) * (profile.dphi)(r), radius, truncation, REL_TOL, 0.0);
    if rhs == 0.0 {
        return Err(Error::Contract("right-hand side vanishes".into()));
    }
    Ok((lhs - rhs).abs() / rhs.abs())
}

fn check_profile(profile: &RadialProfile<'_>, radius: f64, truncation: f64) -> Result<()> {
    let n = 512;
    let mut prev = (profile.phi)(radius);
    for i in 1..=n {
        let r = radius + (truncation - radius) * i as f64 / n as f64;
        let v = (profile.phi)(r);
        if v > prev * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::Contract(format!("phi is not decreasing near r = {r}")));
        }
        prev = v;
    }
    let head = (profile.phi)(radius).abs();
    let tail = (profile.phi)(truncation).abs();
    if !(tail <= 1e-12 * head.max(f64::MIN_POSITIVE)) {
        return Err(Error::Contract(format!(
            "phi must vanish at infinity; phi(truncation) = {tail} vs phi(R) = {head}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_line_from_origin() {
        let phi = |r: f64| (-r * r).exp();
        let dphi = |r: f64| -2.0 * r * (-r * r).exp();
        let p = RadialProfile { phi: &phi, dphi: &dphi };
        let res = check_layercake(&SpaceSpec::euclidean(1), &[0.3], 0.0, &p, 12.0).unwrap();
        assert!(res <= 1e-6, "residual {res}");
    }

    #[test]
    fn exponential_plane_outside_unit_disk() {
        let phi = |r: f64| (-r).exp();
        let dphi = |r: f64| -(-r).exp();
        let p = RadialProfile { phi: &phi, dphi: &dphi };
        let res = check_layercake(&SpaceSpec::euclidean(2), &[0.0, 0.0], 1.0, &p, 60.0).unwrap();
        assert!(res <= 1e-6, "residual {res}");
    }

    #[test]
    fn constant_profile_is_a_contract_error() {
        let phi = |_: f64| 1.0;
        let dphi = |_: f64| 0.0;
        let p = RadialProfile { phi: &phi, dphi: &dphi };
        let e = check_layercake(&SpaceSpec::euclidean(1), &[0.0], 0.0, &p, 10.0);
        assert!(matches!(e, Err(Error::Contract(_))));
    }

    #[test]
    fn increasing_profile_is_a_contract_error() {
        let phi = |r: f64| (-(r - 2.0).powi(2)).exp();
        let dphi = |r: f64| -2.0 * (r - 2.0) * (-(r - 2.0).powi(2)).exp();
        let p = RadialProfile { phi: &phi, dphi: &dphi };
        let e = check_layercake(&SpaceSpec::euclidean(2), &[0.0, 0.0], 0.0, &p, 12.0);
        assert!(matches!(e, Err(Error::Contract(_))));
    }
}
