use serde::{Deserialize, Serialize};

use super::moments::{moment, DEFAULT_CENSOR_THRESHOLD};
use crate::discrete::exit::mean_exit_solve;
use crate::discrete::graph::build_gasket_domain;
use crate::discrete::heat::linear_fit;
use crate::sampler::{run_batch, SimConfig};
use crate::space::{DomainSpec, GasketRegion, SpaceKind, SpaceSpec};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkDimensionFit {
    pub beta_hat: f64,
    pub intercept: f64,
    pub r2: f64,
    pub radii: Vec<f64>,
    pub mean_exit: Vec<f64>,
    /// Standard errors of the mean exit times (zero for exact solves).
    pub se: Vec<f64>,
    pub method: String,
}

/// Checks that a radius list supports a log-log fit: at least four radii
/// spanning at least 1.5 decades.
pub fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Domain("radii must be positive".into()));
    }
    let lo = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().cloned().fold(0.0, f64::max);
    if radii.len() < 4 || (hi / lo).log10() < 1.5 - 1e-9 {
        return Err(Error::InsufficientSample(format!(
            "need >= 4 radii over >= 1.5 decades, got {} over {:.2}",
            radii.len(),
            (hi / lo).log10()
        )));
    }
    Ok(())
}

/// Ball of radius `r` about `center` in the space's own geometry.
pub fn ball_domain(space: &SpaceSpec, center: &[f64], r: f64) -> Result<DomainSpec> {
    match space.kind {
        SpaceKind::Euclidean { d: 1 } => Ok(DomainSpec::interval(center[0] - r, center[0] + r)),
        SpaceKind::Euclidean { .. } => Ok(DomainSpec::ball(center.to_vec(), r)),
        SpaceKind::Heisenberg { .. } => Ok(DomainSpec::koranyi_ball(center.to_vec(), r)),
        SpaceKind::Gasket { .. } => {
            if center.len() != 2 {
                return Err(Error::Precondition("gasket center must be a planar point".into()));
            }
            Ok(DomainSpec::GasketSubset {
                region: GasketRegion::Ball {
                    center: [center[0], center[1]],
                    radius: r,
                },
            })
        }
    }
}

/// Mean exit time from `B(center, r)` started at the center. Monte Carlo
/// runs use `config` at unit radius with the step size and horizon scaled
/// by `r²`; gasket balls are solved exactly at the space's level.
pub fn mean_exit_from_ball(space: &SpaceSpec, center: &[f64], r: f64, config: &SimConfig) -> Result<(f64, f64)> {
    let domain = ball_domain(space, center, r)?;
    match space.kind {
        SpaceKind::Gasket { m } => {
            let DomainSpec::GasketSubset { region } = &domain else { unreachable!() };
            let (g, c) = build_gasket_domain(m, region)?;
            let e = mean_exit_solve(&g)?;
            Ok((e.values[c], 0.0))
        }
        _ => {
            let mut cfg = config.clone();
            cfg.step_size *= r * r;
            cfg.t_max *= r * r;
            let batch = run_batch(space, &domain, center, &cfg)?;
            let m = moment(&batch, 1.0, DEFAULT_CENSOR_THRESHOLD)?;
            Ok((m.value, m.se))
        }
    }
}

/// Log-log regression of the mean exit time from balls against the radius.
pub fn walk_dimension_fit(space: &SpaceSpec, center: &[f64], radii: &[f64], config: &SimConfig) -> Result<WalkDimensionFit> {
    check_radii(radii)?;
    let mut mean_exit = Vec::with_capacity(radii.len());
    let mut se = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let mut cfg = config.clone();
        cfg.seed = config.seed.wrapping_add(i as u64);
        let (m, s) = mean_exit_from_ball(space, center, r, &cfg)?;
        mean_exit.push(m);
        se.push(s);
    }
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = mean_exit.iter().map(|e| e.ln()).collect();
    let (beta_hat, intercept, r2) = linear_fit(&x, &y);
    Ok(WalkDimensionFit {
        beta_hat,
        intercept,
        r2,
        radii: radii.to_vec(),
        mean_exit,
        se,
        method: match space.kind {
            SpaceKind::Gasket { .. } => "exact".into(),
            _ => "monte_carlo".into(),
        },
    })
}
