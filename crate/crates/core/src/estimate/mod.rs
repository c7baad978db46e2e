//! Survival curves, moments, tail slopes and scaling fits from exit
//! batches.

mod moments;
mod scaling;
mod survival;
mod tail;

pub use moments::{exp_moment, moment, ExpMomentEstimate, MomentEstimate, DEFAULT_CENSOR_THRESHOLD};
pub use scaling::{ball_domain, check_radii, mean_exit_from_ball, walk_dimension_fit, WalkDimensionFit};
pub use survival::{survival_curve, uniform_grid, SurvivalCurve};
pub use tail::{tail_slope, TailFit, TailWindow};

use crate::space::{DomainSpec, GasketRegion, UNIT_TRIANGLE};
use crate::{Error, Result};

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Starting points for approximating a supremum over the domain: a
/// reference point followed by `extra` Halton points inside the domain.
pub fn start_set(domain: &DomainSpec, extra: usize) -> Result<Vec<Vec<f64>>> {
    let (center, lo, hi): (Vec<f64>, Vec<f64>, Vec<f64>) = match domain {
        DomainSpec::KoranyiBall { center, radius } => {
            let k = center.len() - 1;
            let mut lo = vec![-radius; k];
            let mut hi = vec![*radius; k];
            lo.push(-radius * radius / 2.0);
            hi.push(radius * radius / 2.0);
            (center.clone(), lo, hi)
        }
        DomainSpec::GasketSubset { region } => {
            let c = match region {
                GasketRegion::Ball { center, .. } => center.to_vec(),
                _ => vec![0.5, 0.25],
            };
            (c, vec![0.0, 0.0], vec![1.0, UNIT_TRIANGLE[2][1]])
        }
        DomainSpec::Slab { .. } => {
            return Err(Error::Precondition("start sets need a bounded domain".into()));
        }
        _ => {
            let (lo, hi) = domain
                .bounding_box()
                .ok_or_else(|| Error::Precondition(format!("no bounding box for {}", domain.label())))?;
            let c = match domain {
                DomainSpec::EuclideanBall { center, .. } => center.clone(),
                _ => lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            };
            (c, lo, hi)
        }
    };
    let dim = lo.len();
    if dim > PRIMES.len() {
        return Err(Error::Precondition(format!("start sets support up to {} coordinates", PRIMES.len())));
    }
    let mut out = vec![center.clone()];
    let mut i = 1u64;
    while out.len() < extra + 1 && i < 100_000 {
        let local: Vec<f64> = (0..dim)
            .map(|k| lo[k] + (hi[k] - lo[k]) * radical_inverse(i, PRIMES[k]))
            .collect();
        i += 1;
        let p = match domain {
            DomainSpec::KoranyiBall { .. } => {
                // left translation of the local point by the center
                let n = dim / 2;
                let mut p: Vec<f64> = (0..dim).map(|k| center[k] + local[k]).collect();
                for j in 0..n {
                    p[dim - 1] += center[j] * local[n + j] - center[n + j] * local[j];
                }
                p
            }
            _ => local,
        };
        let near_center = p.iter().zip(&center).all(|(a, b)| (a - b).abs() < 1e-12);
        if domain.contains(&p) && !near_center {
            out.push(p);
        }
    }
    Ok(out)
}
