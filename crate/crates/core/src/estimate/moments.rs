use serde::{Deserialize, Serialize};

use crate::sampler::ExitBatch;
use crate::{Error, Result};

/// Largest censored fraction a moment estimate accepts by default.
pub const DEFAULT_CENSOR_THRESHOLD: f64 = 1e-3;

/// Normal quantile for two-sided 95% intervals.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub p: f64,
    pub value: f64,
    pub se: f64,
    /// Half-width of the 95% normal-approximation interval.
    pub ci_halfwidth: f64,
    pub censored_fraction: f64,
    pub n: usize,
    /// `generator_scale` of the batch the moment came from.
    pub generator_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpMomentEstimate {
    pub a: f64,
    pub value: f64,
    pub se: f64,
    /// Share of the sum contributed by the largest 1% of samples.
    pub top_share: f64,
    /// Set when `top_share > 0.2`: the sample mean is dominated by a few
    /// paths and the expectation may not exist.
    pub unstable: bool,
    pub censored_fraction: f64,
    pub n: usize,
    pub generator_scale: f64,
}

fn guard(batch: &ExitBatch, threshold: f64) -> Result<f64> {
    if batch.records.is_empty() {
        return Err(Error::InsufficientSample("empty batch".into()));
    }
    let frac = batch.censored_fraction();
    if frac > threshold {
        return Err(Error::Censored {
            fraction: frac,
            threshold,
        });
    }
    Ok(frac)
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    // shifted by the first sample, exact for constant samples
    let x0 = values[0];
    let mean = x0 + values.iter().map(|v| v - x0).sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sample mean of `τ^p`; refuses when too many paths were censored.
pub fn moment(batch: &ExitBatch, p: f64, censor_threshold: f64) -> Result<MomentEstimate> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("moment order must be positive, got {p}")));
    }
    let frac = guard(batch, censor_threshold)?;
    let values: Vec<f64> = batch.records.iter().map(|r| r.tau.powf(p)).collect();
    let (value, se) = mean_se(&values);
    Ok(MomentEstimate {
        p,
        value,
        se,
        ci_halfwidth: Z95 * se,
        censored_fraction: frac,
        n: values.len(),
        generator_scale: batch.space.generator_scale,
    })
}

/// Sample mean of `e^{aτ}` with a heavy-tail diagnostic.
pub fn exp_moment(batch: &ExitBatch, a: f64, censor_threshold: f64) -> Result<ExpMomentEstimate> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("rate must be finite, got {a}")));
    }
    let frac = guard(batch, censor_threshold)?;
    let mut values: Vec<f64> = batch.records.iter().map(|r| (a * r.tau).exp()).collect();
    let (value, se) = mean_se(&values);
    values.sort_by(|x, y| y.total_cmp(x));
    let top = (values.len() as f64 * 0.01).ceil() as usize;
    let total: f64 = values.iter().sum();
    let top_share = values[..top].iter().sum::<f64>() / total;
    Ok(ExpMomentEstimate {
        a,
        value,
        se,
        top_share,
        unstable: top_share > 0.2,
        censored_fraction: frac,
        n: values.len(),
        generator_scale: batch.space.generator_scale,
    })
}
