use serde::{Deserialize, Serialize};

use super::SurvivalCurve;
use crate::{Error, Result};

/// Which part of a survival curve enters the exponential tail fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailWindow {
    pub s_min: f64,
    pub s_max: f64,
    pub min_points: usize,
    pub r2_min: f64,
}

impl Default for TailWindow {
    fn default() -> Self {
        Self {
            s_min: 0.01,
            s_max: 0.5,
            min_points: 10,
            r2_min: 0.99,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub lambda_hat: f64,
    pub se: f64,
    pub window: (f64, f64),
    pub r2: f64,
    pub points: usize,
}

/// Weighted least squares of `log S(t)` against `t` on the grid points with
/// `S ∈ [s_min, s_max]`, weights `S n / (1 − S)` from the delta method.
/// Returns the negated slope.
pub fn tail_slope(curve: &SurvivalCurve, window: &TailWindow) -> Result<TailFit> {
    let mut t = Vec::new();
    let mut y = Vec::new();
    let mut w = Vec::new();
    for i in 0..curve.t.len() {
        let s = curve.s[i];
        if s >= window.s_min && s <= window.s_max && s > 0.0 && s < 1.0 {
            t.push(curve.t[i]);
            y.push(s.ln());
            w.push(s * curve.n as f64 / (1.0 - s));
        }
    }
    if t.len() < window.min_points {
        return Err(Error::FitRejected(format!(
            "{} grid points with S in [{}, {}], need {}",
            t.len(),
            window.s_min,
            window.s_max,
            window.min_points
        )));
    }
    let sw: f64 = w.iter().sum();
    let mt = t.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..t.len() {
        let (dx, dy) = (t[i] - mt, y[i] - my);
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * dy;
        syy += w[i] * dy * dy;
    }
    if !(sxx > 0.0) {
        return Err(Error::FitRejected("window has no time spread".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    let fit = TailFit {
        lambda_hat: -slope,
        se: (1.0 / sxx).sqrt(),
        window: (t[0], *t.last().expect("nonempty")),
        r2,
        points: t.len(),
    };
    if r2 < window.r2_min {
        return Err(Error::FitRejected(format!(
            "r2 = {r2:.5} below {} (lambda_hat = {}, window {:?})",
            window.r2_min, fit.lambda_hat, fit.window
        )));
    }
    if !(fit.lambda_hat > 0.0) {
        return Err(Error::FitRejected(format!("non-positive decay rate {}", fit.lambda_hat)));
    }
    Ok(fit)
}
