use serde::{Deserialize, Serialize};

use crate::sampler::ExitBatch;
use crate::{Error, Result};

/// Empirical `P(τ > t)` on a time grid with binomial standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    pub se: Vec<f64>,
    pub n_at_risk: Vec<usize>,
    pub n: usize,
    pub t_max: f64,
}

/// `k` equally spaced times in `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![hi];
    }
    (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
}

fn binomial_se(s: f64, n: usize) -> f64 {
    (s * (1.0 - s) / n as f64).sqrt()
}

/// Censored paths count as surviving at every grid time, since every grid
/// time is at most `t_max`.
pub fn survival_curve(batch: &ExitBatch, grid: &[f64]) -> Result<SurvivalCurve> {
    let n = batch.records.len();
    if n == 0 {
        return Err(Error::InsufficientSample("empty batch".into()));
    }
    let t_max = batch.config.t_max;
    if let Some(&bad) = grid.iter().find(|&&t| !(t > 0.0 && t <= t_max)) {
        return Err(Error::Precondition(format!("grid time {bad} outside (0, t_max = {t_max}]")));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Precondition("grid must be strictly increasing".into()));
    }
    let mut exits: Vec<f64> = batch.records.iter().filter(|r| r.exited).map(|r| r.tau).collect();
    exits.sort_by(|a, b| a.total_cmp(b));
    let mut out = SurvivalCurve {
        t: grid.to_vec(),
        s: Vec::with_capacity(grid.len()),
        se: Vec::with_capacity(grid.len()),
        n_at_risk: Vec::with_capacity(grid.len()),
        n,
        t_max,
    };
    for &t in grid {
        let gone = exits.partition_point(|&x| x <= t);
        let alive = n - gone;
        let s = alive as f64 / n as f64;
        out.s.push(s);
        out.se.push(binomial_se(s, n));
        out.n_at_risk.push(alive);
    }
    Ok(out)
}

impl SurvivalCurve {
    /// Noiseless curve from a closed form, with standard errors as if it had
    /// been estimated from `n` paths.
    pub fn from_function(grid: &[f64], n: usize, f: impl Fn(f64) -> f64) -> Self {
        let s: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
        Self {
            t: grid.to_vec(),
            se: s.iter().map(|&v| binomial_se(v.clamp(0.0, 1.0), n)).collect(),
            n_at_risk: s.iter().map(|&v| (v * n as f64).round() as usize).collect(),
            s,
            n,
            t_max: grid.last().copied().unwrap_or(0.0),
        }
    }

    /// Pointwise maximum over curves sharing one grid; stands in for the
    /// essential supremum over starting points.
    pub fn pointwise_max(curves: &[SurvivalCurve]) -> Result<SurvivalCurve> {
        let first = curves
            .first()
            .ok_or_else(|| Error::InsufficientSample("no curves to combine".into()))?;
        if curves.iter().any(|c| c.t != first.t) {
            return Err(Error::Precondition("curves must share one time grid".into()));
        }
        let mut out = first.clone();
        for c in &curves[1..] {
            for i in 0..out.t.len() {
                if c.s[i] > out.s[i] {
                    out.s[i] = c.s[i];
                    out.se[i] = c.se[i];
                    out.n_at_risk[i] = c.n_at_risk[i];
                }
            }
        }
        out.n = curves.iter().map(|c| c.n).min().unwrap_or(0);
        Ok(out)
    }

    pub fn write_csv(&self, mut out: impl std::io::Write) -> Result<()> {
        writeln!(out, "# exitlab-survival v1")?;
        writeln!(out, "t,S,se,n_at_risk")?;
        for i in 0..self.t.len() {
            writeln!(out, "{},{},{},{}", self.t[i], self.s[i], self.se[i], self.n_at_risk[i])?;
        }
        Ok(())
    }
}
