//! Space-time scaling functions.
//!
//! A parameter function `F` is a continuous increasing bijection of
//! `(0, ∞)` with two-sided power control
//!
//! ```text
//! C_F^{-1} (R/r)^β ≤ F(R)/F(r) ≤ C_F (R/r)^β'      0 < r ≤ R
//! ```
//!
//! `F(r)` is the time the diffusion needs to travel distance `r`; the
//! Gaussian case is `F(r) = r²`, the Sierpinski gasket has
//! `F(r) = r^{log 5 / log 2}`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Golden-section search bracket for `Φ`, in native length units.
pub const PHI_BRACKET: (f64, f64) = (1e-9, 1e9);
const PHI_REL_TOL: f64 = 1e-10;
const PHI_SCAN_PER_DECADE: usize = 40;

/// Walk dimension of the Sierpinski gasket, `log 5 / log 2`.
pub fn gasket_walk_dimension() -> f64 {
    5f64.ln() / 2f64.ln()
}

/// Hausdorff dimension of the Sierpinski gasket, `log 3 / log 2`.
pub fn gasket_hausdorff_dimension() -> f64 {
    3f64.ln() / 2f64.ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParameterFunction {
    /// `F(r) = r^β`.
    Power { beta: f64 },
    /// `F(r) = r^below` for `r < breakpoint` and continued by
    /// `breakpoint^below · (r/breakpoint)^above` above it.
    PiecewisePower {
        breakpoint: f64,
        below: f64,
        above: f64,
    },
}

impl ParameterFunction {
    pub fn power(beta: f64) -> Result<Self> {
        let pf = ParameterFunction::Power { beta };
        pf.validate()?;
        Ok(pf)
    }

    pub fn piecewise(breakpoint: f64, below: f64, above: f64) -> Result<Self> {
        let pf = ParameterFunction::PiecewisePower {
            breakpoint,
            below,
            above,
        };
        pf.validate()?;
        Ok(pf)
    }

    /// The fractal-like manifold profile: Gaussian below unit scale, gasket
    /// scaling above it.
    pub fn fractal_manifold() -> Self {
        ParameterFunction::PiecewisePower {
            breakpoint: 1.0,
            below: 2.0,
            above: gasket_walk_dimension(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ParameterFunction::Power { beta } => {
                if !(beta >= 1.0 && beta.is_finite()) {
                    return Err(Error::Domain(format!("exponent beta = {beta} must be >= 1")));
                }
            }
            ParameterFunction::PiecewisePower {
                breakpoint,
                below,
                above,
            } => {
                if !(breakpoint > 0.0 && breakpoint.is_finite()) {
                    return Err(Error::Domain(format!(
                        "breakpoint = {breakpoint} must be positive"
                    )));
                }
                for (name, e) in [("below", below), ("above", above)] {
                    if !(e >= 1.0 && e.is_finite()) {
                        return Err(Error::Domain(format!("exponent {name} = {e} must be >= 1")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Lower regularity exponent β.
    pub fn beta(&self) -> f64 {
        match *self {
            ParameterFunction::Power { beta } => beta,
            ParameterFunction::PiecewisePower { below, above, .. } => below.min(above),
        }
    }

    /// Upper regularity exponent β'.
    pub fn beta_prime(&self) -> f64 {
        match *self {
            ParameterFunction::Power { beta } => beta,
            ParameterFunction::PiecewisePower { below, above, .. } => below.max(above),
        }
    }

    /// Regularity constant `C_F`, certified on a log grid spanning twelve
    /// decades around the breakpoint.
    pub fn regularity_constant(&self) -> f64 {
        let (lo, hi) = match *self {
            ParameterFunction::Power { .. } => return 1.0,
            ParameterFunction::PiecewisePower { breakpoint, .. } => {
                (breakpoint * 1e-6, breakpoint * 1e6)
            }
        };
        let (b, bp) = (self.beta(), self.beta_prime());
        let n = 241;
        let grid: Vec<f64> = (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect();
        let vals: Vec<f64> = grid.iter().map(|&r| self.eval_unchecked(r)).collect();
        let mut c: f64 = 1.0;
        for i in 0..n {
            for j in i..n {
                let ratio = vals[j] / vals[i];
                let q = grid[j] / grid[i];
                c = c.max(q.powf(b) / ratio).max(ratio / q.powf(bp));
            }
        }
        // absorb rounding in the ratios
        if c < 1.0 + 1e-9 {
            1.0
        } else {
            c
        }
    }

    fn eval_unchecked(&self, r: f64) -> f64 {
        match *self {
            ParameterFunction::Power { beta } => r.powf(beta),
            ParameterFunction::PiecewisePower {
                breakpoint,
                below,
                above,
            } => {
                if r < breakpoint {
                    r.powf(below)
                } else {
                    breakpoint.powf(below) * (r / breakpoint).powf(above)
                }
            }
        }
    }

    /// `F(r)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || r.is_nan() {
            return Err(Error::Domain(format!("F(r) requires r > 0, got {r}")));
        }
        Ok(self.eval_unchecked(r))
    }

    /// `R(t) = F^{-1}(t)`.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || t.is_nan() {
            return Err(Error::Domain(format!("F^-1(t) requires t > 0, got {t}")));
        }
        Ok(match *self {
            ParameterFunction::Power { beta } => t.powf(1.0 / beta),
            ParameterFunction::PiecewisePower {
                breakpoint,
                below,
                above,
            } => {
                let t0 = breakpoint.powf(below);
                if t < t0 {
                    t.powf(1.0 / below)
                } else {
                    breakpoint * (t / t0).powf(1.0 / above)
                }
            }
        })
    }

    /// `Φ(s) = sup_{r>0} { s/r − 1/F(r) }`.
    ///
    /// Power laws use the closed-form maximiser; piecewise laws scan a log
    /// grid over [`PHI_BRACKET`] and refine the best cell by golden section.
    pub fn phi(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("Phi(s) requires s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        match *self {
            ParameterFunction::Power { beta } => Ok(phi_power(beta, s)),
            ParameterFunction::PiecewisePower { .. } => Ok(self.phi_numeric(s)),
        }
    }

    fn phi_numeric(&self, s: f64) -> f64 {
        let objective = |log_r: f64| {
            let r = log_r.exp();
            s / r - 1.0 / self.eval_unchecked(r)
        };
        let (lo, hi) = (PHI_BRACKET.0.ln(), PHI_BRACKET.1.ln());
        let decades = (PHI_BRACKET.1 / PHI_BRACKET.0).log10();
        let n = (decades * PHI_SCAN_PER_DECADE as f64).ceil() as usize;
        let step = (hi - lo) / n as f64;
        let mut best = (lo, objective(lo));
        for i in 1..=n {
            let x = lo + step * i as f64;
            let v = objective(x);
            if v > best.1 {
                best = (x, v);
            }
        }
        let a = (best.0 - step).max(lo);
        let b = (best.0 + step).min(hi);
        let (_, v) = golden_section_max(objective, a, b, PHI_REL_TOL);
        v.max(best.1)
    }
}

fn phi_power(beta: f64, s: f64) -> f64 {
    if beta == 1.0 {
        // sup_u (s - 1) u
        return if s <= 1.0 { 0.0 } else { f64::INFINITY };
    }
    // u = 1/r, maximise s u − u^β at u* = (s/β)^{1/(β−1)}
    let u = (s / beta).powf(1.0 / (beta - 1.0));
    s * (1.0 - 1.0 / beta) * u
}

/// Golden-section maximisation of a unimodal function on `[a, b]`.
pub(crate) fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if (b - a).abs() <= rel_tol * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Constants of the sub-Gaussian upper estimate and of volume doubling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams {
    #[serde(rename = "C_UE")]
    pub prefactor: f64,
    #[serde(rename = "c_UE")]
    pub spread: f64,
    pub alpha: f64,
    #[serde(rename = "C_alpha")]
    pub doubling: f64,
}

impl EnvelopeParams {
    pub fn new(prefactor: f64, spread: f64, alpha: f64, doubling: f64) -> Result<Self> {
        for (name, v) in [
            ("C_UE", prefactor),
            ("c_UE", spread),
            ("alpha", alpha),
            ("C_alpha", doubling),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} = {v} must be positive")));
            }
        }
        Ok(Self {
            prefactor,
            spread,
            alpha,
            doubling,
        })
    }
}

/// Heat-kernel upper envelope
/// `C_UE / vol · exp(−½ t Φ(c_UE · dist / t))`, where `vol` stands for
/// `V(x, R(t))`.
pub fn ue_envelope(
    pf: &ParameterFunction,
    env: &EnvelopeParams,
    vol: f64,
    dist: f64,
    t: f64,
) -> Result<f64> {
    if !(vol > 0.0) {
        return Err(Error::Domain(format!("volume must be positive, got {vol}")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    if !(dist >= 0.0) {
        return Err(Error::Domain(format!("distance must be non-negative, got {dist}")));
    }
    let phi = pf.phi(env.spread * dist / t)?;
    Ok(env.prefactor / vol * (-0.5 * t * phi).exp())
}

/// Polynomial exponent of the survival envelope,
/// `d' = max(α(β'−1)/β, α/β)`.
pub fn exponent_dprime(alpha: f64, beta: f64, beta_prime: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    if !(beta >= 1.0 && beta_prime >= beta) {
        return Err(Error::Domain(format!(
            "need 1 <= beta <= beta_prime, got beta = {beta}, beta_prime = {beta_prime}"
        )));
    }
    Ok((alpha * (beta_prime - 1.0) / beta).max(alpha / beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    // brute-force sup over a dense log grid, independent of the golden search
    fn phi_grid_oracle(pf: &ParameterFunction, s: f64) -> f64 {
        let n = 400_000;
        let (lo, hi) = (1e-6f64.ln(), 1e6f64.ln());
        (0..=n)
            .map(|i| {
                let r = (lo + (hi - lo) * i as f64 / n as f64).exp();
                s / r - 1.0 / pf.eval(r).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn eval_examples() {
        let sq = ParameterFunction::power(2.0).unwrap();
        assert_eq!(sq.eval(3.0).unwrap(), 9.0);
        let g = ParameterFunction::power(gasket_walk_dimension()).unwrap();
        assert!(close(g.eval(2.0).unwrap(), 5.0, 1e-14));
        let pw = ParameterFunction::fractal_manifold();
        assert!(close(pw.eval(4.0).unwrap(), 25.0, 1e-13));
        assert!(close(pw.eval(0.5).unwrap(), 0.25, 1e-15));
        assert!(matches!(sq.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(sq.eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn piecewise_is_continuous_at_breakpoint() {
        let pw = ParameterFunction::piecewise(3.0, 2.0, 2.5).unwrap();
        let left = pw.eval(3.0 * (1.0 - 1e-12)).unwrap();
        let right = pw.eval(3.0).unwrap();
        assert!(close(left, right, 1e-10));
    }

    #[test]
    fn inverse_examples() {
        let sq = ParameterFunction::power(2.0).unwrap();
        assert_eq!(sq.inverse(9.0).unwrap(), 3.0);
        assert_eq!(sq.inverse(1.0).unwrap(), 1.0);
        let pw = ParameterFunction::fractal_manifold();
        assert!(close(pw.inverse(25.0).unwrap(), 4.0, 1e-13));
        assert!(close(pw.inverse(0.25).unwrap(), 0.5, 1e-14));
        assert!(matches!(sq.inverse(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_closed_form_examples() {
        let sq = ParameterFunction::power(2.0).unwrap();
        assert_eq!(sq.phi(0.0).unwrap(), 0.0);
        assert!(close(sq.phi(1.0).unwrap(), 0.25, 1e-14));
        assert!(close(sq.phi(2.0).unwrap(), 1.0, 1e-14));
        assert!(matches!(sq.phi(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_matches_grid_oracle() {
        let beta = gasket_walk_dimension();
        let p = ParameterFunction::power(beta).unwrap();
        let pw = ParameterFunction::fractal_manifold();
        for &s in &[0.05, 0.3, 1.0, 2.0, 7.5] {
            assert!(close(p.phi(s).unwrap(), phi_grid_oracle(&p, s), 1e-6), "power s={s}");
            assert!(close(pw.phi(s).unwrap(), phi_grid_oracle(&pw, s), 1e-6), "piecewise s={s}");
        }
    }

    #[test]
    fn piecewise_phi_agrees_with_power_when_branches_coincide() {
        let pw = ParameterFunction::piecewise(1.0, 2.0, 2.0).unwrap();
        for &s in &[0.01, 0.5, 3.0, 40.0] {
            assert!(close(pw.phi(s).unwrap(), s * s / 4.0, 1e-9), "s={s}");
        }
    }

    #[test]
    fn ue_envelope_examples() {
        let sq = ParameterFunction::power(2.0).unwrap();
        let env = EnvelopeParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(ue_envelope(&sq, &env, 1.0, 0.0, 1.0).unwrap(), 1.0);
        let v = ue_envelope(&sq, &env, 1.0, 2.0, 1.0).unwrap();
        assert!(close(v, (-0.5f64).exp(), 1e-14));
        let env = EnvelopeParams::new(1.0, 0.7, 1.0, 1.0).unwrap();
        let (d, t) = (1.3, 0.4);
        let ratio = ue_envelope(&sq, &env, 2.0, d, t).unwrap() / ue_envelope(&sq, &env, 2.0, 0.0, t).unwrap();
        assert!(close(ratio, (-(0.7f64 * d).powi(2) / (8.0 * t)).exp(), 1e-13));
    }

    #[test]
    fn dprime_examples() {
        for d in 1..6 {
            assert_eq!(exponent_dprime(d as f64, 2.0, 2.0).unwrap(), d as f64 / 2.0);
        }
        let b = gasket_walk_dimension();
        let v = exponent_dprime(gasket_hausdorff_dimension(), b, b).unwrap();
        let expected = gasket_hausdorff_dimension() * (b - 1.0) / b;
        assert!(close(v, expected, 1e-15));
        assert!((v - 0.9024).abs() < 5e-5);
        assert_eq!(exponent_dprime(4.0, 2.0, 2.0).unwrap(), 2.0);
        assert!(exponent_dprime(1.0, 2.0, 1.5).is_err());
    }

    #[test]
    fn regularity_constant_of_continuous_piecewise_is_one() {
        assert_eq!(ParameterFunction::fractal_manifold().regularity_constant(), 1.0);
        assert_eq!(ParameterFunction::power(3.0).unwrap().regularity_constant(), 1.0);
    }
}
