//! Named, tolerance-parameterised checks over computed inputs.
//!
//! Every check returns a [`CheckResult`] whose verdict follows
//! `pass ⟺ slack ≥ −tolerance·scale` and whose `inputs` record what fed it.
//! Inequalities with explicit constants are tested literally; constants the
//! theory only proves to exist are fitted and tested for boundedness.

mod conditions;
mod report;

pub use conditions::{
    check_condition_ebar, check_condition_ebar_prime, consistency_prop43, euclidean_ondiag_decay,
    fit_condition_e_f, fit_condition_fk, fit_condition_lambda_f, ondiag_decay, ConditionFit, ConditionId, ConditionOptions,
    ConditionSample,
};
pub use report::{VerificationReport, REPORT_SCHEMA_VERSION};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::discrete::heat::SpectralDecayScan;
use crate::discrete::{DecayFit, HotSpots};
use crate::estimate::{ExpMomentEstimate, MomentEstimate, SurvivalCurve, TailFit};
use crate::param::ParameterFunction;
use crate::{Error, Result};

/// Inputs that fed a check, keyed by name.
pub type Provenance = BTreeMap<String, Value>;

/// Statistical tolerance: the larger of `se_multiple` standard errors and
/// `relative` of the compared quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub se_multiple: f64,
    pub relative: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            se_multiple: 3.0,
            relative: 0.05,
        }
    }
}

impl Tolerance {
    /// Relative tolerance for a quantity of size `value` with standard
    /// error `se`.
    pub fn relative_for(&self, se: f64, value: f64) -> f64 {
        let stat = if value.abs() > 0.0 {
            self.se_multiple * se / value.abs()
        } else {
            0.0
        };
        stat.max(self.relative)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs` in the check's orientation.
    pub slack: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub scale: f64,
    /// Mandatory checks decide the exit status of a verification run.
    #[serde(default = "default_true")]
    pub mandatory: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    pub inputs: Provenance,
}

fn default_true() -> bool {
    true
}

impl CheckResult {
    /// One-sided check `lhs ≤ rhs` up to `tolerance·scale`.
    pub fn new(check_id: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, scale: f64) -> Self {
        Self::with_slack(check_id, lhs, rhs, rhs - lhs, tolerance, scale)
    }

    /// Check with an explicitly oriented slack, e.g. `−|lhs − rhs|` for
    /// two-sided agreement.
    pub fn with_slack(
        check_id: impl Into<String>,
        lhs: f64,
        rhs: f64,
        slack: f64,
        tolerance: f64,
        scale: f64,
    ) -> Self {
        let pass = slack.is_finite() && slack >= -tolerance * scale;
        Self {
            check_id: check_id.into(),
            lhs,
            rhs,
            slack,
            pass,
            tolerance,
            scale,
            mandatory: true,
            fitted_constant: None,
            note: String::new(),
            inputs: Provenance::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn optional(mut self) -> Self {
        self.mandatory = false;
        self
    }

    pub fn renamed(mut self, check_id: impl Into<String>) -> Self {
        self.check_id = check_id.into();
        self
    }

    /// FNV-1a hash of the canonical JSON of `inputs`.
    pub fn inputs_hash(&self) -> u64 {
        let text = serde_json::to_string(&self.inputs).unwrap_or_default();
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h
    }

    /// Merge key: the check id plus the inputs hash.
    pub fn key(&self) -> String {
        format!("{}#{:016x}", self.check_id, self.inputs_hash())
    }
}

fn curve_inputs(curve: &SurvivalCurve) -> Value {
    json!({
        "n": curve.n,
        "t_max": curve.t_max,
        "grid": [curve.t.first(), curve.t.last(), curve.t.len()],
    })
}

fn empty_curve(check_id: &str) -> CheckResult {
    CheckResult::with_slack(check_id, f64::NAN, f64::NAN, f64::NAN, 0.0, 1.0).note("empty survival curve")
}

/// `e^{−λt} ≤ S(t)` at every grid time, where `S` is the survival curve
/// maximised over starting points. Reports the worst grid point.
pub fn check_lower_bound(curve: &SurvivalCurve, lambda: f64, tol: &Tolerance) -> CheckResult {
    let mut worst: Option<(usize, f64, f64)> = None;
    for i in 0..curve.t.len() {
        let lhs = (-lambda * curve.t[i]).exp();
        let rel = tol.relative_for(curve.se[i], lhs);
        let margin = (curve.s[i] - lhs) / lhs + rel;
        if worst.is_none_or(|w| margin < w.1) {
            worst = Some((i, margin, rel));
        }
    }
    let Some((i, _, rel)) = worst else {
        return empty_curve("lower_bound");
    };
    let lhs = (-lambda * curve.t[i]).exp();
    CheckResult::new("lower_bound", lhs, curve.s[i], rel, lhs)
        .input("lambda", lambda)
        .input("curve", curve_inputs(curve))
        .input("worst_t", curve.t[i])
}

/// `K(t) = S(t) e^{λt} / (1 + 2λt/d')^{d'}`.
pub fn envelope_constant(s: f64, t: f64, lambda: f64, dprime: f64) -> f64 {
    s * (lambda * t).exp() / (1.0 + 2.0 * lambda * t / dprime).powf(dprime)
}

/// Fits the envelope constant `K(t)` on the grid. Passes when `K` is finite
/// and its maximum over the last third of the grid does not exceed its
/// maximum over the first two thirds (no late blow-up). The fitted `K` is
/// the overall maximum.
pub fn check_envelope(curve: &SurvivalCurve, lambda: f64, dprime: f64, tol: &Tolerance) -> CheckResult {
    let n = curve.t.len();
    if n < 3 {
        return empty_curve("envelope").note("envelope check needs at least 3 grid times");
    }
    let k: Vec<f64> = (0..n)
        .map(|i| envelope_constant(curve.s[i], curve.t[i], lambda, dprime))
        .collect();
    let k_se: Vec<f64> = (0..n)
        .map(|i| envelope_constant(curve.se[i], curve.t[i], lambda, dprime))
        .collect();
    let split = (2 * n).div_ceil(3);
    let argmax = |r: std::ops::Range<usize>| r.max_by(|&a, &b| k[a].total_cmp(&k[b])).expect("nonempty");
    let (early, late) = (argmax(0..split), argmax(split..n));
    let rel = tol.relative_for(k_se[late], k[early]);
    let mut c = CheckResult::new("envelope", k[late], k[early], rel, k[early])
        .input("lambda", lambda)
        .input("dprime", dprime)
        .input("curve", curve_inputs(curve));
    if k.iter().any(|v| !v.is_finite()) {
        c.pass = false;
        c.note = "K(t) not finite".into();
    }
    c.fitted_constant = Some(k[early].max(k[late]));
    c
}

fn same_convention(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Lower half of the moment sandwich, `Γ(p+1) ≤ λ^p sup E[τ^p]`, for each
/// moment. The realised `C_p = λ^p sup E[τ^p]` is reported as the fitted
/// constant; its stability is tested by [`check_cp_stability`].
pub fn check_moment_sandwich(
    lambda: f64,
    lambda_generator_scale: f64,
    moments: &[MomentEstimate],
    tol: &Tolerance,
) -> Result<Vec<CheckResult>> {
    let mut out = Vec::with_capacity(moments.len());
    for m in moments {
        if !same_convention(m.generator_scale, lambda_generator_scale) {
            return Err(Error::Convention(format!(
                "lambda from generator_scale {lambda_generator_scale}, moment p = {} from {}",
                m.p, m.generator_scale
            )));
        }
        let lp = lambda.powf(m.p);
        let rhs = lp * m.value;
        let lhs = libm::tgamma(m.p + 1.0);
        let rel = tol.relative_for(lp * m.se, rhs);
        let mut c = CheckResult::new(format!("moment_sandwich_p{}", m.p), lhs, rhs, rel, rhs)
            .input("lambda", lambda)
            .input("generator_scale", lambda_generator_scale)
            .input("moment", m);
        c.fitted_constant = Some(rhs);
        out.push(c);
    }
    Ok(out)
}

/// Stability of a fitted constant across domains: `max/min ≤ cap`.
pub fn check_cp_stability(check_id: &str, values: &[(String, f64)], cap: f64) -> Result<CheckResult> {
    if values.len() < 2 {
        return Err(Error::InsufficientSample("stability needs at least two domains".into()));
    }
    let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let hi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let ratio = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    Ok(CheckResult::new(check_id, ratio, cap, 0.0, 1.0).input("values", values))
}

/// `λ ≥ a + a / (sup E[e^{aτ}] − 1)`.
pub fn check_exp_moment_bound(
    lambda: f64,
    lambda_generator_scale: f64,
    est: &ExpMomentEstimate,
    tol: &Tolerance,
) -> Result<CheckResult> {
    if est.unstable {
        return Err(Error::Unstable(format!(
            "E[exp({} tau)] dominated by its top 1% (share {:.3})",
            est.a, est.top_share
        )));
    }
    if !same_convention(est.generator_scale, lambda_generator_scale) {
        return Err(Error::Convention(format!(
            "lambda from generator_scale {lambda_generator_scale}, exponential moment from {}",
            est.generator_scale
        )));
    }
    if !(est.a > 0.0) || !(est.value > 1.0) {
        return Err(Error::Domain(format!(
            "need a > 0 and E[exp(a tau)] > 1, got a = {}, value = {}",
            est.a, est.value
        )));
    }
    let d = est.value - 1.0;
    let bound = est.a + est.a / d;
    let se = est.a / (d * d) * est.se;
    let rel = tol.relative_for(se, lambda);
    Ok(CheckResult::new("exp_moment_bound", bound, lambda, rel, lambda)
        .input("lambda", lambda)
        .input("exp_moment", est))
}

/// `|λ̂_tail − λ| ≤ rel_tol · λ`.
pub fn check_asymptotic(tail: &TailFit, lambda_eigen: f64, rel_tol: f64) -> CheckResult {
    let d = (tail.lambda_hat - lambda_eigen).abs();
    CheckResult::with_slack("asymptotic", tail.lambda_hat, lambda_eigen, -d, rel_tol, lambda_eigen)
        .input("tail", tail)
        .input("lambda_eigen", lambda_eigen)
}

/// On-diagonal decay exponent against `α/β` of the parameter function,
/// within `abs_tol`.
pub fn check_envelope_shape(decay: &DecayFit, alpha: f64, pf: &ParameterFunction, abs_tol: f64) -> CheckResult {
    let target = alpha / pf.beta();
    let d = (decay.exponent - target).abs();
    CheckResult::with_slack("envelope_shape", decay.exponent, target, -d, abs_tol, 1.0)
        .input("decay", decay)
        .input("alpha", alpha)
        .input("parameter_function", pf)
}

/// `p(x,x,t) ≤ e^{−(1−ε)λt} p(x,x,εt)` with zero violations.
pub fn check_spectral_decay(check_id: &str, scan: &SpectralDecayScan) -> CheckResult {
    CheckResult::new(check_id, scan.violations as f64, 0.0, 0.0, 1.0)
        .input("checked", scan.checked)
        .input("worst_ratio", scan.worst_ratio)
}

/// `sup φ₂ / sup_rim φ₂ ≤ bound`.
pub fn check_hot_spots(hs: &HotSpots, bound: f64) -> CheckResult {
    CheckResult::new("hot_spots", hs.ratio, bound, 0.0, 1.0).input("hot_spots", hs)
}

/// Two-sided relative agreement of a computed value with a reference.
pub fn check_agreement(check_id: &str, value: f64, reference: f64, rel_tol: f64) -> CheckResult {
    let d = (value - reference).abs();
    CheckResult::with_slack(check_id, value, reference, -d, rel_tol, reference.abs())
}

/// Names of the survival-suite checks, in run order.
pub const SURVIVAL_SUITE: [&str; 5] = ["lower_bound", "envelope", "moment_sandwich", "exp_moment", "asymptotic"];

/// Everything the survival suite consumes for one domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteInputs {
    pub label: String,
    /// Survival curve maximised over the start set.
    pub curve: SurvivalCurve,
    pub lambda: f64,
    pub lambda_source: String,
    pub generator_scale: f64,
    pub dprime: f64,
    pub moments: Vec<MomentEstimate>,
    pub exp_moments: Vec<ExpMomentEstimate>,
    pub tail: Option<TailFit>,
    /// Eigensolver value for the asymptotic comparison.
    pub lambda_eigen: Option<f64>,
}

/// Runs the selected survival checks. `perturb` divides the rate used by
/// the lower bound, a negative control when above 1.
pub fn survival_suite(
    inputs: &SuiteInputs,
    suite: &[String],
    tol: &Tolerance,
    perturb: f64,
) -> Result<VerificationReport> {
    if suite.is_empty() {
        return Err(Error::Precondition("empty check suite".into()));
    }
    if let Some(bad) = suite.iter().find(|s| !SURVIVAL_SUITE.contains(&s.as_str())) {
        return Err(Error::Precondition(format!(
            "unknown check {bad:?}; expected one of {SURVIVAL_SUITE:?}"
        )));
    }
    let tag = |c: CheckResult| {
        c.input("domain", &inputs.label)
            .input("lambda_source", &inputs.lambda_source)
    };
    let mut report = VerificationReport::new(inputs.label.clone());
    for name in suite {
        match name.as_str() {
            "lower_bound" => {
                let c = check_lower_bound(&inputs.curve, inputs.lambda / perturb, tol);
                report.checks.push(tag(c).input("perturb_lambda", perturb));
            }
            "envelope" => {
                report.checks.push(tag(check_envelope(&inputs.curve, inputs.lambda, inputs.dprime, tol)));
            }
            "moment_sandwich" => {
                if inputs.moments.is_empty() {
                    return Err(Error::MissingInput("moment estimates".into()));
                }
                for c in check_moment_sandwich(inputs.lambda, inputs.generator_scale, &inputs.moments, tol)? {
                    report.checks.push(tag(c));
                }
            }
            "exp_moment" => {
                if inputs.exp_moments.is_empty() {
                    return Err(Error::MissingInput("exponential moment estimates".into()));
                }
                for e in &inputs.exp_moments {
                    let c = check_exp_moment_bound(inputs.lambda, inputs.generator_scale, e, tol)?;
                    report.checks.push(tag(c.renamed(format!("exp_moment_bound_a{}", e.a))));
                }
            }
            "asymptotic" => {
                let tail = inputs
                    .tail
                    .as_ref()
                    .ok_or_else(|| Error::MissingInput("tail fit".into()))?;
                let lambda = inputs
                    .lambda_eigen
                    .ok_or_else(|| Error::MissingInput("eigensolver lambda".into()))?;
                report.checks.push(tag(check_asymptotic(tail, lambda, tol.relative)));
            }
            _ => unreachable!(),
        }
    }
    Ok(report)
}
