//! Acceptance criteria, one printed verdict per criterion.
//!
//! Runs as a plain binary (`harness = false`) so every line shows up in
//! `cargo test` output. Exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use exitlab::discrete::{
    build_gasket_graph, build_grid_graph, dirichlet_lambda, gasket_level_ratios, gasket_ondiag_decay, hot_spots,
    BoundaryCondition, EigenOptions, HeatKernel,
};
use exitlab::estimate::{
    exp_moment, moment, survival_curve, tail_slope, uniform_grid, walk_dimension_fit, SurvivalCurve, TailWindow,
    DEFAULT_CENSOR_THRESHOLD,
};
use exitlab::layercake::{check_layercake, RadialProfile};
use exitlab::param::{gasket_walk_dimension, ParameterFunction};
use exitlab::sampler::{levy_area_samples, run_batch, ExitBatch, SimConfig};
use exitlab::space::{DomainSpec, GasketRegion, SpaceSpec};
use exitlab::verify::{
    check_agreement, check_asymptotic, check_condition_ebar, check_condition_ebar_prime, check_envelope,
    check_envelope_shape, check_hot_spots, check_lower_bound, check_moment_sandwich, check_spectral_decay,
    consistency_prop43, fit_condition_e_f, fit_condition_fk, fit_condition_lambda_f, ondiag_decay, survival_suite,
    CheckResult, ConditionFit, ConditionOptions, SuiteInputs, Tolerance, SURVIVAL_SUITE,
};
use exitlab::{Result, BESSEL_J0_FIRST_ZERO, BESSEL_J1_PRIME_FIRST_ZERO};

const INTERVAL_LAMBDA: f64 = PI * PI / 8.0;

struct Verdicts {
    failed: usize,
}

impl Verdicts {
    fn line(&mut self, id: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("[{}] {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    }

    fn info(&self, id: &str, detail: String) {
        println!("[INFO] {id}: {detail}");
    }

    fn guard(&mut self, id: &str, r: Result<()>) {
        if let Err(e) = r {
            self.line(id, false, format!("error: {e}"));
        }
    }
}

/// Exact interval survival from the center, `(4/π) Σ (−1)^k/(2k+1) e^{−λ_k t}`.
fn interval_survival(t: f64) -> f64 {
    (0..200)
        .map(|k| {
            let n = (2 * k + 1) as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign / n * (-n * n * INTERVAL_LAMBDA * t).exp()
        })
        .sum::<f64>()
        * 4.0
        / PI
}

struct IntervalRun {
    batch: ExitBatch,
    seconds: f64,
    lambda: f64,
}

fn interval_run() -> Result<IntervalRun> {
    let cfg = SimConfig::new(1e-4, 20.0, 100_000, 1);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool");
    let start = Instant::now();
    let batch = pool.install(|| run_batch(&SpaceSpec::euclidean(1), &DomainSpec::interval(-1.0, 1.0), &[0.0], &cfg))?;
    let seconds = start.elapsed().as_secs_f64();
    let g = build_grid_graph(&DomainSpec::interval(-1.0, 1.0), 5e-4, BoundaryCondition::Dirichlet, 1.0)?;
    let lambda = dirichlet_lambda(&g, &EigenOptions::default())?.eigenvalue;
    Ok(IntervalRun { batch, seconds, lambda })
}

fn criterion_1(v: &mut Verdicts, run: &IntervalRun) {
    let m = moment(&run.batch, 1.0, DEFAULT_CENSOR_THRESHOLD).expect("moment");
    let pass = (m.value - 1.0).abs() <= 0.01 && run.seconds < 30.0;
    v.line(
        "1 interval mean exit",
        pass,
        format!(
            "E[tau] = {:.5} (se {:.5}, oracle 1 +/- 1%), {} paths in {:.1} s single-threaded (limit 30 s)",
            m.value,
            m.se,
            run.batch.len(),
            run.seconds
        ),
    );
}

fn criterion_2(v: &mut Verdicts, run: &IntervalRun) -> Result<()> {
    let curve = survival_curve(&run.batch, &uniform_grid(0.05, 8.0, 400))?;
    let tail = tail_slope(&curve, &TailWindow::default())?;
    let eig = check_agreement("eigen", run.lambda, INTERVAL_LAMBDA, 0.005);
    let tl = check_agreement("tail", tail.lambda_hat, INTERVAL_LAMBDA, 0.05);
    let asym = check_asymptotic(&tail, run.lambda, Tolerance::default().relative);
    v.line(
        "2 spectral agreement",
        eig.pass && tl.pass && asym.pass,
        format!(
            "grid lambda = {:.6} (pi^2/8 = {:.6}, 0.5%), tail lambda = {:.4} +/- {:.4} (5%), asymptotic {}",
            run.lambda,
            INTERVAL_LAMBDA,
            tail.lambda_hat,
            tail.se,
            if asym.pass { "passes" } else { "fails" }
        ),
    );
    Ok(())
}

fn criterion_3(v: &mut Verdicts, run: &IntervalRun) -> Result<()> {
    let moments = [
        moment(&run.batch, 1.0, DEFAULT_CENSOR_THRESHOLD)?,
        moment(&run.batch, 2.0, DEFAULT_CENSOR_THRESHOLD)?,
    ];
    let sandwich = check_moment_sandwich(run.lambda, 1.0, &moments, &Tolerance::default())?;
    // E_0[τ] = 1 and E_0[τ²] = 5/3 from the cosh/sech moment expansion
    let exact = [INTERVAL_LAMBDA, INTERVAL_LAMBDA * INTERVAL_LAMBDA * 5.0 / 3.0];
    let mut pass = sandwich.iter().all(|c| c.pass);
    let mut parts = Vec::new();
    for ((m, c), e) in moments.iter().zip(&sandwich).zip(exact) {
        let cp = c.fitted_constant.unwrap_or(f64::NAN);
        let agree = check_agreement("cp", cp, e, 0.03);
        pass &= agree.pass;
        parts.push(format!(
            "p={}: lambda^p E = {:.4} (analytic {:.4}, 3%) >= Gamma(p+1) = {}",
            m.p,
            cp,
            e,
            c.lhs
        ));
    }
    v.line("3 moment sandwich", pass, parts.join("; "));
    Ok(())
}

fn criterion_4(v: &mut Verdicts, run: &IntervalRun) -> Result<()> {
    let curve = survival_curve(&run.batch, &uniform_grid(0.1, 3.0, 59))?;
    let tol = Tolerance::default();
    let lb = check_lower_bound(&curve, run.lambda, &tol);
    let control = check_lower_bound(&curve, run.lambda / 1.2, &tol);
    let literal = check_lower_bound(&curve, run.lambda * 1.2, &tol);
    v.line(
        "4 lower bound",
        lb.pass && !control.pass,
        format!(
            "e^(-lambda t) <= S(t) on [0.1, 3]: worst slack {:.3e}; negative control (rate lambda/1.2) {} with slack {:.3e}",
            lb.slack,
            if control.pass { "passes" } else { "fails" },
            control.slack
        ),
    );
    v.info(
        "4 lower bound",
        format!(
            "rate lambda*1.2 weakens the bound and {} (slack {:.3e})",
            if literal.pass { "passes" } else { "fails" },
            literal.slack
        ),
    );
    // the estimate tracks the exact series, so the lower bound is not an artefact of noise
    let worst = curve
        .t
        .iter()
        .zip(&curve.s)
        .map(|(&t, &s)| (s - interval_survival(t)).abs())
        .fold(0.0, f64::max);
    v.info("4 lower bound", format!("max |S_mc - S_exact| on the grid = {worst:.4}"));
    Ok(())
}

fn envelope_line(v: &mut Verdicts, label: &str, curve: &SurvivalCurve, lambda: f64, dprime: f64) -> bool {
    let c = check_envelope(curve, lambda, dprime, &Tolerance::default());
    v.info(
        "5 envelope",
        format!(
            "{label}: d' = {dprime:.4}, lambda = {lambda:.4}, K = {:.4}, late max {:.4} vs early max {:.4} -> {}",
            c.fitted_constant.unwrap_or(f64::NAN),
            c.lhs,
            c.rhs,
            if c.pass { "bounded" } else { "late blow-up" }
        ),
    );
    c.pass
}

struct HeisenbergRun {
    batch: ExitBatch,
    curve: SurvivalCurve,
}

fn heisenberg_run() -> Result<HeisenbergRun> {
    let mut cfg = SimConfig::new(1e-3, 20.0, 100_000, 7);
    cfg.substeps = 4;
    let batch = run_batch(&SpaceSpec::heisenberg(1), &DomainSpec::koranyi_ball(vec![0.0; 3], 1.0), &[0.0; 3], &cfg)?;
    let curve = survival_curve(&batch, &uniform_grid(0.02, 2.0, 100))?;
    Ok(HeisenbergRun { batch, curve })
}

fn criterion_5(v: &mut Verdicts, run: &IntervalRun, heis: &HeisenbergRun) -> Result<()> {
    let interval = survival_curve(&run.batch, &uniform_grid(0.1, 3.0, 59))?;
    let mut pass = envelope_line(v, "interval", &interval, run.lambda, 0.5);

    let disk = DomainSpec::ball(vec![0.0, 0.0], 1.0);
    let g = build_grid_graph(&disk, 1.0 / 64.0, BoundaryCondition::Dirichlet, 1.0)?;
    let disk_lambda = dirichlet_lambda(&g, &EigenOptions::default())?.eigenvalue;
    let batch = run_batch(&SpaceSpec::euclidean(2), &disk, &[0.0, 0.0], &SimConfig::new(1e-4, 3.0, 20_000, 3))?;
    let curve = survival_curve(&batch, &uniform_grid(0.05, 1.5, 59))?;
    pass &= envelope_line(v, "disk", &curve, disk_lambda, 1.0);

    let tail = tail_slope(&heis.curve, &TailWindow::default())?;
    pass &= envelope_line(v, "Koranyi ball", &heis.curve, tail.lambda_hat, 2.0);

    let gasket = build_gasket_graph(4)?;
    let hk = HeatKernel::new(&gasket)?;
    let lambda = hk.bottom();
    let interior = gasket.interior_vertices();
    let grid = uniform_grid(0.05 / lambda, 5.0 / lambda, 60);
    let sup = |t: f64| {
        interior
            .iter()
            .map(|&x| hk.survival(x, t).expect("interior vertex"))
            .fold(0.0, f64::max)
    };
    let curve = SurvivalCurve::from_function(&grid, usize::MAX, sup);
    let dprime = exitlab::param::exponent_dprime(3f64.ln() / 2f64.ln(), gasket_walk_dimension(), gasket_walk_dimension())?;
    pass &= envelope_line(v, "gasket m=4", &curve, lambda, dprime);

    v.line("5 envelope", pass, "K(t) bounded without late blow-up on all four domains".into());
    Ok(())
}

fn criterion_6(v: &mut Verdicts) -> Result<()> {
    let start = Instant::now();
    let levels = gasket_level_ratios(2..=7)?;
    let seconds = start.elapsed().as_secs_f64();
    let ratios: Vec<(u32, f64)> = levels.iter().filter_map(|l| l.step_ratio.map(|r| (l.level, r))).collect();
    let ratio_pass = ratios.iter().all(|&(_, r)| (r / 5.0 - 1.0).abs() <= 0.02) && seconds < 60.0;
    v.line(
        "6 gasket level ratio",
        ratio_pass,
        format!(
            "{} (5 +/- 2%), exact solves in {seconds:.1} s (limit 60 s)",
            ratios.iter().map(|(m, r)| format!("m={m}: {r:.4}")).collect::<Vec<_>>().join(", ")
        ),
    );

    let radii: Vec<f64> = (1..=6).map(|k| 0.5f64.powi(k)).collect();
    let fit = walk_dimension_fit(&SpaceSpec::gasket(8), &[0.5, 0.0], &radii, &SimConfig::new(1e-3, 1.0, 1, 1))?;
    let beta = gasket_walk_dimension();
    v.line(
        "6 gasket walk dimension",
        (fit.beta_hat - 2.3219).abs() <= 0.05,
        format!("beta_hat = {:.4} (2.3219 +/- 0.05, log5/log2 = {beta:.4})", fit.beta_hat),
    );

    let decay = gasket_ondiag_decay(&[7], None)?.remove(0);
    let target = 3f64.ln() / 5f64.ln();
    v.line(
        "6 gasket on-diagonal decay",
        (decay.exponent - 0.6826).abs() <= 0.05,
        format!(
            "exponent = {:.4} at m=7 over t in [{:.2e}, {:.2e}] (0.6826 +/- 0.05, log3/log5 = {target:.4})",
            decay.exponent, decay.window.0, decay.window.1
        ),
    );
    Ok(())
}

fn criterion_7(v: &mut Verdicts, heis: &HeisenbergRun) -> Result<()> {
    let k = 200;
    let areas = levy_area_samples(1_000_000, 1.0, 1.0, k, 11)?;
    let n = areas.len() as f64;
    let mean = areas.iter().sum::<f64>() / n;
    let var = areas.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0);
    v.line(
        "7 Levy area variance",
        (var - 1.0).abs() <= 0.02,
        format!("Var(A_1) = {var:.4} over 1e6 paths with {k} sub-steps (1 +/- 2%)"),
    );

    let tail = tail_slope(&heis.curve, &TailWindow::default())?;
    let e = moment(&heis.batch, 1.0, DEFAULT_CENSOR_THRESHOLD)?;
    let prod = tail.lambda_hat * e.value;
    let se = prod * ((tail.se / tail.lambda_hat).powi(2) + (e.se / e.value).powi(2)).sqrt();
    let c = CheckResult::new("heisenberg_sandwich", 1.0, prod, 3.0 * se / prod, prod);
    v.line(
        "7 Heisenberg moment sandwich",
        c.pass,
        format!(
            "lambda_tail = {:.4} +/- {:.4}, E[tau] = {:.4} +/- {:.4}, product {prod:.4} +/- {se:.4} >= 1 within 3 se",
            tail.lambda_hat, tail.se, e.value, e.se
        ),
    );

    let mut cfg = SimConfig::new(1e-3, 20.0, 10_000, 21);
    cfg.substeps = 4;
    let fit = walk_dimension_fit(&SpaceSpec::heisenberg(1), &[0.0; 3], &[1.0, 0.3, 0.1, 0.03], &cfg)?;
    v.line(
        "7 Heisenberg walk dimension",
        (fit.beta_hat - 2.0).abs() <= 0.1,
        format!("beta_hat = {:.4} (2 +/- 0.1), r2 = {:.5}", fit.beta_hat, fit.r2),
    );
    Ok(())
}

fn criterion_8(v: &mut Verdicts) -> Result<()> {
    let eps: Vec<f64> = (1..=10).map(|i| 0.05 + 0.09 * (i - 1) as f64).collect();
    let scan = |hk: &HeatKernel| {
        let lambda = hk.bottom();
        let times: Vec<f64> = (0..20).map(|i| 1e-3 / lambda * 1e4f64.powf(i as f64 / 19.0)).collect();
        hk.spectral_decay_scan(&times, &eps)
    };
    let mut results = Vec::new();
    let g = build_grid_graph(&DomainSpec::interval(-1.0, 1.0), 1.0 / 50.0, BoundaryCondition::Dirichlet, 1.0)?;
    results.push(("interval".to_string(), scan(&HeatKernel::new(&g)?)?));
    for m in 1..=5 {
        let g = build_gasket_graph(m)?;
        results.push((format!("gasket m={m}"), scan(&HeatKernel::new(&g)?)?));
    }
    let checks: Vec<CheckResult> = results.iter().map(|(l, s)| check_spectral_decay(l, s)).collect();
    v.line(
        "8 spectral decay",
        checks.iter().all(|c| c.pass),
        results
            .iter()
            .map(|(l, s)| format!("{l}: {} violations / {} (worst ratio {:.6})", s.violations, s.checked, s.worst_ratio))
            .collect::<Vec<_>>()
            .join("; "),
    );
    Ok(())
}

fn criterion_9(v: &mut Verdicts) -> Result<()> {
    let gauss = |r: f64| (-r * r).exp();
    let dgauss = |r: f64| -2.0 * r * (-r * r).exp();
    let expo = |r: f64| (-r).exp();
    let dexpo = |r: f64| -(-r).exp();
    let g = RadialProfile { phi: &gauss, dphi: &dgauss };
    let e = RadialProfile { phi: &expo, dphi: &dexpo };
    let cases = [
        ("d=1 gaussian R=0", check_layercake(&SpaceSpec::euclidean(1), &[0.0], 0.0, &g, 12.0)?),
        ("d=2 exponential R=1", check_layercake(&SpaceSpec::euclidean(2), &[0.0, 0.0], 1.0, &e, 60.0)?),
        ("d=3 gaussian R=0.5", check_layercake(&SpaceSpec::euclidean(3), &[0.0; 3], 0.5, &g, 12.0)?),
    ];
    v.line(
        "9 layer cake",
        cases.iter().all(|c| c.1 <= 1e-6),
        cases
            .iter()
            .map(|(l, r)| format!("{l}: residual {r:.2e}"))
            .collect::<Vec<_>>()
            .join("; ")
            + " (limit 1e-6)",
    );
    Ok(())
}

fn criterion_10(v: &mut Verdicts) -> Result<()> {
    let start = Instant::now();
    let hs = hot_spots(&DomainSpec::ball(vec![0.0, 0.0], 1.0), 1.0 / 256.0, 1.0, &EigenOptions::default())?;
    let bound = check_hot_spots(&hs, 1.02);
    let target = (BESSEL_J1_PRIME_FIRST_ZERO / BESSEL_J0_FIRST_ZERO).powi(2);
    let ratio = check_agreement("mu2_over_lambda1", hs.mu2_over_lambda1, target, 0.01);
    v.line(
        "10 hot spots",
        bound.pass && ratio.pass,
        format!(
            "sup phi2 / sup_rim phi2 = {:.5} (<= 1.02), mu2/lambda1 = {:.5} (Bessel {target:.5} +/- 1%), {:.0} s",
            hs.ratio,
            hs.mu2_over_lambda1,
            start.elapsed().as_secs_f64()
        ),
    );
    Ok(())
}

fn condition_fits(
    space: &SpaceSpec,
    pf: &ParameterFunction,
    centers: &[Vec<f64>],
    radii: &[f64],
    fk: (&[f64], f64, &[DomainSpec]),
    opts: &ConditionOptions,
) -> Result<Vec<ConditionFit>> {
    Ok(vec![
        fit_condition_lambda_f(space, pf, centers, radii, opts)?,
        fit_condition_e_f(space, pf, centers, radii, opts)?,
        fit_condition_fk(space, pf, fk.0, fk.1, fk.2, opts)?,
        check_condition_ebar(space, centers, radii, opts)?,
        check_condition_ebar_prime(space, centers, radii, 0.5, opts)?,
    ])
}

fn summarize(fits: &[ConditionFit]) -> String {
    fits.iter()
        .map(|f| format!("{} {:.3}{}", f.condition_id.as_str(), f.ratio(), if f.pass { "" } else { " FAIL" }))
        .collect::<Vec<_>>()
        .join(", ")
}

fn criterion_11(v: &mut Verdicts) -> Result<()> {
    let opts = ConditionOptions {
        cap: 2.0,
        ..Default::default()
    };
    let shape_tol = 0.05;
    let square = ParameterFunction::power(2.0)?;
    let euclid_radii = [1.0, 0.3, 0.1, 0.03];

    let line = SpaceSpec::euclidean(1);
    let family = [
        DomainSpec::interval(-1.0, 1.0),
        DomainSpec::interval(-0.5, 0.5),
        DomainSpec::interval(0.0, 0.5),
        DomainSpec::interval(0.2, 0.3),
    ];
    let fits = condition_fits(&line, &square, &[vec![0.0]], &euclid_radii, (&[0.0], 1.0, &family), &opts)?;
    let shape = check_envelope_shape(&ondiag_decay(&line, &opts)?, line.alpha(), &square, shape_tol);
    let cons = consistency_prop43(&fits, &shape)?;
    v.line(
        "11 conditions euclidean d=1",
        fits.iter().all(|f| f.pass) && shape.pass && cons.note == "consistent",
        format!("{}; decay {:.4}; {}", summarize(&fits), shape.lhs, cons.note),
    );

    let plane = SpaceSpec::euclidean(2);
    let rect = |lx: f64, ly: f64, ux: f64, uy: f64| DomainSpec::Box {
        lower: vec![lx, ly],
        upper: vec![ux, uy],
    };
    let family = [
        DomainSpec::ball(vec![0.0, 0.0], 1.0),
        rect(-0.7, -0.7, 0.7, 0.7),
        rect(0.0, 0.0, 0.5, 0.5),
        rect(0.0, 0.0, 0.25, 0.5),
        rect(-0.1, -0.1, 0.1, 0.1),
    ];
    let fits = condition_fits(&plane, &square, &[vec![0.0, 0.0]], &euclid_radii, (&[0.0, 0.0], 1.0, &family), &opts)?;
    let shape = check_envelope_shape(&ondiag_decay(&plane, &opts)?, plane.alpha(), &square, shape_tol);
    let cons = consistency_prop43(&fits, &shape)?;
    v.line(
        "11 conditions euclidean d=2",
        fits.iter().all(|f| f.pass) && shape.pass && cons.note == "consistent",
        format!("{}; decay {:.4}; {}", summarize(&fits), shape.lhs, cons.note),
    );

    let gasket = SpaceSpec::gasket(8);
    let pf = ParameterFunction::power(gasket_walk_dimension())?;
    let radii: Vec<f64> = (1..=6).map(|k| 0.5f64.powi(k)).collect();
    let mut family = vec![DomainSpec::GasketSubset { region: GasketRegion::Whole }];
    for k in 1..=4 {
        family.push(DomainSpec::GasketSubset {
            region: GasketRegion::Cell { address: vec![0; k] },
        });
    }
    let centers = [vec![0.5, 0.0]];
    let fits = condition_fits(&gasket, &pf, &centers, &radii, (&[0.5, 0.25], 1.0, &family), &opts)?;
    let decay = ondiag_decay(&gasket, &opts)?;
    let shape = check_envelope_shape(&decay, gasket.alpha(), &pf, shape_tol);
    let cons = consistency_prop43(&fits, &shape)?;
    v.line(
        "11 conditions gasket",
        fits.iter().all(|f| f.pass) && shape.pass && cons.note == "consistent",
        format!("{}; decay {:.4}; {}", summarize(&fits), shape.lhs, cons.note),
    );

    let wrong = ParameterFunction::power(2.0)?;
    let fits = condition_fits(&gasket, &wrong, &centers, &radii, (&[0.5, 0.25], 1.0, &family), &opts)?;
    let shape = check_envelope_shape(&decay, gasket.alpha(), &wrong, shape_tol);
    let cons = consistency_prop43(&fits, &shape)?;
    let lambda_fails = fits.iter().any(|f| f.condition_id.as_str() == "lambda_F" && !f.pass);
    v.line(
        "11 wrong-F negative control",
        lambda_fails && !shape.pass && cons.note == "consistently inconsistent" && cons.pass,
        format!(
            "gasket with F=r^2: {}; shape target {:.4} vs decay {:.4}; {}",
            summarize(&fits),
            shape.rhs,
            shape.lhs,
            cons.note
        ),
    );
    Ok(())
}

fn interval_verdicts(sigma2: f64) -> Result<(Vec<(String, bool)>, f64)> {
    let space = SpaceSpec::euclidean(1).with_generator_scale(sigma2);
    let domain = DomainSpec::interval(-1.0, 1.0);
    let cfg = SimConfig::new(1e-4 / sigma2, 12.0 / sigma2, 20_000, 5);
    let batch = run_batch(&space, &domain, &[0.0], &cfg)?;
    let g = build_grid_graph(&domain, 5e-4, BoundaryCondition::Dirichlet, sigma2)?;
    let lambda = dirichlet_lambda(&g, &EigenOptions::default())?.eigenvalue;
    let curve = survival_curve(&batch, &uniform_grid(0.1 / sigma2, 3.0 / sigma2, 59))?;
    let tail = tail_slope(&survival_curve(&batch, &uniform_grid(0.05 / sigma2, 8.0 / sigma2, 400))?, &TailWindow::default())?;
    let inputs = SuiteInputs {
        label: format!("interval sigma2={sigma2}"),
        curve,
        lambda,
        lambda_source: "dirichlet_lambda".into(),
        generator_scale: sigma2,
        dprime: 0.5,
        moments: vec![
            moment(&batch, 1.0, DEFAULT_CENSOR_THRESHOLD)?,
            moment(&batch, 2.0, DEFAULT_CENSOR_THRESHOLD)?,
        ],
        exp_moments: vec![exp_moment(&batch, 0.4 * lambda, DEFAULT_CENSOR_THRESHOLD)?],
        tail: Some(tail),
        lambda_eigen: Some(lambda),
    };
    let suite: Vec<String> = SURVIVAL_SUITE.iter().map(|s| s.to_string()).collect();
    let report = survival_suite(&inputs, &suite, &Tolerance::default(), 1.0)?;
    let verdicts = report
        .checks
        .iter()
        .map(|c| {
            // exp-moment ids carry the rate, which scales with σ²
            let id = if c.check_id.starts_with("exp_moment_bound") { "exp_moment_bound".to_string() } else { c.check_id.clone() };
            (id, c.pass)
        })
        .collect();
    Ok((verdicts, lambda / sigma2))
}

fn criterion_12(v: &mut Verdicts) -> Result<()> {
    let runs = [1.0, 2.0, 4.0]
        .iter()
        .map(|&s| interval_verdicts(s).map(|r| (s, r)))
        .collect::<Result<Vec<_>>>()?;
    let reference = &runs[0].1 .0;
    let same = runs.iter().all(|(_, (verdicts, _))| verdicts == reference);
    let all_pass = reference.iter().all(|(_, p)| *p);
    v.line(
        "12 convention invariance",
        same && all_pass,
        format!(
            "verdicts {} for sigma2 in {{1, 2, 4}} ({} checks, all {}); lambda/sigma2 = {}",
            if same { "identical" } else { "differ" },
            reference.len(),
            if all_pass { "pass" } else { "not passing" },
            runs.iter().map(|(_, (_, l))| format!("{l:.6}")).collect::<Vec<_>>().join(", ")
        ),
    );
    Ok(())
}

fn main() {
    let mut v = Verdicts { failed: 0 };
    let started = Instant::now();
    let heis = heisenberg_run();
    match interval_run() {
        Ok(run) => {
            criterion_1(&mut v, &run);
            let r = criterion_2(&mut v, &run);
            v.guard("2 spectral agreement", r);
            let r = criterion_3(&mut v, &run);
            v.guard("3 moment sandwich", r);
            let r = criterion_4(&mut v, &run);
            v.guard("4 lower bound", r);
            let r = match &heis {
                Ok(h) => criterion_5(&mut v, &run, h),
                Err(e) => {
                    v.line("5 envelope", false, format!("Heisenberg batch: {e}"));
                    Ok(())
                }
            };
            v.guard("5 envelope", r);
        }
        Err(e) => v.line("1-5 interval batch", false, format!("error: {e}")),
    }
    let r = criterion_6(&mut v);
    v.guard("6 gasket", r);
    let r = match &heis {
        Ok(h) => criterion_7(&mut v, h),
        Err(e) => {
            v.line("7 Heisenberg", false, format!("Heisenberg batch: {e}"));
            Ok(())
        }
    };
    v.guard("7 Heisenberg", r);
    let r = criterion_8(&mut v);
    v.guard("8 spectral decay", r);
    let r = criterion_9(&mut v);
    v.guard("9 layer cake", r);
    let r = criterion_10(&mut v);
    v.guard("10 hot spots", r);
    let r = criterion_11(&mut v);
    v.guard("11 conditions", r);
    let r = criterion_12(&mut v);
    v.guard("12 convention invariance", r);
    println!("acceptance: {} failing, {:.0} s total", v.failed, started.elapsed().as_secs_f64());
    if v.failed > 0 {
        std::process::exit(1);
    }
}
