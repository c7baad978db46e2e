use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::{Command, Common, EXIT_CHECK_FAILED, EXIT_OK};
use crate::discrete::{
    build_gasket_domain, build_grid_graph, dirichlet_lambda, hot_spots, mean_exit_solve, BoundaryCondition, Graph,
};
use crate::estimate::{
    exp_moment, moment, start_set, survival_curve, tail_slope, uniform_grid, ExpMomentEstimate, MomentEstimate,
    SurvivalCurve, TailFit,
};
use crate::sampler::{read_batch, read_batch_csv, run_batch, write_batch, write_batch_csv, ExitBatch};
use crate::space::{DomainSpec, SpaceKind, SpaceSpec};
use crate::verify::{check_hot_spots, envelope_constant, survival_suite, SuiteInputs, VerificationReport};
use crate::{Error, Result};

pub const ESTIMATE_SCHEMA_VERSION: u32 = 1;

const DEFAULT_OUTPUT_DIR: &str = "exitlab-out";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub schema_version: u32,
    pub space: SpaceSpec,
    pub domain: DomainSpec,
    pub vertices: usize,
    pub edges: usize,
    pub lambda: f64,
    pub eigen_residual: f64,
    pub eigen_iterations: usize,
    pub max_exit: f64,
    pub start_vertex: usize,
    pub exit_at_start: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    pub schema_version: u32,
    pub space: SpaceSpec,
    pub domain: DomainSpec,
    pub starts: Vec<Vec<f64>>,
    pub n_paths: usize,
    pub mean_tau: f64,
    pub censored_fraction: f64,
    /// Survival curve maximised over the starts.
    pub curve: SurvivalCurve,
    /// Per order, the largest moment over the starts.
    pub moments: Vec<MomentEstimate>,
    pub exp_moments: Vec<ExpMomentEstimate>,
    #[serde(default)]
    pub tail: Option<TailFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_error: Option<String>,
}

pub(super) fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Simulate {
            common,
            seed,
            paths,
            step_size,
        } => cmd_simulate(&common, seed, paths, step_size),
        Command::Solve { common } => cmd_solve(&common),
        Command::Estimate { common } => cmd_estimate(&common),
        Command::Verify {
            common,
            suite,
            perturb_lambda,
        } => cmd_verify(&common, suite, perturb_lambda),
        Command::Hotspots { common } => cmd_hotspots(&common),
        Command::Report { inputs, out } => cmd_report(&inputs, out),
    }
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf)> {
    let cfg = ExperimentConfig::load(&common.config)?;
    cfg.validate()?;
    let dir = common
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    fs::create_dir_all(&dir)?;
    Ok((cfg, dir))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn cmd_simulate(common: &Common, seed: Option<u64>, paths: Option<usize>, step_size: Option<f64>) -> Result<u8> {
    let (cfg, dir) = load(common)?;
    let mut sim = cfg.sim()?.clone();
    if let Some(s) = seed {
        sim.seed = s;
    }
    if let Some(n) = paths {
        sim.n_paths = n;
    }
    if let Some(h) = step_size {
        sim.step_size = h;
    }
    sim.validate().map_err(|e| Error::Precondition(format!("sim: {e}")))?;
    let batch = run_batch(&cfg.space, &cfg.domain, &cfg.start_point(), &sim)?;
    if cfg.formats.binary {
        let mut w = create(&dir.join("batch.bin"))?;
        write_batch(&batch, &mut w)?;
        w.flush()?;
    }
    if cfg.formats.csv {
        let mut w = create(&dir.join("batch.csv"))?;
        write_batch_csv(&batch, &mut w)?;
        w.flush()?;
    }
    println!(
        "simulate: {} paths, mean tau {}, censored fraction {}, output {}",
        batch.len(),
        batch.mean_tau(),
        batch.censored_fraction(),
        dir.display()
    );
    Ok(EXIT_OK)
}

/// Graph of the configured domain with the vertex nearest the start.
fn domain_graph(cfg: &ExperimentConfig) -> Result<(Graph, usize)> {
    match (&cfg.space.kind, &cfg.domain) {
        (SpaceKind::Gasket { m }, DomainSpec::GasketSubset { region }) => {
            let (g, c) = build_gasket_domain(*m, region)?;
            let c = if cfg.start.len() == 2 {
                g.nearest_vertex(&cfg.start).unwrap_or(c)
            } else {
                c
            };
            Ok((g, c))
        }
        (SpaceKind::Euclidean { d }, domain) if *d <= 2 => {
            let g = build_grid_graph(domain, cfg.solver.h, BoundaryCondition::Dirichlet, cfg.space.generator_scale)?;
            let c = g
                .nearest_vertex(&cfg.start_point())
                .ok_or_else(|| Error::Precondition("solver: empty grid".into()))?;
            Ok((g, c))
        }
        _ => Err(Error::Precondition(format!(
            "space: no discrete solver for {} on {}",
            cfg.space.label(),
            cfg.domain.label()
        ))),
    }
}

fn cmd_solve(common: &Common) -> Result<u8> {
    let (cfg, dir) = load(common)?;
    let (g, c) = domain_graph(&cfg)?;
    let eig = dirichlet_lambda(&g, &cfg.solver.eigen)?;
    let exit = mean_exit_solve(&g)?;
    write_json(&dir.join("eigen.json"), &eig)?;
    {
        let mut w = create(&dir.join("eigenvector.csv"))?;
        eig.write_csv(&mut w)?;
        w.flush()?;
        let mut w = create(&dir.join("exit.csv"))?;
        exit.write_csv(&g, &mut w)?;
        w.flush()?;
    }
    let summary = SolveSummary {
        schema_version: ESTIMATE_SCHEMA_VERSION,
        space: cfg.space.clone(),
        domain: cfg.domain.clone(),
        vertices: g.n(),
        edges: g.edge_count(),
        lambda: eig.eigenvalue,
        eigen_residual: eig.residual,
        eigen_iterations: eig.iterations,
        max_exit: exit.max(),
        start_vertex: c,
        exit_at_start: exit.values[c],
    };
    write_json(&dir.join("solve.json"), &summary)?;
    println!(
        "solve: {} vertices, lambda {} (residual {:e}), max mean exit {}, output {}",
        summary.vertices,
        summary.lambda,
        summary.eigen_residual,
        summary.max_exit,
        dir.display()
    );
    Ok(EXIT_OK)
}

fn load_batch(dir: &Path) -> Result<ExitBatch> {
    let bin = dir.join("batch.bin");
    let csv = dir.join("batch.csv");
    if bin.exists() {
        read_batch(BufReader::new(File::open(&bin)?)).map_err(|e| Error::Format(format!("{}: {e}", bin.display())))
    } else if csv.exists() {
        read_batch_csv(BufReader::new(File::open(&csv)?)).map_err(|e| Error::Format(format!("{}: {e}", csv.display())))
    } else {
        Err(Error::MissingInput(format!(
            "batch.bin or batch.csv in {} (run `exitlab simulate`)",
            dir.display()
        )))
    }
}

fn largest<T>(items: Vec<T>, key: impl Fn(&T) -> f64) -> Option<T> {
    items.into_iter().max_by(|a, b| key(a).total_cmp(&key(b)))
}

fn cmd_estimate(common: &Common) -> Result<u8> {
    let (cfg, dir) = load(common)?;
    let est = cfg
        .estimate
        .as_ref()
        .ok_or_else(|| Error::Precondition("estimate: section required for this command".into()))?;
    let primary = load_batch(&dir)?;
    if primary.space != cfg.space || primary.domain != cfg.domain {
        return Err(Error::Precondition(format!(
            "batch in {} was simulated for {} on {}, config has {} on {}",
            dir.display(),
            primary.space.label(),
            primary.domain.label(),
            cfg.space.label(),
            cfg.domain.label()
        )));
    }
    let mut batches = vec![primary];
    if est.extra_starts > 0 {
        let starts = start_set(&cfg.domain, est.extra_starts)?;
        for (k, p) in starts.into_iter().enumerate().skip(1) {
            let mut sim = batches[0].config.clone();
            sim.seed = sim.seed.wrapping_add(7919 * k as u64);
            batches.push(run_batch(&cfg.space, &cfg.domain, &p, &sim)?);
        }
    }
    let grid = uniform_grid(est.grid.0, est.grid.1, est.grid.2);
    let curves = batches
        .iter()
        .map(|b| survival_curve(b, &grid))
        .collect::<Result<Vec<_>>>()?;
    let curve = SurvivalCurve::pointwise_max(&curves)?;
    let (tail, tail_error) = match tail_slope(&curve, &est.tail_window) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut moments = Vec::new();
    for &p in &est.moments {
        let all = batches
            .iter()
            .map(|b| moment(b, p, est.censor_threshold))
            .collect::<Result<Vec<_>>>()?;
        moments.extend(largest(all, |m| m.value));
    }
    let mut exp_moments = Vec::new();
    if let Some(t) = &tail {
        for &f in &est.exp_rate_fractions {
            let a = f * t.lambda_hat;
            let all = batches
                .iter()
                .map(|b| exp_moment(b, a, est.censor_threshold))
                .collect::<Result<Vec<_>>>()?;
            exp_moments.extend(largest(all, |m| m.value));
        }
    }
    let summary = EstimateSummary {
        schema_version: ESTIMATE_SCHEMA_VERSION,
        space: cfg.space.clone(),
        domain: cfg.domain.clone(),
        starts: batches.iter().map(|b| b.start.clone()).collect(),
        n_paths: batches[0].len(),
        mean_tau: batches[0].mean_tau(),
        censored_fraction: batches[0].censored_fraction(),
        curve,
        moments,
        exp_moments,
        tail,
        tail_error,
    };
    {
        let mut w = create(&dir.join("survival.csv"))?;
        summary.curve.write_csv(&mut w)?;
        w.flush()?;
    }
    write_json(&dir.join("estimate.json"), &summary)?;
    match &summary.tail {
        Some(t) => println!("estimate: mean tau {}, tail rate {} (r2 {})", summary.mean_tau, t.lambda_hat, t.r2),
        None => println!(
            "estimate: mean tau {}, tail fit rejected: {}",
            summary.mean_tau,
            summary.tail_error.as_deref().unwrap_or("")
        ),
    }
    Ok(EXIT_OK)
}

fn cmd_verify(common: &Common, suite: Option<Vec<String>>, perturb: f64) -> Result<u8> {
    let (cfg, dir) = load(common)?;
    if !(perturb > 0.0 && perturb.is_finite()) {
        return Err(Error::Precondition(format!("--perturb-lambda: must be positive, got {perturb}")));
    }
    let suite = suite.unwrap_or_else(|| cfg.verify.suite.clone());
    if suite.is_empty() || suite.iter().all(|s| s.trim().is_empty()) {
        return Err(Error::Precondition("verify.suite: no checks selected".into()));
    }
    let est_path = dir.join("estimate.json");
    let solve_path = dir.join("solve.json");
    let needs_solve = suite.iter().any(|s| s == "asymptotic");
    let mut missing = Vec::new();
    if !est_path.exists() {
        missing.push("estimate.json (run `exitlab estimate`)");
    }
    if needs_solve && !solve_path.exists() {
        missing.push("solve.json (run `exitlab solve`)");
    }
    if !missing.is_empty() {
        return Err(Error::MissingInput(format!("in {}: {}", dir.display(), missing.join(", "))));
    }
    let est: EstimateSummary = read_json(&est_path)?;
    let solve: Option<SolveSummary> = if solve_path.exists() {
        Some(read_json(&solve_path)?)
    } else {
        None
    };
    let (lambda, source) = match (&solve, &est.tail) {
        (Some(s), _) => (s.lambda, "dirichlet_lambda"),
        (None, Some(t)) => (t.lambda_hat, "tail_slope"),
        (None, None) => {
            return Err(Error::MissingInput(format!(
                "a rate: solve.json is absent and the tail fit was rejected ({})",
                est.tail_error.unwrap_or_default()
            )))
        }
    };
    let inputs = SuiteInputs {
        label: format!("{} {}", cfg.space.label(), cfg.domain.label()),
        curve: est.curve.clone(),
        lambda,
        lambda_source: source.into(),
        generator_scale: est.space.generator_scale,
        dprime: cfg.dprime()?,
        moments: est.moments.clone(),
        exp_moments: est.exp_moments.clone(),
        tail: est.tail.clone(),
        lambda_eigen: solve.as_ref().map(|s| s.lambda),
    };
    let report = survival_suite(&inputs, &suite, &cfg.verify.tolerance, perturb)?;
    write_json(&dir.join("verification.json"), &report)?;
    fs::write(dir.join("verification.md"), report.to_markdown())?;
    print!("{}", report.to_markdown());
    Ok(if report.all_mandatory_pass() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cmd_hotspots(common: &Common) -> Result<u8> {
    let (cfg, dir) = load(common)?;
    let hs_cfg = cfg
        .hotspots
        .as_ref()
        .ok_or_else(|| Error::Precondition("hotspots: section required for this command".into()))?;
    let hs = hot_spots(&cfg.domain, hs_cfg.h, cfg.space.generator_scale, &cfg.solver.eigen)?;
    let mut report = VerificationReport::new(format!("{} {}", cfg.space.label(), cfg.domain.label()));
    report.checks.push(check_hot_spots(&hs, hs_cfg.bound));
    write_json(&dir.join("hotspots.json"), &hs)?;
    write_json(&dir.join("verification.json"), &report)?;
    println!(
        "hotspots: ratio {}, mu2 {}, lambda1 {}, mu2/lambda1 {}",
        hs.ratio, hs.mu2, hs.lambda1, hs.mu2_over_lambda1
    );
    Ok(if report.all_mandatory_pass() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

/// Rows `t, S, se, e^{−λt}, K (1 + 2λt/d')^{d'} e^{−λt}`.
pub fn overlay_rows(curve: &SurvivalCurve, lambda: f64, dprime: f64, k: f64) -> Vec<[f64; 5]> {
    (0..curve.t.len())
        .map(|i| {
            let t = curve.t[i];
            let envelope = k / envelope_constant(1.0, t, lambda, dprime);
            [t, curve.s[i], curve.se[i], (-lambda * t).exp(), envelope]
        })
        .collect()
}

fn file_stem(section: &str) -> String {
    section
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn cmd_report(inputs: &[PathBuf], out: Option<PathBuf>) -> Result<u8> {
    let dir = out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    fs::create_dir_all(&dir)?;
    let mut groups: BTreeMap<String, Vec<VerificationReport>> = BTreeMap::new();
    let mut overlays = 0;
    for input in inputs {
        let path = if input.is_dir() {
            input.join("verification.json")
        } else {
            input.clone()
        };
        let text = fs::read_to_string(&path).map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
        let report = VerificationReport::from_json(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        let est_path = path.parent().unwrap_or(Path::new(".")).join("estimate.json");
        let envelope = report.checks.iter().find(|c| c.check_id == "envelope");
        if let (true, Some(env)) = (est_path.exists(), envelope) {
            let est: EstimateSummary = read_json(&est_path)?;
            let get = |k: &str| env.inputs.get(k).and_then(|v| v.as_f64());
            if let (Some(lambda), Some(dprime), Some(k)) = (get("lambda"), get("dprime"), env.fitted_constant) {
                let name = dir.join(format!("overlay_{}.csv", file_stem(&report.section)));
                let mut w = create(&name)?;
                writeln!(w, "# exitlab-overlay v1")?;
                writeln!(w, "t,S,se,lower_bound,envelope")?;
                for r in overlay_rows(&est.curve, lambda, dprime, k) {
                    writeln!(w, "{},{},{},{},{}", r[0], r[1], r[2], r[3], r[4])?;
                }
                w.flush()?;
                overlays += 1;
            }
        }
        groups.entry(report.section.clone()).or_default().push(report);
    }
    let mut sections = Vec::new();
    let mut md = String::from("# Verification report\n\n");
    for (_, parts) in groups {
        let merged = VerificationReport::merge(parts)?;
        md.push_str(&merged.to_markdown());
        md.push('\n');
        sections.push(merged);
    }
    write_json(
        &dir.join("report.json"),
        &serde_json::json!({ "schema_version": crate::verify::REPORT_SCHEMA_VERSION, "sections": sections }),
    )?;
    fs::write(dir.join("report.md"), &md)?;
    print!("{md}");
    println!("report: {} sections, {} overlay files, output {}", sections.len(), overlays, dir.display());
    Ok(EXIT_OK)
}
