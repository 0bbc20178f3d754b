//! Experiment harness behind the `dictgreedy` binary.
//!
//! A run goes estimate → verify norming constant → greedy → invariant checks
//! → rate fit, and writes a trace CSV plus a JSON report. Exit codes: 0 when
//! every check passes, 1 when some check fails (the report is still
//! written), 2 for usage, validation and I/O errors.

pub mod config;
pub mod plot;
pub mod report;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analysis::{
    beta_global, beta_local, check_gap_sigma, check_geometric_envelope, default_floor, exponential_factor,
    fit_rate, gap_sigma_constant, gradient_bound_on_ball, predicted_rate, RateReport,
};
use crate::dictionary::verify_norming;
use crate::energy::{default_region_radius, estimate_ellipticity, estimate_smoothness, Mode};
use crate::error::{Error, Result};
use crate::greedy::{
    check_bounded, check_iterate_error, check_monotone, check_one_step_bound, check_orthogonality,
    check_telescoping, coercivity_radius, run_greedy, GreedyTrace,
};

use config::ExperimentConfig;
use report::{
    BruteForceSummary, CheckSummary, Checks, Declared, Estimates, NormingSummary, RateSummary, RunReport,
    UsedConstants, Verdict,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const ORTHOGONALITY_TOL: f64 = 1e-8;
const ITERATE_ERROR_EPS: f64 = 0.01;
/// Exponent-relation tolerances for the sampled estimates.
const RELATION_BOUNDED_SLACK: f64 = 0.1;
const RELATION_GLOBAL_TOL: f64 = 0.1;

/// Everything a finished run produced.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub trace: GreedyTrace,
    pub fit: RateReport,
}

/// Gaps if the minimizer energy is known, else `E_m - E_M`.
fn gap_series(trace: &GreedyTrace) -> Vec<f64> {
    trace.gaps().unwrap_or_else(|| {
        let last = trace.rows.last().map_or(0.0, |r| r.energy);
        trace.rows.iter().map(|r| r.energy - last).collect()
    })
}

/// Run one experiment in memory. Nothing is written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let space = cfg.build_space()?;
    let energy = cfg.build_energy(&space)?;
    let dict = cfg.build_dictionary(&space)?;
    let greedy_cfg = cfg.greedy_config()?;
    let an = &cfg.analysis;
    let params = energy.params().clone();

    // Estimates.
    let radius = an.region_radius.unwrap_or_else(|| default_region_radius(&energy));
    let smooth = estimate_smoothness(&energy, radius, an.samples, an.seed)?;
    let ellip = estimate_ellipticity(&energy, radius, an.samples, an.seed)?;
    let (p_hat, s_hat) = (smooth.exponent, ellip.exponent);
    let relation_pass = s_hat >= p_hat + 1.0 - RELATION_BOUNDED_SLACK
        && (params.mode != Mode::Global || (s_hat - (p_hat + 1.0)).abs() <= RELATION_GLOBAL_TOL);
    let (lip, lip_source) = match params.lip {
        Some(l) => (l, "declared"),
        None => (smooth.constant, "estimated"),
    };
    let (alpha, alpha_source) = match params.alpha {
        Some(a) => (a, "declared"),
        None => (ellip.constant, "estimated"),
    };
    let (p, s) = (params.p, params.s);

    // Norming constant.
    let norming_c = dict.norming_constant();
    let c_finite = norming_c.value.is_finite();
    let norming = if c_finite {
        let rep = verify_norming(&dict, norming_c.value, an.trials, an.seed, an.n_small)?;
        NormingSummary {
            dictionary: dict.kind_name().into(),
            constant: norming_c.value,
            provenance: norming_c.provenance.as_str().into(),
            trials: rep.trials,
            violations: rep.violations,
            worst_ratio: rep.worst_ratio,
            pass: rep.pass(),
            brute_force: rep.brute_force.map(|b| BruteForceSummary {
                dim: b.dim,
                functionals: b.functionals,
                samples_per_functional: b.samples_per_functional,
                max_rel_gap: b.max_rel_gap,
                max_excess: b.max_excess,
                pass: b.pass,
            }),
        }
    } else {
        NormingSummary {
            dictionary: dict.kind_name().into(),
            constant: norming_c.value,
            provenance: norming_c.provenance.as_str().into(),
            trials: 0,
            violations: 0,
            worst_ratio: f64::NAN,
            brute_force: None,
            pass: false,
        }
    };

    // Greedy run and checks.
    let trace = run_greedy(&energy, &dict, &greedy_cfg)?;
    let gaps = gap_series(&trace);

    let (beta, beta_constants) = match params.mode {
        Mode::Global => {
            let b = beta_global(p, lip);
            (b, vec![("beta", b), ("lip", lip), ("p", p)])
        }
        Mode::Bounded => {
            let r = radius / 2.0;
            let g0 = energy.gradient(&space.zeros())?.dual_norm();
            let m_r = gradient_bound_on_ball(g0, p, r, lip);
            let b = beta_local(p, r, m_r, lip);
            (b, vec![("beta", b), ("lip", lip), ("m_r", m_r), ("p", p), ("r", r)])
        }
    };
    let one_step = CheckSummary::new(&check_one_step_bound(&trace, beta, p), &beta_constants);
    let orthogonality =
        CheckSummary::new(&check_orthogonality(&trace, ORTHOGONALITY_TOL), &[("tol", ORTHOGONALITY_TOL)]);
    let (tele, tightness) = check_telescoping(&trace, alpha, s);
    let telescoping = CheckSummary::new(&tele, &[("alpha", alpha), ("s", s), ("tightness_l0", tightness)]);
    let monotone = CheckSummary::new(&check_monotone(&trace), &[]);
    let has_error = trace.rows.iter().any(|r| r.error_norm.is_some());
    let iterate_error = has_error.then(|| {
        CheckSummary::new(
            &check_iterate_error(&trace, alpha, s, ITERATE_ERROR_EPS),
            &[("alpha", alpha), ("eps", ITERATE_ERROR_EPS), ("s", s)],
        )
    });
    let bounded = greedy_cfg
        .ball_radius_r
        .or_else(|| coercivity_radius(&trace, alpha, s))
        .map(|rad| CheckSummary::new(&check_bounded(&trace, rad), &[("radius", rad)]));
    let mut gap_sigma = None;
    let mut geometric_envelope = None;
    if c_finite && trace.minimizer_energy.is_some() {
        let gs = gap_sigma_constant(p, s, lip, alpha, norming_c.value)?;
        gap_sigma = Some(CheckSummary::new(
            &check_gap_sigma(&trace, gs),
            &[("c", gs.c), ("exponent", gs.exponent), ("norming", norming_c.value)],
        ));
        if params.mode == Mode::Global {
            let mu = exponential_factor(p, lip, gs.c);
            geometric_envelope =
                Some(CheckSummary::new(&check_geometric_envelope(&gaps, mu), &[("mu", mu)]));
        }
    }
    let checks = Checks {
        monotone,
        one_step_bound: one_step,
        orthogonality,
        telescoping,
        iterate_error,
        bounded,
        gap_sigma,
        geometric_envelope,
    };

    // Rate.
    let floor = an.floor.unwrap_or_else(|| default_floor(&gaps));
    let prediction = predicted_rate(p, s)?;
    let fit = fit_rate(&gaps, an.burn_in, floor).assess(prediction);
    let rate = RateSummary {
        kind: fit.kind.as_str().into(),
        alpha: fit.alpha,
        exponent: fit.exponent,
        r_squared: fit.r_squared,
        r_squared_exponential: fit.r_squared_exponential,
        r_squared_algebraic: fit.r_squared_algebraic,
        burn_in: fit.burn_in,
        floor,
        floor_index: fit.floor_index,
        window: fit.window,
        predicted_kind: prediction.kind().into(),
        predicted_exponent: prediction.exponent(),
        pass: fit.pass,
    };

    let mut failed: Vec<String> = checks
        .all()
        .into_iter()
        .filter(|(_, c)| !c.pass)
        .map(|(name, _)| name.to_string())
        .collect();
    if !norming.pass {
        failed.push("norming".into());
    }
    if !relation_pass {
        failed.push("exponent_relation".into());
    }
    if fit.pass == Some(false) {
        failed.push("rate".into());
    }
    let verdict = Verdict {
        pass: failed.is_empty(),
        failed,
        iterations: trace.iterations(),
        termination: trace.termination.as_str().into(),
        final_gap: trace.rows.last().and_then(|r| r.gap),
    };

    let algebraic_exponent_hat = (s_hat > p_hat + 1.0).then(|| p_hat / (s_hat - 1.0 - p_hat));
    let estimates = Estimates {
        region_radius: radius,
        samples: an.samples,
        seed: an.seed,
        p_hat,
        p_hat_raw_slope: smooth.raw_slope,
        lip_hat: smooth.constant,
        s_hat,
        alpha_hat: ellip.constant,
        algebraic_exponent_hat,
        exponent_relation_pass: relation_pass,
        declared: Declared {
            p,
            s,
            lip: params.lip,
            alpha: params.alpha,
            mode: params.mode.as_str().into(),
        },
        used: UsedConstants {
            p,
            s,
            lip,
            lip_source: lip_source.into(),
            alpha,
            alpha_source: alpha_source.into(),
        },
        reference_solver: energy.reference().map(|r| r.solver.as_str().to_string()),
    };

    let report = RunReport { config: cfg.clone(), estimates, norming, checks, rate, verdict };
    Ok(RunOutput { report, trace, fit })
}

fn resolve(path: &Path, base: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn plot_rows(trace: &GreedyTrace) -> Vec<plot::PlotRow> {
    trace
        .rows
        .iter()
        .map(|r| plot::PlotRow { m: r.m, energy: r.energy, gap: r.gap, sigma: r.sigma })
        .collect()
}

/// Load, run and write all outputs. Relative output paths resolve against
/// `out_dir` if given, else the config file's directory.
pub fn execute(config_path: &Path, out_dir: Option<&Path>) -> Result<RunOutput> {
    let cfg = ExperimentConfig::load(config_path)?;
    let base = match out_dir {
        Some(d) => d.to_path_buf(),
        None => config_path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let out = run_experiment(&cfg)?;

    let mut csv = Vec::new();
    out.trace.write_csv(&mut csv)?;
    write_file(&resolve(&cfg.output.trace_path, &base), &csv)?;
    write_file(&resolve(&cfg.output.report_path, &base), report::to_json(&out.report).as_bytes())?;
    if let Some(plot_path) = &cfg.output.plot_path {
        let (svg, warnings) = plot::render_svg(&plot_rows(&out.trace));
        for w in warnings {
            eprintln!("warning: {w}");
        }
        write_file(&resolve(plot_path, &base), svg.as_bytes())?;
    }
    Ok(out)
}

pub fn cmd_run(config_path: &Path, out_dir: Option<&Path>) -> i32 {
    match execute(config_path, out_dir) {
        Ok(out) => {
            let v = &out.report.verdict;
            println!(
                "{}: {} after {} iterations ({}), rate {} (predicted {})",
                out.report.config.name,
                if v.pass { "PASS" } else { "FAIL" },
                v.iterations,
                v.termination,
                out.report.rate.kind,
                out.report.rate.predicted_kind,
            );
            if v.pass {
                EXIT_PASS
            } else {
                eprintln!("failed checks: {}", v.failed.join(", "));
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// One row of `sweep_summary.csv`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SweepRow {
    pub config: String,
    pub verdict: String,
    pub fitted_kind: String,
    pub fitted_factor: Option<f64>,
    pub fitted_exponent: Option<f64>,
    pub predicted_kind: String,
    pub predicted_exponent: Option<f64>,
    pub error: String,
}

fn sweep_row(path: &Path, out_dir: Option<&Path>) -> SweepRow {
    let config = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    match execute(path, out_dir) {
        Ok(out) => SweepRow {
            config,
            verdict: if out.report.verdict.pass { "pass" } else { "fail" }.into(),
            fitted_kind: out.report.rate.kind.clone(),
            fitted_factor: out.fit.alpha,
            fitted_exponent: out.fit.exponent,
            predicted_kind: out.report.rate.predicted_kind.clone(),
            predicted_exponent: out.report.rate.predicted_exponent,
            error: out.report.verdict.failed.join(";"),
        },
        Err(e) => SweepRow {
            config,
            verdict: "error".into(),
            fitted_kind: String::new(),
            fitted_factor: None,
            fitted_exponent: None,
            predicted_kind: String::new(),
            predicted_exponent: None,
            error: e.to_string(),
        },
    }
}

/// Sorted `*.json` files directly inside `dir`.
fn list_configs(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Run every config in `dir` concurrently; rows are kept in file order.
pub fn sweep(dir: &Path, out_dir: Option<&Path>) -> Result<Vec<SweepRow>> {
    let paths = list_configs(dir)?;
    if paths.is_empty() {
        return Err(Error::Config(format!("no *.json configs in {}", dir.display())));
    }
    let rows: Vec<SweepRow> = paths.par_iter().map(|p| sweep_row(p, out_dir)).collect();
    let summary = out_dir.unwrap_or(dir).join("sweep_summary.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| Error::Config(format!("writing sweep summary: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("writing sweep summary: {e}")))?;
    write_file(&summary, &bytes)?;
    Ok(rows)
}

pub fn cmd_sweep(dir: &Path, out_dir: Option<&Path>) -> i32 {
    match sweep(dir, out_dir) {
        Ok(rows) => {
            for r in &rows {
                println!("{}: {}", r.config, r.verdict);
            }
            if rows.iter().all(|r| r.verdict == "pass") {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn cmd_plot(trace_path: &Path, out_path: &Path) -> i32 {
    let rows = match plot::read_trace(trace_path) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let (svg, warnings) = plot::render_svg(&rows);
    for w in warnings {
        eprintln!("warning: {w}");
    }
    match write_file(out_path, svg.as_bytes()) {
        Ok(()) => EXIT_PASS,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
