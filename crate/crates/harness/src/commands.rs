//! The operations behind each subcommand. Each writes its artifacts into `dir` and
//! returns the report; the caller persists the report and the timings.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use lowsing::fields::family::random_block_modes;
use lowsing::fields::io::{read_field, write_csv_slice, write_field};
use lowsing::fields::{admissible_j_max, counterexample_field};
use lowsing::montecarlo::{krylov_report, resolvent_mc, PathConfig, PointFunction, ThinnedSimulator};
use lowsing::operator::{ResolventSolver, SolverConfig};
use serde_json::json;
use thiserror::Error;

use crate::config::{ConfigError, ConfigMap};
use crate::report::{Check, RunReport};
use crate::suites::{self, Options};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] lowsing::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) | CommandError::Usage(_) => 2,
            CommandError::Compute(_) | CommandError::Io(_) => 1,
        }
    }
}

pub struct Outcome {
    pub report: RunReport,
    pub timings: Vec<(String, Duration)>,
}

fn timed<T>(timings: &mut Vec<(String, Duration)>, label: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.push((label.to_owned(), start.elapsed()));
    out
}

fn create(path: &Path) -> Result<BufWriter<File>, CommandError> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn verify(config: &ConfigMap, suite: &str) -> Result<Outcome, CommandError> {
    let checks = suites::registry(suite).ok_or_else(|| CommandError::Usage(format!("unknown suite {suite:?}")))?;
    let seed = config.seed(DEFAULT_SEED)?;
    let options = Options {
        seed,
        spec: config.spec()?,
    };
    let mut results = Vec::new();
    let mut timings = Vec::new();
    for (id, f) in checks {
        let (check, elapsed) = suites::run_timed(f, &options);
        eprintln!("{} ({:.1} s)", check.line(), elapsed.as_secs_f64());
        timings.push((id.to_owned(), elapsed));
        results.push(check);
    }
    let report = RunReport::new(
        &format!("verify {suite}"),
        seed,
        config.entries().clone(),
        results,
        json!({ "suite": suite, "spec": options.spec.to_string() }),
    );
    Ok(Outcome { report, timings })
}

pub fn solve(config: &ConfigMap, dir: &Path) -> Result<Outcome, CommandError> {
    let spec = config.spec()?;
    let length = config.positive("length", 16.0)?;
    let grid = config.grid(1024, length)?;
    let lambda = config.positive("lambda", 8.0)?;
    let beta = config.beta()?;
    let seed = config.seed(DEFAULT_SEED)?;
    let a = config.coefficient(grid.length())?;
    let solver_config = SolverConfig {
        eps: config.positive("eps", SolverConfig::default().eps)?,
        ..SolverConfig::default()
    };
    let j_max = admissible_j_max(&grid, &spec);
    let f = match config.get("field") {
        Some(path) => {
            let f = read_field(File::open(path)?)?;
            if f.grid() != &grid {
                return Err(CommandError::Usage(format!(
                    "field grid (d={}, n={}, L={}) differs from the configured grid",
                    f.grid().dim(),
                    f.grid().n(),
                    f.grid().length()
                )));
            }
            f
        }
        None => {
            let options = Options { seed, spec: spec.clone() };
            random_block_modes(grid, &spec, j_max, &mut options.rng(0))?
        }
    };
    let mut timings = Vec::new();
    let solver = timed(&mut timings, "setup", || ResolventSolver::new(grid, &a, &spec, solver_config))?;
    let solution = timed(&mut timings, "solve", || solver.solve(&f, lambda))?;
    let schauder = timed(&mut timings, "schauder", || solver.schauder_report(&f, lambda, beta))?;
    let bounds = solver.generator().apply_with_bounds(&solution.u);
    write_field(&solution.u, create(&dir.join("u.field"))?)?;
    write_field(&f, create(&dir.join("f.field"))?)?;
    write_csv_slice(&solution.u, grid.n() / 2, create(&dir.join("u.csv"))?)?;
    let relative = solution.residual / f.max_abs();
    let check = Check::new(
        "solve.residual",
        "iteration converged",
        relative <= 1e-8,
        "residual ≤ 1e-8·‖f‖_∞",
        json!({ "relative_residual": relative }),
    );
    let results = json!({
        "spec": spec.to_string(),
        "coefficient": a.label(),
        "grid": { "dim": grid.dim(), "n": grid.n(), "length": grid.length() },
        "lambda": lambda,
        "beta": beta,
        "j_max": j_max,
        "iterations": solution.iterations,
        "residual": solution.residual,
        "contraction_factor": solution.contraction_factor,
        "frozen_index": solution.frozen_index,
        "oscillation": solution.oscillation,
        "eps_bias": bounds.eps_bias,
        "far_bias": bounds.far_bias,
        "schauder": schauder,
    });
    Ok(Outcome {
        report: RunReport::new("solve", seed, config.entries().clone(), vec![check], results),
        timings,
    })
}

/// `f(x) = e^{−|x − c|²}`, the default observable of `simulate`.
struct Gaussian {
    center: [f64; 2],
}

impl PointFunction for Gaussian {
    fn value(&self, x: &[f64; 2]) -> f64 {
        let (dx, dy) = (x[0] - self.center[0], x[1] - self.center[1]);
        (-(dx * dx + dy * dy)).exp()
    }

    fn sup_abs(&self) -> f64 {
        1.0
    }

    fn sup_gradient(&self) -> f64 {
        (2.0f64 / std::f64::consts::E).sqrt()
    }
}

fn path_config(config: &ConfigMap, lambda: f64, paths: usize) -> Result<PathConfig, CommandError> {
    let seed = config.seed(DEFAULT_SEED)?;
    let mut pc = PathConfig::new(config.positive("lambda", lambda)?, config.count("paths", paths)?, seed);
    pc.horizon = config.positive("horizon", pc.horizon)?;
    pc.eps = config.positive("eps", pc.eps)?;
    pc.start = config.start()?;
    pc.validate()?;
    Ok(pc)
}

pub fn simulate(config: &ConfigMap, dir: &Path) -> Result<Outcome, CommandError> {
    let spec = config.spec()?;
    let a = config.coefficient(config.positive("length", 16.0)?)?;
    let pc = path_config(config, 1.0, 1000)?;
    let events = config.count("events", 0)?.min(pc.n_paths);
    let mut timings = Vec::new();
    let sim = ThinnedSimulator::new(&a, &spec, &pc)?;
    if events > 0 {
        let events_dir = dir.join("events");
        fs::create_dir_all(&events_dir)?;
        for i in 0..events {
            let path = sim.path(i as u64)?;
            let mut out = create(&events_dir.join(format!("path_{i:05}.csv")))?;
            path.write_csv(&mut out)?;
            out.flush()?;
        }
    }
    let f = Gaussian { center: pc.start };
    let estimate = timed(&mut timings, "resolvent_mc", || resolvent_mc(&f, &a, &spec, &pc))?;
    let results = json!({
        "spec": spec.to_string(),
        "coefficient": a.label(),
        "observable": "exp(-|x - start|^2)",
        "path_config": {
            "lambda": pc.lambda,
            "horizon": pc.horizon,
            "eps": pc.eps,
            "n_paths": pc.n_paths,
            "start": pc.start,
            "reach": sim.sampler().reach(),
        },
        "candidate_rate": sim.rate(),
        "far_mass": sim.sampler().far_mass(),
        "estimate": estimate,
        "event_files": events,
    });
    Ok(Outcome {
        report: RunReport::new("simulate", pc.seed, config.entries().clone(), Vec::new(), results),
        timings,
    })
}

pub fn krylov(config: &ConfigMap, dir: &Path) -> Result<Outcome, CommandError> {
    let spec = config.spec()?;
    let a = config.coefficient(config.positive("length", 16.0)?)?;
    let orlicz = config.orlicz()?;
    let radii = config.list("radii", &suites::montecarlo::KRYLOV_RADII)?;
    let pc = path_config(config, 16.0, 10_000)?;
    let mut timings = Vec::new();
    let r = timed(&mut timings, "krylov", || krylov_report(&radii, &orlicz, &a, &spec, &pc))?;
    let mut out = create(&dir.join("krylov.csv"))?;
    writeln!(out, "radius,estimate,standard_error,eps_bias,horizon_bias,orlicz_norm,ratio")?;
    for (i, radius) in r.radii.iter().enumerate() {
        let e = &r.estimates[i];
        writeln!(
            out,
            "{radius},{},{},{},{},{},{}",
            e.mean, e.standard_error, e.eps_bias, e.horizon_bias, r.norms[i], r.ratios[i]
        )?;
    }
    out.flush()?;
    let check = Check::new(
        "krylov.decay",
        "ratios bounded, slow decay",
        r.ratios.iter().all(|x| x.is_finite() && *x > 0.0) && r.fitted_exponent.abs() <= 0.15,
        "finite ratios; |fitted exponent| ≤ 0.15",
        json!({ "fitted_exponent": r.fitted_exponent, "max_ratio": r.max_ratio }),
    );
    let results = json!({ "spec": spec.to_string(), "coefficient": a.label(), "report": r });
    Ok(Outcome {
        report: RunReport::new("krylov", pc.seed, config.entries().clone(), vec![check], results),
        timings,
    })
}

pub fn counterexample(config: &ConfigMap, dir: &Path) -> Result<Outcome, CommandError> {
    let n = match config.get("grid") {
        None => 1 << 22,
        Some(v) => v.parse::<usize>().map_err(|_| ConfigError::BadValue {
            key: "grid".into(),
            value: v.into(),
            reason: "expected an integer".into(),
        })?,
    };
    let j_trunc = config.count("jtrunc", 20)? as i32;
    let mut timings = Vec::new();
    let ce = timed(&mut timings, "build", || counterexample_field(2.0 * std::f64::consts::PI, n, j_trunc))?;
    let r = timed(&mut timings, "growth", || ce.growth_report(8..=16))?;
    let mut out = create(&dir.join("growth.csv"))?;
    writeln!(out, "m,x,value,ratio_to_loglog,tail_bound")?;
    for (i, m) in r.m.iter().enumerate() {
        writeln!(out, "{m},{},{},{},{}", 2f64.powi(-m), r.values[i], r.ratios[i], r.tail_bounds[i])?;
    }
    out.flush()?;
    write_csv_slice(&ce.field, 0, create(&dir.join("field.csv"))?)?;
    let check = Check::new(
        "counterexample.growth",
        "bounded norm, double-log growth",
        r.x_norm_clamped <= 1.05 * r.profile_max && r.min_ratio > 0.0 && r.max_ratio <= 20.0 * r.min_ratio,
        "X norm ≤ 1.05·max|φ|; ratios positive within ×20",
        json!({ "min_ratio": r.min_ratio, "max_ratio": r.max_ratio }),
    );
    let results = json!({ "n": n, "j_trunc": j_trunc, "growth": r });
    Ok(Outcome {
        report: RunReport::new("counterexample", 0, config.entries().clone(), vec![check], results),
        timings,
    })
}

