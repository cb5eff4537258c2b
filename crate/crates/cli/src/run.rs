//! Executes a validated [`RunConfig`] and writes CSV files plus a manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use jtcqed::{
    build_dimensionless_hamiltonian, build_liouvillian, derive_effective, eigen_scan_with, find_peaks, g2_targets,
    imbalance, power_spectrum, settle, steady_state, CoherenceTarget, Density, EffectiveNormalization, EvolveOptions,
    Lindbladian, Params, ScanOptions,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{classify, TrappingThresholds};
use crate::config::{RunConfig, Task};
use crate::error::CliError;

pub const WORKERS_ENV: &str = "JTCQED_WORKERS";

/// One grid point of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point {
    /// `None` for eigenscans, which sweep the whole detuning grid per file.
    pub delta: Option<f64>,
    pub j: Option<f64>,
}

/// Output of one grid point before anything touches the disk.
#[derive(Clone, Debug)]
pub struct PointOutput {
    pub point: Point,
    pub file: String,
    pub csv: String,
    pub notes: Value,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
    task: Task,
    started_unix: u64,
    wall_clock_seconds: f64,
    workers: usize,
    config: &'a RunConfig,
    outputs: Vec<Value>,
}

/// Number formatting shared by every CSV column.
pub fn fmt_num(x: f64, precision: usize) -> String {
    format!("{:.*e}", precision - 1, x)
}

fn csv_row(out: &mut String, cells: &[Option<f64>], precision: usize) {
    let row: Vec<String> = cells.iter().map(|c| c.map_or(String::new(), |x| fmt_num(x, precision))).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

/// Worker count from the environment, `None` when unset.
pub fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

/// Grid points in key order: detuning outer, hopping inner.
pub fn points(cfg: &RunConfig) -> Vec<Point> {
    let js = cfg.model.hoppings();
    if cfg.task == Task::Eigenscan {
        return js.into_iter().map(|j| Point { delta: None, j }).collect();
    }
    cfg.model
        .deltas()
        .into_iter()
        .flat_map(|d| js.iter().map(move |&j| Point { delta: Some(d), j }))
        .collect()
}

fn file_name(cfg: &RunConfig, p: &Point) -> String {
    let mut name = cfg.stem();
    if cfg.model.delta_grid.is_some() && cfg.task != Task::Eigenscan {
        let _ = write!(name, "_delta{}", p.delta.unwrap_or_default());
    }
    if cfg.model.j_grid.is_some() {
        let _ = write!(name, "_j{}", p.j.unwrap_or_default());
    }
    name.push_str(".csv");
    name
}

fn options(cfg: &RunConfig) -> EvolveOptions<f64> {
    EvolveOptions {
        method: cfg.numerics.method,
        rtol: cfg.numerics.tolerances.rtol,
        atol: cfg.numerics.tolerances.atol,
    }
}

/// Liouvillian of the dimensionless model at one grid point.
pub fn liouvillian(cfg: &RunConfig, delta: f64, j: Option<f64>) -> Result<Lindbladian, CliError> {
    let space = cfg.model.space()?;
    let h = build_dimensionless_hamiltonian(&space, cfg.model.k, delta, cfg.model.include_quadratic, j)?;
    Ok(build_liouvillian(&h, &cfg.dissipation)?)
}

fn initial_state(cfg: &RunConfig) -> Result<Density, CliError> {
    let s = cfg.numerics.initial_state;
    Ok(Density::basis_state(&cfg.model.space()?, &[s.n1, s.n2], &[s.qubit])?)
}

fn effective(cfg: &RunConfig, delta: f64) -> Value {
    let norm = if cfg.model.obrien_normalization {
        EffectiveNormalization::Obrien
    } else {
        EffectiveNormalization::AsPrinted
    };
    let p = Params::symmetric(1.0, 1.0, 1.0 - delta, cfg.model.k);
    match derive_effective(&p, norm) {
        Ok(e) => json!({ "normalization": norm, "k1": p.k1, "k2": p.k2, "omega_1": p.omega_1, "omega_2": p.omega_2, "params": e }),
        Err(e) => json!({ "normalization": norm, "error": e.to_string() }),
    }
}

fn run_point(cfg: &RunConfig, point: Point) -> Result<PointOutput, CliError> {
    let prec = cfg.output.precision;
    let n = &cfg.numerics;
    let opts = options(cfg);
    let mut csv = String::new();
    let notes = match (cfg.task, point.delta) {
        (Task::Eigenscan, _) => {
            let deltas = cfg.model.deltas();
            let scan = ScanOptions {
                include_quadratic: cfg.model.include_quadratic,
                j_override: point.j,
            };
            let table = eigen_scan_with(cfg.model.k, &deltas, n.eigen_count, &cfg.model.space()?, &scan)?;
            let header: Vec<String> = (1..=n.eigen_count).map(|i| format!("E{i}")).collect();
            let _ = writeln!(csv, "delta,{}", header.join(","));
            for (d, row) in table.deltas.iter().zip(&table.levels) {
                let cells: Vec<Option<f64>> = std::iter::once(*d).chain(row.iter().copied()).map(Some).collect();
                csv_row(&mut csv, &cells, prec);
            }
            json!({ "rows": table.deltas.len(), "levels": n.eigen_count })
        }
        (Task::Spectrum, Some(delta)) => {
            let l = liouvillian(cfg, delta, point.j)?;
            let rho = steady_state(&l)?;
            let spec = power_spectrum(&l, &rho, n.field_mode, n.tau_max, n.n_samples, n.correlation_ordering, &opts)?;
            csv.push_str("omega,power\n");
            for (w, p) in spec.omegas.iter().zip(&spec.values) {
                csv_row(&mut csv, &[Some(*w), Some(*p)], prec);
            }
            let peaks = find_peaks(&spec, n.peak_prominence);
            let m = &spec.meta;
            json!({
                "steady_state_residual": l.residual(&rho),
                "d_tau": m.d_tau,
                "resolution": m.resolution,
                "c0": [m.c0.re, m.c0.im],
                "tail_ratio": m.tail_ratio,
                "wk_ratio": m.wk_ratio,
                "warnings": m.warnings,
                "peak_prominence": n.peak_prominence,
                "peaks": peaks,
                "effective": effective(cfg, delta),
            })
        }
        (Task::G2, Some(delta)) => {
            let l = liouvillian(cfg, delta, point.j)?;
            let anchor = settle(&l, &initial_state(cfg)?, &n.g2_reference, &opts)?;
            let taus = n.times.values();
            let targets = [CoherenceTarget::Resonator, CoherenceTarget::Qubit];
            let series = g2_targets(&l, &anchor, &targets, &taus, n.g2_normalization, &opts)?;
            csv.push_str("tau,g2_resonator,g2_qubit\n");
            for (i, tau) in taus.iter().enumerate() {
                csv_row(&mut csv, &[Some(*tau), Some(series[0].values[i]), Some(series[1].values[i])], prec);
            }
            let mut warnings = Vec::new();
            if !anchor.settled {
                warnings.push(format!("state had not settled when the search stopped at t = {}", anchor.time));
            }
            json!({
                "t_star": anchor.time,
                "settled": anchor.settled,
                "reference": n.g2_reference,
                "normalization": n.g2_normalization,
                "warnings": warnings,
                "effective": effective(cfg, delta),
            })
        }
        (Task::Imbalance, Some(delta)) => {
            let l = liouvillian(cfg, delta, point.j)?;
            let series = imbalance(&l, &initial_state(cfg)?, &n.times.values(), &opts)?;
            csv.push_str("t,n1,n2,z\n");
            for i in 0..series.times.len() {
                csv_row(&mut csv, &[Some(series.times[i]), Some(series.n1[i]), Some(series.n2[i]), series.z[i]], prec);
            }
            let th = TrappingThresholds::default();
            let summary = series.summary(th.window_fraction);
            json!({
                "thresholds": th,
                "summary": summary,
                "classification": summary.map(|s| classify(&s, &th)),
                "effective": effective(cfg, delta),
            })
        }
        (_, None) => unreachable!("only eigenscans have detuning-free points"),
    };
    Ok(PointOutput {
        point,
        file: file_name(cfg, &point),
        csv,
        notes,
    })
}

/// Runs every grid point of `cfg` without writing anything. Results come back
/// in [`points`] order whatever the worker count.
pub fn compute(cfg: &RunConfig, workers: Option<usize>) -> Result<Vec<PointOutput>, CliError> {
    cfg.validate()?;
    let pts = points(cfg);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| pts.par_iter().map(|&p| run_point(cfg, p)).collect())
}

fn io_err(context: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        context: context.display().to_string(),
        source,
    }
}

/// Writes through a temporary sibling so readers never see partial files.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn run_config(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let workers = workers_from_env()?;
    let outputs = compute(cfg, workers)?;
    let dir = &cfg.output.path;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::with_capacity(outputs.len());
    for o in &outputs {
        let path = dir.join(&o.file);
        write_atomic(&path, o.csv.as_bytes())?;
        files.push(path);
    }
    let manifest = Manifest {
        tool: "jtcqed",
        version: env!("CARGO_PKG_VERSION"),
        library_version: jtcqed::VERSION,
        task: cfg.task,
        started_unix: started,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        workers: workers.unwrap_or_else(rayon::current_num_threads),
        config: cfg,
        outputs: outputs
            .iter()
            .map(|o| json!({ "file": o.file, "delta": o.point.delta, "j": o.point.j, "notes": o.notes }))
            .collect(),
    };
    let manifest_path = dir.join(format!("{}.manifest.json", cfg.stem()));
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&manifest_path, text.as_bytes())?;
    Ok(RunReport {
        files,
        manifest: manifest_path,
    })
}

pub fn run_path(path: &Path) -> Result<RunReport, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    run_config(&RunConfig::from_toml(&text)?)
}
