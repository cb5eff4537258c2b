//! Bundled parameter sets of the published figures.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use std::path::Path;

use jtcqed::{DissipationParams, Method};

use crate::config::{Grid, ModelConfig, RunConfig, Task};

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    /// Coupling as printed, e.g. `0.1/√2`.
    pub k_label: &'static str,
    pub runs: Vec<RunConfig>,
}

const NAMES: [&str; 9] = ["fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c"];

fn eigenscan(name: &str, k: f64) -> RunConfig {
    let mut m = ModelConfig::new(k);
    m.delta_grid = Some(Grid::Range {
        start: -1.0,
        stop: 1.0,
        points: 201,
    });
    m.fock_dims = [2, 2];
    let mut cfg = RunConfig::new(Task::Eigenscan, m);
    cfg.output.name = Some(name.to_string());
    cfg
}

fn spectrum(name: &str, k: f64) -> RunConfig {
    let mut m = ModelConfig::new(k);
    m.delta = Some(0.0);
    m.j_grid = Some(Grid::List(vec![0.0, 0.5]));
    let mut cfg = RunConfig::new(Task::Spectrum, m);
    cfg.numerics.method = Method::Exponential;
    cfg.output.name = Some(name.to_string());
    cfg
}

fn trapping(name: &str, k: f64, gamma_phi: f64) -> Vec<RunConfig> {
    let mut m = ModelConfig::new(k);
    m.delta = Some(0.01);
    let dissipation = DissipationParams {
        gamma_phi,
        ..DissipationParams::default()
    };
    let mut imb = RunConfig::new(Task::Imbalance, m.clone());
    imb.dissipation = dissipation;
    imb.output.name = Some(format!("{name}_imbalance"));
    let mut g2 = RunConfig::new(Task::G2, m);
    g2.dissipation = dissipation;
    g2.numerics.times = Grid::Range {
        start: 0.0,
        stop: 600.0,
        points: 601,
    };
    g2.numerics.method = Method::Exponential;
    g2.output.name = Some(format!("{name}_g2"));
    vec![imb, g2]
}

pub fn find(name: &str) -> Option<Preset> {
    let (k_label, runs) = match name {
        "fig1a" => ("0.1/√2", vec![eigenscan(name, 0.1 / SQRT_2)]),
        "fig1b" => ("1/√2", vec![eigenscan(name, 1.0 / SQRT_2)]),
        "fig2a" => ("0.05/√2", vec![spectrum(name, 0.05 / SQRT_2)]),
        "fig2b" => ("0.05", vec![spectrum(name, 0.05)]),
        "fig3a" => ("0.1/√2", vec![spectrum(name, 0.1 / SQRT_2)]),
        "fig3b" => ("0.5/√2", vec![spectrum(name, 0.5 / SQRT_2)]),
        "fig4a" => ("0.01/√2", trapping(name, 0.01 / SQRT_2, 0.01)),
        "fig4b" => ("0.1/√2", trapping(name, 0.1 / SQRT_2, 0.01)),
        "fig4c" => ("1/√2", trapping(name, 1.0 / SQRT_2, 0.1)),
        _ => return None,
    };
    let name = NAMES.iter().find(|n| **n == name)?;
    Some(Preset { name, k_label, runs })
}

pub fn all() -> Vec<Preset> {
    NAMES.iter().filter_map(|n| find(n)).collect()
}

/// Copies of the preset runs writing into `dir`.
pub fn with_output(preset: &Preset, dir: &Path) -> Vec<RunConfig> {
    preset
        .runs
        .iter()
        .cloned()
        .map(|mut cfg| {
            cfg.output.path = dir.to_path_buf();
            cfg
        })
        .collect()
}

fn grid_label(g: &Grid) -> String {
    match g {
        Grid::List(v) => {
            let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}", items.join(", "))
        }
        Grid::Range { start, stop, points } => format!("[{start},{stop}]x{points}"),
    }
}

/// One row per preset.
pub fn table() -> String {
    let mut out = format!(
        "{:<6} {:<15} {:<10} {:<16} {:<11} {:<6} {:<30}\n",
        "name", "tasks", "k", "delta", "J", "fock", "dissipation"
    );
    for p in all() {
        let first = &p.runs[0];
        let m = &first.model;
        let tasks: Vec<&str> = p.runs.iter().map(|r| r.task.name()).collect();
        let delta = match (&m.delta, &m.delta_grid) {
            (_, Some(g)) => format!("Δ∈{}", grid_label(g)),
            (d, None) => format!("Δ={}", d.unwrap_or_default()),
        };
        let j = match (&m.j_override, &m.j_grid) {
            (_, Some(g)) => format!("J∈{}", grid_label(g)),
            (Some(j), None) => format!("J={j}"),
            (None, None) => "J=Δ/2".to_string(),
        };
        let d = &first.dissipation;
        let diss = format!(
            "κ={} γ={} γ_φ={} n_th={}",
            d.kappa1, d.gamma, d.gamma_phi, d.n_th
        );
        let _ = writeln!(
            out,
            "{:<6} {:<15} {:<10} {:<16} {:<11} {:<6} {}",
            p.name,
            tasks.join("+"),
            format!("k={}", p.k_label),
            delta,
            j,
            format!("[{},{}]", m.fock_dims[0], m.fock_dims[1]),
            diss
        );
    }
    out
}
