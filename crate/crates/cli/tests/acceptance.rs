//! Acceptance suite. Each criterion is its own test and writes one
//! `criterion N: PASS|FAIL ...` line to stdout, uncaptured.

use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use jtcqed::{
    build_dimensionless_hamiltonian, build_liouvillian, eigen_scan_with, evolve, find_peaks, g2_at, number,
    power_spectrum, steady_state, thermal_channels, Channel, CoherenceTarget, Complex64, Density, DissipationParams,
    Error, EvolveOptions, G2Normalization, Lindbladian, Operator, QubitLevel, ReferenceState, ScanOptions, SpaceSpec,
    Spectrum,
};
use jtcqed_cli::presets;
use jtcqed_cli::run::{compute, liouvillian, PointOutput};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M = DMatrix<Complex64>;

fn report(n: usize, pass: bool, detail: &str) {
    let line = format!("criterion {n}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn kron(a: &M, b: &M) -> M {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    M::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

fn dense_generator(l: &Lindbladian) -> M {
    let h = l.hamiltonian().matrix();
    let d = h.nrows();
    let id = M::identity(d, d);
    let half = Complex64::new(0.5, 0.0);
    let mut s = (kron(&id, h) - kron(&h.transpose(), &id)) * Complex64::new(0.0, -1.0);
    for ch in l.channels() {
        let c = ch.op.matrix();
        let cdc = c.adjoint() * c;
        s += (kron(&c.conjugate(), c) - (kron(&id, &cdc) + kron(&cdc.transpose(), &id)) * half)
            * Complex64::new(ch.rate, 0.0);
    }
    s
}

fn taylor_expm(a: &M) -> M {
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * a.nrows() as f64;
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let b = a / Complex64::new(2f64.powi(s), 0.0);
    let n = a.nrows();
    let mut term = M::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &b / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

fn random_state(rng: &mut ChaCha8Rng, space: &SpaceSpec) -> Density {
    let d = space.total_dim();
    let psi = DVector::from_fn(d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let psi = &psi / Complex64::new(psi.norm(), 0.0);
    Density::pure(space, &psi).unwrap()
}

fn random_rates(rng: &mut ChaCha8Rng) -> DissipationParams<f64> {
    DissipationParams {
        kappa1: rng.gen_range(0.0005..0.05),
        kappa2: rng.gen_range(0.0005..0.05),
        gamma: rng.gen_range(0.0005..0.05),
        gamma_phi: rng.gen_range(0.0..0.1),
        n_th: rng.gen_range(0.0..0.5),
    }
}

#[test]
fn criterion_1_thermal_fixture() {
    let clock = Instant::now();
    let (d, n_th) = (5, 0.15);
    let space = SpaceSpec::new(vec![d], 0).unwrap();
    let l = Lindbladian::new(number(&space, 0).unwrap(), thermal_channels(&space, 0, 0.001, n_th).unwrap()).unwrap();
    let rho = steady_state(&l).unwrap();
    let r = n_th / (1.0 + n_th);
    let z: f64 = (0..d).map(|m| r.powi(m as i32)).sum();
    let moment = |f: fn(f64) -> f64| (0..d).map(|m| f(m as f64) * r.powi(m as i32) / z).sum::<f64>();
    let mean = moment(|m| m);
    let g2_oracle = moment(|m| m * (m - 1.0)) / (mean * mean);
    let n = rho.expect(&number(&space, 0).unwrap()).unwrap().re;
    let anchor = ReferenceState {
        time: 0.0,
        state: rho,
        settled: true,
    };
    let g = g2_at(&l, &anchor, CoherenceTarget::Resonator, &[0.0], G2Normalization::Standard, &EvolveOptions::exponential())
        .unwrap()
        .values[0];
    let secs = clock.elapsed().as_secs_f64();
    let (dn, dg) = ((n - mean).abs(), (g - g2_oracle).abs());
    let pass = dn <= 1e-9 && dg <= 1e-9 && secs < 1.0;
    report(1, pass, &format!("<n>={n:.12} (|err| {dn:.1e}), g2(0)={g:.12} (|err| {dg:.1e}), {secs:.3}s"));
    assert!(pass);
}

#[test]
fn criterion_2_propagator_equivalence() {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let times = [0.0, 0.5, 3.0, 12.0, 40.0, 100.0];
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let l = if case % 2 == 0 {
            let space = SpaceSpec::two_modes_one_qubit(2, 2).unwrap();
            let h =
                build_dimensionless_hamiltonian(&space, rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0), true, None)
                    .unwrap();
            build_liouvillian(&h, &random_rates(&mut rng)).unwrap()
        } else {
            let space = match case % 3 {
                0 => SpaceSpec::new(vec![3], 1).unwrap(),
                1 => SpaceSpec::new(vec![2, 2], 0).unwrap(),
                _ => SpaceSpec::new(vec![4], 1).unwrap(),
            };
            let d = space.total_dim();
            let mut rnd = |scale: f64| {
                M::from_fn(d, d, |_, _| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
            };
            let a = rnd(1.0);
            let h = Operator::new(space.clone(), (&a + a.adjoint()) * Complex64::new(0.5, 0.0)).unwrap();
            let channels = (0..3)
                .map(|_| Channel {
                    rate: 0.05,
                    op: Operator::new(space.clone(), rnd(0.5)).unwrap(),
                })
                .collect();
            Lindbladian::new(h, channels).unwrap()
        };
        let rho0 = random_state(&mut rng, l.space());
        let traj = evolve(&l, &rho0, &times, &EvolveOptions::default()).unwrap();
        let gen = dense_generator(&l);
        let v0 = M::from_column_slice(rho0.matrix().len(), 1, rho0.matrix().as_slice());
        for (t, state) in times.iter().zip(&traj.states) {
            let v = taylor_expm(&(&gen * Complex64::new(*t, 0.0))) * &v0;
            let err = state.matrix().iter().zip(v.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            worst = worst.max(err);
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    let pass = worst <= 1e-7 && secs < 30.0;
    report(2, pass, &format!("20 models, max elementwise error {worst:.2e}, {secs:.1}s"));
    assert!(pass);
}

#[test]
fn criterion_3_eigenscan_closed_forms() {
    let space = SpaceSpec::two_modes_one_qubit(2, 2).unwrap();
    let h = build_dimensionless_hamiltonian::<f64>(&space, 0.0, 0.0, true, None).unwrap();
    let e = h.eigen_lowest(5).unwrap();
    let want = [-0.5, 0.5, 0.5, 0.5, 1.5];
    let closed = e.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut shift: f64 = 0.0;
    for (k, delta, c) in [(0.3, 0.2, -3.7), (1.0 / 2f64.sqrt(), -0.5, 12.5), (0.05, 0.0, 0.25)] {
        let h = build_dimensionless_hamiltonian::<f64>(&space, k, delta, true, None).unwrap();
        let base = h.eigen_lowest(5).unwrap();
        let moved = (h + Operator::identity(&space).scale_real(c)).eigen_lowest(5).unwrap();
        for (a, b) in base.iter().zip(&moved) {
            shift = shift.max((b - a - c).abs());
        }
    }
    let pass = closed <= 1e-12 && shift <= 1e-10;
    report(3, pass, &format!("levels {e:?} (max err {closed:.1e}), shift invariance err {shift:.1e}"));
    assert!(pass);
}

/// Half-width of the widest symmetric window around Δ = 0 in which every
/// level stays within `tol` of its Δ = 0 value.
fn flat_half_width(deltas: &[f64], levels: &[Vec<f64>], tol: f64) -> f64 {
    let i0 = deltas.iter().position(|d| d.abs() < 1e-12).unwrap();
    let ok = |i: usize| levels[i].iter().zip(&levels[i0]).all(|(a, b)| (a - b).abs() <= tol);
    let mut w = 0;
    while i0 > w && i0 + w + 1 < deltas.len() && ok(i0 - w - 1) && ok(i0 + w + 1) {
        w += 1;
    }
    deltas[i0 + w]
}

#[test]
fn criterion_4_fig1_structure() {
    let clock = Instant::now();
    let mut widths = Vec::new();
    let mut splits = Vec::new();
    for name in ["fig1a", "fig1b"] {
        let cfg = presets::find(name).unwrap().runs.remove(0);
        let scan = ScanOptions {
            include_quadratic: cfg.model.include_quadratic,
            j_override: None,
        };
        let deltas = cfg.model.deltas();
        let t = eigen_scan_with(cfg.model.k, &deltas, 5, &cfg.model.space().unwrap(), &scan).unwrap();
        let i0 = t.deltas.iter().position(|d| d.abs() < 1e-12).unwrap();
        splits.push(t.levels[i0][3] - t.levels[i0][1]);
        widths.push(flat_half_width(&t.deltas, &t.levels, 0.05));
    }
    let secs = clock.elapsed().as_secs_f64();
    let ratio = widths[1] / widths[0];
    let pass = splits[0] > 1e-3 && ratio >= 2.0 && secs < 10.0;
    report(
        4,
        pass,
        &format!(
            "doublet splitting at delta=0: {:.4} (k=0.1/sqrt2); flat half-width {:.2} -> {:.2}, ratio {ratio:.2} (need >= 2)",
            splits[0], widths[0], widths[1]
        ),
    );
    assert!(pass);
}

fn fig2_spectra() -> &'static Vec<(String, Spectrum, f64)> {
    static CELL: OnceLock<Vec<(String, Spectrum, f64)>> = OnceLock::new();
    CELL.get_or_init(|| {
        ["fig2a", "fig2b"]
            .iter()
            .map(|name| {
                let clock = Instant::now();
                let cfg = presets::find(name).unwrap().runs.remove(0);
                let n = &cfg.numerics;
                let l = liouvillian(&cfg, 0.0, Some(0.0)).unwrap();
                let rho = steady_state(&l).unwrap();
                let opts = EvolveOptions {
                    method: n.method,
                    rtol: n.tolerances.rtol,
                    atol: n.tolerances.atol,
                };
                let s = power_spectrum(&l, &rho, n.field_mode, n.tau_max, n.n_samples, n.correlation_ordering, &opts)
                    .unwrap();
                (name.to_string(), s, clock.elapsed().as_secs_f64())
            })
            .collect()
    })
}

const DOMINANT: f64 = 0.3;

#[test]
fn criterion_5_fig2_structure() {
    let spectra = fig2_spectra();
    let counts: Vec<usize> = spectra.iter().map(|(_, s, _)| find_peaks(s, DOMINANT).len()).collect();
    let kappa = presets::find("fig2a").unwrap().runs[0].dissipation.kappa1;
    let tau_ok = spectra.iter().all(|(_, s, _)| s.meta.tau_max >= 10.0 / kappa);
    let slowest = spectra.iter().map(|(_, _, t)| *t).fold(0.0, f64::max);
    let pass = counts[0] == 2 && counts[1] >= 4 && tau_ok && slowest < 300.0;
    report(
        5,
        pass,
        &format!(
            "dominant peaks (prominence >= {DOMINANT} of max): k=0.05/sqrt2 -> {} (need 2), k=0.05 -> {} (need >= 4); resolution {:.2e}, {slowest:.0}s per spectrum",
            counts[0], counts[1], spectra[0].1.meta.resolution
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_wiener_khinchin() {
    let mut lines = Vec::new();
    let mut checked = 0;
    let mut pass = true;
    let cavity = {
        let space = SpaceSpec::new(vec![10], 0).unwrap();
        Lindbladian::new(number(&space, 0).unwrap(), thermal_channels(&space, 0, 0.1, 0.2).unwrap()).unwrap()
    };
    let parity = {
        let space = SpaceSpec::two_modes_one_qubit(3, 3).unwrap();
        let h = build_dimensionless_hamiltonian(&space, 0.05 / 2f64.sqrt(), 0.0, false, Some(0.0)).unwrap();
        let rates = DissipationParams {
            kappa1: 0.05,
            kappa2: 0.05,
            gamma: 0.05,
            gamma_phi: 0.01,
            n_th: 0.15,
        };
        build_liouvillian(&h, &rates).unwrap()
    };
    let mut fixtures: Vec<(String, Spectrum)> = Vec::new();
    for (name, l, tau_max, n) in [("thermal cavity", &cavity, 400.0, 4096), ("linear coupling", &parity, 1500.0, 8192)] {
        let rho = steady_state(l).unwrap();
        let s = power_spectrum(l, &rho, Default::default(), tau_max, n, Default::default(), &EvolveOptions::exponential())
            .unwrap();
        fixtures.push((name.to_string(), s));
    }
    fixtures.extend(fig2_spectra().iter().map(|(n, s, _)| (n.clone(), s.clone())));
    for (name, s) in &fixtures {
        if !s.meta.decayed() {
            lines.push(format!("{name}: excluded (tail {:.1e})", s.meta.tail_ratio));
            continue;
        }
        checked += 1;
        let ratio = s.integral() / (2.0 * std::f64::consts::PI * s.meta.c0.re);
        pass &= (ratio - 1.0).abs() <= 0.02;
        lines.push(format!("{name}: ratio {ratio:.6}"));
    }
    pass &= checked > 0;
    report(6, pass, &lines.join("; "));
    assert!(pass);
}

fn fig4_imbalance(name: &str) -> &'static PointOutput {
    static CELLS: OnceLock<Vec<(String, PointOutput)>> = OnceLock::new();
    let all = CELLS.get_or_init(|| {
        ["fig4a", "fig4b", "fig4c"]
            .iter()
            .map(|n| {
                let cfg = presets::find(n).unwrap().runs.remove(0);
                (n.to_string(), compute(&cfg, None).unwrap().remove(0))
            })
            .collect()
    });
    &all.iter().find(|(n, _)| n == name).unwrap().1
}

fn z_column(csv: &str) -> Vec<Option<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').nth(3).and_then(|z| z.parse().ok())).collect()
}

#[test]
fn criterion_7_fig4_suite() {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, want) in [("fig4a", "oscillatory_decaying"), ("fig4b", "partially_localized"), ("fig4c", "self_trapped")] {
        let out = fig4_imbalance(name);
        let label = out.notes["classification"].as_str().unwrap_or("none");
        let s = &out.notes["summary"];
        pass &= label == want;
        parts.push(format!(
            "{name} z: {label} (late z in [{:.3}, {:.3}], early max|z| {:.3}, sign changes {})",
            s["late_min"].as_f64().unwrap_or(f64::NAN),
            s["late_max"].as_f64().unwrap_or(f64::NAN),
            s["early_max_abs"].as_f64().unwrap_or(f64::NAN),
            s["sign_changes"]
        ));
    }
    let g2cfg = presets::find("fig4c").unwrap().runs.remove(1);
    match compute(&g2cfg, None) {
        Ok(out) => {
            let first = out[0].csv.lines().nth(1).unwrap();
            let g2r: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
            pass &= g2r < 0.5;
            parts.push(format!("fig4c g2_r(0) = {g2r:.4} at t* = {} (need < 0.5)", out[0].notes["t_star"]));
        }
        Err(e) => {
            pass = false;
            parts.push(format!("fig4c g2 failed: {e}"));
        }
    }
    report(7, pass, &parts.join("; "));
    assert!(pass);
}

#[test]
fn criterion_8_cptp_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut drift, mut min_eig, mut residual): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut unique = 0;
    for _ in 0..100 {
        let dims = [(2, 2), (2, 3), (3, 2), (3, 3)][rng.gen_range(0..4)];
        let space = SpaceSpec::two_modes_one_qubit(dims.0, dims.1).unwrap();
        let k = rng.gen_range(0.0..1.0);
        let delta = rng.gen_range(-1.0..1.0);
        let j = if rng.gen_bool(0.3) { Some(rng.gen_range(-0.5..0.5)) } else { None };
        let h = build_dimensionless_hamiltonian(&space, k, delta, rng.gen_bool(0.8), j).unwrap();
        let l = build_liouvillian(&h, &random_rates(&mut rng)).unwrap();
        let rho0 = if rng.gen_bool(0.5) {
            random_state(&mut rng, &space)
        } else {
            Density::basis_state(&space, &[1, 0], &[QubitLevel::Excited]).unwrap()
        };
        let t = rng.gen_range(1.0..60.0);
        let traj = evolve(&l, &rho0, &[0.0, t / 3.0, t], &EvolveOptions::default()).unwrap();
        for rho in &traj.states {
            drift = drift.max((rho.trace() - 1.0).abs());
            min_eig = min_eig.min(rho.min_eigenvalue());
        }
        match steady_state(&l) {
            Ok(ss) => {
                unique += 1;
                residual = residual.max(l.residual(&ss));
            }
            Err(Error::DegenerateSteadyState(_)) => {}
            Err(e) => panic!("steady state: {e}"),
        }
    }
    let pass = drift <= 1e-8 && min_eig >= -1e-7 && residual <= 1e-10;
    report(
        8,
        pass,
        &format!("100 configs: trace drift {drift:.1e}, min eigenvalue {min_eig:.1e}, steady-state residual {residual:.1e} ({unique} unique kernels)"),
    );
    assert!(pass);
}

#[test]
fn criterion_9_truncation_convergence() {
    let base = z_column(&fig4_imbalance("fig4a").csv);
    let mut cfg = presets::find("fig4a").unwrap().runs.remove(0);
    cfg.model.fock_dims = [7, 7];
    let big = z_column(&compute(&cfg, None).unwrap()[0].csv);
    let sup = base
        .iter()
        .zip(&big)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    let pass = base.len() == big.len() && sup < 0.01;
    report(9, pass, &format!("fig4a sup|z[7,7] - z[5,5]| = {sup:.2e} over {} samples", base.len()));
    assert!(pass);
}
