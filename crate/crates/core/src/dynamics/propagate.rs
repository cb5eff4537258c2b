use std::collections::hash_map::Entry;
use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::expm::expm;
use super::ode::Dopri;
use super::superop::{from_real, functional, split_hermitian, to_real, trace_functional};
use super::Liouvillian;
use crate::analysis::CorrelationSeries;
use crate::error::{Error, Result};
use crate::hilbert::{hermitian_defect, max_abs, trace_product, DensityMatrix, QOperator};
use crate::scalar::{Real, C};

/// Largest Hilbert-space dimension for which dense `d² × d²` superoperator
/// exponentials are formed.
pub const MAX_EXPONENTIAL_DIM: usize = 64;

/// Propagation scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Embedded Runge–Kutta with error control, matrix-free.
    #[default]
    Adaptive,
    /// Dense superoperator exponential; exact up to rounding but needs
    /// `total_dim ≤ MAX_EXPONENTIAL_DIM`.
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions<T> {
    pub method: Method,
    pub rtol: T,
    pub atol: T,
}

impl<T: Real> Default for EvolveOptions<T> {
    fn default() -> Self {
        Self {
            method: Method::Adaptive,
            rtol: T::lit(1e-8),
            atol: T::lit(1e-10),
        }
    }
}

impl<T: Real> EvolveOptions<T> {
    pub fn exponential() -> Self {
        Self {
            method: Method::Exponential,
            ..Self::default()
        }
    }
}

/// States at the requested times.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix<T>>,
}

/// Expectation values `values[observable][time]`.
#[derive(Clone, Debug)]
pub struct ExpectationSeries<T: Real> {
    pub times: Vec<T>,
    pub values: Vec<Vec<C<T>>>,
}

pub(crate) fn check_times<T: Real>(times: &[T], what: &str) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Argument(format!("{what} grid is empty")));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Argument(format!("{what} grid has non-finite entries")));
    }
    if times[0] < T::zero() {
        return Err(Error::Argument(format!("{what} grid starts before 0")));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument(format!("{what} grid is not strictly increasing")));
    }
    Ok(())
}

/// Spacing of a uniform grid starting at zero, if it is one.
fn uniform_step<T: Real>(times: &[T]) -> Option<T> {
    if times.len() < 2 || times[0] != T::zero() {
        return None;
    }
    let dt = times[1] - times[0];
    let last = times[times.len() - 1];
    let tol = T::tol(1e-9) * last.abs().max(T::one());
    times
        .iter()
        .enumerate()
        .all(|(j, &t)| (t - dt * T::lit(j as f64)).abs() <= tol)
        .then_some(dt)
}

fn require_dense_size<T: Real>(l: &Liouvillian<T>) -> Result<()> {
    if l.dim() > MAX_EXPONENTIAL_DIM {
        return Err(Error::Argument(format!(
            "exponential propagation needs total_dim <= {MAX_EXPONENTIAL_DIM}, got {}; use the adaptive method",
            l.dim()
        )));
    }
    Ok(())
}

/// `exp(L·dt)` in Hermitian coordinates.
pub(crate) struct Propagator<T: Real> {
    matrix: DMatrix<T>,
}

impl<T: Real> Propagator<T> {
    pub fn new(l: &Liouvillian<T>, dt: T) -> Result<Self> {
        require_dense_size(l)?;
        Ok(Self {
            matrix: expm(&(l.real_form() * dt))?,
        })
    }

    pub fn apply(&self, v: &DMatrix<T>) -> DMatrix<T> {
        &self.matrix * v
    }
}

/// Fixed-step evolution by either scheme; used for coarse scans.
pub(crate) enum Stepper<'a, T: Real> {
    Exponential { prop: Propagator<T>, d: usize },
    Adaptive { ode: Dopri<'a, T>, dt: T, t: T },
}

impl<'a, T: Real> Stepper<'a, T> {
    pub fn new(l: &'a Liouvillian<T>, dt: T, opts: &EvolveOptions<T>) -> Result<Self> {
        Ok(match opts.method {
            Method::Exponential => Stepper::Exponential {
                prop: Propagator::new(l, dt)?,
                d: l.dim(),
            },
            Method::Adaptive => Stepper::Adaptive {
                ode: Dopri::new(l, opts.rtol, opts.atol),
                dt,
                t: T::zero(),
            },
        })
    }

    /// Advances a Hermitian matrix by one step.
    pub fn step(&mut self, x: &DMatrix<C<T>>) -> Result<DMatrix<C<T>>> {
        match self {
            Stepper::Exponential { prop, d } => {
                let v = to_real(x);
                let out = prop.apply(&DMatrix::from_column_slice(v.len(), 1, v.as_slice()));
                Ok(from_real(out.as_slice(), *d))
            }
            Stepper::Adaptive { ode, dt, t } => {
                let mut y = x.clone();
                let target = *t + *dt;
                ode.advance(&mut y, t, target)?;
                Ok(y)
            }
        }
    }
}

/// Evaluates `tr(A_q e^{L t_j} X_p)` for every input, observable and time;
/// result indexed `[input][observable][time]`.
pub(crate) fn propagate_functionals<T: Real>(
    l: &Liouvillian<T>,
    inputs: &[DMatrix<C<T>>],
    observables: &[&DMatrix<C<T>>],
    times: &[T],
    opts: &EvolveOptions<T>,
) -> Result<Vec<Vec<Vec<C<T>>>>> {
    check_times(times, "time")?;
    match opts.method {
        Method::Adaptive => inputs
            .iter()
            .map(|x| {
                let mut ode = Dopri::new(l, opts.rtol, opts.atol);
                let mut y = x.clone();
                let mut t = T::zero();
                let mut out = vec![Vec::with_capacity(times.len()); observables.len()];
                for &target in times {
                    ode.advance(&mut y, &mut t, target)?;
                    for (q, a) in observables.iter().enumerate() {
                        out[q].push(trace_product(a, &y));
                    }
                }
                Ok(out)
            })
            .collect(),
        Method::Exponential => exponential_functionals(l, inputs, observables, times),
    }
}

fn exponential_functionals<T: Real>(
    l: &Liouvillian<T>,
    inputs: &[DMatrix<C<T>>],
    observables: &[&DMatrix<C<T>>],
    times: &[T],
) -> Result<Vec<Vec<Vec<C<T>>>>> {
    require_dense_size(l)?;
    let d = l.dim();
    let n = d * d;

    // Hermitian parts of every input as columns; track which inputs need an
    // imaginary part.
    let mut columns: Vec<DVector<T>> = Vec::new();
    let mut layout = Vec::with_capacity(inputs.len());
    for x in inputs {
        let scale = max_abs(x).max(T::default_epsilon());
        if hermitian_defect(x) <= T::tol(1e-14) * scale {
            let herm = (x + x.adjoint()) * Complex::new(T::lit(0.5), T::zero());
            layout.push((columns.len(), None));
            columns.push(to_real(&herm));
        } else {
            let (h1, h2) = split_hermitian(x);
            layout.push((columns.len(), Some(columns.len() + 1)));
            columns.push(to_real(&h1));
            columns.push(to_real(&h2));
        }
    }
    let mut fcols = Vec::with_capacity(2 * observables.len());
    for a in observables {
        let (re, im) = functional(a);
        fcols.push(re);
        fcols.push(im);
    }
    let mut x = DMatrix::from_columns(&columns);
    let f = DMatrix::from_columns(&fcols);

    let mut t0 = T::zero();
    if times[0] > T::zero() {
        x = Propagator::new(l, times[0])?.apply(&x);
        t0 = times[0];
    }
    let shifted: Vec<T> = times.iter().map(|&t| t - t0).collect();

    // raw[j] = Fᵀ e^{L t_j} X
    let raw: Vec<DMatrix<T>> = if let Some(dt) = uniform_step(&shifted) {
        let p = Propagator::new(l, dt)?.matrix;
        baby_giant(&p, &x, &f, times.len())
    } else {
        let mut cache: HashMap<u64, Propagator<T>> = HashMap::new();
        let mut out = Vec::with_capacity(times.len());
        let mut prev = T::zero();
        for &t in &shifted {
            let gap = t - prev;
            if gap > T::zero() {
                let key = gap.to_f64_lossy().to_bits();
                let prop = match cache.entry(key) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => e.insert(Propagator::new(l, gap)?),
                };
                x = prop.apply(&x);
            }
            out.push(f.transpose() * &x);
            prev = t;
        }
        out
    };
    debug_assert!(raw.iter().all(|m| m.nrows() == f.ncols() && m.ncols() == x.ncols()));
    let _ = n;

    let value = |m: &DMatrix<T>, q: usize, col: usize| Complex::new(m[(2 * q, col)], m[(2 * q + 1, col)]);
    let i = Complex::new(T::zero(), T::one());
    Ok(layout
        .iter()
        .map(|&(c1, c2)| {
            (0..observables.len())
                .map(|q| {
                    raw.iter()
                        .map(|m| {
                            let mut v = value(m, q, c1);
                            if let Some(c2) = c2 {
                                v += i * value(m, q, c2);
                            }
                            v
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

/// `Fᵀ Pʲ X` for `j < count` by baby-step/giant-step: with `j = s·m + r`,
/// `Fᵀ Pʲ X = ((Pᵀ)ʳ F)ᵀ (Pᵐ)ˢ X`. The block size `m` (a power of two, so
/// `Pᵐ` costs `log₂ m` squarings) minimises a flop estimate.
fn baby_giant<T: Real>(p: &DMatrix<T>, x: &DMatrix<T>, f: &DMatrix<T>, count: usize) -> Vec<DMatrix<T>> {
    let n = p.nrows() as f64;
    let (pin, qin) = (x.ncols() as f64, f.ncols() as f64);
    let cost = |m: usize| {
        let squarings = (m as f64).log2();
        2.0 * squarings * n * n * n + (m as f64 * qin + (count as f64 / m as f64).ceil() * pin) * n * n
    };
    let mut m = 1usize;
    let mut best = cost(1);
    let mut cand = 2usize;
    while cand <= count {
        let c = cost(cand);
        if c < best {
            best = c;
            m = cand;
        }
        cand *= 2;
    }

    let mut baby = Vec::with_capacity(m);
    let mut u = f.clone();
    if m > 1 {
        let pt = p.transpose();
        for r in 0..m {
            if r > 0 {
                u = &pt * &u;
            }
            baby.push(u.transpose());
        }
    } else {
        baby.push(u.transpose());
    }
    let mut giant = p.clone();
    let mut k = 1;
    while k < m {
        giant = &giant * &giant;
        k *= 2;
    }

    let mut out = Vec::with_capacity(count);
    let mut v = x.clone();
    let blocks = count.div_ceil(m);
    for s in 0..blocks {
        for (r, b) in baby.iter().enumerate() {
            if s * m + r >= count {
                break;
            }
            out.push(b * &v);
        }
        if s + 1 < blocks {
            v = &giant * &v;
        }
    }
    out
}

/// Solves the master equation for `ρ(t)` at each requested time.
///
/// Times must be strictly increasing and start at or after 0; `ρ(0) = rho0`.
pub fn evolve<T: Real>(
    l: &Liouvillian<T>,
    rho0: &DensityMatrix<T>,
    times: &[T],
    opts: &EvolveOptions<T>,
) -> Result<Trajectory<T>> {
    check_times(times, "time")?;
    if rho0.space() != l.space() {
        return Err(Error::Argument("initial state lives on a different space".into()));
    }
    rho0.validate()?;
    let space = l.space().clone();
    let mut states = Vec::with_capacity(times.len());
    match opts.method {
        Method::Adaptive => {
            let mut ode = Dopri::new(l, opts.rtol, opts.atol);
            let mut y = rho0.matrix().clone();
            let mut t = T::zero();
            for &target in times {
                ode.advance(&mut y, &mut t, target)?;
                states.push(DensityMatrix::new_unchecked(space.clone(), y.clone())?);
            }
        }
        Method::Exponential => {
            let d = l.dim();
            let v = to_real(rho0.matrix());
            let mut x = DMatrix::from_column_slice(v.len(), 1, v.as_slice());
            let mut cache: HashMap<u64, Propagator<T>> = HashMap::new();
            let mut prev = T::zero();
            for &t in times {
                let gap = t - prev;
                if gap > T::zero() {
                    let key = gap.to_f64_lossy().to_bits();
                    let prop = match cache.entry(key) {
                        Entry::Occupied(e) => e.into_mut(),
                        Entry::Vacant(e) => e.insert(Propagator::new(l, gap)?),
                    };
                    x = prop.apply(&x);
                }
                states.push(DensityMatrix::new_unchecked(space.clone(), from_real(x.as_slice(), d))?);
                prev = t;
            }
        }
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
    })
}

/// Expectation values `tr(A ρ(t))` without storing the states.
pub fn evolve_expect<T: Real>(
    l: &Liouvillian<T>,
    rho0: &DensityMatrix<T>,
    times: &[T],
    observables: &[&QOperator<T>],
    opts: &EvolveOptions<T>,
) -> Result<ExpectationSeries<T>> {
    if rho0.space() != l.space() || observables.iter().any(|a| a.space() != l.space()) {
        return Err(Error::Argument("state and observables must share the Liouvillian space".into()));
    }
    rho0.validate()?;
    let obs: Vec<&DMatrix<C<T>>> = observables.iter().map(|a| a.matrix()).collect();
    let mut values = propagate_functionals(l, std::slice::from_ref(rho0.matrix()), &obs, times, opts)?;
    Ok(ExpectationSeries {
        times: times.to_vec(),
        values: values.swap_remove(0),
    })
}

/// Unique stationary state, from the kernel of the Liouvillian with one
/// population row replaced by the trace constraint.
pub fn steady_state<T: Real>(l: &Liouvillian<T>) -> Result<DensityMatrix<T>> {
    let d = l.dim();
    let n = d * d;
    if d > MAX_EXPONENTIAL_DIM {
        return Err(Error::Argument(format!(
            "dense steady-state solve needs total_dim <= {MAX_EXPONENTIAL_DIM}, got {d}"
        )));
    }
    let r = l.real_form();
    let trace = trace_functional::<T>(d);
    let scale = r.iter().fold(T::zero(), |acc, x| acc.max(x.abs())).max(T::default_epsilon());
    let leak = (trace.transpose() * r).iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if leak > T::tol(1e-12) * scale.max(T::one()) {
        return Err(Error::Precondition(format!(
            "Liouvillian is not trace preserving (defect {leak:.3e}); no stationary density matrix"
        )));
    }

    let mut system = r.clone();
    system.set_row(0, &trace.transpose());
    let mut rhs = DVector::zeros(n);
    rhs[0] = T::one();

    let lu = system.clone().lu();
    let u = lu.u();
    let pivots: Vec<T> = (0..n).map(|k| u[(k, k)].abs()).collect();
    drop(u);
    let largest = pivots.iter().fold(T::zero(), |a, &b| a.max(b));
    let smallest = pivots.iter().fold(largest, |a, &b| a.min(b));
    if smallest <= T::tol(1e-12) * largest {
        return Err(Error::DegenerateSteadyState(format!(
            "kernel dimension exceeds one (pivot ratio {:.3e})",
            (smallest / largest).to_f64_lossy()
        )));
    }
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::DegenerateSteadyState("singular constrained system".into()))?;
    // one step of iterative refinement
    let resid = &rhs - &system * &x;
    if let Some(dx) = lu.solve(&resid) {
        x += dx;
    }
    let mut rho = from_real(x.as_slice(), d);
    let tr = rho.trace();
    rho /= tr;
    DensityMatrix::new_unchecked(l.space().clone(), rho)
}

/// Two-time correlation `⟨A(τ)B(0)⟩ = tr[A e^{Lτ}(B ρ_ss)]` by the quantum
/// regression rule. The τ = 0 entry is `tr(A B ρ_ss)` exactly.
pub fn correlation<T: Real>(
    l: &Liouvillian<T>,
    rho_ss: &DensityMatrix<T>,
    a: &QOperator<T>,
    b: &QOperator<T>,
    taus: &[T],
    opts: &EvolveOptions<T>,
) -> Result<CorrelationSeries<T, C<T>>> {
    check_times(taus, "tau")?;
    if rho_ss.space() != l.space() || a.space() != l.space() || b.space() != l.space() {
        return Err(Error::Argument("operators and state must share the Liouvillian space".into()));
    }
    let residual = l.residual(rho_ss);
    if residual > T::tol(1e-8) {
        return Err(Error::Precondition(format!(
            "state is not stationary (residual {residual:.3e} > 1e-8)"
        )));
    }
    let x0 = b.matrix() * rho_ss.matrix();
    let mut values = propagate_functionals(l, std::slice::from_ref(&x0), &[a.matrix()], taus, opts)?
        .swap_remove(0)
        .swap_remove(0);
    if taus[0].is_zero() {
        values[0] = trace_product(a.matrix(), &x0);
    }
    Ok(CorrelationSeries {
        taus: taus.to_vec(),
        values,
        reference_time: None,
    })
}
