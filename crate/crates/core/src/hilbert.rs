//! Operator algebra on the composite space `Fock ⊗ … ⊗ Fock ⊗ qubit ⊗ …`.
//!
//! Tensor factors are ordered modes first, then qubits, with the last factor
//! varying fastest in the basis index. Qubit basis index 0 is the excited
//! state `|e⟩` (σ_z = +1) and index 1 the ground state `|g⟩`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cabs, cr, Real, C};

/// Layout of the truncated tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSpec {
    fock_dims: Vec<usize>,
    qubit_count: usize,
}

impl SpaceSpec {
    pub fn new(fock_dims: Vec<usize>, qubit_count: usize) -> Result<Self> {
        if let Some(d) = fock_dims.iter().find(|&&d| d < 2) {
            return Err(Error::Argument(format!(
                "Fock truncation must be at least 2, got {d}"
            )));
        }
        if fock_dims.is_empty() && qubit_count == 0 {
            return Err(Error::Argument("space has no tensor factors".into()));
        }
        Ok(Self {
            fock_dims,
            qubit_count,
        })
    }

    /// Two resonator modes and one qubit, the layout of every model Hamiltonian.
    pub fn two_modes_one_qubit(d1: usize, d2: usize) -> Result<Self> {
        Self::new(vec![d1, d2], 1)
    }

    pub fn fock_dims(&self) -> &[usize] {
        &self.fock_dims
    }

    pub fn mode_count(&self) -> usize {
        self.fock_dims.len()
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn total_dim(&self) -> usize {
        self.fock_dims.iter().product::<usize>() << self.qubit_count
    }

    /// Local dimension of every tensor factor, in factor order.
    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = self.fock_dims.clone();
        dims.extend(std::iter::repeat_n(2, self.qubit_count));
        dims
    }

    pub(crate) fn is_two_modes_one_qubit(&self) -> bool {
        self.fock_dims.len() == 2 && self.qubit_count == 1
    }

    pub(crate) fn require_two_modes_one_qubit(&self) -> Result<()> {
        if self.is_two_modes_one_qubit() {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "expected two Fock modes and one qubit, got {self}"
            )))
        }
    }

    /// Basis index of `|n_1, …, n_m⟩ ⊗ |q_1, …⟩`.
    pub fn basis_index(&self, occupations: &[usize], qubits: &[QubitLevel]) -> Result<usize> {
        if occupations.len() != self.mode_count() || qubits.len() != self.qubit_count {
            return Err(Error::Argument(format!(
                "basis label has {} modes and {} qubits, space is {self}",
                occupations.len(),
                qubits.len()
            )));
        }
        let mut index = 0;
        for (&n, &d) in occupations.iter().zip(&self.fock_dims) {
            if n >= d {
                return Err(Error::Argument(format!(
                    "occupation {n} exceeds truncation {d}"
                )));
            }
            index = index * d + n;
        }
        for q in qubits {
            index = index * 2 + q.index();
        }
        Ok(index)
    }

    /// Embeds a local operator acting on tensor factor `factor`.
    fn embed<T: Real>(&self, factor: usize, local: &DMatrix<C<T>>) -> DMatrix<C<T>> {
        let dims = self.factor_dims();
        debug_assert_eq!(local.nrows(), dims[factor]);
        let mut out = DMatrix::from_element(1, 1, C::<T>::one());
        for (f, &d) in dims.iter().enumerate() {
            out = if f == factor {
                out.kronecker(local)
            } else {
                out.kronecker(&DMatrix::identity(d, d))
            };
        }
        out
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fock{:?}+{}q", self.fock_dims, self.qubit_count)
    }
}

/// Computational-basis state of a qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitLevel {
    Excited,
    Ground,
}

impl QubitLevel {
    fn index(self) -> usize {
        match self {
            QubitLevel::Excited => 0,
            QubitLevel::Ground => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// Dense operator on a [`SpaceSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct QOperator<T: Real> {
    space: SpaceSpec,
    matrix: DMatrix<C<T>>,
}

impl<T: Real> QOperator<T> {
    pub fn new(space: SpaceSpec, matrix: DMatrix<C<T>>) -> Result<Self> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Argument(format!(
                "matrix is {}x{}, space {space} needs {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: &SpaceSpec) -> Self {
        let n = space.total_dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(space: &SpaceSpec) -> Self {
        let n = space.total_dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C<T>> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        max_abs(&self.matrix)
    }

    /// `max|M − M†| ≤ 1e-12 · max|M|`.
    pub fn is_hermitian(&self) -> bool {
        hermitian_defect(&self.matrix) <= T::tol(1e-12) * self.max_abs()
    }

    pub fn trace(&self) -> C<T> {
        self.matrix.trace()
    }

    pub fn scale(&self, factor: C<T>) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(cr(factor))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix + &other.matrix * &self.matrix,
        })
    }

    pub fn check_space(&self, other: &Self) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "operators live on different spaces: {} vs {}",
                self.space, other.space
            )))
        }
    }

    /// Lowest `count` eigenvalues in ascending order; see [`eigen_lowest`].
    pub fn eigen_lowest(&self, count: usize) -> Result<Vec<T>> {
        eigen_lowest(self, count)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a, T: Real> $tr<&'a QOperator<T>> for &'a QOperator<T> {
            type Output = QOperator<T>;

            /// Panics when the operands live on different spaces.
            fn $method(self, rhs: &'a QOperator<T>) -> QOperator<T> {
                assert_eq!(self.space, rhs.space, "operator space mismatch");
                QOperator {
                    space: self.space.clone(),
                    matrix: &self.matrix $op &rhs.matrix,
                }
            }
        }

        impl<T: Real> $tr for QOperator<T> {
            type Output = QOperator<T>;

            fn $method(self, rhs: QOperator<T>) -> QOperator<T> {
                &self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl<T: Real> Neg for QOperator<T> {
    type Output = QOperator<T>;

    fn neg(self) -> QOperator<T> {
        QOperator {
            space: self.space,
            matrix: -self.matrix,
        }
    }
}

pub(crate) fn max_abs<T: Real>(m: &DMatrix<C<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

pub(crate) fn hermitian_defect<T: Real>(m: &DMatrix<C<T>>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max(cabs(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    worst
}

fn ladder_local<T: Real>(d: usize) -> DMatrix<C<T>> {
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = cr(T::lit(n as f64).sqrt());
    }
    a
}

fn check_mode(space: &SpaceSpec, mode: usize) -> Result<()> {
    if mode < space.mode_count() {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "mode index {mode} out of range for {space}"
        )))
    }
}

fn check_qubit(space: &SpaceSpec, qubit: usize) -> Result<()> {
    if qubit < space.qubit_count() {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "qubit index {qubit} out of range for {space}"
        )))
    }
}

/// Truncated annihilation operator of mode `mode_index`, `⟨n−1|a|n⟩ = √n`.
pub fn annihilation<T: Real>(space: &SpaceSpec, mode_index: usize) -> Result<QOperator<T>> {
    check_mode(space, mode_index)?;
    let local = ladder_local::<T>(space.fock_dims[mode_index]);
    Ok(QOperator {
        space: space.clone(),
        matrix: space.embed(mode_index, &local),
    })
}

pub fn creation<T: Real>(space: &SpaceSpec, mode_index: usize) -> Result<QOperator<T>> {
    Ok(annihilation(space, mode_index)?.adjoint())
}

/// `a†a` for mode `mode_index`.
pub fn number<T: Real>(space: &SpaceSpec, mode_index: usize) -> Result<QOperator<T>> {
    check_mode(space, mode_index)?;
    let d = space.fock_dims[mode_index];
    let local = DMatrix::from_diagonal(&DVector::from_fn(d, |n, _| cr(T::lit(n as f64))));
    Ok(QOperator {
        space: space.clone(),
        matrix: space.embed(mode_index, &local),
    })
}

/// Position-like quadrature `a + a†` of mode `mode_index`.
pub fn quadrature<T: Real>(space: &SpaceSpec, mode_index: usize) -> Result<QOperator<T>> {
    let a = annihilation(space, mode_index)?;
    Ok(&a + &a.adjoint())
}

fn pauli_local<T: Real>(axis: PauliAxis) -> DMatrix<C<T>> {
    let (o, z) = (C::<T>::one(), C::<T>::zero());
    let i = Complex::new(T::zero(), T::one());
    match axis {
        PauliAxis::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        PauliAxis::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        PauliAxis::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Pauli matrix on qubit `qubit_index`.
pub fn pauli<T: Real>(space: &SpaceSpec, axis: PauliAxis, qubit_index: usize) -> Result<QOperator<T>> {
    check_qubit(space, qubit_index)?;
    let factor = space.mode_count() + qubit_index;
    Ok(QOperator {
        space: space.clone(),
        matrix: space.embed(factor, &pauli_local::<T>(axis)),
    })
}

/// Qubit lowering operator `σ = (σ_x − iσ_y)/2`, mapping `|e⟩` to `|g⟩`.
pub fn qubit_lowering<T: Real>(space: &SpaceSpec, qubit_index: usize) -> Result<QOperator<T>> {
    check_qubit(space, qubit_index)?;
    let sx = pauli_local::<T>(PauliAxis::X);
    let sy = pauli_local::<T>(PauliAxis::Y);
    let i = Complex::new(T::zero(), T::one());
    let local = (sx - sy * i) * cr(T::lit(0.5));
    let factor = space.mode_count() + qubit_index;
    Ok(QOperator {
        space: space.clone(),
        matrix: space.embed(factor, &local),
    })
}

/// Lowest `count` eigenvalues of a Hermitian operator, ascending.
///
/// Degenerate eigenvalues are repeated; ties keep the solver's order.
pub fn eigen_lowest<T: Real>(op: &QOperator<T>, count: usize) -> Result<Vec<T>> {
    if count > op.dim() {
        return Err(Error::Argument(format!(
            "requested {count} eigenvalues of a {}-dimensional operator",
            op.dim()
        )));
    }
    if !op.is_hermitian() {
        return Err(Error::Validation(format!(
            "eigen_lowest needs a Hermitian operator (defect {:.3e})",
            hermitian_defect(&op.matrix).to_f64_lossy()
        )));
    }
    let mut values = hermitian_eigenvalues(&op.matrix);
    values.truncate(count);
    Ok(values)
}

/// All eigenvalues of a Hermitian matrix, ascending (stable for ties).
pub(crate) fn hermitian_eigenvalues<T: Real>(m: &DMatrix<C<T>>) -> Vec<T> {
    let mut values: Vec<T> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalue"));
    values
}

/// Density operator with trace one.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    space: SpaceSpec,
    matrix: DMatrix<C<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates trace, Hermiticity and positivity.
    pub fn new(space: SpaceSpec, matrix: DMatrix<C<T>>) -> Result<Self> {
        let rho = Self::new_unchecked(space, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Only checks the shape; used for propagated states that are validated separately.
    pub fn new_unchecked(space: SpaceSpec, matrix: DMatrix<C<T>>) -> Result<Self> {
        let op = QOperator::new(space, matrix)?;
        Ok(Self {
            space: op.space,
            matrix: op.matrix,
        })
    }

    /// `|ψ⟩⟨ψ|` for a normalised state vector.
    pub fn pure(space: &SpaceSpec, psi: &DVector<C<T>>) -> Result<Self> {
        if psi.len() != space.total_dim() {
            return Err(Error::Argument(format!(
                "state vector has length {}, space {space} needs {}",
                psi.len(),
                space.total_dim()
            )));
        }
        let norm = psi.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if norm <= T::zero() {
            return Err(Error::Argument("zero state vector".into()));
        }
        let psi = psi.map(|z| z / cr(norm));
        Self::new(space.clone(), &psi * psi.adjoint())
    }

    /// Product basis state `|n_1, n_2, …⟩ ⊗ |q_1, …⟩`.
    pub fn basis_state(space: &SpaceSpec, occupations: &[usize], qubits: &[QubitLevel]) -> Result<Self> {
        let index = space.basis_index(occupations, qubits)?;
        let n = space.total_dim();
        let mut m = DMatrix::zeros(n, n);
        m[(index, index)] = C::one();
        Ok(Self {
            space: space.clone(),
            matrix: m,
        })
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C<T>> {
        self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> T {
        // tr(ρ²) = Σ|ρ_ij|² for Hermitian ρ
        self.matrix.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn min_eigenvalue(&self) -> T {
        hermitian_eigenvalues(&self.matrix)[0]
    }

    /// `tr(Aρ)`.
    pub fn expect(&self, op: &QOperator<T>) -> Result<C<T>> {
        if op.space != self.space {
            return Err(Error::Argument(format!(
                "observable on {} applied to state on {}",
                op.space, self.space
            )));
        }
        Ok(trace_product(&op.matrix, &self.matrix))
    }

    /// Checks trace (1e-9), Hermiticity (1e-10) and minimum eigenvalue (−1e-8).
    pub fn validate(&self) -> Result<()> {
        let tr = self.matrix.trace();
        if cabs(tr - C::one()) > T::tol(1e-9) {
            return Err(Error::Validation(format!(
                "density matrix trace {} differs from 1",
                tr.re
            )));
        }
        let defect = hermitian_defect(&self.matrix);
        if defect > T::tol(1e-10) {
            return Err(Error::Validation(format!(
                "density matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        let min = self.min_eigenvalue();
        if min < -T::tol(1e-8) {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Trace norm `‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> T {
        let diff = &self.matrix - &other.matrix;
        hermitian_eigenvalues(&diff)
            .into_iter()
            .fold(T::zero(), |acc, v| acc + v.abs())
    }
}

/// `tr(AB)` without forming the product.
pub(crate) fn trace_product<T: Real>(a: &DMatrix<C<T>>, b: &DMatrix<C<T>>) -> C<T> {
    let n = a.nrows();
    let mut acc = C::zero();
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
