//! Operator algebra on the two-level ⊗ truncated-Fock product space.
//!
//! Basis ordering is |s⟩⊗|n⟩ with s ∈ {g, e}, n ∈ {0..N}; the flat index is
//! s·(N+1) + n. Matrices are dense: dim = 2(N+1) stays small enough that
//! dense arithmetic beats any sparse bookkeeping.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Exciton level of the two-level emitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Ground = 0,
    Excited = 1,
}

/// The truncated product space: two emitter levels times N+1 Fock states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceDescriptor {
    fock_truncation: usize,
}

impl SpaceDescriptor {
    pub fn new(fock_truncation: usize) -> Result<Self> {
        if fock_truncation < 1 {
            return Err(Error::InvalidParameter {
                field: "fock_truncation",
                reason: format!("must be >= 1, got {fock_truncation}"),
            });
        }
        Ok(Self { fock_truncation })
    }

    /// Maximum photon number N.
    pub fn fock_truncation(&self) -> usize {
        self.fock_truncation
    }

    /// Total dimension 2(N+1).
    pub fn dim(&self) -> usize {
        2 * (self.fock_truncation + 1)
    }

    /// Flat basis index of |s, n⟩.
    pub fn index(&self, level: Level, n: usize) -> usize {
        debug_assert!(n <= self.fock_truncation);
        (level as usize) * (self.fock_truncation + 1) + n
    }
}

/// A dense operator on the product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: SpaceDescriptor,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(space: SpaceDescriptor, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::SpaceMismatch {
                left: "operator matrix",
                right: "space",
                left_dim: matrix.nrows(),
                right_dim: space.dim(),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: SpaceDescriptor) -> Self {
        Self { space, matrix: DMatrix::zeros(space.dim(), space.dim()) }
    }

    pub fn identity(space: SpaceDescriptor) -> Self {
        Self { space, matrix: DMatrix::identity(space.dim(), space.dim()) }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// Hermitian adjoint A†.
    pub fn dagger(&self) -> Self {
        Self { space: self.space, matrix: self.matrix.adjoint() }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).camax() <= tol
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { space: self.space, matrix: &self.matrix * factor }
    }

    fn assert_same_space(&self, other: &Self) {
        assert_eq!(
            self.space, other.space,
            "operator arithmetic across different spaces"
        );
    }
}

impl std::ops::Mul<&Operator> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator { space: self.space, matrix: &self.matrix * &rhs.matrix }
    }
}

impl std::ops::Add<&Operator> for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator { space: self.space, matrix: &self.matrix + &rhs.matrix }
    }
}

impl std::ops::Sub<&Operator> for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator { space: self.space, matrix: &self.matrix - &rhs.matrix }
    }
}

/// σ±, a, a† and the identity on one space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub space: SpaceDescriptor,
    pub sigma_minus: Operator,
    pub sigma_plus: Operator,
    pub a: Operator,
    pub a_dag: Operator,
    pub identity: Operator,
}

/// Build σ− = |g⟩⟨e| ⊗ 1, a = 1₂ ⊗ (annihilation with a|n⟩ = √n|n−1⟩),
/// and their adjoints.
pub fn build_operators(space: SpaceDescriptor) -> OperatorSet {
    let n_fock = space.fock_truncation() + 1;
    let dim = space.dim();

    let mut sigma_minus = DMatrix::zeros(dim, dim);
    for n in 0..n_fock {
        sigma_minus[(space.index(Level::Ground, n), space.index(Level::Excited, n))] =
            C64::new(1.0, 0.0);
    }

    let mut a = DMatrix::zeros(dim, dim);
    for level in [Level::Ground, Level::Excited] {
        for n in 1..n_fock {
            a[(space.index(level, n - 1), space.index(level, n))] = C64::new((n as f64).sqrt(), 0.0);
        }
    }

    let sigma_minus = Operator { space, matrix: sigma_minus };
    let a = Operator { space, matrix: a };
    OperatorSet {
        space,
        sigma_plus: sigma_minus.dagger(),
        a_dag: a.dagger(),
        sigma_minus,
        a,
        identity: Operator::identity(space),
    }
}

/// A density matrix on the product space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: SpaceDescriptor,
    matrix: DMatrix<C64>,
}

/// Default tolerance on Hermiticity and trace deviations.
pub const STATE_TOL: f64 = 1e-10;
/// Default tolerance on eigenvalue negativity.
pub const POSITIVITY_TOL: f64 = 1e-8;

impl DensityMatrix {
    /// Wrap a matrix after checking Hermiticity, trace and positivity.
    pub fn new(space: SpaceDescriptor, matrix: DMatrix<C64>, positivity_tol: f64) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::SpaceMismatch {
                left: "density matrix",
                right: "space",
                left_dim: matrix.nrows(),
                right_dim: space.dim(),
            });
        }
        let state = Self { space, matrix };
        state.validate(positivity_tol)?;
        Ok(state)
    }

    /// Wrap without validation; for intermediate results whose invariants
    /// are established by the caller.
    pub fn from_matrix_unchecked(space: SpaceDescriptor, matrix: DMatrix<C64>) -> Self {
        Self { space, matrix }
    }

    pub fn pure(space: SpaceDescriptor, ket: &DVector<C64>) -> Result<Self> {
        if ket.len() != space.dim() {
            return Err(Error::SpaceMismatch {
                left: "ket",
                right: "space",
                left_dim: ket.len(),
                right_dim: space.dim(),
            });
        }
        let norm = ket.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter {
                field: "ket",
                reason: "cannot normalize the zero vector".into(),
            });
        }
        let normalized = ket / C64::new(norm, 0.0);
        let matrix = &normalized * normalized.adjoint();
        Ok(Self { space, matrix })
    }

    /// |s, n⟩⟨s, n| basis projector.
    pub fn basis_state(space: SpaceDescriptor, level: Level, n: usize) -> Self {
        let mut matrix = DMatrix::zeros(space.dim(), space.dim());
        let i = space.index(level, n);
        matrix[(i, i)] = C64::new(1.0, 0.0);
        Self { space, matrix }
    }

    pub fn ground_state(space: SpaceDescriptor) -> Self {
        Self::basis_state(space, Level::Ground, 0)
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Check Hermiticity and trace to [`STATE_TOL`] and eigenvalue
    /// negativity to `positivity_tol`.
    pub fn validate(&self, positivity_tol: f64) -> Result<()> {
        let herm_dev = (&self.matrix - self.matrix.adjoint()).camax();
        if herm_dev > STATE_TOL {
            return Err(Error::ModelViolation {
                context: "density matrix",
                detail: format!("Hermiticity deviation {herm_dev:e}"),
            });
        }
        let trace_dev = (self.trace() - C64::new(1.0, 0.0)).norm();
        if trace_dev > STATE_TOL {
            return Err(Error::ModelViolation {
                context: "density matrix",
                detail: format!("trace deviation {trace_dev:e}"),
            });
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -positivity_tol {
            return Err(Error::Physicality { min_eigenvalue: min_eig, tolerance: positivity_tol });
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Tr(ρA); real to 1e-10 when A is Hermitian.
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        if op.space() != self.space {
            return Err(Error::SpaceMismatch {
                left: "density matrix",
                right: "operator",
                left_dim: self.space.dim(),
                right_dim: op.space().dim(),
            });
        }
        let dim = self.space.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc += self.matrix[(i, j)] * op.matrix()[(j, i)];
            }
        }
        Ok(acc)
    }

    /// Occupation of the top Fock level, Σ_s ⟨s,N|ρ|s,N⟩; the truncation
    /// convergence check requires this to be negligible.
    pub fn top_fock_occupation(&self) -> f64 {
        let n = self.space.fock_truncation();
        let ig = self.space.index(Level::Ground, n);
        let ie = self.space.index(Level::Excited, n);
        self.matrix[(ig, ig)].re + self.matrix[(ie, ie)].re
    }

    /// Trace distance ½‖ρ − σ‖₁ via the eigenvalues of the difference.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if other.space != self.space {
            return Err(Error::SpaceMismatch {
                left: "density matrix",
                right: "density matrix",
                left_dim: self.space.dim(),
                right_dim: other.space.dim(),
            });
        }
        let diff = &self.matrix - &other.matrix;
        let herm = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm);
        Ok(0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
    }
}
