//! System ⊗ bath composites at finite dimension.
//!
//! Index convention everywhere: the system index is slow and the bath index
//! fast, so basis element (i, μ) sits at row `i * dim_b + μ`.
//!
//! The reduced Heisenberg map Ê ↦ Tr_b(U†(Ê⊗1)U·(1⊗ρ_b)) sends effects to
//! effects but generally not projectors to projectors; [`idempotence_defect`]
//! measures how far its image is from being one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{self, ComplexMatrix, StateVector};

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = -1e-8;
const UNITARY_TOL: f64 = 1e-10;

/// A validated quantum state: Hermitian, unit trace, positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let herm = fock::hermiticity_defect(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min_eig = fock::min_eigenvalue(&matrix);
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// |ψ⟩⟨ψ| for a normalized ψ.
    pub fn pure(psi: &StateVector) -> Result<Self> {
        Self::new(psi * psi.adjoint())
    }

    /// Maximally mixed state 1/n.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(n, n) / Complex64::new(n as f64, 0.0))
    }

    /// Skips validation; the integrator checks its own tolerances.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        fock::min_eigenvalue(&self.matrix)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeDims {
    dim_s: usize,
    dim_b: usize,
}

impl CompositeDims {
    pub fn new(dim_s: usize, dim_b: usize) -> Result<Self> {
        if dim_s < 2 {
            return Err(Error::InvalidDimension(dim_s));
        }
        if dim_b < 2 {
            return Err(Error::InvalidDimension(dim_b));
        }
        Ok(Self { dim_s, dim_b })
    }

    pub fn system(&self) -> usize {
        self.dim_s
    }

    pub fn bath(&self) -> usize {
        self.dim_b
    }

    pub fn total(&self) -> usize {
        self.dim_s * self.dim_b
    }
}

/// Kronecker product A ⊗ B.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    for m in [a, b] {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
    }
    Ok(a.kronecker(b))
}

/// Tr_b of an arbitrary composite operator.
pub fn partial_trace_bath_matrix(m: &ComplexMatrix, dims: CompositeDims) -> Result<ComplexMatrix> {
    fock::ensure_same_dim(dims.total(), m.nrows())?;
    fock::ensure_same_dim(dims.total(), m.ncols())?;
    let (ds, db) = (dims.dim_s, dims.dim_b);
    Ok(ComplexMatrix::from_fn(ds, ds, |i, j| {
        (0..db).map(|mu| m[(i * db + mu, j * db + mu)]).sum()
    }))
}

pub fn partial_trace_bath(rho: &DensityOperator, dims: CompositeDims) -> Result<DensityOperator> {
    let reduced = partial_trace_bath_matrix(rho.matrix(), dims)?;
    Ok(DensityOperator::from_matrix_unchecked(reduced))
}

/// Reduced Heisenberg-picture image Tr_b(U†(E⊗1)U·(1⊗ρ_b)) of a system
/// operator E.
pub fn heisenberg_transition(
    e: &ComplexMatrix,
    u: &ComplexMatrix,
    rho_b: &DensityOperator,
    dims: CompositeDims,
) -> Result<ComplexMatrix> {
    fock::ensure_same_dim(dims.system(), e.nrows())?;
    fock::ensure_same_dim(dims.system(), e.ncols())?;
    fock::ensure_same_dim(dims.bath(), rho_b.dim())?;
    fock::ensure_same_dim(dims.total(), u.nrows())?;
    fock::ensure_same_dim(dims.total(), u.ncols())?;

    let n = dims.total();
    let unitary_defect = (u.adjoint() * u - ComplexMatrix::identity(n, n)).norm();
    if unitary_defect > UNITARY_TOL {
        return Err(Error::Precondition(format!(
            "U is not unitary: |U†U - 1| = {unitary_defect:.3e}"
        )));
    }

    let id_b = ComplexMatrix::identity(dims.bath(), dims.bath());
    let id_s = ComplexMatrix::identity(dims.system(), dims.system());
    let lifted = e.kronecker(&id_b);
    let evolved = u.adjoint() * lifted * u;
    let weighted = evolved * id_s.kronecker(rho_b.matrix());
    partial_trace_bath_matrix(&weighted, dims)
}

/// ‖F² − F‖ in operator norm; zero exactly for projectors.
pub fn idempotence_defect(f: &ComplexMatrix) -> f64 {
    fock::operator_norm(&(f * f - f))
}

/// SWAP on C^d ⊗ C^d.
pub fn swap(d: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = Complex64::new(1.0, 0.0);
        }
    }
    s
}
