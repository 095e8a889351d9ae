//! Dense symmetric-definite generalized eigensolver for `L v = λ M v`.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::assembly::{BoundaryCondition, GlobalSystem};
use crate::basis2d::Family;
use crate::mesh::Domain;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("mass matrix is not positive definite")]
    MassNotPD,
    #[error("requested {requested} eigenvalues but only {available} are available")]
    InsufficientSpectrum { requested: usize, available: usize },
    #[error("matrix dimensions disagree: stiffness {stiffness}, mass {mass}")]
    DimensionMismatch { stiffness: usize, mass: usize },
}

/// Problem description carried alongside a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveMetadata {
    pub family: Family,
    pub order: usize,
    pub resolution: usize,
    pub bc: BoundaryCondition,
    pub domain: Domain,
    pub ndofs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the `M`-orthonormal eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Option<DMatrix<f64>>,
    pub metadata: Option<SolveMetadata>,
}

/// Reduces `(stiffness, mass)` to a standard symmetric problem via
/// `mass = C Cᵀ` and solves `C⁻¹ L C⁻ᵀ y = λ y`.
pub fn solve_dense(
    stiffness: &DMatrix<f64>,
    mass: &DMatrix<f64>,
    keep_vectors: bool,
) -> Result<EigenResult, EigenError> {
    let n = stiffness.nrows();
    if mass.nrows() != n || mass.ncols() != n || stiffness.ncols() != n {
        return Err(EigenError::DimensionMismatch {
            stiffness: n,
            mass: mass.nrows(),
        });
    }
    if n == 0 {
        return Ok(EigenResult {
            eigenvalues: Vec::new(),
            eigenvectors: keep_vectors.then(|| DMatrix::zeros(0, 0)),
            metadata: None,
        });
    }
    let chol = Cholesky::new(mass.clone()).ok_or(EigenError::MassNotPD)?;
    let c = chol.l();
    // X = C⁻¹ L, then A = C⁻¹ Xᵀ = C⁻¹ L C⁻ᵀ
    let x = c
        .solve_lower_triangular(stiffness)
        .ok_or(EigenError::MassNotPD)?;
    let mut a = c
        .solve_lower_triangular(&x.transpose())
        .ok_or(EigenError::MassNotPD)?;
    let at = a.transpose();
    a += at;
    a *= 0.5;

    if !keep_vectors {
        let mut values: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        return Ok(EigenResult {
            eigenvalues: values,
            eigenvectors: None,
            metadata: None,
        });
    }

    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let y = DMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    let vectors = c
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(EigenError::MassNotPD)?;
    Ok(EigenResult {
        eigenvalues: values,
        eigenvectors: Some(vectors),
        metadata: None,
    })
}

pub fn solve_generalized(sys: &GlobalSystem) -> Result<EigenResult, EigenError> {
    solve_dense(&sys.stiffness.to_dense(), &sys.mass.to_dense(), false)
}

/// As [`solve_generalized`], keeping the eigenvectors.
pub fn solve_generalized_with_vectors(sys: &GlobalSystem) -> Result<EigenResult, EigenError> {
    solve_dense(&sys.stiffness.to_dense(), &sys.mass.to_dense(), true)
}

/// The `multiplicity` eigenvalues closest to `target`, ties going to the smaller value.
/// Returned in ascending order.
pub fn select_near(
    result: &EigenResult,
    target: f64,
    multiplicity: usize,
) -> Result<Vec<f64>, EigenError> {
    let available = result.eigenvalues.len();
    if multiplicity == 0 || multiplicity > available {
        return Err(EigenError::InsufficientSpectrum {
            requested: multiplicity,
            available,
        });
    }
    let mut ranked = result.eigenvalues.clone();
    ranked.sort_by(|a, b| {
        (a - target)
            .abs()
            .total_cmp(&(b - target).abs())
            .then(a.total_cmp(b))
    });
    ranked.truncate(multiplicity);
    ranked.sort_by(f64::total_cmp);
    Ok(ranked)
}

/// One row of an index-wise spectrum comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumErrorEntry {
    pub index: usize,
    pub computed: f64,
    pub exact: f64,
    /// `computed - exact`.
    pub error: f64,
}

/// Pairs sorted computed eigenvalues with sorted exact ones by index.
pub fn spectrum_error_profile(
    result: &EigenResult,
    exact: &[f64],
) -> Result<Vec<SpectrumErrorEntry>, EigenError> {
    if exact.len() > result.eigenvalues.len() {
        return Err(EigenError::InsufficientSpectrum {
            requested: exact.len(),
            available: result.eigenvalues.len(),
        });
    }
    Ok(exact
        .iter()
        .zip(&result.eigenvalues)
        .enumerate()
        .map(|(index, (&exact, &computed))| SpectrumErrorEntry {
            index,
            computed,
            exact,
            error: computed - exact,
        })
        .collect())
}
