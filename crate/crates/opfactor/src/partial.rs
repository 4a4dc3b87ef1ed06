//! Operators defined only on a subspace, and the inclusion order between
//! them.
//!
//! A [`PartialOperator`] is a matrix together with an orthonormal basis of
//! its domain subspace.  Inclusion `A ⊆ B` means `dom A ⊆ dom B` and the two
//! actions agree on `dom A`; it is the finite-dimensional form of operator
//! extension, and the factorizations in this crate are stated as inclusions
//! (`XB ⊆ T`, `YT ⊆ P_T B`).  On full domains every inclusion collapses to
//! equality; the distinction matters once compositions shrink domains.

use num_complex::Complex64;

use crate::error::{OpfactorError, Result};
use crate::linalg::{herm_eig, psd_min_eig};
use crate::matrix::ComplexMatrix;
use crate::tolerance::Tolerance;

/// A linear map together with an orthonormal basis of its domain.
///
/// The matrix is `n_out x n_in`; the domain basis is `n_in x d` with
/// orthonormal columns, `0 <= d <= n_in`.  A zero-dimensional domain is
/// legal (it arises from compositions whose preimage is trivial) and is
/// included in every other operator on the same spaces.
#[derive(Debug, Clone)]
pub struct PartialOperator {
    matrix: ComplexMatrix,
    domain_basis: ComplexMatrix,
}

impl PartialOperator {
    /// Everywhere-defined operator: the domain is all of the input space.
    pub fn full(matrix: ComplexMatrix) -> Self {
        let n_in = matrix.cols();
        Self {
            matrix,
            domain_basis: ComplexMatrix::identity(n_in),
        }
    }

    /// Operator restricted to the span of the given orthonormal columns.
    pub fn new(matrix: ComplexMatrix, domain_basis: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if domain_basis.rows() != matrix.cols() {
            return Err(OpfactorError::DimensionMismatch {
                context: "partial operator domain",
                left_rows: matrix.rows(),
                left_cols: matrix.cols(),
                right_rows: domain_basis.rows(),
                right_cols: domain_basis.cols(),
            });
        }
        if domain_basis.cols() > domain_basis.rows() {
            return Err(OpfactorError::InvalidSpec(format!(
                "domain dimension {} exceeds ambient dimension {}",
                domain_basis.cols(),
                domain_basis.rows()
            )));
        }
        let d = domain_basis.cols();
        if d > 0 {
            let gram = &domain_basis.adjoint() * &domain_basis;
            let defect = (&gram - &ComplexMatrix::identity(d)).fro_norm();
            if defect > tol.residual_rel {
                return Err(OpfactorError::InvalidSpec(format!(
                    "domain basis is not orthonormal (defect {defect:.3e})"
                )));
            }
        }
        Ok(Self {
            matrix,
            domain_basis,
        })
    }

    /// Operator restricted to the column span of `span` (not necessarily
    /// orthonormal); the basis is orthonormalized internally.
    pub fn with_span(matrix: ComplexMatrix, span: &ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if span.rows() != matrix.cols() {
            return Err(OpfactorError::DimensionMismatch {
                context: "partial operator span",
                left_rows: matrix.rows(),
                left_cols: matrix.cols(),
                right_rows: span.rows(),
                right_cols: span.cols(),
            });
        }
        let basis = crate::linalg::orthonormal_range_basis(span, tol.rank_rel);
        Ok(Self {
            matrix,
            domain_basis: basis,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn domain_basis(&self) -> &ComplexMatrix {
        &self.domain_basis
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_basis.cols()
    }

    pub fn ambient_in(&self) -> usize {
        self.matrix.cols()
    }

    pub fn ambient_out(&self) -> usize {
        self.matrix.rows()
    }

    /// Orthogonal projector onto the domain subspace.
    pub fn domain_projector(&self) -> ComplexMatrix {
        let n = self.ambient_in();
        if self.domain_dim() == 0 {
            return ComplexMatrix::zeros(n, n);
        }
        (&self.domain_basis * &self.domain_basis.adjoint()).hermitize()
    }

    /// In finite dimension every operator is closed; closure is the
    /// identity and exists only so that chains of reasoning written for the
    /// general setting transcribe one-to-one.
    pub fn closure(&self) -> Self {
        self.clone()
    }
}

/// Inclusion test `A ⊆ B`: `dom A ⊆ dom B` and `B` agrees with `A` on
/// `dom A`, both to `residual_rel`.
pub fn includes(b: &PartialOperator, a: &PartialOperator, tol: &Tolerance) -> Result<bool> {
    if a.ambient_in() != b.ambient_in() || a.ambient_out() != b.ambient_out() {
        return Err(OpfactorError::DimensionMismatch {
            context: "includes",
            left_rows: b.ambient_out(),
            left_cols: b.ambient_in(),
            right_rows: a.ambient_out(),
            right_cols: a.ambient_in(),
        });
    }
    if a.domain_dim() == 0 {
        return Ok(true);
    }
    let pb = b.domain_projector();
    let basis_a = a.domain_basis();
    let dom_resid = (basis_a - &(&pb * basis_a)).fro_norm();
    if dom_resid > tol.residual_rel {
        return Ok(false);
    }
    let action = (&(b.matrix() - a.matrix()) * basis_a).fro_norm();
    Ok(action <= tol.residual_rel * a.matrix().fro_norm().max(1.0))
}

/// Composition `A ∘ B` as a partial operator: the domain is the preimage
/// under `B` of `dom A`, intersected with `dom B`.
///
/// The preimage kernel is decided at the Gram level (eigenvalues of
/// `X* X` for the off-domain component `X`), which resolves directions down
/// to roughly `1e-7` of the largest singular value; rank decisions that
/// need finer resolution should be arranged at the operator level instead.
pub fn compose(a: &PartialOperator, b: &PartialOperator, tol: &Tolerance) -> Result<PartialOperator> {
    if b.ambient_out() != a.ambient_in() {
        return Err(OpfactorError::DimensionMismatch {
            context: "compose",
            left_rows: a.ambient_out(),
            left_cols: a.ambient_in(),
            right_rows: b.ambient_out(),
            right_cols: b.ambient_in(),
        });
    }
    let product = a.matrix() * b.matrix();
    if b.domain_dim() == 0 {
        return Ok(PartialOperator {
            matrix: product,
            domain_basis: b.domain_basis.clone(),
        });
    }
    // Off-domain component of B restricted to dom B: X = (I - P_domA) B Q_B.
    let pa = a.domain_projector();
    let n_mid = a.ambient_in();
    let id = ComplexMatrix::identity(n_mid);
    let x = &(&(&id - &pa) * b.matrix()) * b.domain_basis();
    let gram = &x.adjoint() * &x;
    let eig = herm_eig(&gram.hermitize());
    let lmax = eig.values.iter().fold(0.0_f64, |m, &v| m.max(v));
    let smax = lmax.max(0.0).sqrt();
    let sigma_cut = smax * tol.rank_rel.max(1e-7);
    let kernel: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i].max(0.0).sqrt() <= sigma_cut)
        .collect();
    // Map kernel coordinates back into the ambient input space of B; the
    // coordinates are orthonormal and Q_B is isometric, so the mapped
    // columns are again orthonormal.
    let kcols = eig.vectors.select_columns(kernel.iter());
    let basis = ComplexMatrix::from_na(b.domain_basis().as_na() * kcols);
    Ok(PartialOperator {
        matrix: product,
        domain_basis: basis,
    })
}

/// Sign of the quadratic form of `M` restricted to a subspace: returns
/// `(nonnegative, min_restricted_eig)` for the compression `Q* M Q`.
pub fn quadratic_form_sign(
    m: &ComplexMatrix,
    basis: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<(bool, f64)> {
    if !m.is_square() {
        return Err(OpfactorError::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if basis.rows() != m.rows() {
        return Err(OpfactorError::DimensionMismatch {
            context: "quadratic_form_sign",
            left_rows: m.rows(),
            left_cols: m.cols(),
            right_rows: basis.rows(),
            right_cols: basis.cols(),
        });
    }
    if basis.cols() == 0 {
        return Ok((true, f64::INFINITY));
    }
    let d = basis.cols();
    let gram = &basis.adjoint() * basis;
    let defect = (&gram - &ComplexMatrix::identity(d)).fro_norm();
    if defect > tol.residual_rel {
        return Err(OpfactorError::InvalidSpec(format!(
            "basis is not orthonormal (defect {defect:.3e})"
        )));
    }
    let q = &(&basis.adjoint() * m) * basis;
    let check = psd_min_eig(&q, tol)?;
    Ok((check.is_psd, check.min_eig))
}

/// Orthonormal basis columns for the standard coordinate directions in
/// `indices`; convenient for building axis-aligned domains in tests and
/// examples.
pub fn coordinate_basis(n: usize, indices: &[usize]) -> ComplexMatrix {
    assert!(indices.iter().all(|&i| i < n), "coordinate index out of range");
    if indices.is_empty() {
        return ComplexMatrix::from_na(nalgebra::DMatrix::zeros(n, 0));
    }
    ComplexMatrix::from_fn(n, indices.len(), |r, c| {
        if r == indices[c] {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .unwrap()
}
