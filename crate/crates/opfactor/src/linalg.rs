//! Spectral primitives: PSD tests, pseudoinverses, range projections, and
//! two-sided extremes of symmetric-definite pencils.
//!
//! Every test here is tolerance-relative.  PSD tests hermitize first and
//! bound the anti-Hermitian defect separately; rank decisions compare
//! singular values (or eigenvalues of a PSD operator) against
//! `rank_rel * sigma_max`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{OpfactorError, Result};
use crate::matrix::ComplexMatrix;
use crate::tolerance::Tolerance;

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone)]
pub struct PsdCheck {
    pub is_psd: bool,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eig: f64,
    /// Magnitude of negative eigenvalue tolerated by this test; `min_eig`
    /// had to stay above `-threshold` for `is_psd` to hold.
    pub threshold: f64,
    /// Unit eigenvector attaining `min_eig`; a concrete counterexample
    /// direction whenever `is_psd` is false on eigenvalue grounds.
    pub witness: Vec<Complex64>,
}

/// Extremes of the pencil `(A, M)`: the least `lambda` with
/// `A <= lambda M` on `ran M`, and the largest `m` with `m M <= A`.
#[derive(Debug, Clone)]
pub struct PencilResult {
    /// Whether any finite `lambda` works, i.e. the quadratic form of `A`
    /// vanishes on `ker M`.
    pub lambda_min_feasible: bool,
    /// Least feasible `lambda` (`+inf` when infeasible).
    pub lambda_min: f64,
    /// Largest `m >= 0` with `m M <= A`; `None` means unconstrained
    /// (`M = 0`, any `m` works).
    pub m_max: Option<f64>,
    /// Eigenvalues of the compression of `A` onto `ran M` in the metric of
    /// `M`, sorted ascending.
    pub restricted_eigs: Vec<f64>,
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) struct HermEig {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

pub(crate) fn herm_eig(h: &ComplexMatrix) -> HermEig {
    assert!(h.is_square(), "herm_eig: matrix must be square");
    let se = nalgebra::SymmetricEigen::new(h.as_na().clone());
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = se.eigenvectors.select_columns(order.iter());
    HermEig { values, vectors }
}

impl HermEig {
    /// Spectral norm of the decomposed matrix.
    pub fn op_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    /// Indices of eigenvalues above the relative rank cutoff.  For a PSD
    /// operator these index an orthonormal basis of its range.
    pub fn kept(&self, rank_rel: f64) -> Vec<usize> {
        let vmax = self.values.iter().fold(0.0_f64, |m, &v| m.max(v));
        let cut = rank_rel * vmax;
        (0..self.values.len())
            .filter(|&i| self.values[i] > cut)
            .collect()
    }

    /// Orthogonal projector onto the span of the kept eigenvectors.
    pub fn range_projector(&self, rank_rel: f64) -> ComplexMatrix {
        let kept = self.kept(rank_rel);
        let q = self.vectors.select_columns(kept.iter());
        ComplexMatrix::from_na(&q * q.adjoint()).hermitize()
    }

    /// Moore-Penrose inverse of a PSD operator from its eigendecomposition.
    pub fn psd_pinv(&self, rank_rel: f64) -> ComplexMatrix {
        let kept = self.kept(rank_rel);
        let n = self.vectors.nrows();
        let mut p = DMatrix::<Complex64>::zeros(n, n);
        let q = self.vectors.select_columns(kept.iter());
        let mut d = DMatrix::<Complex64>::zeros(kept.len(), kept.len());
        for (j, &i) in kept.iter().enumerate() {
            d[(j, j)] = Complex64::new(1.0 / self.values[i], 0.0);
        }
        p += &q * d * q.adjoint();
        ComplexMatrix::from_na(p).hermitize()
    }
}

/// Tests `A >= 0` after hermitizing, with the anti-Hermitian defect bounded
/// separately by `eig_rel * max(1, ||A||_F)`.
pub fn psd_min_eig(a: &ComplexMatrix, tol: &Tolerance) -> Result<PsdCheck> {
    psd_min_eig_floored(a, 0.0, tol)
}

/// Like [`psd_min_eig`], but the eigenvalue slack is floored at
/// `eig_rel * scale_floor`.  When `A` is a difference of two operators, its
/// entries carry rounding error proportional to the operands rather than to
/// the (possibly cancelling) difference itself, so tests on differences must
/// pass the operands' scale as the floor or an exact identity fails its own
/// roundoff.
pub fn psd_min_eig_floored(
    a: &ComplexMatrix,
    scale_floor: f64,
    tol: &Tolerance,
) -> Result<PsdCheck> {
    if !a.is_square() {
        return Err(OpfactorError::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    a.ensure_finite()?;
    let h = a.hermitize();
    let eig = herm_eig(&h);
    let min_eig = eig.values[0];
    let defect = (a - &a.adjoint()).fro_norm();
    let herm_ok = defect <= tol.eig_rel * a.fro_norm().max(scale_floor).max(1.0);
    let threshold = tol.eig_rel * eig.op_norm().max(scale_floor);
    let eig_ok = min_eig >= -threshold;
    let witness: Vec<Complex64> = eig.vectors.column(0).iter().copied().collect();
    Ok(PsdCheck {
        is_psd: herm_ok && eig_ok,
        min_eig,
        threshold,
        witness,
    })
}

/// Column-pivoted QR with the rank decided by the relative decay of the
/// `R` diagonal: entries at or below `rank_rel * max_j |R_jj|` count as
/// zero.  Pivoting makes `|R_ii|` nonincreasing, so the kept part is always
/// a prefix, and the Householder `Q` is orthonormal to machine precision —
/// unlike iterative singular vectors, which lose accuracy on exactly
/// rank-deficient inputs.
fn rank_revealing_qr(
    a: &ComplexMatrix,
    rank_rel: f64,
) -> (
    DMatrix<Complex64>,
    DMatrix<Complex64>,
    nalgebra::PermutationSequence<nalgebra::Dyn>,
    usize,
) {
    let k = a.rows().min(a.cols());
    let (q, r, perm) = a.as_na().clone().col_piv_qr().unpack();
    let rmax = (0..k).map(|i| r[(i, i)].norm()).fold(0.0_f64, f64::max);
    let rank = (0..k).filter(|&i| r[(i, i)].norm() > rank_rel * rmax).count();
    (q, r, perm, rank)
}

/// Moore-Penrose pseudoinverse with directions at or below the relative
/// rank cutoff `tol.rank_rel` treated as zero, via a complete orthogonal
/// decomposition (column-pivoted QR followed by an LQ of the kept rows).
/// All four Penrose identities hold to machine precision at every rank.
pub fn pseudoinverse(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    a.ensure_finite()?;
    let (q1, r, perm, rank) = rank_revealing_qr(a, tol.rank_rel);
    if rank == 0 {
        return Ok(ComplexMatrix::zeros(a.cols(), a.rows()));
    }
    // A P = Q1 R; keep the leading rank rows of R and finish with an LQ:
    // R1 = L Q2, so A = Q1r L Q2 P^{-1} and A^+ = P Q2^H L^{-1} Q1r^H.
    let r1 = r.rows(0, rank).into_owned();
    let q1r = q1.columns(0, rank).into_owned();
    let qr2 = r1.adjoint().qr();
    let q2 = qr2.q();
    let lower = qr2.r().adjoint();
    let inv_l = lower
        .solve_lower_triangular(&DMatrix::<Complex64>::identity(rank, rank))
        .expect("kept triangular block is nonsingular above the rank cutoff");
    let mut pinv = &q2 * (&inv_l * q1r.adjoint());
    perm.inv_permute_rows(&mut pinv);
    Ok(ComplexMatrix::from_na(pinv))
}

/// Orthonormal basis of `ran A` as columns, from the leading Householder
/// vectors of a column-pivoted QR.
pub(crate) fn orthonormal_range_basis(a: &ComplexMatrix, rank_rel: f64) -> ComplexMatrix {
    let (q, _, _, rank) = rank_revealing_qr(a, rank_rel);
    ComplexMatrix::from_na(q.columns(0, rank).into_owned())
}

/// Orthogonal projector onto `ran A`, built from the leading Householder
/// vectors of a column-pivoted QR (see [`pseudoinverse`] for the rank rule).
pub fn range_projection(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    a.ensure_finite()?;
    let basis = orthonormal_range_basis(a, tol.rank_rel);
    Ok(ComplexMatrix::from_na(basis.as_na() * basis.as_na().adjoint()).hermitize())
}

/// Loewner order test `A <= B` via a PSD test on `B - A`, with the
/// eigenvalue slack floored at the operands' scale so that identities which
/// cancel to roundoff still pass.
pub fn loewner_leq(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    if !a.is_square() {
        return Err(OpfactorError::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.shape() != b.shape() {
        return Err(OpfactorError::DimensionMismatch {
            context: "loewner_leq",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    let floor = a.fro_norm().max(b.fro_norm());
    Ok(psd_min_eig_floored(&(b - a), floor, tol)?.is_psd)
}

/// Largest `m >= 0` with `A - m M >= 0`, found by bisection on `[0, hi]`.
/// Assumes `A` and `M` are exactly Hermitian and `A >= 0`, so `m = 0` is
/// always admissible.  Relative bisection tolerance `1e-10`.
pub(crate) fn bisect_m_max(
    ah: &ComplexMatrix,
    mh: &ComplexMatrix,
    hi0: f64,
    tol: &Tolerance,
) -> f64 {
    if hi0 <= 0.0 {
        return 0.0;
    }
    let psd_at = |m: f64| {
        let d = ah - &mh.scale(m);
        let eig = herm_eig(&d);
        eig.values[0] >= -tol.eig_rel * eig.op_norm()
    };
    if psd_at(hi0) {
        return hi0;
    }
    let (mut lo, mut hi) = (0.0_f64, hi0);
    while hi - lo > 1e-10 * hi0 {
        let mid = 0.5 * (lo + hi);
        if psd_at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Eigenvalues of the compression of `A` onto the kept eigenspace of `M`,
/// in the metric of `M`: the spectrum of `D^{-1/2} Q* A Q D^{-1/2}`.
pub(crate) fn restricted_spectrum(ah: &ComplexMatrix, me: &HermEig, kept: &[usize]) -> Vec<f64> {
    if kept.is_empty() {
        return Vec::new();
    }
    let qk = me.vectors.select_columns(kept.iter());
    let s = qk.adjoint() * ah.as_na() * &qk;
    let r = kept.len();
    let w = DMatrix::from_fn(r, r, |i, j| {
        s[(i, j)] / (me.values[kept[i]] * me.values[kept[j]]).sqrt()
    });
    herm_eig(&ComplexMatrix::from_na(w).hermitize()).values
}

/// Pencil internals shared with the factorization modules: takes `A`
/// already hermitized plus the eigendecomposition of the hermitized `M`.
pub(crate) fn compute_pencil(
    ah: &ComplexMatrix,
    mh: &ComplexMatrix,
    me: &HermEig,
    tol: &Tolerance,
) -> PencilResult {
    let n = ah.rows();
    let kept = me.kept(tol.rank_rel);
    let qk = me.vectors.select_columns(kept.iter());

    // lambda_min is finite iff A vanishes on ker M:  ||A (I - P_M)||_F
    // within residual_rel of ||A||_F.
    let p_ran = &qk * qk.adjoint();
    let off_range = ah.as_na() * (DMatrix::identity(n, n) - p_ran);
    let a_fro = ah.fro_norm();
    let feasible = off_range.norm() <= tol.residual_rel * a_fro;

    let restricted_eigs = restricted_spectrum(ah, me, &kept);

    let lambda_min = if feasible {
        restricted_eigs.last().copied().unwrap_or(0.0).max(0.0)
    } else {
        f64::INFINITY
    };

    let m_max = if kept.is_empty() {
        None
    } else {
        let hi = restricted_eigs.first().copied().unwrap_or(0.0).max(0.0);
        Some(bisect_m_max(ah, mh, hi, tol))
    };

    PencilResult {
        lambda_min_feasible: feasible,
        lambda_min,
        m_max,
        restricted_eigs,
    }
}

/// Two-sided extremes of the symmetric-definite pencil `(A, M)` with both
/// operators PSD: the least `lambda` with `A <= lambda M` (feasible iff the
/// form of `A` vanishes on `ker M`) and the largest `m` with `m M <= A`.
///
/// `m_max` is found by bisection over `[0, min restricted eig]`; the upper
/// bracket alone is not sufficient because cross terms between `ran M` and
/// its complement can push the global minimum eigenvalue of `A - m M`
/// negative before the restricted bound is reached.
pub fn pencil_extremes(
    a: &ComplexMatrix,
    m: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<PencilResult> {
    if !a.is_square() {
        return Err(OpfactorError::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.shape() != m.shape() {
        return Err(OpfactorError::DimensionMismatch {
            context: "pencil_extremes",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: m.rows(),
            right_cols: m.cols(),
        });
    }
    let pa = psd_min_eig(a, tol)?;
    if !pa.is_psd {
        return Err(OpfactorError::NotHermitianPsd {
            operand: "A",
            min_eig: pa.min_eig,
        });
    }
    let pm = psd_min_eig(m, tol)?;
    if !pm.is_psd {
        return Err(OpfactorError::NotHermitianPsd {
            operand: "M",
            min_eig: pm.min_eig,
        });
    }
    // Work with exactly Hermitian copies so the bisection's PSD tests are
    // free of the inputs' anti-Hermitian roundoff.
    let ah = a.hermitize();
    let mh = m.hermitize();
    let me = herm_eig(&mh);
    Ok(compute_pencil(&ah, &mh, &me, tol))
}

/// Hermitian square root of a PSD operator.
pub fn hermitian_sqrt(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let p = psd_min_eig(a, tol)?;
    if !p.is_psd {
        return Err(OpfactorError::NotPsd { min_eig: p.min_eig });
    }
    let eig = herm_eig(&a.hermitize());
    let n = a.rows();
    let d = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(eig.values[i].max(0.0).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(ComplexMatrix::from_na(&eig.vectors * d * eig.vectors.adjoint()).hermitize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::vec_norm;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic dense complex test matrix (no RNG needed).
    fn probe_matrix(rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |r, c_| {
            let k = (r * cols + c_) as f64;
            Complex64::new((1.3 * k + 0.7).sin(), (0.9 * k - 0.2).cos())
        })
        .unwrap()
    }

    #[test]
    fn psd_identity_and_indefinite() {
        let p = psd_min_eig(&ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(p.is_psd);
        assert!((p.min_eig - 1.0).abs() < 1e-12);

        let q = psd_min_eig(&ComplexMatrix::from_diag(&[1.0, -1.0]), &tol()).unwrap();
        assert!(!q.is_psd);
        assert!((q.min_eig + 1.0).abs() < 1e-12);
        // witness is the negative direction e_2 up to phase
        assert!((q.witness[1].norm() - 1.0).abs() < 1e-12);
        assert!(q.witness[0].norm() < 1e-12);
    }

    #[test]
    fn psd_rank_one_boundary() {
        let ones = ComplexMatrix::from_real_vec(2, 2, vec![1., 1., 1., 1.]).unwrap();
        let p = psd_min_eig(&ones, &tol()).unwrap();
        assert!(p.is_psd);
        assert!(p.min_eig.abs() < 1e-12);
        // witness spans the kernel direction (1, -1)/sqrt(2)
        let mw = ones.mul_vec(&p.witness);
        assert!(vec_norm(&mw) < 1e-10);
    }

    #[test]
    fn psd_rejects_non_hermitian() {
        let nilpotent = ComplexMatrix::from_real_vec(2, 2, vec![0., 1., 0., 0.]).unwrap();
        let p = psd_min_eig(&nilpotent, &tol()).unwrap();
        assert!(!p.is_psd);
    }

    #[test]
    fn psd_rejects_nonfinite() {
        let big = ComplexMatrix::from_real_vec(1, 1, vec![1e200]).unwrap();
        let overflow = &big * &big; // 1e400 -> inf
        assert!(matches!(
            psd_min_eig(&overflow, &tol()),
            Err(OpfactorError::NonFinite)
        ));
    }

    #[test]
    fn pseudoinverse_of_diagonal() {
        let a = ComplexMatrix::from_diag(&[2.0, 0.0]);
        let p = pseudoinverse(&a, &tol()).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::from_diag(&[0.5, 0.0])) < 1e-14);

        let z = ComplexMatrix::zeros(3, 2);
        let pz = pseudoinverse(&z, &tol()).unwrap();
        assert_eq!(pz.shape(), (2, 3));
        assert_eq!(pz.fro_norm(), 0.0);
    }

    #[test]
    fn pseudoinverse_satisfies_penrose_identities() {
        for (rows, cols) in [(4, 3), (3, 4), (5, 5)] {
            let a = probe_matrix(rows, cols);
            let p = pseudoinverse(&a, &tol()).unwrap();
            let apa = &(&a * &p) * &a;
            let pap = &(&p * &a) * &p;
            assert!(apa.max_abs_diff(&a) < 1e-10, "A P A = A for {rows}x{cols}");
            assert!(pap.max_abs_diff(&p) < 1e-10, "P A P = P for {rows}x{cols}");
            let ap = &a * &p;
            let pa = &p * &a;
            assert!(ap.max_abs_diff(&ap.adjoint()) < 1e-10, "A P Hermitian");
            assert!(pa.max_abs_diff(&pa.adjoint()) < 1e-10, "P A Hermitian");
        }
    }

    #[test]
    fn range_projection_matches_hand_values() {
        // Column (1, 1)^T spans a line; the projector is the rank-one average.
        let v = ComplexMatrix::from_real_vec(2, 1, vec![1., 1.]).unwrap();
        let p = range_projection(&v, &tol()).unwrap();
        let expected = ComplexMatrix::from_real_vec(2, 2, vec![0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(p.max_abs_diff(&expected) < 1e-12);

        let d = ComplexMatrix::from_diag(&[3.0, 0.0]);
        let pd = range_projection(&d, &tol()).unwrap();
        assert!(pd.max_abs_diff(&ComplexMatrix::from_diag(&[1.0, 0.0])) < 1e-12);

        // Projector laws on a generic rank-deficient rectangle.
        let a = &probe_matrix(4, 2) * &probe_matrix(2, 3);
        let pa = range_projection(&a, &tol()).unwrap();
        assert!(pa.max_abs_diff(&(&pa * &pa)) < 1e-10, "idempotent");
        assert!(pa.max_abs_diff(&pa.adjoint()) < 1e-12, "Hermitian");
        assert!((&pa * &a).max_abs_diff(&a) < 1e-10, "fixes its own range");
    }

    #[test]
    fn loewner_order_basics() {
        let a = ComplexMatrix::from_diag(&[1.0, 2.0]);
        let b = ComplexMatrix::from_diag(&[2.0, 3.0]);
        assert!(loewner_leq(&a, &b, &tol()).unwrap());
        assert!(!loewner_leq(&b, &a, &tol()).unwrap());

        // rank-one updates only increase
        let v = probe_matrix(3, 1);
        let g = &v * &v.adjoint();
        let base = ComplexMatrix::identity(3);
        assert!(loewner_leq(&base, &(&base + &g), &tol()).unwrap());
    }

    #[test]
    fn pencil_diagonal_oracle() {
        // A = diag(9, 0), M = diag(3, 0): restricted ratio 3, both extremes 3.
        let a = ComplexMatrix::from_diag(&[9.0, 0.0]);
        let m = ComplexMatrix::from_diag(&[3.0, 0.0]);
        let r = pencil_extremes(&a, &m, &tol()).unwrap();
        assert!(r.lambda_min_feasible);
        assert!((r.lambda_min - 3.0).abs() < 1e-9);
        let mm = r.m_max.unwrap();
        assert!((mm - 3.0).abs() < 1e-8);
        assert_eq!(r.restricted_eigs.len(), 1);
        assert!((r.restricted_eigs[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn pencil_kernel_violation_is_infeasible() {
        // A = I does not vanish on ker M for M = diag(1, 0).
        let a = ComplexMatrix::identity(2);
        let m = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let r = pencil_extremes(&a, &m, &tol()).unwrap();
        assert!(!r.lambda_min_feasible);
        assert!(r.lambda_min.is_infinite());
        // m M <= A still holds up to m = 1
        assert!((r.m_max.unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pencil_cross_terms_force_m_to_zero() {
        // A = ones(2), M = diag(1, 0): the restricted bracket says 1, but the
        // off-diagonal coupling makes det(A - m M) = -m, so no m > 0 works in
        // exact arithmetic.  The PSD test runs at eig_rel slack, which here
        // admits m up to eig_rel * ||A||_2 / (v* M v) = 4e-9, so the reported
        // m_max is zero only up to that tolerance.
        let a = ComplexMatrix::from_real_vec(2, 2, vec![1., 1., 1., 1.]).unwrap();
        let m = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let r = pencil_extremes(&a, &m, &tol()).unwrap();
        let mm = r.m_max.unwrap();
        assert!((0.0..=1e-8).contains(&mm), "tolerance-level zero, got {mm}");
        assert!((r.restricted_eigs[0] - 1.0).abs() < 1e-9);
        assert!(!r.lambda_min_feasible);
    }

    #[test]
    fn pencil_trivial_m() {
        let z = ComplexMatrix::zeros(2, 2);
        let r = pencil_extremes(&z, &z, &tol()).unwrap();
        assert!(r.lambda_min_feasible);
        assert_eq!(r.lambda_min, 0.0);
        assert_eq!(r.m_max, None);
        assert!(r.restricted_eigs.is_empty());

        let a = ComplexMatrix::identity(2);
        let r2 = pencil_extremes(&a, &z, &tol()).unwrap();
        assert!(!r2.lambda_min_feasible);
        assert_eq!(r2.m_max, None);
    }

    #[test]
    fn pencil_rejects_indefinite_input() {
        let a = ComplexMatrix::from_diag(&[-1.0]);
        let m = ComplexMatrix::from_diag(&[1.0]);
        match pencil_extremes(&a, &m, &tol()) {
            Err(OpfactorError::NotHermitianPsd { operand, .. }) => assert_eq!(operand, "A"),
            other => panic!("expected NotHermitianPsd, got {other:?}"),
        }
    }

    #[test]
    fn pencil_scalar_case() {
        let r = pencil_extremes(
            &ComplexMatrix::from_diag(&[4.0]),
            &ComplexMatrix::from_diag(&[2.0]),
            &tol(),
        )
        .unwrap();
        assert!((r.lambda_min - 2.0).abs() < 1e-10);
        assert!((r.m_max.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn sqrt_squares_back() {
        let a = ComplexMatrix::from_diag(&[4.0, 9.0]);
        let s = hermitian_sqrt(&a, &tol()).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::from_diag(&[2.0, 3.0])) < 1e-12);

        let g = probe_matrix(4, 4);
        let psd = &g * &g.adjoint();
        let sq = hermitian_sqrt(&psd, &tol()).unwrap();
        assert!((&sq * &sq).max_abs_diff(&psd) < 1e-9);
        assert!(matches!(
            hermitian_sqrt(&ComplexMatrix::from_diag(&[-1.0]), &tol()),
            Err(OpfactorError::NotPsd { .. })
        ));
    }

    #[test]
    fn witness_certifies_indefiniteness() {
        let a = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(1., 0.), c(0., 2.), c(0., -2.), c(-1., 0.)],
        )
        .unwrap();
        let p = psd_min_eig(&a, &tol()).unwrap();
        assert!(!p.is_psd);
        // quadratic form at the witness equals the reported min eigenvalue
        let aw = a.mul_vec(&p.witness);
        let form = crate::matrix::vec_inner(&aw, &p.witness);
        assert!((form.re - p.min_eig).abs() < 1e-10);
        assert!(form.im.abs() < 1e-12);
    }
}
