//! The forward factorization: decide whether `‖Tf‖² ≤ λ (Tf, Bf)` holds for
//! some `λ ≥ 0`, construct the nonnegative factor `X` with `XB = T`, and
//! build the intermediate operator `H` squeezed between `T*T/λ` and `λB*B`.
//!
//! Feasibility is equivalent to three tolerance-tested conditions on the
//! Gram operator `M = hermitize(T*B)`: the raw product `T*B` is Hermitian
//! up to a small defect, `M ⪰ 0`, and `ker M ⊆ ker T`.  The least feasible
//! `λ` is the top eigenvalue of the compression of `T*T` onto `ran M` in
//! the metric of `M`, and the factor `X = T·M⁺·T*` attains it.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{OpfactorError, Result};
use crate::linalg::{herm_eig, psd_min_eig, psd_min_eig_floored, range_projection, restricted_spectrum};
use crate::matrix::ComplexMatrix;
use crate::report::{CheckResult, VerificationReport};
use crate::tolerance::Tolerance;

/// Why `check_forward` declared an instance infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardFailure {
    /// `T*B` is too far from Hermitian for the form `(Tf, Bf)` to be real.
    HermitianDefect,
    /// The form `(Tf, Bf)` takes negative values.
    GramIndefinite,
    /// Some `f` has `Mf = 0` but `Tf ≠ 0`, so no finite `λ` works.
    KernelCondition,
}

/// Outcome of the forward feasibility test.
#[derive(Debug, Clone)]
pub struct ForwardCheck {
    pub feasible: bool,
    /// Least feasible `λ` (`+inf` when infeasible).
    pub lambda_min: f64,
    /// A direction exhibiting the failure, when infeasible.
    pub witness: Option<Vec<Complex64>>,
    pub failure: Option<ForwardFailure>,
    /// The Gram operator `hermitize(T*B)`.
    pub gram: ComplexMatrix,
    /// `‖T*B − (T*B)*‖_F / max(1, ‖T*B‖_F)`.
    pub hermitian_defect: f64,
}

/// Constructive evidence for the forward factorization.
#[derive(Debug, Clone)]
pub struct SebestyenCertificate {
    pub lambda_min: f64,
    pub gram: ComplexMatrix,
    /// Hermitian PSD factor with `X·B = T` and `‖X‖₂ = λ`.
    pub factor_x: ComplexMatrix,
    /// Intermediate operator; in finite dimension it collapses to the Gram
    /// operator itself.
    pub intermediate_h: ComplexMatrix,
    pub residuals: BTreeMap<String, f64>,
}

/// Gram operator of the pair: `hermitize(T*B)` plus the relative
/// anti-Hermitian defect of the raw product.
pub fn gram_operator(t: &ComplexMatrix, b: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    if t.shape() != b.shape() {
        return Err(OpfactorError::DimensionMismatch {
            context: "gram_operator",
            left_rows: t.rows(),
            left_cols: t.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    t.ensure_finite()?;
    b.ensure_finite()?;
    let raw = &t.adjoint() * b;
    let defect = (&raw - &raw.adjoint()).fro_norm() / raw.fro_norm().max(1.0);
    Ok((raw.hermitize(), defect))
}

/// Tests whether `‖Tf‖² ≤ λ (Tf, Bf)` can hold for every `f` with a single
/// finite `λ ≥ 0`, and returns the least such `λ`.
pub fn check_forward(t: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerance) -> Result<ForwardCheck> {
    let (gram, defect) = gram_operator(t, b)?;

    if defect > tol.eig_rel {
        // The form (Tf, Bf) is not real-valued; witness the direction where
        // its imaginary part is largest via the anti-Hermitian part.
        let raw = &t.adjoint() * b;
        let anti = (&raw - &raw.adjoint()).scale_complex(Complex64::new(0.0, -0.5));
        let eig = herm_eig(&anti);
        let idx = if eig.values[0].abs() >= eig.values[eig.values.len() - 1].abs() {
            0
        } else {
            eig.values.len() - 1
        };
        let witness = eig.vectors.column(idx).iter().copied().collect();
        return Ok(ForwardCheck {
            feasible: false,
            lambda_min: f64::INFINITY,
            witness: Some(witness),
            failure: Some(ForwardFailure::HermitianDefect),
            gram,
            hermitian_defect: defect,
        });
    }

    let psd = psd_min_eig(&gram, tol)?;
    if !psd.is_psd {
        return Ok(ForwardCheck {
            feasible: false,
            lambda_min: f64::INFINITY,
            witness: Some(psd.witness),
            failure: Some(ForwardFailure::GramIndefinite),
            gram,
            hermitian_defect: defect,
        });
    }

    // ker M ⊆ ker T, tested as a relative residual of T off ran M.
    let eig_m = herm_eig(&gram);
    let p_ran = eig_m.range_projector(tol.rank_rel);
    let t_off = (t - &(t * &p_ran)).fro_norm();
    if t_off > tol.residual_rel * t.fro_norm() {
        // Witness: the dominant direction of T restricted to ker M.
        let n = gram.rows();
        let p_ker = &ComplexMatrix::identity(n) - &p_ran;
        let c = (&(&p_ker * &(&t.adjoint() * t)) * &p_ker).hermitize();
        let eig_c = herm_eig(&c);
        let witness = eig_c.vectors.column(n - 1).iter().copied().collect();
        return Ok(ForwardCheck {
            feasible: false,
            lambda_min: f64::INFINITY,
            witness: Some(witness),
            failure: Some(ForwardFailure::KernelCondition),
            gram,
            hermitian_defect: defect,
        });
    }

    let tt = (&t.adjoint() * t).hermitize();
    let kept = eig_m.kept(tol.rank_rel);
    let restricted = restricted_spectrum(&tt, &eig_m, &kept);
    let lambda_min = restricted.last().copied().unwrap_or(0.0).max(0.0);

    Ok(ForwardCheck {
        feasible: true,
        lambda_min,
        witness: None,
        failure: None,
        gram,
        hermitian_defect: defect,
    })
}

/// Intermediate operator `B*·X·B` for a PSD factor `X`.
pub fn intermediate_h(b: &ComplexMatrix, x: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    if !x.is_square() || x.rows() != b.rows() {
        return Err(OpfactorError::DimensionMismatch {
            context: "intermediate_h",
            left_rows: b.rows(),
            left_cols: b.cols(),
            right_rows: x.rows(),
            right_cols: x.cols(),
        });
    }
    let p = psd_min_eig(x, tol)?;
    if !p.is_psd {
        return Err(OpfactorError::NotPsd { min_eig: p.min_eig });
    }
    Ok((&(&b.adjoint() * x) * b).hermitize())
}

/// Constructs the certificate for a feasible instance: the factor
/// `X = T·M⁺·T*`, the intermediate operator `H = B*XB`, and the residual
/// map quantifying every claimed property.
pub fn construct_x(t: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerance) -> Result<SebestyenCertificate> {
    let fc = check_forward(t, b, tol)?;
    if !fc.feasible {
        return Err(OpfactorError::Infeasible {
            reason: match fc.failure {
                Some(ForwardFailure::HermitianDefect) => {
                    format!("T*B has anti-Hermitian defect {:.3e}", fc.hermitian_defect)
                }
                Some(ForwardFailure::GramIndefinite) => {
                    "the form (Tf, Bf) takes negative values".to_string()
                }
                _ => "ker M is not contained in ker T".to_string(),
            },
            witness: fc.witness,
        });
    }

    let lambda = fc.lambda_min;
    let eig_m = herm_eig(&fc.gram);
    let m_pinv = eig_m.psd_pinv(tol.rank_rel);
    let x = (&(t * &m_pinv) * &t.adjoint()).hermitize();
    let h = intermediate_h(b, &x, tol)?;

    let tt = (&t.adjoint() * t).hermitize();
    let bb = (&b.adjoint() * b).hermitize();
    let lower = psd_min_eig(&(&h.scale(lambda) - &tt), tol)?;
    let upper = psd_min_eig(&(&bb.scale(lambda * lambda) - &h.scale(lambda)), tol)?;
    let x_psd = psd_min_eig(&x, tol)?;

    let mut residuals = BTreeMap::new();
    residuals.insert(
        "inclusion_residual".to_string(),
        (&(&x * b) - t).fro_norm() / t.fro_norm().max(1.0),
    );
    residuals.insert("psd_slack".to_string(), (-x_psd.min_eig).max(0.0));
    residuals.insert("norm_slack".to_string(), (x.op_norm() - lambda).max(0.0));
    residuals.insert(
        "sandwich_slack".to_string(),
        (-lower.min_eig).max(0.0).max((-upper.min_eig).max(0.0)),
    );

    Ok(SebestyenCertificate {
        lambda_min: lambda,
        gram: fc.gram,
        factor_x: x,
        intermediate_h: h,
        residuals,
    })
}

fn loewner_entry(
    name: &'static str,
    lhs: &ComplexMatrix,
    rhs: &ComplexMatrix,
    tol: &Tolerance,
) -> CheckResult {
    let floor = lhs.fro_norm().max(rhs.fro_norm());
    match psd_min_eig_floored(&(rhs - lhs), floor, tol) {
        Ok(p) => CheckResult::predicate(name, p.is_psd, -p.min_eig, p.threshold),
        Err(_) => CheckResult::predicate(name, false, f64::NAN, 0.0),
    }
}

fn psd_entry(name: &'static str, a: &ComplexMatrix, tol: &Tolerance) -> CheckResult {
    match psd_min_eig(a, tol) {
        Ok(p) => CheckResult::predicate(name, p.is_psd, -p.min_eig, p.threshold),
        Err(_) => CheckResult::predicate(name, false, f64::NAN, 0.0),
    }
}

/// Independently re-checks a forward certificate against the raw pair
/// `(T, B)`, trusting nothing beyond the claim itself.
pub fn verify_forward_certificate(
    t: &ComplexMatrix,
    b: &ComplexMatrix,
    cert: &SebestyenCertificate,
    tol: &Tolerance,
) -> VerificationReport {
    let n_out = t.rows();
    let n_in = t.cols();
    let shapes_ok = t.shape() == b.shape()
        && cert.factor_x.shape() == (n_out, n_out)
        && cert.intermediate_h.shape() == (n_in, n_in)
        && cert.gram.shape() == (n_in, n_in)
        && t.is_finite_matrix()
        && b.is_finite_matrix()
        && cert.factor_x.is_finite_matrix()
        && cert.intermediate_h.is_finite_matrix()
        && cert.gram.is_finite_matrix();
    if !shapes_ok {
        return VerificationReport::structural_failure("shape-consistency");
    }

    let mut report = VerificationReport::default();
    let lambda = cert.lambda_min;
    report.push(CheckResult::predicate(
        "lambda-finite-nonneg",
        lambda.is_finite() && lambda >= 0.0,
        lambda,
        f64::INFINITY,
    ));

    let x = &cert.factor_x;
    let h = &cert.intermediate_h;
    let m = (&t.adjoint() * b).hermitize();
    let tt = (&t.adjoint() * t).hermitize();
    let bb = (&b.adjoint() * b).hermitize();

    report.push(psd_entry("x-psd", x, tol));
    report.push(CheckResult::bounded(
        "x-norm",
        x.op_norm(),
        lambda * (1.0 + 1e-8),
    ));
    report.push(CheckResult::bounded(
        "xb-inclusion",
        (&(x * b) - t).fro_norm(),
        tol.residual_rel * t.fro_norm().max(1.0),
    ));
    match range_projection(t, tol) {
        Ok(p_t) => {
            let off = &(&ComplexMatrix::identity(n_out) - &p_t) * x;
            report.push(CheckResult::bounded(
                "x-range",
                off.fro_norm(),
                tol.residual_rel * x.fro_norm(),
            ));
        }
        Err(_) => report.push(CheckResult::predicate("x-range", false, f64::NAN, 0.0)),
    }
    report.push(psd_entry("gram-psd", &m, tol));
    report.push(CheckResult::bounded(
        "gram-consistency",
        (&cert.gram - &m).fro_norm(),
        tol.residual_rel * m.fro_norm().max(1.0),
    ));
    report.push(CheckResult::bounded(
        "h-collapse",
        (h - &m).fro_norm(),
        tol.residual_rel * h.fro_norm(),
    ));
    report.push(loewner_entry("sandwich-lower", &tt, &h.scale(lambda), tol));
    report.push(loewner_entry(
        "sandwich-upper",
        &h.scale(lambda),
        &bb.scale(lambda * lambda),
        tol,
    ));
    report.push(loewner_entry("gram-upper", &m, &bb.scale(lambda), tol));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::loewner_leq;
    use crate::matrix::{vec_inner, vec_norm};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn gram_of_diagonal_pair() {
        let t = ComplexMatrix::from_diag(&[3.0, 0.0]);
        let b = ComplexMatrix::from_diag(&[1.0, 2.0]);
        let (m, defect) = gram_operator(&t, &b).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::from_diag(&[3.0, 0.0])) < 1e-15);
        assert_eq!(defect, 0.0);
    }

    #[test]
    fn gram_defect_of_nilpotent_shift() {
        // T = [[0,1],[0,0]], B = I: raw = T* has ‖raw − raw*‖_F = sqrt(2)
        // against ‖raw‖_F = 1, so the defect is sqrt(2).
        let t = ComplexMatrix::from_real_vec(2, 2, vec![0., 1., 0., 0.]).unwrap();
        let b = ComplexMatrix::identity(2);
        let (_, defect) = gram_operator(&t, &b).unwrap();
        assert!((defect - 2.0_f64.sqrt()).abs() < 1e-12);

        let fc = check_forward(&t, &b, &tol()).unwrap();
        assert!(!fc.feasible);
        assert_eq!(fc.failure, Some(ForwardFailure::HermitianDefect));
        // the witness direction has a genuinely non-real form value
        let w = fc.witness.unwrap();
        let raw = &t.adjoint() * &b;
        let form = vec_inner(&raw.mul_vec(&w), &w);
        assert!(form.im.abs() > 0.1);
    }

    #[test]
    fn identity_pair_is_feasible_at_one() {
        let id = ComplexMatrix::identity(3);
        let fc = check_forward(&id, &id, &tol()).unwrap();
        assert!(fc.feasible);
        assert!((fc.lambda_min - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_t_is_feasible_at_zero() {
        let t = ComplexMatrix::zeros(2, 2);
        let b = ComplexMatrix::from_real_vec(2, 2, vec![1., 2., 3., 4.]).unwrap();
        let fc = check_forward(&t, &b, &tol()).unwrap();
        assert!(fc.feasible);
        assert_eq!(fc.lambda_min, 0.0);
        let cert = construct_x(&t, &b, &tol()).unwrap();
        assert_eq!(cert.factor_x.fro_norm(), 0.0);
        assert!(verify_forward_certificate(&t, &b, &cert, &tol()).all_passed());
    }

    #[test]
    fn indefinite_gram_is_rejected_with_witness() {
        let t = ComplexMatrix::from_diag(&[1.0, -1.0]);
        let b = ComplexMatrix::identity(2);
        let fc = check_forward(&t, &b, &tol()).unwrap();
        assert!(!fc.feasible);
        assert_eq!(fc.failure, Some(ForwardFailure::GramIndefinite));
        let w = fc.witness.unwrap();
        let form = vec_inner(&fc.gram.mul_vec(&w), &w);
        assert!(form.re < -0.5);
    }

    #[test]
    fn kernel_violation_is_rejected_with_witness() {
        // M = diag(1,0) has e2 in its kernel while T = I does not kill e2.
        let t = ComplexMatrix::identity(2);
        let b = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let fc = check_forward(&t, &b, &tol()).unwrap();
        assert!(!fc.feasible);
        assert_eq!(fc.failure, Some(ForwardFailure::KernelCondition));
        let w = fc.witness.unwrap();
        assert!(vec_norm(&fc.gram.mul_vec(&w)) < 1e-10, "Mf = 0");
        assert!(vec_norm(&t.mul_vec(&w)) > 0.9, "Tf != 0");
        assert!(matches!(
            construct_x(&t, &b, &tol()),
            Err(OpfactorError::Infeasible { witness: Some(_), .. })
        ));
    }

    #[test]
    fn diagonal_oracle_constructs_exact_factor() {
        // T = diag(3,0), B = diag(1,2): M = diag(3,0), lambda = 3,
        // X = T M^+ T* = diag(3,0), H = B*XB = diag(3,0).
        let t = ComplexMatrix::from_diag(&[3.0, 0.0]);
        let b = ComplexMatrix::from_diag(&[1.0, 2.0]);
        let cert = construct_x(&t, &b, &tol()).unwrap();
        assert!((cert.lambda_min - 3.0).abs() < 1e-9);
        assert!(cert.factor_x.max_abs_diff(&ComplexMatrix::from_diag(&[3.0, 0.0])) < 1e-9);
        assert!(cert.intermediate_h.max_abs_diff(&ComplexMatrix::from_diag(&[3.0, 0.0])) < 1e-9);
        assert!((cert.factor_x.op_norm() - cert.lambda_min).abs() < 1e-9);
        for (name, value) in &cert.residuals {
            assert!(*value <= 1e-9, "{name} = {value}");
        }
        let report = verify_forward_certificate(&t, &b, &cert, &tol());
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn lambda_is_minimal() {
        let t = ComplexMatrix::from_diag(&[3.0, 0.0]);
        let b = ComplexMatrix::from_diag(&[1.0, 2.0]);
        let cert = construct_x(&t, &b, &tol()).unwrap();
        let tt = (&t.adjoint() * &t).hermitize();
        let eps = 1e-6 * (1.0 + cert.lambda_min);
        let shaved = cert.gram.scale(cert.lambda_min - eps);
        assert!(!loewner_leq(&tt, &shaved, &tol()).unwrap());
        let padded = cert.gram.scale(cert.lambda_min + 1e-8);
        assert!(loewner_leq(&tt, &padded, &tol()).unwrap());
    }

    #[test]
    fn intermediate_h_requires_psd_factor() {
        let b = ComplexMatrix::identity(2);
        let bad = ComplexMatrix::from_diag(&[1.0, -1.0]);
        assert!(matches!(
            intermediate_h(&b, &bad, &tol()),
            Err(OpfactorError::NotPsd { .. })
        ));
        let good = ComplexMatrix::from_diag(&[1.0, 2.0]);
        let h = intermediate_h(&b, &good, &tol()).unwrap();
        assert!(h.max_abs_diff(&good) < 1e-15);
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let t = ComplexMatrix::from_diag(&[3.0, 0.0]);
        let b = ComplexMatrix::from_diag(&[1.0, 2.0]);
        let mut cert = construct_x(&t, &b, &tol()).unwrap();
        let mut entries = cert.factor_x.to_vec();
        entries[1] += Complex64::new(1e-2, 0.0);
        cert.factor_x = ComplexMatrix::from_vec(2, 2, entries).unwrap();
        let report = verify_forward_certificate(&t, &b, &cert, &tol());
        assert!(!report.all_passed());
    }

    #[test]
    fn shape_mismatch_is_a_structural_failure() {
        let t = ComplexMatrix::from_diag(&[3.0, 0.0]);
        let b = ComplexMatrix::from_diag(&[1.0, 2.0]);
        let mut cert = construct_x(&t, &b, &tol()).unwrap();
        cert.factor_x = ComplexMatrix::identity(3);
        let report = verify_forward_certificate(&t, &b, &cert, &tol());
        assert!(!report.all_passed());
        assert_eq!(report.checks[0].name, "shape-consistency");
    }
}
