//! Forward factorization end to end: decide whether `‖Tf‖² ≤ λ (Tf, Bf)`
//! is satisfiable, build the nonnegative factor `X` with `XB = T`, and
//! re-verify the produced certificate from scratch.
//!
//! Run with `cargo run --example forward_factorization`.

use opfactor::instances::difference_operator;
use opfactor::matrix::{vec_norm, ComplexMatrix};
use opfactor::sebestyen::{check_forward, construct_x, verify_forward_certificate};
use opfactor::tolerance::Tolerance;

fn main() -> opfactor::Result<()> {
    let tol = Tolerance::default();

    // A feasible pair, built so that feasibility is obvious by hand: pick a
    // PSD operator X0 and any B, then T = X0 B satisfies X0 B = T exactly,
    // so the least feasible lambda can be at most ‖X0‖₂ = 2.
    let x0 = ComplexMatrix::from_diag(&[2.0, 1.0, 0.5]);
    let b = ComplexMatrix::from_real_vec(
        3,
        3,
        vec![
            1.0, 0.4, 0.0, //
            0.4, 1.0, 0.3, //
            0.0, 0.3, 1.0,
        ],
    )?;
    let t = &x0 * &b;

    let check = check_forward(&t, &b, &tol)?;
    println!("feasible: {}", check.feasible);
    println!("least feasible lambda: {:.12}", check.lambda_min);
    println!("hermitian defect of T*B: {:.3e}", check.hermitian_defect);

    let cert = construct_x(&t, &b, &tol)?;
    let factor_residual = (&(&cert.factor_x * &b) - &t).fro_norm();
    println!("factor X is {}x{}", cert.factor_x.rows(), cert.factor_x.cols());
    println!("‖XB − T‖_F = {:.3e}", factor_residual);
    println!("‖X‖₂ = {:.12}  (attains lambda)", cert.factor_x.op_norm());

    let report = verify_forward_certificate(&t, &b, &cert, &tol);
    println!("\nindependent re-verification:\n{report}");
    assert!(report.all_passed());

    // An infeasible pair: a one-sided difference stencil against the
    // identity.  The pairing (Tf, Bf) = (Tf, f) is not even real-valued, so
    // no lambda works, and the check hands back a concrete direction.
    let n = 6;
    let t_bad = difference_operator(n);
    let b_bad = ComplexMatrix::identity(n);
    let check = check_forward(&t_bad, &b_bad, &tol)?;
    println!("\ndifference operator vs identity:");
    println!("feasible: {}", check.feasible);
    println!("failure: {:?}", check.failure);
    let w = check.witness.expect("infeasible check carries a witness");
    println!("witness norm: {:.6}", vec_norm(&w));
    // The witness makes the anti-Hermitian part visible: the form (Tw, Bw)
    // has a non-vanishing imaginary component.
    let tw = t_bad.mul_vec(&w);
    let bw = b_bad.mul_vec(&w);
    let form = opfactor::matrix::vec_inner(&tw, &bw);
    println!("(Tw, Bw) = {:.6} + {:.6}i", form.re, form.im);
    assert!(form.im.abs() > 1e-3);

    Ok(())
}
