//! The three equivalent faces of the factorization problem `T = BC`:
//!
//!   1. range inclusion      `ran T ⊆ ran B`
//!   2. majorization         `TT* ⪯ λ² BB*` for some finite `λ`
//!   3. factorization        `T = BC` with `‖C‖₂ = λ_min`
//!
//! The solver decides each condition independently and the three verdicts
//! must agree, feasible or not.  On the feasible side the reduced solution
//! `C = B⁺T` is supported on `ran B*` and attains the least norm.
//!
//! Run with `cargo run --example douglas_equivalence`.

use opfactor::douglas::{
    douglas_equivalence_check, douglas_factor, range_inclusion, verify_douglas_certificate,
};
use opfactor::error::OpfactorError;
use opfactor::linalg::range_projection;
use opfactor::matrix::ComplexMatrix;
use opfactor::tolerance::Tolerance;

fn main() -> opfactor::Result<()> {
    let tol = Tolerance::default();

    // Feasible by construction: T = B·C0, so ran T ⊆ ran B automatically.
    let b = ComplexMatrix::from_real_vec(
        3,
        2,
        vec![
            1.0, 0.0, //
            1.0, 1.0, //
            0.0, 2.0,
        ],
    )?;
    let c0 = ComplexMatrix::from_real_vec(2, 2, vec![0.5, 0.25, 0.0, 1.5])?;
    let t = &b * &c0;

    let eq = douglas_equivalence_check(&t, &b, &tol)?;
    println!("range inclusion : {}", eq.range_inclusion);
    println!("majorization    : {}", eq.majorization);
    println!("factorization   : {}", eq.factorization);
    println!("consistent      : {}", eq.consistent());
    assert!(eq.consistent() && eq.range_inclusion);

    let cert = douglas_factor(&t, &b, &tol)?;
    println!("\nlambda_min = ‖C‖₂ = {:.12}", cert.lambda_min);
    println!("factor residual ‖BC − T‖_F = {:.3e}", (&(&b * &cert.factor_c) - &t).fro_norm());

    // The reduced solution lives on ran B*: projecting its columns onto the
    // orthogonal complement leaves nothing.
    let p_bstar = range_projection(&b.adjoint(), &tol)?;
    let off = (&cert.factor_c - &(&p_bstar * &cert.factor_c)).fro_norm();
    println!("component of C off ran B*  = {:.3e}", off);

    // C0 itself is a competing factorization, so minimality forces
    // ‖C‖₂ ≤ ‖C0‖₂.
    println!("competing ‖C0‖₂ = {:.12}", c0.op_norm());
    assert!(cert.lambda_min <= c0.op_norm() + 1e-10);

    let report = verify_douglas_certificate(&t, &b, &cert, &tol);
    println!("\nindependent re-verification:\n{report}");
    assert!(report.all_passed());

    // Infeasible: a rank jump.  T covers a direction B cannot produce, all
    // three verdicts flip together, and the factor call reports the exact
    // column where the inclusion fails.
    let t_bad = ComplexMatrix::identity(2);
    let b_bad = ComplexMatrix::from_diag(&[1.0, 0.0]);
    println!("\nrank-jump pair:");
    println!("ran T ⊆ ran B   : {}", range_inclusion(&t_bad, &b_bad, &tol)?);
    let eq = douglas_equivalence_check(&t_bad, &b_bad, &tol)?;
    println!(
        "inclusion {} / majorization {} / factorization {} — consistent {}",
        eq.range_inclusion,
        eq.majorization,
        eq.factorization,
        eq.consistent()
    );
    assert!(eq.consistent() && !eq.range_inclusion);
    match douglas_factor(&t_bad, &b_bad, &tol) {
        Err(OpfactorError::RangeNotIncluded {
            column, residual, ..
        }) => {
            println!("factor refused: column {column} sticks out (residual {residual:.3})");
        }
        other => panic!("expected a range failure, got {other:?}"),
    }

    Ok(())
}
