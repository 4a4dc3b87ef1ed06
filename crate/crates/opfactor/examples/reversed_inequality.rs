//! The reversed inequality `‖Tf‖² ≥ m (Tf, Bf) ≥ 0` and the inclusion it
//! buys: a bounded nonnegative `Y` with `YT ⊆ P_T B`, where `P_T` projects
//! onto `ran T` and `‖Y‖₂ ≤ 1/m_max`.
//!
//! Run with `cargo run --example reversed_inequality`.

use opfactor::instances::{gen_instance, InstanceKind, InstanceSpec};
use opfactor::matrix::ComplexMatrix;
use opfactor::reversed::{check_reversed, classify_m_max, construct_y, MmaxClass};
use opfactor::tolerance::Tolerance;

fn main() -> opfactor::Result<()> {
    let tol = Tolerance::default();

    // A generated pair that satisfies the reversed inequality with a known
    // positive margin.
    let spec = InstanceSpec::new(InstanceKind::ReversedFeasible, 5, 7, 1.0)?;
    let inst = gen_instance(&spec)?;
    let (t, b) = (&inst.t, &inst.b);

    let check = check_reversed(t, b, &tol)?;
    println!("feasible   : {}", check.feasible);
    let m_max = check.m_max.expect("constrained instance has a finite m_max");
    println!("m_max      : {:.12}", m_max);
    println!("borderline : {}", check.borderline);

    let class = classify_m_max(
        check.m_max,
        (&t.adjoint() * t).hermitize().op_norm(),
        check.gram.op_norm(),
        &tol,
    );
    match class {
        MmaxClass::Positive { m_max, borderline } => {
            println!("classified : genuinely positive ({m_max:.6e}, borderline {borderline})");
        }
        other => println!("classified : {other:?}"),
    }

    let cert = construct_y(t, b, &tol)?;
    let lhs = &cert.factor_y * t;
    let rhs = &cert.projector_t * b;
    println!("‖YT − P_T B‖_F = {:.3e}", (&lhs - &rhs).fro_norm());
    println!("‖Y‖₂ = {:.12}", cert.factor_y.op_norm());
    println!("1/m  = {:.12}", 1.0 / m_max);
    assert!(cert.factor_y.op_norm() <= 1.0 / m_max + 1e-8);

    // The unconstrained branch: when B*T vanishes the form (Tf, Bf) is
    // identically zero and every m > 0 works.  Orthogonal rank-one ranges
    // do it.
    let t0 = ComplexMatrix::from_real_vec(2, 2, vec![1.0, 0.0, 0.0, 0.0])?;
    let b0 = ComplexMatrix::from_real_vec(2, 2, vec![0.0, 0.0, 0.0, 1.0])?;
    let check = check_reversed(&t0, &b0, &tol)?;
    println!("\northogonal ranges:");
    println!("feasible : {}", check.feasible);
    println!("m_max    : {:?} (None = unconstrained)", check.m_max);
    assert!(check.feasible && check.m_max.is_none());
    let cert = construct_y(&t0, &b0, &tol)?;
    // P_T B = 0 here, so the zero factor does the job.
    println!("‖Y‖₂ = {:.3e}", cert.factor_y.op_norm());

    Ok(())
}
