//! The intermediate operator `H` squeezed between the two sides of the
//! forward inequality: `T*T ⪯ λH` and `H ⪯ λB*B`.
//!
//! In finite dimension the canonical choice collapses to the Gram operator
//! `M = hermitize(T*B)` itself; this example builds `H` both ways, checks
//! the two Loewner inequalities explicitly, and shows how the sandwich
//! tightens as `λ` shrinks toward the least feasible value.
//!
//! Run with `cargo run --example intermediate_sandwich`.

use opfactor::instances::{gen_instance, InstanceKind, InstanceSpec};
use opfactor::linalg::{loewner_leq, psd_min_eig};
use opfactor::sebestyen::{construct_x, intermediate_h};
use opfactor::tolerance::Tolerance;

fn main() -> opfactor::Result<()> {
    let tol = Tolerance::default();
    let spec = InstanceSpec::new(InstanceKind::ForwardFeasible, 6, 2024, 1.0)?;
    let inst = gen_instance(&spec)?;
    let (t, b) = (&inst.t, &inst.b);

    let cert = construct_x(t, b, &tol)?;
    let lambda = cert.lambda_min;
    let h = &cert.intermediate_h;
    println!("lambda_min = {:.12}", lambda);

    // Both legs of the sandwich hold at lambda_min.
    let tt = (&t.adjoint() * t).hermitize();
    let bb = (&b.adjoint() * b).hermitize();
    let lower = loewner_leq(&tt, &h.scale(lambda), &tol)?;
    let upper = loewner_leq(&h.scale(lambda), &bb.scale(lambda * lambda), &tol)?;
    println!("T*T ⪯ λH        : {lower}");
    println!("λH  ⪯ λ²B*B     : {upper}");
    assert!(lower && upper);

    // H is itself positive semidefinite, as any operator wedged between
    // 0 ⪯ T*T/λ and λB*B must be.
    let psd = psd_min_eig(h, &tol)?;
    println!("H ⪰ 0           : {} (min eig {:.3e})", psd.is_psd, psd.min_eig);

    // The same H comes out of the generic construction B*XB applied to the
    // certified factor.
    let h2 = intermediate_h(b, &cert.factor_x, &tol)?;
    println!("‖B*XB − H‖_F    = {:.3e}", (&h2 - h).fro_norm());

    // Below lambda_min the sandwich must break: shaving lambda by 1%
    // invalidates at least one leg.
    let shaved = lambda * 0.99;
    let lower_s = loewner_leq(&tt, &h.scale(shaved), &tol)?;
    let upper_s = loewner_leq(&h.scale(shaved), &bb.scale(shaved * shaved), &tol)?;
    println!(
        "at 0.99·λ       : lower {} / upper {} (sandwich breaks)",
        lower_s, upper_s
    );
    assert!(!(lower_s && upper_s));

    Ok(())
}
