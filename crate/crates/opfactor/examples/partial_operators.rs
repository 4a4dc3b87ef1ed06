//! Operators that live only on a subspace, and the inclusion order that
//! the factorization statements `XB ⊆ T` and `YT ⊆ P_T B` are written in.
//!
//! On full domains inclusion is just equality of matrices, so everywhere
//! else in this crate it is checked that way; this example shows the
//! genuinely partial picture: restrictions, compositions that shrink
//! domains, and quadratic-form signs that depend on the subspace.
//!
//! Run with `cargo run --example partial_operators`.

use opfactor::matrix::ComplexMatrix;
use opfactor::partial::{
    compose, coordinate_basis, includes, quadratic_form_sign, PartialOperator,
};
use opfactor::tolerance::Tolerance;

fn main() -> opfactor::Result<()> {
    let tol = Tolerance::default();

    // A full operator and its restriction to the first two coordinates.
    let m = ComplexMatrix::from_real_vec(
        3,
        3,
        vec![
            2.0, 1.0, 0.0, //
            0.0, 1.0, 1.0, //
            1.0, 0.0, 1.0,
        ],
    )?;
    let full = PartialOperator::full(m.clone());
    let restricted = PartialOperator::new(m.clone(), coordinate_basis(3, &[0, 1]), &tol)?;
    println!("dom(restricted) = {} of {}", restricted.domain_dim(), restricted.ambient_in());
    println!("restricted ⊆ full : {}", includes(&full, &restricted, &tol)?);
    println!("full ⊆ restricted : {}", includes(&restricted, &full, &tol)?);
    assert!(includes(&full, &restricted, &tol)?);
    assert!(!includes(&restricted, &full, &tol)?);

    // Inclusion needs agreement, not just nested domains: doubling the
    // action on the same domain destroys it.
    let doubled = PartialOperator::new(m.scale(2.0), coordinate_basis(3, &[0, 1]), &tol)?;
    println!("doubled ⊆ full    : {}", includes(&full, &doubled, &tol)?);
    assert!(!includes(&full, &doubled, &tol)?);

    // Composition tracks preimages.  B sends everything onto span(e2), A is
    // defined on span(e1) only, so dom(A∘B) is exactly ker B.
    let b_m = ComplexMatrix::from_real_vec(2, 2, vec![0.0, 0.0, 1.0, 1.0])?;
    let a = PartialOperator::new(ComplexMatrix::identity(2), coordinate_basis(2, &[0]), &tol)?;
    let ab = compose(&a, &PartialOperator::full(b_m), &tol)?;
    println!("\ndom(A∘B) has dimension {}", ab.domain_dim());
    let dir = ab.domain_basis();
    println!(
        "spanned by ({:.4}, {:.4}) — the kernel direction of B",
        dir.get(0, 0).re,
        dir.get(1, 0).re
    );
    assert_eq!(ab.domain_dim(), 1);

    // A composition can even be defined nowhere except at zero.
    let inj = ComplexMatrix::from_real_vec(2, 1, vec![0.0, 1.0])?;
    let nowhere = compose(&a, &PartialOperator::full(inj), &tol)?;
    println!("injective miss   : dom dimension {}", nowhere.domain_dim());
    assert_eq!(nowhere.domain_dim(), 0);
    // The trivial operator is included in everything on the same spaces.
    let anything = PartialOperator::full(ComplexMatrix::from_real_vec(2, 1, vec![3.0, -1.0])?);
    assert!(includes(&anything, &nowhere, &tol)?);

    // Quadratic-form sign is a subspace property: an indefinite operator is
    // nonnegative when compressed to the right domain.
    let indefinite = ComplexMatrix::from_diag(&[1.0, -1.0, 0.5]);
    let (on_all, min_all) = quadratic_form_sign(&indefinite, &ComplexMatrix::identity(3), &tol)?;
    let (on_sub, min_sub) =
        quadratic_form_sign(&indefinite, &coordinate_basis(3, &[0, 2]), &tol)?;
    println!("\ndiag(1,-1,0.5) ⪰ 0 on C³         : {on_all} (min eig {min_all:.2})");
    println!("diag(1,-1,0.5) ⪰ 0 on span(e1,e3): {on_sub} (min eig {min_sub:.2})");
    assert!(!on_all && on_sub);

    // In finite dimension closure changes nothing; it exists so arguments
    // written for the general setting transcribe verbatim.
    let cl = restricted.closure();
    assert!(includes(&restricted, &cl, &tol)? && includes(&cl, &restricted, &tol)?);
    println!("\nclosure(restricted) == restricted : true");

    Ok(())
}
