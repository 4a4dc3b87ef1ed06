//! How the factorization constant grows when the operator genuinely gets
//! harder: the forward-difference stencil `(Tf)_k = n(f_{k+1} − f_k)`
//! against the identity.
//!
//! As the grid refines, `T` approximates a first derivative, and no fixed
//! constant controls a derivative by the values of the function: the least
//! `λ` with `TT* ⪯ λ²BB*` must blow up.  The scaling table makes that
//! growth measurable — doubling `n` doubles `λ`, first-order in the grid
//! resolution — while the reversed extreme `m_max` (the largest `m` with
//! `m²BB* ⪯ TT*`) stays pinned near a constant.
//!
//! Run with `cargo run --example difference_operator_scaling`.

use opfactor::instances::InstanceKind;
use opfactor::suite::scaling_report;
use opfactor::tolerance::Tolerance;

fn main() -> opfactor::Result<()> {
    let tol = Tolerance::default();
    let sizes = [4, 8, 16, 32, 64, 128];
    let table = scaling_report(&sizes, InstanceKind::DifferenceOperator, &tol)?;

    print!("{}", table.to_csv());

    assert!(table.lambda_nondecreasing());
    let first = table.rows.first().expect("nonempty table");
    let last = table.rows.last().expect("nonempty table");
    println!(
        "\nlambda grows {:.3} -> {:.3} ({}x) across n = {} .. {}",
        first.lambda_min,
        last.lambda_min,
        (last.lambda_min / first.lambda_min).round(),
        first.n,
        last.n
    );
    // Doubling n roughly doubles lambda: the growth is first-order in the
    // grid resolution, not an artifact of tolerance choices.  The factor
    // norm tracks lambda (the reduced factor attains it).
    for pair in table.rows.windows(2) {
        let ratio = pair[1].lambda_min / pair[0].lambda_min;
        println!(
            "n {:>3} -> {:>3}: lambda ratio {:.4}, factor norm {:.3} -> {:.3}, m_max {:.4} -> {:.4}",
            pair[0].n, pair[1].n, ratio, pair[0].factor_norm, pair[1].factor_norm,
            pair[0].m_max, pair[1].m_max
        );
        assert!(ratio > 1.5 && ratio < 2.5);
        assert!((pair[1].factor_norm - pair[1].lambda_min).abs() <= 1e-8 * pair[1].lambda_min);
    }

    Ok(())
}
