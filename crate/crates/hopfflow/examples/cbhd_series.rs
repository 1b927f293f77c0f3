//! The CBHD series log(e^X e^Y): homogeneous terms via the first Eulerian
//! idempotent, nested-commutator form, and a numerical matrix check.
//!
//! Run with `cargo run --example cbhd_series`.

use hopfflow::cbhd::{cbhd_eval, cbhd_log, cbhd_via_phi, phi_m, to_nested_commutators};
use nalgebra::DMatrix;

fn main() {
    // homogeneous terms through order 4, as words and as commutators
    for m in 1..=4 {
        let term = phi_m(2, m);
        println!("Phi_{m} (words): {}", term.canonical_text());
        if m >= 2 {
            let brackets = to_nested_commutators(&term).unwrap();
            for t in &brackets {
                println!("  {} * {:?}", t.coefficient, t.tree);
            }
        }
    }

    // the formal log and the idempotent route agree
    let n = 5;
    assert!(cbhd_log(n).sub(&cbhd_via_phi(2, n)).is_zero());
    println!("formal log route = Eulerian idempotent route through order {n}");

    // numerical check: exp(cbhd(A, B)) = exp(A)exp(B) for small matrices
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 0.11, -0.07, 0.02]);
    let b = DMatrix::from_row_slice(2, 2, &[0.05, -0.03, 0.08, -0.04]);
    let z = cbhd_eval(&a, &b, 8).unwrap();
    let lhs = z.exp();
    let rhs = a.exp() * b.exp();
    let err = (lhs - rhs).abs().max();
    println!("matrix check |exp(Z) - exp(A)exp(B)| = {err:.3e}");
    assert!(err < 1e-12);
}
