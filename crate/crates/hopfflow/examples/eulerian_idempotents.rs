//! Eulerian idempotents: the convolution logarithm of the identity, its
//! descent-statistic closed form, orthogonality, and Adams operations.
//!
//! Run with `cargo run --example eulerian_idempotents`.

use hopfflow::idempotents::{
    adams, all_permutations, descent_pi1, eulerian, GradedEndo, HopfSide,
};
use hopfflow::freetensor::Word;
use hopfflow::rat::qi;

fn main() {
    let deg = 4;
    let side = HopfSide::ConcatUnshuffle;

    // pi1 on the standard 3-letter word, with the closed descent coefficients
    println!("pi1 coefficients on S_3 (sign and descent-binomial weight):");
    for (sigma, c) in descent_pi1(3) {
        println!("  sigma = {:?}  coeff = {c}", sigma.images);
    }

    // orthogonality: pi_m pi_k = delta_{mk} pi_k through degree 4
    let projectors: Vec<GradedEndo> =
        (1..=deg).map(|n| eulerian(n, side, deg, deg).unwrap()).collect();
    for (i, p) in projectors.iter().enumerate() {
        for (j, r) in projectors.iter().enumerate() {
            let prod = p.compose(r).unwrap();
            let expect = if i == j { p.clone() } else { p.zero_like() };
            assert!(prod.sub(&expect).unwrap().is_zero());
        }
    }
    println!("pi_m pi_k = delta pi_k verified through degree {deg}");

    // partition of unity: sum pi_n = id on each positive degree
    let id = GradedEndo::identity(side, deg, deg);
    let mut total = id.zero_like();
    for p in &projectors {
        total = total.add(p).unwrap();
    }
    let diff = total.sub(&id).unwrap();
    for d in 1..=deg {
        let w = Word((0..d).collect());
        assert!(diff.apply_word(&w).is_zero());
    }
    println!("sum of pi_n equals the identity on degrees 1..{deg}");

    // Adams operation id^{*l} acts by l^n on the n-th eigenspace
    let l = 3usize;
    let psi = adams(l, side, deg, deg);
    for (n, p) in projectors.iter().enumerate() {
        let lhs = psi.compose(p).unwrap();
        let rhs = p.scale(&qi((l as i64).pow(n as u32 + 1)));
        assert!(lhs.sub(&rhs).unwrap().is_zero());
    }
    println!("Adams operation id^(*{l}) scales the n-th eigenspace by {l}^n");

    // descent formula agrees with the convolution logarithm on a word
    let w = Word(vec![0, 1, 2]);
    let via_conv = projectors[0].apply_word(&Word(vec![0, 1, 2]));
    let via_descent = hopfflow::idempotents::descent_pi1_apply(&w.0);
    assert_eq!(via_conv, via_descent);
    println!("descent closed form matches log*(id) on x0.x1.x2");
    let _ = all_permutations(3);
}
