//! Free tensor algebra basics: shuffle vs concatenation products, the
//! exp/log pair, and the Dynkin criterion for Lie elements.
//!
//! Run with `cargo run --example free_algebra`.

use hopfflow::freetensor::{
    concat_mul, dynkin, ree_grouplike_check, series_exp, series_log, shuffle_mul, FreePoly,
};
use hopfflow::rat::qi;

fn main() {
    let x = FreePoly::letter(0);
    let y = FreePoly::letter(1);
    let trunc = 4;

    // shuffle product of two letters: xy + yx
    let sh = shuffle_mul(&x, &y);
    println!("x sha y = {}", sh.canonical_text());

    // log of exp(x)exp(y) is a Lie series (the CBHD series)
    let ex = series_exp(&x, trunc).unwrap();
    let ey = series_exp(&y, trunc).unwrap();
    let log_exey = series_log(&concat_mul(&ex, &ey).truncated(trunc), trunc).unwrap();
    println!("log(e^x e^y) through degree 2:");
    for (w, c) in log_exey.terms().filter(|(w, _)| w.len() <= 2) {
        println!("  {c} * {w:?}");
    }

    // the Dynkin operator acts as n·id on homogeneous degree-n Lie elements
    let bracket = concat_mul(&x, &y).sub(&concat_mul(&y, &x));
    assert_eq!(dynkin(&bracket), bracket.scale(&qi(2)));
    println!("Dynkin([x,y]) = 2[x,y]  (degree times identity on Lie elements)");

    // Ree's criterion: a grouplike series is a character of the shuffle algebra
    assert!(ree_grouplike_check(&ex, 2, trunc));
    println!("exp(x) passes the shuffle-character (Ree) check");

    // a single word is not a Lie element
    let xy = concat_mul(&x, &y);
    assert_ne!(dynkin(&xy), xy.scale(&qi(2)));
    println!("the word xy alone is not a Lie element");
}
