//! The Faa di Bruno Hopf algebra: Bell polynomials and series composition,
//! the composition coproduct, the Witt-type bracket in the graded dual,
//! and the primitive elements.
//!
//! Run with `cargo run --example faa_di_bruno`.

use hopfflow::faadibruno::{
    antipode, compose_series, compose_series_oracle, dual_bracket, fdb_coproduct,
    inverse_series, primitive_space, ExpSeries, Functional,
};
use hopfflow::rat::{q, qi};

fn main() {
    // composition of exponential series via Bell polynomials
    let f = ExpSeries::new(vec![qi(1), qi(2), qi(-1), q(1, 2), qi(0), qi(3)]);
    let g = ExpSeries::new(vec![qi(1), q(-1, 3), qi(1), qi(0), qi(2), qi(-2)]);
    let h = compose_series(&f, &g, 6);
    assert_eq!(h, compose_series_oracle(&f, &g, 6));
    println!("(f o g) coefficients: {:?}", h.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>());

    // the coproduct encodes composition: Delta a_4
    println!("Delta a_4 terms:");
    for ((l, r), c) in &fdb_coproduct(4).terms {
        println!("  {c} * {l:?} (x) {r:?}");
    }

    // graded dual: convolution commutators close the Witt algebra
    for (n, m) in [(1usize, 2usize), (2, 3), (1, 4)] {
        let br = dual_bracket(n, m);
        let expect = Functional::b_prime(n + m).scale(&qi(m as i64 - n as i64));
        assert!(br.sub(&expect).values.is_empty());
        println!("[b'_{n}, b'_{m}] = {}*b'_{}", m as i64 - n as i64, n + m);
    }

    // primitives: one in degrees 1 and 2, none in 3..5
    let dims: Vec<usize> = (1..=5).map(|d| primitive_space(d).len()).collect();
    println!("primitive space dimensions in degrees 1..5: {dims:?}");
    assert_eq!(dims, vec![1, 1, 0, 0, 0]);

    // the antipode computes compositional inverses
    let finv = inverse_series(&f, 6).unwrap();
    for n in 2..=6 {
        assert_eq!(antipode(n).eval(&f), finv.coeff(n));
    }
    println!("antipode evaluation reproduces the compositional inverse of f");
}
