//! Spitzer-type identities: the classical and noncommutative forms, the
//! weighted BCH recursion chi^theta with its exponential factorization, and
//! the Bohnenblust-Spitzer permutation identities.
//!
//! Run with `cargo run --example spitzer_identities`.

use hopfflow::rat::{q, qi};
use hopfflow::rotabaxter::{random_ratmat, ProjectionRB, RotaBaxter, SeriesRB, SummationRB};
use hopfflow::spitzer::{
    bohnenblust_commutative, chi_theta_factorization_residual, classical_spitzer_residual,
    nc_bohnenblust, nc_spitzer_residual,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // classical Spitzer identity on a commutative series carrier
    let base = ProjectionRB::new(1, qi(1)).unwrap();
    let series = SeriesRB::new(base, 6);
    let x = (random_ratmat(&mut rng, 1, 5), random_ratmat(&mut rng, 1, 5));
    let a = series.monomial(x, 1);
    let res = classical_spitzer_residual(&series, &a).unwrap();
    assert_eq!(series.magnitude(&res), 0.0);
    println!("classical Spitzer identity: exact through t^6");

    // noncommutative form with the chi^theta correction, theta in {1, 2}
    for theta in [qi(1), qi(2)] {
        let base = ProjectionRB::new(2, theta.clone()).unwrap();
        let series = SeriesRB::new(base, 5);
        let x = (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4));
        let a = series.monomial(x, 1);
        let res = nc_spitzer_residual(&series, &a).unwrap();
        assert_eq!(series.magnitude(&res), 0.0);
        let fac = chi_theta_factorization_residual(&series, &a).unwrap();
        assert_eq!(series.magnitude(&fac), 0.0);
        println!("noncommutative Spitzer + factorization: exact at theta = {theta}");
    }

    // commutative Bohnenblust-Spitzer: permutation sum = partition sum
    let summ = SummationRB::new(qi(1)).unwrap();
    for n in 1..=5usize {
        let xs: Vec<_> = (0..n)
            .map(|i| summ.geom(qi(i as i64 + 1), q(1, i as i64 + 2)).unwrap())
            .collect();
        let (lhs, rhs) = bohnenblust_commutative(&summ, &xs).unwrap();
        assert_eq!(summ.magnitude(&summ.sub(&lhs, &rhs)), 0.0);
    }
    println!("commutative Bohnenblust-Spitzer: exact for n <= 5");

    // noncommutative theorem with pre-Lie/double products, n <= 4
    let proj = ProjectionRB::new(2, qi(1)).unwrap();
    for n in 1..=4usize {
        let xs: Vec<_> = (0..n)
            .map(|_| (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4)))
            .collect();
        let (lhs, rhs) = nc_bohnenblust(&proj, &xs).unwrap();
        assert_eq!(proj.magnitude(&proj.sub(&lhs, &rhs)), 0.0);
    }
    println!("noncommutative Bohnenblust-Spitzer: exact for n <= 4");
}
