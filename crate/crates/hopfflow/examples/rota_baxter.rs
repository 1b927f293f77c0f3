//! Rota-Baxter operators on four carriers: projections on matrix pairs,
//! summation on geometric sums, Jackson q-integration, and Riemann
//! integration on sampled grids; plus the Atkinson factorization.
//!
//! Run with `cargo run --example rota_baxter`.

use hopfflow::rat::{q, qi};
use hopfflow::rotabaxter::{
    atkinson_factorization_residual, random_ratmat, JacksonKind, JacksonRB, ProjectionRB,
    RiemannRB, RotaBaxter, SeriesRB, SummationRB,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    // projection carrier (weight theta): R(a, b) = (theta a, 0)
    let proj = ProjectionRB::new(2, qi(2)).unwrap();
    let a = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
    let b = (random_ratmat(&mut rng, 2, 5), random_ratmat(&mut rng, 2, 5));
    assert_eq!(proj.magnitude(&proj.rb_residual(&a, &b)), 0.0);
    println!("projection carrier: Rota-Baxter residual exactly 0");

    // summation operator on geometric sums (weight theta)
    let summ = SummationRB::new(qi(1)).unwrap();
    let ga = summ.geom(qi(3), q(1, 2)).unwrap();
    let gb = summ.geom(qi(-2), q(1, 3)).unwrap();
    assert_eq!(summ.magnitude(&summ.rb_residual(&ga, &gb)), 0.0);
    println!("summation carrier: residual exactly 0");

    // Jackson q-integration, both the weight -1 and the weight (1-q) forms
    for kind in [JacksonKind::Pq, JacksonKind::Modified] {
        let jack = JacksonRB::new(q(1, 3), kind).unwrap();
        let pa = jack.monomial(qi(2), 3).unwrap();
        let pb = jack.monomial(qi(-1), 2).unwrap();
        assert_eq!(jack.magnitude(&jack.rb_residual(&pa, &pb)), 0.0);
        println!("jackson carrier ({kind:?}, weight {}): residual exactly 0", jack.weight());
    }

    // Riemann integration on a sampled grid (weight 0, quadrature-exact on
    // polynomials)
    let riem = RiemannRB::uniform(1.0, 201, 1).unwrap();
    let pa = riem.sample_scalar(|t| 1.0 + t * t);
    let pb = riem.sample_scalar(|t| t - 0.5 * t * t * t);
    let res = riem.magnitude(&riem.rb_residual(&pa, &pb));
    println!("riemann carrier: residual {res:.2e} (quadrature level)");
    assert!(res < 1e-12);

    // Atkinson: Y(1 - theta a)X = 1 from the two one-sided recursions
    let base = ProjectionRB::new(2, qi(1)).unwrap();
    let series = SeriesRB::new(base, 6);
    let x = (random_ratmat(&mut rng, 2, 4), random_ratmat(&mut rng, 2, 4));
    let elem = series.monomial(x, 1);
    let (sol_x, sol_y) = hopfflow::rotabaxter::atkinson_solve(&series, &elem).unwrap();
    let res = atkinson_factorization_residual(&series, &elem, &sol_x, &sol_y).unwrap();
    assert_eq!(series.magnitude(&res), 0.0);
    println!("Atkinson factorization holds exactly on the series carrier");
}
