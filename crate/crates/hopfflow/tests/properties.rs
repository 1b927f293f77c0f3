//! Randomized invariants checked with proptest: algebraic laws that must
//! hold for every input, not just the seeded cases in the unit tests.

use hopfflow::freetensor::{concat_mul, shuffle_mul, FreePoly, Word};
use hopfflow::rat::qi;
use hopfflow::rotabaxter::{random_ratmat, ProjectionRB, RotaBaxter, SummationRB};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word_strategy() -> impl Strategy<Value = Word> {
    prop::collection::vec(0usize..3, 0..5).prop_map(Word)
}

fn poly_strategy() -> impl Strategy<Value = FreePoly> {
    prop::collection::vec((word_strategy(), -4i64..=4), 1..4).prop_map(|terms| {
        let mut p = FreePoly::zero();
        for (w, c) in terms {
            p = p.add(&FreePoly::monomial(w, qi(c)));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shuffle_is_commutative_and_associative(
        a in poly_strategy(),
        b in poly_strategy(),
        c in poly_strategy(),
    ) {
        prop_assert_eq!(shuffle_mul(&a, &b), shuffle_mul(&b, &a));
        prop_assert_eq!(
            shuffle_mul(&shuffle_mul(&a, &b), &c),
            shuffle_mul(&a, &shuffle_mul(&b, &c))
        );
    }

    #[test]
    fn concatenation_is_associative(
        a in poly_strategy(),
        b in poly_strategy(),
        c in poly_strategy(),
    ) {
        prop_assert_eq!(
            concat_mul(&concat_mul(&a, &b), &c),
            concat_mul(&a, &concat_mul(&b, &c))
        );
    }

    #[test]
    fn projection_rb_relation_holds(seed in 0u64..10_000, theta in 1i64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = ProjectionRB::new(2, qi(theta)).unwrap();
        let a = (random_ratmat(&mut rng, 2, 6), random_ratmat(&mut rng, 2, 6));
        let b = (random_ratmat(&mut rng, 2, 6), random_ratmat(&mut rng, 2, 6));
        prop_assert_eq!(inst.magnitude(&inst.rb_residual(&a, &b)), 0.0);
        prop_assert_eq!(inst.magnitude(&inst.rb_lie_residual(&a, &b)), 0.0);
    }

    #[test]
    fn summation_rb_relation_holds(
        na in -5i64..=5, da in 2i64..=7,
        nb in -5i64..=5, db in 2i64..=7,
        theta in 1i64..=3,
    ) {
        use hopfflow::rat::q;
        let inst = SummationRB::new(qi(theta)).unwrap();
        let a = inst.geom(q(na, 2), q(1, da)).unwrap();
        let b = inst.geom(q(nb, 3), q(1, db)).unwrap();
        prop_assert_eq!(inst.magnitude(&inst.rb_residual(&a, &b)), 0.0);
    }
}
