#[path = "support/fm.rs"]
mod fm;
#[path = "support/gen.rs"]
mod gen;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ratlp::{feasible, ratio, support_maximal_solution, Outcome};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verdict_matches_elimination(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::random_system(&mut rng, 5, 6, false);
        let out = feasible(&sys);
        prop_assert_eq!(out.is_feasible(), fm::fm_feasible(&sys));
        match out {
            Outcome::Feasible(s) => prop_assert!(sys.satisfied_by(&s.values)),
            Outcome::Infeasible(f) => prop_assert!(f.verify(&sys)),
        }
    }

    #[test]
    fn homogeneous_solutions_add_and_scale(seed in any::<u64>(), num in 1i64..20, den in 1i64..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::random_system(&mut rng, 5, 6, true);
        let probes: Vec<usize> = (0..sys.num_vars()).collect();
        let max = support_maximal_solution(&sys, &probes).unwrap();
        prop_assert!(sys.satisfied_by(&max.values));
        let scaled = max.scale(&ratio(num, den));
        prop_assert!(sys.satisfied_by(&scaled.values));
        if let Outcome::Feasible(s) = feasible(&sys) {
            prop_assert!(sys.satisfied_by(&s.add(&max).values));
            prop_assert!(s.support().is_subset(&max.support()));
        }
    }

    #[test]
    fn support_is_maximal_per_probe(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = gen::random_system(&mut rng, 4, 5, true);
        let probes: Vec<usize> = (0..sys.num_vars()).collect();
        let max = support_maximal_solution(&sys, &probes).unwrap();
        for v in probes {
            let mut probe = sys.clone();
            probe.add(vec![(v, ratio(1, 1))], ratlp::Relation::Ge, ratio(1, 1));
            prop_assert_eq!(fm::fm_feasible(&probe), max.support().contains(&v));
        }
    }
}
