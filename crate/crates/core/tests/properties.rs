use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use regdim::estimators::{packing_sum, Ends};
use regdim::gallery;
use regdim::selfsimilar::SelfSimilarSystem;
use regdim::sponge::{epsilon_carpet_exact, SpongeSystem};
use regdim::{Number, Point, SimilarityMap};

fn carpet(num: i64) -> SpongeSystem {
    epsilon_carpet_exact(&Number::from_ratio(num, 100).unwrap()).unwrap()
}

/// Five digits on a 5x7 grid, far enough apart for very strong separation.
fn random_sponge(weights: &[u32]) -> SpongeSystem {
    let digits = vec![vec![0, 0], vec![0, 3], vec![2, 1], vec![2, 6], vec![4, 4]];
    let total: u32 = weights.iter().sum();
    let probs: Vec<Number> = weights.iter().map(|&w| Number::from_ratio(w as i64, total as i64).unwrap()).collect();
    SpongeSystem::from_numbers(vec![5, 7], digits, &probs).unwrap()
}

fn interval_system(c0: f64, c1: f64, p: f64) -> SelfSimilarSystem {
    let maps = vec![
        SimilarityMap::scaling(c0, Point::scalar(0.0)).unwrap(),
        SimilarityMap::scaling(c1, Point::scalar(1.0 - c1)).unwrap(),
    ];
    SelfSimilarSystem::new(maps, &[p, 1.0 - p]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conditionals_sum_to_one(weights in prop::collection::vec(1u32..50, 5)) {
        let s = random_sponge(&weights);
        for l in 0..s.dim() {
            let prefixes: std::collections::BTreeSet<&[u32]> = s.digits().iter().map(|d| &d[..l]).collect();
            for prefix in prefixes {
                let sum: f64 = (0..s.bases()[l]).filter_map(|v| s.conditional_of(prefix, v)).sum();
                prop_assert!((sum - 1.0).abs() < 1e-12, "axis {} prefix {:?}: {}", l, prefix, sum);
            }
        }
    }

    #[test]
    fn cubes_partition_unity(eps in 1i64..=50, k in 0u32..=3) {
        let s = carpet(eps);
        let depth = s.depth_vector(3f64.powi(-(k as i32))).unwrap();
        let total = s
            .cube_representatives(&depth)
            .iter()
            .map(|w| s.cube_mass_exact_at_depth(w, &depth).unwrap())
            .fold(BigRational::zero(), |a, b| a + b);
        prop_assert_eq!(total, BigRational::one());
    }

    #[test]
    fn cylinder_masses_are_exact_products(p in 1i64..99, word in prop::collection::vec(0usize..2, 0..30)) {
        let s = gallery::cantor_exact(&Number::from_ratio(p, 100).unwrap()).unwrap();
        let exact = s.cylinder_mass_exact(&word).unwrap().unwrap();
        let expect = word.iter().fold(BigRational::one(), |acc, &i| {
            acc * if i == 0 { BigRational::new(p.into(), 100.into()) } else { BigRational::new((100 - p).into(), 100.into()) }
        });
        prop_assert_eq!(&exact, &expect);
        let float = s.cylinder(&word).unwrap().mass;
        let rel = (float - regdim::rational::ratio_to_f64(&exact)).abs() / float;
        prop_assert!(rel < 1e-12);
    }

    #[test]
    fn ball_mass_enclosures_are_monotone(
        c0 in 0.1f64..0.45, c1 in 0.1f64..0.45, p in 0.05f64..0.95, x in 0.0f64..1.0, r1 in 1e-4f64..0.5, scale in 1.0f64..4.0,
    ) {
        let s = interval_system(c0, c1, p);
        let at = Point::scalar(x);
        let a = s.ball_mass(&at, r1, 1e-9).unwrap();
        let b = s.ball_mass(&at, r1 * scale, 1e-9).unwrap();
        prop_assert!(a.lo <= a.hi && b.lo <= b.hi);
        prop_assert!(a.lo <= b.hi * (1.0 + 1e-12), "{:?} vs {:?}", a, b);
    }

    #[test]
    fn packing_sum_at_one_is_at_most_one(p in 0.05f64..0.95, k in 2i32..7) {
        let s = gallery::cantor(p).unwrap();
        let tol = 1e-6;
        let m = packing_sum(&s, 3f64.powi(-k), 1.0, 0.25, tol, Ends::Conservative).unwrap();
        prop_assert!(m.value() <= 1.0 + tol, "{}", m.value());
    }
}
