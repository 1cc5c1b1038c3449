//! Property tests of invariants that span modules.

use heavytail::distributions::{FellerParetoSpec, GpdSpec, Margin, ParetoSpec};
use heavytail::exact::{
    h_function, parse_rational, stp_sum_cdf_exact, stp_sum_pmf, two_term_cdf, TabulatedUtility, TwoTermIntegrand,
};
use heavytail::majorization::{chain_points, majorizes, random_majorizing_pair, t_transform_chain, WeightVector};
use heavytail::montecarlo::{empirical_fsd_test, EmpiricalDistribution, GridSpec, ResultDocument};
use heavytail::portfolio::{evaluate, two_point_lattice, PenaltySpec, PreferenceSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_reaches_theta(seed in 0u64..10_000, n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (eta, theta) = random_majorizing_pair(n, &mut rng).unwrap();
        prop_assert!(majorizes(&eta, &theta).unwrap().is_strict());
        let chain = t_transform_chain(&eta, &theta).unwrap();
        prop_assert!(chain.len() < n);
        let points = chain_points(&eta, &chain);
        // each step moves down the order
        for w in points.windows(2) {
            prop_assert!(majorizes(&w[0], &w[1]).unwrap().holds());
        }
        let mut end = points.last().unwrap().increasing();
        let mut target = theta.increasing();
        end.iter_mut().zip(target.iter_mut()).for_each(|(a, b)| {
            *a = (*a * 1e9).round();
            *b = (*b * 1e9).round();
        });
        prop_assert_eq!(end, target);
    }

    #[test]
    fn penalties_never_increase_down_the_order(seed in 0u64..10_000, n in 2usize..8, c in 0.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (eta, theta) = random_majorizing_pair(n, &mut rng).unwrap();
        for g in [PenaltySpec::SumSquares(c), PenaltySpec::Max(c)] {
            prop_assert!(g.value(theta.as_slice()) <= g.value(eta.as_slice()) + 1e-12);
        }
    }

    #[test]
    fn quantile_round_trip(alpha in 0.1f64..3.0, p in 0.01f64..0.99) {
        for m in [
            Margin::Pareto(ParetoSpec::standard(alpha).unwrap()),
            Margin::Gpd(GpdSpec::new(1.0 / alpha, 1.0).unwrap()),
            Margin::FellerPareto(FellerParetoSpec::standard(alpha, 1.0, 1.0).unwrap()),
        ] {
            let back = m.cdf(m.quantile(p).unwrap()).unwrap();
            prop_assert!((back - p).abs() <= 1e-12 * p.max(1e-3), "{:?}: {} vs {}", m, back, p);
        }
    }

    #[test]
    fn stp_cdf_monotone_and_strict_below_weak(k1 in 1i64..5, k2 in 1i64..5, x in 2i64..40) {
        let w = vec![rat(k1, k1 + k2), rat(k2, k1 + k2)];
        let x0 = rat(x, 1);
        let x1 = rat(x + 1, 1);
        let strict = stp_sum_cdf_exact(&w, &x0, true).unwrap();
        let weak = stp_sum_cdf_exact(&w, &x0, false).unwrap();
        prop_assert!(strict <= weak);
        prop_assert!(weak <= stp_sum_cdf_exact(&w, &x1, false).unwrap());
        let pmf = stp_sum_pmf(&w, &x1, 10_000_000).unwrap();
        prop_assert_eq!(pmf.total_mass(), rat(1, 1));
        prop_assert_eq!(pmf.cdf(&x0, false).unwrap(), weak);
    }

    #[test]
    fn two_term_cdf_is_a_cdf(a1 in 0.2f64..1.0, a2 in 0.2f64..1.0, eta in 0.05f64..0.5, x in 1.0f64..50.0, dx in 0.0f64..10.0) {
        let s = TwoTermIntegrand::new(a1, a2, eta).unwrap();
        let f0 = two_term_cdf(&s, x).unwrap();
        let f1 = two_term_cdf(&s, x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&f0));
        prop_assert!(f1 >= f0 - 1e-9);
        prop_assert!(two_term_cdf(&s, 1.0).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn balanced_weights_have_larger_tail(a1 in 0.2f64..1.0, da in 0.0f64..0.5, z in 0.05f64..0.45, x in 1.01f64..100.0) {
        let a2 = (a1 + da).min(1.0);
        let lo = h_function(a1, a2, x, z).unwrap();
        let hi = h_function(a1, a2, x, 0.5).unwrap();
        prop_assert!(hi >= lo - 1e-9, "H({})={} > H(1/2)={}", z, lo, hi);
    }

    #[test]
    fn quantile_preference_is_the_left_quantile(v in proptest::collection::vec(0.0f64..1e6, 1..300), p in 0.001f64..0.999) {
        let e = EmpiricalDistribution::new(v).unwrap();
        prop_assert_eq!(evaluate(&PreferenceSpec::Quantile(p), &e).unwrap(), e.quantile(p).unwrap());
    }

    #[test]
    fn shifting_up_never_violates_fsd(v in proptest::collection::vec(1.0f64..1e3, 50..300), shift in 0.0f64..10.0) {
        let low = EmpiricalDistribution::new(v.clone()).unwrap();
        let high = EmpiricalDistribution::new(v.iter().map(|x| x + shift).collect()).unwrap();
        let verdict = empirical_fsd_test(&low, &high, &GridSpec::with_points(64), 0.99).unwrap();
        prop_assert!(verdict.is_consistent());
    }

    #[test]
    fn document_round_trip(keys in proptest::collection::vec("[a-z][a-z0-9_.]{0,12}", 1..8), vals in proptest::collection::vec("[ -~]{0,20}", 8)) {
        let mut d = ResultDocument::new("anchor");
        for (k, v) in keys.iter().zip(&vals) {
            d.push(k, v.trim());
        }
        let back = ResultDocument::parse(&d.render()).unwrap();
        prop_assert_eq!(back.entries().len(), d.entries().len());
        for ((k1, v1), (k2, v2)) in back.entries().iter().zip(d.entries()) {
            prop_assert_eq!(k1, k2);
            prop_assert_eq!(v1.trim(), v2.trim());
        }
    }

    #[test]
    fn concave_two_point_lattice_prefers_uniform(
        a in 0i64..20, b in 0i64..20, p in 1i64..10, n in 2usize..5,
        slopes in proptest::collection::vec(1i64..20, 2..5),
    ) {
        // knots every 5 units with non-increasing slopes
        let mut s = slopes.clone();
        s.sort_unstable_by(|x, y| y.cmp(x));
        let mut knots = vec![(rat(0, 1), rat(0, 1))];
        for (i, sl) in s.iter().enumerate() {
            let (x, y) = knots[i].clone();
            knots.push((x + rat(5, 1), y + rat(5 * sl, 1)));
        }
        let u = TabulatedUtility::new(knots).unwrap();
        prop_assert!(u.is_concave());
        let l = two_point_lattice(&rat(a, 1), &rat(b, 1), &rat(p, 10), n, 6, &u).unwrap();
        prop_assert!(l.uniform_maximizes());
    }
}

#[test]
fn rational_parser_accepts_the_documented_forms() {
    assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
    assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
    assert_eq!(parse_rational("8").unwrap(), rat(8, 1));
}

#[test]
fn identical_weights_give_identical_portfolios() {
    let w = WeightVector::new(vec![0.2, 0.3, 0.5]).unwrap();
    assert!(majorizes(&w, &w).unwrap().holds());
    assert!(!majorizes(&w, &w).unwrap().is_strict());
}
