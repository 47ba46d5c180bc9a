//! Randomised invariants of the weight system, the model and the search.

use num_rational::BigRational;
use proptest::prelude::*;

use wandering::model::{compute_a, inner_product, GeneratorPair, Poly};
use wandering::pattern::DegreePattern;
use wandering::recovery::{attach_register, default_z3, recover, rounded_point};
use wandering::reduction::{compute_c, n1, objective_b1, reduce, with_unit_d0, ReducedSystem};
use wandering::scalar::{Cplx, Field, Interval, Surd};
use wandering::search::objective::MiddleObjective;
use wandering::search::strategy::{DSpace, Evaluator, GridSearch, SearchStrategy};
use wandering::search::{minimize, SearchConfig};
use wandering::weights::{override_block, WeightSequence};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn system<T: Field>(alpha: i64, k: u64) -> ReducedSystem<T> {
    reduce(&WeightSequence::dirichlet_int(alpha), &DegreePattern::standard(k).unwrap()).unwrap()
}

fn cplx(re: i64, im: i64) -> Cplx<BigRational> {
    Cplx::new(q(re, 1), q(im, 1))
}

fn poly() -> impl Strategy<Value = Poly<BigRational>> {
    prop::collection::vec((0u64..30, -50i64..50, -50i64..50), 1..6).prop_map(|terms| {
        let mut p = Poly::new();
        for (t, re, im) in terms {
            p.add_term(t, cplx(re, im));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solved_columns_satisfy_their_systems(alpha in -24i64..-2, k in 6u64..12) {
        let rs: ReducedSystem<BigRational> = system(alpha, k);
        let block = n1(&rs.n);
        for r in 0..3 {
            let row = |x: &[BigRational; 3]| (0..3).fold(q(0, 1), |acc, c| acc + block[r][c].clone() * x[c].clone());
            prop_assert_eq!(row(&rs.e), -rs.n[r][0].clone());
            prop_assert_eq!(row(&rs.g), if r == 0 { q(1, 1) } else { q(0, 1) });
        }
    }

    #[test]
    fn regimes_agree(alpha in -24i64..-2, k in 6u64..12) {
        let exact: ReducedSystem<BigRational> = system(alpha, k);
        let iv: ReducedSystem<Interval> = system(alpha, k);
        let fl: ReducedSystem<f64> = system(alpha, k);
        prop_assert!(iv.det_n1.contains_rational(&exact.det_n1));
        for i in 0..3 {
            prop_assert!(iv.e[i].contains_rational(&exact.e[i]));
            prop_assert!(iv.g[i].contains_rational(&exact.g[i]));
            let e = Field::to_f64(&exact.e[i]);
            prop_assert!((fl.e[i] - e).abs() <= 1e-6 * e.abs().max(1.0));
        }
    }

    #[test]
    fn inner_product_is_hermitian(f in poly(), g in poly(), alpha in -6i64..3) {
        let seq = WeightSequence::dirichlet_int(alpha);
        let fg = inner_product(&f, &g, &seq).unwrap();
        let gf = inner_product(&g, &f, &seq).unwrap();
        prop_assert_eq!(fg, gf.conj());
        let ff = inner_product(&f, &f, &seq).unwrap();
        prop_assert!(ff.im == q(0, 1) && ff.re > q(0, 1));
    }

    #[test]
    fn override_touches_only_matrix_indices(k in 6u64..14, base in -3i64..0, t in 0u64..80) {
        let pattern = DegreePattern::standard(k).unwrap();
        let base = WeightSequence::dirichlet_int(base);
        let donor = WeightSequence::dirichlet_int(-16);
        let seq = override_block(&base, &donor, &pattern).unwrap();
        let expected = if pattern.matrix_indices().contains(&t) { &donor } else { &base };
        prop_assert_eq!(seq.weight::<BigRational>(t).unwrap(), expected.weight::<BigRational>(t).unwrap());
    }

    #[test]
    fn homogeneous_in_d(d1 in 1i64..500, d2 in 1i64..500, d3 in 1i64..500, num in 1i64..40, den in 1i64..40) {
        let rs: ReducedSystem<BigRational> = system(-16, 6);
        let d = with_unit_d0([q(d1, 7), q(d2, 3), q(d3, 11)]);
        let lambda = q(num, den);
        let scaled = d.clone().map(|x| x * lambda.clone());
        prop_assert_eq!(objective_b1(&rs, &d).unwrap(), objective_b1(&rs, &scaled).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn registers_move_only_the_norms(d1 in 1i64..20, d2 in 1i64..20, d3 in 1i64..20, reg in 1i64..100) {
        let seq = WeightSequence::dirichlet_int(-16);
        let pattern = DegreePattern::standard(6).unwrap();
        let rs: ReducedSystem<Surd> = reduce(&seq, &pattern).unwrap();
        let d = with_unit_d0([d1, d2, d3].map(Surd::from_integer));
        let z3 = default_z3(&compute_c(&rs, &d).unwrap()).unwrap();
        let (point, _) = rounded_point(&rs, d, Cplx::real(Surd::from_rational(&z3)), 8).unwrap();
        let params = recover(&point, &rs).unwrap();
        let small = Cplx::real(Surd::from_rational(&q(1, reg)));
        let (registered, _) = attach_register(&params, small.clone(), small, &seq, &pattern).unwrap();
        let before = compute_a(&params.generator_pair(), &pattern, &seq, 1).unwrap();
        let after = compute_a(&registered.generator_pair(), &pattern, &seq, 1).unwrap();
        prop_assert_eq!(&before.a1, &after.a1);
        prop_assert_eq!(&before.a2, &after.a2);
        prop_assert_eq!(&before.a5, &after.a5);
        prop_assert!((after.a3 - before.a3).is_positive());
        prop_assert!((after.a4 - before.a4).is_positive());
    }

    #[test]
    fn refined_grid_never_does_worse(n in 3usize..6, alpha in -20i64..-8) {
        let rs: ReducedSystem<f64> = system(alpha, 6);
        let eval = Evaluator::new(&rs, &MiddleObjective);
        let fine: Vec<f64> = (0..2 * n - 1).map(|i| 10f64.powi(i as i32 - 2)).collect();
        let coarse: Vec<f64> = fine.iter().step_by(2).copied().collect();
        let space = |axis: &Vec<f64>| DSpace { axes: Some([axis.clone(), axis.clone(), axis.clone()]), ..DSpace::default() };
        let c = GridSearch.run(&eval, &space(&coarse), None);
        let f = GridSearch.run(&eval, &space(&fine), None);
        prop_assert!(f.value <= c.value);
    }
}

#[test]
fn search_is_deterministic() {
    let mut config = SearchConfig::new(q(-12, 1), 6);
    config.d.points = 7;
    let a = serde_json::to_string(&minimize(&config).unwrap()).unwrap();
    let b = serde_json::to_string(&minimize(&config).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn shifted_norm_of_monomial_is_one_weight() {
    let seq = WeightSequence::dirichlet_int(-16);
    let pattern = DegreePattern::standard(6).unwrap();
    let one = || Cplx::real(q(1, 1));
    let zero = || Cplx::<BigRational>::zero();
    let pair = GeneratorPair::core([one(), zero(), zero(), zero()], [one(), zero(), zero(), zero()], [zero(), one(), zero(), zero()]);
    let a = compute_a(&pair, &pattern, &seq, 1).unwrap();
    assert_eq!(a.a4, seq.weight::<BigRational>(7).unwrap());
}
