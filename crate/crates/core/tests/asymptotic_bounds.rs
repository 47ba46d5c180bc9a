use num_rational::BigRational;
use num_traits::ToPrimitive;
use wandering::asymptotic::{admissible, e_bracket_log, objective_bound};
use wandering::pattern::DegreePattern;
use wandering::reduction::{objective_b2, reduce, ReducedSystem};
use wandering::weights::WeightSequence;

fn log_abs(q: &BigRational) -> f64 {
    let n = q.numer().bits() as f64;
    let d = q.denom().bits() as f64;
    // Shift both parts into float range before taking logs.
    let shift = |x: &num_bigint::BigInt, bits: f64| {
        let s = (bits as u64).saturating_sub(60);
        let m = (x >> s).to_f64().unwrap().abs();
        m.ln() + s as f64 * std::f64::consts::LN_2
    };
    shift(q.numer(), n) - shift(q.denom(), d)
}

#[test]
fn solved_coefficients_sit_in_the_bracket() {
    for (k, beta, sigma) in [(10u64, 530i64, 0.05), (12, 120, 0.6)] {
        let seq = WeightSequence::dirichlet_int(-beta);
        let rs: ReducedSystem<BigRational> = reduce(&seq, &DegreePattern::standard(k).unwrap()).unwrap();
        let (lo, hi) = e_bracket_log(k, beta as f64, sigma);
        for e in &rs.e {
            let l = log_abs(e);
            assert!(lo <= l && l <= hi, "k={k}: log|E| = {l} outside [{lo}, {hi}]");
        }
    }
}

#[test]
fn bound_dominates_exact_objective() {
    for (k, beta, sigma) in [(10u64, 530i64, 0.05), (12, 120, 0.6), (14, 98, 0.9), (17, 88, 0.97)] {
        assert!(admissible(k, beta as f64, sigma));
        let seq = WeightSequence::dirichlet_int(-beta);
        let rs: ReducedSystem<BigRational> = reduce(&seq, &DegreePattern::standard(k).unwrap()).unwrap();
        let one = BigRational::from_integer(1.into());
        let b2 = objective_b2(&rs, &[one.clone(), one.clone(), one.clone(), one]).unwrap();
        let b2 = log_abs(&b2).exp();
        assert!(b2 < 1.0, "k={k}: B_2 = {b2}");
        assert!(b2 <= objective_bound(k, beta as f64, sigma), "k={k}: B_2 = {b2}");
    }
}
