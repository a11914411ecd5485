use andor::counting::{brute_enumerate, series};
use andor::exact_dist::{limit_estimate, prob, prob_ge, FunctionCounts};
use andor::formula::{truth_table, TruthTable};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[test]
fn series_agrees_with_enumeration() {
    for n in 1..=3u32 {
        let max = if n == 3 { 6 } else { 8 };
        let s = series(n, max).unwrap();
        for m in 1..=max {
            assert_eq!(s.a_total[m], BigUint::from(brute_enumerate(m, n).unwrap().count()), "n = {n}, m = {m}");
        }
    }
}

#[test]
fn residual_vanishes() {
    for n in 1..=3 {
        assert!(series(n, 400).unwrap().algebraic_residual().iter().all(Zero::is_zero));
    }
}

#[test]
fn growth_ratio_tends_to_inverse_singularity() {
    let s = series(2, 400).unwrap();
    assert!((s.growth_ratio(399) / 8.0 - 1.0).abs() < 0.01);
}

#[test]
fn distribution_agrees_with_enumeration() {
    for (n, m) in [(1u32, 7usize), (2, 6)] {
        let counts = FunctionCounts::new(n, m).unwrap();
        let mut tally = vec![0u64; 1 << (1 << n)];
        for t in brute_enumerate(m, n).unwrap() {
            tally[truth_table(&t, n).bits() as usize] += 1;
        }
        for f in TruthTable::all(n) {
            assert_eq!(counts.trees_computing(m, f), BigUint::from(tally[f.bits() as usize]), "n = {n}, m = {m}, f = {}", f.to_hex());
        }
        let d = counts.distribution(m).unwrap();
        assert_eq!(d.probs.values().sum::<BigRational>(), BigRational::one());
    }
}

#[test]
fn dominance_probability_includes_the_function() {
    let n = 2;
    let f = TruthTable::from_hex(n, "8").unwrap();
    for m in [3, 9, 15] {
        let ge = prob_ge(m, n, f).unwrap();
        let eq = prob(m, n, f).unwrap();
        let t = prob(m, n, TruthTable::constant(n, true)).unwrap();
        assert!(ge >= &eq + &t);
        assert!(ge <= BigRational::one());
    }
}

#[test]
fn size_three_at_one_variable() {
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    for f in TruthTable::all(1) {
        assert_eq!(prob(3, 1, f).unwrap(), q(1, 4));
    }
}

#[test]
fn limit_estimates_decrease_with_n() {
    let p: Vec<f64> = (1..=3).map(|n| limit_estimate(n, TruthTable::constant(n, true), 60, 1e-4).unwrap().estimate).collect();
    assert!(p[0] > p[1] && p[1] > p[2], "{p:?}");
    assert!((p[0] - 0.31355).abs() < 2e-3, "{p:?}");
}
