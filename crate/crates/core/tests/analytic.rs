use andor::analytic::catalog::*;
use andor::analytic::{coefficient_ratio, expected_first_level_leaves, limiting_ratio, tautology_bounds, Env};

fn ratio(f: &FamilyExpr, n: u32) -> f64 {
    limiting_ratio(f, n, &Env::default()).unwrap().to_f64()
}

#[test]
fn large_n_asymptotics() {
    let n = 1_000_000u32;
    let nf = n as f64;
    let scaled = ratio(&no_first_level_leaf(), n) * nf * (2.0 * nf).sqrt();
    assert!((scaled - 1.0).abs() < 0.01, "{scaled}");
    let l1 = ratio(&nonleaf_subtrees(1), n);
    assert!((l1 / 0.25 - 1.0).abs() < 0.01, "{l1}");
    let r = ratio(&r_family(), n);
    let target = (-std::f64::consts::SQRT_2).exp() / 8.0;
    assert!((r / target - 1.0).abs() < 0.01, "{r} vs {target}");
    let e = expected_first_level_leaves(n).to_f64() / (2.0 * (2.0 * nf).sqrt());
    assert!((e - 1.0).abs() < 0.005, "{e}");
}

#[test]
fn nonleaf_ratios_approach_their_limits() {
    for l in 0..6 {
        let v = ratio(&nonleaf_subtrees(l), 1_000_000);
        let target = l as f64 / 2f64.powi(l as i32 + 1);
        assert!((v - target).abs() < 0.01, "l = {l}: {v}");
    }
}

#[test]
fn exact_k_labels_vanish_like_k_over_n() {
    for n in [1_000u32, 10_000] {
        let kmax = (n as f64).powf(0.25) as i64;
        for k in 1..=kmax {
            let v = ratio(&exact_k_labels(k), n);
            assert!(v > 0.0 && v * n as f64 / k as f64 <= 1.0, "n = {n}, k = {k}: {v}");
        }
    }
}

#[test]
fn labels_ratio_is_a_probability() {
    for n in [2u32, 5, 40] {
        let v = ratio(&labels_from(n as i64), n);
        assert!(v > 0.0 && v <= 1.0, "{v}");
    }
}

#[test]
fn coefficient_oracle_agreement() {
    let families = [no_first_level_leaf(), labels_from(1), labels_from(2), exact_k_labels(1), nonleaf_subtrees(0), nonleaf_subtrees(2), nonleaf_total(), r_family(), first_level_leaves()];
    for n in 1..=3u32 {
        for f in &families {
            if f.bindings(n).is_err() {
                continue;
            }
            let lim = ratio(f, n);
            let c = coefficient_ratio(f, n, 400).unwrap();
            let ok = if lim == 0.0 { c.abs() < 1e-6 } else { (c / lim - 1.0).abs() < 0.02 };
            assert!(ok, "{} at n = {n}: series {c}, limit {lim}", f.name);
        }
    }
}

#[test]
fn tautology_bound_reproduction() {
    let t = std::time::Instant::now();
    let b = tautology_bounds(1_000_000).unwrap();
    eprintln!("{b:?} in {:?}", t.elapsed());
    assert!((b.e_ratio - 0.36618).abs() < 1e-3);
    assert!((b.e1_bound - 0.24457).abs() < 1e-3);
    assert!(b.e2_bound < 1e-3);
}
