//! The ten reproduction checks, grouped into suites.

use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analytic::catalog::{self, FamilyExpr};
use crate::analytic::{coefficient_ratio, expected_first_level_leaves, limiting_ratio, singularity, tautology_bounds, Env, QuadExt};
use crate::complexity::{slots_and_bounds, ComplexityLab};
use crate::counting::{brute_enumerate, series};
use crate::error::{Error, Result};
use crate::exact_dist::{limit_estimate_from, FunctionCounts, DEFAULT_WINDOW};
use crate::formula::{parse_formula, truth_table, TruthTable};
use crate::sampler::{chi_square_uniform, monte_carlo_with, SamplerContext, Stat};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub seconds: f64,
    pub details: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Exact,
    Asymptotic,
    MonteCarlo,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Suite> {
        match s {
            "exact" => Ok(Suite::Exact),
            "asymptotic" => Ok(Suite::Asymptotic),
            "montecarlo" => Ok(Suite::MonteCarlo),
            "all" => Ok(Suite::All),
            _ => Err(Error::InvalidParameter(format!("unknown suite `{s}`; expected exact, asymptotic, montecarlo or all"))),
        }
    }

    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::Exact => &[1, 2, 6, 7, 8, 9],
            Suite::Asymptotic => &[3, 4, 5],
            Suite::MonteCarlo => &[10],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
        }
    }
}

pub const CRITERIA: [&str; 10] = [
    "exact counting oracle",
    "singularity exactness",
    "limiting ratios against coefficient ratios",
    "large-n asymptotics",
    "tautology bound constants",
    "constant-function bracket",
    "partition of unity",
    "complexity golden table",
    "expansion lower bound trend",
    "Monte Carlo statistics",
];

/// Fixed seed used by every Monte Carlo check.
pub const VERIFY_SEED: u64 = 20_240_611;

pub fn run_suite(suite: Suite, progress: &mut dyn FnMut(&str)) -> Vec<CheckResult> {
    suite.criteria().iter().map(|&k| {
        progress(&format!("criterion {k}: {}", CRITERIA[k as usize - 1]));
        run_criterion(k)
    }).collect()
}

pub fn run_criterion(k: u8) -> CheckResult {
    let start = Instant::now();
    let outcome = match k {
        1 => counting_oracle(),
        2 => singularity_exactness(),
        3 => engine_vs_coefficients(),
        4 => large_n_asymptotics(),
        5 => tautology_constants(),
        6 => constant_bracket(),
        7 => partition_of_unity(),
        8 => complexity_golden(),
        9 => expansion_trend(),
        10 => monte_carlo_suite(),
        _ => Err(Error::InvalidParameter(format!("no criterion {k}"))),
    };
    let (passed, details) = match outcome {
        Ok(v) => v,
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    let name = CRITERIA.get((k as usize).wrapping_sub(1)).copied().unwrap_or("unknown").to_string();
    CheckResult { criterion: k, name, passed, seconds: start.elapsed().as_secs_f64(), details }
}

type Outcome = Result<(bool, Value)>;

fn all_pass(parts: &[(&str, bool)]) -> bool {
    parts.iter().all(|(_, ok)| *ok)
}

fn parts_json(parts: &[(&str, bool)]) -> Value {
    Value::Object(parts.iter().map(|(k, v)| (k.to_string(), Value::Bool(*v))).collect())
}

fn counting_oracle() -> Outcome {
    let mut mismatches = Vec::new();
    for n in 1..=2u32 {
        let s = series(n, 8)?;
        for m in 1..=8 {
            let brute = brute_enumerate(m, n)?.count();
            if BigUint::from(brute) != s.a_total[m] {
                mismatches.push(json!({ "n": n, "m": m, "series": s.a_total[m].to_string(), "brute": brute }));
            }
        }
    }
    let residual_zero: Vec<bool> = (1..=3).map(|n| series(n, 400).map(|s| s.algebraic_residual().iter().all(Zero::is_zero))).collect::<Result<_>>()?;
    let parts = [("series_equals_enumeration", mismatches.is_empty()), ("residual_vanishes_to_400", residual_zero.iter().all(|b| *b))];
    Ok((all_pass(&parts), json!({ "parts": parts_json(&parts), "mismatches": mismatches })))
}

fn singularity_exactness() -> Outcome {
    let residual_ok = (1..=100).all(|n| singularity(n).discriminant_residual().is_zero());
    let s = singularity(2);
    let q = |p: i64, d: i64| QuadExt::from_rational(2, BigRational::new(p.into(), d.into()));
    let parts = [
        ("discriminant_zero_n1_to_100", residual_ok),
        ("rho_n2", s.rho == q(1, 8)),
        ("a_rho_n2", s.a_rho == q(2, 3)),
        ("b_rho_n2", s.b_rho == q(1, 6)),
    ];
    Ok((all_pass(&parts), json!({ "parts": parts_json(&parts), "rho": s.rho.to_string(), "a_rho": s.a_rho.to_string(), "b_rho": s.b_rho.to_string() })))
}

/// The t-free catalog instances compared against series coefficients.
pub fn t_free_instances(n: u32) -> Vec<FamilyExpr> {
    let mut v = vec![
        catalog::no_first_level_leaf(),
        catalog::labels_from(1),
        catalog::labels_from(2 * n as i64),
        catalog::exact_k_labels(1),
        catalog::nonleaf_subtrees(0),
        catalog::nonleaf_subtrees(1),
        catalog::nonleaf_subtrees(2),
        catalog::nonleaf_total(),
        catalog::r_family(),
        catalog::first_level_leaves(),
        catalog::first_level_leaf_count(0),
        catalog::first_level_leaf_count(3),
    ];
    if n >= 2 {
        v.push(catalog::exact_k_labels(2));
    }
    v
}

fn engine_vs_coefficients() -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 1..=3u32 {
        for f in t_free_instances(n) {
            let lim = limiting_ratio(&f, n, &Env::default())?.to_f64();
            let c = coefficient_ratio(&f, n, 400)?;
            let good = if lim == 0.0 { c.abs() < 1e-12 } else { (c / lim - 1.0).abs() <= 0.02 };
            ok &= good;
            rows.push(json!({ "family": f.name, "params": f.params, "n": n, "limit": lim, "coefficient_ratio_400": c, "ok": good }));
        }
    }
    Ok((ok, json!({ "rows": rows })))
}

fn within(v: f64, target: f64, rel: f64) -> bool {
    (v / target - 1.0).abs() <= rel
}

fn large_n_asymptotics() -> Outcome {
    let n = 1_000_000u32;
    let nf = n as f64;
    let env = Env::default();
    let no_leaf = limiting_ratio(&catalog::no_first_level_leaf(), n, &env)?.to_f64() * nf * (2.0 * nf).sqrt();
    let leaves = expected_first_level_leaves(n).to_f64() / (2.0 * (2.0 * nf).sqrt());
    let nonleaf: Vec<(i64, f64, f64)> = (1..=3)
        .map(|l| Ok((l, limiting_ratio(&catalog::nonleaf_subtrees(l), n, &env)?.to_f64(), l as f64 / 2f64.powi(l as i32 + 1))))
        .collect::<Result<_>>()?;
    let r_target = (-std::f64::consts::SQRT_2).exp() / 8.0;
    let r = limiting_ratio(&catalog::r_family(), n, &env)?.to_f64();
    let nonleaf_ok = nonleaf.iter().all(|(_, v, t)| within(*v, *t, 0.01));
    let parts = [
        ("no_first_level_leaf_times_n_sqrt_2n", within(no_leaf, 1.0, 0.01)),
        ("first_level_leaves_over_2_sqrt_2n", within(leaves, 1.0, 0.01)),
        ("nonleaf_subtrees_l_over_2_pow_l_plus_1", nonleaf_ok),
        ("r_family_e_minus_sqrt2_over_8", within(r, r_target, 0.01)),
    ];
    Ok((
        all_pass(&parts),
        json!({ "parts": parts_json(&parts), "no_first_level_leaf_scaled": no_leaf, "first_level_leaves_scaled": leaves, "nonleaf": nonleaf, "r_family": r, "r_target": r_target }),
    ))
}

fn tautology_constants() -> Outcome {
    let b = tautology_bounds(1_000_000)?;
    let parts = [
        ("e_ratio_within_1e-3_of_0.36618", (b.e_ratio - 0.36618).abs() <= 1e-3),
        ("e1_bound_within_1e-3_of_0.24457", (b.e1_bound - 0.24457).abs() <= 1e-3),
        ("lower_within_1e-3_of_0.12161", (b.lower - 0.12161).abs() <= 1e-3),
        ("e2_bound_below_1e-3", b.e2_bound < 1e-3),
    ];
    let limit = crate::analytic::tautology_bounds_limit(catalog::E_J_MAX, catalog::E_K_HI_FACTOR);
    Ok((all_pass(&parts), json!({ "parts": parts_json(&parts), "n": 1_000_000, "bounds": b, "large_n_limit": limit })))
}

fn constant_bracket() -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 1..=3u32 {
        let counts = FunctionCounts::new(n, 60)?;
        let t = TruthTable::constant(n, true);
        let est = limit_estimate_from(&counts, t, 60, 1e-4, DEFAULT_WINDOW)?;
        let mut symmetric = true;
        for m in 3..=60 {
            symmetric &= counts.prob(m, t)? == counts.prob(m, t.not())?;
        }
        let good = est.converged && est.estimate > 0.12 && est.estimate < 0.5 && symmetric;
        ok &= good;
        rows.push(json!({ "n": n, "estimate": est, "true_equals_false": symmetric, "ok": good }));
    }
    Ok((ok, json!({ "rows": rows })))
}

fn partition_of_unity() -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in [1u32, 2, 5, 10] {
        let v = limiting_ratio(&catalog::nonleaf_total(), n, &Env::default())?;
        let good = v.exact() == Some(&QuadExt::one(n));
        ok &= good;
        rows.push(json!({ "n": n, "value": v.exact().map(|q| q.to_string()), "ok": good }));
    }
    Ok((ok, json!({ "rows": rows })))
}

/// Complexity of each of the 16 functions of two variables, indexed by truth-table bits.
pub const GOLDEN_N2: [(usize, Option<u32>); 16] = [
    (0, None),
    (3, Some(2)),
    (3, Some(2)),
    (2, None),
    (3, Some(2)),
    (2, None),
    (7, Some(16)),
    (3, Some(2)),
    (3, Some(2)),
    (7, Some(16)),
    (2, None),
    (3, Some(2)),
    (2, None),
    (3, Some(2)),
    (3, Some(2)),
    (0, None),
];

fn complexity_golden() -> Outcome {
    let mut lab = ComplexityLab::new(2, 9)?;
    let mut table_ok = true;
    let mut slots_ok = true;
    let mut rows = Vec::new();
    for (f, (l, m_f)) in TruthTable::all(2).zip(GOLDEN_N2) {
        let rec = lab.complexity(f)?;
        let good = rec.l == l && rec.m_f == m_f.map(BigUint::from);
        table_ok &= good;
        if rec.l >= 3 {
            for t in lab.minimal_trees(f)? {
                slots_ok &= slots_and_bounds(&t, 2)?.check;
            }
        }
        rows.push(json!({ "f": f.to_hex(), "L": rec.l, "m_f": rec.m_f.map(|v| v.to_string()) }));
    }
    let xor = truth_table(&parse_formula("(or (and x1 ~x2) (and ~x1 x2))", 2)?, 2);
    let parts = [("table_matches_golden", table_ok), ("xor_is_7", lab.complexity(xor)?.l == 7), ("slot_bounds", slots_ok)];
    Ok((all_pass(&parts), json!({ "parts": parts_json(&parts), "table": rows })))
}

fn expansion_trend() -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in [2u32, 3] {
        let counts = FunctionCounts::new(n, 60)?;
        let f = truth_table(&parse_formula("(and x1 x2)", n)?, n);
        let est = limit_estimate_from(&counts, f, 60, 1e-4, DEFAULT_WINDOW)?;
        let p_true = limit_estimate_from(&counts, TruthTable::constant(n, true), 60, 1e-4, DEFAULT_WINDOW)?.estimate;
        let rec = ComplexityLab::new(n, 9)?.complexity(f)?;
        let m_f = rec.m_f.as_ref().and_then(|v| v.to_f64()).unwrap_or(0.0);
        let rho = singularity(n).rho.to_f64();
        let bound = m_f * rec.l as f64 * rho.powi(rec.l as i32) * p_true;
        
        let good = bound <= est.estimate && bound > 0.0;
        ok &= good;
        rows.push(json!({ "n": n, "estimate": est.estimate, "converged": est.converged, "L": rec.l, "m_f": m_f, "p_true": p_true, "lower_bound": bound, "ok": good }));
    }
    Ok((ok, json!({ "rows": rows })))
}

fn monte_carlo_suite() -> Outcome {
    // uniformity over the 8 trees of size 3 at n = 1
    let ctx = SamplerContext::new(1, 3)?;
    let support: Vec<String> = brute_enumerate(3, 1)?.map(|t| t.serialize()).collect();
    let mut hist = vec![0u64; support.len()];
    for i in 0..100_000u64 {
        let t = ctx.sample_trial(3, VERIFY_SEED, i)?.serialize();
        let k = support.iter().position(|s| *s == t).ok_or_else(|| Error::Inconsistent(format!("sampled {t} outside the support")))?;
        hist[k] += 1;
    }
    let (chi2, dof, p_uniform) = chi_square_uniform(&hist);

    let ctx = SamplerContext::new(100, 2000)?;
    let leaves = monte_carlo_with(&ctx, 2000, 10_000, VERIFY_SEED, &[Stat::FirstLevelLeafHistogram])?;
    let h = leaves.first_level_leaves.as_ref().expect("histogram requested");
    let ks_ok = h.ks_statistic <= h.ks_critical_1pct;

    let stats = [Stat::SimpleTautologyRate, Stat::TautologyRate];
    let mut runs = Vec::new();
    let mut ordered = true;
    for n in [5u32, 50] {
        let ctx = SamplerContext::new(n, 1000)?;
        let r = monte_carlo_with(&ctx, 1000, 10_000, VERIFY_SEED, &stats)?;
        let s = r.estimate("simple_tautology_rate").expect("requested").estimate;
        let t = r.estimate("tautology_rate").expect("requested").estimate;
        ordered &= s <= t;
        runs.push(r);
    }
    let gap5 = runs[0].estimate("non_simple_tautology_rate").expect("requested").clone();
    let gap50 = runs[1].estimate("non_simple_tautology_rate").expect("requested").clone();
    let parts = [
        ("uniformity_chi2_1pct", p_uniform > 0.01),
        ("ks_gamma_2_half_1pct", ks_ok),
        ("simple_rate_le_tautology_rate", ordered),
        ("gap_shrinks_n5_to_n50", gap50.ci95[1] < gap5.ci95[0]),
    ];
    Ok((
        all_pass(&parts),
        json!({
            "parts": parts_json(&parts),
            "chi2": { "statistic": chi2, "dof": dof, "p_value": p_uniform, "counts": hist },
            "ks": { "statistic": h.ks_statistic, "critical_1pct": h.ks_critical_1pct, "mean_first_level_leaves": h.mean.estimate, "expected_limit": expected_first_level_leaves(100).to_f64() },
            "tautology_runs": runs,
            "seed": VERIFY_SEED,
        }),
    ))
}
