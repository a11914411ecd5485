//! Singularity data and the limiting-ratio operator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use serde::Serialize;

use super::catalog::{self, FamilyExpr};
use super::expr::{Bindings, EvalCache, Point};
use super::hifloat::{HiFloat, DEFAULT_PRECISION_BITS};
use super::quad::{rat_f64, QuadExt};
use super::scalar::{Dual, IntSeries, Scalar};
use crate::counting;
use crate::error::{Error, Result};

/// Dominant singularity `rho` of `Â` and the values of `Â` and `B̂` there.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularData {
    pub n: u32,
    pub rho: QuadExt,
    pub a_rho: QuadExt,
    pub b_rho: QuadExt,
}

impl SingularData {
    /// `(4n^2 - 8n) z^2 - 4nz + 1` at `z = rho`.
    pub fn discriminant_residual(&self) -> QuadExt {
        let n = self.n as i64;
        let r = &self.rho;
        &(&QuadExt::from_int(self.n, 4 * n * n - 8 * n) * &(r * r)) - &(&QuadExt::from_int(self.n, 4 * n) * r) + QuadExt::one(self.n)
    }
}

pub fn singularity(n: u32) -> SingularData {
    let two = QuadExt::from_int(n, 2);
    let one = QuadExt::one(n);
    let rho = (&two * &(&QuadExt::from_int(n, n as i64) + &QuadExt::sqrt_2n(n))).inv().expect("n + sqrt(2n) > 0");
    let two_n_rho = &QuadExt::from_int(n, 2 * n as i64) * &rho;
    let a_rho = &(&two_n_rho + &one) / &(&two * &(&rho + &one));
    let b_rho = &a_rho - &two_n_rho;
    SingularData { n, rho, a_rho, b_rho }
}

/// Values for the tautology series `T`, which has no closed form.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Env {
    /// Estimate of `T(rho)`.
    pub t_value: Option<f64>,
    /// Estimate of `lim T'/A'`, the limiting probability of True.
    pub tau_prime: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    /// Exact when the family is cheap to evaluate, otherwise `Float(DEFAULT_PRECISION_BITS)`.
    Auto,
    Exact,
    Float(usize),
}

/// Largest exponent and summand count for which `Auto` stays exact.
pub const EXACT_MAX_EXPONENT: u64 = 256;
pub const EXACT_MAX_TERMS: u64 = 2048;

#[derive(Clone, Debug, PartialEq)]
pub enum RatioValue {
    Exact(QuadExt),
    Float(HiFloat),
}

impl RatioValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            RatioValue::Exact(q) => q.to_f64(),
            RatioValue::Float(h) => h.to_f64(),
        }
    }

    pub fn exact(&self) -> Option<&QuadExt> {
        match self {
            RatioValue::Exact(q) => Some(q),
            RatioValue::Float(_) => None,
        }
    }
}

fn rational_of(x: f64, what: &str) -> Result<BigRational> {
    BigRational::from_f64(x).ok_or_else(|| Error::InvalidParameter(format!("{what} must be finite")))
}

/// `½ ∂F/∂a + τ' ∂F/∂t`, as a single directional derivative.
fn directional<S: Scalar>(f: &FamilyExpr, bind: &mut Bindings, rho: S, a_rho: S, t: Option<(S, S)>, ctx: S::Ctx) -> Result<S> {
    let zero = S::from_int(&BigInt::zero(), &ctx).expect("zero");
    let half = S::from_rational(&BigRational::new(1.into(), 2.into()), &ctx).expect("one half");
    let point = Point::<Dual<S>> {
        z: Dual::new(rho, zero.clone()),
        a: Dual::new(a_rho, half),
        t: t.map(|(tv, tau)| Dual::new(tv, tau)),
        ctx,
    };
    Ok(f.expr.eval(&point, bind, &EvalCache::default())?.d)
}

/// Limiting ratio `lim [z^m]F / [z^m]A` with automatic choice of arithmetic.
pub fn limiting_ratio(f: &FamilyExpr, n: u32, env: &Env) -> Result<RatioValue> {
    limiting_ratio_with(f, n, env, Precision::Auto)
}

pub fn limiting_ratio_with(f: &FamilyExpr, n: u32, env: &Env, precision: Precision) -> Result<RatioValue> {
    let mut bind = f.bindings(n)?;
    let t_inputs = if f.uses_t() {
        let tv = env.t_value.ok_or(Error::MissingEnv("t_value"))?;
        let tau = env.tau_prime.ok_or(Error::MissingEnv("tau_prime"))?;
        Some((rational_of(tv, "t_value")?, rational_of(tau, "tau_prime")?))
    } else {
        None
    };
    let precision = match precision {
        Precision::Auto => {
            let (exp, terms) = f.expr.cost(&mut bind.clone())?;
            if exp <= EXACT_MAX_EXPONENT && terms <= EXACT_MAX_TERMS {
                Precision::Exact
            } else {
                Precision::Float(DEFAULT_PRECISION_BITS)
            }
        }
        p => p,
    };
    let sd = singularity(n);
    match precision {
        Precision::Exact | Precision::Auto => {
            let t = t_inputs.map(|(tv, tau)| (QuadExt::from_rational(n, tv), QuadExt::from_rational(n, tau)));
            Ok(RatioValue::Exact(directional(f, &mut bind, sd.rho, sd.a_rho, t, n)?))
        }
        Precision::Float(bits) => {
            let t = t_inputs.map(|(tv, tau)| (HiFloat::from_rational(&tv, bits), HiFloat::from_rational(&tau, bits)));
            let v = directional(f, &mut bind, sd.rho.to_hifloat(bits), sd.a_rho.to_hifloat(bits), t, bits)?;
            Ok(RatioValue::Float(v))
        }
    }
}

/// Coefficients of `F` through `z^m`, computed from the exact tree counts.
pub fn family_series(f: &FamilyExpr, n: u32, m: usize) -> Result<Vec<BigInt>> {
    if f.uses_t() {
        return Err(Error::InvalidParameter(format!("{} depends on T, which has no series here", f.name)));
    }
    let mut bind = f.bindings(n)?;
    let counts = counting::series(n, m.max(1))?;
    let len = m + 1;
    let a = IntSeries { c: counts.a_hat.iter().take(len).map(|x| BigInt::from(x.clone())).collect() };
    let point = Point::<IntSeries> { z: IntSeries::variable(len), a, t: None, ctx: len };
    Ok(f.expr.eval(&point, &mut bind, &EvalCache::default())?.c)
}

/// `[z^m]F / [z^m]A`, the finite-size counterpart of the limiting ratio.
pub fn coefficient_ratio(f: &FamilyExpr, n: u32, m: usize) -> Result<f64> {
    let fs = family_series(f, n, m)?;
    let total = counting::series(n, m)?.a_total[m].clone();
    if total.is_zero() {
        return Err(Error::EmptySizeClass(m));
    }
    Ok(rat_f64(&BigRational::new(fs[m].clone(), BigInt::from(total))))
}

/// Limit of the mean number of first-level leaves as the size grows.
pub fn expected_first_level_leaves(n: u32) -> QuadExt {
    match limiting_ratio_with(&catalog::first_level_leaves(), n, &Env::default(), Precision::Exact) {
        Ok(RatioValue::Exact(q)) => q,
        other => panic!("first-level leaf family must evaluate exactly: {other:?}"),
    }
}

/// Bounds assembled from the `e_family`, `e1_family` and `e2_family` limiting ratios.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TautologyBounds {
    pub lower: f64,
    pub e_ratio: f64,
    pub e1_bound: f64,
    pub e2_bound: f64,
}

pub fn tautology_bounds(n: u32) -> Result<TautologyBounds> {
    tautology_bounds_with(n, catalog::E_J_MAX, catalog::E_K_HI_FACTOR, Precision::Auto)
}

pub fn tautology_bounds_with(n: u32, j_max: i64, k_hi_factor: i64, precision: Precision) -> Result<TautologyBounds> {
    let env = Env::default();
    let ratio = |f: FamilyExpr| limiting_ratio_with(&f, n, &env, precision).map(|v| v.to_f64());
    let e_ratio = ratio(catalog::e_family(j_max, k_hi_factor))?;
    let e1_bound = ratio(catalog::e1_family(j_max, k_hi_factor))?;
    let e2_bound = ratio(catalog::e2_family(j_max, k_hi_factor))?;
    Ok(TautologyBounds { lower: e_ratio - e1_bound - e2_bound, e_ratio, e1_bound, e2_bound })
}

/// Large-`n` limit of the bounds: with `k = x sqrt(n)` the double sums become
/// `1/4 ∫ x e^{-√2 x} Σ_{i<j_max} (x/√2)^i / i! dx` over `[1, k_hi_factor]`, with an extra
/// `e^{-(x-1)/4}` for `e1_family`, while `e2_family` vanishes.
pub fn tautology_bounds_limit(j_max: i64, k_hi_factor: i64) -> TautologyBounds {
    let poly = |x: f64| {
        let (mut term, mut acc) = (1.0, 0.0);
        for i in 0..j_max.max(0) {
            if i > 0 {
                term *= x / std::f64::consts::SQRT_2 / i as f64;
            }
            acc += term;
        }
        acc
    };
    let e = |x: f64| 0.25 * x * (-std::f64::consts::SQRT_2 * x).exp() * poly(x);
    let e1 = |x: f64| e(x) * (-(x - 1.0) / 4.0).exp();
    let e_ratio = simpson(e, 1.0, k_hi_factor as f64, 20_000);
    let e1_bound = simpson(e1, 1.0, k_hi_factor as f64, 20_000);
    TautologyBounds { lower: e_ratio - e1_bound, e_ratio, e1_bound, e2_bound: 0.0 }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// The rational value of `q`, if its radical part vanishes.
pub fn as_rational(q: &QuadExt) -> Option<BigRational> {
    q.is_rational().then(|| q.p().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::catalog::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn exact(f: &FamilyExpr, n: u32) -> QuadExt {
        limiting_ratio_with(f, n, &Env::default(), Precision::Exact).unwrap().exact().unwrap().clone()
    }

    #[test]
    fn singular_values() {
        let s = singularity(2);
        assert_eq!(s.rho, QuadExt::from_rational(2, r(1, 8)));
        assert_eq!(s.a_rho, QuadExt::from_rational(2, r(2, 3)));
        assert_eq!(s.b_rho, QuadExt::from_rational(2, r(1, 6)));
        let s1 = singularity(1);
        assert_eq!(s1.rho, QuadExt::new(1, r(-1, 2), r(1, 2)));
        for n in 1..=100 {
            let s = singularity(n);
            assert!(s.discriminant_residual().is_zero(), "n = {n}");
            assert_eq!(s.rho.signum(), 1);
        }
    }

    #[test]
    fn no_leaf_at_two() {
        assert_eq!(exact(&no_first_level_leaf(), 2), QuadExt::from_rational(2, r(11, 200)));
    }

    #[test]
    fn first_level_mean_at_two() {
        assert_eq!(expected_first_level_leaves(2), QuadExt::from_rational(2, r(27, 8)));
    }

    #[test]
    fn nonleaf_partition_of_unity() {
        for n in 1..=30 {
            assert_eq!(exact(&nonleaf_total(), n), QuadExt::one(n), "n = {n}");
        }
        let partial: f64 = (0..60).map(|l| exact(&nonleaf_subtrees(l), 3).to_f64()).sum();
        assert!((partial - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_level_leaf_law_sums_to_one() {
        let total: f64 = (0..200).map(|j| limiting_ratio(&first_level_leaf_count(j), 2, &Env::default()).unwrap().to_f64()).sum();
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }

    #[test]
    fn linear_in_t() {
        let env = Env { t_value: Some(0.25), tau_prime: Some(0.125) };
        let v = limiting_ratio(&simple_x(), 2, &env).unwrap();
        assert_eq!(v.exact().unwrap(), &QuadExt::from_rational(2, r(4, 64 * 8)));
        assert_eq!(limiting_ratio(&simple_x(), 2, &Env::default()), Err(Error::MissingEnv("t_value")));
    }

    #[test]
    fn float_mode_matches_exact() {
        for f in [no_first_level_leaf(), labels_from(3), exact_k_labels(2), r_family()] {
            let e = exact(&f, 5).to_f64();
            let h = limiting_ratio_with(&f, 5, &Env::default(), Precision::Float(120)).unwrap().to_f64();
            assert!((e - h).abs() <= 1e-14 * e.abs().max(1e-300), "{}: {e} vs {h}", f.name);
        }
    }

    #[test]
    fn bound_limits() {
        let b = tautology_bounds_limit(5, 15);
        assert!((b.e_ratio - 0.36618).abs() < 2e-5, "{b:?}");
        assert!((b.e1_bound - 0.24457).abs() < 2e-5, "{b:?}");
        assert!((b.lower - 0.12161).abs() < 4e-5, "{b:?}");
    }

    #[test]
    fn coefficient_oracle_small() {
        let f = no_first_level_leaf();
        let c = coefficient_ratio(&f, 2, 120).unwrap();
        assert!((c / (11.0 / 200.0) - 1.0).abs() < 0.05, "{c}");
        assert!(coefficient_ratio(&simple_x(), 2, 10).is_err());
    }
}
