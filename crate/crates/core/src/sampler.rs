//! Exact-size uniform sampling by the recursive method, and Monte Carlo statistics.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::counting::{self, CountSeries};
use crate::error::{Error, Result};
use crate::formula::{semantic, truth_table, AndOrTree, Connective, Literal, TruthTable};

/// Name recorded in reports for the generator behind every draw.
pub const GENERATOR: &str = "ChaCha8Rng(seed_from_u64, stream = trial index)";

/// Relative safety margin of the floating-point fast path; draws closer than this to a
/// cumulative boundary are settled with exact integers.
const FAST_PATH_MARGIN: f64 = 1e-9;

/// A big integer as `m * 2^e` with `m` in `[0.5, 1)` (or zero).
#[derive(Clone, Copy, Debug)]
struct Approx {
    m: f64,
    e: i64,
}

impl Approx {
    fn of(x: &BigUint) -> Self {
        if x.is_zero() {
            return Approx { m: 0.0, e: 0 };
        }
        let bits = x.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (x >> shift as u64).to_u64().expect("64 bits") as f64;
        Approx { m: top / 2f64.powi(64), e: bits.max(64) }
    }

    fn mul(self, o: Approx) -> Approx {
        Approx { m: self.m * o.m, e: self.e + o.e }
    }

    /// `self / o` as a plain float; tiny ratios flush to zero.
    fn ratio(self, o: Approx) -> f64 {
        let d = (self.e - o.e).clamp(-1100, 1000) as i32;
        self.m / o.m * 2f64.powi(d)
    }
}

/// Immutable tables shared by every draw of trees up to `max_size`.
#[derive(Clone, Debug)]
pub struct SamplerContext {
    pub n: u32,
    pub max_size: usize,
    /// Counts through `max_size + 1`, since sequences of two or more children of total size
    /// `r` are exactly the AND-rooted trees of size `r + 1`.
    pub series: CountSeries,
    /// `seq1[r]`: sequences of at least one child subtree with total size `r`.
    seq1: Vec<BigUint>,
    a_approx: Vec<Approx>,
    seq1_approx: Vec<Approx>,
}

impl SamplerContext {
    pub fn new(n: u32, max_size: usize) -> Result<Self> {
        Self::from_series(counting::series(n, max_size.max(1) + 1)?)
    }

    /// Builds the context from counts through at least `max_size + 1`.
    pub fn from_series(series: CountSeries) -> Result<Self> {
        if series.max_size < 2 {
            return Err(Error::InvalidParameter("sampler needs counts through size 2 or more".into()));
        }
        let max_size = series.max_size - 1;
        let a = &series.a_hat;
        let seq1: Vec<BigUint> = (0..=max_size).map(|r| if r == 0 { BigUint::zero() } else { &a[r] + &a[r + 1] }).collect();
        let a_approx = a.iter().map(Approx::of).collect();
        let seq1_approx = seq1.iter().map(Approx::of).collect();
        Ok(SamplerContext { n: series.n, max_size, series, seq1, a_approx, seq1_approx })
    }

    fn exact_weight(&self, r: usize, i: usize) -> BigUint {
        if i == r {
            self.series.a_hat[r].clone()
        } else {
            &self.series.a_hat[i] * &self.seq1[r - i]
        }
    }

    /// Size of the first child in a sequence of total size `r`; `i == r` means it is the last.
    fn first_child_size(&self, r: usize, at_least_two: bool, rng: &mut impl RngCore) -> usize {
        let last = if at_least_two { r - 1 } else { r };
        let total = if at_least_two { Approx::of(&self.series.a_hat[r + 1]) } else { self.seq1_approx[r] };
        let k = rng.next_u64();
        let u = k as f64 / 2f64.powi(64);
        let mut cum = 0.0;
        for i in 1..=last {
            let w = if i == r { self.a_approx[r] } else { self.a_approx[i].mul(self.seq1_approx[r - i]) };
            let next = cum + w.ratio(total);
            if u < next {
                if u - cum > FAST_PATH_MARGIN && next - u > FAST_PATH_MARGIN {
                    return i;
                }
                break;
            }
            cum = next;
        }
        self.exact_choice(r, last, at_least_two, k, rng)
    }

    /// Settles the draw with exact integers, reading further random bits only as needed.
    fn exact_choice(&self, r: usize, last: usize, at_least_two: bool, k: u64, rng: &mut impl RngCore) -> usize {
        let total = if at_least_two { self.series.a_hat[r + 1].clone() } else { self.seq1[r].clone() };
        let cums: Vec<BigUint> = (1..=last)
            .scan(BigUint::zero(), |acc, i| {
                *acc += self.exact_weight(r, i);
                Some(acc.clone())
            })
            .collect();
        // u lies in [kk / 2^bits, (kk + 1) / 2^bits); the choice is the first i with u * total < cum_i
        let mut kk = BigUint::from(k);
        let mut bits = 64u64;
        let mut lo = 0usize;
        loop {
            let scaled_lo = &kk * &total;
            let scaled_hi = &scaled_lo + &total;
            while lo < cums.len() && (&cums[lo] << bits) <= scaled_lo {
                lo += 1;
            }
            if lo < cums.len() && scaled_hi <= (&cums[lo] << bits) {
                return lo + 1;
            }
            kk = (kk << 64u64) + BigUint::from(rng.next_u64());
            bits += 64;
        }
    }

    fn gen_tree(&self, m: usize, root: Connective, rng: &mut impl RngCore) -> AndOrTree {
        if m == 1 {
            return AndOrTree::Leaf(self.literal(rng));
        }
        let mut children = Vec::new();
        let mut r = m - 1;
        let mut at_least_two = true;
        loop {
            let i = self.first_child_size(r, at_least_two, rng);
            children.push(self.gen_tree(i, root.dual(), rng));
            if i == r {
                break;
            }
            r -= i;
            at_least_two = false;
        }
        AndOrTree::Node(root, children)
    }

    fn literal(&self, rng: &mut impl RngCore) -> Literal {
        let k = rng.gen_range(0..2 * self.n);
        Literal::new(k / 2 + 1, k % 2 == 1)
    }

    /// A uniformly random tree of size `m` drawn with `rng`.
    pub fn sample_with(&self, m: usize, rng: &mut impl RngCore) -> Result<AndOrTree> {
        if m == 0 || m == 2 {
            return Err(Error::EmptySizeClass(m));
        }
        if m > self.max_size {
            return Err(Error::InvalidParameter(format!("size {m} exceeds the sampler tables ({})", self.max_size)));
        }
        if m == 1 {
            return Ok(AndOrTree::Leaf(self.literal(rng)));
        }
        let root = if rng.gen::<bool>() { Connective::And } else { Connective::Or };
        Ok(self.gen_tree(m, root, rng))
    }

    /// The draw for trial `trial` under `seed`; independent of how trials are scheduled.
    pub fn sample_trial(&self, m: usize, seed: u64, trial: u64) -> Result<AndOrTree> {
        self.sample_with(m, &mut trial_rng(seed, trial))
    }
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform tree of size `m` over `n` variables, reproducible from `seed`.
pub fn sample_uniform(m: usize, n: u32, seed: u64) -> Result<AndOrTree> {
    if m == 0 || m == 2 {
        return Err(Error::EmptySizeClass(m));
    }
    SamplerContext::new(n, m)?.sample_trial(m, seed, 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stat {
    FunctionFrequency(TruthTable),
    SimpleTautologyRate,
    TautologyRate,
    FirstLevelLeafHistogram,
}

impl Stat {
    /// Parses `function_frequency:<hex>`, `simple_tautology_rate`, `tautology_rate` or
    /// `first_level_leaf_histogram`.
    pub fn parse(s: &str, n: u32) -> Result<Stat> {
        match s.trim() {
            "simple_tautology_rate" => Ok(Stat::SimpleTautologyRate),
            "tautology_rate" => Ok(Stat::TautologyRate),
            "first_level_leaf_histogram" => Ok(Stat::FirstLevelLeafHistogram),
            other => match other.strip_prefix("function_frequency:") {
                Some(hex) => Ok(Stat::FunctionFrequency(TruthTable::from_hex(n, hex)?)),
                None => Err(Error::InvalidParameter(format!("unknown statistic `{other}`"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub ci95: [f64; 2],
}

impl Estimate {
    fn from_samples(name: String, xs: &[f64]) -> Estimate {
        let k = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / k;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
        let se = (var / k).sqrt();
        Estimate { name, estimate: mean, std_error: se, ci95: [mean - 1.96 * se, mean + 1.96 * se] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeafHistogram {
    /// `counts[j]`: trials whose root had exactly `j` leaf children.
    pub counts: Vec<u64>,
    pub mean: Estimate,
    /// Kolmogorov–Smirnov distance of `X / (2 sqrt(2n))` to the Gamma(2, 1/2) law.
    pub ks_statistic: f64,
    pub ks_critical_1pct: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub m: usize,
    pub n: u32,
    pub trials: u64,
    pub seed: u64,
    pub generator: String,
    pub estimates: Vec<Estimate>,
    pub first_level_leaves: Option<LeafHistogram>,
}

impl McReport {
    pub fn estimate(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }
}

#[derive(Default)]
struct Observation {
    function: Vec<bool>,
    simple: bool,
    tautology: bool,
    leaves: usize,
}

/// CDF of Gamma(2, rate 2): `1 - e^{-2x}(1 + 2x)`.
pub fn gamma_2_half_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - (-2.0 * x).exp() * (1.0 + 2.0 * x)
    }
}

/// Two-sided KS distance between the empirical law of `xs` and `cdf`.
pub fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        let f = cdf(v[i]);
        d = d.max((j as f64 / k - f).abs()).max((f - i as f64 / k).abs());
        i = j;
    }
    d
}

/// Asymptotic KS critical value `sqrt(-ln(alpha/2)/2) / sqrt(N)`.
pub fn ks_critical(alpha: f64, samples: usize) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (samples as f64).sqrt()
}

/// Pearson statistic, degrees of freedom and p-value of `counts` against the uniform law.
pub fn chi_square_uniform(counts: &[u64]) -> (f64, f64, f64) {
    let total: u64 = counts.iter().sum();
    let expect = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    let dof = (counts.len() - 1) as f64;
    let p = 1.0 - ChiSquared::new(dof).expect("dof > 0").cdf(stat);
    (stat, dof, p)
}

/// Runs `trials` independent draws in parallel; trial `i` always uses stream `i` of `seed`.
pub fn monte_carlo(m: usize, n: u32, trials: u64, seed: u64, stats: &[Stat]) -> Result<McReport> {
    let ctx = SamplerContext::new(n, m)?;
    monte_carlo_with(&ctx, m, trials, seed, stats)
}

pub fn monte_carlo_with(ctx: &SamplerContext, m: usize, trials: u64, seed: u64, stats: &[Stat]) -> Result<McReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let n = ctx.n;
    let functions: Vec<TruthTable> = stats.iter().filter_map(|s| if let Stat::FunctionFrequency(f) = s { Some(*f) } else { None }).collect();
    let want_taut = stats.contains(&Stat::TautologyRate);
    let want_simple = stats.contains(&Stat::SimpleTautologyRate) || want_taut;
    let want_leaves = stats.contains(&Stat::FirstLevelLeafHistogram);
    let obs: Vec<Observation> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Observation> {
            let t = ctx.sample_trial(m, seed, i)?;
            let mut o = Observation::default();
            if !functions.is_empty() {
                let tt = truth_table(&t, n);
                o.function = functions.iter().map(|f| *f == tt).collect();
            }
            if want_simple {
                o.simple = t.is_simple_tautology();
            }
            if want_taut {
                o.tautology = o.simple || semantic::is_tautology(&t);
            }
            o.leaves = t.first_level_leaf_count();
            Ok(o)
        })
        .collect::<Result<_>>()?;

    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let mut estimates = Vec::new();
    for (k, f) in functions.iter().enumerate() {
        let xs: Vec<f64> = obs.iter().map(|o| ind(o.function[k])).collect();
        estimates.push(Estimate::from_samples(format!("function_frequency:{}", f.to_hex()), &xs));
    }
    if want_simple {
        let xs: Vec<f64> = obs.iter().map(|o| ind(o.simple)).collect();
        estimates.push(Estimate::from_samples("simple_tautology_rate".into(), &xs));
    }
    if want_taut {
        let xs: Vec<f64> = obs.iter().map(|o| ind(o.tautology)).collect();
        estimates.push(Estimate::from_samples("tautology_rate".into(), &xs));
        let gap: Vec<f64> = obs.iter().map(|o| ind(o.tautology && !o.simple)).collect();
        estimates.push(Estimate::from_samples("non_simple_tautology_rate".into(), &gap));
    }
    let first_level_leaves = want_leaves.then(|| {
        let max = obs.iter().map(|o| o.leaves).max().unwrap_or(0);
        let mut counts = vec![0u64; max + 1];
        obs.iter().for_each(|o| counts[o.leaves] += 1);
        let raw: Vec<f64> = obs.iter().map(|o| o.leaves as f64).collect();
        let scale = 2.0 * (2.0 * n as f64).sqrt();
        let scaled: Vec<f64> = raw.iter().map(|x| x / scale).collect();
        LeafHistogram {
            counts,
            mean: Estimate::from_samples("mean_first_level_leaves".into(), &raw),
            ks_statistic: ks_statistic(&scaled, gamma_2_half_cdf),
            ks_critical_1pct: ks_critical(0.01, obs.len()),
        }
    });
    Ok(McReport { m, n, trials, seed, generator: GENERATOR.into(), estimates, first_level_leaves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn deterministic_given_seed() {
        let a = sample_uniform(25, 3, 7).unwrap();
        let b = sample_uniform(25, 3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.size(), 25);
        a.validate(3).unwrap();
        assert!(matches!(sample_uniform(2, 3, 7), Err(Error::EmptySizeClass(2))));
    }

    #[test]
    fn sizes_are_exact() {
        let ctx = SamplerContext::new(2, 60).unwrap();
        for m in [1usize, 3, 4, 5, 17, 60] {
            for trial in 0..20 {
                let t = ctx.sample_trial(m, 1, trial).unwrap();
                assert_eq!(t.size(), m);
                t.validate(2).unwrap();
            }
        }
    }

    #[test]
    fn leaves_are_uniform() {
        let ctx = SamplerContext::new(3, 1).unwrap();
        let mut counts: HashMap<String, u64> = HashMap::new();
        for i in 0..10_000 {
            *counts.entry(ctx.sample_trial(1, 11, i).unwrap().serialize()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let v: Vec<u64> = counts.values().copied().collect();
        assert!(chi_square_uniform(&v).2 > 0.01);
    }

    #[test]
    fn exact_fallback_agrees_with_counts() {
        let ctx = SamplerContext::new(1, 12).unwrap();
        let mut rng = trial_rng(3, 0);
        let mut hist = vec![0u64; 12];
        for _ in 0..20_000 {
            let k = rng.next_u64();
            hist[ctx.exact_choice(11, 10, true, k, &mut rng)] += 1;
        }
        let total: f64 = ctx.series.a_hat[12].to_f64().unwrap();
        for i in 1..=10 {
            let p = ctx.exact_weight(11, i).to_f64().unwrap() / total;
            let f = hist[i] as f64 / 20_000.0;
            assert!((f - p).abs() < 4.0 * (p * (1.0 - p) / 20_000.0).sqrt() + 1e-9, "i = {i}: {f} vs {p}");
        }
    }

    #[test]
    fn ks_and_gamma_helpers() {
        assert_eq!(gamma_2_half_cdf(-1.0), 0.0);
        assert!((gamma_2_half_cdf(1.0) - (1.0 - 3.0 * (-2f64).exp())).abs() < 1e-15);
        assert!((ks_statistic(&[0.5], |x| x) - 0.5).abs() < 1e-15);
        assert!((ks_critical(0.01, 10_000) - 0.016276).abs() < 1e-5);
    }

    #[test]
    fn report_is_order_independent_and_consistent() {
        let stats = [Stat::SimpleTautologyRate, Stat::TautologyRate, Stat::FirstLevelLeafHistogram];
        let a = monte_carlo(30, 2, 400, 5, &stats).unwrap();
        let b = monte_carlo(30, 2, 400, 5, &stats).unwrap();
        assert_eq!(a, b);
        let s = a.estimate("simple_tautology_rate").unwrap().estimate;
        let t = a.estimate("tautology_rate").unwrap().estimate;
        assert!(s <= t);
        assert!(monte_carlo(30, 2, 0, 5, &stats).is_err());
    }
}
