//! Exact distribution of Boolean functions over trees of a fixed size.
//!
//! The main route works in transform space: with `X_S(z)` the superset sum of OR-rooted
//! counts at `S`, an AND of children is a product of transforms, so the AND-rooted
//! transform is `X_S^2 / (1 - X_S)` coordinate-wise. Duality gives `X_S = Y_{not S}`
//! where `Y` is the subset sum of AND-rooted counts, so one table suffices.
//! [`SequenceTables`] is a direct DP over (size, function) kept as a reference route.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::formula::{Literal, TruthTable};

/// Largest `n` accepted by default; `2^(2^4) = 65536` functions.
pub const DEFAULT_MAX_VARS: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub n: u32,
    pub m: usize,
    /// Indexed by truth-table bits.
    pub and_rooted: Vec<BigUint>,
    pub or_rooted: Vec<BigUint>,
}

impl CountTable {
    /// Number of size-`m` trees computing `f`.
    pub fn trees_computing(&self, f: TruthTable) -> BigUint {
        let k = f.bits() as usize;
        let both = &self.and_rooted[k] + &self.or_rooted[k];
        if self.m == 1 && f.as_literal().is_some() {
            both - 1u32
        } else {
            both
        }
    }

    pub fn total(&self) -> BigUint {
        let s: BigUint = self.and_rooted.iter().chain(&self.or_rooted).sum();
        if self.m == 1 {
            s - BigUint::from(2 * self.n)
        } else {
            s
        }
    }
}

/// Exact probabilities of every function that has a tree of size `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub n: u32,
    pub m: usize,
    pub probs: BTreeMap<TruthTable, BigRational>,
}

/// Count tables for every size `1..=max_size` over `n` variables.
#[derive(Clone, Debug)]
pub struct FunctionCounts {
    pub n: u32,
    pub max_size: usize,
    and_rooted: Vec<Vec<BigUint>>,
}

fn literal_bits(n: u32) -> Vec<usize> {
    Literal::all(n).map(|l| TruthTable::literal(n, l).bits() as usize).collect()
}

fn check_vars(n: u32, max_vars: u32) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if n > max_vars {
        return Err(Error::Budget(format!("n = {n} exceeds the configured maximum of {max_vars} variables")));
    }
    Ok(1usize << (1u32 << n))
}

fn subset_zeta(v: &mut [BigUint]) {
    let f = v.len();
    let mut bit = 1;
    while bit < f {
        for s in 0..f {
            if s & bit != 0 {
                let (lo, hi) = v.split_at_mut(s);
                hi[0] += &lo[s ^ bit];
            }
        }
        bit <<= 1;
    }
}

fn superset_mobius(v: &mut [BigInt]) {
    let f = v.len();
    let mut bit = 1;
    while bit < f {
        for s in 0..f {
            if s & bit == 0 {
                let (lo, hi) = v.split_at_mut(s | bit);
                lo[s] -= &hi[0];
            }
        }
        bit <<= 1;
    }
}

impl FunctionCounts {
    pub fn new(n: u32, max_size: usize) -> Result<Self> {
        Self::with_max_vars(n, max_size, DEFAULT_MAX_VARS)
    }

    pub fn with_max_vars(n: u32, max_size: usize, max_vars: u32) -> Result<Self> {
        let nf = check_vars(n, max_vars)?;
        let full = nf - 1;
        let mut and_rooted = vec![Vec::new(); max_size + 1];
        if max_size == 0 {
            return Ok(FunctionCounts { n, max_size, and_rooted });
        }
        let mut first = vec![BigUint::zero(); nf];
        for b in literal_bits(n) {
            first[b] = BigUint::from(1u32);
        }
        // y[s][j]: subset transform of the size-j AND-rooted layer at s
        // v[s][j]: x + x^2/(1-x) at coordinate s, order j, with x_s = y[!s]
        let mut y = vec![vec![BigUint::zero(); max_size + 1]; nf];
        let mut v = vec![vec![BigUint::zero(); max_size + 1]; nf];
        let record = |layer: &[BigUint], j: usize, y: &mut Vec<Vec<BigUint>>| {
            let mut t = layer.to_vec();
            subset_zeta(&mut t);
            for (s, val) in t.into_iter().enumerate() {
                y[s][j] = val;
            }
        };
        record(&first, 1, &mut y);
        and_rooted[1] = first;
        for m in 2..=max_size {
            let j = m - 1;
            let mut layer: Vec<BigInt> = Vec::with_capacity(nf);
            for s in 0..nf {
                let x = &y[full ^ s];
                let mut w = BigUint::zero();
                for i in 1..j {
                    if !x[i].is_zero() && !v[s][j - i].is_zero() {
                        w += &x[i] * &v[s][j - i];
                    }
                }
                v[s][j] = &x[j] + &w;
                layer.push(BigInt::from(w));
            }
            superset_mobius(&mut layer);
            let layer: Vec<BigUint> = layer
                .into_iter()
                .map(|c| c.to_biguint().ok_or_else(|| Error::Inconsistent(format!("negative count at size {m}"))))
                .collect::<Result<_>>()?;
            record(&layer, m, &mut y);
            and_rooted[m] = layer;
        }
        Ok(FunctionCounts { n, max_size, and_rooted })
    }

    pub fn num_functions(&self) -> usize {
        1usize << (1u32 << self.n)
    }

    fn check_size(&self, m: usize) -> Result<()> {
        if m == 0 || m == 2 {
            return Err(Error::EmptySizeClass(m));
        }
        if m > self.max_size {
            return Err(Error::Budget(format!("size {m} is beyond the computed range 1..={}", self.max_size)));
        }
        Ok(())
    }

    pub fn table(&self, m: usize) -> Result<CountTable> {
        if m == 0 || m > self.max_size {
            return Err(Error::Budget(format!("size {m} is beyond the computed range 1..={}", self.max_size)));
        }
        let and_rooted = self.and_rooted[m].clone();
        let full = self.num_functions() - 1;
        let or_rooted = (0..=full).map(|f| and_rooted[full ^ f].clone()).collect();
        Ok(CountTable { n: self.n, m, and_rooted, or_rooted })
    }

    /// Trees of size `m` computing `f`.
    pub fn trees_computing(&self, m: usize, f: TruthTable) -> BigUint {
        let full = self.num_functions() - 1;
        let k = f.bits() as usize;
        let layer = &self.and_rooted[m];
        let both = &layer[k] + &layer[full ^ k];
        if m == 1 && f.as_literal().is_some() {
            both - 1u32
        } else {
            both
        }
    }

    pub fn total(&self, m: usize) -> BigUint {
        let s: BigUint = self.and_rooted[m].iter().sum::<BigUint>() << 1;
        if m == 1 {
            s - BigUint::from(2 * self.n)
        } else {
            s
        }
    }

    pub fn prob(&self, m: usize, f: TruthTable) -> Result<BigRational> {
        self.check_size(m)?;
        self.check_table(f)?;
        Ok(BigRational::new(self.trees_computing(m, f).into(), self.total(m).into()))
    }

    /// Probability that the computed function dominates `f0` pointwise.
    pub fn prob_ge(&self, m: usize, f0: TruthTable) -> Result<BigRational> {
        self.check_size(m)?;
        self.check_table(f0)?;
        if f0.is_constant() {
            return Err(Error::Precondition("prob_ge needs a non-constant function".into()));
        }
        let full = self.num_functions() as u64 - 1;
        let mask = f0.bits();
        let mut count = BigUint::zero();
        for g in 0..=full {
            if mask & !g == 0 {
                count += self.trees_computing(m, TruthTable::from_bits(self.n, g));
            }
        }
        Ok(BigRational::new(count.into(), self.total(m).into()))
    }

    pub fn distribution(&self, m: usize) -> Result<Distribution> {
        self.check_size(m)?;
        let total: BigInt = self.total(m).into();
        let mut probs = BTreeMap::new();
        for g in 0..self.num_functions() as u64 {
            let f = TruthTable::from_bits(self.n, g);
            let c = self.trees_computing(m, f);
            if !c.is_zero() {
                probs.insert(f, BigRational::new(c.into(), total.clone()));
            }
        }
        Ok(Distribution { n: self.n, m, probs })
    }

    fn check_table(&self, f: TruthTable) -> Result<()> {
        if f.n() != self.n {
            return Err(Error::InvalidParameter(format!("function over {} variables, counts over {}", f.n(), self.n)));
        }
        Ok(())
    }
}

pub fn function_counts(m: usize, n: u32) -> Result<CountTable> {
    if m == 0 {
        return Err(Error::EmptySizeClass(0));
    }
    FunctionCounts::new(n, m)?.table(m)
}

pub fn prob(m: usize, n: u32, f: TruthTable) -> Result<BigRational> {
    if m == 0 || m == 2 {
        return Err(Error::EmptySizeClass(m));
    }
    FunctionCounts::new(n, m)?.prob(m, f)
}

pub fn prob_ge(m: usize, n: u32, f0: TruthTable) -> Result<BigRational> {
    if m == 0 || m == 2 {
        return Err(Error::EmptySizeClass(m));
    }
    FunctionCounts::new(n, m)?.prob_ge(m, f0)
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct LimitEstimate {
    pub f: String,
    pub n: u32,
    #[serde(rename = "M")]
    pub m_max: usize,
    pub window: usize,
    pub estimate: f64,
    pub converged: bool,
    pub odd_tail: f64,
    pub even_tail: f64,
}

/// Default tail window and tolerance for [`limit_estimate`].
pub const DEFAULT_WINDOW: usize = 10;
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

/// Tail-averaged estimate of the limit of `P_{m,n}(f)` with separate odd and even tails.
pub fn limit_estimate(n: u32, f: TruthTable, m_max: usize, tol: f64) -> Result<LimitEstimate> {
    let counts = FunctionCounts::new(n, m_max)?;
    limit_estimate_from(&counts, f, m_max, tol, DEFAULT_WINDOW)
}

pub fn limit_estimate_from(counts: &FunctionCounts, f: TruthTable, m_max: usize, tol: f64, window: usize) -> Result<LimitEstimate> {
    if m_max < 10 {
        return Err(Error::Precondition("limit_estimate needs M >= 10".into()));
    }
    let lo = m_max.saturating_sub(window).max(3);
    let (mut odd, mut even) = (Vec::new(), Vec::new());
    for m in lo..=m_max {
        let p = rational_to_f64(&counts.prob(m, f)?);
        if m % 2 == 1 {
            odd.push(p)
        } else {
            even.push(p)
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (odd_tail, even_tail) = (mean(&odd), mean(&even));
    let converged = (odd_tail - even_tail).abs() <= tol && odd_tail.is_finite() && even_tail.is_finite();
    Ok(LimitEstimate {
        f: f.to_hex(),
        n: counts.n,
        m_max,
        window,
        estimate: 0.5 * (odd_tail + even_tail),
        converged,
        odd_tail,
        even_tail,
    })
}

/// Direct DP over (size, function): a root takes an ordered sequence of at least two
/// opposite-rooted subtrees, combined one child at a time.
#[derive(Clone, Debug)]
pub struct SequenceTables {
    pub n: u32,
    pub max_size: usize,
    /// `hat[s][g]`: AND-rooted trees (or leaves when `s = 1`) of size `s` computing `g`.
    pub hat: Vec<Vec<BigUint>>,
    /// `many[t][g]`: sequences of at least two OR-rooted-or-leaf subtrees, total size `t`, whose AND is `g`.
    pub many: Vec<Vec<BigUint>>,
}

impl SequenceTables {
    pub fn new(n: u32, max_size: usize) -> Result<Self> {
        let nf = check_vars(n, 3)?;
        let full = nf - 1;
        let zero = vec![BigUint::zero(); nf];
        let mut hat = vec![zero.clone(); max_size + 1];
        let mut many = vec![zero.clone(); max_size + 1];
        if max_size >= 1 {
            for b in literal_bits(n) {
                hat[1][b] = BigUint::from(1u32);
            }
        }
        let check = |hat: &Vec<Vec<BigUint>>, s: usize, g: usize| -> BigUint { hat[s][full ^ g].clone() };
        for t in 1..=max_size {
            if t >= 3 {
                hat[t] = many[t - 1].clone();
            }
            let mut acc = zero.clone();
            for i in 1..t {
                let kids: Vec<(usize, BigUint)> =
                    (0..nf).map(|h| (h, check(&hat, i, h))).filter(|(_, c)| !c.is_zero()).collect();
                let rest: Vec<(usize, BigUint)> = (0..nf)
                    .map(|r| (r, check(&hat, t - i, r) + &many[t - i][r]))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                for (h, ch) in &kids {
                    for (r, cr) in &rest {
                        acc[h & r] += ch * cr;
                    }
                }
            }
            many[t] = acc;
        }
        Ok(SequenceTables { n, max_size, hat, many })
    }

    /// OR-rooted (or leaf) count of size `s` computing `g`.
    pub fn check(&self, s: usize, g: usize) -> &BigUint {
        &self.hat[s][(self.hat[s].len() - 1) ^ g]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{brute_enumerate, series};
    use crate::formula::{truth_table, AndOrTree, Connective};
    use num_traits::One;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn single_leaves() {
        let t = function_counts(1, 1).unwrap();
        let one = BigUint::one();
        assert_eq!(t.and_rooted, vec![BigUint::zero(), one.clone(), one.clone(), BigUint::zero()]);
        assert_eq!(t.or_rooted, t.and_rooted);
        assert_eq!(prob(1, 1, TruthTable::literal(1, Literal::pos(1))).unwrap(), r(1, 2));
    }

    #[test]
    fn size_three_one_variable() {
        let t = function_counts(3, 1).unwrap();
        assert_eq!(t.or_rooted[0b11], BigUint::from(2u32));
        assert_eq!(prob(3, 1, TruthTable::literal(1, Literal::pos(1))).unwrap(), r(1, 4));
        assert_eq!(prob(3, 1, TruthTable::constant(1, true)).unwrap(), r(1, 4));
        assert!(matches!(prob(2, 3, TruthTable::constant(3, true)), Err(Error::EmptySizeClass(2))));
    }

    #[test]
    fn prob_ge_cases() {
        let x1 = TruthTable::literal(1, Literal::pos(1));
        assert_eq!(prob_ge(1, 1, x1).unwrap(), r(1, 2));
        let c = FunctionCounts::new(2, 9).unwrap();
        let x1 = TruthTable::literal(2, Literal::pos(1));
        for m in [1, 3, 4, 5, 9] {
            assert!(c.prob_ge(m, x1).unwrap() >= c.prob(m, TruthTable::constant(2, true)).unwrap());
        }
        assert!(c.prob_ge(5, TruthTable::constant(2, false)).is_err());
    }

    #[test]
    fn matches_brute_force() {
        for n in 1..=2 {
            let counts = FunctionCounts::new(n, 8).unwrap();
            for m in [1, 3, 4, 5, 6, 7, 8] {
                let mut and_c = vec![0u64; counts.num_functions()];
                let mut or_c = vec![0u64; counts.num_functions()];
                for t in brute_enumerate(m, n).unwrap() {
                    let b = truth_table(&t, n).bits() as usize;
                    match t.connective() {
                        Some(Connective::And) => and_c[b] += 1,
                        Some(Connective::Or) => or_c[b] += 1,
                        None => {
                            and_c[b] += 1;
                            or_c[b] += 1;
                        }
                    }
                }
                let table = counts.table(m).unwrap();
                let to_big = |v: Vec<u64>| v.into_iter().map(BigUint::from).collect::<Vec<_>>();
                assert_eq!(table.and_rooted, to_big(and_c), "n={n} m={m}");
                assert_eq!(table.or_rooted, to_big(or_c), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn prob_ge_matches_brute_force() {
        let f0 = TruthTable::literal(2, Literal::pos(1)).and(&TruthTable::literal(2, Literal::pos(2)));
        let trees: Vec<AndOrTree> = brute_enumerate(5, 2).unwrap().collect();
        let hits = trees.iter().filter(|t| truth_table(t, 2).dominates(&f0)).count();
        assert_eq!(prob_ge(5, 2, f0).unwrap(), r(hits as i64, trees.len() as i64));
    }

    #[test]
    fn reference_dp_agrees() {
        for n in 1..=3 {
            let m = if n == 3 { 9 } else { 14 };
            let fast = FunctionCounts::new(n, m).unwrap();
            let direct = SequenceTables::new(n, m).unwrap();
            for s in 1..=m {
                assert_eq!(fast.and_rooted[s], direct.hat[s], "n={n} s={s}");
            }
        }
    }

    #[test]
    fn mass_and_totals() {
        for n in 1..=3 {
            let counts = FunctionCounts::new(n, 16).unwrap();
            let s = series(n, 16).unwrap();
            for m in (1..=16).filter(|&m| m != 2) {
                assert_eq!(counts.total(m), s.a_total[m]);
                assert_eq!(counts.and_rooted[m].iter().sum::<BigUint>(), s.a_hat[m]);
                let d = counts.distribution(m).unwrap();
                assert_eq!(d.probs.values().sum::<BigRational>(), BigRational::one());
                let t = counts.prob(m, TruthTable::constant(n, true)).unwrap();
                assert_eq!(t, counts.prob(m, TruthTable::constant(n, false)).unwrap());
            }
        }
    }

    #[test]
    fn permutation_invariance() {
        let counts = FunctionCounts::new(3, 11).unwrap();
        let perms = [[2, 1, 3], [3, 1, 2], [1, 3, 2]];
        for g in 0..256u64 {
            let f = TruthTable::from_bits(3, g);
            for p in &perms {
                assert_eq!(counts.trees_computing(11, f), counts.trees_computing(11, f.permute_vars(p)));
            }
        }
    }

    #[test]
    fn literal_symmetry_and_limit_bracket() {
        let est = limit_estimate(1, TruthTable::constant(1, true), 60, DEFAULT_TOLERANCE).unwrap();
        assert!(est.estimate > 0.0 && est.estimate < 0.5);
        let counts = FunctionCounts::new(1, 30).unwrap();
        for m in (1..=30).filter(|&m| m != 2) {
            assert_eq!(
                counts.prob(m, TruthTable::literal(1, Literal::pos(1))).unwrap(),
                counts.prob(m, TruthTable::literal(1, Literal::neg(1))).unwrap()
            );
        }
    }
}
