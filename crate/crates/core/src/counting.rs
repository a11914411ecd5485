//! Exact counts of associative trees by size.
//!
//! `a_hat[m]` counts AND-rooted trees of size `m` (including the `2n` single leaves), and
//! `a_total[m] = 2 a_hat[m] - 2n [m = 1]` counts all trees.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::formula::{AndOrTree, Connective, Literal};

/// Default cap on the number of trees `brute_enumerate` may materialize.
pub const BRUTE_FORCE_BUDGET: u64 = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSeries {
    pub n: u32,
    pub max_size: usize,
    /// Index 0 is unused and always zero.
    pub a_hat: Vec<BigUint>,
    pub a_total: Vec<BigUint>,
}

impl CountSeries {
    pub fn a_hat(&self, m: usize) -> &BigUint {
        &self.a_hat[m]
    }

    pub fn a_total(&self, m: usize) -> &BigUint {
        &self.a_total[m]
    }

    /// Coefficients of `(z+1) A^2 - (2nz+1) A + 2nz` for orders `0..=max_size`.
    pub fn algebraic_residual(&self) -> Vec<BigInt> {
        let a: Vec<BigInt> = self.a_hat.iter().map(|x| BigInt::from(x.clone())).collect();
        let m = self.max_size;
        let sq = square_truncated(&a, m);
        let two_n = BigInt::from(2 * self.n);
        (0..=m)
            .map(|k| {
                let mut r = sq[k].clone();
                if k >= 1 {
                    r += &sq[k - 1];
                    r -= &two_n * &a[k - 1];
                }
                r -= &a[k];
                if k == 1 {
                    r += &two_n;
                }
                r
            })
            .collect()
    }

    /// `a_total[m + 1] / a_total[m]` as a float.
    pub fn growth_ratio(&self, m: usize) -> f64 {
        ratio_f64(&self.a_total[m + 1], &self.a_total[m])
    }
}

pub(crate) fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    let shift = num.bits().max(den.bits()).saturating_sub(60);
    let a = (num >> shift).to_f64().unwrap_or(f64::NAN);
    let b = (den >> shift).to_f64().unwrap_or(f64::NAN);
    a / b
}

fn square_truncated(a: &[BigInt], m: usize) -> Vec<BigInt> {
    (0..=m)
        .map(|k| {
            let mut s = BigInt::zero();
            for i in 0..=k / 2 {
                let j = k - i;
                if a[i].is_zero() || a[j].is_zero() {
                    continue;
                }
                let p = &a[i] * &a[j];
                if i == j {
                    s += p;
                } else {
                    s += p << 1;
                }
            }
            s
        })
        .collect()
}

/// Sequence DP: a root takes an ordered sequence of at least two subtrees whose sizes sum to `m - 1`.
fn series_by_sequences(n: u32, max_size: usize) -> Vec<BigUint> {
    let mut a = vec![BigUint::zero(); max_size + 1];
    // one[s]: sequences of exactly one subtree; many[s]: at least two, total size s
    let mut many = vec![BigUint::zero(); max_size + 1];
    for m in 1..=max_size {
        a[m] = if m == 1 { BigUint::from(2 * n) } else { many[m - 1].clone() };
        let mut acc = BigUint::zero();
        for i in 1..m {
            if a[i].is_zero() {
                continue;
            }
            let rest = &a[m - i] + &many[m - i];
            if !rest.is_zero() {
                acc += &a[i] * rest;
            }
        }
        many[m] = acc;
    }
    a
}

/// Recurrence read off `(z+1) A^2 - (2nz+1) A + 2nz = 0`:
/// `a_m = [z^m]A^2 + [z^(m-1)]A^2 - 2n a_(m-1) + 2n [m = 1]`.
fn series_by_identity(n: u32, max_size: usize) -> Vec<BigInt> {
    let two_n = BigInt::from(2 * n);
    let mut a = vec![BigInt::zero(); max_size + 1];
    let mut sq = vec![BigInt::zero(); max_size + 1];
    for m in 1..=max_size {
        let mut s = BigInt::zero();
        for i in 1..=m / 2 {
            let j = m - i;
            if j >= m || a[i].is_zero() || a[j].is_zero() {
                continue;
            }
            let p = &a[i] * &a[j];
            if i == j {
                s += p;
            } else {
                s += p << 1;
            }
        }
        sq[m] = s;
        let mut v = &sq[m] + &sq[m - 1] - &two_n * &a[m - 1];
        if m == 1 {
            v += &two_n;
        }
        a[m] = v;
    }
    a
}

/// Exact counts through size `max_size`, computed by two independent routes and cross-checked.
pub fn series(n: u32, max_size: usize) -> Result<CountSeries> {
    if n < 1 || max_size < 1 {
        return Err(Error::InvalidParameter("series needs n >= 1 and M >= 1".into()));
    }
    let by_seq = series_by_sequences(n, max_size);
    let by_id = series_by_identity(n, max_size);
    for m in 1..=max_size {
        if BigInt::from(by_seq[m].clone()) != by_id[m] {
            return Err(Error::Inconsistent(format!("tree counts disagree at size {m} for n = {n}")));
        }
    }
    Ok(from_a_hat(n, by_seq))
}

/// Rebuilds a series from AND-rooted counts (index 0 unused).
pub fn from_a_hat(n: u32, a_hat: Vec<BigUint>) -> CountSeries {
    let max_size = a_hat.len() - 1;
    let a_total = a_hat
        .iter()
        .enumerate()
        .map(|(m, a)| if m == 1 { (a << 1) - BigUint::from(2 * n) } else { a << 1 })
        .collect();
    CountSeries { n, max_size, a_hat, a_total }
}

type Memo = HashMap<(usize, Option<Connective>), Vec<AndOrTree>>;

/// Trees of size `m` whose root is `root` (`None` means a leaf).
fn trees_with_root(m: usize, n: u32, root: Option<Connective>, memo: &mut Memo) -> Vec<AndOrTree> {
    if let Some(v) = memo.get(&(m, root)) {
        return v.clone();
    }
    let out = match root {
        None if m == 1 => Literal::all(n).map(AndOrTree::Leaf).collect(),
        None => Vec::new(),
        Some(_) if m < 3 => Vec::new(),
        Some(conn) => {
            let mut out = Vec::new();
            let mut prefix = Vec::new();
            child_sequences(m - 1, n, conn.dual(), &mut prefix, &mut |kids| {
                if kids.len() >= 2 {
                    out.push(AndOrTree::Node(conn, kids.to_vec()));
                }
            }, memo);
            out
        }
    };
    memo.insert((m, root), out.clone());
    out
}

fn child_sequences(
    remaining: usize,
    n: u32,
    child_conn: Connective,
    prefix: &mut Vec<AndOrTree>,
    emit: &mut dyn FnMut(&[AndOrTree]),
    memo: &mut Memo,
) {
    if remaining == 0 {
        emit(prefix);
        return;
    }
    for size in 1..=remaining {
        let kids = if size == 1 { trees_with_root(1, n, None, memo) } else { trees_with_root(size, n, Some(child_conn), memo) };
        for k in kids {
            prefix.push(k);
            child_sequences(remaining - size, n, child_conn, prefix, emit, memo);
            prefix.pop();
        }
    }
}

/// Every tree of size `m` over `n` variables, once each, ordered by canonical serialization.
pub fn brute_enumerate(m: usize, n: u32) -> Result<std::vec::IntoIter<AndOrTree>> {
    brute_enumerate_with_budget(m, n, BRUTE_FORCE_BUDGET)
}

pub fn brute_enumerate_with_budget(m: usize, n: u32, budget: u64) -> Result<std::vec::IntoIter<AndOrTree>> {
    if m == 0 || m == 2 {
        return Ok(Vec::new().into_iter());
    }
    let expected = series(n, m)?.a_total[m].clone();
    if expected > BigUint::from(budget) {
        return Err(Error::Budget(format!("{expected} trees of size {m} exceed the enumeration budget {budget}")));
    }
    let mut memo = Memo::new();
    let mut all = if m == 1 {
        trees_with_root(1, n, None, &mut memo)
    } else {
        let mut v = trees_with_root(m, n, Some(Connective::And), &mut memo);
        v.extend(trees_with_root(m, n, Some(Connective::Or), &mut memo));
        v
    };
    let mut keyed: Vec<(String, AndOrTree)> = all.drain(..).map(|t| (t.serialize(), t)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(keyed.into_iter().map(|(_, t)| t).collect::<Vec<_>>().into_iter())
}
