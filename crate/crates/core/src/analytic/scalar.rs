//! Number types the expression evaluator can run on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::hifloat::HiFloat;
use super::quad::{rat_f64, QuadExt};

pub trait Scalar: Clone + std::fmt::Debug {
    type Ctx: Clone;

    /// `None` when the constant cannot be represented (e.g. a fraction in an integer series).
    fn from_rational(r: &BigRational, ctx: &Self::Ctx) -> Option<Self>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `None` on division by zero.
    fn div(&self, o: &Self) -> Option<Self>;

    fn from_int(v: &BigInt, ctx: &Self::Ctx) -> Option<Self> {
        Self::from_rational(&BigRational::from_integer(v.clone()), ctx)
    }

    fn powi(&self, e: i64, ctx: &Self::Ctx) -> Option<Self> {
        let one = Self::from_int(&BigInt::one(), ctx)?;
        let base = if e < 0 { one.div(self)? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::from_int(&BigInt::one(), ctx)?;
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Some(acc)
    }
}

impl Scalar for f64 {
    type Ctx = ();

    fn from_rational(r: &BigRational, _: &()) -> Option<Self> {
        Some(rat_f64(r))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (*o != 0.0).then(|| self / o)
    }
    fn powi(&self, e: i64, _: &()) -> Option<Self> {
        if *self == 0.0 && e < 0 {
            return None;
        }
        Some(if e.unsigned_abs() <= i32::MAX as u64 { f64::powi(*self, e as i32) } else { self.powf(e as f64) })
    }
}

impl Scalar for QuadExt {
    /// The field parameter `n`.
    type Ctx = u32;

    fn from_rational(r: &BigRational, n: &u32) -> Option<Self> {
        Some(QuadExt::from_rational(*n, r.clone()))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self * &o.inv()?)
    }
    fn powi(&self, e: i64, _: &u32) -> Option<Self> {
        self.pow(e)
    }
}

impl Scalar for HiFloat {
    /// Mantissa bits.
    type Ctx = usize;

    fn from_rational(r: &BigRational, prec: &usize) -> Option<Self> {
        Some(HiFloat::from_rational(r, *prec))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (!o.is_zero()).then(|| self / o)
    }
    fn powi(&self, e: i64, prec: &usize) -> Option<Self> {
        if e >= 0 {
            Some(HiFloat::powi(self, e as u64))
        } else {
            HiFloat::from_int(&BigInt::one(), *prec).div(&HiFloat::powi(self, e.unsigned_abs()))
        }
    }
}

/// First-order dual number `v + d eps` with `eps^2 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<S> {
    pub v: S,
    pub d: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(v: S, d: S) -> Self {
        Dual { v, d }
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    type Ctx = S::Ctx;

    fn from_rational(r: &BigRational, ctx: &S::Ctx) -> Option<Self> {
        Some(Dual { v: S::from_rational(r, ctx)?, d: S::from_rational(&BigRational::zero(), ctx)? })
    }
    fn add(&self, o: &Self) -> Self {
        Dual { v: self.v.add(&o.v), d: self.d.add(&o.d) }
    }
    fn sub(&self, o: &Self) -> Self {
        Dual { v: self.v.sub(&o.v), d: self.d.sub(&o.d) }
    }
    fn mul(&self, o: &Self) -> Self {
        Dual { v: self.v.mul(&o.v), d: self.v.mul(&o.d).add(&self.d.mul(&o.v)) }
    }
    fn neg(&self) -> Self {
        Dual { v: self.v.neg(), d: self.d.neg() }
    }
    fn div(&self, o: &Self) -> Option<Self> {
        let v = self.v.div(&o.v)?;
        let d = self.d.sub(&v.mul(&o.d)).div(&o.v)?;
        Some(Dual { v, d })
    }
    fn powi(&self, e: i64, ctx: &S::Ctx) -> Option<Self> {
        if e == 0 {
            return Self::from_int(&BigInt::one(), ctx);
        }
        let lower = self.v.powi(e - 1, ctx)?;
        let k = S::from_int(&BigInt::from(e), ctx)?;
        Some(Dual { v: lower.mul(&self.v), d: k.mul(&lower).mul(&self.d) })
    }
}

/// Truncated power series with integer coefficients, used as an independent oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct IntSeries {
    pub c: Vec<BigInt>,
}

impl IntSeries {
    pub fn variable(len: usize) -> Self {
        let mut c = vec![BigInt::zero(); len];
        if len > 1 {
            c[1] = BigInt::one();
        }
        IntSeries { c }
    }
}

impl Scalar for IntSeries {
    /// Number of coefficients kept.
    type Ctx = usize;

    fn from_rational(r: &BigRational, len: &usize) -> Option<Self> {
        if !r.is_integer() {
            return None;
        }
        let mut c = vec![BigInt::zero(); *len];
        if *len > 0 {
            c[0] = r.to_integer();
        }
        Some(IntSeries { c })
    }
    fn add(&self, o: &Self) -> Self {
        IntSeries { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
    fn sub(&self, o: &Self) -> Self {
        IntSeries { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        let len = self.c.len();
        let lo_a = self.c.iter().position(|x| !x.is_zero()).unwrap_or(len);
        let lo_b = o.c.iter().position(|x| !x.is_zero()).unwrap_or(len);
        let mut c = vec![BigInt::zero(); len];
        for (k, slot) in c.iter_mut().enumerate().skip(lo_a + lo_b) {
            let mut s = BigInt::zero();
            for i in lo_a..=k - lo_b {
                let (x, y) = (&self.c[i], &o.c[k - i]);
                if !x.is_zero() && !y.is_zero() {
                    s += x * y;
                }
            }
            *slot = s;
        }
        IntSeries { c }
    }
    fn neg(&self) -> Self {
        IntSeries { c: self.c.iter().map(|x| -x).collect() }
    }
    /// Exact only when the divisor's constant term is a unit.
    fn div(&self, o: &Self) -> Option<Self> {
        let len = self.c.len();
        let c0 = o.c.first()?;
        let unit = if c0.is_one() {
            1
        } else if *c0 == -BigInt::one() {
            -1
        } else {
            return None;
        };
        let mut q = vec![BigInt::zero(); len];
        for k in 0..len {
            let mut s = self.c[k].clone();
            for i in 1..=k {
                if !o.c[i].is_zero() && !q[k - i].is_zero() {
                    s -= &o.c[i] * &q[k - i];
                }
            }
            q[k] = if unit == 1 { s } else { -s };
        }
        Some(IntSeries { c: q })
    }
}
