use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::hifloat::HiFloat;
use crate::error::{Error, Result};

/// An exact element `p + q sqrt(2n)` of the quadratic field over the rationals.
///
/// When `2n` is a perfect square the radical is folded into `p`, so `q` is always zero and
/// coefficient-wise equality stays equivalent to numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    n: u32,
    p: BigRational,
    q: BigRational,
}

fn exact_sqrt(d: u64) -> Option<u64> {
    let r = d.sqrt();
    (r * r == d).then_some(r)
}

impl QuadExt {
    pub fn new(n: u32, p: BigRational, q: BigRational) -> Self {
        assert!(n >= 1, "the field needs n >= 1");
        match exact_sqrt(2 * n as u64) {
            Some(r) => QuadExt { n, p: p + q * BigRational::from_integer(r.into()), q: BigRational::zero() },
            None => QuadExt { n, p, q },
        }
    }

    pub fn from_rational(n: u32, r: BigRational) -> Self {
        Self::new(n, r, BigRational::zero())
    }

    pub fn from_int(n: u32, v: i64) -> Self {
        Self::from_rational(n, BigRational::from_integer(v.into()))
    }

    pub fn zero(n: u32) -> Self {
        Self::from_int(n, 0)
    }

    pub fn one(n: u32) -> Self {
        Self::from_int(n, 1)
    }

    /// The element `sqrt(2n)`.
    pub fn sqrt_2n(n: u32) -> Self {
        Self::new(n, BigRational::zero(), BigRational::one())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn radicand(&self) -> u64 {
        2 * self.n as u64
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.radicand(), other.radicand()))
        }
    }

    fn d(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.radicand()))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(QuadExt { n: self.n, p: &self.p + &other.p, q: &self.q + &other.q })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(QuadExt { n: self.n, p: &self.p - &other.p, q: &self.q - &other.q })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let p = &self.p * &other.p + &self.q * &other.q * self.d();
        let q = &self.p * &other.q + &self.q * &other.p;
        Ok(QuadExt { n: self.n, p, q })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let inv = other.inv().ok_or_else(|| Error::Pole("division by zero in Q(sqrt(2n))".into()))?;
        self.checked_mul(&inv)
    }

    pub fn conj(&self) -> Self {
        QuadExt { n: self.n, p: self.p.clone(), q: -&self.q }
    }

    /// `p^2 - 2n q^2`, the field norm.
    pub fn norm(&self) -> BigRational {
        &self.p * &self.p - &self.q * &self.q * self.d()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let nm = self.norm();
        Some(QuadExt { n: self.n, p: &self.p / &nm, q: -&self.q / &nm })
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one(self.n);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Some(acc)
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sp = sign_of(&self.p);
        let sq = sign_of(&self.q);
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        // opposite signs: compare p^2 with 2n q^2
        match (&self.p * &self.p).cmp(&(&self.q * &self.q * self.d())) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let d = self - other;
        d.signum().cmp(&0)
    }

    /// Nearest double; opposite-sign parts go through the conjugate to avoid cancellation.
    pub fn to_f64(&self) -> f64 {
        let s = (self.radicand() as f64).sqrt();
        let p = rat_f64(&self.p);
        let q = rat_f64(&self.q);
        if sign_of(&self.p) * sign_of(&self.q) >= 0 {
            return p + q * s;
        }
        let conj = p - q * s;
        rat_f64(&self.norm()) / conj
    }

    pub fn to_hifloat(&self, precision: usize) -> HiFloat {
        let p = HiFloat::from_rational(&self.p, precision);
        if self.q.is_zero() {
            return p;
        }
        let s = HiFloat::from_int(&BigInt::from(self.radicand()), precision).sqrt();
        let q = HiFloat::from_rational(&self.q, precision);
        if sign_of(&self.p) * sign_of(&self.q) >= 0 {
            return &p + &(&q * &s);
        }
        let conj = &p - &(&q * &s);
        &HiFloat::from_rational(&self.norm(), precision) / &conj
    }
}

fn sign_of(r: &BigRational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub(crate) fn rat_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let (num, den) = (r.numer().abs(), r.denom().clone());
    let shift = num.bits().max(den.bits()).saturating_sub(1000) as usize;
    let v = (num >> shift).to_f64().unwrap_or(f64::NAN) / (den >> shift).to_f64().unwrap_or(f64::NAN);
    if r.is_negative() {
        -v
    } else {
        v
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { n: self.n, p: -&self.p, q: -&self.q }
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_negative() {
            write!(f, "{}-{}*sqrt({})", self.p, -&self.q, self.radicand())
        } else {
            write!(f, "{}+{}*sqrt({})", self.p, self.q, self.radicand())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn field_axioms_on_samples() {
        let n = 3;
        let x = QuadExt::new(n, r(1, 2), r(-3, 7));
        let y = QuadExt::new(n, r(5, 1), r(2, 9));
        let z = QuadExt::new(n, r(-4, 5), r(1, 1));
        assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        assert_eq!(&(&x / &y) * &y, x);
        assert_eq!(&x * &x.inv().unwrap(), QuadExt::one(n));
        assert_eq!(&QuadExt::sqrt_2n(n) * &QuadExt::sqrt_2n(n), QuadExt::from_int(n, 6));
    }

    #[test]
    fn perfect_square_radicand_folds() {
        let s = QuadExt::sqrt_2n(2);
        assert_eq!(s, QuadExt::from_int(2, 2));
        assert!(QuadExt::new(8, r(1, 1), r(1, 2)).is_rational());
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = QuadExt::one(1);
        let b = QuadExt::one(3);
        assert_eq!(a.checked_add(&b), Err(Error::FieldMismatch(2, 6)));
    }

    #[test]
    #[should_panic]
    fn mixing_fields_panics_in_operators() {
        let _ = QuadExt::one(1) + QuadExt::one(3);
    }

    #[test]
    fn sign_and_float() {
        // sqrt(2) - 1 > 0, 1 - sqrt(2) < 0, 3 - 2 sqrt(2) tiny positive
        let a = QuadExt::new(1, r(-1, 1), r(1, 1));
        assert_eq!(a.signum(), 1);
        assert_eq!((-&a).signum(), -1);
        let tiny = QuadExt::new(1, r(3, 1), r(-2, 1)).pow(20).unwrap();
        assert_eq!(tiny.signum(), 1);
        let expect = (3.0 - 2.0 * 2f64.sqrt()).powi(20);
        assert!((tiny.to_f64() / expect - 1.0).abs() < 1e-6);
        assert_eq!(tiny.to_f64().signum(), 1.0);
        let hf = tiny.to_hifloat(200).to_f64();
        assert!((hf / tiny.to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn display() {
        assert_eq!(QuadExt::new(1, r(-1, 2), r(1, 2)).to_string(), "-1/2+1/2*sqrt(2)");
        assert_eq!(QuadExt::new(3, r(1, 1), r(-1, 3)).to_string(), "1-1/3*sqrt(6)");
    }
}
