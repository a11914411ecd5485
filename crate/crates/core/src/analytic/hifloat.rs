use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::{Context, FBig};
use dashu_int::{IBig, UBig};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;

type Inner = FBig<HalfEven, 2>;

/// Default mantissa length for the high-precision mode.
pub const DEFAULT_PRECISION_BITS: usize = 200;

/// Binary floating point number with a fixed mantissa length and an unbounded exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct HiFloat(Inner);

fn to_ibig(v: &BigInt) -> IBig {
    let mag = IBig::from(UBig::from_le_bytes(&v.magnitude().to_bytes_le()));
    if v.sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}

impl HiFloat {
    pub fn from_int(v: &BigInt, precision: usize) -> Self {
        HiFloat(Inner::from(to_ibig(v)).with_precision(precision).value())
    }

    pub fn from_rational(r: &BigRational, precision: usize) -> Self {
        let num = Self::from_int(r.numer(), precision);
        if r.denom() == &BigInt::from(1) {
            return num;
        }
        &num / &Self::from_int(r.denom(), precision)
    }

    pub fn from_f64(v: f64, precision: usize) -> Self {
        HiFloat(Inner::try_from(v).expect("finite float").with_precision(precision).value())
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn is_zero(&self) -> bool {
        *self.0.repr().significand() == IBig::ZERO
    }

    pub fn sqrt(&self) -> Self {
        HiFloat(Context::<HalfEven>::new(self.precision()).sqrt(self.0.repr()).value())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn powi(&self, e: u64) -> Self {
        HiFloat(self.0.powi(IBig::from(e)))
    }
}

impl fmt::Display for HiFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

macro_rules! hifloat_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&HiFloat> for &HiFloat {
            type Output = HiFloat;
            fn $method(self, rhs: &HiFloat) -> HiFloat {
                HiFloat((&self.0).$method(&rhs.0))
            }
        }
    };
}

hifloat_binop!(Add, add);
hifloat_binop!(Sub, sub);
hifloat_binop!(Mul, mul);
hifloat_binop!(Div, div);

impl Neg for &HiFloat {
    type Output = HiFloat;
    fn neg(self) -> HiFloat {
        HiFloat(-self.0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_arithmetic() {
        let p = 200;
        let two = HiFloat::from_int(&BigInt::from(2), p);
        let r2 = two.sqrt();
        let back = &r2 * &r2;
        assert!((back.to_f64() - 2.0).abs() < 1e-15);
        let third = HiFloat::from_rational(&BigRational::new(1.into(), 3.into()), p);
        assert!((third.to_f64() - 1.0 / 3.0).abs() < 1e-16);
        assert!(HiFloat::from_int(&BigInt::from(0), p).is_zero());
        assert!((HiFloat::from_int(&BigInt::from(-7), p).to_f64() + 7.0).abs() < 1e-15);
    }

    #[test]
    fn tiny_and_huge_exponents() {
        let p = 200;
        let x = HiFloat::from_rational(&BigRational::new(1.into(), 1000.into()), p).powi(1000);
        let y = &x * &HiFloat::from_int(&BigInt::from(10).pow(2999), p);
        assert!((y.to_f64() - 0.1).abs() < 1e-15);
    }
}
