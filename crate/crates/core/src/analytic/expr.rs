//! Closed-form expressions in `z`, `a = Â(z)` and `t = T(z)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Integer-valued expression over named integer variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntExpr {
    Lit(i64),
    Var(String),
    Add(Box<IntExpr>, Box<IntExpr>),
    Sub(Box<IntExpr>, Box<IntExpr>),
    Mul(Box<IntExpr>, Box<IntExpr>),
    FloorDiv(Box<IntExpr>, i64),
    FloorSqrt(Box<IntExpr>),
}

/// Integer variable bindings; later entries shadow earlier ones.
#[derive(Clone, Debug, Default)]
pub struct Bindings(Vec<(String, i64)>);

impl Bindings {
    pub fn new() -> Self {
        Bindings(Vec::new())
    }

    pub fn with(mut self, name: &str, v: i64) -> Self {
        self.push(name, v);
        self
    }

    pub fn push(&mut self, name: &str, v: i64) {
        self.0.push((name.to_string(), v));
    }

    pub fn pop(&mut self) {
        self.0.pop();
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.0.iter().rev().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

impl IntExpr {
    pub fn var(name: &str) -> Self {
        IntExpr::Var(name.to_string())
    }

    pub fn floor_div(self, d: i64) -> Self {
        IntExpr::FloorDiv(Box::new(self), d)
    }

    pub fn floor_sqrt(self) -> Self {
        IntExpr::FloorSqrt(Box::new(self))
    }

    pub fn eval(&self, b: &Bindings) -> Result<i64> {
        let overflow = || Error::InvalidParameter("integer overflow in expression".into());
        Ok(match self {
            IntExpr::Lit(v) => *v,
            IntExpr::Var(name) => b.get(name).ok_or_else(|| Error::InvalidParameter(format!("unbound parameter `{name}`")))?,
            IntExpr::Add(x, y) => x.eval(b)?.checked_add(y.eval(b)?).ok_or_else(overflow)?,
            IntExpr::Sub(x, y) => x.eval(b)?.checked_sub(y.eval(b)?).ok_or_else(overflow)?,
            IntExpr::Mul(x, y) => x.eval(b)?.checked_mul(y.eval(b)?).ok_or_else(overflow)?,
            IntExpr::FloorDiv(x, d) => x.eval(b)?.div_euclid(*d),
            IntExpr::FloorSqrt(x) => {
                let v = x.eval(b)?;
                if v < 0 {
                    return Err(Error::InvalidParameter("square root of a negative integer".into()));
                }
                num_integer::Roots::sqrt(&v)
            }
        })
    }
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntExpr::Lit(v) => write!(f, "{v}"),
            IntExpr::Var(s) => write!(f, "{s}"),
            IntExpr::Add(x, y) => write!(f, "({x} + {y})"),
            IntExpr::Sub(x, y) => write!(f, "({x} - {y})"),
            IntExpr::Mul(x, y) => write!(f, "{x}*{y}"),
            IntExpr::FloorDiv(x, d) => write!(f, "floor({x}/{d})"),
            IntExpr::FloorSqrt(x) => write!(f, "floor(sqrt({x}))"),
        }
    }
}

impl From<i64> for IntExpr {
    fn from(v: i64) -> Self {
        IntExpr::Lit(v)
    }
}

macro_rules! int_binop {
    ($tr:ident, $method:ident, $variant:ident) => {
        impl<R: Into<IntExpr>> $tr<R> for IntExpr {
            type Output = IntExpr;
            fn $method(self, rhs: R) -> IntExpr {
                IntExpr::$variant(Box::new(self), Box::new(rhs.into()))
            }
        }
    };
}

int_binop!(Add, add, Add);
int_binop!(Sub, sub, Sub);
int_binop!(Mul, mul, Mul);

/// Expression over `z`, `a`, `t` with integer parameters and finite sums and products.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Z,
    A,
    T,
    Const(BigRational),
    Int(IntExpr),
    Binom(IntExpr, IntExpr),
    Factorial(IntExpr),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, IntExpr),
    Sum { var: String, lo: IntExpr, hi: IntExpr, body: Box<Expr> },
    Product { var: String, lo: IntExpr, hi: IntExpr, body: Box<Expr> },
}

pub fn z() -> Expr {
    Expr::Z
}

pub fn a() -> Expr {
    Expr::A
}

pub fn t() -> Expr {
    Expr::T
}

pub fn int(v: impl Into<IntExpr>) -> Expr {
    Expr::Int(v.into())
}

pub fn ratio(p: i64, q: i64) -> Expr {
    Expr::Const(BigRational::new(p.into(), q.into()))
}

/// `2n`, the number of literals.
pub fn two_n() -> Expr {
    int(IntExpr::var("n") * 2)
}

/// `B̂ = a - 2nz`.
pub fn b() -> Expr {
    a() - two_n() * z()
}

pub fn sum(var: &str, lo: impl Into<IntExpr>, hi: impl Into<IntExpr>, body: Expr) -> Expr {
    Expr::Sum { var: var.to_string(), lo: lo.into(), hi: hi.into(), body: Box::new(body) }
}

pub fn product(var: &str, lo: impl Into<IntExpr>, hi: impl Into<IntExpr>, body: Expr) -> Expr {
    Expr::Product { var: var.to_string(), lo: lo.into(), hi: hi.into(), body: Box::new(body) }
}

pub fn binom(n: impl Into<IntExpr>, k: impl Into<IntExpr>) -> Expr {
    Expr::Binom(n.into(), k.into())
}

pub fn factorial(k: impl Into<IntExpr>) -> Expr {
    Expr::Factorial(k.into())
}

impl Expr {
    pub fn pow(self, e: impl Into<IntExpr>) -> Expr {
        Expr::Pow(Box::new(self), e.into())
    }

    pub fn mentions_t(&self) -> bool {
        match self {
            Expr::T => true,
            Expr::Z | Expr::A | Expr::Const(_) | Expr::Int(_) | Expr::Binom(..) | Expr::Factorial(_) => false,
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => x.mentions_t() || y.mentions_t(),
            Expr::Neg(x) | Expr::Pow(x, _) => x.mentions_t(),
            Expr::Sum { body, .. } | Expr::Product { body, .. } => body.mentions_t(),
        }
    }

    /// Largest integer exponent and number of summand evaluations, with bound variables at their upper end.
    pub fn cost(&self, b: &mut Bindings) -> Result<(u64, u64)> {
        Ok(match self {
            Expr::Z | Expr::A | Expr::T | Expr::Const(_) | Expr::Int(_) => (0, 1),
            Expr::Binom(_, k) | Expr::Factorial(k) => (k.eval(b)?.unsigned_abs(), 1),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => {
                let (p, q) = (x.cost(b)?, y.cost(b)?);
                (p.0.max(q.0), p.1 + q.1)
            }
            Expr::Neg(x) => x.cost(b)?,
            Expr::Pow(x, e) => {
                let inner = x.cost(b)?;
                (inner.0.max(e.eval(b)?.unsigned_abs()), inner.1)
            }
            Expr::Sum { var, lo, hi, body } | Expr::Product { var, lo, hi, body } => {
                let (l, h) = (lo.eval(b)?, hi.eval(b)?);
                b.push(var, h.max(l));
                let inner = body.cost(b);
                b.pop();
                let inner = inner?;
                let len = (h - l + 1).max(0) as u64;
                (inner.0, inner.1.saturating_mul(len.max(1)))
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Z => write!(f, "z"),
            Expr::A => write!(f, "a"),
            Expr::T => write!(f, "t"),
            Expr::Const(r) => write!(f, "{r}"),
            Expr::Int(i) => write!(f, "{i}"),
            Expr::Binom(n, k) => write!(f, "C({n}, {k})"),
            Expr::Factorial(k) => write!(f, "{k}!"),
            Expr::Add(x, y) => write!(f, "({x} + {y})"),
            Expr::Sub(x, y) => write!(f, "({x} - {y})"),
            Expr::Mul(x, y) => write!(f, "{x}*{y}"),
            Expr::Div(x, y) => write!(f, "{x}/{y}"),
            Expr::Neg(x) => write!(f, "-{x}"),
            Expr::Pow(x, e) => write!(f, "{x}^({e})"),
            Expr::Sum { var, lo, hi, body } => write!(f, "sum[{var}={lo}..{hi}]({body})"),
            Expr::Product { var, lo, hi, body } => write!(f, "prod[{var}={lo}..{hi}]({body})"),
        }
    }
}

macro_rules! expr_binop {
    ($tr:ident, $method:ident, $variant:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);
expr_binop!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Values substituted for `z`, `a` and `t`.
pub struct Point<S: Scalar> {
    pub z: S,
    pub a: S,
    pub t: Option<S>,
    pub ctx: S::Ctx,
}

/// Memoizes integer constants (binomials, factorials) across one evaluation.
#[derive(Default)]
pub struct EvalCache {
    binom: RefCell<HashMap<(i64, i64), BigInt>>,
    fact: RefCell<HashMap<i64, BigInt>>,
}

impl EvalCache {
    fn binom(&self, n: i64, k: i64) -> BigInt {
        if k < 0 || n < 0 || k > n {
            return BigInt::zero();
        }
        let k = k.min(n - k);
        if let Some(v) = self.binom.borrow().get(&(n, k)) {
            return v.clone();
        }
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        self.binom.borrow_mut().insert((n, k), acc.clone());
        acc
    }

    fn factorial(&self, k: i64) -> Result<BigInt> {
        if k < 0 {
            return Err(Error::InvalidParameter("factorial of a negative integer".into()));
        }
        if let Some(v) = self.fact.borrow().get(&k) {
            return Ok(v.clone());
        }
        let v = (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
        self.fact.borrow_mut().insert(k, v.clone());
        Ok(v)
    }
}

fn lift<S: Scalar>(v: BigInt, ctx: &S::Ctx) -> Result<S> {
    S::from_int(&v, ctx).ok_or_else(|| Error::InvalidParameter("integer constant not representable".into()))
}

impl Expr {
    pub fn eval<S: Scalar>(&self, p: &Point<S>, b: &mut Bindings, cache: &EvalCache) -> Result<S> {
        Ok(match self {
            Expr::Z => p.z.clone(),
            Expr::A => p.a.clone(),
            Expr::T => p.t.clone().ok_or(Error::MissingEnv("t_value"))?,
            Expr::Const(r) => {
                S::from_rational(r, &p.ctx).ok_or_else(|| Error::InvalidParameter(format!("constant {r} not representable")))?
            }
            Expr::Int(i) => lift(BigInt::from(i.eval(b)?), &p.ctx)?,
            Expr::Binom(n, k) => lift(cache.binom(n.eval(b)?, k.eval(b)?), &p.ctx)?,
            Expr::Factorial(k) => lift(cache.factorial(k.eval(b)?)?, &p.ctx)?,
            Expr::Add(x, y) => x.eval(p, b, cache)?.add(&y.eval(p, b, cache)?),
            Expr::Sub(x, y) => x.eval(p, b, cache)?.sub(&y.eval(p, b, cache)?),
            Expr::Mul(x, y) => x.eval(p, b, cache)?.mul(&y.eval(p, b, cache)?),
            Expr::Div(x, y) => {
                let den = y.eval(p, b, cache)?;
                x.eval(p, b, cache)?.div(&den).ok_or_else(|| Error::Pole(format!("division by zero in {y}")))?
            }
            Expr::Neg(x) => x.eval(p, b, cache)?.neg(),
            Expr::Pow(x, e) => {
                let e = e.eval(b)?;
                x.eval(p, b, cache)?.powi(e, &p.ctx).ok_or_else(|| Error::Pole(format!("negative power of zero in {x}")))?
            }
            Expr::Sum { var, lo, hi, body } | Expr::Product { var, lo, hi, body } => {
                let is_sum = matches!(self, Expr::Sum { .. });
                let (l, h) = (lo.eval(b)?, hi.eval(b)?);
                let mut acc = lift::<S>(BigInt::from(if is_sum { 0 } else { 1 }), &p.ctx)?;
                for i in l..=h {
                    b.push(var, i);
                    let v = body.eval(p, b, cache);
                    b.pop();
                    let v = v?;
                    acc = if is_sum { acc.add(&v) } else { acc.mul(&v) };
                }
                acc
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_expressions() {
        let b = Bindings::new().with("n", 1_000_000).with("n", 17);
        assert_eq!(IntExpr::var("n").floor_sqrt().eval(&b).unwrap(), 4);
        assert_eq!((IntExpr::var("n") * 2 - 3).floor_div(4).eval(&b).unwrap(), 7);
        assert!(IntExpr::var("k").eval(&b).is_err());
    }

    #[test]
    fn evaluates_sums_and_products() {
        let e = sum("k", 1, IntExpr::var("n"), int(IntExpr::var("k")).pow(2)) + product("j", 1, 4, int(IntExpr::var("j")));
        let p = Point::<f64> { z: 0.0, a: 0.0, t: None, ctx: () };
        let mut bind = Bindings::new().with("n", 10);
        let v = e.eval(&p, &mut bind, &EvalCache::default()).unwrap();
        assert_eq!(v, 385.0 + 24.0);
        assert_eq!(e.cost(&mut bind).unwrap(), (2, 14));
    }

    #[test]
    fn binomials_and_errors() {
        let p = Point::<f64> { z: 0.5, a: 0.25, t: None, ctx: () };
        let mut bind = Bindings::new();
        let cache = EvalCache::default();
        assert_eq!(binom(10, 3).eval(&p, &mut bind, &cache).unwrap(), 120.0);
        assert_eq!(binom(3, 5).eval(&p, &mut bind, &cache).unwrap(), 0.0);
        assert_eq!(factorial(5).eval(&p, &mut bind, &cache).unwrap(), 120.0);
        assert!(matches!((int(1) / (a() - ratio(1, 4))).eval(&p, &mut bind, &cache), Err(Error::Pole(_))));
        assert_eq!((int(4) * z() * z() * t()).eval(&p, &mut bind, &cache), Err(Error::MissingEnv("t_value")));
    }
}
