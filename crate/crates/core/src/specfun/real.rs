//! Scalar abstraction shared by the closed-form evaluators.
//!
//! The finite sums behind the exact rate and outage expressions cancel
//! catastrophically in double precision, so they are written once against
//! [`Real`] and evaluated either in `f64` or in [`Mp`], an MPFR float whose
//! working precision is scoped per thread with [`with_precision`].

use std::cell::Cell;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Special;
use rug::ops::Pow;
use rug::Float;

use super::{exp_integral_ei, upper_incomplete_gamma};

pub trait Real:
    Clone
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn abs(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    /// Exponential integral Ei(x); only the negative branch is required.
    fn ei(&self) -> Self;
    /// Upper incomplete gamma Γ(s, x) for a positive integer `s`.
    fn gamma_upper(s: u32, x: &Self) -> Self;

    /// log2 |x| (approximate to within one unit for [`Mp`]); −∞ at zero.
    fn log2_abs(&self) -> f64;
    /// Significand bits of the current working precision.
    fn bits() -> u32;

    fn from_u64(n: u64) -> Self {
        Self::from_f64(n as f64)
    }
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn is_zero(&self) -> bool {
        self.to_f64() == 0.0
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn ei(&self) -> Self {
        exp_integral_ei(*self).unwrap_or(f64::NAN)
    }
    fn gamma_upper(s: u32, x: &Self) -> Self {
        upper_incomplete_gamma(s as f64, *x).unwrap_or(f64::NAN)
    }
    fn log2_abs(&self) -> f64 {
        f64::abs(*self).log2()
    }
    fn bits() -> u32 {
        f64::MANTISSA_DIGITS
    }
}

thread_local! {
    static PRECISION: Cell<u32> = const { Cell::new(128) };
}

/// Current working precision (bits) for [`Mp`] arithmetic on this thread.
pub fn precision() -> u32 {
    PRECISION.with(|p| p.get())
}

/// Runs `f` with the [`Mp`] working precision set to `bits`, restoring the
/// previous precision afterwards.
pub fn with_precision<T>(bits: u32, f: impl FnOnce() -> T) -> T {
    struct Restore(u32);
    impl Drop for Restore {
        fn drop(&mut self) {
            PRECISION.with(|p| p.set(self.0));
        }
    }
    let _guard = Restore(PRECISION.with(|p| p.replace(bits.max(rug::float::prec_min()))));
    f()
}

/// Arbitrary-precision real backed by MPFR.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp(pub Float);

impl Mp {
    fn new<T>(value: T) -> Mp
    where
        Float: rug::Assign<T>,
    {
        Mp(Float::with_val(precision(), value))
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp({:e})", self.0.to_f64())
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident, $tra:ident, $method_a:ident, $op:tt) => {
        impl $tr for Mp {
            type Output = Mp;
            fn $method(self, rhs: Mp) -> Mp {
                Mp::new(&self.0 $op &rhs.0)
            }
        }
        impl $tra for Mp {
            fn $method_a(&mut self, rhs: Mp) {
                let v = Float::with_val(precision(), &self.0 $op &rhs.0);
                self.0 = v;
            }
        }
    };
}
mp_binop!(Add, add, AddAssign, add_assign, +);
mp_binop!(Sub, sub, SubAssign, sub_assign, -);
mp_binop!(Mul, mul, MulAssign, mul_assign, *);
mp_binop!(Div, div, DivAssign, div_assign, /);

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Real for Mp {
    fn from_f64(x: f64) -> Self {
        Mp::new(x)
    }
    fn from_u64(n: u64) -> Self {
        Mp::new(n)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn exp(&self) -> Self {
        Mp::new(self.0.exp_ref())
    }
    fn ln(&self) -> Self {
        Mp::new(self.0.ln_ref())
    }
    fn abs(&self) -> Self {
        Mp::new(self.0.abs_ref())
    }
    fn powi(&self, n: i32) -> Self {
        Mp::new((&self.0).pow(n))
    }
    fn ei(&self) -> Self {
        if self.0.is_zero() {
            return Mp::new(Special::NegInfinity);
        }
        Mp::new(self.0.eint_ref())
    }
    fn gamma_upper(s: u32, x: &Self) -> Self {
        let s = Float::with_val(precision(), s);
        Mp::new(s.gamma_inc_ref(&x.0))
    }
    fn log2_abs(&self) -> f64 {
        match self.0.get_exp() {
            Some(e) => e as f64,
            None if self.0.is_zero() => f64::NEG_INFINITY,
            None => f64::INFINITY,
        }
    }
    fn bits() -> u32 {
        precision()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// n! in the requested arithmetic.
pub fn factorial<R: Real>(n: usize) -> R {
    let mut acc = R::one();
    for i in 2..=n {
        acc *= R::from_u64(i as u64);
    }
    acc
}

/// Table of 0!, 1!, ..., n!.
pub fn factorials<R: Real>(n: usize) -> Vec<R> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = R::one();
    out.push(acc.clone());
    for i in 1..=n {
        acc *= R::from_u64(i as u64);
        out.push(acc.clone());
    }
    out
}

/// Row `n` of Pascal's triangle.
pub fn binomial_row<R: Real>(n: usize) -> Vec<R> {
    let mut row = vec![R::one(); n + 1];
    for k in 1..n {
        row[k] = row[k - 1].clone() * R::from_u64((n - k + 1) as u64) / R::from_u64(k as u64);
    }
    row
}
