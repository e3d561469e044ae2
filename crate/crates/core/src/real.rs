//! Scalar abstractions shared by the floating, multiprecision and exact routes.
//!
//! Every algorithm in the crate that only needs field operations and an
//! ordering is written against [`Scalar`], so the same elimination code runs
//! over `f64`, [`Mp`] and exact rationals ([`RBig`]). Algorithms that need
//! transcendental functions are written against [`Real`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu::float::round::mode::HalfEven;
use dashu::float::FBig;
use dashu::integer::IBig;
use dashu::rational::RBig;

/// Ordered field element.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic is exact (no rounding, no zero threshold).
    const EXACT: bool;

    /// Integer constant at `bits` of precision (ignored by fixed-width types).
    fn from_i64(v: i64, bits: u32) -> Self;

    fn abs(&self) -> Self;

    fn is_zero(&self) -> bool;

    /// Sign as -1, 0 or 1.
    fn sign(&self) -> i8;

    /// Nearest `f64`, for reporting.
    fn approx_f64(&self) -> f64;
}

/// Real number type with elementary functions.
pub trait Real: Scalar {
    fn from_f64(x: f64, bits: u32) -> Self;
    fn from_ratio(q: &RBig, bits: u32) -> Self;
    fn to_f64(&self) -> f64 {
        self.approx_f64()
    }
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp_m1(&self) -> Self;
    fn ln_1p(&self) -> Self;
    fn sinh(&self) -> Self {
        let two = Self::from_i64(2, self.bits());
        (self.exp_m1() - self.clone().neg().exp_m1()) / two
    }
    /// Working precision of this value in bits.
    fn bits(&self) -> u32;
    /// Full-precision decimal rendering.
    fn to_decimal_string(&self) -> String;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64, _bits: u32) -> Self {
        v as f64
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn sign(&self) -> i8 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
    fn approx_f64(&self) -> f64 {
        *self
    }
}

impl Real for f64 {
    fn from_f64(x: f64, _bits: u32) -> Self {
        x
    }
    fn from_ratio(q: &RBig, _bits: u32) -> Self {
        q.to_f64().value()
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp_m1(&self) -> Self {
        f64::exp_m1(*self)
    }
    fn ln_1p(&self) -> Self {
        f64::ln_1p(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn bits(&self) -> u32 {
        53
    }
    fn to_decimal_string(&self) -> String {
        format!("{self:?}")
    }
}

/// Binary floating point number with a runtime mantissa width.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp(FBig<HalfEven, 2>);

impl Mp {
    pub fn new(x: FBig<HalfEven, 2>, bits: u32) -> Self {
        Mp(x.with_precision(bits as usize).value())
    }

    pub fn inner(&self) -> &FBig<HalfEven, 2> {
        &self.0
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for Mp {
            type Output = Mp;
            fn $method(self, rhs: Mp) -> Mp {
                Mp(self.0 $op rhs.0)
            }
        }
    };
}

mp_binop!(Add, add, +);
mp_binop!(Sub, sub, -);
mp_binop!(Mul, mul, *);
mp_binop!(Div, div, /);

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Scalar for Mp {
    const EXACT: bool = false;

    fn from_i64(v: i64, bits: u32) -> Self {
        Mp::new(FBig::from(v), bits)
    }
    fn abs(&self) -> Self {
        if self.0.sign() == dashu::base::Sign::Negative {
            Mp(-self.0.clone())
        } else {
            self.clone()
        }
    }
    fn is_zero(&self) -> bool {
        self.0.repr().significand() == &IBig::ZERO
    }
    fn sign(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.0.sign() == dashu::base::Sign::Negative {
            -1
        } else {
            1
        }
    }
    fn approx_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
}

impl Real for Mp {
    fn from_f64(x: f64, bits: u32) -> Self {
        let v = FBig::<HalfEven, 2>::try_from(x).expect("finite f64");
        Mp::new(v, bits)
    }
    fn from_ratio(q: &RBig, bits: u32) -> Self {
        Mp(q.to_float::<HalfEven, 2>(bits as usize).value())
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.sqrt())
    }
    fn exp(&self) -> Self {
        Mp(self.0.exp())
    }
    fn ln(&self) -> Self {
        Mp(self.0.ln())
    }
    fn exp_m1(&self) -> Self {
        Mp(self.0.exp_m1())
    }
    fn ln_1p(&self) -> Self {
        Mp(self.0.ln_1p())
    }
    fn bits(&self) -> u32 {
        self.0.precision() as u32
    }
    fn to_decimal_string(&self) -> String {
        // ~log10(2) digits per bit, plus a guard digit
        let digits = (self.0.precision() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        let dec = self
            .0
            .clone()
            .with_base_and_precision::<10>(digits)
            .value();
        format!("{dec}")
    }
}

impl Scalar for RBig {
    const EXACT: bool = true;

    fn from_i64(v: i64, _bits: u32) -> Self {
        RBig::from(IBig::from(v))
    }
    fn abs(&self) -> Self {
        if Scalar::sign(self) < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn is_zero(&self) -> bool {
        self.numerator() == &IBig::ZERO
    }
    fn sign(&self) -> i8 {
        match self.numerator().cmp(&IBig::ZERO) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }
    fn approx_f64(&self) -> f64 {
        self.to_f64().value()
    }
}

/// Largest of two values under a partial order (first on ties or NaN).
pub fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// Integer power by repeated squaring; negative exponents invert.
pub fn powi<T: Scalar>(base: &T, exp: i64, bits: u32) -> T {
    let mut result = T::from_i64(1, bits);
    let mut acc = base.clone();
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result = result * acc.clone();
        }
        e >>= 1;
        if e > 0 {
            acc = acc.clone() * acc;
        }
    }
    if exp < 0 {
        T::from_i64(1, bits) / result
    } else {
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_elementary_functions_agree_with_f64() {
        let x = Mp::from_f64(1.75, 256);
        assert!((x.ln().to_f64() - 1.75f64.ln()).abs() < 1e-15);
        assert!((x.exp().to_f64() - 1.75f64.exp()).abs() < 1e-14);
        assert!((x.sqrt().to_f64() - 1.75f64.sqrt()).abs() < 1e-15);
        assert!((x.sinh().to_f64() - 1.75f64.sinh()).abs() < 1e-14);
        assert_eq!(x.bits(), 256);
    }

    #[test]
    fn mp_keeps_precision_beyond_f64() {
        let one = Mp::from_i64(1, 256);
        let tiny = Mp::from_f64(1e-40, 256);
        let back = (one.clone() + tiny.clone()) - one;
        assert!(((back - tiny) / Mp::from_f64(1e-40, 256)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn rational_sign_and_abs() {
        let q = RBig::from_i64(-3, 0) / RBig::from_i64(4, 0);
        assert_eq!(Scalar::sign(&q), -1);
        assert_eq!(Scalar::abs(&q), RBig::from_i64(3, 0) / RBig::from_i64(4, 0));
        assert!(RBig::from_i64(0, 0).is_zero());
    }

    #[test]
    fn powi_matches_repeated_product() {
        let two = RBig::from_i64(2, 0);
        assert_eq!(powi(&two, 10, 0), RBig::from_i64(1024, 0));
        assert_eq!(powi(&two, -2, 0), RBig::from_i64(1, 0) / RBig::from_i64(4, 0));
        assert_eq!(powi(&3.0f64, 0, 53), 1.0);
    }

    #[test]
    fn mp_decimal_rendering_is_long() {
        let third = Mp::from_ratio(&(RBig::from_i64(1, 0) / RBig::from_i64(3, 0)), 256);
        let s = third.to_decimal_string();
        assert!(s.starts_with("0.3333333333333333333333"), "{s}");
    }
}
