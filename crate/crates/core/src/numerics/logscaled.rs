use std::cmp::Ordering;
use std::ops::{Div, Mul};

use crate::scalar::Real;

/// Sign of a [`LogScaled`] value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of<T: Real>(x: T) -> Self {
        match x.partial_cmp(&T::zero()) {
            Some(Ordering::Greater) => Sign::Positive,
            Some(Ordering::Less) => Sign::Negative,
            _ => Sign::Zero,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// A real number kept as sign, binary exponent and a mantissa in `[1, 2)`.
///
/// The magnitude is `mantissa * 2^exponent`, so its natural log is
/// `ln(mantissa) + exponent * ln 2`. Products and quotients of huge double
/// factorials and powers of 2π stay finite in this form; only the final ratio
/// is converted back with [`LogScaled::value`]. Multiplication adds the logs
/// (exponents add, mantissas multiply) and multiplies the signs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogScaled<T> {
    sign: Sign,
    mantissa: T,
    exponent: i64,
}

fn pow2<T: Real>(e: i64) -> T {
    let two = T::lit(2.0);
    if e.abs() <= 1000 {
        two.powi(e as i32)
    } else {
        let clamped = e.clamp(-4000, 4000);
        let half = clamped / 2;
        two.powi(half as i32) * two.powi((clamped - half) as i32)
    }
}

impl<T: Real> LogScaled<T> {
    pub fn zero() -> Self {
        Self { sign: Sign::Zero, mantissa: T::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Self { sign: Sign::Positive, mantissa: T::one(), exponent: 0 }
    }

    fn normalized(sign: Sign, mut mantissa: T, mut exponent: i64) -> Self {
        if sign == Sign::Zero || mantissa == T::zero() {
            return Self::zero();
        }
        let two = T::lit(2.0);
        // Bring the mantissa into [1, 2); each step is an exact power-of-two rescale.
        if mantissa >= two || mantissa < T::one() {
            let shift = mantissa.log2().floor().to_i64().unwrap_or(0);
            mantissa = mantissa / pow2::<T>(shift);
            exponent += shift;
        }
        while mantissa >= two {
            mantissa = mantissa / two;
            exponent += 1;
        }
        while mantissa < T::one() {
            mantissa = mantissa * two;
            exponent -= 1;
        }
        Self { sign, mantissa, exponent }
    }

    /// Positive value `exp(ln_value)`.
    pub fn from_ln(ln_value: T) -> Self {
        if ln_value == T::neg_infinity() {
            return Self::zero();
        }
        let e = (ln_value / T::LN_2()).floor();
        let exponent = e.to_i64().unwrap_or(0);
        let mantissa = (ln_value - e * T::LN_2()).exp();
        Self::normalized(Sign::Positive, mantissa, exponent)
    }

    pub fn from_value(x: T) -> Self {
        match Sign::of(x) {
            Sign::Zero => Self::zero(),
            s => Self::normalized(s, x.abs(), 0),
        }
    }

    /// Exact conversion of a (possibly huge) unsigned integer.
    pub fn from_u128(n: u128) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let bits = 128 - n.leading_zeros() as i64;
        // Keep the leading 53 bits; the exponent absorbs the rest.
        let shift = (bits - 53).max(0);
        let top = (n >> shift) as u64;
        let m = <T as num_traits::FromPrimitive>::from_u64(top).expect("u64 representable");
        Self::normalized(Sign::Positive, m, shift)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn ln_abs(&self) -> T {
        match self.sign {
            Sign::Zero => T::neg_infinity(),
            _ => self.mantissa.ln() + T::lit(self.exponent as f64) * T::LN_2(),
        }
    }

    /// The represented value; overflows to ±inf or underflows to 0 when out of range.
    pub fn value(&self) -> T {
        let mag = match self.sign {
            Sign::Zero => return T::zero(),
            _ => self.mantissa * pow2::<T>(self.exponent),
        };
        if self.sign == Sign::Negative {
            -mag
        } else {
            mag
        }
    }

    pub fn recip(&self) -> Self {
        assert!(self.sign != Sign::Zero, "reciprocal of zero");
        Self::normalized(self.sign, T::one() / self.mantissa, -self.exponent)
    }

    pub fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        if self.sign == Sign::Zero {
            return Self::zero();
        }
        let sign = if self.sign == Sign::Negative && n % 2 != 0 { Sign::Negative } else { Sign::Positive };
        let ln = self.ln_abs() * T::lit(f64::from(n));
        let mut r = Self::from_ln(ln);
        r.sign = sign;
        r
    }

    /// Multiply by an ordinary scalar.
    pub fn scale(&self, x: T) -> Self {
        *self * Self::from_value(x)
    }
}

impl<T: Real> Mul for LogScaled<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::normalized(self.sign * rhs.sign, self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl<T: Real> Div for LogScaled<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}
