//! Exact Gaussian-rational coefficients.
//!
//! Every symbolic computation in the crate runs over `Q(i)`: the imaginary
//! unit shows up in the boundary K-matrices and in the `antidiag(i, -i)`
//! conjugation, so plain rationals are not enough.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// A Gaussian rational `re + im*i` with arbitrary-precision parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Coeff {
    re: BigRational,
    im: BigRational,
}

impl Coeff {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Coeff { re, im }
    }

    pub fn zero() -> Self {
        Coeff::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Coeff::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Coeff::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Coeff::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Coeff::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn gaussian(re: i64, im: i64) -> Self {
        Coeff::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Coeff::new(self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Coeff::new(&self.re / &norm, -(&self.im / &norm)))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Coeff::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// The serialized form `a/b+c/d*i` used by the JSON schema.
    pub fn to_wire(&self) -> String {
        let sign = if self.im.is_negative() { '-' } else { '+' };
        format!(
            "{}/{}{}{}/{}*i",
            self.re.numer(),
            self.re.denom(),
            sign,
            self.im.numer().abs(),
            self.im.denom()
        )
    }

    /// Sign used when laying out a sum: a leading `-` is pulled out of
    /// purely real or purely imaginary negative coefficients.
    pub(crate) fn is_negative_for_display(&self) -> bool {
        if self.im.is_zero() {
            self.re.is_negative()
        } else if self.re.is_zero() {
            self.im.is_negative()
        } else {
            false
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Coefficient(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

impl FromStr for Coeff {
    type Err = ParseError;

    /// Accepts the wire form `a/b+c/d*i` as well as bare rationals `a/b`
    /// and pure imaginaries `c/d*i`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseError::Coefficient(s.to_string()));
        }
        if let Some(body) = s.strip_suffix("*i") {
            // split at the last sign that is not the leading one
            let split = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last();
            return match split {
                Some(pos) => {
                    let re = parse_rational(&body[..pos])?;
                    let im = parse_rational(&body[pos..].trim_start_matches('+'))?;
                    Ok(Coeff::new(re, im))
                }
                None => Ok(Coeff::new(BigRational::zero(), parse_rational(body)?)),
            };
        }
        Ok(Coeff::new(parse_rational(s)?, BigRational::zero()))
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Coeff {
    /// Human form: `3`, `-1/2`, `2*i`, `(1+2*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => fmt_rational(&self.re, f),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-&self.im).is_one() {
                    write!(f, "-i")
                } else {
                    fmt_rational(&self.im, f)?;
                    write!(f, "*i")
                }
            }
            (false, false) => {
                write!(f, "(")?;
                fmt_rational(&self.re, f)?;
                if self.im.is_negative() {
                    write!(f, "-")?;
                } else {
                    write!(f, "+")?;
                }
                fmt_rational(&self.im.abs(), f)?;
                write!(f, "*i)")
            }
        }
    }
}

impl Add<&Coeff> for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        Coeff::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Coeff> for &Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        Coeff::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Coeff> for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        Coeff::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div<&Coeff> for &Coeff {
    type Output = Coeff;
    /// Panics on division by zero, like the integer types.
    fn div(self, rhs: &Coeff) -> Coeff {
        self * &rhs.inv().expect("division by zero coefficient")
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Coeff> for Coeff {
            type Output = Coeff;
            fn $m(self, rhs: Coeff) -> Coeff {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Coeff> for Coeff {
            type Output = Coeff;
            fn $m(self, rhs: &Coeff) -> Coeff {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, rhs: &Coeff) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Coeff> for Coeff {
    fn sub_assign(&mut self, rhs: &Coeff) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Coeff> for Coeff {
    fn mul_assign(&mut self, rhs: &Coeff) {
        *self = &*self * rhs;
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::from_int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_roundtrip() {
        for c in [
            Coeff::from_frac(-3, 4),
            Coeff::gaussian(0, -1),
            Coeff::new(
                BigRational::new(1.into(), 2.into()),
                BigRational::new((-5).into(), 7.into()),
            ),
            Coeff::zero(),
        ] {
            let w = c.to_wire();
            assert_eq!(w.parse::<Coeff>().unwrap(), c, "{w}");
        }
        assert_eq!(Coeff::from_frac(-1, 2).to_wire(), "-1/2+0/1*i");
        assert_eq!(Coeff::gaussian(1, -3).to_wire(), "1/1-3/1*i");
    }

    #[test]
    fn field_ops() {
        let a = Coeff::gaussian(1, 2);
        let b = Coeff::gaussian(3, -1);
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(&Coeff::i() * &Coeff::i(), Coeff::from_int(-1));
        assert!(Coeff::zero().inv().is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Coeff::from_frac(1, 2).to_string(), "1/2");
        assert_eq!(Coeff::gaussian(0, -1).to_string(), "-i");
        assert_eq!(Coeff::gaussian(1, -2).to_string(), "(1-2*i)");
        assert_eq!("3/4*i".parse::<Coeff>().unwrap(), Coeff::new(BigRational::zero(), BigRational::new(3.into(), 4.into())));
    }
}
