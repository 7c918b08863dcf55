//! Exact complex numbers with rational real and imaginary parts.
//!
//! Every value is kept in lowest terms with positive denominators; that is
//! the representation [`num_rational::BigRational`] maintains, and the fields
//! are private so no other representation can be constructed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// A complex number `re + im * i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_integers(1, 0)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::from_integers(0, 1)
    }

    pub fn from_integers(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }

    /// `re_num/re_den + (im_num/im_den) i`. Panics on zero denominators.
    pub fn from_fractions(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
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

    pub fn conjugate(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus `re^2 + im^2`, a nonnegative rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn to_complex_f64(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: GaussianRational) -> GaussianRational {
        &self + &rhs
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: GaussianRational) -> GaussianRational {
        &self - &rhs
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: GaussianRational) -> GaussianRational {
        &self * &rhs
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut wrote_re = false;
        if !self.re.is_zero() {
            write!(f, "{}", self.re)?;
            wrote_re = true;
        }
        if !self.im.is_zero() {
            if wrote_re && self.im.is_positive() {
                write!(f, "+")?;
            }
            if self.im == -BigRational::one() {
                write!(f, "-")?;
            } else if self.im != BigRational::one() {
                write!(f, "{}", self.im)?;
            }
            write!(f, "i")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders a rational as `"num/den"`, or just `"num"` when the denominator
/// is one. This is the on-disk coefficient format.
pub fn ratio_to_string(r: &BigRational) -> String {
    r.to_string()
}

/// Parses `"num/den"` or `"num"` into a reduced rational.
pub fn ratio_from_str(s: &str) -> Result<BigRational, Error> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::BadRational(s.to_string()));
    }
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| Error::BadRational(s.to_string()))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| Error::BadRational(s.to_string()))?;
        if d.is_zero() {
            return Err(Error::BadRational(s.to_string()));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(t).map_err(|_| Error::BadRational(s.to_string()))?;
        Ok(BigRational::from_integer(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> GaussianRational {
        GaussianRational::from_fractions(re_n, re_d, im_n, im_d)
    }

    #[test]
    fn construction_reduces_to_lowest_terms() {
        let x = q(2, 4, -6, 9);
        assert_eq!(ratio_to_string(x.re()), "1/2");
        assert_eq!(ratio_to_string(x.im()), "-2/3");
    }

    #[test]
    fn denominators_are_positive() {
        let x = GaussianRational::new(
            BigRational::new(BigInt::from(1), BigInt::from(-3)),
            BigRational::zero(),
        );
        assert!(x.re().denom() > &BigInt::from(0));
        assert_eq!(ratio_to_string(x.re()), "-1/3");
    }

    #[test]
    fn multiplication_follows_i_squared_is_minus_one() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_integers(-1, 0));
        let x = q(1, 1, 2, 1);
        let y = q(3, 1, -1, 1);
        // (1+2i)(3-i) = 3 - i + 6i - 2i^2 = 5 + 5i
        assert_eq!(&x * &y, GaussianRational::from_integers(5, 5));
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert!(GaussianRational::zero().inverse().is_none());
    }

    #[test]
    fn inverse_multiplies_to_one() {
        let x = q(3, 7, -2, 5);
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, GaussianRational::one());
    }

    #[test]
    fn display_formats() {
        assert_eq!(GaussianRational::zero().to_string(), "0");
        assert_eq!(GaussianRational::from_integers(3, 0).to_string(), "3");
        assert_eq!(GaussianRational::from_integers(0, 1).to_string(), "i");
        assert_eq!(GaussianRational::from_integers(0, -1).to_string(), "-i");
        assert_eq!(GaussianRational::from_integers(2, -3).to_string(), "2-3i");
        assert_eq!(q(1, 2, 1, 2).to_string(), "1/2+1/2i");
    }

    #[test]
    fn ratio_string_roundtrip() {
        for s in ["0", "7", "-7", "1/2", "-22/7"] {
            let r = ratio_from_str(s).unwrap();
            assert_eq!(ratio_to_string(&r), s);
        }
        assert_eq!(ratio_to_string(&ratio_from_str("2/4").unwrap()), "1/2");
        assert_eq!(ratio_to_string(&ratio_from_str("5/-10").unwrap()), "-1/2");
        assert!(ratio_from_str("1/0").is_err());
        assert!(ratio_from_str("").is_err());
        assert!(ratio_from_str("3.5").is_err());
    }

    fn arb_gq() -> impl Strategy<Value = GaussianRational> {
        (
            -20i64..=20,
            1i64..=10,
            -20i64..=20,
            1i64..=10,
        )
            .prop_map(|(rn, rd, in_, id)| q(rn, rd, in_, id))
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_gq(), b in arb_gq(), c in arb_gq()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !a.is_zero() {
                let inv = a.inverse().unwrap();
                prop_assert_eq!(&a * &inv, GaussianRational::one());
            }
        }
    }
}
