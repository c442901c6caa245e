//! Exact rational arithmetic and polynomials over the unit interval.
//!
//! All probabilities in this crate are carried as [`BigRational`], which
//! `num-rational` keeps in lowest terms with a positive denominator after
//! every operation. This module adds the pieces that crate does not have:
//! a fallible constructor, slash-form serialization, rational polynomials,
//! and decimal rendering.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational;

use crate::error::{Error, Result};

/// Builds `n/d` in canonical form, rejecting a zero denominator.
pub fn rat_normalize(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<BigRational> {
    let d = d.into();
    if d.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(BigRational::new(n.into(), d))
}

/// Machine-readable `numerator/denominator`. Integers keep the slash (`3/1`).
pub fn format_exact(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses the slash form written by [`format_exact`]; a bare integer is accepted too.
pub fn parse_exact(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            rat_normalize(n, d)
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

fn pow10(exp: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(10u32), exp.unsigned_abs() as usize);
    if exp >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// floor(log10(a)) for a > 0.
fn decimal_exponent(a: &BigRational) -> i64 {
    let digits = |n: &BigInt| n.magnitude().to_string().len() as i64;
    let mut e = digits(a.numer()) - digits(a.denom());
    while &pow10(e) > a {
        e -= 1;
    }
    while &pow10(e + 1) <= a {
        e += 1;
    }
    e
}

/// Rounds to the nearest integer, ties to even.
pub fn round_half_even(x: &BigRational) -> BigInt {
    let floor = x.floor().to_integer();
    let frac = x - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if frac > half || (frac == half && floor.is_odd()) {
        floor + 1
    } else {
        floor
    }
}

/// Renders `r` with `sig_digits` significant digits, rounding the exact value
/// half-to-even. Trailing zeros are dropped. Scientific notation (`5.3E-24`)
/// is used when the decimal exponent is below -4 or at least `sig_digits`.
pub fn rat_to_decimal(r: &BigRational, sig_digits: usize) -> String {
    assert!(sig_digits >= 1, "sig_digits must be at least 1");
    if r.is_zero() {
        return "0".to_string();
    }
    let a = r.abs();
    let mut exp = decimal_exponent(&a);
    let scaled = &a * pow10(sig_digits as i64 - 1 - exp);
    let mut q = round_half_even(&scaled);
    let limit = num_traits::pow(BigInt::from(10u32), sig_digits);
    if q >= limit {
        q /= 10;
        exp += 1;
    }
    let digits = q.to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    format!(
        "{sign}{}",
        layout_digits(&digits, exp, exp < -4 || exp >= sig_digits as i64, false)
    )
}

/// Places a digit string `d0 d1 d2 ...` (value `d0.d1d2... × 10^exp`).
/// `min_frac` forces at least one fractional digit, as in `1.0` or `1.0E-5`.
fn layout_digits(digits: &str, exp: i64, scientific: bool, min_frac: bool) -> String {
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    if scientific {
        let (head, tail) = digits.split_at(1);
        let tail = if tail.is_empty() && min_frac {
            "0"
        } else {
            tail
        };
        if tail.is_empty() {
            format!("{head}E{exp}")
        } else {
            format!("{head}.{tail}E{exp}")
        }
    } else if exp >= 0 {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            let zeros = "0".repeat(int_len - digits.len());
            if min_frac {
                format!("{digits}{zeros}.0")
            } else {
                format!("{digits}{zeros}")
            }
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    }
}

/// Nearest `f64` to `r`, ties to even. Exact for every normal-range result.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.is_negative();
    let n = r.numer().magnitude().clone();
    let d = r.denom().magnitude().clone();

    // Pick a binary shift so the truncated quotient has exactly 53 bits.
    let mut shift: i64 = 53 - (n.bits() as i64 - d.bits() as i64);
    let (mut q, rem_is, divisor) = loop {
        let (num, den) = if shift >= 0 {
            (&n << shift as usize, d.clone())
        } else {
            (n.clone(), &d << (-shift) as usize)
        };
        let (q, rem) = num.div_rem(&den);
        match q.bits() {
            54.. => shift -= 1,
            53 => break (q, rem, den),
            _ => shift += 1,
        }
    };
    let twice = &rem_is << 1usize;
    if twice > divisor || (twice == divisor && q.bit(0)) {
        q += 1u32;
        if q.bits() == 54 {
            q >>= 1usize;
            shift -= 1;
        }
    }
    let mantissa = q.to_u64().expect("53-bit mantissa") as f64;
    let value = scale_by_pow2(mantissa, -shift);
    if negative {
        -value
    } else {
        value
    }
}

fn scale_by_pow2(mut x: f64, mut exp: i64) -> f64 {
    while exp > 1000 {
        x *= 2f64.powi(1000);
        exp -= 1000;
    }
    while exp < -1000 {
        x *= 2f64.powi(-1000);
        exp += 1000;
    }
    x * 2f64.powi(exp as i32)
}

/// Shortest round-trip rendering of an `f64`, laid out the way the JVM prints
/// doubles: plain notation for magnitudes in `[1e-3, 1e7)`, otherwise
/// `d.dddE<exp>`, always with at least one fractional digit.
pub fn f64_to_display(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("`{:e}` always has an exponent");
    let exp: i64 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let scientific = !(-3..7).contains(&exp);
    let sign = if x < 0.0 { "-" } else { "" };
    format!("{sign}{}", layout_digits(&digits, exp, scientific, true))
}

/// `rat_to_f64` followed by [`f64_to_display`]: the double-precision
/// approximation a program working in `f64` would print.
pub fn rat_to_double_string(r: &BigRational) -> String {
    f64_to_display(rat_to_f64(r))
}

/// Univariate polynomial with rational coefficients; index `k` holds the
/// coefficient of `t^k`. Trailing zeros are always trimmed, so the zero
/// polynomial has no coefficients and no degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RationalPolynomial::default()
    }

    pub fn constant(c: BigRational) -> Self {
        RationalPolynomial::new(vec![c])
    }

    pub fn one() -> Self {
        RationalPolynomial::constant(BigRational::one())
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// The antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        if self.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigRational::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / BigInt::from(k + 1)),
        );
        RationalPolynomial::new(coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    /// Value at `t = 1`, which is just the coefficient sum.
    pub fn eval_at_one(&self) -> BigRational {
        self.coeffs.iter().sum()
    }

    /// `∫_0^1 p(t) dt`.
    pub fn integrate_unit(&self) -> BigRational {
        self.antiderivative().eval_at_one()
    }
}

impl From<Vec<BigRational>> for RationalPolynomial {
    fn from(coeffs: Vec<BigRational>) -> Self {
        RationalPolynomial::new(coeffs)
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn add(self, rhs: Self) -> RationalPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigRational::zero();
        let coeffs = (0..len)
            .map(|k| self.coeffs.get(k).unwrap_or(&zero) + rhs.coeffs.get(k).unwrap_or(&zero))
            .collect();
        RationalPolynomial::new(coeffs)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn neg(self) -> RationalPolynomial {
        RationalPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn sub(self, rhs: Self) -> RationalPolynomial {
        self + &(-rhs)
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let sign = if c.numer().sign() == Sign::Minus {
                "-"
            } else {
                "+"
            };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let c = c.abs();
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·t")?,
                _ => write!(f, "{c}·t^{k}")?,
            }
        }
        Ok(())
    }
}
