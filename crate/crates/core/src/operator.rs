//! Up/down operator words and the exact distance law built from them.
//!
//! A word over `{U, D}` of length `k` describes the relative order of `k + 1`
//! consecutive values: `U` for a strict rise, `D` for a strict fall. Its
//! probability under i.i.d. continuous inputs is an iterated integral over the
//! CDF-transformed values, which [`eval_word`] evaluates exactly with a single
//! polynomial accumulator.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{BigRational, RationalPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Up,
    Down,
}

impl Step {
    pub fn flip(self) -> Step {
        match self {
            Step::Up => Step::Down,
            Step::Down => Step::Up,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Step::Up => 'U',
            Step::Down => 'D',
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OperatorWord(Vec<Step>);

impl OperatorWord {
    pub fn new(steps: Vec<Step>) -> Self {
        OperatorWord(steps)
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The same pattern read backwards in time: reverse, then swap `U` and `D`.
    pub fn time_reversed(&self) -> OperatorWord {
        OperatorWord(self.0.iter().rev().map(|s| s.flip()).collect())
    }

    /// `U D^j U^(d-j) D`.
    fn peak_to_peak(descent: usize, distance: usize) -> OperatorWord {
        let mut steps = Vec::with_capacity(distance + 2);
        steps.push(Step::Up);
        steps.extend(std::iter::repeat_n(Step::Down, descent));
        steps.extend(std::iter::repeat_n(Step::Up, distance - descent));
        steps.push(Step::Down);
        OperatorWord(steps)
    }
}

impl FromStr for OperatorWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(offset, letter)| match letter {
                'U' => Ok(Step::Up),
                'D' => Ok(Step::Down),
                _ => Err(Error::InvalidLetter { letter, offset }),
            })
            .collect::<Result<Vec<_>>>()
            .map(OperatorWord)
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.letter()))
    }
}

/// Conditional density left after absorbing `word` right to left, starting from
/// the constant 1. The result is a polynomial in the running value `t` of the
/// leftmost element, of degree exactly `word.len()`.
pub fn word_density(word: &OperatorWord) -> RationalPolynomial {
    word.steps()
        .iter()
        .rev()
        .fold(RationalPolynomial::one(), |density, step| {
            let primitive = density.antiderivative();
            match step {
                // next value below t: ∫_0^t
                Step::Down => primitive,
                // next value above t: ∫_t^1
                Step::Up => &RationalPolynomial::constant(primitive.eval_at_one()) - &primitive,
            }
        })
}

/// Probability that `word.len() + 1` i.i.d. continuous values follow `word`.
pub fn eval_word(word: &OperatorWord) -> Result<BigRational> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(word_density(word).integrate_unit())
}

/// Probability that an interior element is a local maximum, from `⟨UD⟩`.
pub fn p_max() -> BigRational {
    let ud = OperatorWord::new(vec![Step::Up, Step::Down]);
    let p = eval_word(&ud).expect("UD is nonempty");
    debug_assert_eq!(p, BigRational::new(1.into(), 3.into()));
    p
}

fn check_distance(d: u64) -> Result<usize> {
    if d < 2 {
        return Err(Error::DistanceOutOfDomain(d));
    }
    usize::try_from(d).map_err(|_| Error::DistanceOutOfDomain(d))
}

/// The `d - 1` words `U D^j U^(d-j) D`, `j = 1..d-1`, whose union is the event
/// "a maximum followed by the next maximum exactly `d` steps later".
pub fn words_for_distance(d: u64) -> Result<Vec<OperatorWord>> {
    let d = check_distance(d)?;
    Ok((1..d).map(|j| OperatorWord::peak_to_peak(j, d)).collect())
}

/// `f_m(d)` by evaluating and summing the operator words, conditioned on the
/// first maximum.
pub fn pmf_symbolic(d: u64) -> Result<BigRational> {
    let joint = words_for_distance(d)?
        .iter()
        .map(eval_word)
        .sum::<Result<BigRational>>()?;
    Ok(joint / p_max())
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `f_m(d) = 3 · 2^d · (d-1)(d+2) / (d+3)!`.
pub fn pmf_closed_form(d: u64) -> Result<BigRational> {
    check_distance(d)?;
    let numer = BigInt::from(3) * (BigInt::one() << d as usize) * (d - 1) * (d + 2);
    Ok(BigRational::new(numer, factorial(d + 3)))
}

/// `F_m(d) = Σ_{k=2..d} f_m(k)`.
pub fn cdf(d: u64) -> Result<BigRational> {
    check_distance(d)?;
    (2..=d).map(pmf_closed_form).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PmfEntry {
    pub d: u64,
    pub probability: BigRational,
    pub cumulative: BigRational,
}

/// Rows `2..=d_max` with running cumulative sums.
pub fn pmf_table(d_max: u64) -> Result<Vec<PmfEntry>> {
    check_distance(d_max)?;
    let mut cumulative = BigRational::zero();
    (2..=d_max)
        .map(|d| {
            let probability = pmf_closed_form(d)?;
            cumulative += &probability;
            Ok(PmfEntry {
                d,
                probability,
                cumulative: cumulative.clone(),
            })
        })
        .collect()
}

/// Moments of the law truncated at `d_max`, all exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSummary {
    pub mean_partial: BigRational,
    pub variance_partial: BigRational,
    pub tail_mass: BigRational,
    pub d_max: u64,
}

pub fn moments(d_max: u64) -> Result<MomentSummary> {
    let table = pmf_table(d_max)?;
    let mut mean = BigRational::zero();
    let mut second = BigRational::zero();
    for entry in &table {
        let d = BigRational::from_integer(entry.d.into());
        mean += &d * &entry.probability;
        second += &d * &d * &entry.probability;
    }
    let cumulative = &table.last().expect("d_max >= 2").cumulative;
    Ok(MomentSummary {
        variance_partial: second - &mean * &mean,
        mean_partial: mean,
        tail_mass: BigRational::one() - cumulative,
        d_max,
    })
}

/// Truncation point used wherever a floating-point σ of the distance law is
/// needed; the neglected tail is below 4e-25.
pub const MOMENT_D_MAX: u64 = 29;

/// Standard deviation of the distance law as an `f64`.
pub fn sigma() -> f64 {
    let m = moments(MOMENT_D_MAX).expect("MOMENT_D_MAX >= 2");
    crate::exact::rat_to_f64(&m.variance_partial).sqrt()
}
