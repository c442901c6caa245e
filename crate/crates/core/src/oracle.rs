//! Brute-force permutation counts. Deliberately naive: nothing here shares code
//! with the polynomial engine, so agreement between the two is a real check.

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::BigRational;
use crate::operator::{OperatorWord, Step};

/// Longest word the enumerator accepts: 13 elements, 13! orderings at worst.
pub const MAX_ORACLE_WORD: usize = 12;

struct Search<'a> {
    steps: &'a [Step],
    n: usize,
}

impl Search<'_> {
    /// Extends a prefix ending in `last`, with `used` as a bitmask over the
    /// values `0..n`, and counts completions that keep following the word.
    fn count(&self, depth: usize, last: usize, used: u32) -> u64 {
        if depth == self.n {
            return 1;
        }
        let step = self.steps[depth - 1];
        let candidates = match step {
            Step::Up => last + 1..self.n,
            Step::Down => 0..last,
        };
        candidates
            .filter(|v| used & (1 << v) == 0)
            .map(|v| self.count(depth + 1, v, used | 1 << v))
            .sum()
    }
}

/// Number of orderings of `len(word) + 1` distinct values whose consecutive
/// comparisons spell `word`.
pub fn count_pattern_perms(word: &OperatorWord) -> Result<BigUint> {
    if word.len() > MAX_ORACLE_WORD {
        return Err(Error::WordTooLong {
            len: word.len(),
            max: MAX_ORACLE_WORD,
        });
    }
    let search = Search {
        steps: word.steps(),
        n: word.len() + 1,
    };
    let total: u64 = (0..search.n)
        .into_par_iter()
        .map(|first| search.count(1, first, 1 << first))
        .sum();
    Ok(BigUint::from(total))
}

fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// `count / (len + 1)!`, the pattern probability by enumeration.
pub fn pattern_probability(word: &OperatorWord) -> Result<BigRational> {
    let count = count_pattern_perms(word)?;
    Ok(BigRational::new(
        BigInt::from(count),
        BigInt::from(factorial(word.len() + 1)),
    ))
}

/// Fraction of triplet orderings with the middle element largest.
pub fn oracle_pmax() -> BigRational {
    pattern_probability(&OperatorWord::new(vec![Step::Up, Step::Down])).expect("short word")
}

/// Distance PMF at `d` by counting orderings of `d + 3` values.
pub fn oracle_pmf(d: u64) -> Result<BigRational> {
    if !(2..=8).contains(&d) {
        return Err(Error::OracleRange(d));
    }
    let d = d as usize;
    let mut joint = BigRational::default();
    for j in 1..d {
        let text = format!("U{}{}D", "D".repeat(j), "U".repeat(d - j));
        joint += pattern_probability(&text.parse()?)?;
    }
    Ok(joint / oracle_pmax())
}
