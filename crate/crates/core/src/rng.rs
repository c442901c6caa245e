//! Linear congruential generators as pure state transitions, and ingestion of
//! externally produced random data.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const RANDU_MULTIPLIER: u64 = 65539;
pub const RANDU_MODULUS: u64 = 1 << 31;

pub const LCG48_MULTIPLIER: u64 = 0x5_DEEC_E66D;
pub const LCG48_INCREMENT: u64 = 0xB;
pub const LCG48_MASK: u64 = (1 << 48) - 1;

/// One RANDU step: `65539 · state mod 2^31`, scaled into (0, 1).
pub fn randu_next(state: u64) -> Result<(u64, f64)> {
    if state == 0 {
        return Err(Error::InvalidState {
            state,
            reason: "zero is a fixed point of RANDU",
        });
    }
    if state >= RANDU_MODULUS {
        return Err(Error::InvalidState {
            state,
            reason: "RANDU state must be below 2^31",
        });
    }
    let next = RANDU_MULTIPLIER * state % RANDU_MODULUS;
    Ok((next, next as f64 / RANDU_MODULUS as f64))
}

#[inline]
fn lcg48_step(state: u64) -> u64 {
    LCG48_MULTIPLIER
        .wrapping_mul(state)
        .wrapping_add(LCG48_INCREMENT)
        & LCG48_MASK
}

/// Two steps of the 48-bit LCG, combined into one 53-bit fraction: the top 26
/// bits of the first new state followed by the top 27 bits of the second.
/// Returns the second state. Bits of `state` above 48 are ignored.
pub fn lcg48_next(state: u64) -> (u64, f64) {
    let first = lcg48_step(state & LCG48_MASK);
    let second = lcg48_step(first);
    let bits = ((first >> 22) << 27) + (second >> 21);
    (second, bits as f64 / (1u64 << 53) as f64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorFamily {
    Randu,
    Lcg48,
    /// `state' = (multiplier · state + increment) mod modulus`, output
    /// `state' / modulus`.
    Lcg {
        multiplier: u64,
        increment: u64,
        modulus: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: GeneratorFamily,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn randu(seed: u64) -> Self {
        GeneratorSpec {
            family: GeneratorFamily::Randu,
            seed,
        }
    }

    pub fn lcg48(seed: u64) -> Self {
        GeneratorSpec {
            family: GeneratorFamily::Lcg48,
            seed,
        }
    }

    pub fn modulus(&self) -> u128 {
        match self.family {
            GeneratorFamily::Randu => RANDU_MODULUS as u128,
            GeneratorFamily::Lcg48 => 1 << 48,
            GeneratorFamily::Lcg { modulus, .. } => modulus as u128,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let GeneratorFamily::Lcg { modulus, .. } = self.family {
            if modulus < 2 {
                return Err(Error::InvalidArgument(format!(
                    "LCG modulus must be at least 2, got {modulus}"
                )));
            }
        }
        if self.seed as u128 >= self.modulus() {
            return Err(Error::InvalidState {
                state: self.seed,
                reason: "seed must be below the modulus",
            });
        }
        if self.family == GeneratorFamily::Randu && self.seed == 0 {
            return Err(Error::InvalidState {
                state: 0,
                reason: "zero is a fixed point of RANDU",
            });
        }
        Ok(())
    }

    pub fn stream(&self) -> Result<Generator> {
        self.validate()?;
        Ok(Generator {
            family: self.family.clone(),
            state: self.seed,
        })
    }
}

/// Infinite stream of uniforms from a validated [`GeneratorSpec`].
#[derive(Clone, Debug)]
pub struct Generator {
    family: GeneratorFamily,
    state: u64,
}

impl Generator {
    pub fn state(&self) -> u64 {
        self.state
    }
}

impl Iterator for Generator {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let (state, value) = match self.family {
            GeneratorFamily::Randu => {
                let next = RANDU_MULTIPLIER * self.state % RANDU_MODULUS;
                (next, next as f64 / RANDU_MODULUS as f64)
            }
            GeneratorFamily::Lcg48 => lcg48_next(self.state),
            GeneratorFamily::Lcg {
                multiplier,
                increment,
                modulus,
            } => {
                let next = ((multiplier as u128 * self.state as u128 + increment as u128)
                    % modulus as u128) as u64;
                (next, next as f64 / modulus as f64)
            }
        };
        self.state = state;
        Some(value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// One decimal number per line.
    FloatsText,
    /// Big-endian 32-bit unsigned words, each mapped to `word / 2^32`.
    U32BeBinary,
}

pub fn ingest_file(path: impl AsRef<Path>, format: InputFormat) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    ingest_bytes(&bytes, format, path)
}

/// Parses an in-memory file image; `path` only labels errors.
pub fn ingest_bytes(bytes: &[u8], format: InputFormat, path: &Path) -> Result<Vec<f64>> {
    if bytes.is_empty() {
        return Err(Error::EmptyFile(path.to_owned()));
    }
    match format {
        InputFormat::FloatsText => {
            let text = String::from_utf8_lossy(bytes);
            text.lines()
                .enumerate()
                .map(|(i, line)| {
                    line.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::MalformedLine {
                            path: path.to_owned(),
                            line: i + 1,
                            text: line.to_string(),
                        })
                })
                .collect()
        }
        InputFormat::U32BeBinary => {
            let whole = bytes.len() / 4 * 4;
            if whole != bytes.len() {
                return Err(Error::TruncatedWord {
                    path: path.to_owned(),
                    offset: whole,
                    len: bytes.len() - whole,
                });
            }
            Ok(bytes
                .chunks_exact(4)
                .map(|w| u32::from_be_bytes([w[0], w[1], w[2], w[3]]) as f64 / 4_294_967_296.0)
                .collect())
        }
    }
}

/// Inverse of the binary ingestion for values of the form `k / 2^32`.
pub fn encode_u32_be(values: &[f64]) -> Vec<u8> {
    values
        .iter()
        .flat_map(|v| ((v * 4_294_967_296.0) as u32).to_be_bytes())
        .collect()
}
