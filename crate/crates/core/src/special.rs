//! Special functions behind the test p-values.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 1_000_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let t = x + LANCZOS_G + 0.5;
        let series = LANCZOS[1..]
            .iter()
            .enumerate()
            .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
    }
}

fn lower_series(a: f64, x: f64) -> Result<f64> {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITERATIONS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum * (-x + a * x.ln() - ln_gamma(a)).exp());
        }
    }
    Err(Error::NoConvergence {
        what: "incomplete gamma series",
        iterations: MAX_ITERATIONS,
    })
}

/// Modified Lentz evaluation of the continued fraction for `Q(a, x)`.
fn upper_fraction(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITERATIONS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(h * (-x + a * x.ln() - ln_gamma(a)).exp());
        }
    }
    Err(Error::NoConvergence {
        what: "incomplete gamma continued fraction",
        iterations: MAX_ITERATIONS,
    })
}

fn check_gamma_args(a: f64, x: f64) -> Result<()> {
    if a.is_nan() || a <= 0.0 || !a.is_finite() || x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "incomplete gamma needs a > 0 and x >= 0, got a = {a}, x = {x}"
        )));
    }
    Ok(())
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        Ok(0.0)
    } else if x.is_infinite() {
        Ok(1.0)
    } else if x < a + 1.0 {
        lower_series(a, x)
    } else {
        Ok(1.0 - upper_fraction(a, x)?)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        Ok(1.0)
    } else if x.is_infinite() {
        Ok(0.0)
    } else if x < a + 1.0 {
        Ok(1.0 - lower_series(a, x)?)
    } else {
        upper_fraction(a, x)
    }
}

/// Upper tail of the χ² distribution with `df` degrees of freedom.
pub fn chi_square_sf(x: f64, df: u32) -> Result<f64> {
    if df < 1 {
        return Err(Error::InvalidArgument("chi-square needs df >= 1".into()));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "chi-square statistic must be non-negative, got {x}"
        )));
    }
    gamma_q(df as f64 / 2.0, x / 2.0)
}

/// Complementary error function, through `erfc(x) = Q(1/2, x²)`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let q = gamma_q(0.5, x * x).expect("valid arguments always converge");
    if x >= 0.0 {
        q
    } else {
        2.0 - q
    }
}

/// `Pr(|Z| > |z|)` for a standard normal `Z`.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Survival function of the Kolmogorov distribution, `Pr(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series, fast for small lambda
        let k = -PI * PI / (8.0 * lambda * lambda);
        let sum: f64 = (1..=20)
            .map(|j| {
                let m = (2 * j - 1) as f64;
                (k * m * m).exp()
            })
            .sum();
        1.0 - (2.0 * PI).sqrt() / lambda * sum
    } else {
        let s: f64 = (1..=100)
            .map(|j| {
                let j = j as f64;
                let sign = if j as u64 % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * j * j * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}
