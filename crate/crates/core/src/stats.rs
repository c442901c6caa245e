//! Goodness-of-fit of observed distance histograms against the exact law.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{f64_to_display, rat_to_f64, round_half_even, BigRational};
use crate::extrema::{DistanceHistogram, SampleSummary};
use crate::operator::{pmf_closed_form, pmf_table, sigma};
use crate::special::{chi_square_sf, kolmogorov_sf, normal_two_sided_p};

/// Below this many distances the χ² and KS results are flagged as unreliable.
pub const MIN_GOF_SAMPLE: u64 = 100;
/// Smallest sample the CLT mean test accepts.
pub const MIN_Z_SAMPLE: u64 = 1000;
pub const THEORETICAL_MEAN: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestReport {
    pub test_name: String,
    pub statistic: f64,
    /// Degrees of freedom, χ² only.
    pub df: Option<u32>,
    pub p_value: f64,
    pub alpha: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl TestReport {
    fn new(test_name: &str, statistic: f64, df: Option<u32>, p_value: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestReport {
            test_name: test_name.to_string(),
            statistic,
            df,
            p_value,
            alpha,
            verdict: if p_value >= alpha {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub const TSV_HEADER: &'static str = "test\tstatistic\tdf\tp_value\tverdict";

    /// `test, statistic, df, p_value, verdict`, tab separated; `-` for no df.
    pub fn tsv_row(&self) -> String {
        let df = self.df.map_or_else(|| "-".to_string(), |d| d.to_string());
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.test_name,
            f64_to_display(self.statistic),
            df,
            f64_to_display(self.p_value),
            self.verdict
        )
    }
}

/// Human-readable table of reports, notes listed underneath.
pub fn render_reports(reports: &[TestReport]) -> String {
    let mut out = format!(
        "{:<12} {:>14} {:>4} {:>12} {:>8}\n",
        "test", "statistic", "df", "p-value", "verdict"
    );
    for r in reports {
        let df = r.df.map_or_else(|| "-".to_string(), |d| d.to_string());
        out += &format!(
            "{:<12} {:>14.6} {:>4} {:>12.6} {:>8}\n",
            r.test_name, r.statistic, df, r.p_value, r.verdict
        );
    }
    for r in reports {
        for note in &r.notes {
            out += &format!("note ({}): {note}\n", r.test_name);
        }
    }
    out
}

/// Expected counts for bins `2..=max_d` out of `n` distances, with the mass
/// beyond `max_d` folded into the last bin so that they sum to `n` exactly.
pub fn expected_counts(n: u64, max_d: u64) -> Result<Vec<BigRational>> {
    let table = pmf_table(max_d)?;
    let n = BigRational::from_integer(n.into());
    let mut expected: Vec<BigRational> = table.iter().map(|e| &n * &e.probability).collect();
    let below_last = table
        .len()
        .checked_sub(2)
        .map_or_else(BigRational::zero, |i| table[i].cumulative.clone());
    *expected.last_mut().expect("max_d >= 2") = &n * (BigRational::one() - below_last);
    Ok(expected)
}

/// χ² goodness of fit over bins `2..=D`, `D` the largest observed distance.
pub fn chi_square_gof(hist: &DistanceHistogram, alpha: f64) -> Result<TestReport> {
    let n = hist.total();
    let max_d = hist.max_distance().unwrap_or(0);
    let bins = max_d.saturating_sub(1) as usize;
    if bins < 2 {
        return Err(Error::TooFewBins(bins));
    }
    let expected = expected_counts(n, max_d)?;
    let mut statistic = 0.0;
    let mut sparse = Vec::new();
    for (d, e) in (2..=max_d).zip(&expected) {
        let e = rat_to_f64(e);
        let o = hist.count(d) as f64;
        statistic += (o - e) * (o - e) / e;
        if e < 5.0 {
            sparse.push(d);
        }
    }
    let df = (bins - 1) as u32;
    let p = chi_square_sf(statistic, df)?;
    let mut report = TestReport::new("chi-square", statistic, Some(df), p, alpha);
    if n < MIN_GOF_SAMPLE {
        report.notes.push(format!(
            "only {n} distances; fewer than {MIN_GOF_SAMPLE} makes the test unreliable"
        ));
    }
    if !sparse.is_empty() {
        report.notes.push(format!(
            "expected count below 5 at distance(s) {sparse:?}; bins are not pooled"
        ));
    }
    Ok(report)
}

/// `max_d |F_n(d) - F_m(d)|`, exact until the final conversion.
pub fn ks_statistic(hist: &DistanceHistogram) -> Result<f64> {
    let n = hist.total();
    let max_d = hist.max_distance().ok_or(Error::EmptyHistogram)?;
    let n = BigInt::from(n);
    let mut observed = 0u64;
    let mut theoretical = BigRational::zero();
    let mut sup = BigRational::zero();
    for d in 2..=max_d {
        observed += hist.count(d);
        theoretical += pmf_closed_form(d)?;
        let gap = (BigRational::new(observed.into(), n.clone()) - &theoretical).abs();
        if gap > sup {
            sup = gap;
        }
    }
    Ok(rat_to_f64(&sup))
}

/// Kolmogorov–Smirnov test against the discrete law, with the asymptotic
/// Kolmogorov p-value. On a discrete law that p-value is conservative.
pub fn ks_test(hist: &DistanceHistogram, alpha: f64) -> Result<TestReport> {
    let statistic = ks_statistic(hist)?;
    let n = hist.total();
    let p = kolmogorov_sf((n as f64).sqrt() * statistic);
    let mut report = TestReport::new("ks", statistic, None, p, alpha);
    report
        .notes
        .push("asymptotic p-value; conservative for a discrete distribution".into());
    if n < MIN_GOF_SAMPLE {
        report.notes.push(format!(
            "only {n} distances; fewer than {MIN_GOF_SAMPLE} makes the test unreliable"
        ));
    }
    Ok(report)
}

/// Two-sided z-test of the sample mean distance against 3, using the
/// population σ of the exact law.
pub fn mean_z_test(summary: &SampleSummary, alpha: f64) -> Result<TestReport> {
    if summary.n < MIN_Z_SAMPLE {
        return Err(Error::SampleTooSmall {
            n: summary.n,
            min: MIN_Z_SAMPLE,
        });
    }
    let z = (summary.mean - THEORETICAL_MEAN) / standard_error(summary.n);
    Ok(TestReport::new(
        "mean-z",
        z,
        None,
        normal_two_sided_p(z),
        alpha,
    ))
}

/// `σ / √n`.
pub fn standard_error(n: u64) -> f64 {
    sigma() / (n as f64).sqrt()
}

/// One row of the observed-versus-theoretical frequency layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyRow {
    pub d: u64,
    /// `n · f_m(d)` rounded half to even.
    pub theoretical: u64,
    pub observed: u64,
}

pub fn frequency_table(hist: &DistanceHistogram) -> Result<Vec<FrequencyRow>> {
    let n = BigRational::from_integer(hist.total().into());
    let Some(max_d) = hist.max_distance() else {
        return Ok(Vec::new());
    };
    pmf_table(max_d)?
        .into_iter()
        .map(|e| {
            let expected = round_half_even(&(&n * &e.probability));
            Ok(FrequencyRow {
                d: e.d,
                theoretical: expected.to_u64().expect("bounded by n"),
                observed: hist.count(e.d),
            })
        })
        .collect()
}
