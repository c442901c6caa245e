//! Local extrema of numeric streams and the distances between them.
//!
//! Detection is single pass over a three-value window. Positions are 1-based,
//! and the first and last elements of a stream are never extrema. Distances
//! are always between consecutive extrema of the same kind.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtremumKind {
    Maxima,
    Minima,
}

/// What to do when neighbouring values compare equal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TiePolicy {
    #[default]
    Error,
    /// A tied triple yields no extremum at its centre.
    Skip,
}

#[derive(Clone, Debug)]
pub struct ExtremaDetector {
    kind: ExtremumKind,
    ties: TiePolicy,
    offset: usize,
    seen: usize,
    window: [f64; 2],
}

impl ExtremaDetector {
    pub fn new(kind: ExtremumKind, ties: TiePolicy) -> Self {
        Self::with_offset(kind, ties, 0)
    }

    /// Reported positions are shifted by `offset`, for detectors that start
    /// part-way into a longer stream.
    pub fn with_offset(kind: ExtremumKind, ties: TiePolicy, offset: usize) -> Self {
        ExtremaDetector {
            kind,
            ties,
            offset,
            seen: 0,
            window: [0.0; 2],
        }
    }

    pub fn values_seen(&self) -> usize {
        self.seen
    }

    /// Feeds one value. Returns the position of the previous value when it
    /// turns out to be an extremum.
    pub fn push(&mut self, x: f64) -> Result<Option<usize>> {
        let position = self.offset + self.seen + 1;
        if !x.is_finite() {
            return Err(Error::NonFinite { position });
        }
        let [left, mid] = self.window;
        let found = if self.seen >= 2 {
            let centre = position - 1;
            if left == mid || mid == x {
                match self.ties {
                    TiePolicy::Error => return Err(Error::Tie { position: centre }),
                    TiePolicy::Skip => None,
                }
            } else {
                let hit = match self.kind {
                    ExtremumKind::Maxima => left < mid && mid > x,
                    ExtremumKind::Minima => left > mid && mid < x,
                };
                hit.then_some(centre)
            }
        } else {
            None
        };
        self.window = [mid, x];
        self.seen += 1;
        Ok(found)
    }
}

pub fn detect_extrema(stream: &[f64], kind: ExtremumKind, ties: TiePolicy) -> Result<Vec<usize>> {
    let mut detector = ExtremaDetector::new(kind, ties);
    let mut positions = Vec::new();
    for &x in stream {
        positions.extend(detector.push(x)?);
    }
    Ok(positions)
}

/// Consecutive differences of strictly increasing positions.
pub fn distances(positions: &[usize]) -> Result<Vec<u64>> {
    positions
        .windows(2)
        .map(|w| {
            if w[1] > w[0] {
                Ok((w[1] - w[0]) as u64)
            } else {
                Err(Error::NonMonotonePositions {
                    previous: w[0],
                    position: w[1],
                })
            }
        })
        .collect()
}

/// Counts of distances between consecutive extrema of one chain.
///
/// When `n_extrema >= 1`, the counts sum to `n_extrema - 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistanceHistogram {
    counts: BTreeMap<u64, u64>,
    n_extrema: u64,
    n_values: u64,
}

impl DistanceHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a histogram directly from `(distance, count)` pairs, as when
    /// re-reading a published frequency table.
    pub fn from_counts(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut hist = DistanceHistogram::new();
        for (d, c) in pairs {
            if d < 2 {
                return Err(Error::ImpossibleDistance(d));
            }
            if c > 0 {
                *hist.counts.entry(d).or_default() += c;
            }
        }
        let total = hist.total();
        hist.n_extrema = if total > 0 { total + 1 } else { 0 };
        Ok(hist)
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn count(&self, d: u64) -> u64 {
        self.counts.get(&d).copied().unwrap_or(0)
    }

    /// Number of recorded distances.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn n_extrema(&self) -> u64 {
        self.n_extrema
    }

    pub fn n_values(&self) -> u64 {
        self.n_values
    }

    pub fn max_distance(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Appends distances that continue this histogram's chain.
    pub fn accumulate(&mut self, ds: &[u64]) -> Result<()> {
        if let Some(&bad) = ds.iter().find(|&&d| d < 2) {
            return Err(Error::ImpossibleDistance(bad));
        }
        if ds.is_empty() {
            return Ok(());
        }
        for &d in ds {
            *self.counts.entry(d).or_default() += 1;
        }
        self.n_extrema = self.n_extrema.max(1) + ds.len() as u64;
        Ok(())
    }

    /// Merging two histograms gives the histogram of the concatenated
    /// distance lists. Associative and commutative.
    pub fn merge(&mut self, other: &DistanceHistogram) {
        for (&d, &c) in &other.counts {
            *self.counts.entry(d).or_default() += c;
        }
        let total = self.total();
        self.n_extrema = if total > 0 {
            total + 1
        } else {
            self.n_extrema.max(other.n_extrema)
        };
        self.n_values += other.n_values;
    }

    fn record_first_extremum(&mut self) {
        self.n_extrema = self.n_extrema.max(1);
    }
}

/// Streaming extremum detection feeding a distance histogram.
#[derive(Clone, Debug)]
pub struct StreamAnalyzer {
    detector: ExtremaDetector,
    last: Option<usize>,
    hist: DistanceHistogram,
}

impl StreamAnalyzer {
    pub fn new(kind: ExtremumKind, ties: TiePolicy) -> Self {
        StreamAnalyzer {
            detector: ExtremaDetector::new(kind, ties),
            last: None,
            hist: DistanceHistogram::new(),
        }
    }

    /// Returns `true` when the value completed an extremum.
    pub fn push(&mut self, x: f64) -> Result<bool> {
        let found = self.detector.push(x)?;
        self.hist.n_values += 1;
        let Some(position) = found else {
            return Ok(false);
        };
        match self.last {
            Some(prev) => self.hist.accumulate(&[(position - prev) as u64])?,
            None => self.hist.record_first_extremum(),
        }
        self.last = Some(position);
        Ok(true)
    }

    pub fn extend(&mut self, values: impl IntoIterator<Item = f64>) -> Result<()> {
        values
            .into_iter()
            .try_for_each(|x| self.push(x).map(|_| ()))
    }

    pub fn n_extrema(&self) -> u64 {
        self.hist.n_extrema
    }

    pub fn histogram(&self) -> &DistanceHistogram {
        &self.hist
    }

    /// The trailing extremum has no successor and contributes no distance.
    pub fn finish(self) -> DistanceHistogram {
        self.hist
    }
}

pub fn histogram_of(
    values: impl IntoIterator<Item = f64>,
    kind: ExtremumKind,
    ties: TiePolicy,
) -> Result<DistanceHistogram> {
    let mut analyzer = StreamAnalyzer::new(kind, ties);
    analyzer.extend(values)?;
    Ok(analyzer.finish())
}

/// Per-chunk partial result; chunks join through their boundary extrema.
struct ChunkSummary {
    first: Option<usize>,
    last: Option<usize>,
    hist: DistanceHistogram,
}

impl ChunkSummary {
    fn join(mut self, next: ChunkSummary) -> Result<ChunkSummary> {
        self.hist.merge(&next.hist);
        if let (Some(last), Some(first)) = (self.last, next.first) {
            self.hist.accumulate(&[(first - last) as u64])?;
        }
        let total = self.hist.total();
        let any = self.first.or(next.first).is_some();
        self.hist.n_extrema = if total > 0 { total + 1 } else { u64::from(any) };
        Ok(ChunkSummary {
            first: self.first.or(next.first),
            last: next.last.or(self.last),
            hist: self.hist,
        })
    }
}

/// Same result as [`histogram_of`], computed over chunks of `chunk_len`
/// candidate centres in parallel. Each chunk reads one extra value on either
/// side so that every centre is examined exactly once.
pub fn histogram_chunked(
    values: &[f64],
    kind: ExtremumKind,
    ties: TiePolicy,
    chunk_len: usize,
) -> Result<DistanceHistogram> {
    let chunk_len = chunk_len.max(1);
    let len = values.len();
    if len < 3 {
        let mut hist = histogram_of(values.iter().copied(), kind, ties)?;
        hist.n_values = len as u64;
        return Ok(hist);
    }
    // 0-based centres 1..len-1
    let starts: Vec<usize> = (1..len - 1).step_by(chunk_len).collect();
    let parts: Vec<Result<ChunkSummary>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk_len).min(len - 1);
            let mut detector = ExtremaDetector::with_offset(kind, ties, start - 1);
            let mut summary = ChunkSummary {
                first: None,
                last: None,
                hist: DistanceHistogram::new(),
            };
            for &x in &values[start - 1..=end] {
                if let Some(position) = detector.push(x)? {
                    match summary.last {
                        Some(prev) => summary.hist.accumulate(&[(position - prev) as u64])?,
                        None => {
                            summary.first = Some(position);
                            summary.hist.record_first_extremum();
                        }
                    }
                    summary.last = Some(position);
                }
            }
            Ok(summary)
        })
        .collect();

    let mut joined: Option<ChunkSummary> = None;
    for part in parts {
        let part = part?;
        joined = Some(match joined {
            None => part,
            Some(acc) => acc.join(part)?,
        });
    }
    let mut hist = joined.map(|s| s.hist).unwrap_or_default();
    hist.n_values = len as u64;
    Ok(hist)
}

/// Mean and sample standard deviation of the recorded distances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleSummary {
    pub mean: f64,
    pub std_dev: f64,
    pub n: u64,
}

pub fn summarize(hist: &DistanceHistogram) -> Result<SampleSummary> {
    let n = hist.total();
    if n == 0 {
        return Err(Error::EmptyHistogram);
    }
    let (sum, sum_sq) = hist
        .counts
        .iter()
        .fold((0u128, 0u128), |(s, s2), (&d, &c)| {
            let (d, c) = (d as u128, c as u128);
            (s + d * c, s2 + d * d * c)
        });
    let mean = sum as f64 / n as f64;
    let std_dev = if n > 1 {
        // integer sums keep the centred second moment exact up to the final division
        let centred = sum_sq as f64 - (sum as f64) * (sum as f64) / n as f64;
        (centred.max(0.0) / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(SampleSummary { mean, std_dev, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The 20-value spreadsheet sample with its printed U/D annotations.
    const SAMPLE: [f64; 20] = [
        0.935536495,
        0.191531578,
        0.429049655,
        0.308968021,
        0.179540986,
        0.401329789,
        0.71581906,
        0.604617962,
        0.877254876,
        0.973280207,
        0.489033299,
        0.912367351,
        0.604552972,
        0.039395302,
        0.3780448,
        0.55317569,
        0.6308772,
        0.373163479,
        0.812434426,
        0.560173882,
    ];

    #[test]
    fn sample_sequence_maxima() {
        let max = detect_extrema(&SAMPLE, ExtremumKind::Maxima, TiePolicy::Error).unwrap();
        assert_eq!(max, [3, 7, 10, 12, 17, 19]);
        assert_eq!(distances(&max).unwrap(), [4, 3, 2, 5, 2]);
        let min = detect_extrema(&SAMPLE, ExtremumKind::Minima, TiePolicy::Error).unwrap();
        assert_eq!(min, [2, 5, 8, 11, 14, 18]);
    }

    #[test]
    fn trivial_streams() {
        let max = |s: &[f64]| detect_extrema(s, ExtremumKind::Maxima, TiePolicy::Error).unwrap();
        assert!(max(&[1.0, 2.0, 3.0, 4.0]).is_empty());
        assert_eq!(max(&[0.0, 1.0, 0.0]), [2]);
        assert!(max(&[]).is_empty());
        assert!(max(&[5.0, 1.0]).is_empty());
    }

    #[test]
    fn ties() {
        let s = [0.0, 1.0, 1.0, 0.0, 2.0, 0.5];
        let err = detect_extrema(&s, ExtremumKind::Maxima, TiePolicy::Error).unwrap_err();
        assert!(matches!(err, Error::Tie { position: 2 }), "{err:?}");
        let skipped = detect_extrema(&s, ExtremumKind::Maxima, TiePolicy::Skip).unwrap();
        assert_eq!(skipped, [5]);
        let err = detect_extrema(&[0.0, f64::NAN], ExtremumKind::Maxima, TiePolicy::Error);
        assert!(matches!(err, Err(Error::NonFinite { position: 2 })));
    }

    #[test]
    fn distance_examples() {
        assert!(distances(&[5]).unwrap().is_empty());
        assert_eq!(distances(&[2, 4]).unwrap(), [2]);
        assert!(matches!(
            distances(&[4, 4]),
            Err(Error::NonMonotonePositions {
                previous: 4,
                position: 4
            })
        ));
    }

    #[test]
    fn accumulate_examples() {
        let mut h = DistanceHistogram::new();
        h.accumulate(&[4, 3, 2, 5, 2]).unwrap();
        let want: BTreeMap<u64, u64> = [(2, 2), (3, 1), (4, 1), (5, 1)].into();
        assert_eq!(h.counts(), &want);
        assert_eq!(h.n_extrema(), 6);

        let mut empty = DistanceHistogram::new();
        empty.accumulate(&[]).unwrap();
        assert_eq!(empty, DistanceHistogram::new());

        assert!(matches!(
            h.accumulate(&[3, 1]),
            Err(Error::ImpossibleDistance(1))
        ));
        assert_eq!(
            h.total(),
            5,
            "a rejected batch leaves the histogram untouched"
        );
    }

    #[test]
    fn stream_analyzer_drops_trailing_extremum() {
        let h = histogram_of(SAMPLE, ExtremumKind::Maxima, TiePolicy::Error).unwrap();
        assert_eq!(h.n_extrema(), 6);
        assert_eq!(h.total(), 5);
        assert_eq!(h.n_values(), 20);
        assert_eq!(h.max_distance(), Some(5));
    }

    #[test]
    fn summary_examples() {
        let h = DistanceHistogram::from_counts([(2, 2), (3, 1), (4, 1), (5, 1)]).unwrap();
        let s = summarize(&h).unwrap();
        assert!((s.mean - 3.2).abs() < 1e-12);
        assert_eq!(s.n, 5);
        // sample variance of {2,2,3,4,5}: (1.44+1.44+0.04+0.64+3.24)/4 = 1.7
        assert!((s.std_dev - 1.7f64.sqrt()).abs() < 1e-12);

        let flat = DistanceHistogram::from_counts([(3, 1_000_000)]).unwrap();
        let s = summarize(&flat).unwrap();
        assert_eq!((s.mean, s.std_dev), (3.0, 0.0));

        assert!(matches!(
            summarize(&DistanceHistogram::new()),
            Err(Error::EmptyHistogram)
        ));
    }

    #[test]
    fn published_true_random_column_averages() {
        let counts = [39803, 33544, 17119, 6673, 2139, 549, 136, 31, 3, 2, 1];
        let h = DistanceHistogram::from_counts((2..).zip(counts)).unwrap();
        let s = summarize(&h).unwrap();
        assert_eq!(s.n, 100_000);
        assert!((s.mean - 3.00187).abs() < 1e-9);
    }

    fn lcg_stream(seed: u64, len: usize) -> Vec<f64> {
        let mut state = seed;
        (0..len)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect()
    }

    #[test]
    fn chunked_matches_sequential() {
        let values = lcg_stream(7, 5000);
        for kind in [ExtremumKind::Maxima, ExtremumKind::Minima] {
            let seq = histogram_of(values.iter().copied(), kind, TiePolicy::Error).unwrap();
            for chunk in [1, 2, 3, 7, 64, 1000, 4998, 10_000] {
                let par = histogram_chunked(&values, kind, TiePolicy::Error, chunk).unwrap();
                assert_eq!(par, seq, "chunk {chunk}");
            }
        }
    }

    #[test]
    fn chunked_reports_the_same_first_error() {
        let mut values = lcg_stream(3, 300);
        values[150] = values[149];
        values[220] = f64::INFINITY;
        let seq = histogram_of(
            values.iter().copied(),
            ExtremumKind::Maxima,
            TiePolicy::Error,
        )
        .unwrap_err()
        .to_string();
        for chunk in [1, 2, 5, 149, 150] {
            let par = histogram_chunked(&values, ExtremumKind::Maxima, TiePolicy::Error, chunk)
                .unwrap_err()
                .to_string();
            assert_eq!(par, seq, "chunk {chunk}");
        }
    }

    fn distinct_stream() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::hash_set(-1_000_000i64..1_000_000, 0..200)
            .prop_map(|set| {
                set.into_iter()
                    .map(|v| v as f64 / 1000.0)
                    .collect::<Vec<_>>()
            })
            .prop_shuffle()
    }

    proptest! {
        #[test]
        fn minima_are_maxima_of_negation(values in distinct_stream()) {
            let neg: Vec<f64> = values.iter().map(|v| -v).collect();
            prop_assert_eq!(
                detect_extrema(&values, ExtremumKind::Minima, TiePolicy::Error).unwrap(),
                detect_extrema(&neg, ExtremumKind::Maxima, TiePolicy::Error).unwrap()
            );
        }

        #[test]
        fn maxima_and_minima_interleave(values in distinct_stream()) {
            let max = detect_extrema(&values, ExtremumKind::Maxima, TiePolicy::Error).unwrap();
            let min = detect_extrema(&values, ExtremumKind::Minima, TiePolicy::Error).unwrap();
            for w in max.windows(2) {
                let between = min.iter().filter(|&&m| w[0] < m && m < w[1]).count();
                prop_assert_eq!(between, 1);
            }
            for d in distances(&max).unwrap() {
                prop_assert!(d >= 2);
            }
        }

        #[test]
        fn cubing_keeps_positions(values in distinct_stream()) {
            let cubed: Vec<f64> = values.iter().map(|v| v * v * v).collect();
            for kind in [ExtremumKind::Maxima, ExtremumKind::Minima] {
                prop_assert_eq!(
                    detect_extrema(&values, kind, TiePolicy::Error).unwrap(),
                    detect_extrema(&cubed, kind, TiePolicy::Error).unwrap()
                );
            }
        }

        #[test]
        fn merge_is_concatenation(
            a in prop::collection::vec(2u64..20, 0..50),
            b in prop::collection::vec(2u64..20, 0..50),
        ) {
            let mut ha = DistanceHistogram::new();
            ha.accumulate(&a).unwrap();
            let mut hb = DistanceHistogram::new();
            hb.accumulate(&b).unwrap();
            let mut whole = DistanceHistogram::new();
            whole.accumulate(&[a.clone(), b.clone()].concat()).unwrap();
            let mut ab = ha.clone();
            ab.merge(&hb);
            let mut ba = hb.clone();
            ba.merge(&ha);
            prop_assert_eq!(&ab, &whole);
            prop_assert_eq!(&ba, &whole);
        }

        #[test]
        fn chunk_size_invariance(seed in any::<u64>(), len in 0usize..400, chunk in 1usize..64) {
            let values = lcg_stream(seed, len);
            let seq = histogram_of(values.iter().copied(), ExtremumKind::Maxima, TiePolicy::Error).unwrap();
            let par = histogram_chunked(&values, ExtremumKind::Maxima, TiePolicy::Error, chunk).unwrap();
            prop_assert_eq!(par, seq);
        }
    }
}
