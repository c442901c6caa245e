//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use num_traits::{One, Signed};
use peakdist_core::exact::{parse_exact, rat_to_decimal, rat_to_double_string, rat_to_f64};
use peakdist_core::stats::standard_error;
use peakdist_core::{
    cdf, chi_square_gof, chi_square_sf, detect_extrema, eval_word, ks_test, mean_z_test, moments,
    oracle_pmf, pmf_closed_form, pmf_symbolic, summarize, BigRational, DistanceHistogram,
    ExtremumKind, GeneratorSpec, OperatorWord, SampleSummary, Step, StreamAnalyzer, TiePolicy,
};

/// Exact PMF column, d = 2..=29.
const PMF: [&str; 28] = [
    "2/5",
    "1/3",
    "6/35",
    "1/15",
    "4/189",
    "1/175",
    "2/1485",
    "4/14175",
    "4/75075",
    "2/218295",
    "4/2764125",
    "1/4729725",
    "8/278326125",
    "1/273648375",
    "2/4583103525",
    "8/162820783125",
    "4/764299911375",
    "2/3781060408125",
    "4/78642438249375",
    "2/428772250281375",
    "8/19566987612046875",
    "2/58274046742786875",
    "4/1447106344699640625",
    "8/37392513326621578125",
    "8/501914364595623354375",
    "4/3494761822449632109375",
    "8/100847608441898396203125",
    "1/188217886723358757890625",
];

/// Exact CDF column, d = 2..=29.
const CDF: [&str; 28] = [
    "2/5",
    "11/15",
    "19/21",
    "34/35",
    "134/135",
    "4717/4725",
    "5773/5775",
    "31183/31185",
    "184273/184275",
    "4729717/4729725",
    "16372121/16372125",
    "30405374/30405375",
    "241215974/241215975",
    "32564156609/32564156625",
    "36395233873/36395233875",
    "343732764373/343732764375",
    "3419236445623/3419236445625",
    "142924083427117/142924083427125",
    "782679504481871/782679504481875",
    "4482618980214373/4482618980214375",
    "53596531285171873/53596531285171875",
    "5341787618088796859/5341787618088796875",
    "17307391882607701871/17307391882607701875",
    "232984121496642140621/232984121496642140625",
    "3253148659416077296871/3253148659416077296875",
    "188217886723358757890609/188217886723358757890625",
    "1408389014447201740078117/1408389014447201740078125",
    "2722885427931256697484374/2722885427931256697484375",
];

const MC_TARGET_MAXIMA: u64 = 100_000;
const MC_P_FLOOR: f64 = 0.001;
const MC_MEAN_SIGMAS: f64 = 4.0;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let detail = f()?;
    let elapsed = start.elapsed();
    if elapsed > limit {
        return Err(format!("{detail}; took {elapsed:?}, limit {limit:?}"));
    }
    Ok(format!("{detail} in {elapsed:.2?}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden(column: &[&str]) -> Vec<BigRational> {
    column.iter().map(|s| parse_exact(s).unwrap()).collect()
}

fn pmf_reproduction() -> Check {
    timed(Duration::from_secs(1), || {
        for (d, want) in (2..).zip(golden(&PMF)) {
            let got = pmf_closed_form(d).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("d = {d}: {got} != {want}"))?;
        }
        Ok("28 rationals bit-exact".into())
    })
}

fn cdf_reproduction() -> Check {
    timed(Duration::from_secs(1), || {
        for (d, want) in (2..).zip(golden(&CDF)) {
            let got = cdf(d).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("d = {d}: {got} != {want}"))?;
        }
        Ok("28 rationals bit-exact".into())
    })
}

fn symbolic_identity() -> Check {
    timed(Duration::from_secs(30), || {
        for d in 2..=29 {
            let symbolic = pmf_symbolic(d).map_err(|e| e.to_string())?;
            let closed = pmf_closed_form(d).map_err(|e| e.to_string())?;
            ensure(symbolic == closed, || {
                format!("d = {d}: {symbolic} != {closed}")
            })?;
        }
        Ok("d = 2..29 equal".into())
    })
}

fn oracle_equivalence() -> Check {
    timed(Duration::from_secs(60), || {
        for d in 2..=7 {
            let counted = oracle_pmf(d).map_err(|e| e.to_string())?;
            let closed = pmf_closed_form(d).map_err(|e| e.to_string())?;
            ensure(counted == closed, || {
                format!("d = {d}: {counted} != {closed}")
            })?;
        }
        Ok("d = 2..7 equal".into())
    })
}

fn p_max_exact() -> Check {
    let p = eval_word(&OperatorWord::new(vec![Step::Up, Step::Down])).map_err(|e| e.to_string())?;
    ensure(p == BigRational::new(1.into(), 3.into()), || {
        format!("<UD> = {p}")
    })?;
    Ok("<UD> = 1/3".into())
}

fn moment_values() -> Check {
    let m = moments(29).map_err(|e| e.to_string())?;
    let gap = (BigRational::from_integer(3.into()) - &m.mean_partial).abs();
    let bound = parse_exact("1/10000000000000000000000").unwrap();
    ensure(gap < bound, || format!("|mean - 3| = {}", rat_to_f64(&gap)))?;
    let var = rat_to_f64(&m.variance_partial);
    ensure((var - 1.167168).abs() <= 1e-6, || format!("variance {var}"))?;
    let se = standard_error(100_000);
    ensure((se - 0.0034).abs() <= 1e-4, || {
        format!("sigma/sqrt(n) {se}")
    })?;
    Ok(format!(
        "|mean - 3| = {:.3e}, variance = {var:.7}, sigma/sqrt(1e5) = {se:.5}",
        rat_to_f64(&gap)
    ))
}

fn tail_residual() -> Check {
    let residual = BigRational::one() - cdf(29).map_err(|e| e.to_string())?;
    let shown = rat_to_double_string(&residual);
    ensure(shown == "3.6725746509274224E-25", || {
        format!("rendered {shown}")
    })?;
    // the exact 17-digit rounding sits within one unit of the printed digit
    let exact = rat_to_decimal(&residual, 17);
    let printed =
        parse_exact("36725746509274224/100000000000000000000000000000000000000000").unwrap();
    let ulp = parse_exact("1/100000000000000000000000000000000000000000").unwrap();
    ensure((residual - printed).abs() <= ulp, || {
        format!("exact rendering {exact}")
    })?;
    Ok(format!(
        "1 - F(29) = {shown} (exact 17-digit rounding {exact})"
    ))
}

struct McOutcome {
    chi_p: f64,
    ks_p: f64,
    mean_dev: f64,
    limit: f64,
}

impl McOutcome {
    fn passed(&self) -> bool {
        self.chi_p > MC_P_FLOOR && self.ks_p > MC_P_FLOOR && self.mean_dev < self.limit
    }

    fn describe(&self) -> String {
        format!(
            "chi2 p = {:.4}, KS p = {:.4}, |mean - 3| = {:.5} (< {:.5})",
            self.chi_p, self.ks_p, self.mean_dev, self.limit
        )
    }
}

fn run_until_maxima(spec: &GeneratorSpec) -> Result<McOutcome, String> {
    let mut analyzer = StreamAnalyzer::new(ExtremumKind::Maxima, TiePolicy::Error);
    for x in spec.stream().map_err(|e| e.to_string())? {
        if analyzer.n_extrema() >= MC_TARGET_MAXIMA {
            break;
        }
        analyzer.push(x).map_err(|e| e.to_string())?;
    }
    let hist = analyzer.finish();
    audit(&hist)
}

fn audit(hist: &DistanceHistogram) -> Result<McOutcome, String> {
    let chi = chi_square_gof(hist, MC_P_FLOOR).map_err(|e| e.to_string())?;
    let ks = ks_test(hist, MC_P_FLOOR).map_err(|e| e.to_string())?;
    let summary = summarize(hist).map_err(|e| e.to_string())?;
    Ok(McOutcome {
        chi_p: chi.p_value,
        ks_p: ks.p_value,
        mean_dev: (summary.mean - 3.0).abs(),
        limit: MC_MEAN_SIGMAS * standard_error(summary.n),
    })
}

fn seed_override() -> Option<u64> {
    std::env::var("PEAKDIST_SEED").ok()?.parse().ok()
}

fn monte_carlo(name: &str, seeds: [u64; 2], make: fn(u64) -> GeneratorSpec) -> Check {
    timed(Duration::from_secs(60), || {
        let first = seed_override().unwrap_or(seeds[0]);
        let outcome = run_until_maxima(&make(first))?;
        if outcome.passed() {
            return Ok(format!("{name} seed {first}: {}", outcome.describe()));
        }
        let retry = run_until_maxima(&make(seeds[1]))?;
        if retry.passed() {
            Ok(format!(
                "{name} seed {first} failed ({}), retry seed {}: {}",
                outcome.describe(),
                seeds[1],
                retry.describe()
            ))
        } else {
            Err(format!(
                "{name}: seed {first}: {}; retry seed {}: {}",
                outcome.describe(),
                seeds[1],
                retry.describe()
            ))
        }
    })
}

fn lcg48_compliance() -> Check {
    monte_carlo("lcg48", [12_345, 2_024], GeneratorSpec::lcg48)
}

fn randu_compliance() -> Check {
    monte_carlo("randu", [12_345, 77_777], GeneratorSpec::randu)
}

fn chi_square_engine() -> Check {
    let a = chi_square_sf(1.006, 10).map_err(|e| e.to_string())?;
    let b = chi_square_sf(1.386, 8).map_err(|e| e.to_string())?;
    ensure((a - 0.9998).abs() <= 5e-4, || format!("Q(1.006, 10) = {a}"))?;
    ensure((b - 0.9944).abs() <= 5e-4, || format!("Q(1.386, 8) = {b}"))?;
    Ok(format!("sf(1.006, 10) = {a:.6}, sf(1.386, 8) = {b:.6}"))
}

fn z_test_spots() -> Check {
    let p = |mean| {
        mean_z_test(
            &SampleSummary {
                mean,
                std_dev: 0.0,
                n: 100_000,
            },
            0.01,
        )
        .map(|r| r.p_value)
        .map_err(|e| e.to_string())
    };
    let a = p(3.00187)?;
    let b = p(2.99447)?;
    ensure((a - 0.584).abs() <= 0.01, || format!("p(3.00187) = {a}"))?;
    ensure((b - 0.106).abs() <= 0.01, || format!("p(2.99447) = {b}"))?;
    Ok(format!("p(3.00187) = {a:.4}, p(2.99447) = {b:.4}"))
}

fn property_suites() -> Check {
    // patterns of a fixed length partition the sample space
    for k in 1..=8usize {
        let total: BigRational = (0u32..1 << k)
            .map(|bits| {
                let steps = (0..k)
                    .map(|i| {
                        if bits >> i & 1 == 1 {
                            Step::Up
                        } else {
                            Step::Down
                        }
                    })
                    .collect();
                eval_word(&OperatorWord::new(steps)).unwrap()
            })
            .sum();
        ensure(total == BigRational::one(), || {
            format!("length {k} sums to {total}")
        })?;
    }

    // reversal symmetry, exhaustively up to length 10
    for k in 1..=10usize {
        for bits in 0u32..1 << k {
            let word = OperatorWord::new(
                (0..k)
                    .map(|i| {
                        if bits >> i & 1 == 1 {
                            Step::Up
                        } else {
                            Step::Down
                        }
                    })
                    .collect(),
            );
            let a = eval_word(&word).unwrap();
            let b = eval_word(&word.time_reversed()).unwrap();
            ensure(a == b, || format!("{word}: {a} vs reversed {b}"))?;
        }
    }

    // minima and maxima of one 10^6-value stream both fit the law
    let values: Vec<f64> = GeneratorSpec::lcg48(20_060_812)
        .stream()
        .map_err(|e| e.to_string())?
        .take(1_000_000)
        .collect();
    let mut ps = Vec::new();
    for kind in [ExtremumKind::Minima, ExtremumKind::Maxima] {
        let hist = peakdist_core::histogram_of(values.iter().copied(), kind, TiePolicy::Error)
            .map_err(|e| e.to_string())?;
        let chi = chi_square_gof(&hist, MC_P_FLOOR).map_err(|e| e.to_string())?;
        ensure(chi.passed(), || {
            format!("{kind:?} chi2 p = {}", chi.p_value)
        })?;
        ps.push(chi.p_value);
    }

    // strictly increasing transforms keep extrema where they were
    let cubed: Vec<f64> = values.iter().map(|v| v * v * v).collect();
    for kind in [ExtremumKind::Maxima, ExtremumKind::Minima] {
        let a = detect_extrema(&values, kind, TiePolicy::Error).map_err(|e| e.to_string())?;
        let b = detect_extrema(&cubed, kind, TiePolicy::Error).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{kind:?} positions moved under x^3"))?;
    }
    Ok(format!(
        "partition k<=8, reversal k<=10, minima chi2 p = {:.4}, maxima chi2 p = {:.4}, x^3 invariant",
        ps[0], ps[1]
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("1  exact PMF reproduction", pmf_reproduction),
        ("2  exact CDF reproduction", cdf_reproduction),
        ("3  symbolic = closed form", symbolic_identity),
        ("4  oracle equivalence", oracle_equivalence),
        ("5  P_max = 1/3", p_max_exact),
        ("6  moments", moment_values),
        ("7  tail residual", tail_residual),
        ("8a LCG48 compliance", lcg48_compliance),
        ("8b RANDU compliance", randu_compliance),
        ("9  chi-square engine", chi_square_engine),
        ("10 z-test spot checks", z_test_spots),
        ("11 property suites", property_suites),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
