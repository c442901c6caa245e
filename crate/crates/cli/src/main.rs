use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use peakdist_core::exact::{f64_to_display, format_exact, rat_to_double_string};
use peakdist_core::extrema::{histogram_chunked, summarize, StreamAnalyzer};
use peakdist_core::stats::{
    frequency_table, render_reports, standard_error, TestReport, MIN_Z_SAMPLE,
};
use peakdist_core::{
    chi_square_gof, eval_word, ingest_file, ks_test, mean_z_test, oracle_pmf, pmf_closed_form,
    pmf_table, DistanceHistogram, ExtremumKind, GeneratorFamily, GeneratorSpec, InputFormat,
    OperatorWord, TiePolicy,
};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_REJECTED: u8 = 2;

const MAX_TABLE_D: u64 = 200;
const MAX_WORD_LEN: usize = 64;
const MIN_GENERATED_VALUES: u64 = 1000;

#[derive(Parser, Debug)]
#[command(
    name = "peakdist",
    version,
    about = "Exact law of distances between local maxima, and stream audits against it"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the exact PMF and CDF of the distance between maxima.
    Table {
        #[arg(long = "dmax")]
        d_max: u64,
        #[arg(long, value_enum, default_value_t = TableFormat::Human)]
        format: TableFormat,
    },
    /// Evaluate the probability of an up/down pattern such as UDUD.
    Eval { word: String },
    /// Measure distances between extrema of a stream and test them against the law.
    Analyze(AnalyzeArgs),
    /// Compare brute-force permutation counts with the closed form.
    Oracle {
        #[arg(long = "dmax")]
        d_max: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Human,
    Tsv,
    Exact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    Randu,
    Lcg48,
    /// User-defined LCG; needs --multiplier, --increment and --modulus.
    Lcg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FileFormat {
    FloatsText,
    U32BeBinary,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Maxima,
    Minima,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Ties {
    Error,
    Skip,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Human,
    Tsv,
}

#[derive(clap::Args, Debug)]
struct AnalyzeArgs {
    #[arg(
        long = "gen",
        value_enum,
        conflicts_with = "file",
        required_unless_present = "file"
    )]
    generator: Option<GenKind>,
    #[arg(long, requires = "format")]
    file: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    /// Values to generate; with --until-extrema this is an upper bound.
    #[arg(long)]
    values: Option<u64>,
    /// Keep generating until this many extrema have been seen.
    #[arg(long)]
    until_extrema: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    multiplier: Option<u64>,
    #[arg(long)]
    increment: Option<u64>,
    #[arg(long)]
    modulus: Option<u64>,
    #[arg(long, value_enum, default_value_t = Kind::Maxima)]
    kind: Kind,
    #[arg(long, value_enum, default_value_t = Ties::Error)]
    ties: Ties,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Human)]
    report: ReportFormat,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<peakdist_core::Error> for Failure {
    fn from(e: peakdist_core::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let mut out = io::stdout().lock();
    let result = match cli.command {
        Command::Table { d_max, format } => cmd_table(&mut out, d_max, format),
        Command::Eval { word } => cmd_eval(&mut out, &word),
        Command::Analyze(args) => cmd_analyze(&mut out, &args),
        Command::Oracle { d_max } => cmd_oracle(&mut out, d_max),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let _ = out.flush();
            eprintln!("error: {}", f.message);
            if f.code == EXIT_USAGE {
                eprintln!("run `peakdist --help` for usage");
            }
            ExitCode::from(f.code)
        }
    }
}

fn cmd_table(out: &mut impl Write, d_max: u64, format: TableFormat) -> Outcome {
    if !(2..=MAX_TABLE_D).contains(&d_max) {
        return Err(Failure::usage(format!(
            "--dmax must be between 2 and {MAX_TABLE_D}, got {d_max}"
        )));
    }
    let table = pmf_table(d_max)?;
    let residual = peakdist_core::BigRational::from_integer(1.into())
        - &table.last().expect("d_max >= 2").cumulative;
    match format {
        TableFormat::Human => {
            for e in &table {
                writeln!(
                    out,
                    "{}  {}  {}  {}  {}",
                    e.d,
                    format_exact(&e.probability),
                    rat_to_double_string(&e.probability),
                    format_exact(&e.cumulative),
                    rat_to_double_string(&e.cumulative)
                )?;
            }
            writeln!(
                out,
                "1-F({d_max})  {}  {}",
                format_exact(&residual),
                rat_to_double_string(&residual)
            )?;
        }
        TableFormat::Tsv => {
            writeln!(out, "d\tpmf\tpmf_decimal\tcdf\tcdf_decimal")?;
            for e in &table {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    e.d,
                    format_exact(&e.probability),
                    rat_to_double_string(&e.probability),
                    format_exact(&e.cumulative),
                    rat_to_double_string(&e.cumulative)
                )?;
            }
            writeln!(
                out,
                "residual\t{}\t{}",
                format_exact(&residual),
                rat_to_double_string(&residual)
            )?;
        }
        TableFormat::Exact => {
            for e in &table {
                writeln!(
                    out,
                    "{}\t{}\t{}",
                    e.d,
                    format_exact(&e.probability),
                    format_exact(&e.cumulative)
                )?;
            }
            writeln!(out, "residual\t{}", format_exact(&residual))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_eval(out: &mut impl Write, word: &str) -> Outcome {
    if word.len() > MAX_WORD_LEN {
        return Err(Failure::usage(format!(
            "word is {} letters long; the limit is {MAX_WORD_LEN}",
            word.len()
        )));
    }
    let word: OperatorWord = word.parse()?;
    let p = eval_word(&word)?;
    writeln!(out, "{}", format_exact(&p))?;
    writeln!(out, "{}", rat_to_double_string(&p))?;
    Ok(EXIT_OK)
}

fn cmd_oracle(out: &mut impl Write, d_max: u64) -> Outcome {
    if !(2..=8).contains(&d_max) {
        return Err(Failure::usage(format!(
            "--dmax must be between 2 and 8 for brute-force enumeration, got {d_max}"
        )));
    }
    let mut all_equal = true;
    for d in 2..=d_max {
        let counted = oracle_pmf(d)?;
        let closed = pmf_closed_form(d)?;
        let verdict = if counted == closed {
            "EQUAL"
        } else {
            all_equal = false;
            "MISMATCH"
        };
        writeln!(
            out,
            "{d}  {}  {}  {verdict}",
            format_exact(&counted),
            format_exact(&closed)
        )?;
    }
    Ok(if all_equal { EXIT_OK } else { EXIT_REJECTED })
}

fn generator_spec(args: &AnalyzeArgs, kind: GenKind) -> Result<GeneratorSpec, Failure> {
    Ok(match kind {
        GenKind::Randu => GeneratorSpec::randu(args.seed),
        GenKind::Lcg48 => GeneratorSpec::lcg48(args.seed),
        GenKind::Lcg => {
            let (Some(multiplier), Some(increment), Some(modulus)) =
                (args.multiplier, args.increment, args.modulus)
            else {
                return Err(Failure::usage(
                    "--gen lcg needs --multiplier, --increment and --modulus",
                ));
            };
            GeneratorSpec {
                family: GeneratorFamily::Lcg {
                    multiplier,
                    increment,
                    modulus,
                },
                seed: args.seed,
            }
        }
    })
}

const DEFAULT_VALUES: u64 = 300_000;

fn collect_histogram(
    args: &AnalyzeArgs,
    kind: ExtremumKind,
    ties: TiePolicy,
) -> Result<(String, DistanceHistogram), Failure> {
    if let Some(gen) = args.generator {
        let spec = generator_spec(args, gen)?;
        let limit = match (args.values, args.until_extrema) {
            (Some(v), _) => v,
            (None, Some(_)) => u64::MAX,
            (None, None) => DEFAULT_VALUES,
        };
        if limit < MIN_GENERATED_VALUES {
            return Err(Failure::usage(format!(
                "--values must be at least {MIN_GENERATED_VALUES} when generating, got {limit}"
            )));
        }
        let mut analyzer = StreamAnalyzer::new(kind, ties);
        for (produced, x) in (0..).zip(spec.stream()?) {
            if produced == limit
                || args
                    .until_extrema
                    .is_some_and(|n| analyzer.n_extrema() >= n)
            {
                break;
            }
            analyzer.push(x)?;
        }
        let label = format!("{gen:?} seed {}", args.seed).to_lowercase();
        Ok((label, analyzer.finish()))
    } else {
        let path = args.file.as_ref().expect("clap enforces --gen or --file");
        let format = match args.format.expect("clap enforces --format with --file") {
            FileFormat::FloatsText => InputFormat::FloatsText,
            FileFormat::U32BeBinary => InputFormat::U32BeBinary,
        };
        let values = ingest_file(path, format)?;
        let hist = histogram_chunked(&values, kind, ties, 1 << 16)?;
        Ok((path.display().to_string(), hist))
    }
}

fn cmd_analyze(out: &mut impl Write, args: &AnalyzeArgs) -> Outcome {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Failure::usage(format!(
            "--alpha must lie in (0, 1), got {}",
            args.alpha
        )));
    }
    let kind = match args.kind {
        Kind::Maxima => ExtremumKind::Maxima,
        Kind::Minima => ExtremumKind::Minima,
    };
    let ties = match args.ties {
        Ties::Error => TiePolicy::Error,
        Ties::Skip => TiePolicy::Skip,
    };
    let (source, hist) = collect_histogram(args, kind, ties)?;
    let summary = summarize(&hist)?;

    let mut reports: Vec<TestReport> = vec![
        chi_square_gof(&hist, args.alpha)?,
        ks_test(&hist, args.alpha)?,
    ];
    let mut skipped = Vec::new();
    if summary.n >= MIN_Z_SAMPLE {
        reports.push(mean_z_test(&summary, args.alpha)?);
    } else {
        skipped.push(format!(
            "mean-z skipped: {} distances, the test needs at least {MIN_Z_SAMPLE}",
            summary.n
        ));
    }
    let rows = frequency_table(&hist)?;
    let kind_name = format!("{:?}", args.kind).to_lowercase();

    let mut text = String::new();
    match args.report {
        ReportFormat::Human => {
            let _ = writeln!(text, "source: {source}");
            let _ = writeln!(
                text,
                "values: {}  {kind_name}: {}  distances: {}",
                hist.n_values(),
                hist.n_extrema(),
                summary.n
            );
            let _ = writeln!(text);
            let _ = writeln!(
                text,
                "{:>8} {:>12} {:>12}",
                "distance", "theoretical", "observed"
            );
            for r in &rows {
                let _ = writeln!(text, "{:>8} {:>12} {:>12}", r.d, r.theoretical, r.observed);
            }
            let _ = writeln!(text, "{:>8} {:>12} {:>12.5}", "average", 3, summary.mean);
            let _ = writeln!(text, "std dev of mean: {:.4}", standard_error(summary.n));
            let _ = writeln!(text);
            text += &render_reports(&reports);
        }
        ReportFormat::Tsv => {
            let _ = writeln!(text, "distance\ttheoretical\tobserved");
            for r in &rows {
                let _ = writeln!(text, "{}\t{}\t{}", r.d, r.theoretical, r.observed);
            }
            let _ = writeln!(text, "average\t3\t{}", f64_to_display(summary.mean));
            let _ = writeln!(text);
            let _ = writeln!(text, "{}", TestReport::TSV_HEADER);
            for r in &reports {
                let _ = writeln!(text, "{}", r.tsv_row());
            }
        }
    }
    out.write_all(text.as_bytes())?;
    for note in &skipped {
        eprintln!("note: {note}");
    }
    if let ReportFormat::Tsv = args.report {
        for r in &reports {
            for note in &r.notes {
                eprintln!("note ({}): {note}", r.test_name);
            }
        }
    }
    Ok(if reports.iter().all(TestReport::passed) {
        EXIT_OK
    } else {
        EXIT_REJECTED
    })
}
