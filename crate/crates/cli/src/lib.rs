//! Command-line front end: argument parsing, configuration validation, and
//! the exit-code contract (0 success, 1 data violation, 2 I/O, 3 configuration).

pub mod commands;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use codecal::confidence::Measure;
use codecal::correctness::Notion;
use codecal::metrics::BinningScheme;
use codecal::records::RecordError;
use codecal::report::{ReportError, TableFormat};
use codecal::rescale::{DEFAULT_COLLAPSE_THRESHOLD, DEFAULT_EPSILON, DEFAULT_FOLDS};
use codecal::synth::SynthProfile;

#[derive(Debug, Parser)]
#[command(
    name = "codecal",
    version,
    about = "Calibration analysis for generative-model code output"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check corpus files against the record schema and field invariants
    Validate {
        /// JSONL corpus files to check
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Score, label, bin, rescale, and report on a corpus
    Analyze(AnalyzeArgs),
    /// Generate a synthetic corpus with a known calibration profile
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Input JSONL corpus file(s); multiple files are concatenated
    #[arg(long = "input", required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,

    /// Comma-separated confidence measures (default: all six)
    #[arg(long, value_delimiter = ',')]
    pub measures: Vec<String>,

    /// Correctness notion: exact-match or all-pass
    #[arg(long, default_value = "all-pass")]
    pub notion: String,

    /// Number of reliability bins
    #[arg(long, default_value_t = 10)]
    pub bins: usize,

    /// Binning scheme: equal or quantile
    #[arg(long, default_value = "equal")]
    pub scheme: String,

    /// Cross-fitting fold count (each fold is rescaled by a model fit on the rest)
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    pub folds: usize,

    /// Seed for the fold-assignment shuffle
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Skill score below which a rescaled measure is reported as collapsed
    #[arg(long = "collapse-threshold", default_value_t = DEFAULT_COLLAPSE_THRESHOLD)]
    pub collapse_threshold: f64,

    /// Probability clamp floor used before taking ln p
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,

    /// Output directory for tables and plots
    #[arg(long, default_value = "analysis")]
    pub out: PathBuf,

    /// Report table format: markdown or csv
    #[arg(long, default_value = "markdown")]
    pub format: String,

    /// Keep full float precision in CSV output instead of two decimals
    #[arg(long, default_value_t = false)]
    pub full_precision: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Corpus size (at least 100)
    #[arg(long, default_value_t = 1000)]
    pub n: usize,

    /// Generator seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Calibration profile: calibrated, overconfident, or uninformative
    #[arg(long, default_value = "calibrated")]
    pub profile: String,

    /// Output JSONL path
    #[arg(long)]
    pub out: PathBuf,
}

/// Failure classes, each tied to one exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or option values: exit 3.
    Config(String),
    /// The corpus violates the data contract: exit 1.
    Data(String),
    /// Filesystem or serialization failure: exit 2.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) => 1,
            CliError::Io(_) => 2,
            CliError::Config(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration: {msg}"),
            CliError::Data(msg) => write!(f, "data violation: {msg}"),
            CliError::Io(msg) => write!(f, "i/o: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<RecordError> for CliError {
    fn from(err: RecordError) -> Self {
        match err {
            RecordError::Io { .. } => CliError::Io(err.to_string()),
            _ => CliError::Data(err.to_string()),
        }
    }
}

impl From<codecal::confidence::ConfidenceError> for CliError {
    fn from(err: codecal::confidence::ConfidenceError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<codecal::correctness::CorrectnessError> for CliError {
    fn from(err: codecal::correctness::CorrectnessError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<codecal::metrics::MetricsError> for CliError {
    fn from(err: codecal::metrics::MetricsError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<codecal::rescale::RescaleError> for CliError {
    fn from(err: codecal::rescale::RescaleError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(err: ReportError) -> Self {
        match err {
            ReportError::Io { .. } => CliError::Io(err.to_string()),
            _ => CliError::Config(err.to_string()),
        }
    }
}

/// Fully validated analyze configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub measures: Vec<Measure>,
    pub notion: Notion,
    pub bins: usize,
    pub scheme: BinningScheme,
    pub folds: usize,
    pub seed: u64,
    pub collapse_threshold: f64,
    pub epsilon: f64,
    pub out: PathBuf,
    pub format: TableFormat,
    pub full_precision: bool,
}

impl RunConfig {
    pub fn from_args(args: &AnalyzeArgs) -> Result<RunConfig, CliError> {
        let measures = if args.measures.is_empty() {
            Measure::ALL.to_vec()
        } else {
            let mut seen = Vec::new();
            for raw in &args.measures {
                let measure = Measure::from_str(raw)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                if !seen.contains(&measure) {
                    seen.push(measure);
                }
            }
            seen
        };

        let notion =
            Notion::from_str(&args.notion).map_err(|e| CliError::Config(e.to_string()))?;
        let scheme = BinningScheme::from_str(&args.scheme)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let format = match args.format.as_str() {
            "markdown" | "md" => TableFormat::Markdown,
            "csv" => TableFormat::Csv,
            other => {
                return Err(CliError::Config(format!(
                    "unknown table format `{other}` (expected markdown or csv)"
                )))
            }
        };

        if args.bins == 0 {
            return Err(CliError::Config("--bins must be at least 1".into()));
        }
        if args.folds < 2 {
            return Err(CliError::Config("--folds must be at least 2".into()));
        }
        if !(args.epsilon > 0.0 && args.epsilon < 0.5) {
            return Err(CliError::Config(
                "--epsilon must lie strictly between 0 and 0.5".into(),
            ));
        }
        if !args.collapse_threshold.is_finite() {
            return Err(CliError::Config("--collapse-threshold must be finite".into()));
        }

        Ok(RunConfig {
            inputs: args.input.clone(),
            measures,
            notion,
            bins: args.bins,
            scheme,
            folds: args.folds,
            seed: args.seed,
            collapse_threshold: args.collapse_threshold,
            epsilon: args.epsilon,
            out: args.out.clone(),
            format,
            full_precision: args.full_precision,
        })
    }
}

/// Parsed synth configuration.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n: usize,
    pub seed: u64,
    pub profile: SynthProfile,
    pub out: PathBuf,
}

impl SynthConfig {
    pub fn from_args(args: &SynthArgs) -> Result<SynthConfig, CliError> {
        if args.n < 100 {
            return Err(CliError::Config(format!(
                "--n must be at least 100 (got {}): smaller corpora cannot be \
                 cross-fitted meaningfully",
                args.n
            )));
        }
        let profile = SynthProfile::from_str(&args.profile).map_err(CliError::Config)?;
        Ok(SynthConfig {
            n: args.n,
            seed: args.seed,
            profile,
            out: args.out.clone(),
        })
    }
}

/// Runs one parsed invocation and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Validate { paths } => commands::cmd_validate(&paths),
        Command::Analyze(args) => {
            RunConfig::from_args(&args).and_then(|config| commands::cmd_analyze(&config))
        }
        Command::Synth(args) => {
            SynthConfig::from_args(&args).and_then(|config| commands::cmd_synth(&config))
        }
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analyze_args(extra: &[&str]) -> AnalyzeArgs {
        let mut argv = vec!["codecal", "analyze", "--input", "corpus.jsonl"];
        argv.extend_from_slice(extra);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Analyze(args) => args,
            other => panic!("parsed into {other:?}"),
        }
    }

    #[test]
    fn defaults_select_all_measures_in_order() {
        let config = RunConfig::from_args(&analyze_args(&[])).unwrap();
        assert_eq!(config.measures, Measure::ALL.to_vec());
        assert_eq!(config.notion, Notion::AllPass);
        assert_eq!(config.bins, 10);
        assert_eq!(config.scheme, BinningScheme::EqualWidth);
        assert_eq!(config.folds, DEFAULT_FOLDS);
        assert_eq!(config.seed, 0);
        assert_eq!(config.collapse_threshold, DEFAULT_COLLAPSE_THRESHOLD);
        assert_eq!(config.epsilon, DEFAULT_EPSILON);
        assert_eq!(config.format, TableFormat::Markdown);
        assert!(!config.full_precision);
    }

    #[test]
    fn measure_list_dedups_preserving_order() {
        let config = RunConfig::from_args(&analyze_args(&[
            "--measures",
            "total_prob,avg_prob,total_prob",
        ]))
        .unwrap();
        assert_eq!(config.measures, vec![Measure::TotalProb, Measure::AvgProb]);
    }

    #[test]
    fn hyphenated_names_are_accepted() {
        let config = RunConfig::from_args(&analyze_args(&[
            "--measures",
            "ask-tf-norm",
            "--notion",
            "exact-match",
        ]))
        .unwrap();
        assert_eq!(config.measures, vec![Measure::AskTfNorm]);
        assert_eq!(config.notion, Notion::ExactMatch);
    }

    #[test]
    fn bad_values_are_configuration_errors() {
        for extra in [
            &["--folds", "1"][..],
            &["--bins", "0"],
            &["--epsilon", "0.5"],
            &["--epsilon=-0.1"],
            &["--format", "pdf"],
            &["--scheme", "log"],
            &["--notion", "vibes"],
            &["--measures", "entropy"],
        ] {
            let err = RunConfig::from_args(&analyze_args(extra)).unwrap_err();
            assert_eq!(err.exit_code(), 3, "{extra:?} should be a config error");
        }
    }

    #[test]
    fn error_classes_map_to_documented_exit_codes() {
        assert_eq!(CliError::Data("x".into()).exit_code(), 1);
        assert_eq!(CliError::Io("x".into()).exit_code(), 2);
        assert_eq!(CliError::Config("x".into()).exit_code(), 3);
    }

    #[test]
    fn synth_config_enforces_the_size_floor() {
        let args = match Cli::try_parse_from(["codecal", "synth", "--n", "99", "--out", "x.jsonl"])
            .unwrap()
            .command
        {
            Command::Synth(args) => args,
            other => panic!("parsed into {other:?}"),
        };
        assert_eq!(SynthConfig::from_args(&args).unwrap_err().exit_code(), 3);

        let args = match Cli::try_parse_from(["codecal", "synth", "--out", "x.jsonl"])
            .unwrap()
            .command
        {
            Command::Synth(args) => args,
            other => panic!("parsed into {other:?}"),
        };
        let config = SynthConfig::from_args(&args).unwrap();
        assert_eq!(config.n, 1000);
        assert_eq!(config.profile, codecal::synth::SynthProfile::Calibrated);
    }

    #[test]
    fn record_errors_split_between_io_and_data() {
        let io = RecordError::Io {
            path: "x.jsonl".into(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "gone"),
        };
        assert_eq!(CliError::from(io).exit_code(), 2);

        let malformed = RecordError::MalformedLine {
            path: "x.jsonl".into(),
            line: 3,
            message: "bad json".into(),
        };
        assert_eq!(CliError::from(malformed).exit_code(), 1);
    }
}
