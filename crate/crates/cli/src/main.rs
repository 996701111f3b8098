mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tdcam::{CamError, ModelMode, Scheme};

/// Ferroelectric memcapacitor TD-CAM simulator.
#[derive(Debug, Parser)]
#[command(name = "camsim", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON config file; missing keys take defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config file and CAMSIM_SEED.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory. Without it, the primary table goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Overrides experiment.model_mode.
    #[arg(long, global = true, value_enum)]
    pub model: Option<Model>,
    /// Worker threads for trial fan-out (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Model {
    ClosedForm,
    Table,
    Physical,
}

impl From<Model> for ModelMode {
    fn from(m: Model) -> Self {
        match m {
            Model::ClosedForm => ModelMode::ClosedForm,
            Model::Table => ModelMode::TableTransient,
            Model::Physical => ModelMode::PhysicalTransient,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Td,
    Vd,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Td => Scheme::Td,
            SchemeArg::Vd => Scheme::Vd,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the C-V curve of both polarization states.
    CvCurve {
        #[arg(long, default_value_t = -1.5, allow_negative_numbers = true)]
        v_min: f64,
        #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
        v_max: f64,
        #[arg(long, default_value_t = 301)]
        points: usize,
    },
    /// Program words into fresh cells and report the resulting states.
    Write {
        /// Word to store, e.g. 1011. Repeat for several rows.
        #[arg(long = "bits", required = true)]
        bits: Vec<String>,
    },
    /// Search one query against stored words.
    SearchWord {
        #[arg(long)]
        query: String,
        /// Stored word; repeat for several rows.
        #[arg(long, conflicts_with = "rows")]
        stored: Vec<String>,
        /// Bit-row file with one stored word per line.
        #[arg(long, value_name = "PATH")]
        rows: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SchemeArg::Td)]
        scheme: SchemeArg,
        /// Also export the ML waveform of the first row (TD transient models).
        #[arg(long)]
        waveform: bool,
    },
    /// Nominal delay versus Hamming distance, with a linear fit.
    SweepHd {
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
    },
    /// Delay distributions under device variation.
    MonteCarlo {
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
    },
    /// Nearest-neighbor search accuracy over a random array.
    NnSearch {
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
    },
    /// Cell area comparison.
    AreaReport,
    /// Run the built-in oracle checks.
    Validate,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let config_error = e
                .chain()
                .any(|c| c.downcast_ref::<CamError>().is_some_and(CamError::is_config_error));
            ExitCode::from(if config_error { 1 } else { 2 })
        }
    }
}
