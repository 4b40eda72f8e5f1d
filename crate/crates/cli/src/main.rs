//! `wvc`: train, apply and inspect wavelet-feature classifiers.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Overrides;
use error::{CliError, Result};

#[derive(Parser, Debug)]
#[command(name = "wvc", version, about = "Wavelet-feature image classification")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Wavelet levels J.
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// Patches kept after variance selection.
    #[arg(long = "select-k", global = true)]
    select_k: Option<usize>,
    /// Approximation-histogram bins; 0 turns the histogram off.
    #[arg(long = "hist-bins", global = true)]
    hist_bins: Option<usize>,
    /// Number of objects for `feedback`.
    #[arg(long = "feedback-k", global = true)]
    feedback_k: Option<usize>,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "WVC_JOBS")]
    jobs: Option<usize>,
}

impl GlobalArgs {
    fn overrides(&self) -> Result<Overrides> {
        let file = match &self.config {
            Some(path) => Overrides::load(path)?,
            None => Overrides::default(),
        };
        let positive = |name: &str, v: Option<usize>| match v {
            Some(0) => Err(CliError::Usage(format!("--{name} must be at least 1"))),
            v => Ok(v),
        };
        let flags = Overrides {
            levels: positive("levels", self.levels)?,
            select_k: positive("select-k", self.select_k)?,
            feedback_k: positive("feedback-k", self.feedback_k)?,
            seed: self.seed,
            hist_bins: self.hist_bins.map(|b| (b > 0).then_some(b)),
            ..Overrides::default()
        };
        Ok(file.then(flags))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn a model from the train entries of a manifest.
    Train {
        manifest: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the selection report as CSV.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Classify images; writes `path,predicted,distance,neighbor` CSV.
    Predict {
        model: PathBuf,
        #[arg(required = true)]
        images: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Accuracy, confusion counts and ROC accuracy on the test entries of a
    /// manifest.
    Evaluate { model: PathBuf, manifest: PathBuf },
    /// Locate objects in one image and label each; one JSON object per line.
    Feedback {
        model: PathBuf,
        image: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn a mono PCM-16 WAV file into log-spectrogram PGM images.
    Spectrogram {
        wav: PathBuf,
        #[arg(short, long, value_name = "DIR")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1024)]
        frame: usize,
        #[arg(long, default_value_t = 512)]
        hop: usize,
        /// Segment length in seconds.
        #[arg(long, default_value_t = 5.0)]
        segment: f64,
    },
    /// Simulate a coarser resolution by Gaussian blur and subsampling.
    SimulateRes {
        image: PathBuf,
        #[arg(long, default_value_t = 2)]
        factor: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Integrate a TOML dynamics scenario; writes the trajectory as CSV.
    Dynamics {
        scenario: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Summarize a model file, including its selection report.
    Inspect {
        model: PathBuf,
        /// Write the selection report CSV here instead of printing it.
        #[arg(long, value_name = "PATH")]
        selection_csv: Option<PathBuf>,
    },
    /// Write the seeded oriented-grating corpus and its manifest.
    #[command(hide = true)]
    GenTextures {
        #[arg(short, long, value_name = "DIR")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 128)]
        side: usize,
        #[arg(long, default_value_t = 8)]
        train: usize,
        #[arg(long, default_value_t = 8)]
        test: usize,
    },
}

fn run(cli: Cli) -> Result<()> {
    let overrides = cli.global.overrides()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {:?} workers: {e}", cli.global.jobs)))?;
    pool.install(|| commands::dispatch(cli.command, &overrides))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wvc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
