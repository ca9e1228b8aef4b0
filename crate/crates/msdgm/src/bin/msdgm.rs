use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use msdgm::analyze::{run_analyze, with_threads, AnalysisConfig};
use msdgm::formats::{write_field, write_partial};
use msdgm::input::{load_pattern_file, write_pattern, Schema};
use msdgm::recovery::{run_recovery_study, summarize, write_rows, write_summary};
use msdgm::SimulationFile;
use msdgm_core::pipeline::{partial_dependence, periodogram, prepare, AnalysisOptions};
use msdgm_core::simulate::simulate;
use msdgm_core::smoothing::smooth_field;
use msdgm_core::{FrequencyGrid, Kernel, Window};

#[derive(Parser)]
#[command(name = "msdgm", version, about = "Marked spatial dependence graph models for multivariate marked point patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate dependence graphs from a pattern file
    Analyze(AnalyzeArgs),
    /// Write a synthetic pattern from a JSON spec
    Simulate(SimulateArgs),
    /// Simulate, analyze and score edge recovery over many replicates
    RecoveryStudy(RecoveryArgs),
    /// Inspect intermediate spectra
    Spectra {
        #[command(subcommand)]
        command: SpectraCommand,
    },
}

#[derive(Subcommand)]
enum SpectraCommand {
    /// Write the periodogram (or smoothed / partial) field as delimited text
    Dump(DumpArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Delimited pattern file with a header row
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "x")]
    x_col: String,
    #[arg(long, default_value = "y")]
    y_col: String,
    #[arg(long, default_value = "type")]
    type_col: String,
    #[arg(long, default_value = "mark")]
    mark_col: String,
    /// Tab-delimited input
    #[arg(long, conflicts_with = "delimiter")]
    tab: bool,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Observation window x_min,x_max,y_min,y_max (default: bounding box)
    #[arg(long, value_delimiter = ',', num_args = 4, allow_negative_numbers = true)]
    window: Option<Vec<f64>>,
}

impl InputArgs {
    fn schema(&self) -> anyhow::Result<Schema> {
        let delimiter = if self.tab { '\t' } else { self.delimiter };
        if !delimiter.is_ascii() {
            bail!("delimiter must be a single ASCII character");
        }
        let window = match self.window.as_deref() {
            None => None,
            Some(&[a, b, c, d]) => Some(Window::new(a, b, c, d)?),
            Some(_) => bail!("--window takes four values"),
        };
        Ok(Schema {
            x: self.x_col.clone(),
            y: self.y_col.clone(),
            type_column: self.type_col.clone(),
            mark: self.mark_col.clone(),
            delimiter: delimiter as u8,
            window,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Uniform,
    Triangular,
}

#[derive(Args)]
struct EstimationArgs {
    #[arg(long, default_value_t = 16)]
    p_max: usize,
    #[arg(long, default_value_t = 16)]
    q_max: usize,
    #[arg(long, value_enum, default_value = "uniform")]
    kernel: KernelArg,
    /// Smoothing half-width h (default: max(2, smallest h with (2h+1)^2 >= d))
    #[arg(long)]
    bandwidth: Option<usize>,
    /// Ridge as a fraction of the mean auto-spectrum
    #[arg(long, default_value_t = 1e-8)]
    ridge: f64,
    /// Drop types with fewer points than this
    #[arg(long, default_value_t = 1)]
    min_n: usize,
    /// Worker cap for the frequency loop
    #[arg(long)]
    threads: Option<usize>,
}

impl EstimationArgs {
    fn options(&self) -> anyhow::Result<AnalysisOptions> {
        Ok(AnalysisOptions {
            grid: FrequencyGrid::new(self.p_max, self.q_max)?,
            kernel: match self.kernel {
                KernelArg::Uniform => Kernel::Uniform,
                KernelArg::Triangular => Kernel::Triangular,
            },
            half_width: self.bandwidth,
            ridge: self.ridge,
            min_count: self.min_n,
        })
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    estimation: EstimationArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.6,0.9")]
    thresholds: Vec<f64>,
    /// Directory for graphs, statistics and the run report
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON simulation spec
    #[arg(long)]
    spec: PathBuf,
    /// Output pattern file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RecoveryArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 50)]
    replicates: usize,
    #[command(flatten)]
    estimation: EstimationArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.6,0.9")]
    thresholds: Vec<f64>,
    /// Raw per-replicate log
    #[arg(long)]
    out: PathBuf,
    /// Per-threshold summary (also printed to stdout)
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    estimation: EstimationArgs,
    /// Dump the smoothed field instead of the raw periodogram
    #[arg(long)]
    smoothed: bool,
    /// Dump |d_ij| per usable frequency instead of the spectral field
    #[arg(long, conflicts_with = "smoothed")]
    partial: bool,
    #[arg(long)]
    out: PathBuf,
}

fn create(path: &PathBuf) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn analyze_cmd(args: AnalyzeArgs) -> anyhow::Result<()> {
    let config = AnalysisConfig {
        input: args.input.input.clone(),
        schema: args.input.schema()?,
        options: args.estimation.options()?,
        thresholds: args.thresholds,
        out_dir: args.out_dir,
        threads: args.estimation.threads,
    };
    let out = run_analyze(&config)?;
    for f in &out.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn simulate_cmd(args: SimulateArgs) -> anyhow::Result<()> {
    let spec = SimulationFile::read(&args.spec)?;
    let pattern = simulate(&spec)?;
    let mut w = create(&args.out)?;
    write_pattern(&pattern, &mut w)?;
    w.flush()?;
    let names = spec.type_names();
    for (a, b) in spec.coupled_pairs() {
        println!("{} -- {}", names[a], names[b]);
    }
    Ok(())
}

fn recovery_cmd(args: RecoveryArgs) -> anyhow::Result<()> {
    let spec = SimulationFile::read(&args.spec)?;
    for &alpha in &args.thresholds {
        msdgm_core::graph::validate_threshold(alpha)?;
    }
    let options = args.estimation.options()?;
    let rows = with_threads(args.estimation.threads, || {
        run_recovery_study(&spec, args.replicates, &options, &args.thresholds)
    })??;
    let mut w = create(&args.out)?;
    write_rows(&rows, &mut w)?;
    w.flush()?;
    let summary = summarize(&rows);
    if let Some(path) = &args.summary {
        let mut s = create(path)?;
        write_summary(&summary, &mut s)?;
        s.flush()?;
    }
    write_summary(&summary, std::io::stdout().lock())?;
    Ok(())
}

fn dump_cmd(args: DumpArgs) -> anyhow::Result<()> {
    let pattern = load_pattern_file(&args.input.input, &args.input.schema()?)?;
    let options = args.estimation.options()?;
    let mut w = create(&args.out)?;
    with_threads(args.estimation.threads, || -> anyhow::Result<()> {
        let prepared = prepare(&pattern, options.min_count)?.pattern;
        let raw = periodogram(&prepared, &options.grid)?;
        if !args.smoothed && !args.partial {
            return Ok(write_field(&raw, &mut w)?);
        }
        let spec = options.smoother_for(prepared.num_types());
        spec.validate(prepared.num_types())?;
        let smoothed = smooth_field(&raw, &spec);
        if args.smoothed {
            return Ok(write_field(&smoothed, &mut w)?);
        }
        let (field, _) = partial_dependence(&smoothed, spec.ridge)?;
        Ok(write_partial(&field, &mut w)?)
    })??;
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => analyze_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::RecoveryStudy(a) => recovery_cmd(a),
        Command::Spectra {
            command: SpectraCommand::Dump(a),
        } => dump_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
