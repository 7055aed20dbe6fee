//! Command-line interface: `fit` runs the full analysis pipeline and
//! writes the report tables, `diagnose` emits plot-data series only, and
//! `synth` regenerates the bundled synthetic dataset.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/analysis error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tailfit::error::Error;
use tailfit::estimation::ThresholdChoice;
use tailfit::gof::PValueMethod;
use tailfit::report::{
    analyze_dataset, company_plot_series, emit_plot_files, load_csv, render_tables, Dataset,
    GevPipeline, OutputFormat, RunConfig,
};
use tailfit::synth::write_synthetic_csv;

#[derive(Parser)]
#[command(
    name = "tailfit",
    version,
    about = "Heavy-tail distribution fitting for monthly premium series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit Lognormal, GEV and GPD to every company and write report tables
    Fit(FitArgs),
    /// Emit diagnostic plot-data series (no hypothesis tests)
    Diagnose(DiagnoseArgs),
    /// Regenerate the bundled synthetic premium dataset
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// GEV fitted to the full series; GPD by peak-over-threshold
    Pot,
    /// GEV fitted to per-block maxima
    BlockMaxima,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PMethodArg {
    /// Parametric bootstrap with refitting (default)
    Bootstrap,
    /// Plug-in asymptotic p-values for KS and chi-square
    Asymptotic,
}

fn parse_threshold(s: &str) -> Result<ThresholdChoice, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(ThresholdChoice::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(ThresholdChoice::Fixed(v)),
        _ => Err(format!("expected `auto` or a positive number, got `{s}`")),
    }
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with header company,period,premium
    #[arg(long)]
    input: PathBuf,
    /// Output directory for tables and plot files
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Significance level for all tests
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Bootstrap replicates per test
    #[arg(long, default_value_t = 1000)]
    bootstrap_reps: usize,
    /// Master seed for every random stream
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// POT threshold: `auto` (Hill-plot stability) or a value
    #[arg(long, default_value = "auto", value_parser = parse_threshold)]
    threshold: ThresholdChoice,
    /// Block count for --method block-maxima
    #[arg(long, default_value_t = 10)]
    blocks: usize,
    /// GEV pipeline
    #[arg(long, value_enum, default_value_t = MethodArg::Pot)]
    method: MethodArg,
    /// Analyze a single company
    #[arg(long)]
    company: Option<String>,
    /// Table output format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Also write per-company plot-data files
    #[arg(long)]
    emit_plots: bool,
    /// How p-values are computed
    #[arg(long, value_enum, default_value_t = PMethodArg::Bootstrap)]
    p_method: PMethodArg,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Input CSV with header company,period,premium
    #[arg(long)]
    input: PathBuf,
    /// Output directory for plot files
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Master seed (kept for parity; diagnostics are deterministic)
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// POT threshold: `auto` or a value
    #[arg(long, default_value = "auto", value_parser = parse_threshold)]
    threshold: ThresholdChoice,
    /// Block count for --method block-maxima
    #[arg(long, default_value_t = 10)]
    blocks: usize,
    /// GEV pipeline
    #[arg(long, value_enum, default_value_t = MethodArg::Pot)]
    method: MethodArg,
    /// Diagnose a single company
    #[arg(long)]
    company: Option<String>,
}

#[derive(Args)]
struct SynthArgs {
    /// Master seed for the generator
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path
    #[arg(long, default_value = "synthetic_premiums.csv")]
    out: PathBuf,
}

fn filter_company(dataset: &mut Dataset, company: &Option<String>) -> Result<(), Error> {
    if let Some(name) = company {
        if !dataset.companies.contains_key(name) {
            let known: Vec<&str> = dataset.companies.keys().map(String::as_str).collect();
            return Err(Error::Data(format!(
                "company `{name}` not in input (known: {})",
                known.join(", ")
            )));
        }
        dataset.companies.retain(|k, _| k == name);
    }
    Ok(())
}

fn run_fit(args: FitArgs) -> Result<(), Error> {
    let mut dataset = load_csv(&args.input)?;
    filter_company(&mut dataset, &args.company)?;
    for w in &dataset.warnings {
        eprintln!("warning: {w}");
    }

    let config = RunConfig {
        alpha: args.alpha,
        bootstrap_reps: args.bootstrap_reps,
        seed: args.seed,
        threshold: args.threshold,
        block_count: args.blocks,
        method: match args.method {
            MethodArg::Pot => GevPipeline::Pot,
            MethodArg::BlockMaxima => GevPipeline::BlockMaxima,
        },
        out_dir: args.out_dir.clone(),
        emit_plots: args.emit_plots,
        p_method: match args.p_method {
            PMethodArg::Bootstrap => PValueMethod::Bootstrap,
            PMethodArg::Asymptotic => PValueMethod::Asymptotic,
        },
    };

    let (reports, skipped) = analyze_dataset(&dataset, &config);
    for s in &skipped {
        eprintln!("warning: {s}");
    }
    for r in &reports {
        for w in &r.warnings {
            eprintln!("warning: {}: {w}", r.company);
        }
    }
    if reports.is_empty() {
        return Err(Error::Data("no company could be analyzed".to_string()));
    }

    let format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    let written = render_tables(&reports, format, &config.out_dir)?;
    for path in &written {
        println!("wrote {}", path.display());
    }

    if config.emit_plots {
        for (name, sample) in &dataset.companies {
            let (series, warnings) = company_plot_series(sample, &config);
            for w in warnings {
                eprintln!("warning: {w}");
            }
            let files = emit_plot_files(name, &series, &config.out_dir)?;
            println!("wrote {} plot files for {name}", files.len());
        }
    }
    Ok(())
}

fn run_diagnose(args: DiagnoseArgs) -> Result<(), Error> {
    let mut dataset = load_csv(&args.input)?;
    filter_company(&mut dataset, &args.company)?;
    for w in &dataset.warnings {
        eprintln!("warning: {w}");
    }
    let config = RunConfig {
        seed: args.seed,
        threshold: args.threshold,
        block_count: args.blocks,
        method: match args.method {
            MethodArg::Pot => GevPipeline::Pot,
            MethodArg::BlockMaxima => GevPipeline::BlockMaxima,
        },
        out_dir: args.out_dir.clone(),
        ..RunConfig::default()
    };
    for (name, sample) in &dataset.companies {
        let (series, warnings) = company_plot_series(sample, &config);
        for w in warnings {
            eprintln!("warning: {w}");
        }
        let files = emit_plot_files(name, &series, &config.out_dir)?;
        println!("wrote {} plot files for {name}", files.len());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Fit(args) => run_fit(args),
        Command::Diagnose(args) => run_diagnose(args),
        Command::Synth(args) => {
            write_synthetic_csv(&args.out, args.seed)?;
            println!("wrote {}", args.out.display());
            Ok(())
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
