use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use faceaes::eval::{run_protocol, sweep_combinations, with_threads, Dataset, Method, SweepTable};
use faceaes::linear::Task;
use faceaes::store::{canonical_dim, validate_dataset, DatasetManifest, ValidationReport};
use faceaes::synth::{generate, SynthParams};

mod config;
mod fit;

use config::{resolve, RunConfig};

#[derive(Parser)]
#[command(
    name = "faceaes",
    version,
    about = "Feature fusion and GA feature selection for image aesthetics"
)]
struct Cli {
    /// Cap on worker threads. Results do not depend on it.
    #[arg(long, global = true, env = "FACEAES_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a manifest and its feature files.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Cross-validate one method on one block combination.
    Evaluate(EvaluateArgs),
    /// Cross-validate every block combination plus the GA.
    Sweep(SweepArgs),
    /// Write a synthetic dataset with a known linear model.
    Synth(SynthArgs),
    /// Validate extractor output: IQ/IA/FA blocks at canonical dims with provenance.
    ExtractCheck {
        #[arg(long)]
        manifest: PathBuf,
    },
}

/// Settings shared by `evaluate` and `sweep`; unset flags fall back to the
/// config file, then to the defaults.
#[derive(Args, Debug, Default, Clone)]
pub struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// Keep the class ratio in every fold.
    #[arg(long)]
    stratified: bool,
    /// SVM/SVR regularization trade-off.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    crossover: Option<f64>,
    /// Fraction of the population copied unchanged.
    #[arg(long)]
    elitism: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        fn set<T: Copy>(slot: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.rounds, self.rounds);
        set(&mut cfg.folds, self.folds);
        cfg.stratified |= self.stratified;
        set(&mut cfg.train.c, self.c);
        set(&mut cfg.train.epochs, self.epochs);
        set(&mut cfg.ga.population_size, self.population);
        set(&mut cfg.ga.generations, self.generations);
        set(&mut cfg.ga.crossover_prob, self.crossover);
        set(&mut cfg.ga.elitism_fraction, self.elitism);
    }
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated block names; all blocks when omitted.
    #[arg(long, value_delimiter = ',')]
    blocks: Option<Vec<String>>,
    /// svm, svr or ga; the task's linear baseline when omitted.
    #[arg(long)]
    method: Option<Method>,
    /// classification or regression.
    #[arg(long)]
    task: Option<Task>,
    /// TOML or JSON file with run settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Skip fitting the final model on all samples.
    #[arg(long)]
    no_model: bool,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct SweepArgs {
    /// Repeat for one column per dataset.
    #[arg(long, required = true)]
    manifest: Vec<PathBuf>,
    #[arg(long)]
    task: Option<Task>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "synthetic")]
    name: String,
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// NAME:DIM pairs, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "SYN_A:30,SYN_B:30,SYN_C:20", value_parser = parse_block_spec)]
    blocks: Vec<(String, usize)>,
    #[arg(long, default_value_t = 10)]
    informative: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Minimum distance of every sample from the separating hyperplane.
    #[arg(long, default_value_t = 0.0)]
    margin: f64,
    #[arg(long, default_value_t = 5.0)]
    offset: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_block_spec(s: &str) -> Result<(String, usize), String> {
    let (name, dim) = s
        .split_once(':')
        .ok_or_else(|| format!("expected NAME:DIM, got {s:?}"))?;
    let dim = dim.parse().map_err(|e| format!("bad dim in {s:?}: {e}"))?;
    Ok((name.to_owned(), dim))
}

type CmdResult = Result<ExitCode, String>;

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn create_dir(dir: &Path) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))
}

fn load_dataset(path: &Path) -> Result<Dataset, String> {
    DatasetManifest::load(path)
        .and_then(Dataset::load)
        .map_err(|e| e.to_string())
}

fn print_validation(report: &ValidationReport) {
    for b in &report.blocks {
        let crc = b.crc.map_or_else(|| "-".to_owned(), |c| format!("{c:08x}"));
        println!(
            "{}\t{}x{}\tcrc {crc}\t{}",
            b.name,
            b.n_rows,
            b.dim,
            b.path.display()
        );
    }
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
}

fn cmd_validate(manifest: &Path) -> CmdResult {
    let report = validate_dataset(manifest);
    print_validation(&report);
    Ok(if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_extract_check(manifest: &Path) -> CmdResult {
    let report = validate_dataset(manifest);
    print_validation(&report);
    let mut problems = Vec::new();
    for name in ["IQ", "IA", "FA"] {
        match report.blocks.iter().find(|b| b.name == name) {
            None => problems.push(format!("block {name} missing")),
            Some(b) if Some(b.dim) != canonical_dim(name) => {
                problems.push(format!("block {name} has dim {}", b.dim))
            }
            Some(b) if b.crc.is_none() => {
                problems.push(format!("block {name} is not an FVEC file"))
            }
            Some(_) => {}
        }
    }
    match report.manifest.as_ref().map(|m| &m.extraction) {
        Some(Some(info)) if matches!(info.region_mode.as_str(), "whole-image" | "face-region") => {}
        Some(Some(info)) => problems.push(format!("unknown region mode {:?}", info.region_mode)),
        Some(None) => problems.push("manifest has no extraction metadata".into()),
        None => {}
    }
    for p in &problems {
        eprintln!("{}: {p}", manifest.display());
    }
    Ok(if report.is_clean() && problems.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_evaluate(args: &EvaluateArgs, threads: Option<usize>) -> CmdResult {
    let mut cfg = resolve(args.config.as_deref(), &args.overrides, args.task)?;
    if args.method.is_some() {
        cfg.method = args.method;
    }
    if args.blocks.is_some() {
        cfg.blocks = args.blocks.clone();
    }
    let dataset = load_dataset(&args.manifest)?;
    let blocks = cfg.blocks.clone().unwrap_or_else(|| dataset.block_names());
    let method = cfg.method.unwrap_or_else(|| Method::baseline(cfg.task));
    cfg.blocks = Some(blocks.clone());
    cfg.method = Some(method);

    create_dir(&args.out)?;
    write(&args.out.join("resolved_config.json"), cfg.to_json())?;
    let protocol = cfg.protocol();
    let report = with_threads(threads, || {
        run_protocol(&dataset, &blocks, method, cfg.task, &protocol)
    })
    .and_then(|r| r)
    .map_err(|e| e.to_string())?;
    write(&args.out.join("report.json"), report.to_json())?;
    let table = SweepTable::build(&[vec![report.clone()]]).map_err(|e| e.to_string())?;
    write(&args.out.join("table.txt"), table.render_text())?;
    write(&args.out.join("table.csv"), table.render_csv())?;
    if !args.no_model {
        with_threads(threads, || {
            fit::final_model(&dataset, &blocks, method, &cfg, &args.out)
        })
        .map_err(|e| e.to_string())??;
    }
    print!("{}", table.render_text());
    println!(
        "seed {}: mean {:.4}, std {:.4}",
        report.seed, report.mean, report.std
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: &SweepArgs, threads: Option<usize>) -> CmdResult {
    let cfg = resolve(args.config.as_deref(), &args.overrides, args.task)?;
    let datasets = args
        .manifest
        .iter()
        .map(|p| load_dataset(p))
        .collect::<Result<Vec<_>, _>>()?;
    create_dir(&args.out)?;
    write(&args.out.join("resolved_config.json"), cfg.to_json())?;
    let protocol = cfg.protocol();
    let mut sweeps = Vec::with_capacity(datasets.len());
    for d in &datasets {
        let reports = with_threads(threads, || sweep_combinations(d, cfg.task, &protocol))
            .and_then(|r| r)
            .map_err(|e| format!("{}: {e}", d.manifest.dataset_name))?;
        sweeps.push(reports);
    }
    let mut json = serde_json::to_string_pretty(&sweeps).map_err(|e| e.to_string())?;
    json.push('\n');
    write(&args.out.join("sweep.json"), json)?;
    let table = SweepTable::build(&sweeps).map_err(|e| e.to_string())?;
    write(&args.out.join("table.txt"), table.render_text())?;
    write(&args.out.join("table.csv"), table.render_csv())?;
    print!("{}", table.render_text());
    Ok(ExitCode::SUCCESS)
}

fn cmd_synth(args: &SynthArgs) -> CmdResult {
    let params = SynthParams {
        dataset_name: args.name.clone(),
        n: args.n,
        blocks: args.blocks.clone(),
        informative: args.informative,
        noise: args.noise,
        margin: args.margin,
        offset: args.offset,
        seed: args.seed,
    };
    let path = generate(&params)
        .and_then(|d| d.write(&args.out))
        .map_err(|e| e.to_string())?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { manifest } => cmd_validate(manifest),
        Command::ExtractCheck { manifest } => cmd_extract_check(manifest),
        Command::Evaluate(a) => cmd_evaluate(a, cli.threads),
        Command::Sweep(a) => cmd_sweep(a, cli.threads),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
