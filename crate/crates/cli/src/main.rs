use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hybridzx::data::{ingest_idx, samples_to_csv, synth_dataset, IdxOptions, Rule};
use hybridzx::demo::{build_demo_graph, train_on, DataSource, TrainConfig};
use hybridzx::hybrid::{parse_graph, serialize_graph};
use hybridzx::ptm::{format_decimal, ptm_of_term};
use hybridzx::verify::run_checks;
use hybridzx::zx::{parse_diagram, Binding, ZxError};

/// Environment variable overriding the seed of a training config.
const SEED_VAR: &str = "HYBRIDZX_SEED";

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Lib(#[from] hybridzx::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0} check(s) failed")]
    Verification(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            _ => 2,
        }
    }
}

impl From<ZxError> for CliError {
    fn from(e: ZxError) -> Self {
        CliError::Lib(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "hybridzx", version, about = "Hybrid quantum-classical string diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Pauli transfer matrix of a diagram as CSV.
    Ptm {
        diagram: PathBuf,
        /// Bind a phase parameter, `name=value`. Repeatable.
        #[arg(long = "bind", value_name = "NAME=VALUE")]
        bindings: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a hybrid graph and print its outputs.
    Eval {
        graph: PathBuf,
        /// Comma-separated input values.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        inputs: String,
        /// Comma-separated parameter values.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
    },
    /// Run the invariant suite; exits with status 1 if any check fails.
    Check {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Instance count per randomized check (some checks use a multiple).
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Train the demo classifier; writes one JSON metrics object per line.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a dataset as CSV (bits, then the label).
    Dataset {
        #[command(subcommand)]
        source: DatasetSource,
    },
    /// Write the demo classifier graph as JSON.
    DemoGraph {
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DatasetSource {
    /// Random bit strings labelled by a rule.
    Synth {
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// single-bit, parity or threshold
        #[arg(long, default_value = "single-bit")]
        rule: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Digit images in IDX format, pooled and binarized.
    Idx {
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Two digit classes; the first is labelled +1.
        #[arg(long, default_value = "3,6")]
        classes: String,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, default_value_t = 2)]
        side: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("{what}: `{s}` is not a number"))))
        .collect()
}

fn parse_bindings(items: &[String]) -> Result<Binding> {
    items
        .iter()
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--bind expects name=value, got `{item}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--bind {name}: `{value}` is not a number")))?;
            Ok((name.trim().to_string(), value))
        })
        .collect()
}

fn cmd_ptm(diagram: &Path, bindings: &[String], output: Option<&Path>) -> Result<()> {
    let term = parse_diagram(&read(diagram)?)?.substitute(&parse_bindings(bindings)?);
    if let Some(free) = term.params().into_iter().next() {
        return Err(ZxError::Unbound(free).into());
    }
    emit(output, &ptm_of_term(&term)?.to_csv())
}

fn cmd_eval(graph: &Path, inputs: &str, params: &str) -> Result<()> {
    let g = parse_graph(&read(graph)?)?;
    let out = g.eval(&parse_list(inputs, "--inputs")?, &parse_list(params, "--params")?)?;
    let line: Vec<String> = out.iter().map(|&x| format_decimal(x)).collect();
    emit(None, &format!("{}\n", line.join(",")))
}

fn cmd_check(seed: u64, count: usize) -> Result<()> {
    let results = run_checks(seed, count)?;
    let mut text = String::new();
    for r in &results {
        text.push_str(&format!("{r}\n"));
    }
    emit(None, &text)?;
    match results.iter().filter(|r| !r.passed).count() {
        0 => Ok(()),
        n => Err(CliError::Verification(n)),
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn load_config(path: &Path) -> Result<TrainConfig> {
    let mut cfg: TrainConfig = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if let Ok(seed) = std::env::var(SEED_VAR) {
        cfg.seed = seed.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_VAR}: `{seed}` is not a seed")))?;
    }
    let base = path.parent().unwrap_or(Path::new("."));
    if let DataSource::Idx { images, labels, .. } = &mut cfg.data {
        *images = resolve(base, images);
        *labels = resolve(base, labels);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_train(config: &Path, output: Option<&Path>) -> Result<()> {
    let cfg = load_config(config)?;
    let samples = cfg.load_samples()?;
    let mut lines = String::new();
    train_on(&cfg, &samples, |m| {
        lines.push_str(&serde_json::to_string(m).expect("metrics serialize"));
        lines.push('\n');
    })?;
    emit(output, &lines)
}

fn parse_classes(text: &str) -> Result<(u8, u8)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let digit = |s: &str| s.parse::<u8>().map_err(|_| CliError::Usage(format!("--classes: `{s}` is not a digit")));
    match parts.as_slice() {
        [a, b] => Ok((digit(a)?, digit(b)?)),
        _ => Err(CliError::Usage(format!("--classes expects two digits like 3,6, got `{text}`"))),
    }
}

fn cmd_dataset(source: &DatasetSource) -> Result<()> {
    match source {
        DatasetSource::Synth { k, rule, n, seed, output } => {
            let rule: Rule = rule.parse()?;
            emit(output.as_deref(), &samples_to_csv(&synth_dataset(*k, rule, *n, *seed)?))
        }
        DatasetSource::Idx { images, labels, classes, threshold, side, output } => {
            let opts = IdxOptions { classes: parse_classes(classes)?, threshold: *threshold, side: *side };
            emit(output.as_deref(), &samples_to_csv(&ingest_idx(images, labels, &opts)?))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ptm { diagram, bindings, output } => cmd_ptm(&diagram, &bindings, output.as_deref()),
        Command::Eval { graph, inputs, params } => cmd_eval(&graph, &inputs, &params),
        Command::Check { seed, count } => cmd_check(seed, count),
        Command::Train { config, output } => cmd_train(&config, output.as_deref()),
        Command::Dataset { source } => cmd_dataset(&source),
        Command::DemoGraph { k, layers, output } => {
            let g = build_demo_graph(k, layers)?;
            emit(output.as_deref(), &(serialize_graph(&g) + "\n"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
