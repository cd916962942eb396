use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dagrecover::io::{self, GraphFile};
use dagrecover::recovery::ConflictPolicy;
use dagrecover::{
    active_trail_exists, enumerate_extensions, find_skeleton, fisher_z_oracle, perfect_oracle,
    random_dag, recover, removal_sequence, sample, CountingOracle, Dag, Dataset, Error,
    ExtensionLimits, IndependenceOracle, LinearModel, Pdag, RecoveryOptions, SeparationQuery,
};

#[derive(Parser)]
#[command(
    name = "dagrecover",
    version,
    about = "Recover causal structure from independence tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the skeleton and separating sets.
    Skeleton(RecoverArgs),
    /// Full pipeline: skeleton, colliders, orientation rules.
    Recover(RecoverArgs),
    /// Answer separation queries against a DAG.
    Dsep(DsepArgs),
    /// Derive one consistent extension by node removal.
    Extend(ExtendArgs),
    /// List every consistent extension.
    Enumerate(EnumerateArgs),
    /// Sample a linear-Gaussian dataset.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Dsep,
    Fisherz,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Dot,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Dot => "dot",
        }
    }

    fn render(self, g: &Pdag) -> String {
        match self {
            Format::Json => io::pdag_to_json(g) + "\n",
            Format::Dot => io::pdag_to_dot(g),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    Unit,
    Random,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write the graph here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long, value_enum)]
    oracle: OracleKind,
    /// Truth DAG (JSON) for the d-separation oracle.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Dataset (CSV) for the Fisher-z oracle.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Largest conditioning set to try.
    #[arg(long)]
    max_cond: Option<usize>,
    /// Directory for the graph, sepsets.json, trace.txt and stats.json.
    #[arg(long)]
    report_dir: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct DsepArgs {
    #[arg(long)]
    truth: PathBuf,
    /// A query such as `X1 _||_ X7 | X2,X5`.
    #[arg(long, conflicts_with = "queries")]
    query: Option<String>,
    /// File with one query per line; blank lines and `#` comments are skipped.
    #[arg(long)]
    queries: Option<PathBuf>,
}

#[derive(Args)]
struct ExtendArgs {
    /// Partially directed graph (JSON).
    #[arg(long)]
    graph: PathBuf,
    /// Directory for the derived DAG and removals.json.
    #[arg(long)]
    report_dir: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = ExtensionLimits::default().max_undirected)]
    max_undirected: usize,
    #[arg(long, default_value_t = ExtensionLimits::default().cap)]
    cap: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SimulateArgs {
    /// Truth DAG (JSON); a random DAG is drawn when absent.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    nodes: usize,
    /// Edge probability for the random DAG.
    #[arg(long, default_value_t = 0.3)]
    prob: f64,
    #[arg(long, default_value_t = 1000)]
    rows: usize,
    #[arg(long, value_enum, default_value_t = Weights::Random)]
    weights: Weights,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Receives data.csv and truth.json.
    #[arg(long)]
    out_dir: PathBuf,
}

/// A failure with the diagnostic prefix it is reported under.
struct Failure {
    prefix: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            prefix: "USAGE",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let prefix = match &e {
            Error::Io(_) => "IO",
            Error::Csv(c) if c.is_io_error() => "IO",
            Error::Csv(_) | Error::Json(_) | Error::Parse(_) | Error::InvalidQuery(_) => "PARSE",
            Error::SingularMatrix(_)
            | Error::InsufficientSamples { .. }
            | Error::InvalidDataset(_)
            | Error::ColliderConflict(_) => "ORACLE",
            Error::Inextensible(_) => "INEXTENSIBLE",
            Error::InvalidArgument(_) | Error::MaxCondRequired(_) | Error::EnumerationBound(_) => {
                "USAGE"
            }
            _ => "GRAPH",
        };
        Failure {
            prefix,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        prefix: "IO",
        message: format!("{}: {e}", path.display()),
    })
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure {
        prefix: "IO",
        message: format!("{}: {e}", path.display()),
    })
}

fn emit(output: &Output, g: &Pdag) -> Outcome {
    let text = output.format.render(g);
    match &output.out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn load_dag(path: &Path) -> Result<Dag, Failure> {
    Ok(io::dag_from_json(&read(path)?)?)
}

fn build_oracle(
    args: &RecoverArgs,
) -> Result<(Box<dyn IndependenceOracle>, ConflictPolicy), Failure> {
    match args.oracle {
        OracleKind::Dsep => {
            let path = args
                .truth
                .as_ref()
                .ok_or_else(|| Failure::usage("--oracle dsep requires --truth"))?;
            Ok((
                Box::new(perfect_oracle(load_dag(path)?)),
                ConflictPolicy::Error,
            ))
        }
        OracleKind::Fisherz => {
            let path = args
                .data
                .as_ref()
                .ok_or_else(|| Failure::usage("--oracle fisherz requires --data"))?;
            let data = Dataset::read_csv_path(path).map_err(|e| match e {
                Error::Io(io) => Failure {
                    prefix: "IO",
                    message: format!("{}: {io}", path.display()),
                },
                e => e.into(),
            })?;
            Ok((
                Box::new(fisher_z_oracle(&data, args.alpha)?),
                ConflictPolicy::Warn,
            ))
        }
    }
}

fn report_dir(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure {
        prefix: "IO",
        message: format!("{}: {e}", dir.display()),
    })
}

fn skeleton(args: RecoverArgs) -> Outcome {
    let (oracle, conflicts) = build_oracle(&args)?;
    let opts = RecoveryOptions {
        max_cond: args.max_cond,
        conflicts,
        ..RecoveryOptions::default()
    };
    let counter = CountingOracle::new(oracle.as_ref());
    let (skel, sepsets) = find_skeleton(&counter, &opts)?;
    let g = skel.to_pdag();
    if let Some(dir) = &args.report_dir {
        report_dir(dir)?;
        let name = format!("skeleton.{}", args.output.format.extension());
        write(&dir.join(name), &args.output.format.render(&g))?;
        write(
            &dir.join("sepsets.json"),
            &json(&io::sepsets_to_entries(&g, &sepsets)),
        )?;
        write(&dir.join("stats.json"), &json(&counter.stats()))?;
    }
    emit(&args.output, &g)
}

fn recover_cmd(args: RecoverArgs) -> Outcome {
    let (oracle, conflicts) = build_oracle(&args)?;
    let opts = RecoveryOptions {
        max_cond: args.max_cond,
        conflicts,
        ..RecoveryOptions::default()
    };
    let res = recover(oracle.as_ref(), &opts)?;
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(dir) = &args.report_dir {
        report_dir(dir)?;
        let name = format!("graph.{}", args.output.format.extension());
        write(&dir.join(name), &args.output.format.render(&res.pdag))?;
        write(
            &dir.join("sepsets.json"),
            &json(&io::sepsets_to_entries(&res.pdag, &res.sepsets)),
        )?;
        let mut trace = res.trace_lines().join("\n");
        if !trace.is_empty() {
            trace.push('\n');
        }
        write(&dir.join("trace.txt"), &trace)?;
        write(&dir.join("stats.json"), &json(&res.stats))?;
    }
    emit(&args.output, &res.pdag)
}

fn dsep(args: DsepArgs) -> Outcome {
    let dag = load_dag(&args.truth)?;
    let lines: Vec<String> = match (&args.query, &args.queries) {
        (Some(q), None) => vec![q.clone()],
        (None, Some(path)) => read(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect(),
        _ => return Err(Failure::usage("dsep needs --query or --queries")),
    };
    let queries = lines
        .iter()
        .map(|l| SeparationQuery::parse(l, &dag))
        .collect::<Result<Vec<_>, _>>()?;
    for q in &queries {
        let connected = active_trail_exists(&dag, q)?;
        println!("{}", if connected { "connected" } else { "separated" });
    }
    Ok(())
}

fn extend(args: ExtendArgs) -> Outcome {
    let g = io::pdag_from_json(&read(&args.graph)?)?;
    let (dag, records) = removal_sequence(&g)?;
    let dag = dag.into_pdag();
    if let Some(dir) = &args.report_dir {
        report_dir(dir)?;
        let name = format!("extension.{}", args.output.format.extension());
        write(&dir.join(name), &args.output.format.render(&dag))?;
        write(&dir.join("removals.json"), &json(&records))?;
    }
    emit(&args.output, &dag)
}

fn enumerate(args: EnumerateArgs) -> Outcome {
    let g = io::pdag_from_json(&read(&args.graph)?)?;
    let limits = ExtensionLimits::default()
        .with_max_undirected(args.max_undirected)
        .with_cap(args.cap);
    let all = enumerate_extensions(&g, &limits)?;
    if all.is_empty() {
        return Err(Error::Inextensible("no consistent extension exists".into()).into());
    }
    let text = match args.output.format {
        Format::Json => json(
            &all.iter()
                .map(|d| GraphFile::from_pdag(d.as_pdag()))
                .collect::<Vec<_>>(),
        ),
        Format::Dot => all.iter().map(|d| io::pdag_to_dot(d.as_pdag())).collect(),
    };
    match &args.output.out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs) -> Outcome {
    let dag = match &args.truth {
        Some(path) => load_dag(path)?,
        None => random_dag(args.nodes, args.prob, args.seed)?,
    };
    let model = match args.weights {
        Weights::Unit => LinearModel::unit(dag),
        Weights::Random => LinearModel::random_weights(dag, args.seed),
    };
    let data = sample(&model, args.rows, args.seed)?;
    report_dir(&args.out_dir)?;
    let file = fs::File::create(args.out_dir.join("data.csv"))?;
    data.write_csv(file)?;
    write(
        &args.out_dir.join("truth.json"),
        &(io::pdag_to_json(model.dag().as_pdag()) + "\n"),
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("USAGE: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Skeleton(a) => skeleton(a),
        Command::Recover(a) => recover_cmd(a),
        Command::Dsep(a) => dsep(a),
        Command::Extend(a) => extend(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Simulate(a) => simulate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}: {}", f.prefix, f.message);
            ExitCode::from(if f.prefix == "USAGE" { 2 } else { 1 })
        }
    }
}
