use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fdo_core::config::{Config, Layer, CONFIG_FILE};
use fdo_core::conformance::{render_reports, ConformanceReport, ReportFormat};
use fdo_core::graph::build_graph;
use fdo_core::record::{parse_record, serialize_record, Annotations};
use fdo_core::registry::RegistryError;
use fdo_core::{FdoSpace, InformationRecord, Pid, PidRegistry, RecordError, SpaceError};

#[derive(Debug, Parser)]
#[command(name = "fdo", version, about = "Work with FAIR Digital Object records, graphs and operations")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Configuration file [default: ./fdo.toml if present]
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for stored profiles and records
    #[arg(long, global = true)]
    registry_path: Option<PathBuf>,
    /// Fixture directory to load (repeatable)
    #[arg(long = "fixtures", global = true)]
    fixtures: Vec<PathBuf>,
    /// Prefix for newly minted PIDs
    #[arg(long, global = true)]
    pid_prefix: Option<String>,
    /// Resolve unknown PIDs and fetch resources over the network
    #[arg(long, global = true)]
    online: bool,
    /// Handle proxy base URL
    #[arg(long, global = true)]
    proxy: Option<String>,
    #[arg(long, value_enum, global = true)]
    output_format: Option<OutputFormat>,
    /// Log verbosity (-v info, -vv debug)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Document,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel information profiles
    #[command(subcommand)]
    Profile(ProfileCommand),
    /// Information records
    #[command(subcommand)]
    Record(RecordCommand),
    /// Resolve a PID and print its record
    Resolve { pid: String },
    /// The FDO graph
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Operations associated with records
    #[command(subcommand)]
    Ops(OpsCommand),
    /// Model conformance of record snapshots
    #[command(subcommand)]
    Conformance(ConformanceCommand),
    /// Run the HTTP service
    Serve {
        /// Bind address [default: 127.0.0.1:8080]
        #[arg(long)]
        bind: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum ProfileCommand {
    /// Import and store a profile snapshot
    Import { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum RecordCommand {
    /// Instantiate a profile and register the record under a new PID
    Create {
        #[arg(long)]
        profile: String,
        /// Attribute value as <attribute-pid>=<value> (repeatable)
        #[arg(long = "set", value_name = "ATTR=VALUE")]
        set: Vec<String>,
    },
    /// Validate a record document or a registered record
    Validate {
        target: String,
        /// Validate against this profile instead of the referenced one
        #[arg(long)]
        profile: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Triples,
    Dot,
}

#[derive(Debug, Subcommand)]
enum GraphCommand {
    /// Build the graph from fixture directories (default: everything loaded)
    Build {
        dirs: Vec<PathBuf>,
        #[arg(long, value_enum)]
        export: Option<ExportFormat>,
    },
    /// Strongly connected components
    Scc,
    /// Shortest path between two FDOs
    Path { from: String, to: String },
}

#[derive(Debug, Subcommand)]
enum OpsCommand {
    /// Operations associated with a record
    List { pid: String },
    /// Execute an operation on a record
    Run {
        name: String,
        pid: String,
        /// Operation parameters as a JSON object
        #[arg(long)]
        params: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum ConformanceCommand {
    /// Check snapshot files or registered PIDs
    Check {
        #[arg(required = true)]
        targets: Vec<String>,
    },
}

/// Exit status 2 for usage errors and malformed input, 1 otherwise.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn operational(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<SpaceError> for Failure {
    fn from(e: SpaceError) -> Self {
        match &e {
            SpaceError::Type(_) | SpaceError::Registry(RegistryError::MalformedRecordDocument { .. }) => {
                Failure::usage(e.to_string())
            }
            _ => Failure::operational(e.to_string()),
        }
    }
}

impl From<RecordError> for Failure {
    fn from(e: RecordError) -> Self {
        match e {
            RecordError::MalformedRecordDocument(_) => Failure::usage(e.to_string()),
            other => Failure::operational(other.to_string()),
        }
    }
}

impl From<RegistryError> for Failure {
    fn from(e: RegistryError) -> Self {
        Failure::operational(e.to_string())
    }
}

type CliResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_config(global: &GlobalArgs) -> Result<Config, Failure> {
    let file = match &global.config {
        Some(path) => Layer::from_file(path),
        None if Path::new(CONFIG_FILE).is_file() => Layer::from_file(Path::new(CONFIG_FILE)),
        None => Ok(Layer::default()),
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    let env = Layer::from_env(|k| std::env::var(k).ok()).map_err(|e| Failure::usage(e.to_string()))?;
    let flags = Layer {
        registry_path: global.registry_path.clone(),
        fixtures: (!global.fixtures.is_empty()).then(|| global.fixtures.clone()),
        pid_prefix: global.pid_prefix.clone(),
        online: global.online.then_some(true),
        proxy: global.proxy.clone(),
        output_format: global.output_format.map(|f| match f {
            OutputFormat::Table => ReportFormat::Table,
            OutputFormat::Document => ReportFormat::Document,
        }),
        ..Layer::default()
    };
    Config::resolve(flags, env, file).map_err(|e| Failure::usage(e.to_string()))
}

fn run(cli: Cli) -> CliResult {
    let config = load_config(&cli.global)?;
    let space = FdoSpace::from_config(&config)?;
    let doc = config.output_format == ReportFormat::Document;
    match cli.command {
        Command::Profile(ProfileCommand::Import { file }) => {
            let text = read_file(&file)?;
            let profile = space.import_profile(&text)?;
            emit(doc, json!({ "profile": profile.profile_pid, "attributes": profile.attributes.len() }), || {
                format!("imported {} ({} attributes)", profile.profile_pid, profile.attributes.len())
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Record(RecordCommand::Create { profile, set }) => {
            let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for item in &set {
                let (key, value) =
                    item.split_once('=').ok_or_else(|| Failure::usage(format!("--set expects ATTR=VALUE, got {item:?}")))?;
                values.entry(key.to_owned()).or_default().push(value.to_owned());
            }
            let mut record = match space.records().instantiate_profile(&profile, &values) {
                Err(RecordError::ValidationFailed(outcome)) => {
                    print_outcome(doc, &outcome);
                    return Ok(ExitCode::from(1));
                }
                other => other?,
            };
            let pid = space.records().register_record(&mut record)?;
            emit(doc, serialize_record(&record, space.types()), || pid.to_string());
            Ok(ExitCode::SUCCESS)
        }
        Command::Record(RecordCommand::Validate { target, profile }) => {
            let record = load_record(&space, &target)?;
            let outcome = space.records().validate_record(&record, profile.as_deref())?;
            print_outcome(doc, &outcome);
            Ok(if outcome.valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Resolve { pid } => {
            let record = space.resolve(&parse_pid(&pid)?)?;
            emit(doc, serialize_record(&record, space.types()), || {
                let mut out = format!("{}\n", record.pid.as_ref().map(ToString::to_string).unwrap_or_default());
                for (key, value) in record.pairs() {
                    out.push_str(&format!("  {key}  {value}\n"));
                }
                out.trim_end().to_owned()
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Graph(GraphCommand::Build { dirs, export }) => {
            let graph = if dirs.is_empty() {
                space.graph()
            } else {
                let scratch = PidRegistry::new(&config.pid_prefix)?;
                for dir in &dirs {
                    scratch.load_fixture_set(dir).map_err(|e| match e {
                        RegistryError::MalformedRecordDocument { .. } => Failure::usage(e.to_string()),
                        other => Failure::operational(other.to_string()),
                    })?;
                }
                let records: Vec<InformationRecord> = scratch.entries().iter().map(|e| e.record.clone()).collect();
                build_graph(space.types(), &records)
            };
            match export {
                Some(ExportFormat::Triples) => print!("{}", graph.export_triples()),
                Some(ExportFormat::Dot) => print!("{}", graph.export_dot()),
                None => emit(
                    doc,
                    json!({ "nodes": graph.nodes(), "predicates": graph.predicates(), "triples": graph.triples() }),
                    || {
                        format!(
                            "nodes {}\npredicates {}\ntriples {}",
                            graph.nodes().len(),
                            graph.predicates().len(),
                            graph.triples().len()
                        )
                    },
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Graph(GraphCommand::Scc) => {
            let components = space.graph().strongly_connected_components();
            emit(doc, json!(components), || {
                components
                    .iter()
                    .map(|c| c.iter().map(Pid::as_str).collect::<Vec<_>>().join(" "))
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Graph(GraphCommand::Path { from, to }) => {
            let (from, to) = (parse_pid(&from)?, parse_pid(&to)?);
            let path = space.graph().path(&from, &to).map_err(|e| Failure::operational(e.to_string()))?;
            emit(doc, json!({ "reachable": path.is_some(), "path": path }), || match &path {
                Some(hops) if hops.is_empty() => "(same node)".to_owned(),
                Some(hops) => hops.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"),
                None => "unreachable".to_owned(),
            });
            Ok(if path.is_some() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Ops(OpsCommand::List { pid }) => {
            let record = space.resolve(&parse_pid(&pid)?)?;
            let ops: Vec<Value> = space
                .ops()
                .associate(&record)
                .iter()
                .map(|d| json!({ "name": d.name, "target": d.target, "applicable": space.ops().applicable(d, &record) }))
                .collect();
            emit(doc, json!(ops), || {
                ops.iter()
                    .map(|o| {
                        format!(
                            "{:<22} {:<13} {}",
                            o["name"].as_str().unwrap_or_default(),
                            o["target"].as_str().unwrap_or_default(),
                            if o["applicable"] == true { "applicable" } else { "not applicable" }
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(ExitCode::SUCCESS)
        }
        Command::Ops(OpsCommand::Run { name, pid, params }) => {
            let params: Value = match params {
                Some(text) => serde_json::from_str(&text).map_err(|e| Failure::usage(format!("--params: {e}")))?,
                None => Value::Null,
            };
            let record = space.resolve(&parse_pid(&pid)?)?;
            let result = space
                .ops()
                .execute_with(&name, &record, &params)
                .map_err(|e| Failure::operational(e.to_string()))?;
            let value = serde_json::to_value(&result).expect("operation result serializes");
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Conformance(ConformanceCommand::Check { targets }) => {
            let mut reports: Vec<ConformanceReport> = Vec::new();
            for target in &targets {
                let path = Path::new(target);
                if path.is_file() {
                    let text = read_file(path)?;
                    let report = space
                        .conformance()
                        .check_document(&text)
                        .map_err(|e| Failure::usage(format!("{target}: {e}")))?;
                    reports.push(report);
                } else {
                    let pid = parse_pid(target)?;
                    let entry = space.registry().resolve(&pid)?;
                    reports.push(space.conformance().check_record(&entry.record, &entry.annotations));
                }
            }
            println!("{}", render_reports(&reports, config.output_format).trim_end());
            Ok(if reports.iter().all(|r| r.overall) { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Serve { bind } => {
            let addr = bind.unwrap_or(config.bind.clone());
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::operational(e.to_string()))?;
            runtime
                .block_on(fdo_core::service::serve(Arc::new(space), &addr))
                .map_err(|e| Failure::operational(format!("{addr}: {e}")))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn emit(document: bool, value: Value, table: impl FnOnce() -> String) {
    if document {
        println!("{}", serde_json::to_string_pretty(&value).expect("json"));
    } else {
        println!("{}", table());
    }
}

fn print_outcome(document: bool, outcome: &fdo_core::ValidationOutcome) {
    emit(document, serde_json::to_value(outcome).expect("outcome serializes"), || {
        if outcome.valid {
            "valid".to_owned()
        } else {
            outcome
                .violations
                .iter()
                .map(|v| {
                    let attr = v.attribute_pid.as_deref().map(|a| format!(" ({a})")).unwrap_or_default();
                    format!("{}:{}{attr}", v.code.as_str(), v.detail)
                })
                .collect::<Vec<_>>()
                .join("\n")
        }
    });
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn parse_pid(text: &str) -> Result<Pid, Failure> {
    Pid::parse(text).map_err(|e| Failure::usage(e.to_string()))
}

fn load_record(space: &FdoSpace, target: &str) -> Result<InformationRecord, Failure> {
    let path = Path::new(target);
    if path.is_file() {
        let text = read_file(path)?;
        if let Ok(record) = parse_record(&text) {
            return Ok(record);
        }
        return fdo_core::record::parse_snapshot(&text)
            .map(|(record, _annotations): (InformationRecord, Annotations)| record)
            .map_err(|e| Failure::usage(format!("{target}: {e}")));
    }
    Ok(space.resolve(&parse_pid(target)?)?)
}
