//! Command-line front end: `ingest`, `cluster`, `generate`, `export`, `serve`.
//!
//! Exit status 0 on success, 1 for invalid input or flags, 2 for file system
//! failures. Errors go to stderr prefixed with `ERR:`.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::api::dendrogram_view;
use crate::clustering::{CutCriterion, Dendrogram, Scope};
use crate::comic::{generate_comic, ComicOptions};
use crate::graph::{AggregationPolicy, DynamicGraph, EgoLevel};
use crate::io::{load_path, CsvOptions, DatasetStore, IoError};
use crate::layout::LayoutMode;
use crate::narrative::CaptionTemplates;
use crate::render::{render, ComicTemplate};
use crate::server::{serve, AppState};

#[derive(Debug, Parser)]
#[command(name = "dgcomics", version, about = "Turn dynamic graphs into graph comics")]
struct Cli {
    /// Log the merge sequence and other progress to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Copy a dataset into the store ($DGCOMICS_DATA_DIR) and print its manifest.
    Ingest(DataArgs),
    /// Build the dendrogram and write it as JSON.
    Cluster {
        #[command(flatten)]
        data: DataArgs,
        /// `whole`, `ego:<node>` or `ego:<node>@1.0`.
        #[arg(long, default_value = "whole")]
        scope: String,
        #[arg(long, default_value = "sum")]
        agg: AggregationPolicy,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cut the dendrogram and write the comic template and its SVG.
    Generate(GenerateArgs),
    /// Render a template JSON file to SVG.
    Export {
        template: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Edge CSV or canonical JSON dataset.
    #[arg(required_unless_present = "dataset", conflicts_with = "dataset")]
    input: Option<PathBuf>,
    /// Node CSV accompanying an edge CSV.
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// Treat links as directed.
    #[arg(long)]
    directed: bool,
    /// Dataset name recorded in the manifest.
    #[arg(long)]
    name: Option<String>,
    /// Id of a dataset already in the store.
    #[arg(long)]
    dataset: Option<String>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of panels.
    #[arg(long, conflicts_with = "level", required_unless_present = "level")]
    k: Option<usize>,
    /// Cut height in [0, 1].
    #[arg(long)]
    level: Option<f64>,
    /// Ego network level of the main characters: 1.0 or 1.5.
    #[arg(long, default_value = "1.5")]
    ego: EgoLevel,
    /// Percent of the strongest alters kept as supporters.
    #[arg(long, default_value_t = 15.0)]
    top: f64,
    /// Percent of the strongest alters highlighted.
    #[arg(long, default_value_t = 5.0)]
    highlight: f64,
    /// Node layout: force, compact or fixed (one layout shared by all panels).
    #[arg(long, default_value = "force")]
    layout: LayoutMode,
    /// Fixed main character; repeat for several.
    #[arg(long = "main")]
    mains: Vec<String>,
    /// Automatically picked mains per panel when no `--main` is given.
    #[arg(long, default_value_t = 1)]
    mains_per_panel: usize,
    /// Graphs the dendrogram is built from: `whole` or `ego:<node>[@1.0]`.
    #[arg(long, default_value = "whole")]
    scope: String,
    /// How attributes combine over a time span: sum, max or last.
    #[arg(long, default_value = "sum")]
    agg: AggregationPolicy,
    /// Title drawn above the panels.
    #[arg(long)]
    title: Option<String>,
    /// Caption wording (TOML).
    #[arg(long)]
    captions: Option<PathBuf>,
    /// SVG output.
    #[arg(long, default_value = "comic.svg")]
    out: PathBuf,
    /// Template JSON output; defaults to the SVG path with a `.json` extension.
    #[arg(long)]
    template: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Parse `argv` (program name first), run the command and return the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayVersion};
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                // a closed pipe (`dgcomics --help | head`) is not an error
                let _ = e.print();
                return 0;
            }
            let text = e.to_string();
            eprintln!("ERR: {}", text.trim_start_matches("error: ").trim_end());
            return 1;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Invalid(m) | CliError::Io(m) => eprintln!("ERR: {m}"),
            }
            e.code()
        }
    }
}

fn load(data: &DataArgs) -> Result<DynamicGraph, CliError> {
    if let Some(id) = &data.dataset {
        return Ok(DatasetStore::from_env().get(id)?);
    }
    let input = data.input.as_deref().expect("clap requires input or --dataset");
    let opts = CsvOptions {
        directed: data.directed,
        name: data.name.clone(),
    };
    Ok(load_path(input, data.nodes.as_deref(), &opts)?)
}

fn log_merges(d: &Dendrogram, dg: &DynamicGraph) {
    for m in &d.merges {
        eprintln!(
            "merge {}: {} + {} -> {} raw={} height={}",
            m.id,
            dg.span_label(d.span_of(m.children[0])),
            dg.span_label(d.span_of(m.children[1])),
            dg.span_label(m.span),
            m.raw_distance,
            m.height
        );
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest(data) => {
            let dg = load(&data)?;
            let m = DatasetStore::from_env().put(&dg)?;
            emit(None, &(serde_json::to_string_pretty(&m).unwrap() + "\n"))
        }
        Command::Cluster { data, scope, agg, out } => {
            let dg = load(&data)?;
            let scope: Scope = scope.parse().map_err(invalid)?;
            let view = dendrogram_view(&dg, &scope, agg).map_err(invalid)?;
            if cli.verbose {
                log_merges(&view.dendrogram, &dg);
            }
            emit(out.as_deref(), &(serde_json::to_string_pretty(&view).unwrap() + "\n"))
        }
        Command::Generate(args) => generate(args, cli.verbose),
        Command::Export { template, out } => {
            let text = std::fs::read_to_string(&template)
                .map_err(|e| CliError::Io(format!("{}: {e}", template.display())))?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            let t: ComicTemplate = serde_path_to_error::deserialize(de)
                .map_err(|e| CliError::Invalid(format!("{}: {}: {}", template.display(), e.path(), e.inner())))?;
            emit(out.as_deref(), &render(&t).map_err(invalid)?)
        }
        Command::Serve { port, host } => {
            let state = AppState::new(DatasetStore::from_env(), CaptionTemplates::default());
            let addr = SocketAddr::new(host, port);
            if cli.verbose {
                eprintln!("listening on http://{addr}");
            }
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
            rt.block_on(serve(addr, state)).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn generate(a: GenerateArgs, verbose: bool) -> Result<(), CliError> {
    let templates = match &a.captions {
        Some(p) => CaptionTemplates::from_file(p).map_err(invalid)?,
        None => CaptionTemplates::default(),
    };
    let dg = load(&a.data)?;
    let scope: Scope = a.scope.parse().map_err(invalid)?;
    let d = crate::clustering::build_dendrogram(&dg, &scope, a.agg).map_err(invalid)?;
    if verbose {
        log_merges(&d, &dg);
    }
    let cut = match (a.k, a.level) {
        (Some(k), _) => CutCriterion::K(k),
        (None, Some(l)) => CutCriterion::Level(l),
        (None, None) => unreachable!("clap requires --k or --level"),
    };
    let options = ComicOptions {
        ego: a.ego,
        mains: a.mains,
        mains_per_panel: a.mains_per_panel,
        top: a.top,
        highlight: a.highlight,
        layout: a.layout,
        aggregation: a.agg,
        title: a.title,
        ..ComicOptions::default()
    };
    let t = generate_comic(&dg, &d, cut, &options, &templates).map_err(invalid)?;
    let svg = render(&t).map_err(invalid)?;
    let json_path = a.template.unwrap_or_else(|| a.out.with_extension("json"));
    write_file(&json_path, &t.to_json())?;
    write_file(&a.out, &svg)?;
    if verbose {
        eprintln!("{} panels -> {} and {}", t.panels.len(), json_path.display(), a.out.display());
    }
    Ok(())
}
