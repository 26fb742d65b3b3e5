//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 data
//! error.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use chronolex_core::query::{project, QueryOptions, QueryRequest};
use chronolex_core::{run_query, ContextOperator, TemporalIndexBuilder, TimeSliceConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{CorpusStream, ErrorPolicy};
use crate::embeddings::load_static_embeddings_path;
use crate::render::{distances_tsv, parse_word_list, response_csv, response_json, response_svg};
use crate::server::{serve, AppState};
use crate::store::{load_index, save_index};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "chronolex", version, about = "Temporal word embeddings: build, query and serve")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an index from an n-gram corpus and a static embedding file.
    Ingest(IngestArgs),
    /// Project query words and print the result.
    Query(QueryArgs),
    /// Print the query's distance matrix as TSV.
    ExportDistances(DistanceArgs),
    /// Serve the HTTP API and UI.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct SliceArgs {
    #[arg(long, default_value_t = 1800, allow_negative_numbers = true)]
    slice_start: i32,
    #[arg(long, default_value_t = 2008, allow_negative_numbers = true)]
    slice_end: i32,
    #[arg(long, default_value_t = 5)]
    slice_width: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OperatorArg {
    Sum,
    Concat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Skip,
    Abort,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Corpus shards (TSV, optionally gzip-compressed).
    #[arg(long, required = true, num_args = 1..)]
    ngrams: Vec<PathBuf>,
    /// Static embedding text file.
    #[arg(long)]
    embeddings: PathBuf,
    /// Word in the embedding file whose vector is used for unknown words.
    #[arg(long)]
    unknown_token: Option<String>,
    #[arg(long, value_enum, default_value = "sum")]
    operator: OperatorArg,
    /// N-gram order (odd).
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, value_enum, default_value = "skip")]
    on_error: PolicyArg,
    #[command(flatten)]
    slices: SliceArgs,
    /// Output index directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Args)]
struct ProjectionArgs {
    #[arg(long)]
    index: PathBuf,
    /// Comma-separated query words.
    #[arg(long)]
    words: String,
    /// Scale temporal vectors to unit length before measuring distances.
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[command(flatten)]
    projection: ProjectionArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Include rasterized trajectories.
    #[arg(long)]
    frames: bool,
    #[arg(long, default_value_t = 1000)]
    width: u32,
    #[arg(long, default_value_t = 1000)]
    height: u32,
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
}

#[derive(Debug, Args)]
struct DistanceArgs {
    #[command(flatten)]
    projection: ProjectionArgs,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long, env = "CHRONOLEX_ADDR", default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Directory holding the built web UI; served at `/`.
    #[arg(long)]
    ui_dir: Option<PathBuf>,
    #[arg(long)]
    normalize: bool,
}

struct Failure(i32, String);

fn data_error(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_DATA, e.to_string())
}

/// Parses `argv` (program name first), runs the command, writes results to
/// `out` and returns the exit code. Diagnostics go to standard error.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => ingest(args),
        Command::Query(args) => query(args, out),
        Command::ExportDistances(args) => export_distances(args, out),
        Command::Serve(args) => serve_cmd(args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure(code, message)) => {
            eprintln!("chronolex: {message}");
            code
        }
    }
}

fn ingest(args: IngestArgs) -> Result<(), Failure> {
    let config = TimeSliceConfig::new(args.slices.slice_start, args.slices.slice_end, args.slices.slice_width)
        .map_err(|e| Failure(EXIT_USAGE, e.to_string()))?;
    if args.n.is_multiple_of(2) {
        return Err(Failure(EXIT_USAGE, format!("--n must be odd, got {}", args.n)));
    }
    let operator = match args.operator {
        OperatorArg::Sum => ContextOperator::Sum,
        OperatorArg::Concat => ContextOperator::Concat,
    };
    let policy = match args.on_error {
        PolicyArg::Skip => ErrorPolicy::Skip,
        PolicyArg::Abort => ErrorPolicy::Abort,
    };
    let table = load_static_embeddings_path(&args.embeddings, args.unknown_token.as_deref())
        .map_err(|e| data_error(format!("{}: {e}", args.embeddings.display())))?;
    let mut stream = CorpusStream::open(&args.ngrams, args.n, config, policy).map_err(data_error)?;
    let mut builder = TemporalIndexBuilder::new(&table, operator, config, args.n).map_err(data_error)?;
    for item in stream.by_ref() {
        let (slice, record) = item.map_err(data_error)?;
        builder.push(slice, &record).map_err(data_error)?;
    }
    let index = builder.finish();
    save_index(&index, &args.out).map_err(data_error)?;
    eprintln!(
        "ingested {} ({}); {} entries, {} words, dim {} -> {}",
        args.ngrams.len(),
        stream.summary(),
        index.entry_count(),
        index.vocabulary_size(),
        index.static_dim(),
        index.dim_out()
    );
    Ok(())
}

fn query(args: QueryArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let index = load_index(&args.projection.index).map_err(data_error)?;
    let words = parse_word_list(&args.projection.words);
    let request = QueryRequest::new(words.clone()).with_frames(args.frames).with_grid(args.width, args.height);
    let options = QueryOptions { grid: (args.width, args.height), margin: args.margin, normalize: args.projection.normalize };
    let response = run_query(&index, &request, &options).map_err(data_error)?;
    let body = match args.format {
        Format::Json => {
            let mut s = response_json(&response);
            s.push('\n');
            s
        }
        Format::Csv => response_csv(&words, &response),
        Format::Svg => response_svg(&words, &response, args.width, args.height),
    };
    out.write_all(body.as_bytes()).map_err(data_error)
}

fn export_distances(args: DistanceArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let index = load_index(&args.projection.index).map_err(data_error)?;
    let words = parse_word_list(&args.projection.words);
    let request = QueryRequest::new(words.clone());
    let options = QueryOptions { normalize: args.projection.normalize, ..QueryOptions::default() };
    let (a, _) = project(&index, &request, &options).map_err(data_error)?;
    out.write_all(distances_tsv(&words, index.config(), &a).as_bytes()).map_err(data_error)
}

fn serve_cmd(args: ServeArgs) -> Result<(), Failure> {
    let index = load_index(&args.index).map_err(data_error)?;
    let options = QueryOptions { normalize: args.normalize, ..QueryOptions::default() };
    let state = Arc::new(AppState::new(index, options, args.ui_dir));
    let runtime = tokio::runtime::Runtime::new().map_err(data_error)?;
    runtime.block_on(serve(state, args.addr)).map_err(data_error)
}
