//! The `gmt` command line.
//!
//! Data goes to `out`, diagnostics to `err`. Exit status is 0 on success,
//! 1 when the input was read but has errors, 2 when a file could not be
//! read or parsed.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rust_decimal::Decimal;

use crate::ag::{ag_to_gmt, gmt_to_ag, parse_ag, write_ag, AgError, TypeMap, LANDMARK_DESC};
use crate::anchoring::{build_landmark_table, resolve_document, Layer, ResolveContext, TokenIndex};
use crate::exec::Exec;
use crate::merge::{diff, merge_with, MergePolicy, ParallelPolicy};
use crate::model::GmtDocument;
use crate::registry::{validate_categories, Registry};
use crate::validate::validate_structure;
use crate::xml::{parse_gmt, serialize_gmt};

#[derive(Debug, Parser)]
#[command(
    name = "gmt",
    version,
    about = "Validate, convert, resolve, merge and diff GMT stand-off annotation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check structure and data categories.
    Validate {
        file: PathBuf,
        /// Registry file; the bundled registry is used otherwise.
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// Convert between annotation graphs and GMT layers.
    Convert {
        #[arg(long, value_enum)]
        from: Format,
        #[arg(long, value_enum)]
        to: Format,
        /// One AG file, or a landmark file plus layer files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output directory (ag to gmt) or file (gmt to ag).
        #[arg(short, long)]
        output: PathBuf,
        /// Type map: `att1Value<TAB>docType<TAB>payloadCat` per line.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Print the span or nodes each segment points at.
    Resolve {
        file: PathBuf,
        /// Token index: `tokenId<TAB>start<TAB>end` per line.
        #[arg(long)]
        tokens: Option<PathBuf>,
        /// Landmark document.
        #[arg(long)]
        landmarks: Option<PathBuf>,
        /// Annotation layer that id targets may point into.
        #[arg(long = "layer")]
        layers: Vec<PathBuf>,
        /// Report unresolvable segments as warnings.
        #[arg(long)]
        lenient: bool,
    },
    /// Merge layers that share a document type.
    Merge {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Output file; standard output otherwise.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Policy::KeepAll)]
        policy: Policy,
        /// Confidence for folded readings that have none.
        #[arg(long, default_value = "0")]
        fill: Decimal,
    },
    /// Compare two layers node by node.
    Diff { left: PathBuf, right: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ag,
    Gmt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    KeepAll,
    Dedup,
    FoldAlt,
}

impl From<Policy> for ParallelPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::KeepAll => ParallelPolicy::KeepAll,
            Policy::Dedup => ParallelPolicy::DedupIdentical,
            Policy::FoldAlt => ParallelPolicy::FoldToAlt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Success = 0,
    Findings = 1,
    Failure = 2,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// A command that stopped early, with the message for standard error.
struct Stop(ExitStatus, String);

impl Stop {
    fn failure(msg: impl Into<String>) -> Self {
        Stop(ExitStatus::Failure, msg.into())
    }

    fn findings(msg: impl Into<String>) -> Self {
        Stop(ExitStatus::Findings, msg.into())
    }
}

impl From<io::Error> for Stop {
    fn from(e: io::Error) -> Self {
        Stop::failure(e.to_string())
    }
}

type Outcome = Result<ExitStatus, Stop>;

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let result = match cli.command {
        Command::Validate { file, registry } => validate(&file, registry.as_deref(), out, err),
        Command::Convert {
            from,
            to,
            inputs,
            output,
            map,
        } => convert(from, to, &inputs, &output, map.as_deref(), err),
        Command::Resolve {
            file,
            tokens,
            landmarks,
            layers,
            lenient,
        } => resolve(
            &file,
            tokens.as_deref(),
            landmarks.as_deref(),
            &layers,
            lenient,
            out,
            err,
        ),
        Command::Merge {
            files,
            output,
            policy,
            fill,
        } => merge_files(&files, output.as_deref(), policy, fill, out, err),
        Command::Diff { left, right } => diff_files(&left, &right, out),
    };
    match result {
        Ok(status) => status,
        Err(Stop(status, msg)) => {
            let _ = writeln!(err, "gmt: {msg}");
            status
        }
    }
}

fn read(path: &Path) -> Result<String, Stop> {
    fs::read_to_string(path).map_err(|e| Stop::failure(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Stop> {
    fs::write(path, text).map_err(|e| Stop::failure(format!("{}: {e}", path.display())))
}

fn load_gmt(path: &Path) -> Result<(GmtDocument, Vec<String>), Stop> {
    let text = read(path)?;
    let (doc, diags) = parse_gmt(&text).map_err(|e| Stop::failure(format!("{}:{e}", path.display())))?;
    let notes = diags
        .warnings
        .iter()
        .map(|d| format!("{}:{d}", path.display()))
        .collect();
    Ok((doc, notes))
}

/// Loads and structurally validates every file, in parallel when enabled.
fn load_valid(paths: &[PathBuf], err: &mut dyn Write) -> Result<Vec<GmtDocument>, Stop> {
    let loaded = Exec::default().map(paths, |p| load_gmt(p));
    let mut docs = Vec::with_capacity(paths.len());
    for (path, r) in paths.iter().zip(loaded) {
        let (doc, notes) = r?;
        for n in notes {
            writeln!(err, "warning: {n}")?;
        }
        if let Some(f) = validate_structure(&doc).first_error() {
            return Err(Stop::findings(format!("{}: {f}", path.display())));
        }
        docs.push(doc);
    }
    Ok(docs)
}

fn validate(file: &Path, registry: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let registry = match registry {
        Some(p) => Registry::parse(&read(p)?).map_err(|e| Stop::failure(format!("{}: {e}", p.display())))?,
        None => Registry::default_registry(),
    };
    let (doc, notes) = load_gmt(file)?;
    for n in notes {
        writeln!(err, "warning: {n}")?;
    }
    let mut report = validate_structure(&doc);
    report.extend(validate_categories(&doc, &registry));
    out.write_all(report.render().as_bytes())?;
    Ok(if report.has_errors() {
        ExitStatus::Findings
    } else {
        ExitStatus::Success
    })
}

fn ag_failure(path: &Path, e: AgError) -> Stop {
    let msg = format!("{}: {}: {e}", path.display(), e.code());
    match e {
        AgError::Xml(_) | AgError::Malformed { .. } | AgError::BadMap { .. } => Stop::failure(msg),
        _ => Stop::findings(msg),
    }
}

fn convert(
    from: Format,
    to: Format,
    inputs: &[PathBuf],
    output: &Path,
    map: Option<&Path>,
    err: &mut dyn Write,
) -> Outcome {
    let map = match map {
        Some(p) => TypeMap::parse(&read(p)?).map_err(|e| ag_failure(p, e))?,
        None => TypeMap::default(),
    };
    match (from, to) {
        (Format::Ag, Format::Gmt) => {
            let [input] = inputs else {
                return Err(Stop::failure("ag to gmt takes exactly one input file"));
            };
            let graph = parse_ag(&read(input)?).map_err(|e| ag_failure(input, e))?;
            let docs = ag_to_gmt(&graph, &map).map_err(|e| ag_failure(input, e))?;
            let mut files = Vec::with_capacity(docs.len());
            for doc in &docs {
                let name = if doc.doc_type == LANDMARK_DESC {
                    "landmarks".to_string()
                } else {
                    doc.doc_type.clone()
                };
                let text = serialize_gmt(doc).map_err(|e| Stop::findings(format!("{name}: {e}")))?;
                files.push((output.join(format!("{name}.xml")), text));
            }
            fs::create_dir_all(output).map_err(|e| Stop::failure(format!("{}: {e}", output.display())))?;
            for (path, text) in files {
                write_file(&path, &text)?;
            }
            Ok(ExitStatus::Success)
        }
        (Format::Gmt, Format::Ag) => {
            let docs = load_valid(inputs, err)?;
            let (landmarks, layers): (Vec<GmtDocument>, Vec<GmtDocument>) =
                docs.into_iter().partition(|d| d.doc_type == LANDMARK_DESC);
            let [landmarks] = landmarks.as_slice() else {
                return Err(Stop::findings(format!(
                    "expected one {LANDMARK_DESC} document among the inputs, found {}",
                    landmarks.len()
                )));
            };
            let graph = gmt_to_ag(landmarks, &layers, &map).map_err(|e| ag_failure(Path::new("-"), e))?;
            let text = write_ag(&graph).map_err(|e| ag_failure(output, e))?;
            write_file(output, &text)?;
            Ok(ExitStatus::Success)
        }
        _ => Err(Stop::failure(
            "conversion must be --from ag --to gmt or --from gmt --to ag",
        )),
    }
}

fn resolve(
    file: &Path,
    tokens: Option<&Path>,
    landmarks: Option<&Path>,
    layer_files: &[PathBuf],
    lenient: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let tokens = match tokens {
        Some(p) => Some(TokenIndex::parse(&read(p)?).map_err(|e| Stop::failure(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let landmarks = match landmarks {
        Some(p) => {
            let (doc, _) = load_gmt(p)?;
            Some(build_landmark_table(&doc).map_err(|e| Stop::failure(format!("{}: {e}", p.display())))?)
        }
        None => None,
    };
    let mut layers = Vec::with_capacity(layer_files.len());
    for p in layer_files {
        let (doc, _) = load_gmt(p)?;
        layers.push(Layer::new(p.display().to_string(), &doc));
    }
    let (doc, notes) = load_gmt(file)?;
    for n in notes {
        writeln!(err, "warning: {n}")?;
    }
    let ctx = ResolveContext {
        tokens: tokens.as_ref(),
        landmarks: landmarks.as_ref(),
        layers: &layers,
    };
    let mut status = ExitStatus::Success;
    for r in resolve_document(&doc, &ctx, Exec::default()) {
        match (r.render(), &r.result) {
            (Some(line), _) => writeln!(out, "{line}")?,
            (None, Err(e)) => {
                let level = if lenient { "WARNING" } else { "ERROR" };
                writeln!(err, "{level}\t{}\t{}\t{e}", e.code(), r.path)?;
                if !lenient {
                    status = ExitStatus::Findings;
                }
            }
            (None, Ok(_)) => unreachable!("resolved segments always render"),
        }
    }
    Ok(status)
}

fn merge_files(
    files: &[PathBuf],
    output: Option<&Path>,
    policy: Policy,
    fill: Decimal,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let policy = MergePolicy::new(policy.into(), fill).map_err(|e| Stop::failure(e.to_string()))?;
    let docs = load_valid(files, err)?;
    let merged = merge_with(&docs, policy, Exec::default()).map_err(|e| Stop::findings(e.to_string()))?;
    for w in &merged.warnings {
        writeln!(err, "warning: {w}")?;
    }
    let text = serialize_gmt(&merged.doc).map_err(|e| Stop::findings(e.to_string()))?;
    match output {
        Some(p) => write_file(p, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(ExitStatus::Success)
}

fn diff_files(left: &Path, right: &Path, out: &mut dyn Write) -> Outcome {
    let (l, _) = load_gmt(left)?;
    let (r, _) = load_gmt(right)?;
    let report = diff(&l, &r);
    out.write_all(report.render().as_bytes())?;
    Ok(if report.all_equal() {
        ExitStatus::Success
    } else {
        ExitStatus::Findings
    })
}
