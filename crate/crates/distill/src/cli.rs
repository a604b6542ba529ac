//! Command implementations. Each command computes its full output before
//! anything is written, so a failing command leaves no files behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use distill_core::automata::Letter;
use distill_core::decide::{bounded_check, cross_validate, decide_fragment, CrossValidation};
use distill_core::embed::{embed_instance, EmbedError, LdsInstance};
use distill_core::reduce::{letter_of, reduce_full, ReduceError, ReduceOptions, ReducedInstance, StochasticInstance};
use distill_core::spectra::{analyze, validate_stochastic_spectrum, SpectraError};
use distill_core::{RatMatrix, Rational};
use serde_json::{json, Map, Value};

use crate::doc::{parse_vector, vector_value, DocError, InstanceDocument, Kind};
use crate::report;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Runtime failure not covered by a more specific code.
pub const EXIT_OTHER: i32 = 1;
/// Malformed document or command line.
pub const EXIT_PARSE: i32 = 2;
/// Well-formed input violating a mathematical precondition, such as a
/// matrix that is not column-stochastic.
pub const EXIT_INVARIANT: i32 = 3;
/// Embedding input with a non-homogeneous target.
pub const EXIT_HOMOGENEITY: i32 = 4;

pub const DEFAULT_HORIZON: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Reduce,
    Decide,
    Embed,
    Simulate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Reduce => "reduce",
            Command::Decide => "decide",
            Command::Embed => "embed",
            Command::Simulate => "simulate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub command: Command,
    pub input: PathBuf,
    pub out: Option<PathBuf>,
    pub horizon: usize,
    pub steps: usize,
    pub stationary: Option<PathBuf>,
    pub mcap: Option<usize>,
}

impl Options {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        Options {
            command,
            input: input.into(),
            out: None,
            horizon: DEFAULT_HORIZON,
            steps: 0,
            stationary: None,
            mcap: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}: {error}")]
    Parse { file: String, error: DocError },
    #[error("{0}")]
    Invariant(String),
    #[error("target {target}, atom {atom} ({atom_text}) is not homogeneous")]
    Homogeneity {
        target: usize,
        atom: usize,
        atom_text: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::Homogeneity { .. } => EXIT_HOMOGENEITY,
            CliError::Io { .. } | CliError::Other(_) => EXIT_OTHER,
        }
    }
}

fn parse_error(file: &Path, error: impl Into<String>) -> CliError {
    CliError::Parse {
        file: file.display().to_string(),
        error: DocError {
            path: String::new(),
            line: None,
            message: error.into(),
        },
    }
}

impl From<ReduceError> for CliError {
    fn from(e: ReduceError) -> Self {
        match e {
            ReduceError::Spectra(SpectraError::DecayNotFound { .. })
            | ReduceError::SingularBasis { .. }
            | ReduceError::SingularB => CliError::Other(e.to_string()),
            ReduceError::Spectra(_)
            | ReduceError::NegativeInitial { .. }
            | ReduceError::InitialSum(_)
            | ReduceError::SpectrumValidation(_) => CliError::Invariant(e.to_string()),
            ReduceError::Automaton(_)
            | ReduceError::InitialLength { .. }
            | ReduceError::TargetDimension { .. }
            | ReduceError::SpecAlphabet { .. } => CliError::Other(e.to_string()),
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        ReduceError::Spectra(e).into()
    }
}

/// Result of a command: text for standard output and files to write.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(PathBuf, String)>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load(path: &Path, expected: Kind) -> Result<InstanceDocument, CliError> {
    let doc = InstanceDocument::parse(&read(path)?).map_err(|error| CliError::Parse {
        file: path.display().to_string(),
        error,
    })?;
    if doc.kind != expected {
        return Err(parse_error(
            path,
            format!("expected a {} document, found {}", expected.name(), doc.kind.name()),
        ));
    }
    Ok(doc)
}

fn stochastic(doc: InstanceDocument) -> Result<StochasticInstance, CliError> {
    Ok(StochasticInstance::new(doc.matrix, doc.initial, doc.targets, doc.spec)?)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

/// Places `main` on stdout, or in `--out` when given.
fn emit(opts: &Options, main: String) -> Output {
    match &opts.out {
        Some(path) => Output {
            stdout: String::new(),
            files: vec![(path.clone(), main)],
        },
        None => Output {
            stdout: main,
            files: Vec::new(),
        },
    }
}

fn with_timing(mut report: Map<String, Value>, start: Instant) -> Value {
    report.insert(
        "timing".into(),
        json!({"elapsed_ms": start.elapsed().as_secs_f64() * 1e3}),
    );
    Value::Object(report)
}

fn header(command: Command) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), command.name().into());
    m
}

fn spectral_section(
    inst: &StochasticInstance,
    mcap: Option<usize>,
    report: &mut Map<String, Value>,
) -> Result<(), CliError> {
    let profile = analyze(inst.matrix());
    let validation = validate_stochastic_spectrum(inst.matrix(), &profile, mcap)?;
    report.insert("profile".into(), report::profile(&profile));
    report.insert("validation".into(), report::validation(&validation));
    if !validation.passed() {
        return Err(CliError::Invariant(format!(
            "spectrum is not that of a stochastic matrix: {}",
            pretty(&report::validation(&validation))
        )));
    }
    Ok(())
}

fn reduce_instance(inst: &StochasticInstance, mcap: Option<usize>) -> Result<ReducedInstance, CliError> {
    Ok(reduce_full(inst, &ReduceOptions { mcap })?)
}

/// The reduced instance as an LDS document, atoms scaled to coprime integer
/// coefficients.
pub fn reduced_document(red: &ReducedInstance) -> InstanceDocument {
    InstanceDocument {
        kind: Kind::Lds,
        matrix: red.a.clone(),
        initial: red.v.clone(),
        targets: red.targets3.iter().map(|t| t.integer_scaled()).collect(),
        intrinsic_dim: Vec::new(),
        spec: red.spec3.clone(),
    }
}

pub fn run(opts: &Options) -> Result<Output, CliError> {
    match opts.command {
        Command::Analyze => cmd_analyze(opts),
        Command::Reduce => cmd_reduce(opts),
        Command::Decide => cmd_decide(opts),
        Command::Embed => cmd_embed(opts),
        Command::Simulate => cmd_simulate(opts),
    }
}

pub fn cmd_analyze(opts: &Options) -> Result<Output, CliError> {
    let start = Instant::now();
    let inst = stochastic(load(&opts.input, Kind::Markov)?)?;
    let mut report = header(Command::Analyze);
    spectral_section(&inst, opts.mcap, &mut report)?;
    Ok(emit(opts, pretty(&with_timing(report, start))))
}

pub fn cmd_reduce(opts: &Options) -> Result<Output, CliError> {
    let start = Instant::now();
    let inst = stochastic(load(&opts.input, Kind::Markov)?)?;
    let mut report = header(Command::Reduce);
    spectral_section(&inst, opts.mcap, &mut report)?;
    let red = reduce_instance(&inst, opts.mcap)?;
    report.insert("certificate".into(), report::certificate(&red));
    let lds = reduced_document(&red);
    let report = with_timing(report, start);
    Ok(match &opts.out {
        Some(path) => Output {
            stdout: pretty(&report),
            files: vec![(path.clone(), lds.to_json_string())],
        },
        None => Output {
            stdout: pretty(&json!({"instance": lds.to_value(), "report": report})),
            files: Vec::new(),
        },
    })
}

pub fn cmd_decide(opts: &Options) -> Result<Output, CliError> {
    let start = Instant::now();
    let doc = load(&opts.input, Kind::Markov)?;
    let intrinsic = doc.intrinsic_dims();
    let inst = stochastic(doc)?;
    let mut report = header(Command::Decide);
    spectral_section(&inst, opts.mcap, &mut report)?;
    let red = reduce_instance(&inst, opts.mcap)?;
    report.insert("certificate".into(), report::certificate(&red));
    let verdict = decide_fragment(&inst, &red, &intrinsic);
    report.insert("verdict".into(), report::verdict(&verdict));
    if opts.horizon > 0 {
        let (letters, states) = bounded_check(&inst, opts.horizon);
        let agreement = match cross_validate(&inst, &red, opts.horizon) {
            CrossValidation::Agree { .. } => json!({"agrees": true}),
            CrossValidation::Diverge {
                index,
                direct,
                reconstructed,
            } => json!({
                "agrees": false,
                "index": index,
                "direct": direct,
                "reconstructed": reconstructed,
            }),
        };
        report.insert(
            "bounded_check".into(),
            json!({
                "horizon": opts.horizon,
                "letters": letters,
                "states": states,
                "cross_validation": agreement,
            }),
        );
    }
    Ok(emit(opts, pretty(&with_timing(report, start))))
}

fn load_stationary(path: &Path) -> Result<Vec<Rational>, CliError> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        file: path.display().to_string(),
        error: DocError {
            path: String::new(),
            line: Some((e.line(), e.column())),
            message: e.to_string(),
        },
    })?;
    let (list, field) = match &v {
        Value::Object(obj) => (obj.get("stationary").unwrap_or(&Value::Null), "stationary"),
        other => (other, ""),
    };
    parse_vector(list, field).map_err(|error| CliError::Parse {
        file: path.display().to_string(),
        error,
    })
}

pub fn cmd_embed(opts: &Options) -> Result<Output, CliError> {
    let doc = load(&opts.input, Kind::Lds)?;
    let intrinsic = doc.intrinsic_dim.clone();
    let stationary = opts.stationary.as_deref().map(load_stationary).transpose()?;
    let lds =
        LdsInstance::new(doc.matrix, doc.initial, doc.targets, doc.spec).map_err(|e| CliError::Other(e.to_string()))?;
    let (_, inst) = embed_instance(&lds, stationary.as_deref()).map_err(|e| match e {
        EmbedError::NotHomogeneous { target, atom } => CliError::Homogeneity {
            target,
            atom,
            atom_text: {
                let a = lds.targets()[target].expr().atoms()[atom];
                format!("{} {} 0", a.poly, a.rel.symbol())
            },
        },
        EmbedError::StationaryLength { .. }
        | EmbedError::NonPositiveStationary { .. }
        | EmbedError::StationarySum(_) => CliError::Invariant(e.to_string()),
        other => CliError::Other(other.to_string()),
    })?;
    let out = InstanceDocument {
        kind: Kind::Markov,
        matrix: inst.matrix().clone(),
        initial: inst.initial().to_vec(),
        targets: inst.targets().to_vec(),
        intrinsic_dim: intrinsic,
        spec: inst.spec().clone(),
    };
    Ok(emit(opts, out.to_json_string()))
}

/// Distributions (or LDS states) and letters for steps `0..steps`.
pub fn simulation_rows(
    m: &RatMatrix,
    x0: &[Rational],
    targets: &[distill_core::semialg::SemialgebraicSet],
    steps: usize,
) -> Vec<(Vec<Rational>, Letter)> {
    let mut x = x0.to_vec();
    let mut rows = Vec::with_capacity(steps);
    for _ in 0..steps {
        let letter = letter_of(targets, &x);
        let next = m.mul_vec(&x);
        rows.push((std::mem::replace(&mut x, next), letter));
    }
    rows
}

pub fn cmd_simulate(opts: &Options) -> Result<Output, CliError> {
    let text = read(&opts.input)?;
    let doc = InstanceDocument::parse(&text).map_err(|error| CliError::Parse {
        file: opts.input.display().to_string(),
        error,
    })?;
    let kind = doc.kind;
    let (m, x0, targets) = match kind {
        Kind::Markov => {
            let inst = stochastic(doc)?;
            (inst.matrix().clone(), inst.initial().to_vec(), inst.targets().to_vec())
        }
        Kind::Lds => (doc.matrix, doc.initial, doc.targets),
    };
    let rows: Vec<Value> = simulation_rows(&m, &x0, &targets, opts.steps)
        .into_iter()
        .enumerate()
        .map(|(n, (x, letter))| {
            let members: Vec<usize> = (0..targets.len()).filter(|i| letter & (1 << i) != 0).collect();
            json!({"n": n, "state": vector_value(&x), "letter": letter, "targets": members})
        })
        .collect();
    let out = json!({"command": "simulate", "kind": kind.name(), "steps": opts.steps, "rows": rows});
    Ok(emit(opts, pretty(&out)))
}

/// Writes every file through a temporary sibling and an atomic rename.
pub fn commit(output: &Output) -> Result<(), CliError> {
    for (path, contents) in &output.files {
        let io = |source| CliError::Io {
            path: path.display().to_string(),
            source,
        };
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(contents.as_bytes()).map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
    }
    Ok(())
}
