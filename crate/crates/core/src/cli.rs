//! Command-line front end.
//!
//! ```text
//! dnfenum [--algo A] [--mode t10|t11] [--k K] [--lambda L] [--count] [--limit N]
//!         [--stats] [--format bits|flips] [--check-oracle] <file|->
//! dnfenum gen --kind random|monotone|kdnf|all-terms|sets --n N [--m M] [--k K] [--seed S]
//! dnfenum sweep --kind K --n N [--width W] --sizes 64,256 [--seed S] [--algo A] [--check-oracle]
//! ```
//!
//! Exit codes: 2 for usage errors, 3 for unreadable or unsupported input,
//! 4 when `--check-oracle` finds a mismatch.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::avg::{enum_avg, AvgMode};
use crate::classic::{enum_flashlight, enum_union_ordered, enum_union_priority};
use crate::dnf::{brute_force_models, Dnf};
use crate::format::{parse_dnf, parse_sets, write_sets};
use crate::generate::{generate_dnf, generate_sets, GenKind};
use crate::graycode::enum_term_models;
use crate::kdnf::{enum_kdnf, enum_kdnf_hybrid, KdnfConfig, DEFAULT_LAMBDA};
use crate::monotone::{
    enum_monotone_avg, enum_monotone_log, enum_monotone_rs, normalize_unate, MonotoneDnf, Unmask,
};
use crate::setunion::{enum_unions, unions_by_closure, SetFamily};
use crate::stats::{drive, DelayStats, ModelEnumerator};

/// Largest `n` accepted by `--check-oracle`.
pub const ORACLE_MAX_VARS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    TermGray,
    UnionPriority,
    UnionOrdered,
    Flashlight,
    Kdnf,
    KdnfHybrid,
    Avg,
    MonotoneRs,
    MonotoneAvg,
    MonotoneLog,
    Setunion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    T10,
    T11,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Bits,
    Flips,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Random,
    Monotone,
    Kdnf,
    AllTerms,
    Sets,
}

/// Algorithm choice plus its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Args)]
pub struct AlgoSpec {
    #[arg(long, value_enum, default_value = "flashlight")]
    pub algo: Algo,
    /// Branching policy of `avg`.
    #[arg(long, value_enum, default_value = "t11")]
    pub mode: Mode,
    /// Width bound for `kdnf`/`kdnf-hybrid` (default: widest term).
    #[arg(long)]
    pub k: Option<usize>,
    /// Hybrid cutoff factor for `kdnf-hybrid`.
    #[arg(long)]
    pub lambda: Option<f64>,
}

impl AlgoSpec {
    pub fn new(algo: Algo) -> AlgoSpec {
        AlgoSpec { algo, mode: Mode::T11, k: None, lambda: None }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    spec: AlgoSpec,
    /// Print only the number of models.
    #[arg(long)]
    count: bool,
    /// Stop after this many models.
    #[arg(long)]
    limit: Option<u64>,
    /// Write a JSON delay record to stderr.
    #[arg(long)]
    stats: bool,
    #[arg(long, value_enum, default_value = "bits")]
    format: OutputFormat,
    /// Compare the output with brute force (n <= 24).
    #[arg(long)]
    check_oracle: bool,
    /// Input file, `-` for stdin.
    input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Write a random instance.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        /// Width bound (default: n).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// One CSV row of delay statistics per generated instance.
    Sweep {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        /// Width bound of the generated terms (default: n).
        #[arg(long)]
        width: Option<usize>,
        /// Comma-separated values of m; may be empty.
        #[arg(long, default_value = "")]
        sizes: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        spec: AlgoSpec,
        #[arg(long)]
        check_oracle: bool,
    },
}

#[derive(Debug, Parser)]
#[command(name = "dnfenum", version, about = "Enumerate the models of a DNF formula")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Option<Cmd>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("oracle mismatch: {0}")]
    Oracle(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Oracle(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

/// A parsed input: a formula, or a set family for `setunion`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Dnf(Dnf),
    Sets(SetFamily),
}

impl Instance {
    pub fn num_vars(&self) -> usize {
        match self {
            Instance::Dnf(d) => d.num_vars(),
            Instance::Sets(f) => f.n(),
        }
    }

    pub fn num_items(&self) -> usize {
        match self {
            Instance::Dnf(d) => d.num_terms(),
            Instance::Sets(f) => f.len(),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Parses `text` as the input format `algo` expects.
pub fn parse_instance(algo: Algo, text: &str) -> Result<Instance, CliError> {
    if algo == Algo::Setunion {
        let (n, sets) = parse_sets(text).map_err(input_err)?;
        Ok(Instance::Sets(SetFamily::new(n, sets).map_err(input_err)?))
    } else {
        Ok(Instance::Dnf(parse_dnf(text).map_err(input_err)?))
    }
}

fn monotone_input(d: &Dnf) -> Result<(MonotoneDnf, Option<Vec<bool>>), CliError> {
    if d.is_monotone() {
        return Ok((MonotoneDnf::new(d.clone()).map_err(input_err)?, None));
    }
    let (m, mask) = normalize_unate(d).map_err(|e| CliError::Input(format!("{e}; input is not unate")))?;
    Ok((m, Some(mask)))
}

fn masked<E: ModelEnumerator + 'static>(e: E, mask: Option<Vec<bool>>) -> Box<dyn ModelEnumerator> {
    match mask {
        Some(mask) => Box::new(Unmask::new(e, mask)),
        None => Box::new(e),
    }
}

/// The formula actually enumerated by `algo` (term-gray uses the first term).
fn target_dnf(algo: Algo, d: &Dnf) -> Result<Dnf, CliError> {
    if algo != Algo::TermGray {
        return Ok(d.clone());
    }
    let first = d.terms().first().ok_or_else(|| CliError::Input("term-gray needs at least one term".into()))?;
    Ok(Dnf::new(d.num_vars(), [first.clone()]).expect("term from a valid formula"))
}

/// Builds the enumerator selected by `spec` for `inst`.
pub fn build_enumerator(spec: &AlgoSpec, inst: &Instance) -> Result<Box<dyn ModelEnumerator>, CliError> {
    let d = match (spec.algo, inst) {
        (Algo::Setunion, Instance::Sets(f)) => return Ok(Box::new(enum_unions(f))),
        (Algo::Setunion, Instance::Dnf(_)) => return Err(CliError::Usage("setunion expects a .sets input".into())),
        (_, Instance::Sets(_)) => return Err(CliError::Usage("a .sets input needs --algo setunion".into())),
        (_, Instance::Dnf(d)) => d,
    };
    let kcfg = || {
        let k = spec.k.unwrap_or(d.max_width()).max(1);
        KdnfConfig::new(k).with_lambda(spec.lambda.unwrap_or(DEFAULT_LAMBDA))
    };
    Ok(match spec.algo {
        Algo::TermGray => {
            let t = target_dnf(Algo::TermGray, d)?;
            Box::new(enum_term_models(&t.terms()[0], d.num_vars()))
        }
        Algo::UnionPriority => Box::new(enum_union_priority(d)),
        Algo::UnionOrdered => Box::new(enum_union_ordered(d)),
        Algo::Flashlight => Box::new(enum_flashlight(d)),
        Algo::Kdnf => Box::new(enum_kdnf(d, kcfg()).map_err(input_err)?),
        Algo::KdnfHybrid => Box::new(enum_kdnf_hybrid(d, kcfg()).map_err(input_err)?),
        Algo::Avg => {
            let mode = match spec.mode {
                Mode::T10 => AvgMode::MergeAlways,
                Mode::T11 => AvgMode::SmallerSide,
            };
            Box::new(enum_avg(d, mode))
        }
        Algo::MonotoneRs => {
            let (m, mask) = monotone_input(d)?;
            masked(enum_monotone_rs(&m), mask)
        }
        Algo::MonotoneAvg => {
            let (m, mask) = monotone_input(d)?;
            masked(enum_monotone_avg(&m), mask)
        }
        Algo::MonotoneLog => {
            let (m, mask) = monotone_input(d)?;
            masked(enum_monotone_log(&m), mask)
        }
        Algo::Setunion => unreachable!("handled above"),
    })
}

/// Sorted brute-force answer for `inst` under `algo`.
pub fn oracle_models(algo: Algo, inst: &Instance) -> Result<Vec<Vec<bool>>, CliError> {
    if inst.num_vars() > ORACLE_MAX_VARS {
        return Err(CliError::Usage(format!("--check-oracle needs n <= {ORACLE_MAX_VARS}")));
    }
    Ok(match inst {
        Instance::Sets(f) => unions_by_closure(f),
        Instance::Dnf(d) => {
            let t = target_dnf(algo, d)?;
            let models = brute_force_models(&t).map_err(input_err)?;
            models.into_iter().map(|a| a.bits().to_vec()).collect()
        }
    })
}

/// Checks `got` (in output order) against the sorted oracle answer.
fn compare(mut got: Vec<Vec<bool>>, oracle: &[Vec<bool>], complete: bool) -> Result<(), CliError> {
    let emitted = got.len();
    got.sort();
    got.dedup();
    if got.len() != emitted {
        return Err(CliError::Oracle(format!("{} duplicate models", emitted - got.len())));
    }
    if let Some(bad) = got.iter().find(|m| oracle.binary_search(m).is_err()) {
        return Err(CliError::Oracle(format!("{} is not a model", bits_string(bad))));
    }
    if complete && got.len() != oracle.len() {
        return Err(CliError::Oracle(format!("{} models emitted, {} expected", got.len(), oracle.len())));
    }
    Ok(())
}

fn bits_string(m: &[bool]) -> String {
    m.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Streams models as `bits` lines or as flip lists.
struct ModelWriter<'a> {
    out: BufWriter<&'a mut dyn Write>,
    format: OutputFormat,
    prev: Option<Vec<bool>>,
    line: String,
    err: Option<io::Error>,
}

impl<'a> ModelWriter<'a> {
    fn new(out: &'a mut dyn Write, format: OutputFormat) -> ModelWriter<'a> {
        ModelWriter { out: BufWriter::with_capacity(1 << 16, out), format, prev: None, line: String::new(), err: None }
    }

    fn write(&mut self, m: &[bool]) {
        if self.err.is_some() {
            return;
        }
        self.line.clear();
        match (&mut self.prev, self.format) {
            (Some(prev), OutputFormat::Flips) => {
                for (i, (p, &b)) in prev.iter_mut().zip(m).enumerate() {
                    if *p != b {
                        if !self.line.is_empty() {
                            self.line.push(' ');
                        }
                        self.line.push_str(&(i + 1).to_string());
                        *p = b;
                    }
                }
            }
            (prev, _) => {
                self.line.extend(m.iter().map(|&b| if b { '1' } else { '0' }));
                if self.format == OutputFormat::Flips {
                    *prev = Some(m.to_vec());
                }
            }
        }
        self.line.push('\n');
        if let Err(e) = self.out.write_all(self.line.as_bytes()) {
            self.err = Some(e);
        }
    }

    fn finish(mut self) -> io::Result<()> {
        if let Some(e) = self.err.take() {
            return Err(e);
        }
        self.out.flush()
    }
}

/// Replays a `flips` stream into full models.
pub fn replay_flips(text: &str) -> Result<Vec<Vec<bool>>, String> {
    let mut lines = text.lines();
    let Some(first) = lines.next() else { return Ok(Vec::new()) };
    let mut cur: Vec<bool> = first.chars().map(|c| c == '1').collect();
    let mut out = vec![cur.clone()];
    for l in lines {
        for tok in l.split_whitespace() {
            let i: usize = tok.parse().map_err(|_| format!("bad index {tok:?}"))?;
            if i == 0 || i > cur.len() {
                return Err(format!("index {i} out of range"));
            }
            cur[i - 1] = !cur[i - 1];
        }
        out.push(cur.clone());
    }
    Ok(out)
}

/// Enumerates `inst`, writing models to `out` unless `count_only`.
/// Returns the statistics and, when `check` is set, verifies the output.
pub fn enumerate(
    spec: &AlgoSpec,
    inst: &Instance,
    limit: Option<u64>,
    format: Option<OutputFormat>,
    check: bool,
    out: &mut dyn Write,
) -> Result<DelayStats, CliError> {
    let oracle = if check { Some(oracle_models(spec.algo, inst)?) } else { None };
    let mut e = build_enumerator(spec, inst)?;
    let mut kept: Vec<Vec<bool>> = Vec::new();
    let mut w = format.map(|f| ModelWriter::new(out, f));
    let stats = drive(&mut e, limit, |m| {
        if let Some(w) = w.as_mut() {
            w.write(m);
        }
        if check {
            kept.push(m.to_vec());
        }
    });
    if let Some(w) = w {
        w.finish()?;
    }
    if let Some(oracle) = oracle {
        let complete = limit.is_none_or(|l| stats.n_models < l);
        compare(kept, &oracle, complete)?;
    }
    Ok(stats)
}

fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    match path {
        None => Err(CliError::Usage("missing input file (use - for stdin)".into())),
        Some(p) if p.as_os_str() == "-" => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(input_err)?;
            Ok(s)
        }
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
    }
}

fn run_enum(a: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let text = read_input(a.input.as_ref())?;
    let inst = parse_instance(a.spec.algo, &text)?;
    let format = if a.count { None } else { Some(a.format) };
    let stats = enumerate(&a.spec, &inst, a.limit, format, a.check_oracle, out)?;
    if a.count {
        writeln!(out, "{}", stats.n_models)?;
    }
    if a.stats {
        writeln!(err, "{}", stats.to_json())?;
    }
    Ok(())
}

/// Generates one instance of `kind`.
pub fn generate(kind: Kind, n: usize, m: usize, k: Option<usize>, seed: u64) -> Result<Instance, CliError> {
    let k = k.unwrap_or(n);
    let gk = match kind {
        Kind::Sets => return generate_sets(n, m, seed).map(Instance::Sets).map_err(|e| CliError::Usage(e.to_string())),
        Kind::Random => GenKind::Random,
        Kind::Monotone => GenKind::Monotone,
        Kind::Kdnf => GenKind::Kdnf,
        Kind::AllTerms => GenKind::AllTerms,
    };
    generate_dnf(gk, n, m, k, seed).map(Instance::Dnf).map_err(|e| CliError::Usage(e.to_string()))
}

pub const SWEEP_HEADER: &str = "m,n,n_models,avg_delay_steps,max_delay_steps,wall_ns";

fn parse_sizes(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Usage(format!("bad size {t:?}"))))
        .collect()
}

/// Runs `spec` on one generated instance per size and writes CSV rows.
/// Instance `i` uses seed `seed + i`.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    kind: Kind,
    n: usize,
    k: Option<usize>,
    sizes: &[usize],
    seed: u64,
    spec: &AlgoSpec,
    check: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for (i, &m) in sizes.iter().enumerate() {
        let inst = generate(kind, n, m, k, seed.wrapping_add(i as u64))?;
        let start = Instant::now();
        let s = enumerate(spec, &inst, None, None, check, &mut io::sink())?;
        let wall = start.elapsed().as_nanos();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            inst.num_items(),
            inst.num_vars(),
            s.n_models,
            s.avg_delay_steps,
            s.max_delay_steps,
            wall
        )?;
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cli.cmd {
        None => run_enum(&cli.run, out, err),
        Some(Cmd::Gen { kind, n, m, k, seed, output }) => {
            let inst = generate(kind, n, m, k, seed)?;
            let mut buf = Vec::new();
            match &inst {
                Instance::Dnf(d) => write!(buf, "{d}")?,
                Instance::Sets(f) => write_sets(&mut buf, f.n(), f.sets())?,
            }
            match output {
                Some(p) => fs::write(&p, buf)?,
                None => out.write_all(&buf)?,
            }
            Ok(())
        }
        Some(Cmd::Sweep { kind, n, width, sizes, seed, spec, check_oracle }) => {
            let sizes = parse_sizes(&sizes)?;
            sweep(kind, n, width, &sizes, seed, &spec, check_oracle, out)
        }
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "dnfenum: {e}");
            e.exit_code()
        }
    }
}
