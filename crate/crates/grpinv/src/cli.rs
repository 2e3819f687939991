//! The file format and subcommands behind the `grpinv` binary.
//!
//! # Input files
//!
//! A matrix family is a JSON document:
//!
//! ```json
//! {
//!   "p": 7,
//!   "n": 4,
//!   "d": 3,
//!   "entries": [
//!     {
//!       "name": "B5",
//!       "slices": [
//!         [[0,1,0,0],[-1,0,0,0],[0,0,0,0],[0,0,0,0]],
//!         [[0,0,0,1],[0,0,1,0],[0,-1,0,0],[-1,0,0,0]],
//!         [[0,0,0,0],[0,0,0,0],[0,0,0,1],[0,0,-1,0]]
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! * `p` is optional.  A file without it is *prime-generic*: the
//!   integer entries are reduced mod p for whichever primes a command
//!   asks for.  A file with `p` is *pinned*; commands then run at that
//!   prime only.
//! * `slices` holds `d` integer matrices, each `n` x `n`; slice `k` is
//!   the coefficient matrix of the k-th variable.  Entries may be
//!   negative.
//! * `omega_slots` (optional, per entry) lists 1-based positions
//!   `[k, i, j]` that are filled at reduction time with the canonical
//!   primitive element of the field, mirrored with negation at
//!   `[k, j, i]`; both underlying integer entries must be 0.  This is
//!   how one file describes a family that uses "a fixed non-square"
//!   uniformly over all primes.
//!
//! Every subcommand checks that the input matrices are skew-symmetric
//! with zero diagonal: at the integer level for prime-generic files,
//! mod p for pinned ones.
//!
//! # Subcommands
//!
//! * `invariants` — a table of requested invariants per matrix and
//!   prime (`np4`, `dim4`, `deg4`, `span4`, adjoint-side `np3adj`, ...
//!   plus `derived` and `centre`);
//! * `partition` — group the family by equality of full invariant
//!   fingerprints, and exhibit a small separating set of coordinates;
//! * `verify` — per-matrix group structure at one prime (order, class,
//!   exponent, derived/centre dimensions), cross-checked against a
//!   direct walk over group elements when the group is small enough;
//! * `isotest` — exhaustive isomorphism search between two named
//!   entries, returning a verified change of basis or a proof of
//!   non-isomorphism;
//! * `adjoint` — the n x d adjoint family as a JSON document.
//!
//! # Exit codes and streams
//!
//! 0 success; 2 unusable input (malformed JSON, bad flags, unknown
//! names); 3 a matrix that must be skew-symmetric is not; 4 the
//! requested computation exceeds its budget.  stdout carries data
//! only, rendered deterministically (identical bytes for identical
//! inputs and flags); diagnostics and warnings go to stderr.

use crate::fingerprint::{fingerprint, partition, FingerprintOptions, InvariantKey, Side};
use crate::gf::PrimeField;
use crate::groups::GroupSpec;
use crate::isom::{isomorphic_bruteforce, verify_witness, IsoOutcome, DEFAULT_ISO_BUDGET};
use crate::linforms::{FpMatrix, IntMatrix};
use crate::rankloci::DEFAULT_BUDGET;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

/// Exit code for unusable input: malformed JSON, bad flags, unknown
/// entry or invariant names, bad primes.
pub const EXIT_INPUT: u8 = 2;
/// Exit code for a matrix that must be skew-symmetric but is not.
pub const EXIT_NOT_SKEW: u8 = 3;
/// Exit code for a computation that would exceed its budget.
pub const EXIT_BUDGET: u8 = 4;

/// A failure with the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    /// Process exit code (2, 3, 4, or 1 for internal inconsistencies).
    pub code: u8,
    /// Human-readable diagnostic, printed to stderr.
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

fn input_error(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_INPUT, message: message.into() }
}

/// Rank-locus invariants of skew-symmetric matrices of linear forms
/// over F_p, and of the finite p-groups they present.
#[derive(Debug, Parser)]
#[command(name = "grpinv", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// The subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate invariants of each matrix at each prime.
    Invariants(InvariantsArgs),
    /// Partition a family by equality of invariant fingerprints.
    Partition(PartitionArgs),
    /// Report the group structure behind each matrix at one prime.
    Verify(VerifyArgs),
    /// Exhaustively test two named matrices for isomorphism.
    Isotest(IsotestArgs),
    /// Emit the adjoint family as a JSON document.
    Adjoint(AdjointArgs),
}

/// Output format for tabular results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned, human-readable columns.
    Text,
    /// Comma-separated values with a header row.
    Csv,
    /// A JSON array of row objects with sorted keys.
    Json,
}

#[derive(Debug, Args)]
pub struct InvariantsArgs {
    /// Input matrix family (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Odd primes to evaluate at, comma-separated.  Defaults to the
    /// file's pinned prime, else 3,5,7.
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    /// Invariants to tabulate, comma-separated: np<k>, dim<k>, deg<k>,
    /// span<k>, their adjoint-side forms np<k>adj etc., derived,
    /// centre.  Defaults to np<n>, deg<n>, np<min(n,d)>adj, derived,
    /// centre.
    #[arg(long, value_delimiter = ',')]
    pub invariants: Option<Vec<String>>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Point-enumeration budget: refuse (exit 4) if a requested point
    /// count would have to visit more than this many points.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Input matrix family (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Odd primes to fingerprint over, comma-separated.  Defaults to
    /// the file's pinned prime, else 3,5,7.
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Point-enumeration budget: refuse (exit 4) if fingerprinting
    /// would have to visit more than this many points.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Input matrix family (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// The prime to verify at.  Required for prime-generic files.
    #[arg(long)]
    pub prime: Option<u64>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Largest group order that is cross-checked by walking all
    /// elements; larger groups report "skipped".
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct IsotestArgs {
    /// Input matrix family (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// The two entry names to compare, as NAME,NAME.
    #[arg(long)]
    pub pair: String,
    /// The prime to test at.  Required for prime-generic files.
    #[arg(long)]
    pub prime: Option<u64>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Search budget: refuse (exit 4) if |GL_n| * |GL_d| exceeds it.
    #[arg(long, default_value_t = DEFAULT_ISO_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct AdjointArgs {
    /// Input matrix family (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Reduce at this prime before taking adjoints.  Without it (and
    /// without a pinned prime in the file) the output stays
    /// prime-generic, which requires the family to be omega-free.
    #[arg(long)]
    pub prime: Option<u64>,
}

/// Entry point: parse arguments, run, print, exit.
pub fn run() -> std::process::ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(stdout) => {
            print!("{stdout}");
            std::process::ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::ExitCode::from(e.code)
        }
    }
}

/// Runs one subcommand and returns what should go to stdout.
pub fn dispatch(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Invariants(a) => cmd_invariants(a),
        Command::Partition(a) => cmd_partition(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Isotest(a) => cmd_isotest(a),
        Command::Adjoint(a) => cmd_adjoint(a),
    }
}

// ---------------------------------------------------------------------------
// Input files

/// The on-disk JSON schema of a matrix family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFileDoc {
    /// Pinned prime; absent for prime-generic families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    /// Matrix side length.
    pub n: usize,
    /// Number of variables (= slices per entry).
    pub d: usize,
    /// The matrices.
    pub entries: Vec<MatrixEntryDoc>,
}

/// One named matrix in a family file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixEntryDoc {
    /// Unique label; letters, digits, `_`, `-`, `.`, `(`, `)` only.
    pub name: String,
    /// d slices, each an n x n integer matrix.
    pub slices: Vec<Vec<Vec<i64>>>,
    /// 1-based `[slice, row, col]` positions for the primitive
    /// element.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omega_slots: Vec<[usize; 3]>,
}

/// A parsed and validated family.
#[derive(Debug, Clone)]
pub struct LoadedFamily {
    /// Pinned prime, if any.
    pub p: Option<u64>,
    /// Matrix side length.
    pub n: usize,
    /// Number of variables.
    pub d: usize,
    /// Validated matrices, in file order.
    pub entries: Vec<(String, IntMatrix)>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '(' | ')'))
}

/// Parses the JSON text of a family file.  The error message for
/// malformed JSON carries serde's line and column.
pub fn parse_matrix_file(text: &str) -> Result<LoadedFamily, CliError> {
    let doc: MatrixFileDoc = serde_json::from_str(text).map_err(|e| {
        input_error(format!("malformed JSON at line {}, column {}: {e}", e.line(), e.column()))
    })?;
    if doc.n == 0 || doc.d == 0 {
        return Err(input_error("n and d must both be at least 1"));
    }
    let mut entries = Vec::with_capacity(doc.entries.len());
    let mut seen = std::collections::HashSet::new();
    for entry in &doc.entries {
        if !valid_name(&entry.name) {
            return Err(input_error(format!(
                "entry name '{}' is empty or contains unsupported characters",
                entry.name
            )));
        }
        if !seen.insert(entry.name.clone()) {
            return Err(input_error(format!("duplicate entry name '{}'", entry.name)));
        }
        let mut slots = Vec::with_capacity(entry.omega_slots.len());
        for &[k, i, j] in &entry.omega_slots {
            if k == 0 || i == 0 || j == 0 {
                return Err(input_error(format!(
                    "entry '{}': omega slots are 1-based; [{k}, {i}, {j}] has a zero",
                    entry.name
                )));
            }
            slots.push((k - 1, i - 1, j - 1));
        }
        let m = IntMatrix::new(doc.n, doc.d, entry.slices.clone(), slots)
            .map_err(|e| input_error(format!("entry '{}': {e}", entry.name)))?;
        entries.push((entry.name.clone(), m));
    }
    if let Some(p) = doc.p {
        PrimeField::new(p).map_err(|e| input_error(format!("bad pinned prime {p}: {e}")))?;
    }
    Ok(LoadedFamily { p: doc.p, n: doc.n, d: doc.d, entries })
}

fn load_family(path: &PathBuf) -> Result<LoadedFamily, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix_file(&text)
}

fn int_skew(m: &IntMatrix) -> bool {
    let n = m.n();
    m.slices().iter().all(|s| (0..n).all(|i| (0..n).all(|j| s[i][j] == -s[j][i])))
}

/// Every entry must be skew-symmetric with zero diagonal: mod p for
/// pinned families, at the integer level for prime-generic ones (which
/// makes them skew mod every prime).
fn require_skew(family: &LoadedFamily) -> Result<(), CliError> {
    for (name, m) in &family.entries {
        let ok = match family.p {
            Some(p) => {
                let field = PrimeField::new(p).expect("pinned prime validated at parse");
                GroupSpec::new(m.reduce(field)).is_ok()
            }
            None => int_skew(m),
        };
        if !ok {
            return Err(CliError {
                code: EXIT_NOT_SKEW,
                message: format!("entry '{name}' is not skew-symmetric with zero diagonal"),
            });
        }
    }
    Ok(())
}

fn validated_prime(p: u64) -> Result<u64, CliError> {
    PrimeField::new(p).map_err(|e| input_error(format!("bad prime {p}: {e}")))?;
    Ok(p)
}

/// The primes a multi-prime command runs at: the pinned prime, the
/// --primes list, or the default 3,5,7.
fn primes_for(pinned: Option<u64>, flag: &Option<Vec<u64>>) -> Result<Vec<u64>, CliError> {
    let list = match (pinned, flag) {
        (Some(p), None) => vec![p],
        (Some(p), Some(list)) => {
            if list.iter().all(|&q| q == p) && !list.is_empty() {
                vec![p]
            } else {
                return Err(input_error(format!(
                    "the file is pinned to p = {p}; --primes may only repeat that prime"
                )));
            }
        }
        (None, None) => vec![3, 5, 7],
        (None, Some(list)) => {
            if list.is_empty() {
                return Err(input_error("--primes needs at least one prime"));
            }
            let mut v = list.clone();
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    for &p in &list {
        validated_prime(p)?;
    }
    Ok(list)
}

/// The single prime a one-prime command runs at.
fn single_prime(pinned: Option<u64>, flag: Option<u64>) -> Result<u64, CliError> {
    match (pinned, flag) {
        (Some(p), None) => Ok(p),
        (Some(p), Some(q)) if p == q => Ok(p),
        (Some(p), Some(q)) => Err(input_error(format!(
            "the file is pinned to p = {p}, which contradicts --prime {q}"
        ))),
        (None, Some(q)) => validated_prime(q),
        (None, None) => {
            Err(input_error("the file is prime-generic: pass --prime to pick a prime"))
        }
    }
}

// ---------------------------------------------------------------------------
// Tables

/// One output cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    /// Not computed; renders as `n/a` (text, CSV) or `null` (JSON).
    Absent,
    /// A number.
    Num(u64),
    /// A short word or symbolic value.
    Text(String),
    /// A small matrix; renders as nested JSON arrays, or as
    /// space/semicolon-separated entries in CSV.
    Matrix(Vec<Vec<u64>>),
    /// A boolean.
    Bool(bool),
}

/// A rectangular result: one key column plus named value columns.
/// Renders byte-deterministically in all three formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultTable {
    /// Header of the key column (`name`, `pair`, ...).
    pub key_column: String,
    /// Headers of the value columns.
    pub columns: Vec<String>,
    /// Rows: key plus one cell per value column.
    pub rows: Vec<(String, Vec<Cell>)>,
}

impl ResultTable {
    /// Renders the table in the requested format, trailing newline
    /// included.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn flat_cell(cell: &Cell) -> String {
        match cell {
            Cell::Absent => "n/a".to_string(),
            Cell::Num(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Matrix(rows) => {
                let rows: Vec<String> = rows
                    .iter()
                    .map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
                    .collect();
                rows.join(";")
            }
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn render_text(&self) -> String {
        let headers: Vec<String> =
            std::iter::once(self.key_column.clone()).chain(self.columns.iter().cloned()).collect();
        let mut widths: Vec<usize> = headers.iter().map(String::len).collect();
        let flat_rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|(key, cells)| {
                std::iter::once(key.clone()).chain(cells.iter().map(Self::flat_cell)).collect()
            })
            .collect();
        for row in &flat_rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&headers).chain(flat_rows.iter()) {
            let mut line = String::new();
            for (w, cell) in widths.iter().zip(row) {
                let _ = write!(line, "{cell:<w$}  ");
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{},{}", self.key_column, self.columns.join(","));
        for (key, cells) in &self.rows {
            let cells: Vec<String> = cells.iter().map(Self::flat_cell).collect();
            let _ = writeln!(out, "{key},{}", cells.join(","));
        }
        out
    }

    fn render_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|(key, cells)| {
                let mut obj = serde_json::Map::new();
                obj.insert(self.key_column.clone(), serde_json::Value::from(key.clone()));
                for (col, cell) in self.columns.iter().zip(cells) {
                    let value = match cell {
                        Cell::Absent => serde_json::Value::Null,
                        Cell::Num(v) => serde_json::Value::from(*v),
                        Cell::Text(s) => serde_json::Value::from(s.clone()),
                        Cell::Matrix(rows) => serde_json::Value::from(rows.clone()),
                        Cell::Bool(b) => serde_json::Value::from(*b),
                    };
                    obj.insert(col.clone(), value);
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&rows).expect("tables serialize");
        out.push('\n');
        out
    }
}

// ---------------------------------------------------------------------------
// invariants

fn parse_keys(names: &[String]) -> Result<Vec<InvariantKey>, CliError> {
    names
        .iter()
        .map(|s| {
            InvariantKey::from_str(s).map_err(|e| input_error(format!("bad invariant '{s}': {e}")))
        })
        .collect()
}

fn default_keys(n: usize, d: usize) -> Vec<InvariantKey> {
    vec![
        InvariantKey::Points { side: Side::Direct, k: n },
        InvariantKey::Degree { side: Side::Direct, k: n },
        InvariantKey::Points { side: Side::Adjoint, k: n.min(d) },
        InvariantKey::DerivedDim,
        InvariantKey::CentreDim,
    ]
}

fn key_level(key: &InvariantKey) -> Option<(Side, usize)> {
    match *key {
        InvariantKey::Points { side, k }
        | InvariantKey::AffineDim { side, k }
        | InvariantKey::Degree { side, k }
        | InvariantKey::SpanDim { side, k } => Some((side, k)),
        InvariantKey::DerivedDim | InvariantKey::CentreDim => None,
    }
}

fn validate_keys(keys: &[InvariantKey], n: usize, d: usize) -> Result<(), CliError> {
    for key in keys {
        if let Some((side, k)) = key_level(key) {
            let limit = match side {
                Side::Direct => n,
                Side::Adjoint => n.min(d),
            };
            if k > limit {
                return Err(input_error(format!(
                    "invariant '{key}' is out of range for shape n = {n}, d = {d} \
                     (largest level on that side: {limit})"
                )));
            }
        }
    }
    Ok(())
}

/// Which sides need point enumeration, and how many points each visit:
/// p^d for the direct matrix (d variables), p^n for the adjoint.
fn preflight_points(
    keys: &[InvariantKey],
    primes: &[u64],
    n: usize,
    d: usize,
    budget: u64,
) -> Result<(), CliError> {
    let needs_points = |key: &InvariantKey| {
        matches!(key, InvariantKey::Points { .. } | InvariantKey::SpanDim { .. })
    };
    let mut exponents = Vec::new();
    if keys.iter().any(|k| needs_points(k) && key_level(k).map(|(s, _)| s) == Some(Side::Direct)) {
        exponents.push(d);
    }
    if keys.iter().any(|k| needs_points(k) && key_level(k).map(|(s, _)| s) == Some(Side::Adjoint)) {
        exponents.push(n);
    }
    for &p in primes {
        for &e in &exponents {
            let required = (p as u128).saturating_pow(e as u32);
            if required > budget as u128 {
                return Err(CliError {
                    code: EXIT_BUDGET,
                    message: format!(
                        "point enumeration at p = {p} needs p^{e} = {required} points, over \
                         the budget of {budget}; raise --budget or drop point-count invariants"
                    ),
                });
            }
        }
    }
    Ok(())
}

fn fingerprint_error(e: crate::fingerprint::FingerprintError) -> CliError {
    input_error(format!("fingerprint failed: {e}"))
}

fn cmd_invariants(a: &InvariantsArgs) -> Result<String, CliError> {
    let family = load_family(&a.input)?;
    require_skew(&family)?;
    let primes = primes_for(family.p, &a.primes)?;
    let keys = match &a.invariants {
        Some(names) => parse_keys(names)?,
        None => default_keys(family.n, family.d),
    };
    validate_keys(&keys, family.n, family.d)?;
    preflight_points(&keys, &primes, family.n, family.d, a.budget)?;
    let options = FingerprintOptions {
        point_counts: keys
            .iter()
            .any(|k| matches!(k, InvariantKey::Points { .. } | InvariantKey::SpanDim { .. })),
        ideal_measures: keys
            .iter()
            .any(|k| matches!(k, InvariantKey::AffineDim { .. } | InvariantKey::Degree { .. })),
        budget: a.budget,
    };
    let mut rows = Vec::with_capacity(family.entries.len());
    for (name, m) in &family.entries {
        let fp = fingerprint(m, &primes, &options).map_err(fingerprint_error)?;
        let mut cells = Vec::new();
        for &key in &keys {
            for &p in &primes {
                cells.push(match fp.get(p, key) {
                    Some(v) => Cell::Num(v),
                    None => Cell::Absent,
                });
            }
        }
        rows.push((name.clone(), cells));
    }
    let columns = keys
        .iter()
        .flat_map(|key| primes.iter().map(move |p| format!("{key}_p{p}")))
        .collect();
    Ok(ResultTable { key_column: "name".to_string(), columns, rows }.render(a.format))
}

// ---------------------------------------------------------------------------
// partition

fn cmd_partition(a: &PartitionArgs) -> Result<String, CliError> {
    let family = load_family(&a.input)?;
    require_skew(&family)?;
    let primes = primes_for(family.p, &a.primes)?;
    // Partition fingerprints carry every invariant, so both sides get
    // enumerated: p^d points directly, p^n for the adjoint.
    let all_points = [
        InvariantKey::Points { side: Side::Direct, k: 1 },
        InvariantKey::Points { side: Side::Adjoint, k: 1 },
    ];
    preflight_points(&all_points, &primes, family.n, family.d, a.budget)?;
    let options = FingerprintOptions { point_counts: true, ideal_measures: true, budget: a.budget };
    let report = partition(&family.entries, &primes, &options).map_err(fingerprint_error)?;
    let mut class_of = vec![0usize; report.labels.len()];
    for (c, class) in report.classes.iter().enumerate() {
        for &i in class {
            class_of[i] = c + 1;
        }
    }
    let mut columns = vec!["class".to_string()];
    columns.extend(report.separating.iter().map(|(p, key)| format!("{key}_p{p}")));
    let rows: Vec<(String, Vec<Cell>)> = report
        .labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let mut cells = vec![Cell::Num(class_of[i] as u64)];
            for &(p, key) in &report.separating {
                cells.push(match report.fingerprints[i].get(p, key) {
                    Some(v) => Cell::Num(v),
                    None => Cell::Absent,
                });
            }
            (label.clone(), cells)
        })
        .collect();
    let table = ResultTable { key_column: "name".to_string(), columns, rows };
    let mut out = table.render(a.format);
    if a.format == Format::Text {
        let _ = writeln!(out, "\nclasses: {}", report.classes.len());
        for (c, class) in report.classes_by_label().iter().enumerate() {
            let _ = writeln!(out, "class {} (size {}): {}", c + 1, class.len(), class.join(" "));
        }
        let separating: Vec<String> =
            report.separating.iter().map(|(p, key)| format!("{key}_p{p}")).collect();
        let _ = writeln!(
            out,
            "separating invariants: {}",
            if separating.is_empty() { "none needed".to_string() } else { separating.join(", ") }
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(a: &VerifyArgs) -> Result<String, CliError> {
    let family = load_family(&a.input)?;
    let p = single_prime(family.p, a.prime)?;
    require_skew(&family)?;
    let field = PrimeField::new(p).expect("validated");
    let mut rows = Vec::with_capacity(family.entries.len());
    for (name, m) in &family.entries {
        let g = GroupSpec::new(m.reduce(field)).expect("skewness checked above");
        let report = g.structural_report();
        if report.is_abelian() {
            eprintln!(
                "warning: entry '{name}' is abelian at p = {p} \
                 (nilpotency class <= 1, not a class-2 group)"
            );
        }
        let class = if report.is_abelian() { 1 } else { 2 };
        let checked = match g.enumeration_check(a.budget as u128) {
            None => Cell::Text("skipped".to_string()),
            Some(walk) if walk.agrees_with(&report) => Cell::Text("ok".to_string()),
            Some(walk) => {
                return Err(CliError {
                    code: 1,
                    message: format!(
                        "entry '{name}': the element walk disagrees with the ideal-theoretic \
                         report ({walk:?} vs {report:?}); this is a bug in the tool"
                    ),
                });
            }
        };
        rows.push((
            name.clone(),
            vec![
                Cell::Text(report.order_string()),
                Cell::Num(class),
                Cell::Num(report.exponent()),
                Cell::Num(report.derived_dim as u64),
                Cell::Num(report.centre_dim as u64),
                checked,
            ],
        ));
    }
    let columns =
        ["order", "class", "exponent", "derived", "centre", "checked"].map(String::from).to_vec();
    Ok(ResultTable { key_column: "name".to_string(), columns, rows }.render(a.format))
}

// ---------------------------------------------------------------------------
// isotest

fn matrix_rows(m: &FpMatrix) -> Vec<Vec<u64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

fn cmd_isotest(a: &IsotestArgs) -> Result<String, CliError> {
    let family = load_family(&a.input)?;
    require_skew(&family)?;
    let p = single_prime(family.p, a.prime)?;
    let Some((first, second)) = a.pair.split_once(',') else {
        return Err(input_error("--pair wants two entry names: NAME,NAME"));
    };
    let (first, second) = (first.trim(), second.trim());
    let index_of = |wanted: &str| -> Result<usize, CliError> {
        family.entries.iter().position(|(name, _)| name == wanted).ok_or_else(|| {
            let known: Vec<&str> = family.entries.iter().map(|(n, _)| n.as_str()).collect();
            input_error(format!("no entry named '{wanted}' (known: {})", known.join(", ")))
        })
    };
    let (i, j) = (index_of(first)?, index_of(second)?);
    let field = PrimeField::new(p).expect("validated");
    let b = family.entries[i].1.reduce(field);
    let c = family.entries[j].1.reduce(field);
    let pair = format!("{first} vs {second}");
    let row = match isomorphic_bruteforce(&b, &c, a.budget) {
        IsoOutcome::Isomorphic(w) => {
            if !verify_witness(&b, &c, &w) {
                return Err(CliError {
                    code: 1,
                    message: format!(
                        "the witness returned for {pair} fails verification; \
                         this is a bug in the tool"
                    ),
                });
            }
            vec![
                Cell::Text("isomorphic".to_string()),
                Cell::Matrix(matrix_rows(&w.x)),
                Cell::Matrix(matrix_rows(&w.z)),
                Cell::Bool(true),
            ]
        }
        IsoOutcome::NonIsomorphic => {
            vec![Cell::Text("non-isomorphic".to_string()), Cell::Absent, Cell::Absent, Cell::Absent]
        }
        IsoOutcome::BudgetExceeded { required, budget } => {
            return Err(CliError {
                code: EXIT_BUDGET,
                message: format!(
                    "isomorphism search for {pair} at p = {p} needs |GL_{}| * |GL_{}| = \
                     {required} candidates, over the budget of {budget}; raise --budget",
                    family.n, family.d
                ),
            });
        }
    };
    let columns = ["outcome", "x", "z", "verified"].map(String::from).to_vec();
    let table =
        ResultTable { key_column: "pair".to_string(), columns, rows: vec![(pair, row)] };
    Ok(table.render(a.format))
}

// ---------------------------------------------------------------------------
// adjoint

/// The on-disk JSON schema of an adjoint family: like a matrix family,
/// but rectangular (`rows` x `cols`) with `nvars` slices per entry and
/// no skewness guarantee.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdjointFileDoc {
    /// The prime the family was reduced at; absent when prime-generic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    /// Rows of each matrix (the input's n).
    pub rows: usize,
    /// Columns of each matrix (the input's d).
    pub cols: usize,
    /// Number of variables (= slices per entry; the input's n).
    pub nvars: usize,
    /// The adjoint matrices, in input order with the same names.
    pub entries: Vec<MatrixEntryDoc>,
}

fn cmd_adjoint(a: &AdjointArgs) -> Result<String, CliError> {
    let family = load_family(&a.input)?;
    require_skew(&family)?;
    let has_omega = family.entries.iter().any(|(_, m)| !m.omega_slots().is_empty());
    let concrete = match (family.p, a.prime) {
        (None, None) if has_omega => {
            return Err(input_error(
                "the family uses omega slots, so its adjoint depends on the prime: pass --prime",
            ));
        }
        (None, None) => None,
        (pinned, flag) => Some(single_prime(pinned, flag)?),
    };
    let (n, d) = (family.n, family.d);
    let mut entries = Vec::with_capacity(family.entries.len());
    for (name, m) in &family.entries {
        let slices: Vec<Vec<Vec<i64>>> = match concrete {
            Some(p) => {
                let field = PrimeField::new(p).expect("validated");
                let adj = m.reduce(field).adjoint();
                (0..n)
                    .map(|v| {
                        (0..n)
                            .map(|i| (0..d).map(|k| adj.slice(v).get(i, k) as i64).collect())
                            .collect()
                    })
                    .collect()
            }
            None => (0..n)
                .map(|v| {
                    (0..n).map(|i| (0..d).map(|k| m.slices()[k][i][v]).collect()).collect()
                })
                .collect(),
        };
        entries.push(MatrixEntryDoc { name: name.clone(), slices, omega_slots: Vec::new() });
    }
    let doc = AdjointFileDoc { p: concrete, rows: n, cols: d, nvars: n, entries };
    let mut out = serde_json::to_string_pretty(&doc).expect("documents serialize");
    out.push('\n');
    Ok(out)
}
