//! `simds` command-line tool.
//!
//! Results go to stdout, diagnostics to stderr. Exit codes: 0 ok, 2 bad input,
//! 3 budget exceeded, 4 count mismatch or internal inconsistency.

use std::io::{self, Read, Write};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use simds::census::{self, CensusOptions, CensusReport, CountMode, SetName};
use simds::construct::{self, SumConditions};
use simds::si::{self, SiVerdict};
use simds::wire::{MatrixJson, ParamsJson, VerdictJson};
use simds::{DiagonalMatrix, Elem, ErrorKind, Field, FieldSpec, SquareMatrix};

const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "simds", version, about = "Semi-involutory MDS matrices over small finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the elements of a field with inverses, squares and logarithms.
    FieldTable {
        #[command(flatten)]
        field: FieldArgs,
        /// Also print the full multiplication table.
        #[arg(long)]
        mul: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// MDS, involutory and semi-involutory verdicts for a matrix.
    Check {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Build the 3x3 matrix for eight construction parameters.
    Build {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Recover (x, y) from a 3x3 matrix and an associated diagonal.
    ///
    /// Input: {"matrix": <matrix JSON>, "D": [d1, d2, d3]}
    Extract {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// The involution I + aA + bB and its MDS condition.
    Curupira {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Closed-form counts, optionally checked by brute force.
    Count {
        #[command(flatten)]
        field: FieldArgs,
        /// Sets to count (S, S1..S5, SI_MDS, INV_MDS); default all.
        #[arg(long = "set", value_delimiter = ',')]
        sets: Vec<String>,
        /// `formula` or `both` (formula and brute force).
        #[arg(long, default_value = "both")]
        mode: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Brute-force check of the tuple-set closed forms S, S1..S5.
    VerifyLemmas {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct FieldArgs {
    /// Characteristic.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Extension degree.
    #[arg(long)]
    m: u32,
    /// Modulus as an integer bit vector (13 = x^3+x^2+1); required when m > 1.
    #[arg(long)]
    poly: Option<u32>,
}

impl FieldArgs {
    fn field(&self) -> anyhow::Result<Field> {
        let poly = match (self.m, self.poly) {
            (1, p) => p.unwrap_or(0),
            (_, Some(p)) => p,
            (_, None) => bail!(simds::Error::InvalidField("--poly is required when m > 1; there is no default modulus".into())),
        };
        Ok(Field::with_tables(FieldSpec::new(self.p, self.m, poly)?))
    }
}

#[derive(Args)]
struct InputArgs {
    /// Inline JSON, a file path, or `-` for stdin.
    #[arg(long)]
    json: String,
}

impl InputArgs {
    fn read(&self) -> anyhow::Result<Value> {
        let text = if self.json == "-" {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            s
        } else if self.json.trim_start().starts_with('{') {
            self.json.clone()
        } else {
            std::fs::read_to_string(Path::new(&self.json)).with_context(|| format!("reading {}", self.json))?
        };
        serde_json::from_str(&text).map_err(|e| anyhow!(InputError(format!("invalid JSON: {e}"))))
    }
}

#[derive(Args)]
struct RunArgs {
    /// Allow the GF(16) parametrized enumeration.
    #[arg(long)]
    long_run: bool,
    /// Worker threads for brute-force counts.
    #[arg(long)]
    jobs: Option<usize>,
    /// Report elapsed seconds (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    /// Progress messages on stderr.
    #[arg(long)]
    progress: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl RunArgs {
    fn options(&self) -> CensusOptions {
        let progress: Option<Arc<dyn Fn(&str, f64) + Send + Sync>> = if self.progress {
            Some(Arc::new(|label: &str, frac: f64| eprintln!("[{label}] {:>3.0}%", frac * 100.0)))
        } else {
            None
        };
        CensusOptions { jobs: self.jobs, long_run: self.long_run, progress }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

/// Malformed input that is not a library error.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<simds::Error>().map(simds::Error::kind) {
        Some(ErrorKind::Budget) => EXIT_BUDGET,
        Some(ErrorKind::Inconsistent) => EXIT_MISMATCH,
        _ => EXIT_INPUT,
    }
}

fn parse<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> anyhow::Result<T> {
    serde_json::from_value(v).map_err(|e| anyhow!(InputError(format!("invalid {what}: {e}"))))
}

fn emit_json<T: Serialize>(out: &mut impl Write, v: &T) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn emit_pretty(out: &mut impl Write, v: &impl Serialize) -> anyhow::Result<()> {
    let Value::Object(map) = serde_json::to_value(v)? else {
        return emit_json(out, v);
    };
    for (k, val) in map {
        writeln!(out, "{k:>12}: {val}")?;
    }
    Ok(())
}

fn emit(out: &mut impl Write, format: Format, v: &impl Serialize) -> anyhow::Result<()> {
    match format {
        Format::Json => emit_json(out, v),
        Format::Pretty => emit_pretty(out, v),
        Format::Csv => bail!(InputError("csv output is only available for field-table, count and verify-lemmas".into())),
    }
}

// ---------------------------------------------------------------- field-table

#[derive(Serialize)]
struct ElementRow {
    repr: u32,
    inverse: Option<u32>,
    square: u32,
    log: Option<u32>,
}

#[derive(Serialize)]
struct FieldTable {
    field: FieldSpec,
    order: u32,
    generator: u32,
    elements: Vec<ElementRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mul: Option<Vec<Vec<u32>>>,
}

fn cmd_field_table(field: &Field, mul: bool, format: Format, out: &mut impl Write) -> anyhow::Result<u8> {
    let elems = field.elements(false);
    let generator = elems
        .iter()
        .copied()
        .find(|&g| !g.is_zero() && (1..field.order() - 1).all(|k| field.pow(g, k as u64).map_or(false, |v| v != Elem::ONE)))
        .unwrap_or(Elem::ONE);
    let mut logs = vec![None; field.order() as usize];
    let mut x = Elem::ONE;
    for k in 0..field.order() - 1 {
        logs[x.0 as usize].get_or_insert(k);
        x = field.mul(x, generator);
    }
    let table = FieldTable {
        field: field.spec(),
        order: field.order(),
        generator: generator.repr(),
        elements: elems
            .iter()
            .map(|&a| ElementRow {
                repr: a.repr(),
                inverse: field.inv(a).map(Elem::repr),
                square: field.mul(a, a).repr(),
                log: logs[a.0 as usize],
            })
            .collect(),
        mul: mul.then(|| elems.iter().map(|&a| elems.iter().map(|&b| field.mul(a, b).repr()).collect()).collect()),
    };
    let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
    match format {
        Format::Json => emit_json(out, &table)?,
        Format::Csv => {
            writeln!(out, "repr,inverse,square,log")?;
            for r in &table.elements {
                writeln!(out, "{},{},{},{}", r.repr, opt(r.inverse), r.square, opt(r.log))?;
            }
        }
        Format::Pretty => {
            writeln!(out, "{} (order {}, generator {})", field.spec(), table.order, table.generator)?;
            writeln!(out, "{:>6} {:>8} {:>8} {:>6}", "repr", "inverse", "square", "log")?;
            for r in &table.elements {
                writeln!(out, "{:>6} {:>8} {:>8} {:>6}", r.repr, opt(r.inverse), r.square, opt(r.log))?;
            }
            if let Some(rows) = &table.mul {
                writeln!(out)?;
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
                    writeln!(out, "{}", cells.join(" "))?;
                }
            }
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------- check

#[derive(Serialize)]
struct CheckReport {
    n: usize,
    det: u32,
    mds: bool,
    involutory: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    irreducible: Option<bool>,
    #[serde(flatten)]
    verdict: VerdictJson,
    #[serde(rename = "D1", skip_serializing_if = "Option::is_none")]
    d1: Option<Vec<u32>>,
    #[serde(rename = "D2", skip_serializing_if = "Option::is_none")]
    d2: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

/// Accepts a matrix object, or any object holding one under `"matrix"`
/// (such as the output of `build`).
fn matrix_from_value(v: Value) -> anyhow::Result<SquareMatrix> {
    let v = match v {
        Value::Object(mut map) if !map.contains_key("rows") && map.contains_key("matrix") => map.remove("matrix").expect("present"),
        other => other,
    };
    Ok(parse::<MatrixJson>(v, "matrix JSON")?.to_matrix()?)
}

fn si_verdict(a: &SquareMatrix) -> anyhow::Result<(SiVerdict, Option<String>)> {
    if a.n() == 3 {
        let v = si::si_check_3x3(a)?;
        // cross-check against exhaustive search whenever it is affordable
        let oracle = match si::si_oracle(a) {
            Ok(o) => Some(o.is_semi_involutory),
            Err(e) if e.kind() == ErrorKind::Domain => Some(false),
            Err(_) => None,
        };
        if oracle.is_some_and(|o| o != v.is_semi_involutory) {
            bail!(simds::Error::Inconsistent("characterization and exhaustive search disagree".into()));
        }
        let note = a.det().is_zero().then(|| "singular matrix".to_string());
        return Ok((v.with_unit_scalar(), note));
    }
    match si::si_oracle(a) {
        Ok(v) => Ok((v.with_unit_scalar(), None)),
        Err(e) if e.kind() == ErrorKind::Domain => Ok((
            SiVerdict { is_semi_involutory: false, branch: si::Branch::NotSi, witness: None, scalar_c: None, a_value: None },
            Some(e.to_string()),
        )),
        Err(e) => Err(e.into()),
    }
}

fn check_report(a: &SquareMatrix) -> anyhow::Result<CheckReport> {
    let (verdict, note) = si_verdict(a)?;
    let pair = verdict.witness_pair(a);
    Ok(CheckReport {
        n: a.n(),
        det: a.det().repr(),
        mds: a.is_mds(),
        involutory: a.is_involutory(),
        irreducible: a.is_reducible().ok().map(|r| !r),
        verdict: VerdictJson::from(&verdict),
        d1: pair.as_ref().map(|(d1, _)| d1.reprs()),
        d2: pair.as_ref().map(|(_, d2)| d2.reprs()),
        note,
    })
}

// ---------------------------------------------------------------- build

#[derive(Serialize)]
struct BuildReport {
    matrix: MatrixJson,
    sums: SumsJson,
    det: u32,
    ada_diagonal: [u32; 3],
    mds: bool,
    si: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    minors: Option<[u32; 9]>,
}

#[derive(Serialize)]
struct SumsJson {
    s12: u32,
    s13: u32,
    s23: u32,
    s: u32,
    all_nonzero: bool,
}

impl From<SumConditions> for SumsJson {
    fn from(c: SumConditions) -> Self {
        SumsJson { s12: c.s12.repr(), s13: c.s13.repr(), s23: c.s23.repr(), s: c.s.repr(), all_nonzero: c.all_nonzero() }
    }
}

fn build_report(v: Value) -> anyhow::Result<BuildReport> {
    let p = parse::<ParamsJson>(v, "params JSON")?.to_params()?;
    let a = construct::build_matrix(&p);
    let sums = construct::sum_conditions(&p);
    let (det, ada) = construct::predicted_invariants(&p);
    if a.det() != det || (sums.s_nonzero && !a.is_mds() && sums.all_nonzero()) {
        bail!(simds::Error::Inconsistent("built matrix disagrees with its closed forms".into()));
    }
    Ok(BuildReport {
        matrix: MatrixJson::from_matrix(&a),
        sums: sums.into(),
        det: det.repr(),
        ada_diagonal: ada.map(Elem::repr),
        mds: sums.all_nonzero(),
        si: sums.s_nonzero,
        minors: construct::minor_formulas(&p).ok().map(|m| m.map(Elem::repr)),
    })
}

// ---------------------------------------------------------------- extract

#[derive(Serialize)]
struct ExtractReport {
    found: bool,
    x: Option<u32>,
    y: Option<u32>,
}

fn extract_report(v: Value) -> anyhow::Result<ExtractReport> {
    let Value::Object(mut map) = v else {
        bail!(InputError("extract expects {\"matrix\": ..., \"D\": [...]}".into()));
    };
    let a = matrix_from_value(map.remove("matrix").ok_or_else(|| InputError("missing \"matrix\"".into()))?)?;
    let d: Vec<u32> = parse(map.remove("D").ok_or_else(|| InputError("missing \"D\"".into()))?, "diagonal")?;
    let d = DiagonalMatrix::from_reprs(a.field(), &d)?;
    let xy = construct::extract_xy(&a, &d)?;
    Ok(ExtractReport { found: xy.is_some(), x: xy.map(|p| p.0.repr()), y: xy.map(|p| p.1.repr()) })
}

// ---------------------------------------------------------------- curupira

#[derive(Serialize)]
struct CurupiraReport {
    matrix: MatrixJson,
    mds_condition: bool,
    mds: bool,
    involutory: bool,
}

fn curupira_report(field: &Field, a: u32, b: u32) -> anyhow::Result<CurupiraReport> {
    let (a, b) = (field.element(a)?, field.element(b)?);
    let d = construct::curupira_matrix(field, a, b)?;
    let cond = construct::curupira_is_mds(field, a, b)?;
    if cond != d.is_mds() {
        bail!(simds::Error::Inconsistent("MDS condition disagrees with the minors".into()));
    }
    Ok(CurupiraReport { matrix: MatrixJson::from_matrix(&d), mds_condition: cond, mds: d.is_mds(), involutory: d.is_involutory() })
}

// ---------------------------------------------------------------- census

#[derive(Serialize)]
struct ReportLine<'a> {
    #[serde(flatten)]
    report: &'a CensusReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

fn write_reports(out: &mut impl Write, reports: &[CensusReport], run: &RunArgs) -> anyhow::Result<u8> {
    let opt = |v: Option<u128>| v.map(|x| x.to_string()).unwrap_or_default();
    let secs = |r: &CensusReport| if run.timing { format!("{:.3}", r.seconds) } else { String::new() };
    match run.format {
        Format::Json => {
            for r in reports {
                emit_json(out, &ReportLine { report: r, seconds: run.timing.then_some(r.seconds) })?;
            }
        }
        Format::Csv => {
            writeln!(out, "set,q,formula,brute_force,match,seconds")?;
            for r in reports {
                let m = r.matches.map(|b| b.to_string()).unwrap_or_default();
                writeln!(out, "{},{},{},{},{},{}", r.set, r.q, opt(r.formula), opt(r.brute_force), m, secs(r))?;
            }
        }
        Format::Pretty => {
            for r in reports {
                let status = match r.matches {
                    Some(true) => "match",
                    Some(false) => "MISMATCH",
                    None => "-",
                };
                write!(out, "{:<8} q={:<3} formula={:<12} brute={:<12} {status}", r.set, r.q, opt(r.formula), opt(r.brute_force))?;
                if let Some(x) = r.exhaustive {
                    write!(out, " exhaustive={x}")?;
                }
                if let Some(t) = r.raw_tuples {
                    write!(out, " raw_tuples={t}")?;
                }
                if run.timing {
                    write!(out, " {}s", secs(r))?;
                }
                writeln!(out)?;
            }
        }
    }
    for r in reports {
        if let Some(e) = &r.error {
            eprintln!("{}: {e}", r.set);
        }
    }
    let code = if reports.iter().any(|r| r.error_kind == Some(ErrorKind::Inconsistent) || r.matches == Some(false)) {
        EXIT_MISMATCH
    } else if reports.iter().any(|r| r.error_kind == Some(ErrorKind::Budget)) {
        EXIT_BUDGET
    } else if reports.iter().any(|r| r.error.is_some()) {
        EXIT_INPUT
    } else {
        0
    };
    Ok(code)
}

fn census_field(args: &FieldArgs) -> anyhow::Result<Field> {
    let field = args.field()?;
    if !field.is_char2() || field.spec().m() < 2 {
        bail!(simds::Error::InvalidArgument(format!("counting needs GF(2^m) with m >= 2, got {}", field.spec())));
    }
    Ok(field)
}

fn run(cli: Cli, out: &mut impl Write) -> anyhow::Result<u8> {
    match cli.command {
        Command::FieldTable { field, mul, format } => cmd_field_table(&field.field()?, mul, format, out),
        Command::Check { input, format } => {
            let a = matrix_from_value(input.read()?)?;
            emit(out, format, &check_report(&a)?)?;
            Ok(0)
        }
        Command::Build { input, format } => {
            emit(out, format, &build_report(input.read()?)?)?;
            Ok(0)
        }
        Command::Extract { input, format } => {
            emit(out, format, &extract_report(input.read()?)?)?;
            Ok(0)
        }
        Command::Curupira { field, a, b, format } => {
            emit(out, format, &curupira_report(&field.field()?, a, b)?)?;
            Ok(0)
        }
        Command::Count { field, sets, mode, run } => {
            let field = census_field(&field)?;
            let mode: CountMode = mode.parse()?;
            let sets: Vec<SetName> = if sets.is_empty() {
                SetName::ALL.to_vec()
            } else {
                sets.iter().map(|s| s.parse()).collect::<simds::Result<_>>()?
            };
            let reports = census::run_census(&field, &sets, mode, &run.options());
            write_reports(out, &reports, &run)
        }
        Command::VerifyLemmas { field, run } => {
            let field = census_field(&field)?;
            let reports = census::run_census(&field, &SetName::S_FAMILY, CountMode::Both, &run.options());
            write_reports(out, &reports, &run)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(code), Ok(())) => ExitCode::from(code),
        (Ok(_), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
        (Err(e), _) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
