//! Command-line front end. Parsing is done by clap; [`run`] executes a parsed
//! configuration and returns the exit code together with the rendered report,
//! so the binary is a thin wrapper and the commands are testable in-process.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::bounds::{applicable_formulas, render_rational, FormulaTable};
use crate::certificate::{check_certificate, verify_family, CertificateDoc, CertificateError, PairFailure};
use crate::constructions::{
    bipartite_family, block_family, fixed_endpoint_family, greedy_family, k4_family, m53_matching_family, sh_set,
    shifted_block_family, ConstructedFamily, Provenance,
};
use crate::error::{Error, Result};
use crate::model::{parse_dspec, DSpec, HamPath};
use crate::relations::{build_compat_graph, DifferencePredicate};
use crate::search::{max_clique_with, SearchOptions, SearchStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug, Clone)]
#[command(name = "hamfam", version, about = "Families of pairwise cycle-different Hamiltonian paths in K_n")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Compute the largest family exactly, as a maximum clique.
    Exact(ExactArgs),
    /// Build a named family, certify it pairwise and print the certificate.
    Construct(ConstructArgs),
    /// Evaluate every applicable closed-form bound.
    Formulas(FormulasArgs),
    /// Re-check a certificate file from scratch.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PredicateKind {
    Cycle,
    K4,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstructionName {
    Greedy,
    Bipartite,
    Block,
    ShiftedBlock,
    FixedEndpoint,
    K4,
    #[value(name = "sH")]
    SH,
    M53,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PredicateArgs {
    /// Admissible cycle lengths: all, odd, even, div=C, ndiv=C or in=L1,L2,...
    /// [default: all]
    #[arg(long)]
    pub dspec: Option<String>,
    /// [default: cycle]
    #[arg(long, value_enum)]
    pub predicate: Option<PredicateKind>,
}

impl PredicateArgs {
    fn resolve(&self) -> Result<DifferencePredicate> {
        Ok(match self.predicate.unwrap_or(PredicateKind::Cycle) {
            PredicateKind::Cycle => DifferencePredicate::CycleIn(parse_dspec(self.dspec.as_deref().unwrap_or("all"))?),
            PredicateKind::K4 => DifferencePredicate::ContainsK4,
        })
    }

    /// The predicate if either flag was given.
    fn explicit(&self) -> Result<Option<DifferencePredicate>> {
        if self.dspec.is_none() && self.predicate.is_none() {
            return Ok(None);
        }
        self.resolve().map(Some)
    }
}

#[derive(Args, Debug, Clone)]
pub struct ExactArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub predicate: PredicateArgs,
    /// Time budget in seconds.
    #[arg(long, default_value_t = 300)]
    pub budget: u64,
    /// Parallel workers; only 1 gives reproducible node counts and members.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub name: ConstructionName,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub c: Option<usize>,
    #[command(flatten)]
    pub predicate: PredicateArgs,
    /// Shuffle the greedy scan order with this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct FormulasArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub c: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    pub certificate: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Result of running one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    /// The rendered report (empty when it went to `--out`).
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct ExactReport {
    command: &'static str,
    n: usize,
    predicate: String,
    size: usize,
    optimal: bool,
    status: SearchStatus,
    members: Vec<usize>,
    family: Vec<String>,
    nodes_explored: u64,
}

#[derive(Serialize)]
struct FormulaRow {
    name: &'static str,
    c: Option<usize>,
    lower: Option<String>,
    upper: Option<String>,
}

#[derive(Serialize)]
struct FormulasReport {
    command: &'static str,
    n: usize,
    c: Option<usize>,
    formulas: Vec<FormulaRow>,
}

#[derive(Serialize)]
struct FailureReport {
    command: &'static str,
    valid: bool,
    construction: Option<String>,
    predicate: Option<String>,
    failure: Option<PairFailure>,
    reason: String,
}

#[derive(Serialize)]
struct VerifyReport {
    command: &'static str,
    valid: bool,
    n: usize,
    predicate: String,
    construction: String,
    size: usize,
    pairs_checked: usize,
}

fn config_error(e: impl std::fmt::Display) -> Outcome {
    Outcome { code: EXIT_CONFIG, stdout: String::new(), stderr: format!("error: {e}\n") }
}

/// Flatten a JSON value into `(dotted.field, value)` rows.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(map) => map.iter().for_each(|(k, v)| walk(&key(k), v, out)),
            Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| walk(&key(&i.to_string()), v, out)),
            Value::Null => out.push((prefix.to_string(), String::new())),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}

fn to_csv(value: &Value) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "value"])?;
    for (k, v) in flatten(value) {
        w.write_record([k, v])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render<T: Serialize>(report: &T, format: Format, text: impl FnOnce() -> String) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => to_csv(&serde_json::to_value(report)?)?,
        Format::Text => text(),
    })
}

fn emit(code: i32, body: String, output: &OutputArgs) -> Outcome {
    match &output.out {
        Some(path) => match std::fs::write(path, body) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => config_error(format!("cannot write {}: {e}", path.display())),
        },
        None => Outcome { code, stdout: body, stderr: String::new() },
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match &cfg.command {
        Command::Exact(a) => cmd_exact(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Formulas(a) => cmd_formulas(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

pub fn cmd_exact(args: &ExactArgs) -> Outcome {
    if args.budget == 0 {
        return config_error("--budget must be at least 1 second");
    }
    let predicate = match args.predicate.resolve() {
        Ok(p) => p,
        Err(e) => return config_error(e),
    };
    let graph = match build_compat_graph(args.n, &predicate) {
        Ok(g) => g,
        Err(e) => return config_error(e),
    };
    let opts =
        SearchOptions { budget: Duration::from_secs(args.budget), workers: args.workers.max(1), incumbent: Vec::new() };
    let result = match max_clique_with(graph.adjacency(), &opts) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    let report = ExactReport {
        command: "exact",
        n: args.n,
        predicate: predicate.to_string(),
        size: result.size,
        optimal: result.is_optimal(),
        status: result.status,
        family: result.members.iter().map(|&i| graph.paths()[i].to_string()).collect(),
        members: result.members.clone(),
        nodes_explored: result.nodes_explored,
    };
    let text = || {
        let mut s = String::new();
        let _ = writeln!(s, "n              {}", report.n);
        let _ = writeln!(s, "predicate      {}", report.predicate);
        let _ = writeln!(s, "paths          {}", graph.len());
        let _ = writeln!(s, "size           {}", report.size);
        let _ = writeln!(s, "optimal        {}", report.optimal);
        let _ = writeln!(s, "nodes explored {}", report.nodes_explored);
        let _ = writeln!(s, "elapsed        {:.3}s", result.elapsed.as_secs_f64());
        for (i, p) in report.members.iter().zip(&report.family) {
            let _ = writeln!(s, "  #{i:<6} {p}");
        }
        s
    };
    let code = if result.is_optimal() { EXIT_OK } else { EXIT_BUDGET };
    match render(&report, args.output.format, text) {
        Ok(body) => emit(code, body, &args.output),
        Err(e) => config_error(e),
    }
}

fn require(v: Option<usize>, flag: &str, name: ConstructionName) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidParameter(format!("construction {name:?} needs --{flag}")))
}

/// Build the named family. For constructions other than greedy, an explicit
/// `--dspec` or `--predicate` replaces the claimed predicate.
pub fn build_construction(args: &ConstructArgs) -> Result<ConstructedFamily> {
    let mut family = named_family(args)?;
    if args.name != ConstructionName::Greedy {
        if let Some(p) = args.predicate.explicit()? {
            family.claim = p;
        }
    }
    Ok(family)
}

fn named_family(args: &ConstructArgs) -> Result<ConstructedFamily> {
    let name = args.name;
    match name {
        ConstructionName::Greedy => greedy_family(require(args.n, "n", name)?, &args.predicate.resolve()?, args.seed),
        ConstructionName::Bipartite => bipartite_family(require(args.n, "n", name)?),
        ConstructionName::Block => block_family(require(args.n, "n", name)?, require(args.c, "c", name)?),
        ConstructionName::ShiftedBlock => {
            shifted_block_family(require(args.n, "n", name)?, require(args.c, "c", name)?)
        }
        ConstructionName::FixedEndpoint => {
            fixed_endpoint_family(require(args.n, "n", name)?, require(args.c, "c", name)?)
        }
        ConstructionName::K4 => k4_family(require(args.n, "n", name)?),
        ConstructionName::SH => {
            let n = require(args.n, "n", name)?;
            Ok(ConstructedFamily {
                paths: sh_set(&HamPath::identity(n)?)?,
                claim: DifferencePredicate::CycleIn(DSpec::Odd),
                provenance: Provenance { name: "sH", n, c: None, seed: None },
            })
        }
        ConstructionName::M53 => m53_matching_family(),
    }
}

fn certificate_text(doc: &CertificateDoc) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "construction {}", doc.construction);
    let _ = writeln!(s, "n            {}", doc.n);
    let _ = writeln!(s, "predicate    {}", doc.predicate);
    let _ = writeln!(s, "size         {}", doc.size);
    let _ = writeln!(s, "pairs        {}", doc.witnesses.len());
    for (i, p) in doc.paths.iter().enumerate() {
        let _ = writeln!(s, "  #{i:<4} {p}");
    }
    for w in &doc.witnesses {
        let verts: Vec<String> = w.vertices.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "  ({}, {}) {} {}", w.i, w.j, w.kind, verts.join("-"));
    }
    s
}

fn failure_text(r: &FailureReport) -> String {
    let mut s = format!("verification FAILED: {}\n", r.reason);
    if let Some(f) = &r.failure {
        let _ = writeln!(s, "pair ({}, {}), union cycle lengths {:?}", f.i, f.j, f.cycle_lengths);
    }
    s
}

pub fn cmd_construct(args: &ConstructArgs) -> Outcome {
    let family = match build_construction(args) {
        Ok(f) => f,
        Err(e) => return config_error(e),
    };
    let fmt = args.output.format;
    let rendered = match verify_family(&family) {
        Ok(cert) => {
            let doc = cert.to_doc();
            render(&doc, fmt, || certificate_text(&doc)).map(|b| (EXIT_OK, b))
        }
        Err(Error::Verification { i, j, reason }) => {
            let failure =
                crate::certificate::verify_family_exhaustive(&family).into_iter().find(|f| (f.i, f.j) == (i, j));
            let report = FailureReport {
                command: "construct",
                valid: false,
                construction: Some(family.provenance.name.to_string()),
                predicate: Some(family.claim.to_string()),
                failure,
                reason,
            };
            render(&report, fmt, || failure_text(&report)).map(|b| (EXIT_VERIFY, b))
        }
        Err(e) => return config_error(e),
    };
    match rendered {
        Ok((code, body)) => emit(code, body, &args.output),
        Err(e) => config_error(e),
    }
}

fn formula_row(t: &FormulaTable) -> FormulaRow {
    FormulaRow {
        name: t.name.name(),
        c: t.c,
        lower: t.lower.as_ref().map(render_rational),
        upper: t.upper.as_ref().map(render_rational),
    }
}

fn approx(s: &Option<String>) -> String {
    let Some(s) = s else { return "-".into() };
    match s.split_once('/') {
        Some((p, q)) => match (p.parse::<f64>(), q.parse::<f64>()) {
            (Ok(p), Ok(q)) => format!("{s} (~{:.4})", p / q),
            _ => s.clone(),
        },
        None => s.clone(),
    }
}

pub fn cmd_formulas(args: &FormulasArgs) -> Outcome {
    if args.n < 2 {
        return config_error(format!("--n must be at least 2, got {}", args.n));
    }
    if args.c.is_some_and(|c| c < 2) {
        return config_error("--c must be at least 2");
    }
    let report = FormulasReport {
        command: "formulas",
        n: args.n,
        c: args.c,
        formulas: applicable_formulas(args.n, args.c).iter().map(formula_row).collect(),
    };
    let text = || {
        let mut s = format!("{:<16} {:>28} {:>28}\n", "formula", "lower", "upper");
        for r in &report.formulas {
            let _ = writeln!(s, "{:<16} {:>28} {:>28}", r.name, approx(&r.lower), approx(&r.upper));
        }
        s
    };
    match render(&report, args.output.format, text) {
        Ok(body) => emit(EXIT_OK, body, &args.output),
        Err(e) => config_error(e),
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let text = match std::fs::read_to_string(&args.certificate) {
        Ok(t) => t,
        Err(e) => return config_error(format!("cannot read {}: {e}", args.certificate.display())),
    };
    let doc = match CertificateDoc::from_json(&text) {
        Ok(d) => d,
        Err(e) => return config_error(format!("cannot parse certificate: {e}")),
    };
    let fmt = args.output.format;
    let rendered = match check_certificate(&doc) {
        Ok(pairs) => {
            let report = VerifyReport {
                command: "verify",
                valid: true,
                n: doc.n,
                predicate: doc.predicate.clone(),
                construction: doc.construction.clone(),
                size: doc.size,
                pairs_checked: pairs,
            };
            render(&report, fmt, || format!("certificate OK: {} paths, {pairs} pairs verified\n", doc.size))
                .map(|b| (EXIT_OK, b))
        }
        Err(err) => {
            let (failure, reason) = match err {
                CertificateError::Pair(f) => {
                    let reason = f.reason.clone();
                    (Some(f), reason)
                }
                CertificateError::Malformed(e) => (None, e.to_string()),
            };
            let report = FailureReport {
                command: "verify",
                valid: false,
                construction: Some(doc.construction.clone()),
                predicate: Some(doc.predicate.clone()),
                failure,
                reason,
            };
            render(&report, fmt, || failure_text(&report)).map(|b| (EXIT_VERIFY, b))
        }
    };
    match rendered {
        Ok((code, body)) => emit(code, body, &args.output),
        Err(e) => config_error(e),
    }
}

/// Parse `args` (including the program name) and run.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                Outcome { code, stdout: rendered, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: rendered }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> Outcome {
        let mut full = vec!["hamfam"];
        full.extend_from_slice(args);
        run_args(full)
    }

    #[test]
    fn exact_reports_optimum() {
        let out = run_ok(&["exact", "--n", "5", "--dspec", "in=3", "--format", "json"]);
        assert_eq!(out.code, EXIT_OK);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["size"], 10);
        assert_eq!(v["optimal"], true);
    }

    #[test]
    fn config_errors_exit_2() {
        assert_eq!(run_ok(&["exact", "--n", "5", "--dspec", "div=1"]).code, EXIT_CONFIG);
        assert_eq!(run_ok(&["exact", "--n", "12"]).code, EXIT_CONFIG);
        assert_eq!(run_ok(&["exact", "--n", "5", "--budget", "0"]).code, EXIT_CONFIG);
        assert_eq!(run_ok(&["construct", "--name", "block", "--n", "6"]).code, EXIT_CONFIG);
        assert_eq!(run_ok(&["construct", "--name", "nope"]).code, EXIT_CONFIG);
        assert_eq!(run_ok(&["formulas", "--n", "1"]).code, EXIT_CONFIG);
        assert_eq!(run_ok(&["verify", "/nonexistent/cert.json"]).code, EXIT_CONFIG);
    }

    #[test]
    fn csv_matches_json_field_for_field() {
        for args in [
            vec!["formulas", "--n", "8", "--c", "4"],
            vec!["construct", "--name", "k4", "--n", "8"],
            vec!["exact", "--n", "4", "--dspec", "odd"],
        ] {
            let mut json_args = args.clone();
            json_args.extend(["--format", "json"]);
            let mut csv_args = args.clone();
            csv_args.extend(["--format", "csv"]);
            let json: Value = serde_json::from_str(&run_ok(&json_args).stdout).unwrap();
            let csv_out = run_ok(&csv_args).stdout;
            let mut reader = csv::Reader::from_reader(csv_out.as_bytes());
            let rows: Vec<(String, String)> = reader
                .records()
                .map(|r| {
                    let r = r.unwrap();
                    (r[0].to_string(), r[1].to_string())
                })
                .collect();
            assert_eq!(rows, flatten(&json));
        }
    }

    #[test]
    fn text_output_is_human_readable() {
        let out = run_ok(&["formulas", "--n", "5"]);
        assert!(out.stdout.contains("prop_odd"));
        assert!(out.stdout.contains("15/2 (~7.5000)"));
    }
}
