//! The `mispr` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid input,
//! 3 the full law is not identified.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data::{CsvOptions, DataTable};
use crate::evaluate::{parse_manifest, summary_table, write_report, ManifestRow};
use crate::identify::{construct, IdentifyError, Method, MissingnessPattern, PatternDag};
use crate::impute::{mispr, ImputeError, MisprConfig};
use crate::mgraph::{parse_mgraph, MGraph, VertexKind};
use crate::simulate::{sample_dataset, Fixture, FullLawSpec, DEFAULT_JOINT_LIMIT, F_DGP_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNIDENTIFIED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mispr", version, about = "Identification and multiple imputation for graphical missing-data models")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "MISPR_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the pattern DAG for a graph and a set of patterns.
    Identify(IdentifyArgs),
    /// Write m completed copies of a data table.
    Impute(ImputeArgs),
    /// Sample a data table from a law.
    Simulate(SimulateArgs),
    /// Run the benchmark rows listed in a manifest.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Token marking a missing cell.
    #[arg(long = "na", default_value = "NA")]
    na: String,
    /// Field delimiter: one character, or `tab`.
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    delimiter: u8,
}

impl TableArgs {
    fn options(&self) -> CsvOptions {
        CsvOptions { delimiter: self.delimiter, na_token: self.na.clone() }
    }
}

#[derive(Debug, Args)]
struct IdentifyArgs {
    /// m-graph file.
    #[arg(long, short)]
    graph: PathBuf,
    /// Take the patterns from a data table.
    #[arg(long, conflicts_with = "patterns", required_unless_present = "patterns")]
    data: Option<PathBuf>,
    /// Patterns as 0/1 strings separated by commas or spaces.
    #[arg(long)]
    patterns: Option<String>,
    #[arg(long, default_value = "auto")]
    method: Method,
    /// Pattern DAG output (default: standard output).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Per-pattern identification trace.
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Debug, Args)]
struct ImputeArgs {
    #[arg(long, short)]
    graph: PathBuf,
    #[arg(long, short)]
    data: PathBuf,
    /// Output prefix; tables go to `<prefix>.imp1` .. `<prefix>.impM`
    /// (default: the data path).
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    m: usize,
    #[arg(long = "burn-in", default_value_t = 500)]
    burn_in: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto")]
    method: Method,
    /// Condition Gibbs factors on every other column instead of the
    /// Markov blanket.
    #[arg(long)]
    no_mb_reduction: bool,
    /// Pseudo-count of the tabular estimator.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Bundled law: a, a+, b, b+, c, c+, d, d+, e+, f+.
    #[arg(long, conflicts_with_all = ["law", "graph"], required_unless_present = "law")]
    fixture: Option<Fixture>,
    /// Law file; needs --graph.
    #[arg(long, requires = "graph")]
    law: Option<PathBuf>,
    #[arg(long, short)]
    graph: Option<PathBuf>,
    #[arg(long, short)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed of the generated f+ law.
    #[arg(long, default_value_t = F_DGP_SEED)]
    dgp_seed: u64,
    #[arg(long, short)]
    out: PathBuf,
    /// Also write the exact joint of all visible variables.
    #[arg(long)]
    exact: Option<PathBuf>,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Delimited manifest with a `dgp` column.
    manifest: PathBuf,
    /// Report file (default: standard output).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Print a summary table to standard error.
    #[arg(long)]
    summary: bool,
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    delimiter: u8,
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be a single ASCII character or `tab`, got `{s}`")),
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, msg: format!("{}: {e}", path.display()) }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INVALID, msg: e.to_string() }
}

impl From<IdentifyError> for Failure {
    fn from(e: IdentifyError) -> Self {
        let code = if e.is_identification_failure() { EXIT_UNIDENTIFIED } else { EXIT_INVALID };
        Failure { code, msg: e.to_string() }
    }
}

impl From<ImputeError> for Failure {
    fn from(e: ImputeError) -> Self {
        match e {
            ImputeError::Identify(e) => e.into(),
            e => invalid(e),
        }
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(t) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match cli.command {
        Command::Identify(a) => cmd_identify(&a),
        Command::Impute(a) => cmd_impute(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Benchmark(a) => cmd_benchmark(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("mispr: {}", f.msg);
            f.code
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn read_graph(path: &Path) -> Result<MGraph, Failure> {
    parse_mgraph(&read_text(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn read_data(path: &Path, g: &MGraph, opts: &CsvOptions) -> Result<DataTable, Failure> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    DataTable::read_csv(BufReader::new(f), g, opts).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_pattern_list(text: &str, k: usize) -> Result<Vec<MissingnessPattern>, Failure> {
    let mut out = Vec::new();
    for tok in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let r: MissingnessPattern = tok.parse().map_err(|e: IdentifyError| invalid(e))?;
        if r.k() != k {
            return Err(invalid(IdentifyError::LengthMismatch { expected: k, actual: r.k() }));
        }
        out.push(r);
    }
    if out.is_empty() {
        return Err(invalid("no patterns given"));
    }
    Ok(out)
}

/// Names of the substantive and observed vertices in the Markov blanket of
/// `X_i`, in column order.
fn blanket_names(g: &MGraph, i: usize) -> Vec<&str> {
    let mb = g.markov_blanket(g.substantive(i)).expect("index within graph");
    let mut subs: Vec<(usize, &str)> = Vec::new();
    for v in mb {
        match g.kind(v) {
            VertexKind::Substantive(j) => subs.push((j, g.name(v))),
            VertexKind::Observed => {
                let pos = g.observed_vertices().iter().position(|&o| o == v).expect("observed vertex");
                subs.push((g.k() + pos, g.name(v)));
            }
            VertexKind::Indicator(_) => {}
        }
    }
    subs.sort_unstable();
    subs.into_iter().map(|(_, n)| n).collect()
}

/// One line per Gibbs factor: the conditional at pattern `r` and the
/// parent patterns whose conditional it equals.
pub fn proof_log(g: &MGraph, dag: &PatternDag) -> Result<String, IdentifyError> {
    let mut s = String::new();
    for r in dag.topological_order()? {
        if r.is_complete() {
            let _ = writeln!(s, "r={r}: complete case, observed directly");
            continue;
        }
        for i in r.missing() {
            let target = g.name(g.substantive(i));
            let given = blanket_names(g, i).join(", ");
            let sep = if given.is_empty() { "" } else { ", " };
            let parents: Vec<String> = dag.parents(r, i).iter().map(|p| p.to_string()).collect();
            let _ = writeln!(
                s,
                "r={r}: p({target}(1) | {given}{sep}r={r}) = p({target} | {given}{sep}r in {{{}}})",
                parents.join(", ")
            );
        }
    }
    Ok(s)
}

fn cmd_identify(a: &IdentifyArgs) -> Result<(), Failure> {
    let g = read_graph(&a.graph)?;
    let patterns = match (&a.data, &a.patterns) {
        (Some(d), _) => {
            let data = read_data(d, &g, &a.table.options())?;
            let mut p = data.patterns();
            if p.is_empty() {
                p.push(MissingnessPattern::complete(g.k())?);
            }
            p
        }
        (None, Some(text)) => parse_pattern_list(text, g.k())?,
        (None, None) => unreachable!("clap requires one source"),
    };
    let (dag, used) = construct(&g, &patterns, a.method)?;
    write_text(a.out.as_deref(), &dag.to_text())?;
    if let Some(log) = &a.log {
        let mut text = format!("method: {used}\npatterns: {}\nedges: {}\n", dag.nodes().len(), dag.edges().len());
        text.push_str(&proof_log(&g, &dag)?);
        write_text(Some(log), &text)?;
    }
    eprintln!("identified with {used}: {} patterns, {} edges", dag.nodes().len(), dag.edges().len());
    Ok(())
}

fn imputed_path(prefix: &Path, j: usize) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(format!(".imp{j}"));
    PathBuf::from(s)
}

fn cmd_impute(a: &ImputeArgs) -> Result<(), Failure> {
    let g = read_graph(&a.graph)?;
    let opts = a.table.options();
    let data = read_data(&a.data, &g, &opts)?;
    if !(a.alpha.is_finite() && a.alpha > 0.0) {
        return Err(Failure { code: EXIT_USAGE, msg: format!("--alpha must be positive, got {}", a.alpha) });
    }
    let config = MisprConfig {
        m: a.m,
        burn_in: a.burn_in,
        seed: a.seed,
        method: a.method,
        use_mb_reduction: !a.no_mb_reduction,
        estimator: crate::impute::EstimatorKind::Tabular { alpha: a.alpha },
    };
    let out = mispr(&g, &data, &config)?;
    let prefix = a.out.as_ref().unwrap_or(&a.data);
    for (j, table) in out.tables.iter().enumerate() {
        let path = imputed_path(prefix, j + 1);
        let w = create(&path)?;
        table.write_csv(w, &opts).map_err(|e| io_err(&path, e))?;
    }
    eprintln!("wrote {} imputed tables ({})", out.tables.len(), out.method);
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let (spec, g) = match (&a.fixture, &a.law, &a.graph) {
        (Some(f), _, _) => (f.spec(a.dgp_seed), f.graph()),
        (None, Some(law), Some(graph)) => {
            let spec = FullLawSpec::parse(&read_text(law)?).map_err(|e| invalid(format!("{}: {e}", law.display())))?;
            (spec, read_graph(graph)?)
        }
        _ => return Err(Failure { code: EXIT_USAGE, msg: "give --fixture, or --law with --graph".into() }),
    };
    let opts = a.table.options();
    let data = sample_dataset(&spec, &g, a.n, a.seed).map_err(invalid)?;
    let w = create(&a.out)?;
    data.write_csv(w, &opts).map_err(|e| io_err(&a.out, e))?;
    if let Some(path) = &a.exact {
        let joint = spec.exact_joint(DEFAULT_JOINT_LIMIT).map_err(invalid)?;
        let mut w = csv::WriterBuilder::new().delimiter(opts.delimiter).from_writer(create(path)?);
        let mut header: Vec<String> = joint.names().iter().map(|s| s.to_string()).collect();
        header.push("p".into());
        w.write_record(&header).map_err(|e| io_err(path, e))?;
        for (idx, p) in joint.probs().iter().enumerate() {
            let mut rec: Vec<String> =
                joint.assignment(idx).iter().zip(joint.vars()).map(|(&x, v)| v.categories[x].clone()).collect();
            rec.push(format!("{p:e}"));
            w.write_record(&rec).map_err(|e| io_err(path, e))?;
        }
        w.flush().map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

fn cmd_benchmark(a: &BenchmarkArgs) -> Result<(), Failure> {
    let f = File::open(&a.manifest).map_err(|e| io_err(&a.manifest, e))?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let rows: Vec<ManifestRow> = parse_manifest(BufReader::new(f), base, a.delimiter)
        .map_err(|e| invalid(format!("{}: {e}", a.manifest.display())))?;
    let mut reports = Vec::with_capacity(rows.len());
    for row in &rows {
        let r = row.run();
        match &r.failure {
            None => eprintln!("{} ({}): l2 {:.4e}, {:.1}s", r.dgp, r.method, r.l2.unwrap_or(f64::NAN), r.seconds),
            Some(msg) => eprintln!("{} ({}): failed: {msg}", r.dgp, r.method),
        }
        reports.push(r);
    }
    let mut buf = Vec::new();
    write_report(&mut buf, &reports, a.delimiter).map_err(invalid)?;
    match &a.out {
        Some(p) => create(p)?.write_all(&buf).map_err(|e| io_err(p, e))?,
        None => std::io::stdout().write_all(&buf).map_err(|e| io_err(Path::new("<stdout>"), e))?,
    }
    if a.summary {
        eprint!("{}", summary_table(&reports));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delimiters() {
        assert_eq!(parse_delimiter(";"), Ok(b';'));
        assert_eq!(parse_delimiter("tab"), Ok(b'\t'));
        assert!(parse_delimiter(";;").is_err());
    }

    #[test]
    fn pattern_lists() {
        let p = parse_pattern_list("11, 01 10", 2).unwrap();
        assert_eq!(p.len(), 3);
        assert!(parse_pattern_list("111", 2).is_err());
        assert!(parse_pattern_list(" ", 2).is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["mispr"]), EXIT_USAGE);
        assert_eq!(run(["mispr", "identify"]), EXIT_USAGE);
        assert_eq!(run(["mispr", "--help"]), EXIT_OK);
        assert_eq!(run(["mispr", "identify", "-g", "/nonexistent/g", "--patterns", "1"]), EXIT_USAGE);
    }

    #[test]
    fn imputed_paths() {
        assert_eq!(imputed_path(Path::new("d/x.csv"), 3), PathBuf::from("d/x.csv.imp3"));
    }

    #[test]
    fn proof_log_lines() {
        let g = parse_mgraph("class: mdag\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nX1 -> X2\nX1 -> R2\n")
            .unwrap();
        let (dag, _) = construct(&g, &MissingnessPattern::all(2).unwrap(), Method::Auto).unwrap();
        let log = proof_log(&g, &dag).unwrap();
        assert!(log.starts_with("r=11: complete case"));
        assert!(log.contains("r=10: p(X2(1) | X1, r=10) = p(X2 | X1, r in {11})"), "{log}");
        assert_eq!(log.lines().count(), 1 + 1 + 1 + 2);
    }
}
