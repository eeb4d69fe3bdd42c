//! Target-law estimation, distances and the benchmark runner.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::data::DataTable;
use crate::identify::Method;
use crate::impute::{mispr, EstimatorKind, MisprConfig};
use crate::joint::{state_space, JointError, JointTable, TableVar};
use crate::mgraph::{parse_mgraph, MGraph};
use crate::simulate::{sample_dataset, Fixture, FullLawSpec, DEFAULT_JOINT_LIMIT, F_DGP_SEED};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvaluateError {
    #[error("no imputed tables given")]
    Empty,
    #[error("imputed tables have different schemas")]
    SchemaMismatch,
    #[error("table {table} row {row} still has a missing cell")]
    Incomplete { table: usize, row: usize },
    #[error(transparent)]
    Joint(#[from] JointError),
    #[error("manifest line {line}: {msg}")]
    Manifest { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

/// Empirical joint of the substantive and observed columns over the union
/// of all rows.
pub fn estimate_target_law(tables: &[DataTable]) -> Result<JointTable, EvaluateError> {
    let first = tables.first().ok_or(EvaluateError::Empty)?;
    let schema = first.schema();
    if tables.iter().any(|t| t.schema() != schema) {
        return Err(EvaluateError::SchemaMismatch);
    }
    let vars: Vec<TableVar> = schema.columns().map(|c| TableVar::new(c.name.clone(), c.categories.clone())).collect();
    let cards = schema.cards();
    let size = state_space(cards.iter().copied(), DEFAULT_JOINT_LIMIT)?;
    let mut counts = vec![0u64; size];
    for (t, table) in tables.iter().enumerate() {
        for n in 0..table.n_rows() {
            let mut idx = 0usize;
            for (cell, &card) in table.row(n).iter().zip(&cards) {
                let x = cell.ok_or(EvaluateError::Incomplete { table: t + 1, row: n + 1 })?;
                idx = idx * card + x as usize;
            }
            counts[idx] += 1;
        }
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(EvaluateError::Empty);
    }
    Ok(JointTable::from_counts(vars, &counts)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L2,
    Linf,
}

/// Vector norm of `p - q` over the table entries.
pub fn distance(p: &JointTable, q: &JointTable, norm: Norm) -> Result<f64, EvaluateError> {
    p.same_shape(q)?;
    let diffs = p.probs().iter().zip(q.probs()).map(|(a, b)| (a - b).abs());
    Ok(match norm {
        Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        Norm::Linf => diffs.fold(0.0, f64::max),
    })
}

/// Exact target law of `spec`, with variables ordered like the columns of
/// tables sampled for `g`.
pub fn true_target_law(spec: &FullLawSpec, g: &MGraph) -> Result<JointTable, String> {
    let names: Vec<&str> = g
        .substantive_vertices()
        .iter()
        .chain(g.observed_vertices())
        .map(|&v| g.name(v))
        .collect();
    spec.margin_joint(&names, DEFAULT_JOINT_LIMIT).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub n: usize,
    pub m: usize,
    pub burn_in: usize,
    /// Seeds the sample; the imputation seed is derived from it.
    pub seed: u64,
    pub method: Method,
    pub use_mb_reduction: bool,
    pub estimator: EstimatorKind,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            n: 100_000,
            m: 7,
            burn_in: 500,
            seed: 0,
            method: Method::Auto,
            use_mb_reduction: true,
            estimator: EstimatorKind::default(),
        }
    }
}

// keeps the imputation streams apart from the sampling streams
const IMPUTE_SEED_MIX: u64 = 0x9e37_79b9_7f4a_7c15;

impl BenchmarkConfig {
    pub fn impute_seed(&self) -> u64 {
        self.seed ^ IMPUTE_SEED_MIX
    }

    pub fn mispr_config(&self) -> MisprConfig {
        MisprConfig {
            m: self.m,
            burn_in: self.burn_in,
            seed: self.impute_seed(),
            method: self.method,
            use_mb_reduction: self.use_mb_reduction,
            estimator: self.estimator,
        }
    }
}

/// One benchmark run. A failed run keeps its configuration and carries the
/// reason in `failure`, with no distances.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub dgp: String,
    pub method: Method,
    /// Construction actually used, when the run got that far.
    pub method_used: Option<Method>,
    pub n: usize,
    pub m: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Distinct missingness patterns in the sample.
    pub patterns: usize,
    pub l2: Option<f64>,
    pub linf: Option<f64>,
    pub seconds: f64,
    pub failure: Option<String>,
}

impl BenchmarkReport {
    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Sample, impute, estimate and compare against the exact target law.
pub fn run_benchmark(dgp: &str, spec: &FullLawSpec, g: &MGraph, config: &BenchmarkConfig) -> BenchmarkReport {
    let start = Instant::now();
    let mut report = BenchmarkReport {
        dgp: dgp.to_string(),
        method: config.method,
        method_used: None,
        n: config.n,
        m: config.m,
        burn_in: config.burn_in,
        seed: config.seed,
        patterns: 0,
        l2: None,
        linf: None,
        seconds: 0.0,
        failure: None,
    };
    let result = (|| -> Result<(), String> {
        let data = sample_dataset(spec, g, config.n, config.seed).map_err(|e| e.to_string())?;
        report.patterns = data.patterns().len();
        let truth = true_target_law(spec, g)?;
        let out = mispr(g, &data, &config.mispr_config()).map_err(|e| e.to_string())?;
        report.method_used = Some(out.method);
        let est = estimate_target_law(&out.tables).map_err(|e| e.to_string())?;
        report.l2 = Some(distance(&est, &truth, Norm::L2).map_err(|e| e.to_string())?);
        report.linf = Some(distance(&est, &truth, Norm::Linf).map_err(|e| e.to_string())?);
        Ok(())
    })();
    report.failure = result.err();
    report.seconds = start.elapsed().as_secs_f64();
    report
}

const REPORT_HEADER: [&str; 12] =
    ["dgp", "method", "method_used", "n", "m", "burn_in", "seed", "patterns", "l2", "linf", "seconds", "status"];

/// One delimited row per report, with a header.
pub fn write_report<W: Write>(w: W, reports: &[BenchmarkReport], delimiter: u8) -> Result<(), EvaluateError> {
    let io = |e: csv::Error| EvaluateError::Io(e.to_string());
    let mut out = csv::WriterBuilder::new().delimiter(delimiter).from_writer(w);
    out.write_record(REPORT_HEADER).map_err(io)?;
    let num = |x: Option<f64>| x.map_or("NA".to_string(), |v| format!("{v:.6e}"));
    for r in reports {
        out.write_record([
            r.dgp.clone(),
            r.method.to_string(),
            r.method_used.map_or("NA".to_string(), |m| m.to_string()),
            r.n.to_string(),
            r.m.to_string(),
            r.burn_in.to_string(),
            r.seed.to_string(),
            r.patterns.to_string(),
            num(r.l2),
            num(r.linf),
            format!("{:.3}", r.seconds),
            match &r.failure {
                None => "ok".to_string(),
                Some(msg) => format!("failed: {msg}"),
            },
        ])
        .map_err(io)?;
    }
    out.flush().map_err(|e| EvaluateError::Io(e.to_string()))
}

/// Plain-text table: one line per DGP, one column group (L2, Linf, seconds)
/// per construction used. Failed or absent runs print `NA`.
pub fn summary_table(reports: &[BenchmarkReport]) -> String {
    let mut dgps: Vec<&str> = Vec::new();
    let mut methods: Vec<Method> = Vec::new();
    let mut cell: HashMap<(&str, Method), &BenchmarkReport> = HashMap::new();
    for r in reports {
        if !dgps.contains(&r.dgp.as_str()) {
            dgps.push(&r.dgp);
        }
        let m = r.method_used.unwrap_or(r.method);
        if !methods.contains(&m) {
            methods.push(m);
        }
        cell.entry((r.dgp.as_str(), m)).or_insert(r);
    }
    let mut s = String::new();
    let _ = write!(s, "{:<8}", "dgp");
    for m in &methods {
        let _ = write!(s, " | {:^30}", m.to_string());
    }
    s.push('\n');
    let _ = write!(s, "{:<8}", "");
    for _ in &methods {
        let _ = write!(s, " | {:>10}{:>10}{:>10}", "L2", "Linf", "time(s)");
    }
    s.push('\n');
    for d in &dgps {
        let _ = write!(s, "{d:<8}");
        for m in &methods {
            match cell.get(&(*d, *m)) {
                Some(r) if r.is_ok() => {
                    let _ = write!(
                        s,
                        " | {:>10.4}{:>10.4}{:>10.1}",
                        r.l2.unwrap_or(f64::NAN),
                        r.linf.unwrap_or(f64::NAN),
                        r.seconds
                    );
                }
                _ => {
                    let _ = write!(s, " | {:>10}{:>10}{:>10}", "NA", "NA", "NA");
                }
            }
        }
        s.push('\n');
    }
    s
}

/// Where a benchmark row gets its law and graph.
#[derive(Debug, Clone, PartialEq)]
pub enum DgpSource {
    /// Bundled fixture; `dgp_seed` only matters for the generated one.
    Fixture { fixture: Fixture, dgp_seed: u64 },
    Files { law: PathBuf, graph: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub label: String,
    pub source: DgpSource,
    pub config: BenchmarkConfig,
}

impl ManifestRow {
    /// Loads the law and graph.
    pub fn load(&self) -> Result<(FullLawSpec, MGraph), String> {
        match &self.source {
            DgpSource::Fixture { fixture, dgp_seed } => Ok((fixture.spec(*dgp_seed), fixture.graph())),
            DgpSource::Files { law, graph } => {
                let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
                let spec = FullLawSpec::parse(&read(law)?).map_err(|e| format!("{}: {e}", law.display()))?;
                let g = parse_mgraph(&read(graph)?).map_err(|e| format!("{}: {e}", graph.display()))?;
                Ok((spec, g))
            }
        }
    }

    pub fn run(&self) -> BenchmarkReport {
        match self.load() {
            Ok((spec, g)) => run_benchmark(&self.label, &spec, &g, &self.config),
            Err(msg) => BenchmarkReport {
                dgp: self.label.clone(),
                method: self.config.method,
                method_used: None,
                n: self.config.n,
                m: self.config.m,
                burn_in: self.config.burn_in,
                seed: self.config.seed,
                patterns: 0,
                l2: None,
                linf: None,
                seconds: 0.0,
                failure: Some(msg),
            },
        }
    }
}

const MANIFEST_COLUMNS: [&str; 9] = ["dgp", "graph", "method", "n", "m", "burn_in", "seed", "dgp_seed", "mb_reduction"];

/// Parses a benchmark manifest: a delimited file with a header naming some
/// of `dgp` (required), `graph`, `method`, `n`, `m`, `burn_in`, `seed`,
/// `dgp_seed`, `mb_reduction`. `dgp` is a fixture name or a law file, in
/// which case `graph` is required. Relative paths resolve against `base`.
/// Empty cells take the defaults of [`BenchmarkConfig`].
pub fn parse_manifest<R: Read>(r: R, base: &Path, delimiter: u8) -> Result<Vec<ManifestRow>, EvaluateError> {
    let mut rdr = csv::ReaderBuilder::new().delimiter(delimiter).comment(Some(b'#')).trim(csv::Trim::All).from_reader(r);
    let header = rdr.headers().map_err(|e| EvaluateError::Manifest { line: 1, msg: e.to_string() })?.clone();
    let mut col: HashMap<&str, usize> = HashMap::new();
    for (i, h) in header.iter().enumerate() {
        let Some(name) = MANIFEST_COLUMNS.iter().find(|c| **c == h) else {
            return Err(EvaluateError::Manifest { line: 1, msg: format!("unknown column `{h}`") });
        };
        if col.insert(name, i).is_some() {
            return Err(EvaluateError::Manifest { line: 1, msg: format!("column `{h}` appears twice") });
        }
    }
    if !col.contains_key("dgp") {
        return Err(EvaluateError::Manifest { line: 1, msg: "missing `dgp` column".into() });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| EvaluateError::Manifest {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let err = |msg: String| EvaluateError::Manifest { line, msg };
        let get = |name: &str| col.get(name).and_then(|&i| rec.get(i)).filter(|s| !s.is_empty());
        fn num<T: std::str::FromStr>(v: Option<&str>, default: T, name: &str) -> Result<T, String> {
            match v {
                None => Ok(default),
                Some(s) => s.replace('_', "").parse().map_err(|_| format!("bad {name} `{s}`")),
            }
        }
        let d = BenchmarkConfig::default();
        let seed = num(get("seed"), d.seed, "seed").map_err(err)?;
        let config = BenchmarkConfig {
            n: parse_count(get("n"), d.n).map_err(err)?,
            m: num(get("m"), d.m, "m").map_err(err)?,
            burn_in: num(get("burn_in"), d.burn_in, "burn_in").map_err(err)?,
            seed,
            method: match get("method") {
                None => d.method,
                Some(s) => s.parse().map_err(err)?,
            },
            use_mb_reduction: num(get("mb_reduction"), d.use_mb_reduction, "mb_reduction").map_err(err)?,
            estimator: d.estimator,
        };
        let dgp = get("dgp").ok_or_else(|| err("empty `dgp`".into()))?;
        let (label, source) = match dgp.parse::<Fixture>() {
            Ok(fixture) => {
                let dgp_seed = num(get("dgp_seed"), F_DGP_SEED, "dgp_seed").map_err(err)?;
                (fixture.name().to_string(), DgpSource::Fixture { fixture, dgp_seed })
            }
            Err(_) => {
                let graph = get("graph").ok_or_else(|| err(format!("`{dgp}` is not a fixture and no graph is given")))?;
                let law = base.join(dgp);
                let label = law.file_stem().map_or(dgp.to_string(), |s| s.to_string_lossy().into_owned());
                (label, DgpSource::Files { law, graph: base.join(graph) })
            }
        };
        rows.push(ManifestRow { label, source, config });
    }
    Ok(rows)
}

/// Accepts plain integers and `1e5`-style counts.
fn parse_count(v: Option<&str>, default: usize) -> Result<usize, String> {
    let Some(s) = v else { return Ok(default) };
    let s = s.replace('_', "");
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 => Ok(x as usize),
        _ => Err(format!("bad n `{s}`")),
    }
}
