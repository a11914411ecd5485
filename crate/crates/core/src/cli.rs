//! Command-line front end.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analytic::{catalog, limiting_ratio_with, Env, Precision, RatioValue};
use crate::complexity::{reduce_irreducible, ComplexityLab, DEFAULT_BUDGET};
use crate::counting::{self, CountSeries};
use crate::error::{Error, Result};
use crate::exact_dist::{limit_estimate_from, FunctionCounts, DEFAULT_TOLERANCE, DEFAULT_WINDOW};
use crate::formula::{parse_formula, TruthTable};
use crate::sampler::{monte_carlo_with, SamplerContext, Stat};
use crate::verify::{run_suite, Suite};

/// Environment variable naming a directory for cached count series.
pub const CACHE_ENV: &str = "ANDOR_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(name = "andor", version, about = "Random and/or trees: counting, distributions, limiting ratios, sampling, complexity")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    /// Number of variables.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Tree size (the horizon `M` for `limit`).
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long, global = true)]
    pub max_size: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Forces floating-point evaluation at this many bits.
    #[arg(long, global = true)]
    pub precision_bits: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout by default).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest tree size searched by `complexity`.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tree counts per size: m, a_hat, a_total.
    Count,
    /// Exact distribution over Boolean functions at size m.
    Dist,
    /// Tail estimate of the limiting probability of a function.
    Limit {
        /// Truth table in hex.
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
    },
    /// Monte Carlo estimates from uniform samples.
    Sample {
        /// Comma-separated statistics.
        #[arg(long, value_delimiter = ',', default_values_t = ["simple_tautology_rate".to_string(), "tautology_rate".to_string()])]
        stats: Vec<String>,
        /// Print this many sampled trees instead of a report.
        #[arg(long)]
        emit_trees: Option<u64>,
    },
    /// Limiting ratio of a catalog family.
    Analyze {
        #[arg(long)]
        family: String,
        /// `key=value` pairs, comma-separated.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        #[arg(long)]
        t_value: Option<f64>,
        #[arg(long)]
        tau_prime: Option<f64>,
    },
    /// Tree-size complexity and number of minimal trees.
    Complexity {
        /// Truth table in hex.
        #[arg(long)]
        f: Option<String>,
        #[arg(long, conflicts_with = "f")]
        all: bool,
    },
    /// Reads formulas from stdin, one per line, and writes their reductions.
    Reduce,
    /// Runs a suite of reproduction checks.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Count => "count",
            Command::Dist => "dist",
            Command::Limit { .. } => "limit",
            Command::Sample { .. } => "sample",
            Command::Analyze { .. } => "analyze",
            Command::Complexity { .. } => "complexity",
            Command::Reduce => "reduce",
            Command::Verify { .. } => "verify",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Count | Command::Dist | Command::Complexity { .. } => Format::Csv,
            _ => Format::Json,
        }
    }

    fn default_m(&self) -> usize {
        match self {
            Command::Limit { .. } => 60,
            Command::Sample { .. } => 100,
            _ => 10,
        }
    }
}

/// Fully resolved settings, embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: u32,
    pub m: usize,
    pub max_size: usize,
    pub seed: u64,
    pub trials: u64,
    pub precision_bits: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub budget: usize,
    pub args: Value,
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::InvalidParameter(format!("config line {}: expected key = value", i + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn file_value<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    file.get(key)
        .map(|v| v.parse().map_err(|_| Error::InvalidParameter(format!("config key `{key}`: cannot parse `{v}`"))))
        .transpose()
}

impl RunConfig {
    /// Merges flags over the config file over defaults.
    pub fn resolve(cli: &Cli) -> Result<RunConfig> {
        let file = match &cli.global.config {
            Some(p) => parse_config_file(&fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)?,
            None => BTreeMap::new(),
        };
        const KNOWN: [&str; 9] = ["n", "m", "max_size", "seed", "trials", "precision_bits", "format", "out", "budget"];
        if let Some(k) = file.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!("unknown config key `{k}`")));
        }
        let g = &cli.global;
        let cmd = &cli.command;
        let format = match (g.format, file.get("format").map(String::as_str)) {
            (Some(f), _) => f,
            (None, Some("csv")) => Format::Csv,
            (None, Some("json")) => Format::Json,
            (None, Some(other)) => return Err(Error::InvalidParameter(format!("config key `format`: unknown format `{other}`"))),
            (None, None) => cmd.default_format(),
        };
        let m = g.m.or(file_value(&file, "m")?).unwrap_or(cmd.default_m());
        let cfg = RunConfig {
            command: cmd.name().to_string(),
            n: g.n.or(file_value(&file, "n")?).unwrap_or(2),
            m,
            max_size: g.max_size.or(file_value(&file, "max_size")?).unwrap_or(m.max(20)),
            seed: g.seed.or(file_value(&file, "seed")?).unwrap_or(0),
            trials: g.trials.or(file_value(&file, "trials")?).unwrap_or(1000),
            precision_bits: g.precision_bits.or(file_value(&file, "precision_bits")?),
            format,
            out: g.out.clone().or(file.get("out").map(PathBuf::from)),
            budget: g.budget.or(file_value(&file, "budget")?).unwrap_or(DEFAULT_BUDGET),
            args: command_args(cmd),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("--n must be at least 1".into()));
        }
        if self.m == 0 || self.max_size == 0 {
            return Err(Error::InvalidParameter("sizes must be at least 1".into()));
        }
        if self.precision_bits == Some(0) {
            return Err(Error::InvalidParameter("--precision-bits must be positive".into()));
        }
        let tabular = matches!(self.command.as_str(), "count" | "dist" | "complexity");
        if self.format == Format::Csv && !tabular {
            return Err(Error::InvalidParameter(format!("`{}` has no CSV form; use --format json", self.command)));
        }
        Ok(())
    }

    fn precision(&self) -> Precision {
        self.precision_bits.map_or(Precision::Auto, Precision::Float)
    }
}

fn command_args(cmd: &Command) -> Value {
    match cmd {
        Command::Limit { f, tol, window } => json!({ "f": f, "tol": tol, "window": window }),
        Command::Sample { stats, emit_trees } => json!({ "stats": stats, "emit_trees": emit_trees }),
        Command::Analyze { family, params, t_value, tau_prime } => json!({ "family": family, "params": params, "t_value": t_value, "tau_prime": tau_prime }),
        Command::Complexity { f, all } => json!({ "f": f, "all": all }),
        Command::Verify { suite } => json!({ "suite": suite }),
        Command::Count | Command::Dist | Command::Reduce => json!({}),
    }
}

/// Exit status for an error: 2 for bad input, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. }
        | Error::Stratification(_)
        | Error::EmptySizeClass(_)
        | Error::Arity { .. }
        | Error::VariableOutOfRange { .. }
        | Error::InvalidParameter(_)
        | Error::InvalidPath(_)
        | Error::MissingEnv(_)
        | Error::Precondition(_) => 2,
        _ => 1,
    }
}

struct Output {
    sink: Box<dyn Write>,
}

impl Output {
    fn open(path: Option<&Path>) -> Result<Output> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)),
            None => Box::new(io::BufWriter::new(io::stdout().lock())),
        };
        Ok(Output { sink })
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.sink, "{s}").map_err(io_err)
    }

    fn table(&mut self, cfg: &RunConfig, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        match cfg.format {
            Format::Csv => {
                self.line(&format!("# config={}", serde_json::to_string(cfg).map_err(json_err)?))?;
                let mut w = csv::Writer::from_writer(&mut self.sink);
                w.write_record(header).map_err(csv_err)?;
                for r in rows {
                    w.write_record(&r).map_err(csv_err)?;
                }
                w.flush().map_err(io_err)
            }
            Format::Json => {
                let rows: Vec<Value> = rows.into_iter().map(|r| Value::Object(header.iter().map(|h| h.to_string()).zip(r.into_iter().map(Value::String)).collect())).collect();
                self.json(cfg, json!({ "rows": rows }))
            }
        }
    }

    fn json(&mut self, cfg: &RunConfig, body: Value) -> Result<()> {
        let mut obj = serde_json::Map::new();
        obj.insert("config".into(), serde_json::to_value(cfg).map_err(json_err)?);
        match body {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("result".into(), other);
            }
        }
        self.line(&serde_json::to_string_pretty(&Value::Object(obj)).map_err(json_err)?)
    }

    fn finish(mut self) -> Result<()> {
        self.sink.flush().map_err(io_err)
    }
}

fn io_err(e: io::Error) -> Error {
    Error::Io(e.to_string())
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Io(e.to_string())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Count series through `max_size`, read from or written to the cache directory when one is set.
pub fn cached_series(n: u32, max_size: usize) -> Result<CountSeries> {
    let Some(dir) = std::env::var_os(CACHE_ENV) else {
        return counting::series(n, max_size);
    };
    let path = PathBuf::from(dir).join(format!("a_hat_n{n}.txt"));
    if let Ok(text) = fs::read_to_string(&path) {
        let mut a_hat = vec![BigUint::default()];
        for line in text.lines() {
            match line.trim().parse::<BigUint>() {
                Ok(v) => a_hat.push(v),
                Err(_) => break,
            }
        }
        if a_hat.len() > max_size {
            a_hat.truncate(max_size + 1);
            return Ok(counting::from_a_hat(n, a_hat));
        }
    }
    let s = counting::series(n, max_size)?;
    let body: String = s.a_hat[1..].iter().map(|v| format!("{v}\n")).collect();
    if let Err(e) = fs::create_dir_all(path.parent().expect("joined path")).and_then(|_| fs::write(&path, body)) {
        eprintln!("warning: cannot write cache {}: {e}", path.display());
    }
    Ok(s)
}

fn parse_params(items: &[String]) -> Result<BTreeMap<String, i64>> {
    items
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let (k, v) = s.split_once('=').ok_or_else(|| Error::InvalidParameter(format!("parameter `{s}`: expected key=value")))?;
            let v = v.trim().parse().map_err(|_| Error::InvalidParameter(format!("parameter `{s}`: value must be an integer")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = RunConfig::resolve(cli)?;
    let mut out = Output::open(cfg.out.as_deref())?;
    let mut status = 0;
    match &cli.command {
        Command::Count => {
            let s = cached_series(cfg.n, cfg.max_size)?;
            let rows = (1..=cfg.max_size).map(|m| vec![m.to_string(), s.a_hat[m].to_string(), s.a_total[m].to_string()]).collect();
            out.table(&cfg, &["m", "a_hat", "a_total"], rows)?;
        }
        Command::Dist => {
            let counts = FunctionCounts::new(cfg.n, cfg.m)?;
            let table = counts.table(cfg.m)?;
            let dist = counts.distribution(cfg.m)?;
            let rows = dist
                .probs
                .iter()
                .map(|(f, p)| {
                    let k = f.bits() as usize;
                    vec![f.to_hex(), table.and_rooted[k].to_string(), table.or_rooted[k].to_string(), p.to_string()]
                })
                .collect();
            out.table(&cfg, &["truth_table_hex", "count_and", "count_or", "probability"], rows)?;
        }
        Command::Limit { f, tol, window } => {
            let f = TruthTable::from_hex(cfg.n, f)?;
            eprintln!("counting functions of {} variables through size {}", cfg.n, cfg.m);
            let counts = FunctionCounts::new(cfg.n, cfg.m)?;
            let est = limit_estimate_from(&counts, f, cfg.m, *tol, *window)?;
            out.json(&cfg, serde_json::to_value(est).map_err(json_err)?)?;
        }
        Command::Sample { stats, emit_trees } => {
            eprintln!("building sampler tables for n = {} through size {}", cfg.n, cfg.m);
            let ctx = SamplerContext::from_series(cached_series(cfg.n, cfg.m + 1)?)?;
            match emit_trees {
                Some(count) => {
                    out.line(&format!("# config={}", serde_json::to_string(&cfg).map_err(json_err)?))?;
                    for i in 0..*count {
                        out.line(&ctx.sample_trial(cfg.m, cfg.seed, i)?.serialize())?;
                    }
                }
                None => {
                    let stats = stats.iter().map(|s| Stat::parse(s, cfg.n)).collect::<Result<Vec<_>>>()?;
                    let report = monte_carlo_with(&ctx, cfg.m, cfg.trials, cfg.seed, &stats)?;
                    out.json(&cfg, serde_json::to_value(report).map_err(json_err)?)?;
                }
            }
        }
        Command::Analyze { family, params, t_value, tau_prime } => {
            let f = catalog::by_name(family, &parse_params(params)?)?;
            let env = Env { t_value: *t_value, tau_prime: *tau_prime };
            let v = limiting_ratio_with(&f, cfg.n, &env, cfg.precision())?;
            let exact = match &v {
                RatioValue::Exact(q) => Some(q.to_string()),
                RatioValue::Float(_) => None,
            };
            let float = v.to_f64();
            out.json(&cfg, json!({ "family": f.name, "params": f.params, "exact": exact, "float": float, "asymptotic_reference": f.asymptotic_reference(cfg.n) }))?;
        }
        Command::Complexity { f, all } => {
            let lab = ComplexityLab::new(cfg.n, cfg.budget)?;
            let fs: Vec<TruthTable> = match (f, all) {
                (Some(hex), _) => vec![TruthTable::from_hex(cfg.n, hex)?],
                (None, true) => TruthTable::all(cfg.n).collect(),
                (None, false) => return Err(Error::InvalidParameter("complexity needs --f <hex> or --all".into())),
            };
            let mut rows = Vec::new();
            for f in fs {
                let row = match lab.complexity(f) {
                    Ok(rec) => vec![f.to_hex(), rec.l.to_string(), rec.m_f.map(|v| v.to_string()).unwrap_or_default()],
                    Err(Error::ComplexityUnknown(b)) => vec![f.to_hex(), format!(">{b}"), String::new()],
                    Err(e) => return Err(e),
                };
                rows.push(row);
            }
            out.table(&cfg, &["truth_table_hex", "L", "m_f"], rows)?;
        }
        Command::Reduce => {
            let n = cli.global.n.unwrap_or(u32::MAX);
            for line in io::stdin().lock().lines() {
                let line = line.map_err(io_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                let t = parse_formula(line.trim(), n)?;
                out.line(&reduce_irreducible(&t).tree.serialize())?;
            }
        }
        Command::Verify { suite } => {
            let suite = Suite::parse(suite)?;
            let results = run_suite(suite, &mut |msg| eprintln!("{msg}"));
            for r in &results {
                eprintln!("criterion {:>2} {} ({:.1} s)", r.criterion, if r.passed { "PASS" } else { "FAIL" }, r.seconds);
            }
            let passed = results.iter().all(|r| r.passed);
            out.json(&cfg, json!({ "passed": passed, "checks": results }))?;
            if !passed {
                status = 1;
            }
        }
    }
    out.finish()?;
    Ok(status)
}

/// Parses `args`, runs the command and maps every outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
