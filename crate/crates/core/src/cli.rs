//! `qhash` command-line front end.
//!
//! Every subcommand prints one JSON [`CommandResult`] on stdout. `--out`
//! additionally writes the command's artifact (bias set, state, report, …)
//! once the whole computation has succeeded. Exit codes: 0 ok, 1 usage,
//! 2 domain error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bias::{search, BiasSet, BiasSetFile, SearchConfig, SearchMode};
use crate::bounds::{
    balance_report, holevo_nayak_epsilon, pgm_success, BalancePolicy, ResistanceReport, StateEnsemble,
};
use crate::coherent::{coherent_hash, coherent_overlap};
use crate::error::Error;
use crate::field::{FieldElement, PrimeField};
use crate::generator::{ClassicalFamily, ComposedGenerator, GeneratorFile, LinearFamily, RSFamily, DEFAULT_DOMAIN_LIMIT};
use crate::qstate::{
    collision_delta, example_amplitude_qubit, example_basis_encoding, hash_state, inner_product,
    reverse_test_probability, simulate_equality_test, swap_test_probability, EqualityTest,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qhash", version, about = "Build and probe phase-encoded quantum hash functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the command's artifact to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestKind {
    Swap,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    /// Computational basis encoding of k-bit words.
    Basis,
    /// Single real qubit rotated by 2πv/2^k.
    Rotation,
}

/// Where a bias set comes from: a file or inline residues.
#[derive(Debug, Clone, Args)]
pub struct SetSource {
    /// Bias-set JSON file.
    #[arg(long, conflicts_with_all = ["q", "elements"])]
    pub set: Option<PathBuf>,

    /// Field modulus for an inline set.
    #[arg(long, requires = "elements")]
    pub q: Option<u64>,

    /// Inline set elements, comma separated.
    #[arg(long, value_delimiter = ',', requires = "q")]
    pub elements: Option<Vec<u64>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find a size-T subset of F_q with small bias.
    Search {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        size: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Heuristic)]
        mode: ModeArg,
        /// Maximum number of bias evaluations.
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Report λ(B) and optionally check δ-goodness.
    Bias {
        #[command(flatten)]
        source: SetSource,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Emit the hash state of one field element.
    Hash {
        #[command(flatten)]
        source: SetSource,
        #[arg(long)]
        w: u64,
    },
    /// Inner product and equality-test probabilities for two inputs.
    Compare {
        #[command(flatten)]
        source: SetSource,
        #[arg(long)]
        w: u64,
        /// Second input; defaults to the partner of `w` in a worst-case pair.
        #[arg(long)]
        w2: Option<u64>,
    },
    /// Monte-Carlo simulation of a SWAP or REVERSE equality test.
    Test {
        #[command(flatten)]
        source: SetSource,
        #[arg(long)]
        w: u64,
        #[arg(long)]
        w2: u64,
        #[arg(long, value_enum, default_value_t = TestKind::Swap)]
        kind: TestKind,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Reed–Solomon composed hash state of a message.
    Rs {
        /// Generator descriptor file; replaces the set and code flags.
        #[arg(long, conflicts_with_all = ["set", "q", "elements", "k", "n", "points"])]
        generator: Option<PathBuf>,
        #[command(flatten)]
        source: SetSource,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<u64>>,
        /// Message coefficients w_0, …, w_{k-1}.
        #[arg(long, value_delimiter = ',', required = true)]
        message: Vec<u64>,
        /// Also compute the exact worst-case overlap over all q^k messages.
        #[arg(long)]
        exhaustive_delta: bool,
        #[arg(long, default_value_t = DEFAULT_DOMAIN_LIMIT)]
        domain_limit: u128,
    },
    /// Resistance report from (K, s[, δ]) or from a bias set.
    Bounds {
        #[command(flatten)]
        source: SetSource,
        #[arg(long = "K", id = "domain_size")]
        domain_size: Option<u128>,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        delta: Option<f64>,
        /// Attach the pretty-good-measurement success (set input only).
        #[arg(long)]
        pgm: bool,
        #[arg(long, default_value_t = 3.0)]
        qubit_slack: f64,
        #[arg(long, default_value_t = 0.5)]
        max_delta: f64,
    },
    /// Pretty-good-measurement decoding success for an ensemble.
    Pgm {
        #[command(flatten)]
        source: SetSource,
        #[arg(long, value_enum, conflicts_with_all = ["set", "q", "elements"], requires = "k")]
        demo: Option<Demo>,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Coherent-state hash modes and their overlap.
    Coherent {
        #[command(flatten)]
        source: SetSource,
        #[arg(long)]
        w: u64,
        #[arg(long)]
        w2: Option<u64>,
        /// α as `re` or `re,im`.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        alpha: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub exit_code: i32,
}

impl CommandResult {
    fn ok(payload: Value, diagnostics: Vec<String>) -> Self {
        Self { status: Status::Ok, payload, diagnostics, exit_code: EXIT_OK }
    }

    fn failure(err: CliError) -> Self {
        let (exit_code, message) = match err {
            CliError::Usage(m) => (EXIT_USAGE, m),
            CliError::Domain(e) => (EXIT_DOMAIN, e.to_string()),
        };
        Self { status: Status::Error, payload: Value::Null, diagnostics: vec![message], exit_code }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("command results always serialize")
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// What a command produced: the printed payload and the optional `--out` file.
struct Output {
    payload: Value,
    artifact: Option<Value>,
    diagnostics: Vec<String>,
}

impl Output {
    fn new(payload: Value) -> Self {
        Self { payload, artifact: None, diagnostics: Vec::new() }
    }

    fn artifact(mut self, artifact: Value) -> Self {
        self.artifact = Some(artifact);
        self
    }

    fn note(mut self, line: String) -> Self {
        self.diagnostics.push(line);
        self
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Parses `args` (program name first), runs the command, prints the result and
/// returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let result = execute(&cli);
    println!("{}", result.to_json());
    result.exit_code
}

pub fn execute(cli: &Cli) -> CommandResult {
    match dispatch(cli).and_then(|out| {
        if let Some(path) = &cli.out {
            write_atomically(path, out.artifact.as_ref().unwrap_or(&out.payload))?;
        }
        Ok(out)
    }) {
        Ok(out) => CommandResult::ok(out.payload, out.diagnostics),
        Err(e) => CommandResult::failure(e),
    }
}

fn write_atomically(path: &Path, value: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)? + "\n";
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text).map_err(Error::from)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::Domain(e.into())
    })
}

fn load_set(source: &SetSource) -> CliResult<BiasSet> {
    match (&source.set, source.q, &source.elements) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path).map_err(Error::from)?;
            let file: BiasSetFile = serde_json::from_str(&text).map_err(Error::from)?;
            Ok(BiasSet::from_file(&file)?)
        }
        (None, Some(q), Some(elements)) => Ok(BiasSet::new(PrimeField::new(q)?, elements.iter().copied())?),
        _ => Err(CliError::Usage("a bias set is required: pass --set FILE or --q Q --elements B1,B2,…".into())),
    }
}

fn describe(source: &SetSource) -> Value {
    match &source.set {
        Some(path) => json!({ "set": path.display().to_string() }),
        None => json!({ "q": source.q, "elements": source.elements }),
    }
}

fn element(field: PrimeField, v: u64) -> CliResult<FieldElement> {
    Ok(field.element(v)?)
}

fn dispatch(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Search { q, size, mode, budget } => cmd_search(*q, *size, *mode, *budget, cli.seed),
        Command::Bias { source, delta } => cmd_bias(source, *delta),
        Command::Hash { source, w } => cmd_hash(source, *w),
        Command::Compare { source, w, w2 } => cmd_compare(source, *w, *w2),
        Command::Test { source, w, w2, kind, trials } => cmd_test(source, *w, *w2, *kind, *trials, cli.seed),
        Command::Rs { generator, source, k, n, points, message, exhaustive_delta, domain_limit } => cmd_rs(
            generator.as_deref(),
            source,
            *k,
            *n,
            points.as_deref(),
            message,
            *exhaustive_delta,
            *domain_limit,
        ),
        Command::Bounds { source, domain_size, s, delta, pgm, qubit_slack, max_delta } => cmd_bounds(
            source,
            *domain_size,
            *s,
            *delta,
            *pgm,
            BalancePolicy { qubit_slack: *qubit_slack, max_delta: *max_delta },
        ),
        Command::Pgm { source, demo, k } => cmd_pgm(source, *demo, *k),
        Command::Coherent { source, w, w2, alpha } => cmd_coherent(source, *w, *w2, alpha),
    }
}

fn cmd_search(q: u64, size: usize, mode: ModeArg, budget: u64, seed: u64) -> CliResult<Output> {
    let mode = match mode {
        ModeArg::Exhaustive => SearchMode::Exhaustive,
        ModeArg::Heuristic => SearchMode::Heuristic,
    };
    let cfg = SearchConfig { q, size, mode, budget, seed };
    let outcome = search(&cfg)?;
    let lambda = outcome.set().bias();
    let payload = json!({ "config": cfg, "result": outcome });
    Ok(Output::new(payload)
        .artifact(to_value(&outcome.best))
        .note(format!("lambda = {lambda}")))
}

fn cmd_bias(source: &SetSource, delta: Option<f64>) -> CliResult<Output> {
    let set = load_set(source)?;
    if let Some(d) = delta {
        if !(0.0..=1.0).contains(&d) {
            return Err(CliError::Domain(Error::Range(format!("delta {d} must lie in [0, 1]"))));
        }
    }
    let payload = json!({
        "q": set.modulus(),
        "elements": set.elements(),
        "bias": set.bias(),
        "worst_frequency": set.worst_frequency(),
        "delta": delta,
        "delta_good": delta.map(|d| set.is_delta_good(d)),
    });
    Ok(Output::new(payload).artifact(to_value(&set.to_file())))
}

fn cmd_hash(source: &SetSource, w: u64) -> CliResult<Output> {
    let set = load_set(source)?;
    let state = hash_state(&set, element(set.field(), w)?)?;
    let file = to_value(&state.to_file());
    Ok(Output::new(json!({ "w": w, "state": file })).artifact(file))
}

fn cmd_compare(source: &SetSource, w: u64, w2: Option<u64>) -> CliResult<Output> {
    let set = load_set(source)?;
    let field = set.field();
    let a = element(field, w)?;
    let b = match w2 {
        Some(v) => element(field, v)?,
        None => a.add(field.element(set.worst_frequency())?)?,
    };
    let sa = hash_state(&set, a)?;
    let sb = hash_state(&set, b)?;
    let ip = inner_product(&sa, &sb)?;
    let payload = json!({
        "w": a.value(),
        "w2": b.value(),
        "inner_product": pair(ip),
        "magnitude": ip.norm(),
        "swap_probability": swap_test_probability(&sa, &sb)?,
        "reverse_probability": reverse_test_probability(&set, a, &sb)?,
        "collision_delta": collision_delta(&set)?,
    });
    Ok(Output::new(payload))
}

fn cmd_test(source: &SetSource, w: u64, w2: u64, kind: TestKind, trials: u64, seed: u64) -> CliResult<Output> {
    let set = load_set(source)?;
    let field = set.field();
    let sa = hash_state(&set, element(field, w)?)?;
    let sb = hash_state(&set, element(field, w2)?)?;
    let kind = match kind {
        TestKind::Swap => EqualityTest::Swap,
        TestKind::Reverse => EqualityTest::Reverse,
    };
    let outcome = simulate_equality_test(kind, &sa, &sb, trials, seed)?;
    Ok(Output::new(json!({ "w": w, "w2": w2, "seed": seed, "outcome": outcome })))
}

#[allow(clippy::too_many_arguments)]
fn cmd_rs(
    generator: Option<&Path>,
    source: &SetSource,
    k: Option<usize>,
    n: Option<usize>,
    points: Option<&[u64]>,
    message: &[u64],
    exhaustive_delta: bool,
    domain_limit: u128,
) -> CliResult<Output> {
    let g = match generator {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(Error::from)?;
            let file: GeneratorFile = serde_json::from_str(&text).map_err(Error::from)?;
            ComposedGenerator::from_file(&file)?
        }
        None => {
            let (Some(k), Some(n)) = (k, n) else {
                return Err(CliError::Usage("rs needs --k and --n (or --generator FILE)".into()));
            };
            let set = load_set(source)?;
            let field = set.field();
            let inner = match points {
                Some(p) if p.len() != n => {
                    return Err(CliError::Domain(Error::LengthMismatch { expected: n, actual: p.len() }))
                }
                Some(p) => RSFamily::new(field, k, p.to_vec())?,
                None => RSFamily::with_default_points(field, k, n)?,
            };
            ComposedGenerator::new(LinearFamily::new(set), inner)?
        }
    };
    let (q, k) = (g.field().modulus(), g.inner().k());
    if k < 2 {
        return Err(CliError::Domain(Error::InvalidConfig(format!("rs needs 2 <= k <= n <= q, got k={k}"))));
    }
    let field = g.field();
    let msg = message.iter().map(|&v| element(field, v)).collect::<CliResult<Vec<_>>>()?;
    let delta = if exhaustive_delta { Some(g.collision_delta(domain_limit)?) } else { None };
    let codeword: Vec<u64> = g.inner().encode(&msg)?.iter().map(|c| c.value()).collect();
    let state = g.hash_state(&msg)?;
    let bound = g.collision_bound();

    let mut out = Output::new(json!({
        "generator": g.to_file(),
        "message": message,
        "codeword": codeword,
        "state": state.to_file(),
        "collision_delta": delta,
        "collision_bound": bound,
    }))
    .artifact(to_value(&state.to_file()))
    .note(format!(
        "RS codeword: ({})",
        codeword.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
    ));
    if let Some(d) = delta {
        out = out.note(format!("exact collision delta {d} vs bound (k-1)/n + lambda = {bound} over q^k = {}", (q as u128).pow(k as u32)));
    }
    Ok(out)
}

fn cmd_bounds(
    source: &SetSource,
    domain_size: Option<u128>,
    s: Option<u32>,
    delta: Option<f64>,
    pgm: bool,
    policy: BalancePolicy,
) -> CliResult<Output> {
    if let (Some(k), Some(s)) = (domain_size, s) {
        if source.set.is_some() || source.q.is_some() {
            return Err(CliError::Usage("pass either --K/--s or a bias set, not both".into()));
        }
        if pgm {
            return Err(CliError::Usage("--pgm needs a bias set".into()));
        }
        let payload = match delta {
            Some(d) => to_value(&ResistanceReport::assess(k, s, d, policy)?),
            None => json!({ "K": k, "s": s, "epsilon_bound": holevo_nayak_epsilon(s, k)? }),
        };
        let payload = json!({ "report": payload, "provenance": { "inputs": { "K": k, "s": s, "delta": delta } } });
        return Ok(Output::new(payload));
    }
    if domain_size.is_some() || s.is_some() {
        return Err(CliError::Usage("--K and --s must be given together".into()));
    }
    let set = load_set(source)?;
    let mut report = balance_report(set.modulus(), set.len(), &set, policy)?;
    if pgm {
        let success = pgm_success(&StateEnsemble::from_bias_set(&set)?)?;
        report = report.with_measured_success(success)?;
    }
    let payload = json!({ "report": report, "provenance": { "inputs": describe(source) } });
    Ok(Output::new(payload))
}

fn cmd_pgm(source: &SetSource, demo: Option<Demo>, k: Option<u32>) -> CliResult<Output> {
    let (label, ensemble) = match demo {
        Some(demo) => {
            let k = k.ok_or_else(|| CliError::Usage("--demo needs --k".into()))?;
            if !(1..=8).contains(&k) {
                return Err(CliError::Domain(Error::Range(format!("demo word length k = {k} must lie in [1, 8]"))));
            }
            let states = (0..1u64 << k)
                .map(|v| match demo {
                    Demo::Basis => example_basis_encoding(v, k),
                    Demo::Rotation => example_amplitude_qubit(v, k),
                })
                .collect::<crate::Result<Vec<_>>>()?;
            let label = match demo {
                Demo::Basis => json!({ "demo": "basis", "k": k }),
                Demo::Rotation => json!({ "demo": "rotation", "k": k }),
            };
            (label, StateEnsemble::uniform(states)?)
        }
        None => {
            let set = load_set(source)?;
            (describe(source), StateEnsemble::from_bias_set(&set)?)
        }
    };
    let first = &ensemble.states()[0];
    let s = first.num_qubits();
    let size = ensemble.len() as u128;
    let success = pgm_success(&ensemble)?;
    let payload = json!({
        "ensemble": label,
        "K": size,
        "s": s,
        "active_dim": first.active_dim(),
        "pgm_success": success,
        "epsilon_bound": holevo_nayak_epsilon(s, size)?,
        "guessing_floor": ensemble.guessing_floor(),
    });
    Ok(Output::new(payload))
}

fn cmd_coherent(source: &SetSource, w: u64, w2: Option<u64>, alpha: &[f64]) -> CliResult<Output> {
    let alpha = match alpha {
        [re] => Complex64::new(*re, 0.0),
        [re, im] => Complex64::new(*re, *im),
        _ => return Err(CliError::Usage("--alpha takes `re` or `re,im`".into())),
    };
    let set = load_set(source)?;
    let field = set.field();
    let a = element(field, w)?;
    let ca = coherent_hash(&set, a, alpha)?;
    let mut payload = json!({ "w": w, "alpha": pair(alpha), "state": ca.to_file() });
    let artifact = to_value(&ca.to_file());
    if let Some(v) = w2 {
        let b = element(field, v)?;
        let cb = coherent_hash(&set, b, alpha)?;
        let ov = coherent_overlap(&ca, &cb)?;
        let ip = inner_product(&hash_state(&set, a)?, &hash_state(&set, b)?)?;
        payload["w2"] = json!(v);
        payload["state2"] = to_value(&cb.to_file());
        payload["overlap"] = json!(pair(ov));
        payload["overlap_magnitude"] = json!(ov.norm());
        payload["predicted_magnitude"] = json!((-alpha.norm_sqr() * (1.0 - ip.re)).exp());
    }
    Ok(Output::new(payload).artifact(artifact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> CommandResult {
        let cli = Cli::try_parse_from(std::iter::once("qhash").chain(args.iter().copied())).unwrap();
        execute(&cli)
    }

    #[test]
    fn search_exhaustive_f5() {
        let r = run(&["search", "--q", "5", "--size", "2", "--mode", "exhaustive"]);
        assert_eq!(r.status, Status::Ok);
        let lambda = r.payload["result"]["set"]["bias"].as_f64().unwrap();
        assert!((lambda - 0.809017).abs() < 1e-6);
    }

    #[test]
    fn search_rejects_composite() {
        let r = run(&["search", "--q", "8", "--size", "2"]);
        assert_eq!(r.status, Status::Error);
        assert_eq!(r.exit_code, EXIT_DOMAIN);
        assert!(r.diagnostics[0].contains("not prime"));
    }

    #[test]
    fn missing_set_is_usage_error() {
        let r = run(&["hash", "--w", "1"]);
        assert_eq!(r.exit_code, EXIT_USAGE);
    }

    #[test]
    fn compare_worst_pair() {
        let r = run(&["compare", "--q", "7", "--elements", "1,2,4", "--w", "0"]);
        assert_eq!(r.status, Status::Ok);
        assert!((r.payload["magnitude"].as_f64().unwrap() - 2f64.sqrt() / 3.0).abs() < 1e-12);
        let same = run(&["compare", "--q", "7", "--elements", "1,2,4", "--w", "3", "--w2", "3"]);
        assert!((same.payload["magnitude"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((same.payload["swap_probability"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_from_k_and_s() {
        let r = run(&["bounds", "--K", "1024", "--s", "3"]);
        assert_eq!(r.payload["report"]["epsilon_bound"].as_f64().unwrap(), 1.0 / 128.0);
        assert_eq!(run(&["bounds", "--K", "1024"]).exit_code, EXIT_USAGE);
    }
}
