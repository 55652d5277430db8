//! `tamc`: parameterized verification and synthesis for threshold automata.
//!
//! Exit codes: 0 positive verdict (reachable, coverable, violation found,
//! assignment found, witness replays), 1 negative verdict, 2 usage or input
//! error, 3 unknown or resource limit.

mod bench;
mod config;
mod report;
mod witness;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use tamc_core::cover::{cover, CoverError, CoverMode, CoverOutcome};
use tamc_core::eltl::{check_spec, parse_spec, CheckOptions, EltlError, SpecOutcome};
use tamc_core::generators::{
    gen_3sat, gen_sigma2, parse_dimacs, parse_qdimacs_lite, SatVariant,
};
use tamc_core::presburger::{SolverConfig, SolverError};
use tamc_core::reach::{solve_reach, InitSpec, ReachError, ReachOutcome, ReachQuery};
use tamc_core::semantics::{initial_configs, oracle_search, Configuration, OracleLimits};
use tamc_core::synthesis::{synthesize, SynthError, SynthOptions, SynthOutcome};
use tamc_core::eltl::print_spec;
use tamc_core::ta::{parse_ta_with, print_ta, ParseOptions, Parsed, ThresholdAutomaton};

use config::FileConfig;
use report::{digest_file, write_text, RunReport, SolverInfo};
use witness::Witness;

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(m: impl Into<String>) -> Self {
        CliError { code: 2, message: m.into() }
    }
    pub fn negative(m: impl Into<String>) -> Self {
        CliError { code: 1, message: m.into() }
    }
    pub fn unknown(m: impl Into<String>) -> Self {
        CliError { code: 3, message: m.into() }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::SolverUnavailable(..) => CliError::input(e.to_string()),
            e => CliError::unknown(e.to_string()),
        }
    }
}

impl From<ReachError> for CliError {
    fn from(e: ReachError) -> Self {
        match e {
            ReachError::Solver(s) => s.into(),
            e => CliError::unknown(e.to_string()),
        }
    }
}

impl From<EltlError> for CliError {
    fn from(e: EltlError) -> Self {
        match e {
            EltlError::Solver(s) => s.into(),
            EltlError::Reach(r) => r.into(),
            EltlError::NotMultiplicative(_) | EltlError::UnsupportedShape(_) | EltlError::NormalizationFailed(_) => {
                CliError::input(e.to_string())
            }
            e => CliError::unknown(e.to_string()),
        }
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::Reach(r) => r.into(),
            e => CliError::input(e.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Solver(s) => s.into(),
            SynthError::Eltl(x) => x.into(),
            e => CliError::input(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "tamc", version, about = "Verification and synthesis for threshold automata")]
struct Cli {
    /// Flat TOML config file (default: ./tamc.toml if present).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// SMT solver binary (also TAMC_SOLVER).
    #[arg(long, global = true)]
    solver: Option<PathBuf>,
    /// Per-query solver timeout in ms (also TAMC_TIMEOUT_MS).
    #[arg(long, global = true)]
    timeout_ms: Option<u64>,
    /// Solver random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Also write the report to this file.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Where to write the witness (default: <input stem>.<command>.witness.json).
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate an automaton.
    Parse {
        file: PathBuf,
        /// Reject updates other than 0/1.
        #[arg(long)]
        strict: bool,
        /// Also parse a specification against the automaton.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Coverability of a location.
    Cover {
        file: PathBuf,
        #[arg(long)]
        location: String,
        /// Any admissible initial configuration.
        #[arg(long, conflicts_with = "init")]
        param_mode: bool,
        /// Initial configuration as JSON: {"params": {..}, "kappa": {..}}.
        #[arg(long)]
        init: Option<String>,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        assume_multiplicative: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Reachability of a configuration pattern.
    Reach {
        file: PathBuf,
        #[arg(long)]
        init: Option<String>,
        /// Locations that must be empty (comma separated).
        #[arg(long, value_delimiter = ',')]
        zero: Vec<String>,
        /// Locations that must be occupied (comma separated).
        #[arg(long, value_delimiter = ',')]
        pos: Vec<String>,
        #[arg(long)]
        bound: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// Search for a run satisfying a (violation) specification.
    Mc {
        file: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        max_orders: Option<usize>,
        #[arg(long)]
        assume_multiplicative: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Synthesize guard coefficients of a sketch.
    Synth {
        file: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        denom: Option<i64>,
        #[arg(long)]
        num_bound: Option<i64>,
        #[arg(long)]
        budget_s: Option<u64>,
        #[arg(long)]
        max_orders: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Bounded brute-force search, or replay of a witness file.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Location to cover (without --replay).
        #[arg(long)]
        location: Option<String>,
        /// Inclusive parameter bounds, e.g. `n=4..7,t=1,f=0..1`.
        #[arg(long)]
        params: Option<String>,
        #[arg(long, default_value_t = 6)]
        bound: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compile a reduction instance into an automaton.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// For sigma2: where to write the specification.
        #[arg(long)]
        spec_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Variant::Param)]
        variant: Variant,
    },
    /// Run a benchmark manifest.
    Bench {
        manifest: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Directory for bench.csv and bench.json (default: current).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    #[value(name = "3sat")]
    Sat,
    Sigma2,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Variant {
    Param,
    Nonparam,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("tamc: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub struct Ctx {
    pub file: FileConfig,
    pub solver: SolverConfig,
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let solver = file.solver(cli.solver.as_ref(), cli.timeout_ms, cli.seed);
    let ctx = Ctx { file, solver };
    let start = Instant::now();
    let (report, code, out) = match cli.command {
        Command::Parse { file, strict, spec } => cmd_parse(&file, strict, spec.as_deref())?,
        Command::Cover {
            file,
            location,
            param_mode,
            init,
            bound,
            assume_multiplicative,
            out,
        } => cmd_cover(&ctx, &file, &location, param_mode, init.as_deref(), bound, assume_multiplicative, out)?,
        Command::Reach {
            file,
            init,
            zero,
            pos,
            bound,
            out,
        } => cmd_reach(&ctx, &file, init.as_deref(), &zero, &pos, bound, out)?,
        Command::Mc {
            file,
            spec,
            max_orders,
            assume_multiplicative,
            out,
        } => cmd_mc(&ctx, &file, &spec, max_orders, assume_multiplicative, out)?,
        Command::Synth {
            file,
            spec,
            denom,
            num_bound,
            budget_s,
            max_orders,
            out,
        } => cmd_synth(&ctx, &file, &spec, denom, num_bound, budget_s, max_orders, out)?,
        Command::Oracle {
            file,
            replay,
            location,
            params,
            bound,
            json,
        } => cmd_oracle(&file, replay.as_deref(), location.as_deref(), params.as_deref(), bound, json)?,
        Command::Gen {
            kind,
            input,
            output,
            spec_out,
            variant,
        } => return cmd_gen(kind, &input, output, spec_out, variant),
        Command::Bench { manifest, jobs, out_dir } => {
            let jobs = jobs.or(ctx.file.jobs).unwrap_or(1);
            return bench::run_manifest(&ctx, &manifest, jobs, out_dir.as_deref());
        }
    };
    let text = report.finish(start.elapsed().as_millis() as u64);
    println!("{text}");
    if let Some(p) = out {
        write_text(&p, &text)?;
    }
    Ok(code)
}

type CmdResult = Result<(RunReport, u8, Option<PathBuf>), CliError>;

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_ta(path: &Path, strict: bool) -> Result<Parsed, CliError> {
    let text = read(path)?;
    parse_ta_with(&text, ParseOptions { strict })
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_concrete(path: &Path) -> Result<ThresholdAutomaton, CliError> {
    load_ta(path, false)?
        .into_concrete()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn witness_path(out: &Output, input: &Path, command: &str) -> PathBuf {
    out.witness.clone().unwrap_or_else(|| {
        let stem = input
            .file_name()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "input".into());
        let stem = stem.strip_suffix(".json").unwrap_or(&stem);
        let stem = stem.strip_suffix(".ta").unwrap_or(stem);
        PathBuf::from(format!("{stem}.{command}.witness.json"))
    })
}

fn save_witness(path: &Path, w: &Witness) -> Result<String, CliError> {
    let text = serde_json::to_string_pretty(w).expect("serializable");
    write_text(&path.to_path_buf(), &text)?;
    Ok(path.display().to_string())
}

fn cmd_parse(file: &Path, strict: bool, spec: Option<&Path>) -> CmdResult {
    let mut inputs = vec![digest_file(file)?];
    let parsed = load_ta(file, strict)?;
    let (kind, ta) = match &parsed {
        Parsed::Concrete(ta) => ("concrete", ta.to_sketch()),
        Parsed::Sketch(s) => ("sketch", s.clone()),
    };
    let mut report = RunReport::new("parse", vec![], "ok")
        .with("kind", kind)
        .with("locations", ta.locations.len())
        .with("rules", ta.rules.len())
        .with("shared", ta.shared.len())
        .with("parameters", &ta.env.params)
        .with("indeterminates", &ta.indeterminates);
    if let Some(s) = spec {
        inputs.push(digest_file(s)?);
        let f = parse_spec(&read(s)?, &ta).map_err(|e| CliError::input(format!("{}: {e}", s.display())))?;
        report = report.with("spec", print_spec(&f, &ta));
    }
    report.inputs = inputs;
    Ok((report, 0, None))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitDoc {
    params: BTreeMap<String, u64>,
    #[serde(default)]
    kappa: BTreeMap<String, u64>,
    #[serde(default)]
    globals: BTreeMap<String, u64>,
}

/// Reads `--init`: inline JSON or a path to a JSON file.
pub fn parse_init(ta: &ThresholdAutomaton, text: &str) -> Result<Configuration, CliError> {
    let body = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        read(Path::new(text))?
    };
    let doc: InitDoc = serde_json::from_str(&body).map_err(|e| CliError::input(format!("--init: {e}")))?;
    let mut params = vec![0; ta.env.params.len()];
    for (k, v) in &doc.params {
        let p = ta
            .env
            .param_index(k)
            .ok_or_else(|| CliError::input(format!("--init: unknown parameter `{k}`")))?;
        params[p] = *v;
    }
    if doc.params.len() != params.len() {
        return Err(CliError::input("--init: every parameter needs a value"));
    }
    let mut kappa = vec![0; ta.locations.len()];
    for (k, v) in &doc.kappa {
        let l = ta
            .location_index(k)
            .ok_or_else(|| CliError::input(format!("--init: unknown location `{k}`")))?;
        kappa[l] = *v;
    }
    let mut globals = vec![0; ta.shared.len()];
    for (k, v) in &doc.globals {
        let x = ta
            .var_index(k)
            .ok_or_else(|| CliError::input(format!("--init: unknown shared variable `{k}`")))?;
        globals[x] = *v;
    }
    let c = Configuration::new(kappa, globals, params);
    if !c.is_valid(ta) {
        return Err(CliError::input(
            "--init: parameters violate the resilience condition or counters do not sum to N",
        ));
    }
    Ok(c)
}

fn location(ta: &ThresholdAutomaton, name: &str) -> Result<usize, CliError> {
    ta.location_index(name)
        .ok_or_else(|| CliError::input(format!("unknown location `{name}`")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_cover(
    ctx: &Ctx,
    file: &Path,
    loc: &str,
    param_mode: bool,
    init: Option<&str>,
    bound: Option<u64>,
    assume: bool,
    out: Output,
) -> CmdResult {
    let ta = load_concrete(file)?;
    let l = location(&ta, loc)?;
    let mode = match (param_mode, init) {
        (_, Some(text)) => CoverMode::From(parse_init(&ta, text)?),
        (true, None) => CoverMode::Parameterized,
        (false, None) => return Err(CliError::input("give --param-mode or --init")),
    };
    let assume = assume || ctx.file.assume_multiplicative.unwrap_or(false);
    let bound = bound.or(ctx.file.bound);
    let outcome = cover(&ta, l, &mode, bound, assume, &ctx.solver)?;
    let mut report = RunReport::new("cover", vec![digest_file(file)?], "")
        .with("location", loc)
        .with("mode", if param_mode && init.is_none() { "parameterized" } else { "concrete" });
    report.solver = Some(SolverInfo::of(&ctx.solver));
    let code = match outcome {
        CoverOutcome::Coverable(w) => {
            report.verdict = "coverable".into();
            match w {
                Some(w) => {
                    let w = Witness::Reach {
                        zero: vec![],
                        pos: vec![loc.to_string()],
                        witness: w,
                    };
                    report.witness = Some(save_witness(&witness_path(&out, file, "cover"), &w)?);
                }
                None => report = report.with("method", "saturation"),
            }
            0
        }
        CoverOutcome::NotCoverable => {
            report.verdict = "not_coverable".into();
            1
        }
        CoverOutcome::Unknown(r) => {
            report.verdict = "unknown".into();
            report = report.with("reason", r);
            3
        }
    };
    Ok((report, code, out.json))
}

fn cmd_reach(
    ctx: &Ctx,
    file: &Path,
    init: Option<&str>,
    zero: &[String],
    pos: &[String],
    bound: Option<u64>,
    out: Output,
) -> CmdResult {
    let ta = load_concrete(file)?;
    let ids = |names: &[String]| -> Result<Vec<usize>, CliError> {
        names.iter().map(|n| location(&ta, n)).collect()
    };
    let q = ReachQuery {
        init: match init {
            Some(t) => InitSpec::Concrete(parse_init(&ta, t)?),
            None => InitSpec::Parameterized(None),
        },
        zero: ids(zero)?,
        pos: ids(pos)?,
        bound: bound.or(ctx.file.bound),
        appl: Default::default(),
    };
    let mut report = RunReport::new("reach", vec![digest_file(file)?], "")
        .with("zero", zero)
        .with("pos", pos);
    report.solver = Some(SolverInfo::of(&ctx.solver));
    let code = match solve_reach(&ta, &q, &ctx.solver)? {
        ReachOutcome::Reachable(w) => {
            report.verdict = "sat".into();
            let w = Witness::Reach {
                zero: zero.to_vec(),
                pos: pos.to_vec(),
                witness: w,
            };
            report.witness = Some(save_witness(&witness_path(&out, file, "reach"), &w)?);
            0
        }
        ReachOutcome::Unreachable => {
            report.verdict = "unsat".into();
            1
        }
        ReachOutcome::Unknown(r) => {
            report.verdict = "unknown".into();
            report = report.with("reason", r);
            3
        }
    };
    Ok((report, code, out.json))
}

fn cmd_mc(
    ctx: &Ctx,
    file: &Path,
    spec: &Path,
    max_orders: Option<usize>,
    assume: bool,
    out: Output,
) -> CmdResult {
    let ta = load_concrete(file)?;
    let phi = parse_spec(&read(spec)?, &ta).map_err(|e| CliError::input(format!("{}: {e}", spec.display())))?;
    let opts = CheckOptions {
        assume_multiplicative: assume || ctx.file.assume_multiplicative.unwrap_or(false),
        max_orders: max_orders.or(ctx.file.max_orders),
        solver: ctx.solver.clone(),
    };
    let mut report = RunReport::new("mc", vec![digest_file(file)?, digest_file(spec)?], "");
    report.solver = Some(SolverInfo::of(&ctx.solver));
    let code = match check_spec(&ta, &phi, &opts)? {
        SpecOutcome::Holds => {
            report.verdict = "holds".into();
            1
        }
        SpecOutcome::Violated(w) => {
            report.verdict = "violated".into();
            report = report
                .with("ordering", &w.ordering)
                .with("stem_length", w.stem().len())
                .with("loop_length", w.cycle().len())
                .with("lifted_by", w.lifted_by);
            let w = Witness::Lasso { witness: *w };
            report.witness = Some(save_witness(&witness_path(&out, file, "mc"), &w)?);
            0
        }
        SpecOutcome::Unknown(r) => {
            report.verdict = "unknown".into();
            report = report.with("reason", r);
            3
        }
    };
    Ok((report, code, out.json))
}

#[allow(clippy::too_many_arguments)]
fn cmd_synth(
    ctx: &Ctx,
    file: &Path,
    spec: &Path,
    denom: Option<i64>,
    num_bound: Option<i64>,
    budget_s: Option<u64>,
    max_orders: Option<usize>,
    out: Output,
) -> CmdResult {
    let sketch = load_ta(file, false)?.into_sketch();
    let spec_text = read(spec)?;
    let phi = parse_spec(&spec_text, &sketch).map_err(|e| CliError::input(format!("{}: {e}", spec.display())))?;
    let opts = SynthOptions {
        denom: denom.or(ctx.file.denom).unwrap_or(1),
        num_bound: num_bound.or(ctx.file.num_bound),
        budget: Duration::from_secs(budget_s.or(ctx.file.budget_s).unwrap_or(300)),
        seed: ctx.solver.seed,
        reverify: 5,
        check: CheckOptions {
            assume_multiplicative: true,
            max_orders: max_orders.or(ctx.file.max_orders),
            solver: ctx.solver.clone(),
        },
    };
    let (outcome, rep) = synthesize(&sketch, &phi, &opts)?;
    let mut report = RunReport::new("synth", vec![digest_file(file)?, digest_file(spec)?], "")
        .with("space_size", rep.space_size)
        .with("candidates_tried", rep.candidates_tried)
        .with("pruned", rep.pruned)
        .with("reverified", &rep.reverified)
        .with("log", &rep.log);
    report.solver = Some(SolverInfo::of(&ctx.solver));
    let code = match outcome {
        SynthOutcome::Found(mu) => {
            let assignment: BTreeMap<String, String> = mu
                .iter()
                .map(|(k, v)| (k.clone(), format!("{}/{}", v.numer(), v.denom())))
                .collect();
            report.verdict = "found".into();
            report = report.with("assignment", &assignment);
            let w = Witness::Assignment {
                assignment,
                spec: spec_text.clone(),
            };
            report.witness = Some(save_witness(&witness_path(&out, file, "synth"), &w)?);
            0
        }
        SynthOutcome::NoneInSpace => {
            report.verdict = "none_in_space".into();
            1
        }
        SynthOutcome::Unknown(r) => {
            report.verdict = "unknown".into();
            report = report.with("reason", r);
            3
        }
    };
    Ok((report, code, out.json))
}

/// Parses `n=4..7,t=1`; unspecified parameters range over `0..=4`.
fn parse_bounds(ta: &ThresholdAutomaton, text: Option<&str>) -> Result<Vec<(u64, u64)>, CliError> {
    let mut bounds = vec![(0, 4); ta.env.params.len()];
    let Some(text) = text else { return Ok(bounds) };
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (name, range) = item
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("--params: expected name=lo..hi, found `{item}`")))?;
        let p = ta
            .env
            .param_index(name.trim())
            .ok_or_else(|| CliError::input(format!("--params: unknown parameter `{name}`")))?;
        let num = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::input(format!("--params: bad number `{s}`")))
        };
        bounds[p] = match range.split_once("..") {
            Some((lo, hi)) => (num(lo)?, num(hi)?),
            None => {
                let v = num(range)?;
                (v, v)
            }
        };
    }
    Ok(bounds)
}

fn cmd_oracle(
    file: &Path,
    replay: Option<&Path>,
    loc: Option<&str>,
    params: Option<&str>,
    bound: usize,
    json: Option<PathBuf>,
) -> CmdResult {
    let parsed = load_ta(file, false)?;
    if let Some(wpath) = replay {
        let w: Witness = serde_json::from_str(&read(wpath)?)
            .map_err(|e| CliError::input(format!("{}: {e}", wpath.display())))?;
        let mut report = RunReport::new("oracle", vec![digest_file(file)?, digest_file(wpath)?], "");
        let code = match witness::replay(&parsed, &w) {
            Ok(msg) => {
                report.verdict = "replayed".into();
                report = report.with("detail", msg);
                0
            }
            Err(e) if e.code == 1 => {
                report.verdict = "invalid".into();
                report = report.with("detail", e.message);
                1
            }
            Err(e) => return Err(e),
        };
        return Ok((report, code, json));
    }
    let ta = parsed.into_concrete().map_err(|e| CliError::input(e.to_string()))?;
    let loc = loc.ok_or_else(|| CliError::input("give --replay or --location"))?;
    let l = location(&ta, loc)?;
    let bounds = parse_bounds(&ta, params)?;
    let init = initial_configs(&ta, &bounds, OracleLimits::default()).map_err(|e| CliError::unknown(e.to_string()))?;
    let found = oracle_search(&ta, &init, |c| c.covers(l), bound, OracleLimits::default())
        .map_err(|e| CliError::unknown(e.to_string()))?;
    let mut report = RunReport::new("oracle", vec![digest_file(file)?], "")
        .with("location", loc)
        .with("bound", bound)
        .with("params", &bounds);
    let code = match found {
        Some((init, schedule)) => {
            report.verdict = "coverable".into();
            let ids: Vec<&str> = schedule.iter().map(|&r| ta.rules[r].id.as_str()).collect();
            report = report.with("initial", &init).with("schedule", ids);
            0
        }
        None => {
            report.verdict = "not_coverable_within_bound".into();
            1
        }
    };
    Ok((report, code, json))
}

fn cmd_gen(
    kind: GenKind,
    input: &Path,
    output: Option<PathBuf>,
    spec_out: Option<PathBuf>,
    variant: Variant,
) -> Result<u8, CliError> {
    let text = read(input)?;
    let err = |e: tamc_core::generators::GenError| CliError::input(format!("{}: {e}", input.display()));
    let (ta_text, spec_text) = match kind {
        GenKind::Sat => {
            let f = parse_dimacs(&text).map_err(err)?;
            let v = match variant {
                Variant::Param => SatVariant::Param,
                Variant::Nonparam => SatVariant::NonParam,
            };
            (print_ta(&gen_3sat(&f, v)), None)
        }
        GenKind::Sigma2 => {
            let q = parse_qdimacs_lite(&text).map_err(err)?;
            let (sketch, phi) = gen_sigma2(&q);
            (print_ta(&sketch), Some(print_spec(&phi, &sketch)))
        }
    };
    match output {
        Some(p) => write_text(&p, &ta_text)?,
        None => println!("{ta_text}"),
    }
    if let Some(spec) = spec_text {
        match spec_out {
            Some(p) => write_text(&p, &format!("{spec}\n"))?,
            None => eprintln!("{spec}"),
        }
    }
    Ok(0)
}
