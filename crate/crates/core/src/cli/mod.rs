//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 verification failed, 4 solver
//! non-convergence. Output depends only on the inputs and flags.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::antimeas::{
    ame_for_probe, ams_evaluate, ams_optimize, lemma2_feasible, verify_choice, AmeEvaluation, ProbeState,
    VerifyConfig,
};
use crate::error::Error;
use crate::exclusion::{as_value, ExclusionInstance};
use crate::families::{bound_for_state, family_for_state, family_with_parameter, FamilyChoice, FamilyKind};
use crate::qcore::bipartite::schmidt_decompose;
use crate::qcore::matrix::C64;
use crate::qcore::{BipartiteState, MeasurementEnsemble, PureState, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FAILED: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "antidist", version, about = "Antidistinguishability of measurement ensembles with entangled probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the three-measurement family adapted to a state.
    Family {
        #[command(flatten)]
        source: StateSource,
        #[command(flatten)]
        param: ParamArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Check AME = 1 at the state and AMS < 1 for its family.
    Verify {
        #[command(flatten)]
        source: StateSource,
        #[command(flatten)]
        param: ParamArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Evaluate a family over a grid of parameter values.
    Sweep {
        #[command(flatten)]
        source: StateSource,
        /// Comma-separated values, or `start:stop:count`.
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Solve a standalone AS, AMS or AME instance file.
    Solve {
        #[arg(long, value_enum)]
        kind: SolveKind,
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Args, Debug)]
struct StateSource {
    /// State file: Schmidt form object or amplitude array on C^d ⊗ C^d.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    /// Use the maximally entangled state of dimension `--dim`.
    #[arg(long)]
    max_entangled: bool,
    /// Two-qubit state √λ|00⟩ + √(1−λ)|11⟩.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Family parameter (x, ω or ε), or `bound` for the default choice.
    #[arg(long)]
    param: Option<String>,
    #[arg(long)]
    x_angle: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol_gap: Option<f64>,
    #[arg(long)]
    tol_theorem: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SolveKind {
    As,
    Ams,
    Ame,
}

/// Run configuration shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub restarts: usize,
    pub csv: bool,
    pub output_path: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut t = Tolerances::default();
        if let Some(g) = self.tol_gap {
            if !(g > 0.0) {
                return Err(Failure::input("--tol-gap must be positive"));
            }
            t.solver_gap = g;
        }
        if let Some(g) = self.tol_theorem {
            if !(g > 0.0) {
                return Err(Failure::input("--tol-theorem must be positive"));
            }
            t.theorem = g;
        }
        if let Some(m) = self.max_iter {
            t.max_iterations = m;
        }
        Ok(RunConfig {
            seed: self.seed,
            tolerances: t,
            restarts: self.restarts,
            csv: self.format == Format::Csv,
            output_path: self.out.clone(),
        })
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Family description written by `family`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub kind: FamilyKind,
    pub parameter: f64,
    pub bound: f64,
    pub ensemble: MeasurementEnsemble,
}

/// Input of `solve --kind ame`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmeInstance {
    pub ensemble: MeasurementEnsemble,
    pub probe: serde_json::Value,
}

/// Output of `solve --kind ams`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmsOutput {
    pub value: f64,
    pub probe: ProbeState,
    pub lemma2_feasible: bool,
    pub witness: Option<ProbeState>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub ame: f64,
    pub per_outcome_as: Vec<f64>,
    pub lemma2_feasible: bool,
    pub ams_best: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub kind: FamilyKind,
    pub bound: f64,
    pub rows: Vec<SweepRow>,
}

/// Parses a bipartite pure state: either the Schmidt-form object or a bare
/// amplitude array of length `d²` (A-index major).
pub fn parse_state(value: serde_json::Value) -> Result<BipartiteState, Error> {
    let bad = |e: serde_json::Error| Error::InvalidParameter(format!("state: {e}"));
    if value.is_array() {
        let psi: PureState = serde_json::from_value(value).map_err(bad)?;
        schmidt_decompose(&psi)
    } else {
        serde_json::from_value(value).map_err(bad)
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_typed<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_value(read_json(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn resolve_state(src: &StateSource) -> Result<BipartiteState, Failure> {
    match (&src.state, src.dim, src.max_entangled, src.lambda) {
        (Some(p), None, false, None) => Ok(parse_state(read_json(p)?)?),
        (None, Some(d), true, None) => {
            if d == 0 {
                return Err(Failure::input("--dim must be positive"));
            }
            Ok(BipartiteState::maximally_entangled(d))
        }
        (None, d, false, Some(l)) => {
            if d.is_some_and(|d| d != 2) {
                return Err(Failure::input("--lambda describes a two-qubit state; use --dim 2"));
            }
            if !(l > 0.0 && l < 1.0) {
                return Err(Failure::input(format!("lambda {l} must lie in (0, 1)")));
            }
            let c = vec![C64::new(l.sqrt(), 0.0), C64::new((1.0 - l).sqrt(), 0.0)];
            Ok(BipartiteState::from_coefficients(c)?)
        }
        _ => Err(Failure::input("give exactly one of --state FILE, --dim D --max-entangled, or --lambda L")),
    }
}

fn resolve_family(state: &BipartiteState, p: &ParamArgs) -> Result<FamilyChoice, Failure> {
    let given: Vec<(&str, &String, Option<FamilyKind>)> = [
        ("--param", &p.param, None),
        ("--x-angle", &p.x_angle, Some(FamilyKind::R)),
        ("--omega", &p.omega, Some(FamilyKind::S)),
        ("--epsilon", &p.epsilon, Some(FamilyKind::Q)),
    ]
    .into_iter()
    .filter_map(|(n, v, k)| v.as_ref().map(|v| (n, v, k)))
    .collect();
    if given.len() > 1 {
        return Err(Failure::input("give at most one family parameter"));
    }
    let Some(&(name, value, want)) = given.first() else {
        return Ok(family_for_state(state)?);
    };
    let (kind, _) = bound_for_state(state)?;
    if want.is_some_and(|k| k != kind) {
        return Err(Failure::input(format!("{name} does not apply to family {kind:?}")));
    }
    if value == "bound" {
        return Ok(family_for_state(state)?);
    }
    let v: f64 = value.parse().map_err(|_| Failure::input(format!("{name}: cannot parse '{value}'")))?;
    Ok(family_with_parameter(state, v)?)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Failure::input("empty grid"));
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Failure::input(format!("grid: cannot parse '{s}'")));
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = if parts.len() == 3 {
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| Failure::input("grid: bad point count"))?;
        match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        }
    } else {
        spec.split(',').filter(|s| !s.trim().is_empty()).map(num).collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() {
        return Err(Failure::input("empty grid"));
    }
    Ok(grid)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn emit(cfg: &RunConfig, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match &cfg.output_path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::input(e.to_string())),
    }
}

fn json_only(cfg: &RunConfig) -> Result<(), Failure> {
    if cfg.csv {
        Err(Failure::input("--format csv is only available for sweep"))
    } else {
        Ok(())
    }
}

fn verify_config(cfg: &RunConfig) -> VerifyConfig {
    VerifyConfig { tolerances: cfg.tolerances, restarts: cfg.restarts, seed: cfg.seed }
}

fn cmd_family(source: &StateSource, param: &ParamArgs, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    json_only(cfg)?;
    let state = resolve_state(source)?;
    let fam = resolve_family(&state, param)?;
    let file = FamilyFile { kind: fam.kind, parameter: fam.parameter, bound: fam.bound, ensemble: fam.ensemble };
    emit(cfg, &to_json(&file), out)?;
    Ok(EXIT_OK)
}

fn cmd_verify(
    source: &StateSource,
    param: &ParamArgs,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    json_only(cfg)?;
    let state = resolve_state(source)?;
    let fam = resolve_family(&state, param)?;
    let report = verify_choice(&state, &fam, &verify_config(cfg))?;
    emit(cfg, &to_json(&report), out)?;
    if report.passed {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(err, "verification failed");
        Ok(EXIT_FAILED)
    }
}

fn cmd_sweep(source: &StateSource, grid: &str, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let state = resolve_state(source)?;
    let grid = parse_grid(grid)?;
    let (kind, bound) = bound_for_state(&state)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &p in &grid {
        let fam = family_with_parameter(&state, p)?;
        let ev = ame_for_probe(&fam.ensemble, &state, &cfg.tolerances)?;
        let (feasible, _) = lemma2_feasible(&fam.ensemble)?;
        let (best, _) = ams_optimize(&fam.ensemble, cfg.restarts, cfg.seed);
        rows.push(SweepRow {
            parameter: p,
            ame: ev.ame,
            per_outcome_as: ev.per_outcome.iter().map(|o| o.as_value).collect(),
            lemma2_feasible: feasible,
            ams_best: best,
        });
    }
    let text = if cfg.csv {
        sweep_csv(&rows, state.dim())
    } else {
        to_json(&SweepReport { kind, bound, rows })
    };
    emit(cfg, &text, out)?;
    Ok(EXIT_OK)
}

fn sweep_csv(rows: &[SweepRow], f: usize) -> String {
    let mut s = String::from("parameter,ame");
    for a in 0..f {
        let _ = write!(s, ",as_{a}");
    }
    s.push_str(",lemma2_feasible,ams_best\n");
    for r in rows {
        let _ = write!(s, "{:?},{:?}", r.parameter, r.ame);
        for v in &r.per_outcome_as {
            let _ = write!(s, ",{v:?}");
        }
        let _ = writeln!(s, ",{},{:?}", r.lemma2_feasible, r.ams_best);
    }
    s
}

fn cmd_solve(kind: SolveKind, instance: &Path, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    json_only(cfg)?;
    let text = match kind {
        SolveKind::As => {
            let inst: ExclusionInstance = read_typed(instance)?;
            to_json(&as_value(&inst, &cfg.tolerances)?)
        }
        SolveKind::Ams => {
            let ens: MeasurementEnsemble = read_typed(instance)?;
            let (mut value, mut probe) = ams_optimize(&ens, cfg.restarts, cfg.seed);
            let (feasible, witness) = lemma2_feasible(&ens)?;
            if let Some(w) = &witness {
                let wv = ams_evaluate(&ens, w)?;
                if wv > value {
                    value = wv;
                    probe = w.clone();
                }
            }
            to_json(&AmsOutput { value, probe, lemma2_feasible: feasible, witness })
        }
        SolveKind::Ame => {
            let inst: AmeInstance = read_typed(instance)?;
            let probe = parse_state(inst.probe)?;
            let ev: AmeEvaluation = ame_for_probe(&inst.ensemble, &probe, &cfg.tolerances)?;
            to_json(&ev)
        }
    };
    emit(cfg, &text, out)?;
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_INPUT
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Family { source, param, config } => {
            config.resolve().and_then(|cfg| cmd_family(source, param, &cfg, out))
        }
        Command::Verify { source, param, config } => {
            config.resolve().and_then(|cfg| cmd_verify(source, param, &cfg, out, err))
        }
        Command::Sweep { source, grid, config } => config.resolve().and_then(|cfg| cmd_sweep(source, grid, &cfg, out)),
        Command::Solve { kind, instance, config } => {
            config.resolve().and_then(|cfg| cmd_solve(*kind, instance, &cfg, out))
        }
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
