//! Batch runner: audits, sweeps, noise bounds and relativisation demos.

mod format;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use format::{csv, fmt_float, parse_scheme_file, SchemeFile};

use crate::error::{Result, WayError};
use crate::models::{self, ModelDescriptor, Reading};
use crate::obs::DiscreteObservable;
use crate::qcore::random::random_state;
use crate::qcore::{pauli, ComplexMatrix};
use crate::relfr::{high_localisation_audit, invariance_defect, yen, Budget, CovariantObservable, CyclicGroup, Representation};
use crate::scheme::{ConservedPair, MeasurementScheme};
use crate::tol::{self, Tolerances};
use crate::way::{error_vs_spread_sweep, noise_report, way_audit, SweepOptions, Verdict, WayAudit};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Audit,
    Sweep,
    Bound,
    Relativise,
}

#[derive(Debug, Parser)]
#[command(name = "waylab", version, about = "Measurement-scheme audits, WAY bounds and relativisation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Scheme description (JSON).
    #[arg(long)]
    pub scheme: Option<PathBuf>,
    /// Built-in model family, e.g. swap, lueders, von-neumann-lattice,
    /// ozawa-lattice, qubit-rotor.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "lam-index", allow_hyphen_values = true)]
    pub lam_index: Option<i64>,
    /// Ozawa lattice reading: absolute or relative.
    #[arg(long)]
    pub reading: Option<String>,
    /// Budgets as `a..b`, a comma list, or a mix; `unlimited` allowed.
    #[arg(long)]
    pub budgets: Option<String>,
    /// Mass allowed outside the overall width.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Tolerance for audits and validation.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// PRC, repeatability, conservation and Yanase audit of one scheme.
    Audit(CommonArgs),
    /// Error versus reference spread, one CSV row per budget.
    Sweep(CommonArgs),
    /// Noise-operator bound over a grid of random system states.
    Bound {
        #[command(flatten)]
        common: CommonArgs,
        /// `gridK` for K Haar-random states.
        #[arg(long, default_value = "grid16")]
        states: String,
    },
    /// Relativisation worked examples and localisation audits.
    Relativise {
        #[command(flatten)]
        common: CommonArgs,
        /// `z2` for the two-element group example.
        #[arg(long)]
        demo: Option<String>,
    },
}

/// Fully parsed invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub scheme: Option<PathBuf>,
    pub model: Option<ModelDescriptor>,
    pub budgets: Vec<Budget>,
    pub states: usize,
    pub demo: Option<String>,
    pub eps: f64,
    pub tol: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            scheme: None,
            model: None,
            budgets: Vec::new(),
            states: 16,
            demo: None,
            eps: 0.1,
            tol: None,
            seed: 0,
            out: None,
        }
    }

    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (command, common, states, demo) = match cli.command {
            CliCommand::Audit(c) => (Command::Audit, c, None, None),
            CliCommand::Sweep(c) => (Command::Sweep, c, None, None),
            CliCommand::Bound { common, states } => (Command::Bound, common, Some(states), None),
            CliCommand::Relativise { common, demo } => (Command::Relativise, common, None, demo),
        };
        if let Some(t) = common.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(WayError::OutOfRange(format!("tolerance {t} must be positive")));
            }
        }
        if let Some(p) = &common.scheme {
            if !p.exists() {
                return Err(WayError::Io(format!("{}: no such file", p.display())));
            }
        }
        let reading = common.reading.as_deref().map(parse_reading).transpose()?;
        let model = common.model.map(|family| ModelDescriptor {
            n: common.n,
            lam_index: common.lam_index,
            reading,
            ..ModelDescriptor::new(&family)
        });
        Ok(Self {
            command,
            scheme: common.scheme,
            model,
            budgets: common.budgets.as_deref().map(parse_budgets).transpose()?.unwrap_or_default(),
            states: states.as_deref().map(parse_states).transpose()?.unwrap_or(16),
            demo,
            eps: common.eps,
            tol: common.tol,
            seed: common.seed,
            out: common.out,
        })
    }
}

fn parse_reading(s: &str) -> Result<Reading> {
    match s {
        "absolute" => Ok(Reading::Absolute),
        "relative" => Ok(Reading::Relative),
        _ => Err(WayError::Parse(format!("reading must be absolute or relative, got {s:?}"))),
    }
}

/// `1..8` (inclusive), `1,2,4`, `unlimited`, or comma-joined mixtures.
pub fn parse_budgets(s: &str) -> Result<Vec<Budget>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let bad = || WayError::Parse(format!("bad budget range {part:?}"));
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend((a..=b).map(Budget::Limited));
        } else {
            out.push(Budget::from_str(part)?);
        }
    }
    if out.is_empty() {
        return Err(WayError::Parse("empty budget list".into()));
    }
    Ok(out)
}

/// `gridK` with `K ≥ 1`.
pub fn parse_states(s: &str) -> Result<usize> {
    s.strip_prefix("grid")
        .and_then(|k| k.parse().ok())
        .filter(|&k: &usize| k > 0)
        .ok_or_else(|| WayError::Parse(format!("states must look like grid16, got {s:?}")))
}

/// Text produced by a command and whether it flagged an invariant violation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub text: String,
    pub violation: bool,
}

struct Loaded {
    source: String,
    scheme: MeasurementScheme,
    conserved: Option<ConservedPair>,
    target: Option<DiscreteObservable>,
}

fn load(config: &RunConfig) -> Result<Loaded> {
    match (&config.scheme, &config.model) {
        (Some(path), None) => {
            let f = parse_scheme_file(path)?;
            Ok(Loaded {
                source: path.display().to_string(),
                target: f.target_observable(),
                scheme: f.scheme,
                conserved: f.conserved,
            })
        }
        (None, Some(desc)) => {
            let inst = models::build(desc)?;
            Ok(Loaded {
                source: format!("model:{}", models::lookup(&desc.family)?.name()),
                scheme: inst.scheme,
                conserved: inst.conserved,
                target: inst.target,
            })
        }
        (Some(_), Some(_)) => Err(WayError::Parse("give either --scheme or --model, not both".into())),
        (None, None) => Err(WayError::Parse("one of --scheme or --model is required".into())),
    }
}

#[derive(Debug, Serialize)]
struct AuditReport {
    source: String,
    system_dim: usize,
    apparatus_dim: usize,
    repeatability_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    prc_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weak_yanase_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    way: Option<WayAudit>,
}

fn audit(config: &RunConfig, threshold: f64) -> Result<RunOutput> {
    let l = load(config)?;
    let prc_defect = l.target.as_ref().map(|t| l.scheme.prc_defect(t)).transpose()?;
    let (way, weak) = match (&l.conserved, &l.target) {
        (Some(c), Some(t)) if t.is_sharp(tol::validation()) => (
            Some(way_audit(&l.scheme, c, t, threshold)?),
            Some(l.scheme.weak_yanase_defect(c)?),
        ),
        (Some(c), _) => (None, Some(l.scheme.weak_yanase_defect(c)?)),
        _ => (None, None),
    };
    let violation = matches!(way.as_ref().map(|w| &w.verdict), Some(Verdict::ExactMeasurementOfNoninvariant));
    let report = AuditReport {
        source: l.source,
        system_dim: l.scheme.system_dim(),
        apparatus_dim: l.scheme.apparatus_dim(),
        repeatability_defect: l.scheme.repeatability_defect(),
        prc_defect,
        weak_yanase_defect: weak,
        way,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| WayError::Parse(e.to_string()))?;
    text.push('\n');
    Ok(RunOutput { text, violation })
}

fn sweep(config: &RunConfig) -> Result<RunOutput> {
    let desc = config
        .model
        .as_ref()
        .ok_or_else(|| WayError::Parse("sweep needs --model".into()))?;
    let n = desc.n.unwrap_or(8);
    let budgets: Vec<usize> = if config.budgets.is_empty() {
        (1..=n).collect()
    } else {
        config
            .budgets
            .iter()
            .map(|b| b.resolve(n))
            .collect::<Result<_>>()?
    };
    let opts = SweepOptions {
        eps: config.eps,
        seed: config.seed,
        ..SweepOptions::default()
    };
    let rows = error_vs_spread_sweep(&desc.family, n, &budgets, &opts)?;
    let violation = rows.windows(2).any(|w| w[1].min_error > w[0].min_error + 1e-12);
    let text = csv(
        &["budget", "spread_variance", "spread_width", "min_error"],
        rows.iter().map(|r| {
            vec![
                r.budget.to_string(),
                fmt_float(r.spread_variance),
                r.spread_width.to_string(),
                fmt_float(r.min_error),
            ]
        }),
    );
    Ok(RunOutput { text, violation })
}

fn bound(config: &RunConfig) -> Result<RunOutput> {
    let l = load(config)?;
    let pair = l
        .conserved
        .as_ref()
        .ok_or_else(|| WayError::InvalidScheme("bound needs a conserved pair".into()))?;
    let a = match &l.target {
        Some(t) => t.first_moment(),
        None => l.scheme.measured_observable().first_moment(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rows = Vec::with_capacity(config.states);
    let mut violation = false;
    for k in 0..config.states {
        let phi = random_state(&mut rng, l.scheme.system_dim());
        let r = noise_report(&l.scheme, pair, &a, &phi)?;
        violation |= !r.robertson_holds(1e-9);
        rows.push(vec![
            k.to_string(),
            fmt_float(r.epsilon_sq),
            fmt_float(r.bound_rhs),
            fmt_float(r.delta_l_sq),
            fmt_float(r.commutator_expect.re),
            fmt_float(r.commutator_expect.im),
            r.degenerate.to_string(),
        ]);
    }
    let text = csv(
        &["state", "epsilon_sq", "bound_rhs", "delta_l_sq", "commutator_re", "commutator_im", "degenerate"],
        rows,
    );
    Ok(RunOutput { text, violation })
}

#[derive(Debug, Serialize)]
struct Z2Demo {
    demo: &'static str,
    yen_sigma_x: ComplexMatrix,
    expected: ComplexMatrix,
    max_deviation: f64,
    invariance_defect: f64,
}

/// `¥(σ_x) = σ_x ⊗ σ_z` for `Z_2` acting by `σ_z` on the system and `σ_x`
/// on the reference.
fn z2_demo() -> Result<RunOutput> {
    let g = CyclicGroup::new(2)?;
    let rep_s = Representation::new(g, ComplexMatrix::from_real_diag(&[0.0, 1.0]))?;
    let rep_r = Representation::new(g, ComplexMatrix::identity(2).sub_mat(&pauli::x()).scale_re(0.5))?;
    let f = CovariantObservable::new(rep_r.clone(), DiscreteObservable::computational(2, crate::obs::Geometry::Cyclic(2)))?;
    let y = yen(&pauli::x(), &rep_s, &f)?;
    let expected = pauli::x().kron(&pauli::z());
    let demo = Z2Demo {
        demo: "z2",
        max_deviation: y.sub_mat(&expected).max_abs(),
        invariance_defect: invariance_defect(&y, &rep_s, &rep_r)?,
        yen_sigma_x: y,
        expected,
    };
    let violation = demo.max_deviation > 1e-12 || demo.invariance_defect > 1e-9;
    let mut text = serde_json::to_string_pretty(&demo).map_err(|e| WayError::Parse(e.to_string()))?;
    text.push('\n');
    Ok(RunOutput { text, violation })
}

fn relativise(config: &RunConfig) -> Result<RunOutput> {
    if let Some(d) = &config.demo {
        return match d.as_str() {
            "z2" => z2_demo(),
            other => Err(WayError::Parse(format!("unknown demo {other:?}"))),
        };
    }
    let desc = config
        .model
        .as_ref()
        .ok_or_else(|| WayError::Parse("relativise needs --demo or --model".into()))?;
    let fam = models::lookup(&desc.family)?;
    let setup = fam
        .relativisation(desc)
        .ok_or_else(|| WayError::UnknownFamily(format!("{} has no reference frame", fam.name())))??;
    let budgets = if config.budgets.is_empty() {
        vec![Budget::Limited(1), Budget::Unlimited]
    } else {
        config.budgets.clone()
    };
    let rows = high_localisation_audit(&setup.target, &setup.rep_s, &setup.reference, &budgets)?;
    let violation = rows.iter().any(|r| matches!(r.budget, Budget::Unlimited) && r.residual > 1e-10);
    let text = csv(
        &["budget", "probability", "residual"],
        rows.iter()
            .map(|r| vec![r.budget.to_string(), fmt_float(r.probability), fmt_float(r.residual)]),
    );
    Ok(RunOutput { text, violation })
}

/// Runs a command and returns its output without writing it anywhere.
pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    let previous = tol::get();
    if let Some(t) = config.tol {
        tol::set(Tolerances {
            validation: t,
            construction: previous.construction.min(t),
        });
    }
    let threshold = config.tol.unwrap_or(previous.validation);
    let out = match config.command {
        Command::Audit => audit(config, threshold),
        Command::Sweep => sweep(config),
        Command::Bound => bound(config),
        Command::Relativise => relativise(config),
    };
    tol::set(previous);
    out
}

/// Runs a command, writes its output and maps the outcome to an exit code.
pub fn run(config: &RunConfig) -> i32 {
    let out = match execute(config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let written = match &config.out {
        Some(p) => std::fs::write(p, &out.text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{}", out.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    if out.violation {
        eprintln!("invariant violation flagged");
        return EXIT_VIOLATION;
    }
    EXIT_OK
}

/// Entry point of the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_cli(cli) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

#[cfg(test)]
mod tests;
