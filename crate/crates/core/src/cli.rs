//! Command-line front end. `run` takes its arguments and output streams
//! explicitly so tests can drive it in-process.
//!
//! Exit codes: 0 success, 2 input or precondition error, 3 an internal
//! inconsistency (a criteria report that contradicts itself).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::{theorem_fuzz, typical_rank_experiment, CoefficientDistribution, ExperimentConfig};
use crate::form::BinaryForm;
use crate::geometry::{
    default_steps, degree_phi_exact, hessian_is_definite, trajectory_csv, CircleMapKind, CircleMaps,
};
use crate::parser::parse_form;
use crate::poly::{sign, to_f64, Q};
use crate::rank::{find_real_witness, real_rank, SearchBudget};
use crate::roots::{count_projective_real_roots, discriminant_form, resultant_gradient, PolyRoots};
use crate::theorem::{verify_corollary, verify_theorem1, CorollaryOutcome};

pub const SCHEMA_VERSION: u32 = 1;
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "binform", version, about = "Certified computations on real binary forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count and isolate the real projective roots.
    Roots {
        #[command(flatten)]
        input: FormInput,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Discriminant and gradient resultant.
    Disc {
        #[command(flatten)]
        input: FormInput,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Hessian form and its definiteness.
    Hessian {
        #[command(flatten)]
        input: FormInput,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Winding numbers of the normalized gradient maps.
    Winding {
        #[command(flatten)]
        input: FormInput,
        /// Sample count; defaults to max(4096, 256 n).
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certified real and complex Waring rank.
    Rank {
        #[command(flatten)]
        input: FormInput,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Explicit real Waring decomposition of minimal known length.
    Decompose {
        #[command(flatten)]
        input: FormInput,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the real-rootedness criteria against each other.
    Verify {
        #[command(flatten)]
        input: FormInput,
        /// Also cross-check the top-rank rule for the real Waring rank.
        #[arg(long)]
        corollary: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Seeded Monte Carlo runs over random forms.
    Experiment(ExperimentArgs),
    /// Samples of a circle map as CSV.
    PlotData {
        #[command(flatten)]
        input: FormInput,
        #[arg(long, value_enum, default_value_t = MapArg::Phi)]
        map: MapArg,
        #[arg(long, default_value_t = 360)]
        steps: usize,
    },
}

#[derive(Args, Debug)]
pub struct FormInput {
    /// Polynomial expression such as "x^2*y + x*y^2", or coefficient JSON.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    pub form: Option<String>,
    /// Read the form from a file instead.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = SearchBudget::default().max_candidates)]
    pub max_candidates: usize,
    #[arg(long, default_value_t = SearchBudget::default().grid_bound)]
    pub grid_bound: i64,
    #[arg(long, default_value_t = SearchBudget::default().grid_mesh)]
    pub grid_mesh: i64,
    #[arg(long, default_value_t = 0)]
    pub search_seed: u64,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_candidates: self.max_candidates,
            grid_bound: self.grid_bound,
            grid_mesh: self.grid_mesh,
            seed: self.search_seed,
        }
    }
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long, value_enum, default_value_t = ExperimentKindArg::TypicalRank)]
    pub kind: ExperimentKindArg,
    /// JSON config file; flags given explicitly override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub distribution: Option<CoefficientDistribution>,
    #[arg(long)]
    pub dyadic_bits: Option<u32>,
    #[arg(long)]
    pub int_bound: Option<i64>,
    #[arg(long)]
    pub max_candidates: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "BINFORM_WORKERS")]
    pub workers: Option<usize>,
    /// Include wall-clock time in the JSON report.
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapArg {
    Phi,
    Psi,
}

impl From<MapArg> for CircleMapKind {
    fn from(m: MapArg) -> Self {
        match m {
            MapArg::Phi => CircleMapKind::Phi,
            MapArg::Psi => CircleMapKind::Psi,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKindArg {
    TypicalRank,
    TheoremFuzz,
}

/// Accepts an expression or `{"degree":..,"coeffs":[..]}`.
pub fn read_form(text: &str) -> Result<BinaryForm> {
    let text = text.trim();
    if text.starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("coefficient JSON: {e}")))
    } else {
        parse_form(text)
    }
}

impl FormInput {
    fn load(&self) -> Result<BinaryForm> {
        match (&self.form, &self.file) {
            (Some(text), _) => read_form(text),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
                read_form(&text)
            }
            (None, None) => Err(Error::Invalid("no form given".into())),
        }
    }
}

enum Outcome {
    Ok,
    Inconsistent,
}

struct Emitted {
    body: String,
    outcome: Outcome,
}

fn tagged(value: impl Serialize) -> Value {
    let mut v = serde_json::to_value(value).expect("serializable output");
    if let Value::Object(map) = &mut v {
        map.insert("schemaVersion".into(), json!(SCHEMA_VERSION));
    }
    v
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// One header row of top-level keys and one row of values; nested values are
/// written as compact JSON.
fn object_csv(v: &Value) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Value::Object(map) = v {
        w.write_record(map.keys()).expect("in-memory write");
        w.write_record(map.values().map(scalar_text)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn object_text(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = v {
        for (k, val) in map {
            out.push_str(&format!("{k}: {}\n", scalar_text(val)));
        }
    }
    out
}

fn render(v: Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&v).expect("json") + "\n",
        Format::Csv => object_csv(&v),
        Format::Text => object_text(&v),
    }
}

fn ok(v: Value, format: Format) -> Result<Emitted> {
    Ok(Emitted { body: render(v, format), outcome: Outcome::Ok })
}

fn roots_cmd(f: &BinaryForm, format: Format) -> Result<Emitted> {
    f.require_nonzero("roots")?;
    let rc = count_projective_real_roots(f)?;
    let d = f.dehomogenize()?;
    let mut roots = Vec::new();
    if d.degree_drop > 0 {
        roots.push(json!({ "point": "infinity", "lo": null, "hi": null, "approx": null }));
    }
    if d.poly.degree().unwrap_or(0) > 0 {
        let mut iso = PolyRoots::isolate(&d.poly)?;
        iso.refine_all(&Q::new(BigInt::one(), BigInt::one() << 40usize));
        for iv in &iso.intervals {
            let approx = if iv.is_exact() { to_f64(&iv.lo) } else { to_f64(&iv.midpoint()) };
            roots.push(json!({
                "point": "affine",
                "lo": iv.lo.to_string(),
                "hi": iv.hi.to_string(),
                "approx": approx,
            }));
        }
    }
    let v = json!({
        "form": f.to_string(),
        "degree": f.degree(),
        "realProjectiveRoots": rc.distinct_real_projective,
        "squarefree": rc.is_squarefree_over_c,
        "allRealDistinct": rc.is_squarefree_over_c && rc.distinct_real_projective == f.degree(),
        "rootAtInfinity": rc.has_root_at_infinity,
        "roots": roots,
    });
    ok(tagged(v), format)
}

fn disc_cmd(f: &BinaryForm, format: Format) -> Result<Emitted> {
    f.require_nonzero("disc")?;
    f.require_degree("disc", 2, ">= 2")?;
    let disc = discriminant_form(f)?;
    let res = resultant_gradient(f)?;
    let v = json!({
        "form": f.to_string(),
        "degree": f.degree(),
        "discriminant": disc.to_string(),
        "resultantGradient": res.to_string(),
        "squarefree": sign(&res) != 0,
    });
    ok(tagged(v), format)
}

fn hessian_cmd(f: &BinaryForm, format: Format) -> Result<Emitted> {
    f.require_nonzero("hessian")?;
    let h = f.hessian()?;
    let at_x = h.evaluate(&Q::one(), &Q::from_integer(0.into()));
    let v = json!({
        "form": f.to_string(),
        "degree": f.degree(),
        "hessian": h.to_string(),
        "hessianCoefficients": h,
        "definite": hessian_is_definite(&h)?,
        "valueAtXAxis": at_x.to_string(),
    });
    ok(tagged(v), format)
}

fn winding_cmd(f: &BinaryForm, steps: Option<usize>, format: Format) -> Result<Emitted> {
    let maps = CircleMaps::new(f)?;
    let steps = steps.unwrap_or_else(|| default_steps(f.degree()));
    let phi = maps.winding_number(CircleMapKind::Phi, steps)?;
    let psi = maps.winding_number(CircleMapKind::Psi, steps)?;
    let exact = if hessian_is_definite(&f.hessian()?)? {
        Some(degree_phi_exact(f)?)
    } else {
        None
    };
    let v = json!({
        "form": f.to_string(),
        "degree": f.degree(),
        "steps": steps,
        "windingPhi": phi.degree,
        "windingPsi": psi.degree,
        "windingPhiExact": exact,
        "phi": phi,
        "psi": psi,
    });
    ok(tagged(v), format)
}

fn rank_cmd(f: &BinaryForm, budget: &SearchBudget, format: Format) -> Result<Emitted> {
    let cert = real_rank(f, budget)?;
    let mut v = tagged(&cert);
    if let Value::Object(map) = &mut v {
        map.insert("form".into(), json!(f.to_string()));
    }
    ok(v, format)
}

fn decompose_cmd(f: &BinaryForm, budget: &SearchBudget, format: Format) -> Result<Emitted> {
    let cert = real_rank(f, budget)?;
    let length = cert.real_exact.unwrap_or(cert.real_upper);
    let witness = match cert.witness {
        Some(w) => Some(w),
        None => find_real_witness(f, length, budget)?,
    };
    let v = json!({
        "form": f.to_string(),
        "degree": f.degree(),
        "realExact": cert.real_exact,
        "realLower": cert.real_lower,
        "realUpper": cert.real_upper,
        "length": witness.as_ref().map(|w| w.terms.len()),
        "witness": witness,
    });
    ok(tagged(v), format)
}

fn verify_cmd(f: &BinaryForm, corollary: bool, budget: &SearchBudget, format: Format) -> Result<Emitted> {
    let report = verify_theorem1(f)?;
    let mut sound = report.consistent && report.violations.is_empty();
    let mut v = tagged(&report);
    if corollary {
        let c = verify_corollary(f, budget)?;
        sound &= c.outcome != CorollaryOutcome::Inconsistent;
        if let Value::Object(map) = &mut v {
            map.insert("corollary".into(), serde_json::to_value(&c).expect("json"));
        }
    }
    Ok(Emitted {
        body: render(v, format),
        outcome: if sound { Outcome::Ok } else { Outcome::Inconsistent },
    })
}

fn experiment_cmd(args: &ExperimentArgs) -> Result<Emitted> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| Error::Invalid(format!("experiment config: {e}")))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(d) = args.degree {
        config.degree = d;
    }
    if let Some(s) = args.samples {
        config.samples = s;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(d) = args.distribution {
        config.coefficient_distribution = d;
    }
    if let Some(b) = args.dyadic_bits {
        config.dyadic_bits = b;
    }
    if let Some(b) = args.int_bound {
        config.int_bound = b;
    }
    if let Some(m) = args.max_candidates {
        config.budget.max_candidates = m;
    }
    if let Some(w) = args.workers {
        config.workers = w;
    }
    let report = match args.kind {
        ExperimentKindArg::TypicalRank => typical_rank_experiment(&config)?,
        ExperimentKindArg::TheoremFuzz => theorem_fuzz(&config)?,
    };
    let body = match args.output.format {
        Format::Csv => report.to_csv(),
        Format::Json if args.timing => report.to_json() + "\n",
        Format::Json => report.canonical_json() + "\n",
        Format::Text => {
            let mut out = format!("kind: {:?}\nsamples: {}\n", report.kind, report.samples);
            for (name, table) in &report.histograms {
                out.push_str(&format!("{name}:\n"));
                for (bucket, count) in table {
                    out.push_str(&format!("  {bucket}: {count}\n"));
                }
            }
            out.push_str(&format!("counterexamples: {}\n", report.counterexamples.len()));
            out.push_str(&format!("failures: {}\n", report.failures.len()));
            out.push_str(&format!("note: {}\n", report.disclaimer));
            out
        }
    };
    Ok(Emitted {
        body,
        outcome: if report.counterexamples.is_empty() { Outcome::Ok } else { Outcome::Inconsistent },
    })
}

fn plot_cmd(f: &BinaryForm, map: MapArg, steps: usize) -> Result<Emitted> {
    let samples = CircleMaps::new(f)?.trajectory(map.into(), steps)?;
    Ok(Emitted { body: trajectory_csv(&samples), outcome: Outcome::Ok })
}

fn dispatch(cmd: &Command) -> Result<Emitted> {
    match cmd {
        Command::Roots { input, output } => roots_cmd(&input.load()?, output.format),
        Command::Disc { input, output } => disc_cmd(&input.load()?, output.format),
        Command::Hessian { input, output } => hessian_cmd(&input.load()?, output.format),
        Command::Winding { input, steps, output } => winding_cmd(&input.load()?, *steps, output.format),
        Command::Rank { input, budget, output } => rank_cmd(&input.load()?, &budget.budget(), output.format),
        Command::Decompose { input, budget, output } => {
            decompose_cmd(&input.load()?, &budget.budget(), output.format)
        }
        Command::Verify { input, corollary, budget, output } => {
            verify_cmd(&input.load()?, *corollary, &budget.budget(), output.format)
        }
        Command::Experiment(args) => experiment_cmd(args),
        Command::PlotData { input, map, steps } => plot_cmd(&input.load()?, *map, *steps),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(emitted) => {
            let _ = out.write_all(emitted.body.as_bytes());
            match emitted.outcome {
                Outcome::Ok => EXIT_OK,
                Outcome::Inconsistent => {
                    let _ = writeln!(err, "error: inconsistent result, please report this form");
                    EXIT_INCONSISTENT
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
