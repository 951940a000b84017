//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a finding (profile outside the bound set,
//! oracle disagreement), `2` usage or input errors.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};

use crate::bounds::{averaging_bounds, projection_bounds, theorem_membership};
use crate::error::{Error, Result};
use crate::homogenize::{convexity_report, field_hash, normal_of, phi_profile, DirectionFan, SurfaceTensionProfile};
use crate::lattice::{random_mixture, BondField};
use crate::microgeometry::{document_with_provenance, laminate, prop_special_field, realize, SpecialSpec};
use crate::scalar::Scalar;
use crate::spin_oracle::{min_interface_energy, oracle_report, OracleMode, OracleReport, SpinWindow};
use crate::wulff::{
    admissible, contains_admissible_rectangle, render_svg, wulff_shape, AdmissibilityTest, ARC_SAMPLES,
};

#[derive(Debug, Parser)]
#[command(name = "ising-bounds", version, about = "Surface tension of periodic two-phase bond systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a bond-field document.
    Gen(GenArgs),
    /// Estimate the surface tension on a fan of directions.
    Phi(PhiArgs),
    /// Projection and averaging bounds of a field.
    Bounds(FieldArgs),
    /// Decide membership of a profile in the optimal bound set.
    Check(CheckArgs),
    /// Energy-normalized Wulff shape, optionally rendered as SVG.
    Wulff(WulffArgs),
    /// Compare enumeration and dual shortest path on a spin window.
    Oracle(OracleArgs),
    /// Fractions, bounds, profile and verdict for one field.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Laminate,
    Special,
    Realize,
    Random,
    Homogeneous,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Period T.
    #[arg(long = "T")]
    pub period: usize,
    #[arg(long = "N1")]
    pub n1: Option<usize>,
    #[arg(long = "N2")]
    pub n2: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// This and the fraction flags below accept `p/q` or decimals.
    #[arg(long, value_parser = parse_fraction)]
    pub theta: Option<f64>,
    #[arg(long, value_parser = parse_ratio)]
    pub t1: Option<Rational64>,
    #[arg(long, value_parser = parse_ratio)]
    pub t2: Option<Rational64>,
    #[arg(long, value_parser = parse_ratio)]
    pub theta1: Option<Rational64>,
    #[arg(long, value_parser = parse_ratio)]
    pub theta2: Option<Rational64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FanArgs {
    /// Smallest fan with at least this many directions.
    #[arg(long, default_value_t = 16, conflicts_with = "max_coordinate")]
    pub directions: usize,
    /// All primitive directions with coordinates bounded by D.
    #[arg(long = "max-coordinate")]
    pub max_coordinate: Option<i64>,
}

impl FanArgs {
    fn fan(&self) -> Result<DirectionFan> {
        match self.max_coordinate {
            Some(d) => DirectionFan::with_max_coordinate(d),
            None => DirectionFan::at_least(self.directions),
        }
    }
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[command(flatten)]
    pub input: FieldArgs,
    #[command(flatten)]
    pub fan: FanArgs,
    #[arg(long = "k-max", default_value_t = 8)]
    pub k_max: usize,
    #[arg(long = "rel-tol", default_value_t = 1e-9)]
    pub rel_tol: f64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, value_parser = parse_fraction)]
    pub theta: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WulffArgs {
    /// Profile document; alternatively `--c1/--c2` for `c1 |x1| + c2 |x2|`.
    #[arg(long, conflicts_with_all = ["c1", "c2"], required_unless_present_all = ["c1", "c2"])]
    pub profile: Option<PathBuf>,
    #[arg(long, requires = "c2")]
    pub c1: Option<f64>,
    #[arg(long, requires = "c1")]
    pub c2: Option<f64>,
    #[command(flatten)]
    pub fan: FanArgs,
    /// Mixture parameters for the envelope and admissibility checks.
    #[arg(long, requires_all = ["alpha", "beta"], value_parser = parse_fraction)]
    pub theta: Option<f64>,
    #[arg(long, requires_all = ["theta", "beta"])]
    pub alpha: Option<f64>,
    #[arg(long, requires_all = ["theta", "alpha"])]
    pub beta: Option<f64>,
    #[arg(long = "arc-samples", default_value_t = ARC_SAMPLES)]
    pub arc_samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, requires = "theta")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exhaustive,
    Dual,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub width: usize,
    #[arg(long, default_value_t = 3)]
    pub height: usize,
    /// Interface normal as `x,y`.
    #[arg(long, value_parser = parse_f64_pair, allow_hyphen_values = true, conflicts_with = "z")]
    pub nu: Option<[f64; 2]>,
    /// Interface direction as a primitive integer vector `a,b`.
    #[arg(long, value_parser = parse_i64_pair, allow_hyphen_values = true)]
    pub z: Option<[i64; 2]>,
    /// Trace offset; defaults to a line through the window centre.
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<f64>,
    /// Lattice position of the lower-left free site.
    #[arg(long, value_parser = parse_i64_pair, allow_hyphen_values = true, default_value = "0,0")]
    pub origin: [i64; 2],
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub input: FieldArgs,
    #[command(flatten)]
    pub fan: FanArgs,
    #[arg(long = "k-max", default_value_t = 8)]
    pub k_max: usize,
    #[arg(long = "rel-tol", default_value_t = 1e-9)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

fn parse_ratio(s: &str) -> std::result::Result<Rational64, String> {
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|e| format!("{e}"))?;
        let q: i64 = q.trim().parse().map_err(|e| format!("{e}"))?;
        if q == 0 {
            return Err("zero denominator".into());
        }
        return Ok(Rational64::new(p, q));
    }
    let x: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    Rational64::approximate_float(x).ok_or_else(|| format!("{s} is not representable"))
}

fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    match s.split_once('/') {
        Some(_) => parse_ratio(s).map(|r| *r.numer() as f64 / *r.denom() as f64),
        None => s.trim().parse().map_err(|e| format!("{e}")),
    }
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> std::result::Result<[T; 2], String>
where
    T::Err: std::fmt::Display,
{
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok([a, b])
}

fn parse_f64_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    parse_pair(s)
}

fn parse_i64_pair(s: &str) -> std::result::Result<[i64; 2], String> {
    parse_pair(s)
}

/// Whether a run produced a finding (exit code 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub finding: bool,
}

impl Outcome {
    const OK: Self = Self { finding: false };
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(Outcome { finding: false }) => 0,
        Ok(Outcome { finding: true }) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Phi(a) => cmd_phi(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Check(a) => cmd_check(a),
        Command::Wulff(a) => cmd_wulff(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn pretty(value: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn read_field(path: &Path) -> Result<BondField<f64>> {
    BondField::from_json(&fs::read_to_string(path)?)
}

fn missing(flag: &str, kind: &str) -> Error {
    Error::InvalidParameter(format!("--{flag} is required for --kind {kind}"))
}

fn ratio(r: Rational64) -> String {
    r.to_string()
}

fn cmd_gen(a: &GenArgs) -> Result<Outcome> {
    let t = a.period;
    let (field, construction, params) = match a.kind {
        Kind::Homogeneous => {
            let f = BondField::homogeneous(t, a.alpha)?;
            (f, "homogeneous", json!({"T": t, "alpha": a.alpha}))
        }
        Kind::Laminate => {
            let n1 = a.n1.ok_or_else(|| missing("N1", "laminate"))?;
            let n2 = a.n2.ok_or_else(|| missing("N2", "laminate"))?;
            let f = laminate(t, n1, n2, a.alpha, a.beta)?;
            (f, "laminate", json!({"T": t, "N1": n1, "N2": n2, "alpha": a.alpha, "beta": a.beta}))
        }
        Kind::Special => {
            let spec = SpecialSpec {
                period: t,
                t1: a.t1.ok_or_else(|| missing("t1", "special"))?,
                t2: a.t2.ok_or_else(|| missing("t2", "special"))?,
                theta1: a.theta1.ok_or_else(|| missing("theta1", "special"))?,
                theta2: a.theta2.ok_or_else(|| missing("theta2", "special"))?,
                seed: a.seed,
            };
            let f = prop_special_field(&spec, a.alpha, a.beta)?;
            let params = json!({
                "T": t, "t1": ratio(spec.t1), "t2": ratio(spec.t2),
                "theta1": ratio(spec.theta1), "theta2": ratio(spec.theta2),
                "alpha": a.alpha, "beta": a.beta, "seed": a.seed,
            });
            (f, "special", params)
        }
        Kind::Realize => {
            let c1 = a.c1.ok_or_else(|| missing("c1", "realize"))?;
            let c2 = a.c2.ok_or_else(|| missing("c2", "realize"))?;
            let theta = a.theta.ok_or_else(|| missing("theta", "realize"))?;
            let r = realize(c1, c2, theta, a.alpha, a.beta, t, a.seed)?;
            let params = json!({
                "T": t, "c1": c1, "c2": c2, "theta": theta, "alpha": a.alpha, "beta": a.beta, "seed": a.seed,
                "N1": r.n[0], "N2": r.n[1], "t1": ratio(r.t[0]), "t2": ratio(r.t[1]),
                "theta1": ratio(r.thetas[0]), "theta2": ratio(r.thetas[1]),
            });
            (r.field, "realize", params)
        }
        Kind::Random => {
            let theta = a.theta.ok_or_else(|| missing("theta", "random"))?;
            let f = random_mixture(t, theta, a.alpha, a.beta, a.seed)?;
            (f, "random", json!({"T": t, "theta": theta, "alpha": a.alpha, "beta": a.beta, "seed": a.seed}))
        }
    };
    let doc = if field.is_mixture() {
        let vf = field.volume_fractions()?;
        eprintln!("theta={} theta_h={} theta_v={}", vf.theta, vf.theta_h, vf.theta_v);
        document_with_provenance(&field, construction, params)?
    } else {
        let mut doc = field.to_document();
        doc.provenance = Some(json!({"construction": construction, "params": params}));
        doc
    };
    emit(a.out.as_deref(), &(doc.to_json() + "\n"))?;
    Ok(Outcome::OK)
}

fn cmd_phi(a: &PhiArgs) -> Result<Outcome> {
    let field = read_field(&a.input.field)?;
    let profile = phi_profile(&field, &a.fan.fan()?, a.k_max, a.rel_tol)?;
    emit(a.input.out.as_deref(), &(profile.to_json() + "\n"))?;
    Ok(Outcome::OK)
}

fn bounds_value(field: &BondField<f64>) -> Result<Value> {
    let p = projection_bounds(field);
    let av = averaging_bounds(field);
    let mut v = json!({
        "T": field.period(),
        "field_hash": field_hash(field),
        "projection": p.as_array(),
        "averaging": av.as_array(),
    });
    if field.is_mixture() {
        let vf = field.volume_fractions()?;
        v["theta"] = json!(Scalar::to_f64(vf.theta));
        v["theta_h"] = json!(Scalar::to_f64(vf.theta_h));
        v["theta_v"] = json!(Scalar::to_f64(vf.theta_v));
        v["theta_exact"] = json!(ratio(vf.theta));
    }
    Ok(v)
}

fn cmd_bounds(a: &FieldArgs) -> Result<Outcome> {
    let field = read_field(&a.field)?;
    emit(a.out.as_deref(), &pretty(&bounds_value(&field)?)?)?;
    Ok(Outcome::OK)
}

fn read_profile(path: &Path) -> Result<SurfaceTensionProfile<f64>> {
    SurfaceTensionProfile::from_json(&fs::read_to_string(path)?)
}

fn cmd_check(a: &CheckArgs) -> Result<Outcome> {
    let profile = read_profile(&a.profile)?;
    let verdict = theorem_membership(&profile, a.alpha, a.beta, a.theta, a.tol)?;
    emit(a.out.as_deref(), &pretty(&verdict.to_document())?)?;
    Ok(Outcome { finding: !verdict.member })
}

fn cmd_wulff(a: &WulffArgs) -> Result<Outcome> {
    let profile = match (&a.profile, a.c1, a.c2) {
        (Some(path), _, _) => read_profile(path)?,
        (None, Some(c1), Some(c2)) => SurfaceTensionProfile::weighted_l1(&a.fan.fan()?, c1, c2),
        _ => return Err(Error::InvalidParameter("need --profile or both --c1 and --c2".into())),
    };
    let defects = convexity_report(&profile);
    if !defects.is_empty() {
        eprintln!("warning: {} sample(s) violate convexity; they do not shape the polygon", defects.len());
    }
    let shape = wulff_shape(&profile)?;
    let mut doc = serde_json::to_value(shape.to_document())?;
    if let (Some(theta), Some(alpha), Some(beta)) = (a.theta, a.alpha, a.beta) {
        let adm = admissible(&shape.polygon, theta, alpha, beta)?;
        let witness = contains_admissible_rectangle(&shape.polygon, theta, alpha, beta)?;
        doc["admissibility"] = json!({
            "admissible": adm.admissible,
            "which_test": match adm.which_test {
                AdmissibilityTest::ThetaAtMostHalf => "theta<=1/2",
                AdmissibilityTest::ThetaAtLeastHalf => "theta>=1/2",
            },
            "in_square": adm.in_square,
            "arcs_hit": adm.arcs_hit,
            "rectangle_witness": witness,
        });
        if let Some(path) = &a.svg {
            fs::write(path, render_svg(&shape.polygon, theta, alpha, beta, a.arc_samples)?)?;
        }
    }
    emit(a.out.as_deref(), &pretty(&doc)?)?;
    Ok(Outcome::OK)
}

fn cmd_oracle(a: &OracleArgs) -> Result<Outcome> {
    let field = read_field(&a.field)?;
    let nu = match (a.nu, a.z) {
        (Some(nu), _) => nu,
        (None, Some(z)) => normal_of(z),
        (None, None) => [0.0, 1.0],
    };
    let window = match a.offset {
        Some(offset) => SpinWindow::new(a.width, a.height, a.origin, nu, offset)?,
        None => SpinWindow::centered(a.width, a.height, a.origin, nu)?,
    };
    let report = match a.mode {
        ModeArg::Auto => oracle_report(&field, &window)?,
        ModeArg::Exhaustive => {
            // Surfaces the size limit as an error instead of falling back.
            min_interface_energy(&field, &window, OracleMode::Exhaustive)?;
            oracle_report(&field, &window)?
        }
        ModeArg::Dual => OracleReport {
            nu: window.nu(),
            window: [window.width(), window.height()],
            exhaustive: None,
            dual_path: min_interface_energy(&field, &window, OracleMode::DualPath)?,
            agree: true,
        },
    };
    emit(a.out.as_deref(), &pretty(&report)?)?;
    Ok(Outcome { finding: !report.agree })
}

fn cmd_report(a: &ReportArgs) -> Result<Outcome> {
    let field = read_field(&a.input.field)?;
    let fan = a.fan.fan()?;
    let profile = phi_profile(&field, &fan, a.k_max, a.rel_tol)?;
    let averaging = averaging_bounds(&field);
    let floor = field.min_weight();
    let top = field.max_weight();

    // alpha |nu|_1 <= phi <= averaging bound, the latter up to the finite-k slack.
    let mut lower_excess = f64::NEG_INFINITY;
    let mut upper_excess = f64::NEG_INFINITY;
    let mut holds = true;
    for s in &profile.samples {
        let l1 = s.nu[0].abs() + s.nu[1].abs();
        let lo = floor * l1 - s.value;
        let hi = s.value - averaging.evaluate(s.nu);
        let z_len = (s.z[0] as f64).hypot(s.z[1] as f64);
        let slack = 4.0 * top / ((s.k.max(1) * field.period()) as f64 * z_len);
        lower_excess = lower_excess.max(lo);
        upper_excess = upper_excess.max(hi);
        holds &= lo <= a.tol && hi <= slack + a.tol;
    }

    let mut doc = bounds_value(&field)?;
    doc["profile"] = serde_json::to_value(profile.to_document())?;
    doc["sandwich"] = json!({
        "holds": holds,
        "max_lower_excess": lower_excess,
        "max_upper_excess": upper_excess,
    });
    let mut finding = false;
    if let Some((alpha, beta)) = field.levels() {
        let theta = Scalar::to_f64(field.volume_fractions()?.theta);
        let verdict = theorem_membership(&profile, alpha, beta, theta, a.tol)?;
        finding = !verdict.member;
        doc["verdict"] = serde_json::to_value(verdict.to_document())?;
    }
    emit(a.input.out.as_deref(), &pretty(&doc)?)?;
    Ok(Outcome { finding })
}
