//! `ncwig`: noncommutative Wigner functions, marginals and star products from
//! the command line.
//!
//! Exit codes: 0 success, 1 I/O failure or failed verification, 2 bad
//! arguments, 3 label/parameter domain errors, 4 grid guards.

mod field_io;

use std::f64::consts::PI;
use std::fmt;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncwig_core::oracles::{gaussian_state, parse_suites, run_verification_suite, SuiteConfig};
use ncwig_core::report::reports_to_json;
use ncwig_core::starprod::{marginal_momentum_of, marginal_position_of, star_b, star_vartheta};
use ncwig_core::wigner::{
    cross_wigner_standard, qm_limit_check, to_momentum, to_position, wigner_generic, wigner_nc,
    wigner_nc_params, wigner_nc_position, wigner_qm_orbit, wigner_tau0,
};
use ncwig_core::{
    make_orbit_label, nc_params_from_label, Chart, ComplexField2D, DimensionalConstants, Error, Grid1D,
    Grid2D, NCParams, OrbitLabel, Probes, RankOneOperator, Representation,
};

use field_io::{Format, Output};

#[derive(Parser)]
#[command(name = "ncwig", version, about = "Wigner functions on the coadjoint orbits of G_NC")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a Wigner transform on a 2D probe slice.
    Wigner(WignerCmd),
    /// Position or momentum marginal of the noncommutative Wigner function.
    Marginal(MarginalCmd),
    /// The planar star products `conj(bra) ⋆ ket`.
    Star(StarCmd),
    /// Run the verification suites.
    Verify(VerifyCmd),
    /// Distances between the noncommutative and ordinary Wigner functions as `k2 = k3 → 0`.
    Limit(LimitCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WignerKind {
    Generic,
    Nc,
    Tau0,
    Qm,
    Standard,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NcForm {
    Momentum,
    Position,
    Params,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Momentum,
    Position,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StarKind {
    Vartheta,
    #[value(name = "B", alias = "b")]
    B,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Fft,
    Direct,
}

impl From<Method> for ncwig_core::Method {
    fn from(m: Method) -> Self {
        match m {
            Method::Fft => ncwig_core::Method::Fft,
            Method::Direct => ncwig_core::Method::Direct,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct LabelArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    k1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    k2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    k3: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    gamma: f64,
}

impl LabelArgs {
    fn label(&self) -> Result<OrbitLabel, CliError> {
        let c = DimensionalConstants::new(self.alpha, self.beta, self.gamma)?;
        Ok(make_orbit_label(self.k1, self.k2, self.k3, c)?)
    }
}

/// Overrides for `(ħ, ϑ, 𝓑)`; missing values come from the label.
#[derive(Args)]
struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    hbar: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    vartheta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    bfield: Option<f64>,
}

impl ParamArgs {
    fn params(&self, label: &OrbitLabel) -> Result<NCParams, CliError> {
        let p = nc_params_from_label(label);
        Ok(NCParams::new(
            self.hbar.unwrap_or(p.hbar),
            self.vartheta.unwrap_or(p.vartheta),
            self.bfield.unwrap_or(p.bfield),
        )?)
    }
}

#[derive(Args)]
struct StateArgs {
    /// `gaussian:<n0>,<n1>[,q0,p0]` or `file:<path>`.
    #[arg(long, default_value = "gaussian:0,0")]
    state: String,
    /// Bra state of a cross transform; defaults to `--state`.
    #[arg(long)]
    bra: Option<String>,
    /// Samples per axis of the state grid.
    #[arg(long, default_value_t = 128)]
    grid: usize,
    /// Half-width of the state grid.
    #[arg(long, default_value_t = 10.0)]
    extent: f64,
}

#[derive(Args)]
struct OutArgs {
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct WignerCmd {
    #[arg(value_enum)]
    kind: WignerKind,
    /// Variant of `nc`.
    #[arg(long, value_enum, default_value_t = NcForm::Momentum)]
    form: NcForm,
    /// Planck constant of `standard`.
    #[arg(long, default_value_t = 2.0 * PI)]
    h: f64,
    /// The two fixed coordinates, e.g. `k3s=0,k4s=0`; the other two span the slice.
    #[arg(long)]
    slice: Option<String>,
    /// Samples per axis of the probe slice; defaults to `--grid`.
    #[arg(long)]
    probe_n: Option<usize>,
    /// Half-width of the probe slice; defaults to `--extent`.
    #[arg(long)]
    probe_extent: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Fft)]
    method: Method,
    #[command(flatten)]
    label: LabelArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct MarginalCmd {
    #[arg(value_enum)]
    side: Side,
    /// Samples per axis of the output grid.
    #[arg(long, default_value_t = 32)]
    probe_n: usize,
    /// Half-width of the output grid.
    #[arg(long, default_value_t = 3.0)]
    probe_extent: f64,
    /// Samples per integrated axis (at most 32).
    #[arg(long, default_value_t = 32)]
    integrate_n: usize,
    /// Half-width of the integrated axes; defaults to `--extent`.
    #[arg(long)]
    integrate_extent: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Fft)]
    method: Method,
    #[command(flatten)]
    label: LabelArgs,
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct StarCmd {
    #[arg(value_enum)]
    kind: StarKind,
    #[arg(long, default_value_t = 32)]
    probe_n: usize,
    #[arg(long, default_value_t = 3.0)]
    probe_extent: f64,
    #[command(flatten)]
    label: LabelArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct VerifyCmd {
    /// `all` or a comma-separated list of suite names.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Args)]
struct LimitCmd {
    /// Number of reductions `m_max`; prints `m_max + 1` distances.
    #[arg(long, default_value_t = 4)]
    halvings: u32,
    /// Starting value of `k2 = k3`.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    c: f64,
    /// Reduction factor per step.
    #[arg(long, default_value_t = 4.0)]
    ratio: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    k1: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long, default_value = "k2s=0.25,k3s=-0.3")]
    slice: String,
    #[arg(long, default_value_t = 16)]
    probe_n: usize,
    #[arg(long, default_value_t = 2.0)]
    probe_extent: f64,
    #[arg(long, value_enum, default_value_t = Method::Fft)]
    method: Method,
    #[command(flatten)]
    state: StateArgs,
}

enum CliError {
    Arg { flag: &'static str, msg: String },
    Core(Error),
    Io(String),
    Failed(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Arg { flag, msg } => write!(f, "invalid {flag}: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Failed(n) => write!(f, "{n} verification report(s) failed"),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Arg { .. } => 2,
            CliError::Core(e) if e.is_domain() => 3,
            CliError::Core(e) if e.is_grid_guard() => 4,
            CliError::Core(Error::Parse(_) | Error::InvalidGrid(_) | Error::GridMismatch) => 2,
            _ => 1,
        }
    }
}

fn arg(flag: &'static str, msg: impl fmt::Display) -> CliError {
    CliError::Arg { flag, msg: msg.to_string() }
}

fn square(n: usize, extent: f64, flag: &'static str) -> Result<Grid2D, CliError> {
    Grid2D::square_symmetric(n, extent).map_err(|e| arg(flag, e))
}

/// Loads `spec` on `grid` in representation `want`. Built-in states are
/// sampled directly in `want`; file states are converted with the label's
/// `ħ = 1/(k1α)` when their tag differs.
fn load_state(
    spec: &str,
    flag: &'static str,
    grid: Grid2D,
    want: Representation,
    label: Option<&OrbitLabel>,
) -> Result<ComplexField2D, CliError> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| arg(flag, format!("`{spec}` is not `gaussian:..` or `file:..`")))?;
    match kind {
        "gaussian" => {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 2 && parts.len() != 4 {
                return Err(arg(flag, "expected gaussian:<n0>,<n1>[,q0,p0]"));
            }
            let n = |s: &str| s.parse::<u32>().map_err(|e| arg(flag, format!("Hermite index `{s}`: {e}")));
            let x = |s: &str| s.parse::<f64>().map_err(|e| arg(flag, format!("`{s}`: {e}")));
            let (q0, p0) = if parts.len() == 4 { (x(parts[2])?, x(parts[3])?) } else { (0.0, 0.0) };
            let mut f = gaussian_state(grid, [1.0, 1.0], [q0, q0, p0, p0], [n(parts[0])?, n(parts[1])?])
                .map_err(|e| arg(flag, e))?;
            f.representation = want;
            Ok(f)
        }
        "file" => {
            let text = std::fs::read_to_string(rest).map_err(|e| CliError::Io(format!("{rest}: {e}")))?;
            let f = field_io::parse_field(&text).map_err(|e| arg(flag, format!("{rest}: {e}")))?;
            match (f.representation == want, label) {
                (true, _) => Ok(f),
                (false, Some(l)) if want == Representation::Momentum => Ok(to_momentum(&f, l)?),
                (false, Some(l)) => Ok(to_position(&f, l)?),
                (false, None) => Err(arg(flag, format!("a {} state is required", want.tag()))),
            }
        }
        other => Err(arg(flag, format!("unknown state source `{other}`"))),
    }
}

fn operator(
    s: &StateArgs,
    want: Representation,
    label: Option<&OrbitLabel>,
) -> Result<RankOneOperator, CliError> {
    let grid = square(s.grid, s.extent, "--grid/--extent")?;
    let ket = load_state(&s.state, "--state", grid, want, label)?;
    let bra = match &s.bra {
        Some(b) => load_state(b, "--bra", grid, want, label)?,
        None => ket.clone(),
    };
    RankOneOperator::new(ket, bra).map_err(|e| arg("--bra", e))
}

/// Parses `name=value,name=value` into the free axes (ascending) and the fixed values.
fn parse_slice(spec: &str, chart: Chart) -> Result<([usize; 2], [f64; 4]), CliError> {
    let mut fixed = [0.0; 4];
    let mut used = Vec::new();
    for item in spec.split(',') {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| arg("--slice", format!("`{item}` is not name=value")))?;
        let k = chart.axis_index(name.trim()).ok_or_else(|| {
            arg("--slice", format!("unknown axis `{name}` (axes: {})", chart.axis_names().join(",")))
        })?;
        if used.contains(&k) {
            return Err(arg("--slice", format!("axis `{name}` given twice")));
        }
        fixed[k] = value.trim().parse().map_err(|e| arg("--slice", format!("`{value}`: {e}")))?;
        used.push(k);
    }
    if used.len() != 2 {
        return Err(arg("--slice", "exactly two fixed coordinates are required"));
    }
    let free: Vec<usize> = (0..4).filter(|k| !used.contains(k)).collect();
    Ok(([free[0], free[1]], fixed))
}

fn default_slice(chart: Chart) -> String {
    let n = chart.axis_names();
    format!("{}=0,{}=0", n[2], n[3])
}

fn write_output(o: &OutArgs, out: &Output) -> Result<(), CliError> {
    let text = field_io::render(out, o.format);
    if o.out == "-" {
        use std::io::Write;
        std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
    } else {
        std::fs::write(&o.out, text).map_err(|e| CliError::Io(format!("{}: {e}", o.out)))
    }
}

fn describe_grid(name: &str, g: &Grid2D) {
    eprintln!(
        "{name}: {}x{} origin=({:e}, {:e}) step=({:e}, {:e})",
        g.axis0.n, g.axis1.n, g.axis0.origin, g.axis1.origin, g.axis0.step, g.axis1.step
    );
}

fn cmd_wigner(c: &WignerCmd) -> Result<(), CliError> {
    let method: ncwig_core::Method = c.method.into();
    let label = c.label.label();
    let (chart, rep) = match (c.kind, c.form) {
        (WignerKind::Standard, _) => (Chart::Phase, Representation::Position),
        (WignerKind::Nc, NcForm::Position) => (Chart::Nc, Representation::Position),
        (WignerKind::Nc, NcForm::Params) => (Chart::Orbit, Representation::Position),
        (WignerKind::Nc, NcForm::Momentum) => (Chart::Nc, Representation::Momentum),
        _ => (Chart::Orbit, Representation::Momentum),
    };
    let label = if c.kind == WignerKind::Standard { label.ok() } else { Some(label?) };
    let params = match &label {
        Some(l) if c.kind != WignerKind::Standard => Some(c.params.params(l)?),
        _ => None,
    };
    let slice = c.slice.clone().unwrap_or_else(|| default_slice(chart));
    let (axes, fixed) = parse_slice(&slice, chart)?;
    let op = operator(&c.state, rep, label.as_ref())?;
    let pgrid = square(
        c.probe_n.unwrap_or(c.state.grid),
        c.probe_extent.unwrap_or(c.state.extent),
        "--probe-n/--probe-extent",
    )?;
    let probes = Probes::slice(pgrid, axes, fixed)?;

    if let Some(l) = &label {
        eprintln!("label: {l}");
    }
    if let Some(p) = &params {
        eprintln!("params: {p}");
    }
    describe_grid("state grid", op.grid());
    describe_grid("probe grid", &pgrid);
    eprintln!("slice: {slice}");
    eprintln!("method: {}", if method == ncwig_core::Method::Fft { "fft" } else { "direct" });

    let w = match (c.kind, label.as_ref()) {
        (WignerKind::Standard, _) => {
            eprintln!("h: {:e}", c.h);
            cross_wigner_standard(&op, &probes, c.h, method)?
        }
        (WignerKind::Generic, Some(l)) => wigner_generic(&op, &probes, l, method)?,
        (WignerKind::Tau0, Some(l)) => wigner_tau0(&op, &probes, l, method)?,
        (WignerKind::Qm, Some(l)) => wigner_qm_orbit(&op, &probes, l, method)?,
        (WignerKind::Nc, Some(l)) => match c.form {
            NcForm::Momentum => wigner_nc(&op, &probes, l, method)?,
            NcForm::Position => wigner_nc_position(&op, &probes, l, method)?,
            NcForm::Params => wigner_nc_params(&op, &probes, params.as_ref().expect("params"), method)?,
        },
        (_, None) => unreachable!("label checked above"),
    };
    let names = chart.axis_names();
    let mut meta = vec![("chart".to_string(), chart.name().to_string())];
    meta.push(("slice".into(), slice));
    if let Some(l) = &label {
        meta.push(("label".into(), l.to_string()));
    }
    if let Some(p) = &params {
        meta.push(("params".into(), p.to_string()));
    }
    meta.push(("method".into(), format!("{:?}", method).to_lowercase()));
    write_output(
        &c.out,
        &Output {
            axes: [names[axes[0]].into(), names[axes[1]].into()],
            grid: pgrid,
            values: w.values().to_vec(),
            meta,
        },
    )
}

fn cmd_marginal(c: &MarginalCmd) -> Result<(), CliError> {
    let method: ncwig_core::Method = c.method.into();
    let label = c.label.label()?;
    let params = nc_params_from_label(&label);
    let rep = match c.side {
        Side::Momentum => Representation::Momentum,
        Side::Position => Representation::Position,
    };
    let op = operator(&c.state, rep, Some(&label))?;
    let out = square(c.probe_n, c.probe_extent, "--probe-n/--probe-extent")?;
    let ax = Grid1D::symmetric(c.integrate_n, c.integrate_extent.unwrap_or(c.state.extent))
        .map_err(|e| arg("--integrate-n/--integrate-extent", e))?;
    eprintln!("label: {label}");
    eprintln!("params: {params}");
    describe_grid("state grid", op.grid());
    describe_grid("output grid", &out);
    eprintln!("integrated axes: {} samples on [{:e}, {:e})", ax.n, ax.origin, ax.end());
    eprintln!("method: {}", format!("{:?}", method).to_lowercase());
    let (field, axes) = match c.side {
        Side::Momentum => (marginal_momentum_of(&op, &label, [ax, ax], &out, method)?, ["p1", "p2"]),
        Side::Position => (marginal_position_of(&op, &label, &out, [ax, ax], method)?, ["q1", "q2"]),
    };
    write_output(
        &c.out,
        &Output {
            axes: axes.map(String::from),
            grid: out,
            values: field.values().to_vec(),
            meta: vec![
                ("representation".into(), field.representation.tag().into()),
                ("label".into(), label.to_string()),
                ("params".into(), params.to_string()),
            ],
        },
    )
}

fn cmd_star(c: &StarCmd) -> Result<(), CliError> {
    let label = c.label.label()?;
    let params = c.params.params(&label)?;
    let (rep, axes) = match c.kind {
        StarKind::Vartheta => (Representation::Position, ["k1s", "k2s"]),
        StarKind::B => (Representation::Momentum, ["k3s", "k4s"]),
    };
    let op = operator(&c.state, rep, Some(&label))?;
    let out = square(c.probe_n, c.probe_extent, "--probe-n/--probe-extent")?;
    eprintln!("label: {label}");
    eprintln!("params: {params}");
    describe_grid("state grid", op.grid());
    describe_grid("output grid", &out);
    let bra = op.bra.conj();
    let field = match c.kind {
        StarKind::Vartheta => star_vartheta(&bra, &op.ket, &params, &out)?,
        StarKind::B => star_b(&bra, &op.ket, &params, &out)?,
    };
    write_output(
        &c.out,
        &Output {
            axes: axes.map(String::from),
            grid: out,
            values: field.values().to_vec(),
            meta: vec![
                ("representation".into(), rep.tag().into()),
                ("label".into(), label.to_string()),
                ("params".into(), params.to_string()),
            ],
        },
    )
}

fn cmd_verify(c: &VerifyCmd) -> Result<(), CliError> {
    let suites = parse_suites(&c.suite).map_err(|e| arg("--suite", e))?;
    eprintln!("suites: {} seed: {}", suites.iter().map(|s| s.name()).collect::<Vec<_>>().join(","), c.seed);
    let reports = run_verification_suite(&SuiteConfig { suites, seed: c.seed });
    match c.format {
        ReportFormat::Text => {
            for r in &reports {
                println!("{r}");
            }
        }
        ReportFormat::Json => println!("{}", reports_to_json(&reports)),
    }
    match reports.iter().filter(|r| !r.passed).count() {
        0 => Ok(()),
        n => Err(CliError::Failed(n)),
    }
}

fn cmd_limit(c: &LimitCmd) -> Result<(), CliError> {
    let consts = DimensionalConstants::new(c.alpha, c.beta, c.gamma)?;
    let reference = make_orbit_label(c.k1, 0.0, 0.0, consts)?;
    if !(c.ratio > 1.0) {
        return Err(arg("--ratio", "must exceed 1"));
    }
    let (axes, fixed) = parse_slice(&c.slice, Chart::Orbit)?;
    let pgrid = square(c.probe_n, c.probe_extent, "--probe-n/--probe-extent")?;
    let probes = Probes::slice(pgrid, axes, fixed)?;
    let op = operator(&c.state, Representation::Momentum, Some(&reference))?;
    let method: ncwig_core::Method = c.method.into();
    eprintln!("reference label: {reference}");
    describe_grid("state grid", op.grid());
    describe_grid("probe grid", &pgrid);
    eprintln!("slice: {}", c.slice);
    eprintln!("# m k2=k3 distance");
    let d = qm_limit_check(&op, c.k1, consts, c.c, c.ratio, c.halvings, &probes, method)?;
    for (m, x) in d.iter().enumerate() {
        println!("{m} {:.16e} {x:.16e}", c.c * c.ratio.powi(-(m as i32)));
    }
    Ok(())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("NCWIG_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|e| arg("NCWIG_THREADS", format!("`{v}`: {e}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| arg("NCWIG_THREADS", e))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Wigner(c) => cmd_wigner(c),
        Command::Marginal(c) => cmd_marginal(c),
        Command::Star(c) => cmd_star(c),
        Command::Verify(c) => cmd_verify(c),
        Command::Limit(c) => cmd_limit(c),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ncwig: error: {e}");
            ExitCode::from(e.code())
        }
    }
}
