//! Command-line front end. Exit codes: 0 ok, 1 a check failed, 2 bad input.

mod config;
mod preset;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_config, Config, ConfigError, Entry, InitialSpec, RunSettings, Value};
pub use preset::{parse_preset, preset, preset_coefficients, PresetError};

use crate::diffpoly::Format;
use crate::evolve::{write_trajectory, FlowSpec, Integrator, Method, Observers};
use crate::hierarchy::{build_flows, standard_table, zero_curvature_check, STANDARD_ORDER};
use crate::solutions::{
    peregrine, plane_wave, sample_field, soliton, FiniteGap, RiemannData, SharedSampler, MAX_SAMPLER_ORDER,
};
use crate::spectral::{pointwise_residual, read_field_file, residual, write_field, write_field_file, Field, Grid};
use crate::symmetry::{transform_solution, IdentityReport, SymmetryParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default bound for residual and identity checks.
pub const DEFAULT_TOL: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "akns", version, about = "AKNS hierarchy flows, integration and symmetry transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print or audit the hierarchy flows.
    #[command(subcommand)]
    Hierarchy(HierarchyCmd),
    /// Integrate a flow mix from a config file.
    Evolve(EvolveArgs),
    /// Apply a scaling-Galilean transform to a solution and report residuals.
    Transform(TransformArgs),
    /// Check snapshots against the flows of a config.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Sample a closed-form or finite-gap solution on a grid.
    Sample(SampleArgs),
    /// Check the moduli identities of a transform.
    #[command(subcommand)]
    Identity(IdentityCmd),
}

#[derive(Debug, Subcommand)]
enum HierarchyCmd {
    Show {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "text", value_parser = parse_format)]
        format: Format,
    },
    Verify {
        #[arg(long, default_value_t = STANDARD_ORDER)]
        max_order: usize,
    },
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[arg(long)]
    config: PathBuf,
    /// Field file, or a sampler such as `soliton(1.5)`, `planewave(1)`,
    /// `peregrine` or `finitegap`. Overrides `[initial]`.
    #[arg(long)]
    initial: Option<String>,
    /// Riemann data for a finite-gap start.
    #[arg(long)]
    riemann: Option<PathBuf>,
    /// Replaces the `[flows]` section.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SolutionArgs {
    /// Sampler parameters: `q` for planewave, `a` for soliton.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
    #[arg(long)]
    riemann: Option<PathBuf>,
    /// Flow times `t1,t2,...`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    times: Vec<f64>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long)]
    sampler: String,
    #[command(flatten)]
    solution: SolutionArgs,
    /// Probe grid `N,L`.
    #[arg(long, value_parser = parse_grid)]
    probe: Grid,
    /// Flow whose pointwise residual goes in the CSV.
    #[arg(long, default_value_t = 1)]
    flow: usize,
    #[arg(long, default_value_t = 1e-5)]
    delta: f64,
    /// Exit 1 if any flow residual exceeds this.
    #[arg(long)]
    tol: Option<f64>,
    /// CSV destination; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    Residual {
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    solution: String,
    #[command(flatten)]
    sol: SolutionArgs,
    /// Grid `N,L`.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    /// Write `snap_0..2.txt` at `t_k − Δ, t_k, t_k + Δ` instead of one field.
    #[arg(long)]
    triple: Option<f64>,
    /// Flow whose time stamps the field(s).
    #[arg(long, default_value_t = 1)]
    flow: usize,
    /// File (single field) or directory (triple); stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum IdentityCmd {
    Check {
        #[arg(long)]
        riemann: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        max_flow: usize,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let (n, l) = s.split_once(',').ok_or("expected N,L")?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad grid size '{n}'"))?;
    let l: f64 = l.trim().parse().map_err(|_| format!("bad period '{l}'"))?;
    Grid::new(n, l).map_err(|e| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    msg: String,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: e.to_string(),
    }
}

fn failed(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_FAILED,
        msg: e.to_string(),
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut report = String::new();
    let result = dispatch(cli.command, out, &mut report);
    let _ = err.write_all(report.as_bytes());
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(cmd: Command, out: &mut dyn Write, report: &mut String) -> CmdResult {
    let mut buf = String::new();
    let code = match cmd {
        Command::Hierarchy(HierarchyCmd::Show { order, format }) => hierarchy_show(order, format, &mut buf)?,
        Command::Hierarchy(HierarchyCmd::Verify { max_order }) => hierarchy_verify(max_order, &mut buf)?,
        Command::Evolve(a) => evolve(a, &mut buf, report)?,
        Command::Transform(a) => transform(a, &mut buf, report)?,
        Command::Verify(VerifyCmd::Residual { snapshots, config, tol }) => {
            verify_residual(&snapshots, &config, tol, &mut buf)?
        }
        Command::Sample(a) => sample(a, &mut buf)?,
        Command::Identity(IdentityCmd::Check { riemann, a, b, max_flow }) => {
            identity_check(&riemann, a, b, max_flow, &mut buf)?
        }
    };
    out.write_all(buf.as_bytes()).map_err(usage)?;
    Ok(code)
}

fn hierarchy_show(order: usize, format: Format, out: &mut String) -> CmdResult {
    let h = standard_table().scalar_h(order).map_err(usage)?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&h.to_json_value()).map_err(usage)?,
        f => h.render(f),
    };
    let _ = writeln!(out, "{text}");
    Ok(EXIT_OK)
}

fn hierarchy_verify(max_order: usize, out: &mut String) -> CmdResult {
    let table = build_flows(max_order).map_err(usage)?;
    let mut ok = true;
    for k in 1..=max_order {
        let r = zero_curvature_check(&table, k).map_err(usage)?;
        for p in &r.powers {
            let _ = writeln!(
                out,
                "order {k} power {}: {} ({} residual terms)",
                p.power,
                if p.vanishes { "ok" } else { "FAIL" },
                p.residual_terms
            );
        }
        ok &= r.passed();
    }
    let _ = writeln!(out, "{}", if ok { "zero curvature holds" } else { "zero curvature FAILED" });
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

/// `name` or `name(p1, p2, ...)`.
fn split_call(text: &str) -> Result<(String, Vec<f64>), Failure> {
    let text = text.trim();
    match text.split_once('(') {
        None => Ok((text.to_string(), Vec::new())),
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| usage(format!("unbalanced parentheses in '{text}'")))?;
            let args = inner
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("bad number '{t}' in '{text}'"))))
                .collect::<Result<_, _>>()?;
            Ok((name.trim().to_string(), args))
        }
    }
}

fn build_sampler(name: &str, params: &[f64], riemann: Option<&Path>) -> Result<SharedSampler, Failure> {
    let one = |what: &str| -> Result<f64, Failure> {
        match params {
            [] => Ok(1.0),
            [v] => Ok(*v),
            _ => Err(usage(format!("{name} takes one parameter ({what}), got {}", params.len()))),
        }
    };
    let s: SharedSampler = match name {
        "planewave" => Arc::new(plane_wave(one("q")?, MAX_SAMPLER_ORDER).map_err(usage)?),
        "soliton" => Arc::new(soliton(one("a")?, MAX_SAMPLER_ORDER).map_err(usage)?),
        "peregrine" => {
            if !params.is_empty() {
                return Err(usage("peregrine takes no parameters"));
            }
            Arc::new(peregrine())
        }
        "finitegap" => {
            let path = riemann.ok_or_else(|| usage("finitegap needs --riemann FILE"))?;
            let data = RiemannData::read_file(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Arc::new(FiniteGap::new(data).map_err(usage)?)
        }
        other => {
            return Err(usage(format!(
                "unknown solution '{other}' (planewave, soliton, peregrine, finitegap)"
            )))
        }
    };
    Ok(s)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<Config, Failure> {
    parse_config(&read_text(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn evolve(a: EvolveArgs, out: &mut String, report: &mut String) -> CmdResult {
    let cfg = load_config(&a.config)?;
    let cfg_err = |e: ConfigError| usage(format!("{}: {e}", a.config.display()));
    let spec = match &a.preset {
        Some(p) => parse_preset(p).map_err(usage)?,
        None => cfg.flow_spec().map_err(cfg_err)?,
    };
    if spec.is_empty() {
        return Err(usage("no flows configured"));
    }
    let settings = cfg.run().map_err(cfg_err)?;

    let initial = match &a.initial {
        Some(s) if Path::new(s).is_file() => InitialSpec::File(s.clone()),
        Some(s) => {
            let (name, params) = split_call(s)?;
            InitialSpec::Solution {
                name,
                param: params.first().copied(),
                riemann: None,
                times: Vec::new(),
            }
        }
        None => cfg
            .initial()
            .map_err(cfg_err)?
            .ok_or_else(|| usage("no initial state: pass --initial or add an [initial] section"))?,
    };
    let f0 = match initial {
        InitialSpec::File(path) => {
            let f = read_field_file(Path::new(&path)).map_err(|e| usage(format!("{path}: {e}")))?;
            if cfg.has_section("grid") && cfg.grid().map_err(cfg_err)? != *f.grid() {
                return Err(usage(format!("{path}: grid differs from [grid]")));
            }
            f.with_time(settings.t_start)
        }
        InitialSpec::Solution { name, param, riemann, times } => {
            let grid = cfg.grid().map_err(cfg_err)?;
            let rpath = a.riemann.clone().or(riemann.map(PathBuf::from));
            let params: Vec<f64> = param.into_iter().collect();
            let s = build_sampler(&name, &params, rpath.as_deref())?;
            sample_field(s.as_ref(), grid, &times, settings.t_start).map_err(usage)?
        }
    };

    let method = a.method.or(settings.method);
    let integ = match method {
        Some(m) => Integrator::new(*f0.grid(), spec, m),
        None => Integrator::with_default_method(*f0.grid(), spec),
    }
    .map_err(usage)?
    .with_dealias(settings.dealias);
    let observers = Observers {
        times: settings.observe.clone(),
        every: settings.every,
    };
    let traj = integ
        .run(&f0, settings.t_end, settings.dt, &observers)
        .map_err(|e| match e {
            crate::evolve::EvolveError::Blowup { time, last_good } => {
                let saved = std::fs::create_dir_all(&a.out)
                    .ok()
                    .and_then(|_| write_field_file(&a.out.join("last_good.txt"), &last_good).ok());
                let note = if saved.is_some() { "; last good field saved as last_good.txt" } else { "" };
                failed(format!("non-finite values at t = {time}{note}"))
            }
            crate::evolve::EvolveError::StabilityViolation { .. } => usage(e),
            other => failed(other),
        })?;
    write_trajectory(&a.out, &traj).map_err(usage)?;
    let drift = traj.max_drift();
    let _ = writeln!(
        report,
        "{} snapshots written to {}",
        traj.snapshots.len(),
        a.out.display()
    );
    let _ = writeln!(out, "method={:?} t_end={:e}", integ.method(), settings.t_end);
    let _ = writeln!(out, "conserved drift: {:e} {:e} {:e}", drift[0], drift[1], drift[2]);
    Ok(EXIT_OK)
}

fn transform(a: TransformArgs, out: &mut String, report: &mut String) -> CmdResult {
    let p = SymmetryParams::new(a.a, a.b).map_err(usage)?;
    let inner = build_sampler(&a.sampler, &a.solution.params, a.solution.riemann.as_deref())?;
    let t = transform_solution(inner, p);
    let order = crate::solutions::Sampler::order(&t);
    if a.flow == 0 || a.flow > order {
        return Err(usage(format!("--flow must lie in 1..={order}")));
    }
    if !(a.delta > 0.0 && a.delta.is_finite()) {
        return Err(usage(format!("--delta must be positive, got {}", a.delta)));
    }
    let grid = a.probe;
    let mut times = a.solution.times.clone();
    if times.len() > order {
        return Err(usage(format!("{} times given to a solution of order {order}", times.len())));
    }
    times.resize(order, 0.0);

    // One triple per flow: the CSV carries flow `a.flow`, the report all.
    let mut worst = Vec::with_capacity(order);
    let mut csv = String::from("x,t,re,im,residual\n");
    for k in 1..=order {
        let mut tt = times.clone();
        let centre = tt[k - 1];
        let mut fields = Vec::with_capacity(3);
        for tk in [centre - a.delta, centre, centre + a.delta] {
            tt[k - 1] = tk;
            fields.push(sample_field(&t, grid, &tt, tk).map_err(failed)?);
        }
        let spec = FlowSpec::single(k).map_err(usage)?;
        let r = pointwise_residual(&fields[0], &fields[1], &fields[2], &spec).map_err(failed)?;
        let max = r.iter().map(|v| v.norm()).fold(0.0, f64::max);
        worst.push(max);
        if k == a.flow {
            for (j, (v, res)) in fields[1].values().iter().zip(&r).enumerate() {
                let _ = writeln!(
                    csv,
                    "{:e},{:e},{:e},{:e},{:e}",
                    grid.centered_node(j),
                    centre,
                    v.re,
                    v.im,
                    res.norm()
                );
            }
        }
    }
    match &a.out {
        Some(path) => std::fs::write(path, &csv).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => out.push_str(&csv),
    }
    let _ = writeln!(report, "{}", crate::solutions::Sampler::name(&t));
    for (k, r) in worst.iter().enumerate() {
        let _ = writeln!(report, "flow {}: max residual {:e}", k + 1, r);
    }
    Ok(match a.tol {
        Some(tol) if worst.iter().any(|r| !(*r < tol)) => EXIT_FAILED,
        _ => EXIT_OK,
    })
}

/// `snap_<step>.txt` files in `dir`, ordered by step.
fn read_snapshots(dir: &Path) -> Result<Vec<Field>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let mut steps = Vec::new();
    for e in entries {
        let e = e.map_err(usage)?;
        let name = e.file_name().to_string_lossy().into_owned();
        if let Some(step) = name
            .strip_prefix("snap_")
            .and_then(|s| s.strip_suffix(".txt"))
            .and_then(|s| s.parse::<usize>().ok())
        {
            steps.push((step, e.path()));
        }
    }
    steps.sort();
    steps
        .iter()
        .map(|(_, p)| read_field_file(p).map_err(|e| usage(format!("{}: {e}", p.display()))))
        .collect()
}

fn verify_residual(dir: &Path, config: &Path, tol: f64, out: &mut String) -> CmdResult {
    let cfg = load_config(config)?;
    let spec = cfg.flow_spec().map_err(|e| usage(format!("{}: {e}", config.display())))?;
    if spec.is_empty() {
        return Err(usage("no flows configured"));
    }
    let fields = read_snapshots(dir)?;
    let _ = writeln!(out, "t,residual");
    let mut checked = 0usize;
    let mut ok = true;
    for w in fields.windows(3) {
        let (t0, t1, t2) = (w[0].time(), w[1].time(), w[2].time());
        let (d1, d2) = (t1 - t0, t2 - t1);
        if !(d1 > 0.0 && d2 > 0.0) || (d1 - d2).abs() > 1e-9 * d1.max(d2) {
            continue;
        }
        let r = residual(&w[0], &w[1], &w[2], &spec).map_err(failed)?;
        let _ = writeln!(out, "{:e},{:e}", t1, r);
        ok &= r < tol;
        checked += 1;
    }
    if checked == 0 {
        return Err(usage(format!(
            "{}: no three equally spaced snapshots to check",
            dir.display()
        )));
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn sample(a: SampleArgs, out: &mut String) -> CmdResult {
    let s = build_sampler(&a.solution, &a.sol.params, a.sol.riemann.as_deref())?;
    let order = s.order();
    if a.flow == 0 || a.flow > order {
        return Err(usage(format!("--flow must lie in 1..={order}")));
    }
    let mut times = a.sol.times.clone();
    if times.len() > order {
        return Err(usage(format!("{} times given to a solution of order {order}", times.len())));
    }
    times.resize(times.len().max(a.flow), 0.0);
    let centre = times[a.flow - 1];
    match a.triple {
        None => {
            let f = sample_field(s.as_ref(), a.grid, &times, centre).map_err(failed)?;
            match &a.out {
                Some(path) => write_field_file(path, &f).map_err(|e| usage(format!("{}: {e}", path.display())))?,
                None => out.push_str(&write_field(&f)),
            }
        }
        Some(delta) => {
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(usage(format!("--triple must be positive, got {delta}")));
            }
            let dir = a.out.as_ref().ok_or_else(|| usage("--triple needs --out DIR"))?;
            std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            for (i, tk) in [centre - delta, centre, centre + delta].into_iter().enumerate() {
                times[a.flow - 1] = tk;
                let f = sample_field(s.as_ref(), a.grid, &times, tk).map_err(failed)?;
                let path = dir.join(format!("snap_{i}.txt"));
                write_field_file(&path, &f).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn identity_check(riemann: &Path, a: f64, b: f64, max_flow: usize, out: &mut String) -> CmdResult {
    let data = RiemannData::read_file(riemann).map_err(|e| usage(format!("{}: {e}", riemann.display())))?;
    let p = SymmetryParams::new(a, b).map_err(usage)?;
    let r = IdentityReport::compute(&data, &p, max_flow).map_err(usage)?;
    let mark = |e: f64| if e < IDENTITY_TOL { "ok" } else { "FAIL" };
    let _ = writeln!(out, "argument identity: {:e} {}", r.argument, mark(r.argument));
    let _ = writeln!(out, "phase identity: {:e} {}", r.phase, mark(r.phase));
    // Informational: the short form only holds when the lower K_j vanish.
    let _ = writeln!(out, "unit-scale K reduction: {:e}", r.k_reduction);
    Ok(if r.argument < IDENTITY_TOL && r.phase < IDENTITY_TOL {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}
