//! The `bonnet` command line: argument parsing, run configuration, and the
//! six subcommands. `main.rs` only parses, sets the thread count and exits
//! with the code returned here.

use std::fs;
use std::path::{Path, PathBuf};

use bonnet_core::bonnet::{differentials, fundamental_forms, synthesize, verify_theorem2};
use bonnet_core::catalog::{registry, DerivativeMode, Surface};
use bonnet_core::charts::GridChart;
use bonnet_core::exterior4::Bivector4;
use bonnet_core::mesh::{self, ANTI_SELF_DUAL_BASIS, PAIR_HEADER, SELF_DUAL_BASIS};
use bonnet_core::pipeline::{self, integration_checks, prepare, Ratio, Setup};
use bonnet_core::recovery::{recover_isothermic, Recovered, Reference};
use bonnet_core::report::{to_json_string, Report};
use bonnet_core::snapshot::{Document, PairFields};
use bonnet_core::tolerances::Tolerances;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bonnet", version, about = "Bonnet pairs from isothermic surfaces in S3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog surfaces and their parameters.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Integrate the pair and write pair.json plus OBJ meshes.
    Synth(RunArgs),
    /// Check every identity of the forward construction.
    Verify(RunArgs),
    /// Synthesize, then recover the surface from the pair alone.
    Roundtrip(RunArgs),
    /// Verify on the chart and on its refinement; report Richardson ratios.
    Converge(RunArgs),
    /// Recover the isothermic surface from a pair snapshot.
    Recover(RecoverArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DerivArg {
    Analytic,
    Fd,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value = "homogeneous_torus")]
    pub surface: String,
    /// Surface parameter, repeatable.
    #[arg(long = "param", value_name = "K=V", value_parser = parse_assignment)]
    pub params: Vec<(String, f64)>,
    /// Parameter rectangle; accepts `pi`, `pi/2`, `2pi`, ...
    #[arg(long, value_name = "U0,U1,V0,V1", default_value = "0,pi,0,pi", allow_hyphen_values = true, value_parser = parse_bounds)]
    pub chart: [f64; 4],
    #[arg(long, value_name = "NUxNV", default_value = "65x65", value_parser = parse_grid)]
    pub grid: (usize, usize),
    /// Coefficient of q = c dz².
    #[arg(long, value_name = "RE,IM", default_value = "1,0", allow_hyphen_values = true, value_parser = parse_complex)]
    pub c: Complex64,
    #[arg(long, value_enum, default_value = "analytic")]
    pub deriv: DerivArg,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "CHECK=VAL", value_parser = parse_assignment)]
    pub tol: Vec<(String, f64)>,
    /// Print the JSON report on stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RecoverArgs {
    #[arg(long, value_name = "FILE")]
    pub pair: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long = "tol", value_name = "CHECK=VAL", value_parser = parse_assignment)]
    pub tol: Vec<(String, f64)>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] bonnet_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bonnet_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Core(e) => match e {
                E::InvalidChart(_)
                | E::Shape { .. }
                | E::InvalidParameter(_)
                | E::ZeroQuadraticDifferential
                | E::Json(_)
                | E::Io(_) => EXIT_USAGE,
                E::NotOnSphere { .. }
                | E::NotOrthogonal { .. }
                | E::NotClosed { .. }
                | E::NotLorentzian { .. }
                | E::AtInfinity { .. }
                | E::VanishingQuadraticDifferential { .. }
                | E::RankDeficient { .. }
                | E::NoLine(_)
                | E::SignContinuity { .. } => EXIT_REFUSED,
            },
        }
    }
}

/// What a run produced: the exit code, stdout text and warnings for stderr.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: Vec<String>,
}

/// Echo of the inputs of a run, stored in every JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub setup: Setup,
    pub tolerance_overrides: Vec<(String, f64)>,
}

impl RunConfig {
    pub fn from_args(command: &str, args: &RunArgs) -> Result<RunConfig, CliError> {
        let surface = Surface::from_name(&args.surface, &args.params)?;
        let [u0, u1, v0, v1] = args.chart;
        let chart = GridChart::new(u0, u1, v0, v1, args.grid.0, args.grid.1)?;
        if args.c == Complex64::new(0.0, 0.0) {
            return Err(bonnet_core::Error::ZeroQuadraticDifferential.into());
        }
        let deriv = match args.deriv {
            DerivArg::Analytic => DerivativeMode::Analytic,
            DerivArg::Fd => DerivativeMode::FiniteDifference,
        };
        Ok(RunConfig {
            command: command.to_string(),
            setup: Setup { surface, c: args.c, chart, deriv },
            tolerance_overrides: args.tol.clone(),
        })
    }
}

pub fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let value = parse_real(v)?;
    Ok((k.trim().to_string(), value))
}

/// A real number, or a multiple or fraction of `pi`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let err = || format!("not a number: '{s}'");
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    let (head, divisor) = match body.split_once('/') {
        Some((h, d)) => (h, d.trim().parse::<f64>().map_err(|_| err())?),
        None => (body, 1.0),
    };
    let coeff = head.strip_suffix("pi").ok_or_else(err)?.trim_end_matches('*');
    let coeff = if coeff.is_empty() { 1.0 } else { coeff.parse::<f64>().map_err(|_| err())? };
    Ok(sign * coeff * std::f64::consts::PI / divisor)
}

pub fn parse_bounds(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected U0,U1,V0,V1, got '{s}'"));
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_real(p)?;
    }
    Ok(out)
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NUxNV, got '{s}'"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad node count '{t}'"));
    Ok((n(a)?, n(b)?))
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got '{s}'"))?;
    Ok(Complex64::new(parse_real(a)?, parse_real(b)?))
}

fn apply_overrides(report: &mut Report, overrides: &[(String, f64)]) -> Result<(), CliError> {
    let unknown = report.override_tolerances(overrides);
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("unknown check in --tol: {}", unknown.join(", "))))
    }
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    to_json_string(value).map_err(|e| CliError::Core(e.into()))
}

/// One line per check, failing ones marked.
pub fn render_table(report: &Report) -> String {
    let mut out = String::new();
    for c in &report.checks {
        out.push_str(&format!(
            "{} {:<34} max {:>10.3e}  mean {:>10.3e}  tol {:>9.2e}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.max,
            c.mean,
            c.tolerance
        ));
    }
    out
}

fn finish(report: &Report, stdout: String) -> Outcome {
    let stderr = report
        .failing()
        .map(|c| format!("failing check: {} (max {:e} > tolerance {:e})", c.name, c.max, c.tolerance))
        .collect();
    Outcome { code: if report.all_pass() { EXIT_PASS } else { EXIT_FAIL }, stdout, stderr }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::List { json } => cmd_list(json),
        Command::Synth(a) => cmd_synth(&RunConfig::from_args("synth", &a)?, &a),
        Command::Verify(a) => cmd_verify(&RunConfig::from_args("verify", &a)?, &a),
        Command::Roundtrip(a) => cmd_roundtrip(&RunConfig::from_args("roundtrip", &a)?, &a),
        Command::Converge(a) => cmd_converge(&RunConfig::from_args("converge", &a)?, &a),
        Command::Recover(a) => cmd_recover(&a),
    }
}

pub fn cmd_list(as_json: bool) -> Result<Outcome, CliError> {
    let reg = registry();
    let stdout = if as_json {
        json(&reg)?
    } else {
        let mut s = String::new();
        for info in &reg {
            let params: Vec<String> = info.params.iter().map(|p| format!("{}∈{} (default {})", p.name, p.range, p.default)).collect();
            s.push_str(&format!("{}\n    {}\n", [info.name.to_string(), params.join(" ")].join(" ").trim_end(), info.description));
        }
        s
    };
    Ok(Outcome { code: EXIT_PASS, stdout, ..Outcome::default() })
}

pub fn cmd_verify(cfg: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let mut report = pipeline::verify(&cfg.setup)?;
    apply_overrides(&mut report, &cfg.tolerance_overrides)?;
    let doc: Document<&RunConfig, ()> = Document::new(cfg, None, report.clone());
    let text = json(&doc)?;
    if let Some(dir) = &args.out {
        write_file(dir, "report.json", text.as_bytes())?;
    }
    Ok(finish(&report, if args.json { text } else { render_table(&report) }))
}

pub fn cmd_synth(cfg: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let setup = &cfg.setup;
    let p = prepare(setup)?;
    let pair = synthesize(&p.sp, &p.omega, Bivector4::ZERO)?;
    let d = differentials(&p.sp, &p.omega);
    let forms = fundamental_forms(&d);
    let mut report = verify_theorem2(&d, &forms, &p.sp, &p.omega, &setup.tolerances());
    report.extend(integration_checks(&pair, p.sp.closure_margin()));
    apply_overrides(&mut report, &cfg.tolerance_overrides)?;

    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let doc = Document::new(cfg, Some(PairFields::from_pair(&pair)), report.clone());
    let mut written = vec![write_file(&dir, "pair.json", json(&doc)?.as_bytes())?];
    let chart = setup.chart;
    for (name, basis, label) in [
        ("fplus.obj", &SELF_DUAL_BASIS, ("F+", &pair.fp)),
        ("fminus.obj", &ANTI_SELF_DUAL_BASIS, ("F-", &pair.fm)),
    ] {
        let mut buf = Vec::new();
        let mut header = vec![label.0];
        header.extend(PAIR_HEADER);
        mesh::write_obj(&mut buf, &chart, &mesh::bivector_field_coords(label.1, basis), &header)
            .map_err(|e| CliError::Core(e.into()))?;
        written.push(write_file(&dir, name, &buf)?);
    }
    let mut warnings = Vec::new();
    match mesh::project_field(&p.sp.x) {
        Some(points) => {
            let mut buf = Vec::new();
            mesh::write_obj(&mut buf, &chart, &points, &["x, stereographic projection from e4"])
                .map_err(|e| CliError::Core(e.into()))?;
            written.push(write_file(&dir, "x.obj", &buf)?);
        }
        None => warnings.push("warning: chart reaches the projection pole; x.obj not written".to_string()),
    }

    let mut stdout = if args.json { json(&Document::<&RunConfig, ()>::new(cfg, None, report.clone()))? } else { render_table(&report) };
    if !args.json {
        for path in &written {
            stdout.push_str(&format!("wrote {}\n", path.display()));
        }
    }
    let mut outcome = finish(&report, stdout);
    outcome.stderr.splice(0..0, warnings);
    Ok(outcome)
}

/// Recovered fields written by `roundtrip --out` and `recover --out`.
#[derive(Serialize)]
struct RecoveredFields<'a> {
    chart: GridChart,
    c: Complex64,
    hodge_swapped: bool,
    x: &'a bonnet_core::charts::Field<bonnet_core::exterior4::Vec4>,
    n: &'a bonnet_core::charts::Field<bonnet_core::exterior4::Vec4>,
    omega: &'a bonnet_core::charts::OneForm<bonnet_core::exterior4::Vec4>,
    dx: &'a bonnet_core::charts::OneForm<bonnet_core::exterior4::Vec4>,
}

/// Summary printed with `--json`.
#[derive(Serialize)]
struct RecoverySummary {
    c: Complex64,
    hodge_swapped: bool,
}

fn recovered_outputs<C: Serialize>(
    config: &C,
    rec: &Recovered,
    report: &Report,
    args_out: &Option<PathBuf>,
    as_json: bool,
) -> Result<Outcome, CliError> {
    if let Some(dir) = args_out {
        let fields = RecoveredFields {
            chart: rec.chart,
            c: rec.c,
            hodge_swapped: rec.hodge_swapped,
            x: &rec.x,
            n: &rec.n,
            omega: &rec.omega,
            dx: &rec.dx,
        };
        write_file(dir, "recovered.json", json(&Document::new(config, Some(fields), report.clone()))?.as_bytes())?;
    }
    let summary = RecoverySummary { c: rec.c, hodge_swapped: rec.hodge_swapped };
    let stdout = if as_json {
        json(&Document::new(config, Some(summary), report.clone()))?
    } else {
        let mut s = render_table(report);
        s.push_str(&format!("recovered c = {:.12} {:+.12}i", rec.c.re, rec.c.im));
        if rec.hodge_swapped {
            s.push_str(" (W- carried the line; pair labels swapped)");
        }
        s.push('\n');
        s
    };
    Ok(finish(report, stdout))
}

pub fn cmd_roundtrip(cfg: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let (_, rec) = pipeline::roundtrip(&cfg.setup)?;
    let mut report = rec.report.clone();
    apply_overrides(&mut report, &cfg.tolerance_overrides)?;
    recovered_outputs(cfg, &rec, &report, &args.out, args.json)
}

#[derive(Serialize)]
struct ConvergenceFields<'a> {
    coarse_grid: GridChart,
    fine_grid: GridChart,
    ratios: &'a [Ratio],
    coarse: &'a Report,
}

pub fn cmd_converge(cfg: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let mut conv = pipeline::converge(&cfg.setup)?;
    apply_overrides(&mut conv.coarse, &cfg.tolerance_overrides)?;
    apply_overrides(&mut conv.fine, &cfg.tolerance_overrides)?;
    let mut checks = conv.ratio_checks();
    checks.extend(conv.fine.clone());
    let fields = ConvergenceFields {
        coarse_grid: cfg.setup.chart,
        fine_grid: cfg.setup.chart.refined(),
        ratios: &conv.ratios,
        coarse: &conv.coarse,
    };
    let text = json(&Document::new(cfg, Some(fields), checks.clone()))?;
    if let Some(dir) = &args.out {
        write_file(dir, "converge.json", text.as_bytes())?;
    }
    let stdout = if args.json {
        text
    } else {
        let mut s = String::new();
        for r in &conv.ratios {
            match r.ratio {
                Some(q) => s.push_str(&format!("{:<28} h {:.3e}  h/2 {:.3e}  ratio {:.3}\n", r.name, r.coarse, r.fine, q)),
                None => s.push_str(&format!("{:<28} h {:.3e}  h/2 {:.3e}  at roundoff\n", r.name, r.coarse, r.fine)),
            }
        }
        s.push_str(&render_table(&checks));
        s
    };
    let mut outcome = finish(&checks, stdout);
    if !conv.coarse.all_pass() {
        outcome.code = EXIT_FAIL;
        outcome.stderr.extend(conv.coarse.failing().map(|c| format!("failing check on the coarse grid: {}", c.name)));
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct RecoverConfig<'a> {
    command: &'static str,
    pair: String,
    source: &'a serde_json::Value,
    tolerance_overrides: &'a [(String, f64)],
}

pub fn cmd_recover(args: &RecoverArgs) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&args.pair).map_err(|source| CliError::Io { path: args.pair.clone(), source })?;
    let doc: Document<serde_json::Value, PairFields> =
        serde_json::from_str(&text).map_err(|e| CliError::Core(e.into()))?;
    let fields = doc.fields.ok_or_else(|| CliError::Usage("pair file has no fields".into()))?;
    let d = fields.differentials()?;

    // A snapshot written by `synth` names its surface; use it as reference.
    let source: Option<RunConfig> = serde_json::from_value(doc.config.clone()).ok();
    let setup = source.as_ref().map(|c| c.setup).filter(|s| s.chart == fields.chart);
    let prepared = setup.as_ref().map(prepare).transpose()?;
    let reference = prepared.as_ref().map(|p| Reference { x: &p.sp.x, n: &p.sp.n, omega: &p.omega });
    let tol = match (&setup, fields.dnp.is_some()) {
        (Some(s), _) => s.tolerances(),
        (None, true) => Tolerances::new(DerivativeMode::Analytic, fields.chart.h()),
        (None, false) => Tolerances::new(DerivativeMode::FiniteDifference, fields.chart.h()),
    };
    let rec = recover_isothermic(&d, reference.as_ref(), &tol)?;
    let mut report = rec.report.clone();
    apply_overrides(&mut report, &args.tol)?;
    let config = RecoverConfig {
        command: "recover",
        pair: args.pair.display().to_string(),
        source: &doc.config,
        tolerance_overrides: &args.tol,
    };
    recovered_outputs(&config, &rec, &report, &args.out, args.json)
}
