//! Batch front end. Every run is described by a [`RunManifest`]; command-line
//! flags either build one or override fields of one loaded with `--manifest`.
//!
//! Exit codes: 0 on success, 1 when a property the run demanded does not
//! hold, 2 on any input error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::comass::{certify, in_oracle_domain, ComassOptions, DEFAULT_ORACLE_RESOLUTION, DEFAULT_RESTARTS};
use crate::error::{Error, Result};
use crate::exterior::text::parse_form;
use crate::exterior::AlternatingForm;
use crate::geometry::{build_link, stationarity_report, LinkFamily, LinkFixture, MinimalProductSpec, SampledLink};
use crate::obstruction::{
    candidate_family, complete_to_basis, decompose_at, dichotomy_sweep, obstruction_witness, FitOptions,
    ObstructionSetup, SweepOptions, Verdict, WitnessOptions,
};
use crate::report::{self, emit_report, Format, Record};

pub const DEFAULT_RESOLUTION: usize = 32;
pub const DEFAULT_FIELDS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Comass,
    Product,
    Stationarity,
    Decompose,
    Obstruct,
    Gallery,
}

/// Where the candidate φₒ of an `obstruct` run comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum CandidateSource {
    File { path: String },
    Random,
    Fitted,
    Sweep { n_random: usize, n_fitted: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub form: Option<String>,
    /// Family names (`circle`, `sphere2`, `torus`, `sl_spheres`,
    /// `latitude:0.5`) or paths to link fixture files.
    #[serde(default)]
    pub factors: Vec<String>,
    pub link: Option<String>,
    pub resolution: Option<usize>,
    pub frame: Option<Vec<Vec<f64>>>,
    pub candidate: Option<CandidateSource>,
    /// 1-based.
    pub varying_factor: Option<usize>,
    /// 1-based.
    pub point_factor: Option<usize>,
    pub n_fields: Option<usize>,
    pub dir: Option<String>,
    #[serde(default)]
    pub check_stationary: bool,
    #[serde(default)]
    pub require_calibration: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub stationarity: Option<f64>,
    pub cal_tol: Option<f64>,
    pub comass_tol: Option<f64>,
    pub restarts: Option<usize>,
    pub oracle_resolution: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: Command,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunManifest {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            inputs: Inputs::default(),
            seed: 0,
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
        }
    }

    /// Parses manifest JSON; errors carry line and column.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Manifest {
            path: path.into(),
            message: format!("line {}, column {}: {e}", e.line(), e.column()),
        })
    }
}

/// The result of a run before rendering.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub records: Vec<Record>,
    /// False when a property demanded by the manifest fails.
    pub ok: bool,
}

#[derive(Parser, Debug)]
#[command(name = "calgeom", about = "Comass, minimal products, stationarity and calibration obstructions")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// JSON run manifest; flags given alongside it take precedence
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// `text` or `records`
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Certified comass of a form file.
    Comass {
        #[arg(long)]
        form: Option<String>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Build a minimal product and optionally check stationarity.
    Product {
        #[arg(long, num_args = 1..)]
        factors: Vec<String>,
        #[command(flatten)]
        link: LinkArgs,
    },
    /// Stationarity battery on one link.
    Stationarity {
        #[arg(long)]
        link: Option<String>,
        #[command(flatten)]
        args: LinkArgs,
    },
    /// Coefficients of a form in the dual basis of a calibrated frame.
    Decompose {
        #[arg(long)]
        form: Option<String>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Obstruction pipeline on a minimal-product cone.
    Obstruct {
        #[arg(long, num_args = 1..)]
        factors: Vec<String>,
        #[arg(long)]
        resolution: Option<usize>,
        /// `random`, `fitted`, `sweep` or a form file.
        #[arg(long)]
        candidate: Option<String>,
        #[arg(long)]
        varying_factor: Option<usize>,
        #[arg(long)]
        require_calibration: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Check every form and link fixture in a directory.
    Gallery {
        #[arg(long)]
        dir: Option<String>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    oracle_resolution: Option<usize>,
}

#[derive(Args, Debug)]
struct LinkArgs {
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    check_stationary: bool,
    #[arg(long)]
    n_fields: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    match s {
        "text" => Ok(Format::Text),
        "records" => Ok(Format::Records),
        _ => Err(format!("unknown format `{s}` (text | records)")),
    }
}

fn set<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

impl SolverArgs {
    fn apply(self, t: &mut Tolerances) {
        set(&mut t.restarts, self.restarts);
        set(&mut t.oracle_resolution, self.oracle_resolution);
    }
}

impl LinkArgs {
    fn apply(self, m: &mut RunManifest) {
        set(&mut m.inputs.resolution, self.resolution);
        set(&mut m.inputs.n_fields, self.n_fields);
        set(&mut m.tolerances.stationarity, self.tolerance);
        m.inputs.check_stationary |= self.check_stationary;
    }
}

fn sub_command(s: &Sub) -> Command {
    match s {
        Sub::Comass { .. } => Command::Comass,
        Sub::Product { .. } => Command::Product,
        Sub::Stationarity { .. } => Command::Stationarity,
        Sub::Decompose { .. } => Command::Decompose,
        Sub::Obstruct { .. } => Command::Obstruct,
        Sub::Gallery { .. } => Command::Gallery,
    }
}

fn candidate_from_flag(s: &str) -> CandidateSource {
    match s {
        "random" => CandidateSource::Random,
        "fitted" => CandidateSource::Fitted,
        "sweep" => CandidateSource::Sweep { n_random: 64, n_fitted: 36 },
        path => CandidateSource::File { path: path.into() },
    }
}

/// Merges flags into the manifest (flags win). Returns the manifest and the
/// directory relative paths resolve against.
fn manifest_from_cli(cli: Cli) -> Result<(RunManifest, PathBuf)> {
    let command = sub_command(&cli.command);
    let (mut m, base) = match &cli.manifest {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Manifest { path: path.display().to_string(), message: e.to_string() })?;
            let m = RunManifest::parse(&text, &path.display().to_string())?;
            if m.command != command {
                return Err(Error::Manifest {
                    path: path.display().to_string(),
                    message: format!("manifest is for `{:?}`, not `{command:?}`", m.command).to_lowercase(),
                });
            }
            (m, path.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (RunManifest::new(command), PathBuf::new()),
    };
    set(&mut m.output.path, cli.output);
    if let Some(f) = cli.format {
        m.output.format = f;
    }
    if let Some(s) = cli.seed {
        m.seed = s;
    }
    match cli.command {
        Sub::Comass { form, solver } | Sub::Decompose { form, solver } => {
            set(&mut m.inputs.form, form);
            solver.apply(&mut m.tolerances);
        }
        Sub::Product { factors, link } => {
            if !factors.is_empty() {
                m.inputs.factors = factors;
            }
            link.apply(&mut m);
        }
        Sub::Stationarity { link, args } => {
            set(&mut m.inputs.link, link);
            args.apply(&mut m);
        }
        Sub::Obstruct { factors, resolution, candidate, varying_factor, require_calibration, solver } => {
            if !factors.is_empty() {
                m.inputs.factors = factors;
            }
            set(&mut m.inputs.resolution, resolution);
            set(&mut m.inputs.candidate, candidate.as_deref().map(candidate_from_flag));
            set(&mut m.inputs.varying_factor, varying_factor);
            m.inputs.require_calibration |= require_calibration;
            solver.apply(&mut m.tolerances);
        }
        Sub::Gallery { dir, solver } => {
            set(&mut m.inputs.dir, dir);
            solver.apply(&mut m.tolerances);
        }
    }
    Ok((m, base))
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = manifest_from_cli(cli).and_then(|(m, base)| {
        let outcome = execute(&m, &base)?;
        let text = emit_report(&outcome.records, m.output.format);
        match &m.output.path {
            Some(p) => fs::write(base_join(&PathBuf::new(), p), text)?,
            None => print!("{text}"),
        }
        Ok(outcome.ok)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn base_join(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

pub fn parse_form_file(path: &Path, dim: Option<usize>) -> Result<AlternatingForm> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Manifest { path: path.display().to_string(), message: e.to_string() })?;
    parse_form(&text, dim).map_err(|e| match e {
        Error::Parse { line, message } => {
            Error::Manifest { path: path.display().to_string(), message: format!("line {line}: {message}") }
        }
        other => other,
    })
}

/// Resolves a factor name or link fixture path.
pub fn resolve_link(spec: &str, resolution: usize, base: &Path) -> Result<SampledLink> {
    let family = match spec {
        "circle" => Some(LinkFamily::Circle),
        "torus" | "product_torus" | "clifford" => Some(LinkFamily::ProductTorus),
        "sl_spheres" => Some(LinkFamily::SlSpheres),
        s if s.starts_with("sphere") && s[6..].parse::<usize>().is_ok() => {
            Some(LinkFamily::Sphere { dim: s[6..].parse().unwrap_or(2) })
        }
        s if s.starts_with("latitude:") => Some(LinkFamily::Latitude {
            height: s[9..].parse().map_err(|_| Error::Precondition(format!("bad latitude `{s}`")))?,
        }),
        _ => None,
    };
    match family {
        Some(f) => build_link(&f, resolution),
        None => load_link_fixture(&base_join(base, spec))?.build(),
    }
}

pub fn load_link_fixture(path: &Path) -> Result<LinkFixture> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Manifest { path: path.display().to_string(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| Error::Manifest {
        path: path.display().to_string(),
        message: format!("line {}, column {}: {e}", e.line(), e.column()),
    })
}

fn required<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Precondition(format!("missing input `{what}`")))
}

fn solver_options(m: &RunManifest) -> ComassOptions {
    ComassOptions { restarts: m.tolerances.restarts.unwrap_or(DEFAULT_RESTARTS), seed: m.seed, ..Default::default() }
}

fn certify_form(phi: &AlternatingForm, m: &RunManifest) -> Result<crate::comass::ComassCertificate> {
    let res = m.tolerances.oracle_resolution.unwrap_or(DEFAULT_ORACLE_RESOLUTION);
    if in_oracle_domain(phi) {
        certify(phi, solver_options(m), res)
    } else {
        crate::comass::comass_with(phi, solver_options(m))
    }
}

/// Executes a manifest without rendering. Relative paths resolve against `base`.
pub fn execute(m: &RunManifest, base: &Path) -> Result<Outcome> {
    let resolution = m.inputs.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let stat_tol = m.tolerances.stationarity.unwrap_or(1e-3);
    let n_fields = m.inputs.n_fields.unwrap_or(DEFAULT_FIELDS);
    match m.command {
        Command::Comass => {
            let phi = parse_form_file(&base_join(base, required(&m.inputs.form, "form")?), None)?;
            let cert = certify_form(&phi, m)?;
            Ok(Outcome { records: report::comass_records(&cert), ok: true })
        }
        Command::Decompose => {
            let phi = parse_form_file(&base_join(base, required(&m.inputs.form, "form")?), None)?;
            let cert = certify_form(&phi, m)?;
            let frame = match &m.inputs.frame {
                Some(f) => f.clone(),
                None => complete_to_basis(
                    cert.maximizers.first().ok_or_else(|| Error::Precondition("no maximizer found".into()))?,
                ),
            };
            // normalize so the calibrated frame sees a comass-1 form
            let rep = decompose_at(&phi.scaled(1.0 / cert.value), &frame)?;
            let head =
                Record::new("form").with("comass", cert.value).with("degree", phi.degree()).with("dim", phi.dim());
            Ok(Outcome { records: vec![head, report::decomposition_record(&rep)], ok: true })
        }
        Command::Product => {
            if m.inputs.factors.is_empty() {
                return Err(Error::Precondition("missing input `factors`".into()));
            }
            let factors =
                m.inputs.factors.iter().map(|f| resolve_link(f, resolution, base)).collect::<Result<Vec<_>>>()?;
            let spec = MinimalProductSpec::new(factors)?;
            let link = spec.build()?;
            let radius_error = link
                .samples()
                .map(|s| (s.point.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs())
                .fold(0.0, f64::max);
            let mut head = Record::new("product")
                .with("factors", m.inputs.factors.join(" "))
                .with("dim", link.dim())
                .with("ambient_dim", link.ambient_dim())
                .with("samples", link.num_samples())
                .with("total_volume", link.total_volume())
                .with("max_radius_error", radius_error);
            for (i, l) in spec.lambdas.iter().enumerate() {
                head = head.with(&format!("lambda_{}", i + 1), *l);
            }
            let mut records = vec![head];
            let mut ok = true;
            if m.inputs.check_stationary {
                let rep = stationarity_report(&link, n_fields, m.seed)?;
                ok = rep.max_abs <= stat_tol;
                records.push(report::stationarity_record(&rep).with("tolerance", stat_tol).with("stationary", ok));
            }
            Ok(Outcome { records, ok })
        }
        Command::Stationarity => {
            let link = resolve_link(required(&m.inputs.link, "link")?, resolution, base)?;
            let rep = stationarity_report(&link, n_fields, m.seed)?;
            let stationary = rep.max_abs <= stat_tol;
            let rec = report::stationarity_record(&rep).with("tolerance", stat_tol).with("stationary", stationary);
            Ok(Outcome { records: vec![rec], ok: stationary || !m.inputs.check_stationary })
        }
        Command::Obstruct => obstruct(m, base, resolution),
        Command::Gallery => gallery(m, base, stat_tol, n_fields),
    }
}

fn obstruct(m: &RunManifest, base: &Path, resolution: usize) -> Result<Outcome> {
    let factors = m.inputs.factors.iter().map(|f| resolve_link(f, resolution, base)).collect::<Result<Vec<_>>>()?;
    if factors.len() < 2 {
        return Err(Error::NotApplicable(format!(
            "{} factor(s); the cone obstruction needs two or more",
            factors.len()
        )));
    }
    let one_based = |v: Option<usize>, what: &str| -> Result<Option<usize>> {
        match v {
            Some(0) => Err(Error::Precondition(format!("{what} is 1-based"))),
            Some(i) => Ok(Some(i - 1)),
            None => Ok(None),
        }
    };
    let opts = WitnessOptions {
        varying_factor: one_based(m.inputs.varying_factor, "varying_factor")?.unwrap_or(0),
        point_factor: one_based(m.inputs.point_factor, "point_factor")?,
        cal_tol: m.tolerances.cal_tol.unwrap_or(1e-3),
        comass_tol: m.tolerances.comass_tol.unwrap_or(1e-6),
        comass_restarts: m.tolerances.restarts.unwrap_or(12),
        seed: m.seed,
        ..Default::default()
    };
    let setup = ObstructionSetup::new(MinimalProductSpec::new(factors)?, opts)?;
    let fit = FitOptions::default();
    let candidate = m.inputs.candidate.clone().unwrap_or(CandidateSource::Fitted);
    let phi = match candidate {
        CandidateSource::Sweep { n_random, n_fitted } => {
            let sweep = SweepOptions { n_random, n_fitted, seed: m.seed, fit, calibrating_tol: setup.options.cal_tol };
            let summary = dichotomy_sweep(&setup, sweep)?;
            let holds = summary.violations == 0 && summary.calibrating_with_large_integral == summary.calibrating;
            let mut records = report::dichotomy_records(&summary);
            records[0] = records[0].clone().with("dichotomy_holds", holds);
            let ok = !m.inputs.require_calibration || summary.calibrating > 0;
            return Ok(Outcome { records, ok });
        }
        CandidateSource::File { path } => parse_form_file(&base_join(base, &path), Some(setup.ambient_dim()))?,
        CandidateSource::Random => candidate_family(&setup, 1, 0, m.seed, fit)?.remove(0).1,
        CandidateSource::Fitted => candidate_family(&setup, 0, 1, m.seed, fit)?.remove(0).1,
    };
    let rep = obstruction_witness(&setup, &phi)?;
    let ok = !m.inputs.require_calibration || rep.verdict != Verdict::CandidateNotACalibration;
    Ok(Outcome { records: vec![report::obstruction_record(&rep)], ok })
}

/// Certifies every `*.form` file (expected comass 1) and runs the
/// stationarity battery and volume check on every link fixture.
fn gallery(m: &RunManifest, base: &Path, stat_tol: f64, n_fields: usize) -> Result<Outcome> {
    let dir = base_join(base, m.inputs.dir.as_deref().unwrap_or("fixtures"));
    let mut entries: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| Error::Manifest { path: dir.display().to_string(), message: e.to_string() })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    let mut records = Vec::new();
    let mut ok = true;
    for path in entries {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        match path.extension().and_then(|e| e.to_str()) {
            Some("form") => {
                let phi = parse_form_file(&path, None)?;
                let cert = certify_form(&phi, m)?;
                let pass = (cert.value - 1.0).abs() <= 1e-3;
                ok &= pass;
                records.push(
                    Record::new("form")
                        .with("file", name)
                        .with("comass", cert.value)
                        .with("method", cert.method.as_str())
                        .with("maximizers", cert.maximizers.len())
                        .with("pass", pass),
                );
            }
            Some("json") => {
                let text = fs::read_to_string(&path)?;
                let is_link = serde_json::from_str::<serde_json::Value>(&text)
                    .map(|v| v.get("family").is_some())
                    .unwrap_or(false);
                if !is_link {
                    continue;
                }
                let fixture = load_link_fixture(&path)?;
                let link = fixture.build()?;
                let rep = stationarity_report(&link, n_fields, m.seed)?;
                let volume_ok = match (fixture.volume, fixture.volume_tolerance) {
                    (Some(v), Some(t)) => (link.total_volume() - v).abs() <= t,
                    _ => true,
                };
                let pass = rep.max_abs <= stat_tol && volume_ok;
                ok &= pass;
                records.push(
                    Record::new("link")
                        .with("file", name)
                        .with("dim", link.dim())
                        .with("samples", link.num_samples())
                        .with("total_volume", link.total_volume())
                        .with("max_abs", rep.max_abs)
                        .with("volume_ok", volume_ok)
                        .with("pass", pass),
                );
            }
            _ => {}
        }
    }
    Ok(Outcome { records, ok })
}
