//! Command-line front end behind the `tqft-volume` binary.
//!
//! Settings come from three layers: built-in defaults, an optional `--config` file of
//! `key = value` lines (TOML syntax), and flags. Flags win. `TQFT_THREADS` caps the worker pool.
//!
//! Exit codes: 0 on success, 1 on a numerical failure or a failed tolerance (a diagnostic JSON
//! object goes to stderr), 2 on invalid flags or configuration.

pub mod pipeline;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::angle_opt::OptimizerConfig;
use crate::integrator::{integrate_jx_2d, integrate_jx_3d, sweep_volume_limit, ContourSpec, GridConfig, Method};
use crate::specfun::{
    bloch_wigner, dilog, faddeev, lobachevsky, log_faddeev, semiclassical_log_faddeev, CouplingConstant,
    PrecisionConfig,
};
use crate::triangulation::{builtin_h_73, builtin_ideal_73, Triangulation};
use crate::{Error, Result, C64};

pub const DEFAULT_SWEEP: [f64; 5] = [0.5, 0.42, 0.35, 0.3, 0.25];

#[derive(Parser, Debug)]
#[command(name = "tqft-volume", version, about = "State-integral numerics for the knot 7_3")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// File of `key = value` settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub builtin: Option<Builtin>,
    /// Triangulation JSON file, used instead of a builtin.
    #[arg(long, global = true)]
    pub triangulation: Option<PathBuf>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub contour_truncation: Option<f64>,
    #[arg(long, global = true)]
    pub quad_points: Option<usize>,
    #[arg(long, global = true)]
    pub h0: Option<f64>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_halvings: Option<usize>,
    #[arg(long, global = true)]
    pub cut: Option<f64>,
    #[arg(long, global = true)]
    pub grad_tol: Option<f64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Evaluate one special function.
    Specfun(SpecfunArgs),
    /// Maximise the volume functional.
    Angles,
    /// Solve the gluing equations from the volume maximiser.
    Gluing,
    /// Roots of the reduced saddle equation and their classification.
    Saddle(SaddleArgs),
    /// Contour quadrature of the state integral.
    #[command(subcommand)]
    Integrate(IntegrateCommand),
    /// Contour invariance, H-triangulation modulus and saddle estimate at given b.
    Crosscheck(CrosscheckArgs),
    /// Every stage in order, with all numerical targets checked.
    Full(FullArgs),
}

#[derive(Args, Debug)]
pub struct SpecfunArgs {
    #[arg(long = "fn", value_enum)]
    pub func: SpecialFn,
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    /// Imaginary part of the argument.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub y: f64,
    #[arg(long)]
    pub b: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SaddleArgs {
    /// 1-based index into the roots sorted by (Re, Im); all roots if absent.
    #[arg(long)]
    pub t_index: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum IntegrateCommand {
    /// `J` at a single b.
    Single {
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        method: Option<Method>,
    },
    /// `2πħ log|J|` over a decreasing list of b and its extrapolation.
    Sweep {
        #[arg(long, value_delimiter = ',')]
        b: Option<Vec<f64>>,
        #[arg(long)]
        method: Option<Method>,
        /// Also emit JSON (next to `--out`, or on stdout without it).
        #[arg(long)]
        json: bool,
        /// Fail if a row's relative error bound exceeds this.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args, Debug)]
pub struct CrosscheckArgs {
    #[arg(long, value_delimiter = ',')]
    pub b: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct FullArgs {
    /// Sweep values of b.
    #[arg(long, value_delimiter = ',')]
    pub b: Option<Vec<f64>>,
    #[arg(long)]
    pub method: Option<Method>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    Ideal73,
    H73,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialFn {
    Dilog,
    BlochWigner,
    Lobachevsky,
    Faddeev,
    LogFaddeev,
    Semiclassical,
}

impl clap::ValueEnum for Method {
    fn value_variants<'a>() -> &'a [Self] {
        &[Method::TwoDim, Method::ThreeDim]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Method::TwoDim => "2d",
            Method::ThreeDim => "3d",
        }))
    }
}

/// A single number or a list, as accepted for `b` in config files.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    out: Option<PathBuf>,
    format: Option<Format>,
    builtin: Option<Builtin>,
    triangulation: Option<PathBuf>,
    abs_tol: Option<f64>,
    contour_truncation: Option<f64>,
    quad_points: Option<usize>,
    h0: Option<f64>,
    rel_tol: Option<f64>,
    max_halvings: Option<usize>,
    cut: Option<f64>,
    grad_tol: Option<f64>,
    threads: Option<usize>,
    b: Option<OneOrMany>,
    method: Option<Method>,
    tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Builtin(Builtin),
    File(PathBuf),
}

/// A fully resolved command.
#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Specfun {
        func: SpecialFn,
        z: C64,
        b: f64,
    },
    Angles,
    Gluing,
    Saddle {
        t_index: Option<usize>,
    },
    Integrate {
        b: f64,
        method: Method,
    },
    Sweep {
        b: Vec<f64>,
        method: Method,
        tol: f64,
        json: bool,
    },
    Crosscheck {
        b: Vec<f64>,
    },
    Full {
        b: Vec<f64>,
        method: Method,
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Specfun { .. } => "specfun",
            Task::Angles => "angles",
            Task::Gluing => "gluing",
            Task::Saddle { .. } => "saddle",
            Task::Integrate { .. } | Task::Sweep { .. } => "integrate",
            Task::Crosscheck { .. } => "crosscheck",
            Task::Full { .. } => "full",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub precision: PrecisionConfig,
    pub grid: GridConfig,
    pub optimizer: OptimizerConfig,
    pub source: Source,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Merge defaults, the config file and the flags, and validate the result.
    pub fn resolve(cli: Cli) -> Result<Self> {
        let file = match &cli.common.config {
            Some(p) => read_config(p)?,
            None => FileConfig::default(),
        };
        let c = cli.common;
        let mut precision = PrecisionConfig::default();
        set(&mut precision.abs_tol, c.abs_tol.or(file.abs_tol));
        set(
            &mut precision.contour_truncation,
            c.contour_truncation.or(file.contour_truncation),
        );
        set(&mut precision.quad_points, c.quad_points.or(file.quad_points));
        precision.validate()?;
        let mut grid = GridConfig::default();
        set(&mut grid.h0, c.h0.or(file.h0));
        set(&mut grid.rel_tol, c.rel_tol.or(file.rel_tol));
        set(&mut grid.max_halvings, c.max_halvings.or(file.max_halvings));
        set(&mut grid.cut, c.cut.or(file.cut));
        grid.validate()?;
        let mut optimizer = OptimizerConfig::default();
        set(&mut optimizer.grad_tol, c.grad_tol.or(file.grad_tol));
        if !(optimizer.grad_tol > 0.0) {
            return Err(Error::Config("grad_tol must be positive".into()));
        }

        let source = match (c.triangulation.or(file.triangulation), c.builtin.or(file.builtin)) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either --builtin or --triangulation, not both".into(),
                ))
            }
            (Some(p), None) => Source::File(p),
            (None, b) => Source::Builtin(b.unwrap_or(Builtin::Ideal73)),
        };
        let file_b = file.b.map(OneOrMany::into_vec);
        let single_b = |flag: Option<f64>| -> Result<f64> {
            match (flag, &file_b) {
                (Some(b), _) => Ok(b),
                (None, Some(v)) if v.len() == 1 => Ok(v[0]),
                (None, Some(v)) => Err(Error::Config(format!("expected one value of b, got {v:?}"))),
                (None, None) => Ok(0.5),
            }
        };
        let list_b =
            |flag: Option<Vec<f64>>, default: &[f64]| flag.or(file_b.clone()).unwrap_or_else(|| default.to_vec());
        let method = file.method;
        let task = match cli.command {
            CliCommand::Specfun(a) => {
                let b = if a.b.is_some() || file_b.is_some() {
                    single_b(a.b)?
                } else {
                    1.0
                };
                Task::Specfun {
                    func: a.func,
                    z: C64::new(a.x, a.y),
                    b,
                }
            }
            CliCommand::Angles => Task::Angles,
            CliCommand::Gluing => Task::Gluing,
            CliCommand::Saddle(a) => Task::Saddle { t_index: a.t_index },
            CliCommand::Integrate(IntegrateCommand::Single { b, method: m }) => Task::Integrate {
                b: single_b(b)?,
                method: m.or(method).unwrap_or(Method::ThreeDim),
            },
            CliCommand::Integrate(IntegrateCommand::Sweep {
                b,
                method: m,
                json,
                tol,
            }) => Task::Sweep {
                b: list_b(b, &DEFAULT_SWEEP),
                method: m.or(method).unwrap_or(Method::ThreeDim),
                tol: tol.or(file.tol).unwrap_or(10.0 * grid.rel_tol),
                json,
            },
            CliCommand::Crosscheck(a) => Task::Crosscheck { b: list_b(a.b, &[0.5]) },
            CliCommand::Full(a) => Task::Full {
                b: list_b(a.b, &DEFAULT_SWEEP),
                method: a.method.or(method).unwrap_or(Method::ThreeDim),
            },
        };
        let format = c.format.or(file.format).unwrap_or(Format::Json);
        if format == Format::Csv && !matches!(task, Task::Sweep { .. } | Task::Saddle { t_index: None }) {
            return Err(Error::Config(format!("{} has no CSV form", task.name())));
        }
        Ok(Self {
            task,
            precision,
            grid,
            optimizer,
            source,
            out: c.out.or(file.out),
            format,
            threads: c.threads.or(file.threads),
        })
    }

    pub fn triangulation(&self) -> Result<Triangulation> {
        match &self.source {
            Source::Builtin(Builtin::Ideal73) => Ok(builtin_ideal_73()),
            Source::Builtin(Builtin::H73) => Ok(builtin_h_73()),
            Source::File(p) => Triangulation::from_file(p),
        }
    }

    /// Worker count: the configured value (or all cores), capped by `TQFT_THREADS`.
    pub fn worker_count(&self) -> Result<usize> {
        let cap = match std::env::var("TQFT_THREADS") {
            Ok(s) => Some(
                s.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| Error::Config(format!("TQFT_THREADS must be a positive integer, got {s:?}")))?,
            ),
            Err(_) => None,
        };
        let n = self
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if n == 0 {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(cap.map_or(n, |c| n.min(c)))
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn read_config(p: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
}

/// What a command produced. `ok` is false when a tolerance was missed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    /// JSON copy written next to the main output.
    pub mirror: Option<String>,
    pub ok: bool,
    pub diagnostic: Option<serde_json::Value>,
}

impl Report {
    fn json<T: Serialize>(v: &T) -> Result<Self> {
        Ok(Self {
            body: to_json(v)?,
            mirror: None,
            ok: true,
            diagnostic: None,
        })
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Execute a resolved configuration.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    use serde_json::json;
    let (prec, grid) = (&cfg.precision, &cfg.grid);
    match &cfg.task {
        Task::Specfun { func, z, b } => {
            let cc = CouplingConstant::new(*b)?;
            let real = |v: f64| json!(v + 0.0);
            let value = match func {
                SpecialFn::Dilog => json!(dilog(*z)?),
                SpecialFn::BlochWigner => real(bloch_wigner(*z)),
                SpecialFn::Lobachevsky => {
                    if z.im != 0.0 {
                        return Err(Error::Config("lobachevsky takes a real argument".into()));
                    }
                    real(lobachevsky(z.re))
                }
                SpecialFn::Faddeev => json!(faddeev(*z, cc)?),
                SpecialFn::LogFaddeev => json!(log_faddeev(*z, cc)?),
                SpecialFn::Semiclassical => json!(semiclassical_log_faddeev(*z, cc)?),
            };
            let uses_b = matches!(
                func,
                SpecialFn::Faddeev | SpecialFn::LogFaddeev | SpecialFn::Semiclassical
            );
            let mut out = json!({ "fn": func, "x": z.re, "y": z.im, "value": value });
            if uses_b {
                out["b"] = json!(b);
            }
            Report::json(&out)
        }
        Task::Angles => {
            let v = pipeline::angles(&cfg.triangulation()?, &cfg.optimizer)?;
            Report::json(&pipeline::AnglesReport::from(&v))
        }
        Task::Gluing => {
            let (_, r) = pipeline::gluing(&cfg.triangulation()?, &cfg.optimizer)?;
            Report::json(&r)
        }
        Task::Saddle { t_index } => {
            let rows = pipeline::root_table();
            match t_index {
                Some(k) => {
                    let row = rows
                        .get(k.wrapping_sub(1))
                        .ok_or_else(|| Error::Config(format!("t-index must be in 1..={}", rows.len())))?;
                    if row.classification.is_none() {
                        return Err(Error::Domain(format!("no stationary point of V has e^x = t{k}")));
                    }
                    Report::json(row)
                }
                None if cfg.format == Format::Csv => Ok(Report {
                    body: pipeline::root_csv(&rows),
                    mirror: None,
                    ok: true,
                    diagnostic: None,
                }),
                None => Report::json(&rows),
            }
        }
        Task::Integrate { b, method } => {
            let cc = CouplingConstant::new(*b)?;
            let t = cfg.triangulation()?;
            let alpha = pipeline::angles(&t, &cfg.optimizer)?.alpha;
            let r = match method {
                Method::ThreeDim => integrate_jx_3d(cc, &ContourSpec::three_dim(&alpha, cc)?, prec, grid)?,
                Method::TwoDim => integrate_jx_2d(cc, &ContourSpec::two_dim(&alpha, cc)?, prec, grid)?,
            };
            Report::json(&json!({
                "b": b,
                "hbar": cc.hbar,
                "method": method,
                "value": r.value(),
                "volume_estimate": 2.0 * std::f64::consts::PI * cc.hbar * r.log_abs(),
                "quadrature": r,
            }))
        }
        Task::Sweep {
            b,
            method,
            tol,
            json: mirror,
        } => {
            let alpha = pipeline::angles(&cfg.triangulation()?, &cfg.optimizer)?.alpha;
            let table = sweep_volume_limit(b, *method, &alpha, prec, grid)?;
            let bad: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| !(r.err_bound <= *tol))
                .map(|r| r.b)
                .collect();
            let as_json = to_json(&table)?;
            let (body, mirror) = match (cfg.format, *mirror, cfg.out.is_some()) {
                (Format::Json, _, _) => (as_json, None),
                (Format::Csv, true, true) => (pipeline::sweep_csv(&table), Some(as_json)),
                (Format::Csv, true, false) => (as_json, None),
                (Format::Csv, false, _) => (pipeline::sweep_csv(&table), None),
            };
            Ok(Report {
                body,
                mirror,
                ok: bad.is_empty(),
                diagnostic: (!bad.is_empty())
                    .then(|| json!({"status": "tolerance", "message": format!("error bound above {tol}"), "b": bad})),
            })
        }
        Task::Crosscheck { b } => {
            let (v, rep) = pipeline::gluing(&builtin_ideal_73(), &cfg.optimizer)?;
            let out = b
                .iter()
                .map(|&b| pipeline::crosscheck(b, &v.alpha, &rep, prec, grid))
                .collect::<Result<Vec<_>>>()?;
            Report::json(&out)
        }
        Task::Full { b, method } => {
            let s = pipeline::full(
                &cfg.triangulation()?,
                &cfg.optimizer,
                prec,
                grid,
                b,
                *method,
                &[0.5, 0.4],
            )?;
            let failed: Vec<&str> = s.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            let diagnostic = (!failed.is_empty())
                .then(|| json!({"status": "tolerance", "message": "acceptance targets missed", "checks": failed}));
            Ok(Report {
                body: to_json(&s)?,
                mirror: None,
                ok: s.pass,
                diagnostic,
            })
        }
    }
}

fn write_outputs(cfg: &RunConfig, r: &Report) -> Result<()> {
    match &cfg.out {
        Some(p) => {
            std::fs::write(p, &r.body)?;
            if let Some(m) = &r.mirror {
                std::fs::write(p.with_extension("json"), m)?;
            }
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(r.body.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}

fn diagnostic(command: &str, e: &Error) -> String {
    serde_json::json!({"status": "error", "command": command, "kind": e.kind(), "message": e.to_string()}).to_string()
}

/// Parse `args`, run, write outputs, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = match RunConfig::resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", diagnostic("config", &e));
            return 2;
        }
    };
    let pool = match cfg.worker_count().and_then(|n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))
    }) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}", diagnostic("config", &e));
            return 2;
        }
    };
    let name = cfg.task.name();
    match pool
        .install(|| run(&cfg))
        .and_then(|r| write_outputs(&cfg, &r).map(|_| r))
    {
        Ok(r) => {
            if let Some(d) = &r.diagnostic {
                eprintln!("{d}");
            }
            if r.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{}", diagnostic(name, &e));
            if matches!(e, Error::Config(_)) {
                2
            } else {
                1
            }
        }
    }
}
