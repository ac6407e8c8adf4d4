//! Batch front end: a TOML scenario in, CSV/JSON artifacts out.
//!
//! Exit codes: 0 success, 2 validation error, 3 solver error. The first line
//! of every output file is `# piezostab <version> config=<hash> seed=<seed>`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{
    certify, default_window, fit_exponential, fit_polynomial, polynomial_window, resolvent_sweep, AnalysisError,
    FitReport, LambdaRange, SweepReport,
};
use crate::dynamics::{simulate, write_snapshot, DynamicsError, InitialData, Scenario};
use crate::generator::{
    lemma_constants, oracle_case, random_state, resolvent_solve, stationary_solve, verify_lemma_bounds,
    DampingCase, GeneratorError, GeneratorMatrix, ResolventOptions, SmoothLoad,
};
use crate::kernel::{build_quadrature, check_admissibility, default_s_max, KernelError, MemoryKernel};
use crate::linalg::SolveError;
use crate::params::PhysicalParams;
use crate::state::FirstOrderState;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("solver error: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<GeneratorError> for CliError {
    fn from(e: GeneratorError) -> Self {
        match e {
            GeneratorError::Solve(_) | GeneratorError::SingularAt { .. } => CliError::Solver(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::SolverSingular { .. } => CliError::Solver(e.to_string()),
            DynamicsError::Generator(g) => g.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        CliError::Validation(format!("[kernel] {e}"))
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Solver(e.to_string())
    }
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Validation(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    /// `exponential`, `algebraic` or `samples`.
    pub name: String,
    pub g0: f64,
    pub delta: f64,
    /// Two-column `(s, σ)` table for `samples`, relative to the config file.
    pub file: Option<PathBuf>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { name: "exponential".into(), g0: 1.0, delta: 2.0, file: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_s")]
    pub n_ages: usize,
    #[serde(rename = "S_max")]
    pub s_max: Option<f64>,
    pub grading: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 200, n_ages: 64, s_max: None, grading: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub dt: f64,
    #[serde(rename = "T_end")]
    pub t_end: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_end: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub record_every: usize,
    /// Snapshot stride in steps; 0 disables snapshots.
    pub snapshot_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, record_every: 1, snapshot_every: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub lambda: String,
    pub max_iter: usize,
    pub rel_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let o = ResolventOptions::default();
        Self { lambda: "log:1:1000:30".into(), max_iter: o.max_iter, rel_tol: o.rel_tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub case: u8,
    pub resolutions: Vec<usize>,
    /// `manufactured` or `zero`.
    pub load: String,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { case: 4, resolutions: vec![50, 100, 200], load: "manufactured".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaConfig {
    pub samples: usize,
    pub lambdas: Vec<f64>,
    pub tol: f64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self { samples: 20, lambdas: vec![1.0, 10.0, 100.0], tol: 1e-2 }
    }
}

/// A full scenario configuration. Every section and key is optional and
/// falls back to the documented default scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub params: BTreeMap<String, f64>,
    pub kernel: KernelConfig,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub initial: InitialData,
    pub outputs: OutputConfig,
    pub sweep: SweepConfig,
    pub oracle: OracleConfig,
    pub lemma: LemmaConfig,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            params: PhysicalParams::<f64>::unit().with_memory(0.5).to_map(),
            kernel: KernelConfig::default(),
            grid: GridConfig::default(),
            time: TimeConfig::default(),
            initial: InitialData::default(),
            outputs: OutputConfig::default(),
            sweep: SweepConfig::default(),
            oracle: OracleConfig::default(),
            lemma: LemmaConfig::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

impl Config {
    /// Parses TOML; parameters not given keep their default values.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let mut cfg: Config = toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        let mut params = Config::default().params;
        params.append(&mut cfg.params);
        cfg.params = params;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Canonical TOML of the resolved configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical form, hex, first 16 characters.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Seed derived from the hash.
    pub fn seed(&self) -> u64 {
        u64::from_str_radix(&self.hash(), 16).expect("hex hash")
    }

    pub fn physical_params(&self) -> Result<PhysicalParams<f64>, CliError> {
        PhysicalParams::validate(&self.params).map_err(|e| CliError::Validation(format!("[params] {e}")))
    }

    pub fn memory_kernel(&self) -> Result<MemoryKernel<f64>, CliError> {
        match self.kernel.name.as_str() {
            "exponential" => Ok(MemoryKernel::exponential(self.kernel.g0, self.kernel.delta)?),
            "algebraic" => Ok(MemoryKernel::algebraic()),
            "samples" => {
                let file = self
                    .kernel
                    .file
                    .as_ref()
                    .ok_or_else(|| CliError::Validation("[kernel] `file` is required for samples".into()))?;
                let path = self.base_dir.join(file);
                let text = fs::read_to_string(&path).map_err(io_err(&path))?;
                Ok(MemoryKernel::from_samples_text(&text)?)
            }
            other => Err(CliError::Validation(format!(
                "[kernel] unknown `name` = {other:?} (expected exponential, algebraic or samples)"
            ))),
        }
    }

    /// Validates every block and builds the run description. A kernel that
    /// fails the admissibility checks is rejected whenever memory is active.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let params = self.physical_params()?;
        let kernel = self.memory_kernel()?;
        let g = &self.grid;
        if g.n < 2 {
            return Err(CliError::Validation("[grid] `N` must be at least 2".into()));
        }
        if g.n_ages < 2 {
            return Err(CliError::Validation("[grid] `N_s` must be at least 2".into()));
        }
        if let Some(s) = g.s_max {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CliError::Validation("[grid] `S_max` must be positive".into()));
            }
        }
        if let Some(r) = g.grading {
            if !(r >= 1.0 && r.is_finite()) {
                return Err(CliError::Validation("[grid] `grading` must be >= 1".into()));
            }
        }
        let t = &self.time;
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            return Err(CliError::Validation("[time] `dt` must be positive".into()));
        }
        if !(t.t_end >= 0.0 && t.t_end.is_finite()) {
            return Err(CliError::Validation("[time] `T_end` must be nonnegative".into()));
        }
        if params.m > 0.0 {
            let s_max = g.s_max.unwrap_or_else(|| default_s_max(&kernel));
            let probe = build_quadrature(&kernel, g.n_ages, s_max)?;
            let report = check_admissibility(&kernel, &probe);
            if !report.passed() {
                return Err(CliError::Validation(format!(
                    "[kernel] {} fails admissibility (mass {}, monotone {}, dafermos {})",
                    kernel.label, report.mass_ok, report.monotone_ok, report.dafermos_ok
                )));
            }
        }
        Ok(Scenario {
            params,
            kernel,
            n: g.n,
            n_ages: g.n_ages,
            s_max: g.s_max,
            grading: g.grading,
            dt: t.dt,
            t_end: t.t_end,
            initial: self.initial,
            record_every: self.outputs.record_every.max(1),
            snapshot_every: (self.outputs.snapshot_every > 0).then_some(self.outputs.snapshot_every),
        })
    }
}

/// Run context shared by every verb.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: Config,
    pub out: PathBuf,
    pub seed: u64,
}

impl Context {
    pub fn new(config: Config, out: Option<PathBuf>, seed_override: Option<u64>) -> Self {
        let out = out
            .or_else(|| config.outputs.dir.as_ref().map(|d| config.base_dir.join(d)))
            .unwrap_or_else(|| PathBuf::from("out"));
        let seed = seed_override.unwrap_or_else(|| config.seed());
        Self { config, out, seed }
    }

    pub fn header(&self) -> String {
        format!("piezostab {VERSION} config={} seed={}", self.config.hash(), self.seed)
    }

    fn create(&self, name: &str) -> Result<(PathBuf, BufWriter<fs::File>), CliError> {
        fs::create_dir_all(&self.out).map_err(io_err(&self.out))?;
        let path = self.out.join(name);
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        Ok((path, BufWriter::new(file)))
    }

    fn write_text(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let (path, mut f) = self.create(name)?;
        writeln!(f, "# {}", self.header()).and_then(|_| f.write_all(body.as_bytes())).map_err(io_err(&path))?;
        f.flush().map_err(io_err(&path))?;
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let body = serde_json::to_string_pretty(value).expect("serializable") + "\n";
        self.write_text(name, &body)
    }

    fn resolvent_options(&self) -> ResolventOptions {
        ResolventOptions { max_iter: self.config.sweep.max_iter, rel_tol: self.config.sweep.rel_tol, seed: self.seed }
    }
}

pub fn cmd_simulate(ctx: &Context) -> Result<PathBuf, CliError> {
    let scenario = ctx.config.scenario()?;
    let traj = simulate(&scenario)?;
    let (path, mut f) = ctx.create("trajectory.csv")?;
    traj.write_csv(&mut f, &ctx.header()).map_err(io_err(&path))?;
    f.flush().map_err(io_err(&path))?;
    if !traj.snapshots.is_empty() {
        let gen = scenario.generator()?;
        for (i, (t, u)) in traj.snapshots.iter().enumerate() {
            write_snapshot(&ctx.out, i, *t, u, &gen, &ctx.header()).map_err(io_err(&ctx.out))?;
        }
    }
    ctx.write_json("summary.json", &traj.summary())?;
    Ok(path)
}

fn sweep_csv(report: &SweepReport) -> String {
    let mut s = String::from("lambda,norm,scaled\n");
    for x in &report.samples {
        s += &format!("{:.12e},{:.12e},{:.12e}\n", x.lambda, x.norm, x.scaled);
    }
    s
}

fn run_sweep(ctx: &Context, range: &LambdaRange) -> Result<SweepReport, CliError> {
    let gen = ctx.config.scenario()?.generator()?;
    let samples = resolvent_sweep(&gen, &range.values(), &ctx.resolvent_options())?;
    for s in samples.iter().filter(|s| s.error.is_some() || !s.converged) {
        eprintln!(
            "warning: lambda = {}: {}",
            s.lambda,
            s.error.clone().unwrap_or_else(|| "norm estimate not converged".into())
        );
    }
    Ok(SweepReport { config_hash: ctx.config.hash(), samples })
}

pub fn cmd_sweep(ctx: &Context, lambda: Option<&str>) -> Result<PathBuf, CliError> {
    let range: LambdaRange = lambda.unwrap_or(&ctx.config.sweep.lambda).parse()?;
    let report = run_sweep(ctx, &range)?;
    ctx.write_text("sweep.csv", &sweep_csv(&report))
}

pub fn cmd_certify(ctx: &Context) -> Result<PathBuf, CliError> {
    let scenario = ctx.config.scenario()?;
    let range: LambdaRange = ctx.config.sweep.lambda.parse()?;
    let traj = simulate(&scenario)?;
    let totals = traj.totals();
    let exponential = fit_exponential(&traj.times, &totals, default_window(&traj.times))?;
    let polynomial = if scenario.params.m == 1.0 {
        Some(fit_polynomial(&traj.times, &totals, polynomial_window(&traj.times))?)
    } else {
        None
    };
    let fits = FitReport { config_hash: ctx.config.hash(), exponential, polynomial };
    let sweep = run_sweep(ctx, &range)?;
    let verdict = certify(&scenario.params, &sweep, &fits)?;
    let (path, mut f) = ctx.create("trajectory.csv")?;
    traj.write_csv(&mut f, &ctx.header()).map_err(io_err(&path))?;
    f.flush().map_err(io_err(&path))?;
    ctx.write_text("sweep.csv", &sweep_csv(&sweep))?;
    ctx.write_json("verdict.json", &verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRow {
    pub n: usize,
    pub h: f64,
    /// `L²` distance between the discrete solve and the oracle.
    pub error: f64,
    /// `log(e_prev/e)/log(h_prev/h)`; `None` on the first row or when an
    /// error vanishes.
    pub order: Option<f64>,
    pub residual: f64,
}

/// Grid `L²` norm of every field plus the `σ`-weighted `L²` norm of the
/// history values.
pub fn l2_norm(gen: &GeneratorMatrix<f64>, u: &FirstOrderState<f64>) -> f64 {
    let sq = |a: &[f64]| a.iter().map(|x| x * x).sum::<f64>();
    let mut total = sq(&u.v) + sq(&u.z) + sq(&u.u1) + sq(&u.u2) + sq(&u.u3) + sq(&u.w);
    if let Some(q) = &gen.quad {
        total += (0..q.n_ages()).map(|j| q.w(j) * sq(u.kappa.column(j))).sum::<f64>();
    }
    (total * gen.grid.h).sqrt()
}

/// Stationary solves against the closed-form solution across resolutions.
pub fn oracle_table(config: &Config, case: u8, resolutions: &[usize]) -> Result<Vec<OracleRow>, CliError> {
    let case = DampingCase::from_index(case)
        .ok_or_else(|| CliError::Validation(format!("oracle case must be 1, 2, 3 or 4 (got {case})")))?;
    if resolutions.is_empty() {
        return Err(CliError::Validation("[oracle] `resolutions` is empty".into()));
    }
    let base = config.scenario()?;
    let load = match config.oracle.load.as_str() {
        "manufactured" => SmoothLoad::manufactured(base.params.length),
        "zero" => SmoothLoad::zero(),
        other => return Err(CliError::Validation(format!("[oracle] unknown `load` = {other:?}"))),
    };
    let mut rows: Vec<OracleRow> = Vec::new();
    for &n in resolutions {
        let gen = Scenario { n, ..base.clone() }.generator()?;
        let exact = oracle_case(case, &load, &gen)?;
        let f = load.sample(&gen);
        let sol = stationary_solve(&gen, &f)?;
        let mut diff = sol.state.clone();
        diff.axpy(-1.0, &exact);
        let error = l2_norm(&gen, &diff);
        let order = rows.last().and_then(|prev| {
            (prev.error > 0.0 && error > 0.0).then(|| (prev.error / error).ln() / (prev.h / gen.grid.h).ln())
        });
        rows.push(OracleRow { n, h: gen.grid.h, error, order, residual: sol.residual });
    }
    Ok(rows)
}

pub fn cmd_oracle_check(ctx: &Context, case: Option<u8>, resolutions: Option<&[usize]>) -> Result<PathBuf, CliError> {
    let case = case.unwrap_or(ctx.config.oracle.case);
    let rows = oracle_table(&ctx.config, case, resolutions.unwrap_or(&ctx.config.oracle.resolutions))?;
    let mut s = String::from("N,h,error,order,residual\n");
    for r in &rows {
        let order = r.order.map_or(String::new(), |o| format!("{o:.6}"));
        s += &format!("{},{:.12e},{:.12e},{order},{:.3e}\n", r.n, r.h, r.error, r.residual);
    }
    ctx.write_text(&format!("oracle_case{case}.csv"), &s)
}

pub fn cmd_lemma_check(ctx: &Context) -> Result<PathBuf, CliError> {
    let scenario = ctx.config.scenario()?;
    let lemma = &ctx.config.lemma;
    if lemma.lambdas.iter().any(|l| !l.is_finite() || *l == 0.0) {
        return Err(CliError::Validation("[lemma] `lambdas` must be finite and nonzero".into()));
    }
    let constants = lemma_constants(&scenario.params, &scenario.kernel)?;
    let gen = scenario.generator()?;
    let mut s = String::from("lambda,sample,bound,lhs,rhs,margin,holds\n");
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    for &lambda in &lemma.lambdas {
        for k in 0..lemma.samples {
            let f = random_state(&gen, ctx.seed.wrapping_add(k as u64)).to_complex();
            let u = resolvent_solve(&gen, lambda, &f)?;
            for b in verify_lemma_bounds(&gen, &u, &f, &constants, lemma.tol)? {
                s += &format!("{lambda},{k},{},{:.6e},{:.6e},{:.6e},{}\n", b.name, b.lhs, b.rhs, b.margin, b.holds);
                let w = worst.entry(b.name).or_insert(0.0);
                *w = w.max(b.margin);
            }
        }
    }
    for (name, margin) in &worst {
        eprintln!("{name}: worst margin {margin:.4e}");
    }
    ctx.write_json("lemma_constants.json", &constants)?;
    ctx.write_text("lemma.csv", &s)
}

pub fn cmd_kernel_check(ctx: &Context) -> Result<PathBuf, CliError> {
    let kernel = ctx.config.memory_kernel()?;
    let s_max = ctx.config.grid.s_max.unwrap_or_else(|| default_s_max(&kernel));
    let probe = build_quadrature(&kernel, ctx.config.grid.n_ages, s_max)?;
    let report = check_admissibility(&kernel, &probe);
    eprintln!(
        "{}: mass {} monotone {} dafermos {}",
        kernel.label, report.mass_ok, report.monotone_ok, report.dafermos_ok
    );
    ctx.write_json("kernel.json", &report)
}

#[derive(Debug, Parser)]
#[command(name = "piezostab", version, about = "Stability laboratory for a magneto-piezoelectric beam with thermal memory")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Scenario file (TOML); the default scenario when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Replaces the seed derived from the config hash.
    #[arg(long, global = true)]
    pub seed_override: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Time integration; writes trajectory.csv.
    Simulate,
    /// Resolvent-norm sweep; writes sweep.csv.
    Sweep {
        /// `log:min:max:count` or `lin:min:max:count`.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Simulation, sweep, fits and verdict; writes verdict.json.
    Certify,
    /// Stationary solve against the closed form; writes oracle_case<k>.csv.
    OracleCheck {
        #[arg(long)]
        case: Option<u8>,
        #[arg(long, value_delimiter = ',')]
        resolutions: Option<Vec<usize>>,
    },
    /// Resolvent estimate constants on random loads; writes lemma.csv.
    LemmaCheck,
    /// Kernel admissibility report; writes kernel.json.
    KernelCheck,
}

fn dispatch(cli: &Cli) -> Result<PathBuf, CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let ctx = Context::new(config, cli.out.clone(), cli.seed_override);
    match &cli.verb {
        Verb::Simulate => cmd_simulate(&ctx),
        Verb::Sweep { lambda } => cmd_sweep(&ctx, lambda.as_deref()),
        Verb::Certify => cmd_certify(&ctx),
        Verb::OracleCheck { case, resolutions } => cmd_oracle_check(&ctx, *case, resolutions.as_deref()),
        Verb::LemmaCheck => cmd_lemma_check(&ctx),
        Verb::KernelCheck => cmd_kernel_check(&ctx),
    }
}

/// Parses arguments, runs the verb and returns the process exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.threads {
        Some(0) => Err(CliError::Validation("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(CliError::Validation(format!("--threads: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(path) => {
            eprintln!("wrote {}", path.display());
            0
        }
        Err(e) => {
            eprintln!("piezostab: {e}");
            e.exit_code()
        }
    }
}
