//! Command-line front end: `gen`, `path` and `bench`.

use std::collections::hash_map::DefaultHasher;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::active_set::ActiveSet;
use crate::cvxcluster::{
    gaussian_knn_weights, ConvexClustering, DEFAULT_GAMMA0, DEFAULT_NEIGHBORS, DEFAULT_PHI,
};
use crate::datagen::{gen_halfmoons, gen_low_rank_coeff, gen_sparse_regression, SimSpec};
use crate::error::{Error, Result};
use crate::io::{self, PathMeta, ScheduleMeta};
use crate::lasso::{true_before_first_false, LassoProblem};
use crate::multitask::ReducedRankProblem;
use crate::path_engine::{
    algorithmic_path, geometric_grid, make_lambda_grid, warm_start_path, Driver, GridSpacing, Path,
    ProblemKind, ScheduleKind, SplitProblem, StepSchedule, Termination, WarmStartOptions,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_IO: u8 = 4;
/// A path hit its step cap or a warm-start level did not converge.
pub const EXIT_INCOMPLETE: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "admm-paths",
    version,
    about = "ADMM regularization paths for lasso, reduced-rank regression and convex clustering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic data set.
    Gen(GenArgs),
    /// Compute a path on a data set written by `gen`.
    Path(PathArgs),
    /// Compare both drivers over replicated synthetic data.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Lasso,
    Rrr,
    Cluster,
}

impl From<ProblemArg> for ProblemKind {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Lasso => ProblemKind::Lasso,
            ProblemArg::Rrr => ProblemKind::Rrr,
            ProblemArg::Cluster => ProblemKind::Cluster,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DriverArg {
    Arp,
    Warmstart,
}

impl From<DriverArg> for Driver {
    fn from(d: DriverArg) -> Self {
        match d {
            DriverArg::Arp => Driver::Arp,
            DriverArg::Warmstart => Driver::Warmstart,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Additive,
    Geometric,
}

impl From<ScheduleArg> for ScheduleKind {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Additive => ScheduleKind::Additive,
            ScheduleArg::Geometric => ScheduleKind::Geometric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Log,
    Linear,
}

impl From<SpacingArg> for GridSpacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Log => GridSpacing::Log,
            SpacingArg::Linear => GridSpacing::Linear,
        }
    }
}

/// Data dimensions; unset values take per-problem defaults.
#[derive(Debug, Clone, Args)]
pub struct DimArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    /// Responses (rrr).
    #[arg(long)]
    pub q: Option<usize>,
    /// Nonzero coefficients (lasso) or true rank (rrr).
    #[arg(long)]
    pub s: Option<usize>,
    /// Noise standard deviation (halfmoon jitter for cluster).
    #[arg(long)]
    pub noise: Option<f64>,
    /// Equicorrelation of lasso design columns.
    #[arg(long)]
    pub correlation: Option<f64>,
}

impl DimArgs {
    fn sim_spec(&self, problem: ProblemKind, seed: u64) -> SimSpec {
        let mut spec = match problem {
            ProblemKind::Lasso => SimSpec::lasso(
                self.n.unwrap_or(50),
                self.p.unwrap_or(100),
                self.s.unwrap_or(5),
                seed,
            ),
            ProblemKind::Rrr => SimSpec::low_rank(
                self.n.unwrap_or(40),
                self.p.unwrap_or(20),
                self.q.unwrap_or(20),
                self.s.unwrap_or(8),
                seed,
            ),
            ProblemKind::Cluster => SimSpec::halfmoons(self.n.unwrap_or(50), seed),
        };
        if let Some(noise) = self.noise {
            spec.noise = noise;
        }
        if let Some(c) = self.correlation {
            spec.correlation = c;
        }
        spec
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemArg,
    #[command(flatten)]
    pub dims: DimArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Driver and schedule settings shared by `path` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Default: additive for lasso, geometric otherwise.
    #[arg(long, value_enum)]
    pub schedule: Option<ScheduleArg>,
    /// Step size. Default: λmax/1000 (additive), 1.02 (rrr), 1.05 (cluster).
    #[arg(long)]
    pub t: Option<f64>,
    /// Default: 1e-4·λmax, or 0.01 for cluster.
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// Step cap (one-step path) or grid cap (cluster warm start).
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub grid_size: usize,
    #[arg(long, value_enum, default_value = "log")]
    pub grid_spacing: SpacingArg,
    /// Warm-start tolerance. Default: 1e-6 for `path` (1e-4 for cluster),
    /// 1e-4 for `bench`.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub max_inner: usize,
    /// Nearest neighbours for cluster weights.
    #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
    pub k: usize,
    /// Gaussian kernel scale for cluster weights.
    #[arg(long, default_value_t = DEFAULT_PHI)]
    pub phi: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PathArgs {
    /// Directory holding the files written by `gen`.
    #[arg(long, default_value = ".")]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub problem: ProblemArg,
    #[arg(long, value_enum, default_value = "arp")]
    pub driver: DriverArg,
    #[command(flatten)]
    pub run: RunArgs,
    /// Include every z iterate in path.json.
    #[arg(long)]
    pub full: bool,
    /// Output directory. Default: ./runs/<timestamp>-<hash>.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Recorded in the output metadata; defaults to the seed in spec.json.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemArg,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Replication r uses seed + r.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub dims: DimArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Output directory. Default: ./runs/<timestamp>-<hash>.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Summary of one driver run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub problem: ProblemKind,
    pub driver: Driver,
    pub schedule: ScheduleMeta,
    pub points: usize,
    pub total_rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svd_count: Option<usize>,
    pub distinct_active_sets: usize,
    pub final_sparsity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_cluster_count: Option<usize>,
    pub all_converged: bool,
    pub wall_time_ms: f64,
    pub terminated: Termination,
    /// Lasso only, when the true coefficients are available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_before_false: Option<usize>,
}

impl RunReport {
    /// FullySparse, or a warm-start grid whose levels all converged.
    pub fn completed(&self) -> bool {
        match self.driver {
            Driver::Arp => self.terminated == Termination::FullySparse,
            Driver::Warmstart => self.all_converged,
        }
    }
}

enum Instance {
    Lasso(LassoProblem),
    Rrr(ReducedRankProblem),
    Cluster(ConvexClustering),
}

impl Instance {
    fn cluster(y: ndarray::Array2<f64>, run: &RunArgs) -> Result<Self> {
        let w = gaussian_knn_weights(y.view(), run.k, run.phi)?;
        Ok(Instance::Cluster(ConvexClustering::new(y, w)?))
    }

    fn load(dir: &FsPath, problem: ProblemKind, run: &RunArgs) -> Result<Self> {
        Ok(match problem {
            ProblemKind::Lasso => Instance::Lasso(LassoProblem::new(
                io::read_matrix_csv(&dir.join("X.csv"))?,
                io::read_vector_csv(&dir.join("y.csv"))?,
            )?),
            ProblemKind::Rrr => Instance::Rrr(ReducedRankProblem::new(
                io::read_matrix_csv(&dir.join("X.csv"))?,
                io::read_matrix_csv(&dir.join("Y.csv"))?,
            )?),
            ProblemKind::Cluster => Self::cluster(io::read_matrix_csv(&dir.join("Y.csv"))?, run)?,
        })
    }

    fn generate(spec: &SimSpec, run: &RunArgs) -> Result<Self> {
        Ok(match spec.kind {
            ProblemKind::Lasso => {
                let d = gen_sparse_regression(spec)?;
                Instance::Lasso(LassoProblem::new(d.x, d.y)?)
            }
            ProblemKind::Rrr => {
                let d = gen_low_rank_coeff(spec)?;
                Instance::Rrr(ReducedRankProblem::new(d.x, d.y)?)
            }
            ProblemKind::Cluster => Self::cluster(gen_halfmoons(spec)?.points, run)?,
        })
    }

    fn run(&self, driver: Driver, run: &RunArgs) -> Result<(Path, RunReport)> {
        match self {
            Instance::Lasso(p) => run_problem(p, driver, run, || None),
            Instance::Rrr(p) => {
                p.reset_svd_count();
                run_problem(p, driver, run, || Some(p.svd_count()))
            }
            Instance::Cluster(p) => run_problem(p, driver, run, || None),
        }
    }
}

enum Plan {
    Steps(StepSchedule),
    Grid(Vec<f64>, WarmStartOptions),
}

fn plan<P: SplitProblem + ?Sized>(
    problem: &P,
    driver: Driver,
    run: &RunArgs,
) -> Result<(Plan, ScheduleMeta)> {
    let kind = problem.kind();
    let lmax = problem.lambda_max();
    let schedule: ScheduleKind = run.schedule.map(Into::into).unwrap_or(match kind {
        ProblemKind::Lasso => ScheduleKind::Additive,
        _ => ScheduleKind::Geometric,
    });
    if kind == ProblemKind::Cluster && schedule != ScheduleKind::Geometric {
        return Err(Error::invalid("cluster paths require --schedule geometric"));
    }
    let scale = lmax.filter(|l| *l > 0.0);
    let t = run.t.unwrap_or(match (schedule, kind) {
        (ScheduleKind::Additive, _) => scale.unwrap_or(1.0) / 1000.0,
        (ScheduleKind::Geometric, ProblemKind::Rrr) => 1.02,
        (ScheduleKind::Geometric, _) => 1.05,
    });
    let gamma0 = run.gamma0.unwrap_or(match kind {
        ProblemKind::Cluster => DEFAULT_GAMMA0,
        _ => 1e-4 * scale.unwrap_or(1.0),
    });

    match (driver, kind) {
        (Driver::Arp, _) => {
            let max_steps = run
                .max_steps
                .unwrap_or_else(|| StepSchedule::default_max_steps(problem, schedule, gamma0, t));
            let s = StepSchedule::new(schedule, gamma0, t, max_steps)?;
            let meta = ScheduleMeta {
                kind: format!("{schedule:?}").to_lowercase(),
                gamma0: Some(gamma0),
                t: Some(t),
                max_steps: Some(max_steps),
                ..Default::default()
            };
            Ok((Plan::Steps(s), meta))
        }
        (Driver::Warmstart, ProblemKind::Cluster) => {
            let tol = run.tol.unwrap_or(1e-4);
            let levels = run.max_steps.unwrap_or_else(|| problem.default_max_steps());
            StepSchedule::new(schedule, gamma0, t, levels)?;
            let grid = geometric_grid(gamma0 * t, t, levels)?;
            let opts = WarmStartOptions {
                tol,
                max_inner: run.max_inner,
                cold_start: false,
                stop_when_sparse: true,
            };
            let meta = ScheduleMeta {
                kind: "geometric_grid".into(),
                gamma0: Some(gamma0),
                t: Some(t),
                max_steps: Some(levels),
                tol: Some(tol),
                max_inner: Some(run.max_inner),
                ..Default::default()
            };
            Ok((Plan::Grid(grid, opts), meta))
        }
        (Driver::Warmstart, _) => {
            let tol = run.tol.unwrap_or(1e-6);
            let lm = lmax.ok_or_else(|| Error::invalid("problem has no lambda_max"))?;
            if !(lm > 0.0) {
                return Err(Error::invalid(
                    "lambda_max is zero: the data carry no signal to penalize",
                ));
            }
            let spacing: GridSpacing = run.grid_spacing.into();
            let grid = make_lambda_grid(lm, run.grid_size, spacing)?;
            let opts = WarmStartOptions {
                tol,
                max_inner: run.max_inner,
                ..Default::default()
            };
            let meta = ScheduleMeta {
                kind: "grid".into(),
                grid_size: Some(run.grid_size),
                spacing: Some(format!("{spacing:?}").to_lowercase()),
                tol: Some(tol),
                max_inner: Some(run.max_inner),
                ..Default::default()
            };
            Ok((Plan::Grid(grid, opts), meta))
        }
    }
}

fn run_problem<P: SplitProblem + ?Sized>(
    problem: &P,
    driver: Driver,
    run: &RunArgs,
    svds: impl Fn() -> Option<usize>,
) -> Result<(Path, RunReport)> {
    let (plan, schedule) = plan(problem, driver, run)?;
    let start = Instant::now();
    let path = match &plan {
        Plan::Steps(s) => algorithmic_path(problem, s)?,
        Plan::Grid(grid, opts) => warm_start_path(problem, grid, opts)?,
    };
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let last = path.last();
    let report = RunReport {
        problem: path.problem,
        driver,
        schedule,
        points: path.points.len(),
        total_rounds: path.total_rounds,
        svd_count: svds(),
        distinct_active_sets: path.distinct_active_sets(),
        final_sparsity: last.map_or(0, |p| p.sparsity),
        final_cluster_count: last.and_then(|p| match &p.active_set {
            ActiveSet::Partition(a) => Some(a.cluster_count),
            _ => None,
        }),
        all_converged: path.all_converged(),
        wall_time_ms: wall,
        terminated: path.terminated,
        true_before_false: None,
    };
    Ok((path, report))
}

fn default_out_dir(tag: &str) -> PathBuf {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default();
    let mut h = DefaultHasher::new();
    tag.hash(&mut h);
    now.as_nanos().hash(&mut h);
    std::process::id().hash(&mut h);
    PathBuf::from("runs").join(format!("{}-{:08x}", now.as_secs(), h.finish() as u32))
}

fn cmd_gen(args: &GenArgs) -> Result<u8> {
    let kind: ProblemKind = args.problem.into();
    let spec = args.dims.sim_spec(kind, args.seed);
    std::fs::create_dir_all(&args.out)?;
    let out = &args.out;
    match kind {
        ProblemKind::Lasso => {
            let d = gen_sparse_regression(&spec)?;
            io::write_matrix_csv(&out.join("X.csv"), d.x.view(), "x")?;
            io::write_vector_csv(&out.join("y.csv"), d.y.view(), "y")?;
            io::write_vector_csv(&out.join("beta_star.csv"), d.beta_star.view(), "beta")?;
        }
        ProblemKind::Rrr => {
            let d = gen_low_rank_coeff(&spec)?;
            io::write_matrix_csv(&out.join("X.csv"), d.x.view(), "x")?;
            io::write_matrix_csv(&out.join("Y.csv"), d.y.view(), "y")?;
            io::write_matrix_csv(&out.join("B_star.csv"), d.b_star.view(), "b")?;
        }
        ProblemKind::Cluster => {
            let d = gen_halfmoons(&spec)?;
            io::write_matrix_csv(&out.join("Y.csv"), d.points.view(), "y")?;
            io::write_labels_csv(&out.join("labels.csv"), &d.labels)?;
        }
    }
    io::write_json(&out.join("spec.json"), &spec)?;
    println!("wrote {} data set to {}", kind.as_str(), out.display());
    Ok(EXIT_OK)
}

fn cmd_path(args: &PathArgs) -> Result<u8> {
    let kind: ProblemKind = args.problem.into();
    let driver: Driver = args.driver.into();
    let instance = Instance::load(&args.data, kind, &args.run)?;
    let seed = args.seed.or_else(|| {
        io::read_json::<SimSpec>(&args.data.join("spec.json"))
            .ok()
            .map(|s| s.seed)
    });
    let (path, mut report) = instance.run(driver, &args.run)?;
    let truth = args.data.join("beta_star.csv");
    if kind == ProblemKind::Lasso && truth.exists() {
        let beta = io::read_vector_csv(&truth)?;
        report.true_before_false = Some(true_before_first_false(&path, beta.view()));
    }

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| default_out_dir(&format!("{args:?}")));
    std::fs::create_dir_all(&out)?;
    let meta = PathMeta {
        problem: kind,
        driver,
        schedule: report.schedule.clone(),
        seed,
    };
    io::write_path_json(&out.join("path.json"), &path, &meta, args.full)?;
    io::write_path_csv_file(&out.join("path.csv"), &path)?;
    io::write_json(&out.join("report.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    eprintln!("outputs in {}", out.display());
    Ok(if report.completed() {
        EXIT_OK
    } else {
        EXIT_INCOMPLETE
    })
}

#[derive(Debug, Clone, Serialize)]
struct BenchRow {
    rep: usize,
    seed: u64,
    driver: Driver,
    points: usize,
    total_rounds: usize,
    svd_count: Option<usize>,
    distinct_active_sets: usize,
    wall_time_ms: f64,
    terminated: Termination,
    completed: bool,
}

fn bench_rep(
    args: &BenchArgs,
    run: &RunArgs,
    kind: ProblemKind,
    rep: usize,
) -> Result<Vec<BenchRow>> {
    let seed = args.seed.wrapping_add(rep as u64);
    let instance = Instance::generate(&args.dims.sim_spec(kind, seed), run)?;
    let mut rows = Vec::with_capacity(2);
    for driver in [Driver::Arp, Driver::Warmstart] {
        let (_, r) = instance.run(driver, run)?;
        rows.push(BenchRow {
            rep,
            seed,
            driver,
            points: r.points,
            total_rounds: r.total_rounds,
            svd_count: r.svd_count,
            distinct_active_sets: r.distinct_active_sets,
            wall_time_ms: r.wall_time_ms,
            terminated: r.terminated,
            completed: r.completed(),
        });
    }
    Ok(rows)
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        0.0
    } else {
        s / c as f64
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    if args.reps == 0 {
        return Err(Error::invalid("--reps must be at least 1"));
    }
    let kind: ProblemKind = args.problem.into();
    let mut run = args.run.clone();
    run.tol.get_or_insert(1e-4);
    let per_rep: Vec<Result<Vec<BenchRow>>> = (0..args.reps)
        .into_par_iter()
        .map(|r| bench_rep(args, &run, kind, r))
        .collect();
    let mut rows = Vec::new();
    for r in per_rep {
        rows.extend(r?);
    }

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| default_out_dir(&format!("{args:?}")));
    std::fs::create_dir_all(&out)?;
    let mut w = csv::Writer::from_path(out.join("bench.csv"))?;
    w.write_record([
        "rep",
        "seed",
        "driver",
        "points",
        "total_rounds",
        "svd_count",
        "distinct_active_sets",
        "wall_time_ms",
        "terminated",
    ])?;
    for r in &rows {
        w.write_record([
            r.rep.to_string(),
            r.seed.to_string(),
            format!("{:?}", r.driver).to_lowercase(),
            r.points.to_string(),
            r.total_rounds.to_string(),
            r.svd_count.map(|c| c.to_string()).unwrap_or_default(),
            r.distinct_active_sets.to_string(),
            format!("{:.3}", r.wall_time_ms),
            serde_json::to_value(r.terminated)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
        ])?;
    }
    w.flush()?;

    let mut table = String::new();
    let _ = writeln!(
        table,
        "{:>4} {:>10} {:>9} {:>8} {:>7} {:>9} {:>10}  terminated",
        "rep", "driver", "rounds", "svds", "models", "points", "ms"
    );
    for r in &rows {
        let _ = writeln!(
            table,
            "{:>4} {:>10} {:>9} {:>8} {:>7} {:>9} {:>10.2}  {:?}",
            r.rep,
            format!("{:?}", r.driver).to_lowercase(),
            r.total_rounds,
            r.svd_count
                .map(|c| c.to_string())
                .unwrap_or_else(|| "-".into()),
            r.distinct_active_sets,
            r.points,
            r.wall_time_ms,
            r.terminated
        );
    }
    let avg = |d: Driver, f: &dyn Fn(&BenchRow) -> f64| {
        mean(rows.iter().filter(|r| r.driver == d).map(f))
    };
    for d in [Driver::Arp, Driver::Warmstart] {
        let _ = writeln!(
            table,
            "mean {:>10} {:>9.1} {:>8} {:>7.1} {:>9.1} {:>10.2}",
            format!("{d:?}").to_lowercase(),
            avg(d, &|r| r.total_rounds as f64),
            if kind == ProblemKind::Rrr {
                format!("{:.1}", avg(d, &|r| r.svd_count.unwrap_or(0) as f64))
            } else {
                "-".into()
            },
            avg(d, &|r| r.distinct_active_sets as f64),
            avg(d, &|r| r.points as f64),
            avg(d, &|r| r.wall_time_ms)
        );
    }
    let ratio = avg(Driver::Warmstart, &|r| r.total_rounds as f64)
        / avg(Driver::Arp, &|r| r.total_rounds as f64);
    let _ = writeln!(table, "warm-start / one-step rounds: {ratio:.2}");
    print!("{table}");
    eprintln!("outputs in {}", out.display());
    Ok(if rows.iter().all(|r| r.completed) {
        EXIT_OK
    } else {
        EXIT_INCOMPLETE
    })
}

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Path(a) => cmd_path(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        e if e.is_validation() => EXIT_VALIDATION,
        Error::NonFinite { .. } => EXIT_NUMERICAL,
        _ => EXIT_IO,
    }
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
