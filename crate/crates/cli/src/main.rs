//! Command-line front end: problem ingestion, solver invocation, certificate
//! emission, refinement studies, and plot-data export.
//!
//! Exit codes: 0 solved and certified, 1 computed but uncertified, 2 input
//! error, 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use orlicz_isotone::certificate::{certify, CertificateReport, CertifyOptions};
use orlicz_isotone::fixtures::Fixture;
use orlicz_isotone::grid::MonotoneStepFunction;
use orlicz_isotone::isotone::{candidate_fit, fit_isotone, Block, SolverOptions, TieBreak};
use orlicz_isotone::luxemburg::{fit_luxemburg, landers_rogge_check, LandersRoggeReport};
use orlicz_isotone::problem::{parse_csv, Problem};
use orlicz_isotone::reference::{brute_force_fit_l1, LevelGrid};
use orlicz_isotone::study::{refine_study_fixture, refine_study_replicated, StudyRow};
use orlicz_isotone::{Error as CoreError, OrliczSpec};

#[derive(Parser)]
#[command(
    name = "orlicz-isotone",
    version,
    about = "Best non-decreasing approximation under Orlicz modular and Luxemburg norm \
             objectives, with machine-checkable optimality certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the best non-decreasing approximation and certify it
    Fit(FitArgs),
    /// Certify a user-supplied monotone candidate against the input
    Certify(CertifyArgs),
    /// Compute the Luxemburg norm of the input function
    Norm(NormArgs),
    /// Best non-decreasing approximation under the Luxemburg norm
    LuxFit(LuxFitArgs),
    /// Fit at a ladder of resolutions and track the largest interior jump
    RefineStudy(RefineStudyArgs),
    /// Guided walkthrough on a small built-in instance
    Demo(DemoArgs),
}

#[derive(Args)]
struct SpecArg {
    /// Orlicz generator as JSON: {"family":"power","p":2.0} |
    /// {"family":"log_shifted"} | {"family":"arctan"} |
    /// {"family":"exp_saturating"} | {"family":"exponential"} |
    /// {"family":"piecewise_phi","knots":[[0,0],[1,0.5]]}
    #[arg(long, default_value = r#"{"family":"power","p":2.0}"#)]
    spec: String,
}

impl SpecArg {
    fn parse(&self) -> Result<OrliczSpec, CliError> {
        serde_json::from_str(&self.spec)
            .map_err(|e| CliError::input(format!("invalid --spec: {e}")))
    }
}

#[derive(Args)]
struct InputArgs {
    /// Problem file, .json or .csv (headers x_left,x_right,f or x,f)
    #[arg(long)]
    input: PathBuf,
    /// Left endpoint, required by the x,f midpoint CSV format
    #[arg(long)]
    a: Option<f64>,
    /// Right endpoint, required by the x,f midpoint CSV format
    #[arg(long)]
    b: Option<f64>,
}

impl InputArgs {
    fn load(&self) -> Result<Problem, CliError> {
        let text = fs::read_to_string(&self.input)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", self.input.display())))?;
        let ext = self
            .input
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_ascii_lowercase();
        let problem = match ext.as_str() {
            "json" => Problem::from_json_str(&text)?,
            "csv" => {
                let endpoints = match (self.a, self.b) {
                    (Some(a), Some(b)) => Some((a, b)),
                    (None, None) => None,
                    _ => {
                        return Err(CliError::input(
                            "--a and --b must be given together".to_string(),
                        ))
                    }
                };
                parse_csv(&text)?.into_problem(endpoints)?
            }
            other => {
                return Err(CliError::input(format!(
                    "unrecognized input extension '{other}' (expected .json or .csv)"
                )))
            }
        };
        Ok(problem)
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Block bisection and merge tolerance, relative to 1 + max|f|
    #[arg(long, default_value_t = 1e-14)]
    block_tol: f64,
    /// Representative of a non-degenerate block minimizer interval
    #[arg(long, value_enum, default_value_t = TieBreakArg::Midpoint)]
    tie_break: TieBreakArg,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            block_tol: self.block_tol,
            tie_break: self.tie_break.into(),
            ..SolverOptions::default()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TieBreakArg {
    Midpoint,
    Leftmost,
    Rightmost,
}

impl From<TieBreakArg> for TieBreak {
    fn from(t: TieBreakArg) -> TieBreak {
        match t {
            TieBreakArg::Midpoint => TieBreak::Midpoint,
            TieBreakArg::Leftmost => TieBreak::Leftmost,
            TieBreakArg::Rightmost => TieBreak::Rightmost,
        }
    }
}

#[derive(Args)]
struct CertArgs {
    /// Certificate base tolerance (scaled by the residual-profile magnitude)
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Jump threshold relative to the value range of f
    #[arg(long, default_value_t = 1e-9)]
    jump_tol: f64,
    /// Number of seeded random characterization probes
    #[arg(long, default_value_t = 100)]
    probes: usize,
    /// Seed for the probe family
    #[arg(long, env = "ORLICZ_ISOTONE_SEED", default_value_t = 0)]
    seed: u64,
}

impl CertArgs {
    fn options(&self) -> CertifyOptions {
        CertifyOptions {
            tol: self.tol,
            jump_tol_rel: self.jump_tol,
            n_probes: self.probes,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct OutputArg {
    /// Write the JSON result here (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    cert: CertArgs,
    #[command(flatten)]
    output: OutputArg,
    /// Also write a plot-ready CSV x,f,g_star here
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Allow Power(1): runs the level-grid L1 DP oracle instead of the
    /// solver (outside the validated generator class; never certified)
    #[arg(long)]
    allow_l1_oracle: bool,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    input: InputArgs,
    /// Candidate file: JSON array of values, or {"values":[...]}
    #[arg(long)]
    candidate: PathBuf,
    #[command(flatten)]
    cert: CertArgs,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct NormArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    input: InputArgs,
    /// Bisection tolerance on the modular at the returned norm
    #[arg(long, default_value_t = 1e-10)]
    norm_tol: f64,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct LuxFitArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    cert: CertArgs,
    /// Outer bisection tolerance on M(delta) = 1
    #[arg(long, default_value_t = 1e-10)]
    lux_tol: f64,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct RefineStudyArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Built-in analytic input: sin | inv-sqrt | step (resampled per level)
    #[arg(long, conflicts_with = "input")]
    fixture: Option<String>,
    /// User problem file (refined by value replication)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Endpoints for the x,f midpoint CSV format
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Base resolution for fixtures
    #[arg(long, default_value_t = 64)]
    base_n: usize,
    /// Cells multiply by this factor per level
    #[arg(long, default_value_t = 2)]
    factor: usize,
    /// Number of refinement steps beyond the base level
    #[arg(long, default_value_t = 4)]
    refine_levels: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    cert: CertArgs,
    /// Write the study CSV here (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    /// Also contrast against the L1 (absolute value) DP oracle
    #[arg(long)]
    allow_l1_oracle: bool,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: String) -> Self {
        CliError { code: 2, message }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::Domain(_) | CoreError::Shape(_) => 2,
            CoreError::NoConvergence { .. } => 3,
        };
        CliError { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Norm(args) => cmd_norm(args),
        Command::LuxFit(args) => cmd_lux_fit(args),
        Command::RefineStudy(args) => cmd_refine_study(args),
        Command::Demo(args) => cmd_demo(args),
    }
}

/// Writes happen to a temp file in the same directory, then rename, so a
/// crashed run never leaves a half-written result.
fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, content)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::input(format!("cannot rename into {}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => write_atomic(path, content),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serialization cannot fail")
}

#[derive(Serialize)]
struct FitOutput<'a> {
    spec: &'a OrliczSpec,
    kind: orlicz_isotone::OrliczKind,
    n_cells: usize,
    modular_value: f64,
    merges: usize,
    block_solves: usize,
    blocks: &'a [Block],
    g_star: &'a [f64],
    certificate: &'a CertificateReport,
}

#[derive(Serialize)]
struct L1OracleOutput<'a> {
    l1_oracle: bool,
    note: &'a str,
    n_cells: usize,
    value: f64,
    g_star: &'a [f64],
}

fn plot_csv(problem: &Problem, g: &[f64]) -> String {
    let mut out = String::from("x,f,g_star\n");
    for (i, (&f, &gv)) in problem.f.values().iter().zip(g).enumerate() {
        out.push_str(&format!("{},{},{}\n", problem.grid.midpoint(i), f, gv));
    }
    out
}

fn cmd_fit(args: FitArgs) -> Result<u8, CliError> {
    let problem = args.input.load()?;

    let spec = match args.spec.parse() {
        Ok(spec) => spec,
        Err(err) => {
            if args.allow_l1_oracle && args.spec.spec.contains("power") {
                return l1_oracle_fit(&args, &problem);
            }
            return Err(err);
        }
    };

    let fit = fit_isotone(&spec, &problem.grid, &problem.f, &args.solver.options())?;
    let report = certify(&spec, &problem.grid, &problem.f, &fit, &args.cert.options())?;
    let out = FitOutput {
        spec: &spec,
        kind: spec.kind(),
        n_cells: problem.grid.n_cells(),
        modular_value: fit.modular_value,
        merges: fit.merges,
        block_solves: fit.block_solves,
        blocks: &fit.blocks,
        g_star: fit.g_star.values(),
        certificate: &report,
    };
    emit(&args.output.output, &to_json(&out))?;
    if let Some(plot) = &args.plot {
        write_atomic(plot, &plot_csv(&problem, fit.g_star.values()))?;
    }
    Ok(if report.passed { 0 } else { 1 })
}

/// Comparative-study escape hatch: the L1 cost lies outside the admissible
/// generator class (its derivative does not vanish at 0+), so the result is
/// labeled and never certified.
fn l1_oracle_fit(args: &FitArgs, problem: &Problem) -> Result<u8, CliError> {
    let levels = LevelGrid::build(problem.f.values(), 2001)?;
    let (g, value) = brute_force_fit_l1(&problem.grid, &problem.f, &levels)?;
    let out = L1OracleOutput {
        l1_oracle: true,
        note: "level-grid L1 dynamic program; outside the validated generator class",
        n_cells: problem.grid.n_cells(),
        value,
        g_star: g.values(),
    };
    emit(&args.output.output, &to_json(&out))?;
    if let Some(plot) = &args.plot {
        write_atomic(plot, &plot_csv(problem, g.values()))?;
    }
    Ok(1)
}

fn cmd_certify(args: CertifyArgs) -> Result<u8, CliError> {
    let problem = args.input.load()?;
    let spec = args.spec.parse()?;
    let text = fs::read_to_string(&args.candidate)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", args.candidate.display())))?;
    let values: Vec<f64> = match serde_json::from_str::<Vec<f64>>(&text) {
        Ok(v) => v,
        Err(_) => {
            #[derive(serde::Deserialize)]
            struct Wrapper {
                values: Vec<f64>,
            }
            serde_json::from_str::<Wrapper>(&text)
                .map_err(|e| CliError::input(format!("invalid candidate file: {e}")))?
                .values
        }
    };
    let g = MonotoneStepFunction::new(values)?;
    let fit = candidate_fit(&spec, &problem.grid, &problem.f, g)?;
    let report = certify(&spec, &problem.grid, &problem.f, &fit, &args.cert.options())?;
    emit(&args.output.output, &to_json(&report))?;
    Ok(if report.passed { 0 } else { 1 })
}

fn cmd_norm(args: NormArgs) -> Result<u8, CliError> {
    let problem = args.input.load()?;
    let spec = args.spec.parse()?;
    let norm = spec.luxemburg_norm(&problem.grid, &problem.f, args.norm_tol)?;
    #[derive(Serialize)]
    struct NormOutput<'a> {
        spec: &'a OrliczSpec,
        norm: f64,
    }
    match &args.output.output {
        Some(_) => emit(&args.output.output, &to_json(&NormOutput { spec: &spec, norm }))?,
        None => println!("{norm}"),
    }
    Ok(0)
}

#[derive(Serialize)]
struct LuxFitOutput<'a> {
    spec: &'a OrliczSpec,
    delta: f64,
    h_star: &'a [f64],
    outer_iterations: usize,
    n_function_hypothesis: bool,
    inner_certificate: &'a CertificateReport,
    landers_rogge: LandersRoggeSummary,
}

#[derive(Serialize)]
struct LandersRoggeSummary {
    consistent: bool,
    residual: f64,
}

fn cmd_lux_fit(args: LuxFitArgs) -> Result<u8, CliError> {
    let problem = args.input.load()?;
    let spec = args.spec.parse()?;
    let result = fit_luxemburg(
        &spec,
        &problem.grid,
        &problem.f,
        &args.solver.options(),
        args.lux_tol,
    )?;
    let check: LandersRoggeReport =
        landers_rogge_check(&spec, &problem.grid, &problem.f, &result, args.cert.tol)?;
    let out = LuxFitOutput {
        spec: &spec,
        delta: result.delta,
        h_star: result.h_star.values(),
        outer_iterations: result.outer_iterations,
        n_function_hypothesis: result.n_function_hypothesis,
        inner_certificate: &check.inner_certificate,
        landers_rogge: LandersRoggeSummary {
            consistent: check.consistent,
            residual: check.residual,
        },
    };
    emit(&args.output.output, &to_json(&out))?;
    Ok(if check.consistent { 0 } else { 1 })
}

fn study_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from("n,max_jump,modular,certified\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.n, row.max_jump, row.modular_value, row.certified
        ));
    }
    out
}

fn cmd_refine_study(args: RefineStudyArgs) -> Result<u8, CliError> {
    let spec = args.spec.parse()?;
    if args.factor < 2 {
        return Err(CliError::input("--factor must be at least 2".to_string()));
    }
    let rows = match (&args.fixture, &args.input) {
        (Some(name), None) => {
            let fixture: Fixture = name.parse()?;
            refine_study_fixture(
                &spec,
                fixture,
                args.base_n,
                args.factor,
                args.refine_levels,
                &args.solver.options(),
                &args.cert.options(),
            )?
        }
        (None, Some(path)) => {
            let input = InputArgs { input: path.clone(), a: args.a, b: args.b };
            let problem = input.load()?;
            refine_study_replicated(
                &spec,
                &problem.grid,
                &problem.f,
                args.factor,
                args.refine_levels,
                &args.solver.options(),
                &args.cert.options(),
            )?
        }
        _ => {
            return Err(CliError::input(
                "refine-study needs exactly one of --fixture or --input".to_string(),
            ))
        }
    };
    match &args.output {
        Some(path) => write_atomic(path, &study_csv(&rows))?,
        None => print!("{}", study_csv(&rows)),
    }
    Ok(if rows.iter().all(|r| r.certified) { 0 } else { 1 })
}

fn cmd_demo(args: DemoArgs) -> Result<u8, CliError> {
    let spec = OrliczSpec::log_shifted();
    let problem = Problem::from_json_str(r#"{"a": 0.0, "b": 3.0, "values": [3.0, 1.0, 2.0]}"#)?;
    println!("input: f = (3, 1, 2) on three equal cells of [0, 3]");
    println!("spec:  {} (bounded phi(t) = t/(1+t))", serde_json::to_string(&spec).unwrap());
    println!();

    let fit = fit_isotone(&spec, &problem.grid, &problem.f, &SolverOptions::default())?;
    println!("fit: g* = {:?}", fit.g_star.values());
    println!(
        "     {} block(s), {} merge(s), modular value {:.12}",
        fit.blocks.len(),
        fit.merges,
        fit.modular_value
    );
    println!("     the violating pair (3,1) pools at the symmetric level 2; the");
    println!("     trailing 2 ties with it and joins the same block.");
    println!();

    let report = certify(&spec, &problem.grid, &problem.f, &fit, &CertifyOptions::default())?;
    println!("certificate (tol {:.3e}):", report.tol);
    println!("  balance          {:+.3e}  pass = {}", report.item1_balance, report.item1_pass);
    println!("  min r            {:+.3e}  pass = {}", report.item2_min_r, report.item2_pass);
    println!("  total r          {:+.3e}  pass = {}", report.item3_total, report.item3_pass);
    println!("  max tail         {:+.3e}  pass = {}", report.item4_max_tail, report.item4_pass);
    println!(
        "  jump residuals   {}       pass = {}",
        report.item5_jump_residuals.len(),
        report.item5_pass
    );
    println!(
        "  constancy checks {}       pass = {}",
        report.item6_witnesses.len(),
        report.item6_pass
    );
    println!(
        "  probe minimum    {:+.3e}  attained by {}",
        report.characterization_min.unwrap_or(f64::NAN),
        report.characterization_argmin.as_deref().unwrap_or("?")
    );
    println!("  passed = {}", report.passed);
    println!();

    let lux = fit_luxemburg(&spec, &problem.grid, &problem.f, &SolverOptions::default(), 1e-10)?;
    println!(
        "luxemburg fit: delta = {:.9}, h* = {:?} ({} inner solves)",
        lux.delta,
        lux.h_star.values(),
        lux.outer_iterations
    );
    if !lux.n_function_hypothesis {
        println!("  note: phi is bounded (N-infinity family); the scaling relation");
        println!("  is applied outside its stated hypothesis and flagged as such.");
    }

    if args.allow_l1_oracle {
        println!();
        let levels = LevelGrid::build(problem.f.values(), 2001)?;
        let (g1, v1) = brute_force_fit_l1(&problem.grid, &problem.f, &levels)?;
        println!("l1 oracle contrast (outside the validated class):");
        println!("  g = {:?}, value = {:.6}", g1.values(), v1);
        println!("  the absolute-value cost drives levels to medians; the Orlicz");
        println!("  score balances phi-weighted signs instead.");
    }
    Ok(0)
}
