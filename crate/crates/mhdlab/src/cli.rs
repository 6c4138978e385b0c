//! Command line front end.
//!
//! Five subcommands cover the laboratory workflow: `list` the catalogue,
//! `sample` a family on a spacetime grid, `verify` the governing
//! equations at random domain points, `flow` a family along a symmetry
//! transformation, and `circulate` a material loop through the velocity
//! field.
//!
//! Output discipline: machine-readable content (reports, dumps) goes to
//! stdout or to `--out`, human warnings go to stderr, and nothing
//! time-dependent is ever emitted, so identical invocations produce
//! byte-identical output. Exit codes: 0 on success, 1 on usage or
//! construction errors, 2 when a verification check fails.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diffcalc::curl;
use crate::error::{MhdError, Result};
use crate::families::{self, MhdField, SampleWindow, SolutionFamily};
use crate::lagrangian::{self, MaterialLoop};
use crate::ledger::{Discrepancy, Ledger, DEFAULT_LEDGER_PATH};
use crate::mhdcheck::{self, ResidualReport};
use crate::params::parse_params;
use crate::state::SpacetimePoint;
use crate::symmetry::{invariance_defect, pushforward, Combo};
use crate::vec3::Vec3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

/// Hard ceiling on grid sizes, to catch typos like `t=0:1:1000000`.
const MAX_GRID_POINTS: usize = 2_000_000;

/// Parses `args` (including the program name) and runs the requested
/// command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_thread_pool();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Applies the `MHDLAB_THREADS` cap to the global worker pool, once.
fn init_thread_pool() {
    use std::sync::Once;
    static ONCE: Once = Once::new();
    ONCE.call_once(|| {
        let cap = std::env::var("MHDLAB_THREADS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n >= 1);
        if let Some(n) = cap {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    });
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::List(args) => cmd_list(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Flow(args) => cmd_flow(args),
        Command::Circulate(args) => cmd_circulate(args),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "mhdlab",
    version,
    about = "Construct, sample and verify exact solutions of ideal magnetohydrodynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the catalogue of solution families.
    List(ListArgs),
    /// Evaluate a family on a spacetime grid and dump the samples.
    Sample(SampleArgs),
    /// Check the governing equations at random domain points.
    Verify(VerifyArgs),
    /// Transport a family along a symmetry flow, then measure it again.
    Flow(FlowArgs),
    /// Advect a material loop and report its circulation history.
    Circulate(CirculateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DumpFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ListFormat {
    Table,
    Json,
}

/// Selects and configures one solution family.
#[derive(Args, Debug, Clone)]
struct FamilySelect {
    /// Family id, e.g. G7 or G3/case2 (see the `list` command).
    #[arg(long)]
    family: String,
    /// Override one named parameter; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    param: Vec<String>,
    /// Shorthand for --param gamma=VALUE.
    #[arg(long, value_name = "VALUE")]
    gamma: Option<f64>,
    /// Alternative published formula variant to build.
    #[arg(long, value_name = "NAME")]
    variant: Option<String>,
}

impl FamilySelect {
    fn build(&self) -> Result<SolutionFamily> {
        let mut params = parse_params(&self.param)?;
        if let Some(g) = self.gamma {
            params.insert("gamma".to_string(), g);
        }
        families::make_family_with(&self.family, &params, self.variant.as_deref())
    }
}

/// Spacetime grid selection. Axes not mentioned default to three interior
/// points of the family's sample window.
#[derive(Args, Debug, Clone, Default)]
struct GridSelect {
    /// Axis range AXIS=MIN:MAX:COUNT with AXIS one of t,x,y,z; repeatable.
    #[arg(long = "grid", value_name = "AXIS=MIN:MAX:COUNT")]
    grid: Vec<String>,
    /// Hold an axis at a single value, AXIS=VALUE; repeatable.
    #[arg(long = "fix", value_name = "AXIS=VALUE")]
    fix: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
enum AxisPlan {
    Range { min: f64, max: f64, count: usize },
    Fixed(f64),
    Window,
}

const AXIS_NAMES: [&str; 4] = ["t", "x", "y", "z"];

fn axis_index(name: &str) -> Result<usize> {
    AXIS_NAMES
        .iter()
        .position(|a| *a == name)
        .ok_or_else(|| MhdError::Parse(format!("unknown axis {name:?} (expected t, x, y or z)")))
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| MhdError::Parse(format!("bad numeric value {s:?}")))
}

impl GridSelect {
    fn plan(&self) -> Result<[AxisPlan; 4]> {
        let mut axes = [AxisPlan::Window; 4];
        let mut taken = [false; 4];
        let mut claim = |idx: usize| -> Result<()> {
            if taken[idx] {
                return Err(MhdError::Parse(format!(
                    "axis {} is constrained more than once across --grid/--fix",
                    AXIS_NAMES[idx]
                )));
            }
            taken[idx] = true;
            Ok(())
        };
        for spec in &self.grid {
            let (axis, rest) = spec.split_once('=').ok_or_else(|| {
                MhdError::Parse(format!("expected AXIS=MIN:MAX:COUNT, got {spec:?}"))
            })?;
            let idx = axis_index(axis.trim())?;
            claim(idx)?;
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(MhdError::Parse(format!(
                    "expected MIN:MAX:COUNT after {}=, got {rest:?}",
                    AXIS_NAMES[idx]
                )));
            }
            let min = parse_number(parts[0])?;
            let max = parse_number(parts[1])?;
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| MhdError::Parse(format!("bad grid count {:?}", parts[2])))?;
            if count < 1 {
                return Err(MhdError::Parse("grid count must be at least 1".to_string()));
            }
            if !(min.is_finite() && max.is_finite() && min <= max) {
                return Err(MhdError::Parse(format!(
                    "grid range for axis {} must be finite with MIN <= MAX",
                    AXIS_NAMES[idx]
                )));
            }
            axes[idx] = AxisPlan::Range { min, max, count };
        }
        for spec in &self.fix {
            let (axis, value) = spec
                .split_once('=')
                .ok_or_else(|| MhdError::Parse(format!("expected AXIS=VALUE, got {spec:?}")))?;
            let idx = axis_index(axis.trim())?;
            claim(idx)?;
            let v = parse_number(value)?;
            if !v.is_finite() {
                return Err(MhdError::Parse(format!(
                    "fixed value for axis {} must be finite",
                    AXIS_NAMES[idx]
                )));
            }
            axes[idx] = AxisPlan::Fixed(v);
        }
        Ok(axes)
    }

    /// Materialises the per-axis coordinate lists against a window.
    fn resolve(&self, window: &SampleWindow) -> Result<[Vec<f64>; 4]> {
        let plan = self.plan()?;
        let spans = [window.t, window.x, window.y, window.z];
        let mut values: [Vec<f64>; 4] = Default::default();
        for (idx, axis) in plan.iter().enumerate() {
            values[idx] = match *axis {
                AxisPlan::Fixed(v) => vec![v],
                AxisPlan::Range { min, max, count } => linspace(min, max, count),
                AxisPlan::Window => {
                    let (lo, hi) = spans[idx];
                    (1..=3).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect()
                }
            };
        }
        let total: usize = values.iter().map(Vec::len).product();
        if total > MAX_GRID_POINTS {
            return Err(MhdError::Parse(format!(
                "grid has {total} points, above the ceiling of {MAX_GRID_POINTS}"
            )));
        }
        Ok(values)
    }
}

fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    (0..count)
        .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
        .collect()
}

fn grid_points(values: &[Vec<f64>; 4]) -> Vec<SpacetimePoint> {
    let mut out =
        Vec::with_capacity(values.iter().map(Vec::len).product::<usize>());
    for &t in &values[0] {
        for &x in &values[1] {
            for &y in &values[2] {
                for &z in &values[3] {
                    out.push(SpacetimePoint::new(t, x, y, z));
                }
            }
        }
    }
    out
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Sends `content` to the `--out` path when given, otherwise to stdout.
fn emit(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| {
            MhdError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

// ---------------------------------------------------------------- list

#[derive(Args, Debug)]
struct ListArgs {
    #[arg(long, value_enum, default_value_t = ListFormat::Table)]
    format: ListFormat,
    /// Write the listing here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn cmd_list(args: ListArgs) -> Result<i32> {
    let ids = families::family_ids();
    let content = match args.format {
        ListFormat::Json => {
            let all: Result<Vec<_>> = ids.iter().map(|id| families::describe(id)).collect();
            to_pretty_json(&all?)?
        }
        ListFormat::Table => {
            let mut text = String::new();
            let mut groups = 0usize;
            let mut last_group = String::new();
            for id in &ids {
                let meta = families::describe(id)?;
                if meta.group != last_group {
                    groups += 1;
                    text.push_str(&format!("== {} ==\n", meta.group));
                    last_group = meta.group.clone();
                }
                text.push_str(&format!("{}\n", meta.id));
                text.push_str(&format!("  title:     {}\n", meta.title));
                text.push_str(&format!("  combo:     {}\n", meta.combo));
                text.push_str(&format!("  algebra:   {}\n", meta.algebra.join("; ")));
                text.push_str(&format!(
                    "  gamma:     {} ({})\n",
                    meta.gamma,
                    if meta.gamma_fixed { "fixed" } else { "default" }
                ));
                text.push_str(&format!("  domain:    {}\n", meta.domain));
                let flag = |b: bool| if b { "yes" } else { "no" };
                text.push_str(&format!(
                    "  flags:     force-free={} circulation-conserved={} planar-B={} static={}\n",
                    flag(meta.force_free),
                    flag(meta.circulation_conserved),
                    flag(meta.planar_b),
                    flag(meta.static_flow)
                ));
                let params: Vec<String> = meta
                    .parameters
                    .iter()
                    .map(|p| format!("{}={} ({})", p.name, p.default, p.constraint))
                    .collect();
                text.push_str(&format!("  params:    {}\n", params.join(" | ")));
                if !meta.variants.is_empty() {
                    text.push_str(&format!("  variants:  {}\n", meta.variants.join(", ")));
                }
                for note in &meta.notes {
                    text.push_str(&format!("  note:      {note}\n"));
                }
            }
            text.push_str(&format!("{} groups, {} sub-cases\n", groups, ids.len()));
            text
        }
    };
    emit(args.out.as_ref(), &content)?;
    Ok(EXIT_OK)
}

// -------------------------------------------------------------- sample

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    family: FamilySelect,
    #[command(flatten)]
    grid: GridSelect,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DumpFormat::Csv)]
    format: DumpFormat,
}

const SAMPLE_COLUMNS: [&str; 15] = [
    "t", "x", "y", "z", "rho", "p", "vx", "vy", "vz", "Bx", "By", "Bz", "J_mag", "force_mag",
    "vorticity_mag",
];

/// One evaluated grid point: the state plus the magnitudes of the
/// current, the magnetic force and the vorticity, all from the exact jet.
fn sample_row(field: &dyn MhdField, p: &SpacetimePoint) -> Result<[f64; 15]> {
    let jet = field.state_jet(p)?;
    let b = Vec3::new(jet.b[0].v, jet.b[1].v, jet.b[2].v);
    let j = curl(&jet.b);
    let w = curl(&jet.v);
    Ok([
        p.t,
        p.x,
        p.y,
        p.z,
        jet.rho.v,
        jet.p.v,
        jet.v[0].v,
        jet.v[1].v,
        jet.v[2].v,
        b.x,
        b.y,
        b.z,
        j.norm(),
        j.cross(b).norm(),
        w.norm(),
    ])
}

/// Evaluates a grid, silently skipping points outside the domain and
/// reporting how many were skipped (with a sample reason).
fn sample_grid(
    field: &dyn MhdField,
    points: &[SpacetimePoint],
) -> Result<(Vec<[f64; 15]>, usize, Option<String>)> {
    use rayon::prelude::*;
    let evaluated: Result<Vec<Option<[f64; 15]>>> = points
        .par_iter()
        .map(|p| match field.check_point(p) {
            Ok(()) => sample_row(field, p).map(Some),
            Err(_) => Ok(None),
        })
        .collect();
    let evaluated = evaluated?;
    let mut rows = Vec::with_capacity(evaluated.len());
    let mut skipped = 0usize;
    let mut reason = None;
    for (row, p) in evaluated.into_iter().zip(points) {
        match row {
            Some(r) => rows.push(r),
            None => {
                skipped += 1;
                if reason.is_none() {
                    reason = Some(match field.check_point(p) {
                        Err(e) => e.to_string(),
                        Ok(()) => "domain check disagreed on re-evaluation".to_string(),
                    });
                }
            }
        }
    }
    Ok((rows, skipped, reason))
}

fn rows_to_csv(rows: &[[f64; 15]]) -> String {
    let mut text = String::with_capacity(32 * 15 * (rows.len() + 1));
    text.push_str(&SAMPLE_COLUMNS.join(","));
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    text
}

#[derive(Serialize)]
struct SampleReport<'a> {
    family: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<&'a str>,
    gamma: f64,
    points_requested: usize,
    points_skipped: usize,
    columns: [&'static str; 15],
    rows: &'a [[f64; 15]],
}

fn render_dump(
    format: DumpFormat,
    family_id: &str,
    variant: Option<&str>,
    gamma: f64,
    requested: usize,
    skipped: usize,
    rows: &[[f64; 15]],
) -> Result<String> {
    match format {
        DumpFormat::Csv => Ok(rows_to_csv(rows)),
        DumpFormat::Json => to_pretty_json(&SampleReport {
            family: family_id,
            variant,
            gamma,
            points_requested: requested,
            points_skipped: skipped,
            columns: SAMPLE_COLUMNS,
            rows,
        }),
    }
}

fn warn_skipped(id: &str, skipped: usize, total: usize, reason: Option<&String>) {
    if skipped > 0 {
        eprintln!(
            "warning: {skipped} of {total} grid points lie outside the domain of {id}{}",
            reason.map(|r| format!(" (first: {r})")).unwrap_or_default()
        );
    }
}

fn cmd_sample(args: SampleArgs) -> Result<i32> {
    let field = args.family.build()?;
    let values = args.grid.resolve(&field.sample_window())?;
    let points = grid_points(&values);
    let (rows, skipped, reason) = sample_grid(field.as_ref(), &points)?;
    warn_skipped(field.id(), skipped, points.len(), reason.as_ref());
    let content = render_dump(
        args.format,
        field.id(),
        args.family.variant.as_deref(),
        field.gamma(),
        points.len(),
        skipped,
        &rows,
    )?;
    emit(args.out.as_ref(), &content)?;
    Ok(EXIT_OK)
}

// -------------------------------------------------------------- verify

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Verify one family instead of the whole residual suite.
    #[arg(long)]
    family: Option<String>,
    /// Override one named parameter (needs --family); repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    param: Vec<String>,
    /// Shorthand for --param gamma=VALUE (needs --family).
    #[arg(long, value_name = "VALUE")]
    gamma: Option<f64>,
    /// Published formula variant to test (needs --family).
    #[arg(long, value_name = "NAME")]
    variant: Option<String>,
    /// Residual tolerance for the pass/fail verdict.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Random domain points checked per family.
    #[arg(long, default_value_t = 400)]
    points: usize,
    /// Seed of the point sampler.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Discrepancy ledger updated when a family misses the tolerance.
    #[arg(long, value_name = "PATH", default_value = DEFAULT_LEDGER_PATH)]
    ledger: PathBuf,
    /// Skip reading and writing the ledger file.
    #[arg(long)]
    no_ledger: bool,
    /// Also write the JSON report here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct FamilyVerdict {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<String>,
    points: usize,
    residuals: ResidualReport,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    tolerance: f64,
    points_per_family: usize,
    seed: u64,
    families: Vec<FamilyVerdict>,
    passed: usize,
    failed: usize,
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    if args.family.is_none()
        && (!args.param.is_empty() || args.gamma.is_some() || args.variant.is_some())
    {
        return Err(MhdError::Parse(
            "--param, --gamma and --variant need --family".to_string(),
        ));
    }
    if args.points == 0 {
        return Err(MhdError::Parse("--points must be at least 1".to_string()));
    }
    let ids: Vec<String> = match &args.family {
        Some(id) => vec![id.clone()],
        None => families::residual_suite_ids().iter().map(|s| s.to_string()).collect(),
    };

    let mut verdicts = Vec::with_capacity(ids.len());
    for id in &ids {
        let select = FamilySelect {
            family: id.clone(),
            param: args.param.clone(),
            gamma: args.gamma,
            variant: args.variant.clone(),
        };
        let field = select.build()?;
        let points = families::sample_points(field.as_ref(), args.seed, args.points)?;
        let residuals = mhdcheck::worst_residual(field.as_ref(), &points)?;
        verdicts.push(FamilyVerdict {
            id: id.clone(),
            variant: args.variant.clone(),
            points: points.len(),
            pass: residuals.rel <= args.tol,
            residuals,
        });
    }

    let failed = verdicts.iter().filter(|v| !v.pass).count();
    let report = VerifyReport {
        tolerance: args.tol,
        points_per_family: args.points,
        seed: args.seed,
        passed: verdicts.len() - failed,
        failed,
        families: verdicts,
    };

    if !args.no_ledger && failed > 0 {
        let mut ledger = Ledger::load(&args.ledger)?;
        let mut changed = false;
        for v in report.families.iter().filter(|v| !v.pass) {
            changed |= ledger.record(Discrepancy {
                family: v.id.clone(),
                variant: v.variant.clone(),
                check: "residual-suite".to_string(),
                detail: format!(
                    "worst relative residual {:.3e} over {} sampled points exceeds {:.1e}; \
                     dominated by the {} balance",
                    v.residuals.rel,
                    v.points,
                    report.tolerance,
                    v.residuals.dominant_equation()
                ),
                magnitude: Some(v.residuals.rel),
            });
        }
        if changed {
            ledger.save(&args.ledger)?;
            eprintln!("recorded {} finding(s) in {}", failed, args.ledger.display());
        }
    }

    let content = to_pretty_json(&report)?;
    print!("{content}");
    if let Some(path) = &args.out {
        emit(Some(path), &content)?;
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

// ---------------------------------------------------------------- flow

#[derive(Args, Debug)]
struct FlowArgs {
    #[command(flatten)]
    family: FamilySelect,
    /// Generator combination to exponentiate, e.g. "J3+0.5*K1+(-0.2)*H".
    #[arg(long)]
    combo: String,
    /// Flow parameter of the one-parameter transformation.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[command(flatten)]
    grid: GridSelect,
    /// Random points for the invariance and residual measurements.
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Seed of the point sampler.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Residual tolerance for the transported field.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Invariance threshold below which the combo counts as a symmetry
    /// of this particular solution.
    #[arg(long, default_value_t = 1e-9)]
    invariance_tol: f64,
    /// Write the transported-field sample dump here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DumpFormat::Csv)]
    format: DumpFormat,
}

#[derive(Serialize)]
struct FlowReport {
    family: String,
    combo: String,
    eps: f64,
    points: usize,
    seed: u64,
    tolerance: f64,
    invariance_tolerance: f64,
    /// Largest relative state change under the transformation.
    invariance_deviation: f64,
    /// Whether the deviation stays below the invariance threshold.
    invariant: bool,
    /// Worst governing-equation residuals of the transported field.
    transported_residuals: ResidualReport,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_rows: Option<usize>,
}

fn cmd_flow(args: FlowArgs) -> Result<i32> {
    if args.points == 0 {
        return Err(MhdError::Parse("--points must be at least 1".to_string()));
    }
    let combo: Combo = args.combo.parse()?;
    let field: Arc<dyn MhdField> = Arc::from(args.family.build()?);
    let pushed = pushforward(Arc::clone(&field), &combo, args.eps);

    let base_points = families::sample_points(field.as_ref(), args.seed, args.points)?;
    let deviation = invariance_defect(&field, &combo, args.eps, &base_points)?;

    let pushed_points = families::sample_points(&pushed, args.seed, args.points)?;
    let residuals = mhdcheck::worst_residual(&pushed, &pushed_points)?;
    let pass = residuals.rel <= args.tol;

    let mut sample_file = None;
    let mut sample_rows = None;
    if let Some(path) = &args.out {
        let values = args.grid.resolve(&pushed.sample_window())?;
        let points = grid_points(&values);
        let (rows, skipped, reason) = sample_grid(&pushed, &points)?;
        warn_skipped(pushed.id(), skipped, points.len(), reason.as_ref());
        let content = render_dump(
            args.format,
            pushed.id(),
            args.family.variant.as_deref(),
            pushed.gamma(),
            points.len(),
            skipped,
            &rows,
        )?;
        emit(Some(path), &content)?;
        sample_file = Some(path.display().to_string());
        sample_rows = Some(rows.len());
    }

    let report = FlowReport {
        family: field.id().to_string(),
        combo: combo.to_string(),
        eps: args.eps,
        points: args.points,
        seed: args.seed,
        tolerance: args.tol,
        invariance_tolerance: args.invariance_tol,
        invariance_deviation: deviation,
        invariant: deviation <= args.invariance_tol,
        transported_residuals: residuals,
        pass,
        sample_file,
        sample_rows,
    };
    print!("{}", to_pretty_json(&report)?);
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

// ----------------------------------------------------------- circulate

#[derive(Args, Debug)]
struct CirculateArgs {
    #[command(flatten)]
    family: FamilySelect,
    /// Loop descriptor center=CX,CY,CZ,radius=R,normal=NX,NY,NZ,n=COUNT
    /// (normal and n are optional; the loop starts at the first time of
    /// the t grid).
    #[arg(long = "loop", value_name = "SPEC")]
    loop_spec: String,
    #[command(flatten)]
    grid: GridSelect,
    /// Relative tolerance of the marker advection.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Relative circulation drift below which the loop counts as
    /// conserving.
    #[arg(long, default_value_t = 1e-4)]
    drift_tol: f64,
    /// Write the circulation series here (the report stays on stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DumpFormat::Csv)]
    format: DumpFormat,
}

#[derive(Clone, Copy, Debug)]
struct LoopSpec {
    center: Vec3,
    radius: f64,
    normal: Vec3,
    count: usize,
}

/// Parses `center=CX,CY,CZ,radius=R,normal=NX,NY,NZ,n=COUNT`. Values are
/// comma-separated; a token containing `=` opens the next key, so vector
/// keys absorb the following bare numbers.
fn parse_loop_spec(s: &str) -> Result<LoopSpec> {
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for token in s.split(',') {
        let token = token.trim();
        if token.is_empty() {
            return Err(MhdError::Parse("empty token in loop descriptor".to_string()));
        }
        match token.split_once('=') {
            Some((key, value)) => {
                groups.push((key.trim().to_ascii_lowercase(), vec![parse_number(value)?]))
            }
            None => match groups.last_mut() {
                Some(last) => last.1.push(parse_number(token)?),
                None => {
                    return Err(MhdError::Parse(format!(
                        "loop descriptor must start with a KEY=VALUE token, got {token:?}"
                    )))
                }
            },
        }
    }
    let mut center = None;
    let mut radius = None;
    let mut normal = Vec3::new(0.0, 0.0, 1.0);
    let mut count = 128usize;
    for (key, vals) in groups {
        let expect = |n: usize| -> Result<()> {
            if vals.len() == n {
                Ok(())
            } else {
                Err(MhdError::Parse(format!(
                    "loop key {key} expects {n} value(s), got {}",
                    vals.len()
                )))
            }
        };
        match key.as_str() {
            "center" => {
                expect(3)?;
                center = Some(Vec3::new(vals[0], vals[1], vals[2]));
            }
            "radius" => {
                expect(1)?;
                radius = Some(vals[0]);
            }
            "normal" => {
                expect(3)?;
                normal = Vec3::new(vals[0], vals[1], vals[2]);
            }
            "n" => {
                expect(1)?;
                let v = vals[0];
                if v.fract() != 0.0 || !(v >= 4.0 && v <= 1e6) {
                    return Err(MhdError::Parse(format!(
                        "loop key n expects an integer vertex count, got {v}"
                    )));
                }
                count = v as usize;
            }
            other => {
                return Err(MhdError::Parse(format!(
                    "unknown loop key {other:?} (expected center, radius, normal, n)"
                )))
            }
        }
    }
    let center =
        center.ok_or_else(|| MhdError::Parse("loop descriptor needs center=CX,CY,CZ".into()))?;
    let radius =
        radius.ok_or_else(|| MhdError::Parse("loop descriptor needs radius=R".into()))?;
    Ok(LoopSpec { center, radius, normal, count })
}

#[derive(Serialize)]
struct CirculationRow {
    t: f64,
    circulation: f64,
    quadrature_error: f64,
    rate_numeric: f64,
    rate_integral: f64,
    rate_defect: f64,
}

#[derive(Serialize)]
struct LoopDescription {
    center: [f64; 3],
    radius: f64,
    normal: [f64; 3],
    vertices: usize,
}

#[derive(Serialize)]
struct CirculateReport {
    family: String,
    #[serde(rename = "loop")]
    loop_description: LoopDescription,
    advection_tolerance: f64,
    rows: Vec<CirculationRow>,
    initial_circulation: f64,
    max_drift: f64,
    drift_tolerance: f64,
    conserved_expected: bool,
    conserved_observed: bool,
    /// Whether the observation agrees with the family's own claim.
    consistent: bool,
}

fn cmd_circulate(args: CirculateArgs) -> Result<i32> {
    let spec = parse_loop_spec(&args.loop_spec)?;
    let field = args.family.build()?;

    let plan = args.grid.plan()?;
    for (idx, axis) in plan.iter().enumerate() {
        if idx > 0 && !matches!(axis, AxisPlan::Window) {
            return Err(MhdError::Parse(format!(
                "circulate uses only the t axis; drop --grid/--fix for {}",
                AXIS_NAMES[idx]
            )));
        }
    }
    let window = field.sample_window();
    let times = match plan[0] {
        AxisPlan::Fixed(v) => vec![v],
        AxisPlan::Range { min, max, count } => linspace(min, max, count),
        AxisPlan::Window => {
            let (lo, hi) = window.t;
            linspace(lo + 0.25 * (hi - lo), hi - 0.25 * (hi - lo), 5)
        }
    };

    let mut current =
        MaterialLoop::circle(times[0], spec.center, spec.radius, spec.normal, spec.count)?;
    let mut rows = Vec::with_capacity(times.len());
    for &t in &times {
        current = lagrangian::advect(field.as_ref(), &current, t, args.tol)?;
        let circ = lagrangian::circulation(field.as_ref(), &current)?;
        let rate = lagrangian::circulation_rate(field.as_ref(), &current, args.tol)?;
        rows.push(CirculationRow {
            t,
            circulation: circ.value,
            quadrature_error: circ.quadrature_error,
            rate_numeric: rate.numeric,
            rate_integral: rate.integral,
            rate_defect: rate.defect(),
        });
    }

    let initial = rows[0].circulation;
    let max_drift = rows
        .iter()
        .map(|r| (r.circulation - initial).abs())
        .fold(0.0_f64, f64::max);
    let scale = 1.0_f64.max(initial.abs());
    let conserved_observed = max_drift <= args.drift_tol * scale;
    let meta = field.metadata();
    let report = CirculateReport {
        family: field.id().to_string(),
        loop_description: LoopDescription {
            center: spec.center.to_array(),
            radius: spec.radius,
            normal: spec.normal.to_array(),
            vertices: spec.count,
        },
        advection_tolerance: args.tol,
        initial_circulation: initial,
        max_drift,
        drift_tolerance: args.drift_tol,
        conserved_expected: meta.circulation_conserved,
        conserved_observed,
        consistent: conserved_observed == meta.circulation_conserved,
        rows,
    };

    if let Some(path) = &args.out {
        let content = match args.format {
            DumpFormat::Json => to_pretty_json(&report.rows)?,
            DumpFormat::Csv => {
                let mut text = String::from(
                    "t,circulation,quadrature_error,rate_numeric,rate_integral,rate_defect\n",
                );
                for r in &report.rows {
                    let cells = [
                        r.t,
                        r.circulation,
                        r.quadrature_error,
                        r.rate_numeric,
                        r.rate_integral,
                        r.rate_defect,
                    ];
                    let cells: Vec<String> = cells.iter().map(|v| fmt_float(*v)).collect();
                    text.push_str(&cells.join(","));
                    text.push('\n');
                }
                text
            }
        };
        emit(Some(path), &content)?;
    }

    print!("{}", to_pretty_json(&report)?);
    Ok(if report.consistent { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
