use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ellsurf::report;
use ellsurf::spec::{self, CurveSpec};
use ellsurf::sweep::{self, FamilySpec};
use ellsurf::RunError;
use ellsurf_core::funcfield::Place;
use ellsurf_core::lfun;
use ellsurf_core::wmodel::WeierstrassCurve;
use serde_json::{json, Value};

/// Elliptic surfaces over finite fields: local data, L-functions, torsion
/// and predicted orders of motivic cohomology groups.
#[derive(Parser)]
#[command(name = "ellsurf", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bad places, Kodaira types and conductor.
    Analyze {
        spec: PathBuf,
        /// Only the table of bad fibers.
        #[arg(long)]
        fibers_only: bool,
        /// Print JSON instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Same as `analyze --fibers-only`.
    Fibers {
        spec: PathBuf,
    },
    /// L(E,T) with special values and consistency checks.
    Lfunction {
        spec: PathBuf,
        /// Check the functional equation and root magnitudes.
        #[arg(long)]
        check_fe: bool,
        /// Compare fiberwise point counts with the Lefschetz trace for n = 1..N.
        #[arg(long, value_name = "N")]
        check_lefschetz: Option<usize>,
    },
    /// Full order report.
    Predict {
        spec: PathBuf,
        /// Weight j >= 3 to include (repeatable, or comma separated).
        #[arg(long = "j", value_delimiter = ',')]
        j: Vec<u32>,
        /// Good place to remove from U besides the bad ones (repeatable, or `;` separated).
        #[arg(long, value_delimiter = ';')]
        remove: Vec<String>,
    },
    /// Run a family of curves into a JSONL or CSV file (by extension); resumable.
    Sweep {
        family: PathBuf,
        output: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = 64)]
        batch: usize,
    },
    /// Built-in benchmark and oracle checks.
    Selftest,
}

/// Writes to stdout; a closed pipe is not an error.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = write!(std::io::stdout().lock(), $($arg)*);
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn load(path: &Path) -> Result<(CurveSpec, WeierstrassCurve), RunError> {
    let s = CurveSpec::read(path)?;
    let e = s.curve()?;
    Ok((s, e))
}

fn print_json(v: &Value) {
    outln!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn analyze(path: &Path, fibers_only: bool, as_json: bool) -> Result<ExitCode, RunError> {
    let (s, e) = load(path)?;
    let sd = ellsurf::surface(&e)?;
    if as_json {
        let mut v = report::analyze(&s, &sd);
        if fibers_only {
            v = json!({ "bad_places": v["bad_places"].clone() });
        }
        print_json(&v);
    } else {
        out!("{}", report::fiber_table(&sd));
        if !fibers_only {
            outln!("conductor degree {}", sd.conductor_degree());
            if let Ok(n) = sd.expected_degree() {
                outln!("deg L(E,T) {}", n);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn lfunction(path: &Path, check_fe: bool, check_lefschetz: Option<usize>) -> Result<ExitCode, RunError> {
    let (_, e) = load(path)?;
    let sd = ellsurf::surface(&e)?;
    let euler = lfun::euler_product(&sd)?;
    let l = &euler.l;
    let mut ok = euler.guard.iter().all(|&g| g == 0) && l.degree() as u32 + 4 == sd.conductor_degree();
    let mut verdicts = serde_json::Map::new();
    verdicts.insert("degree_and_guard".into(), json!(if ok { "pass" } else { "fail" }));
    let eps = lfun::functional_equation_sign(l);
    if check_fe {
        verdicts.insert("functional_equation".into(), json!(if eps.is_some() { "pass" } else { "fail" }));
        let dev = lfun::root_magnitude_deviation(l);
        verdicts.insert("root_magnitudes".into(), json!({ "max_deviation": dev, "verdict": if dev < 1e-6 { "pass" } else { "warning" } }));
        ok &= eps.is_some();
    }
    let mut v = report::lpoly(l);
    v["epsilon"] = json!(eps);
    v["guard"] = json!(euler.guard.iter().map(|g| g.to_string()).collect::<Vec<_>>());
    v["conductor_degree"] = json!(euler.conductor_degree);
    let sp = report::special_values(l);
    v["L_at_0"] = sp["L_at_0"].clone();
    v["leading"] = sp["leading"].clone();
    if let Some(n) = check_lefschetz {
        let z = lfun::surface_zeta_from(&sd, l);
        let rows = lfun::lefschetz_check(&sd, &z, n, &[])?;
        let all = rows.iter().all(|(a, b)| a == b);
        ok &= all;
        v["lefschetz"] = report::lefschetz_rows(&rows);
        verdicts.insert("lefschetz".into(), json!(if all { "pass" } else { "fail" }));
    }
    v["verdicts"] = Value::Object(verdicts);
    print_json(&v);
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn predict(path: &Path, weights: &[u32], remove: &[String]) -> Result<ExitCode, RunError> {
    let (_, e) = load(path)?;
    let extra = remove
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| spec::parse_place(e.field(), s))
        .collect::<Result<Vec<Place>, _>>()?;
    let (a, r) = ellsurf::run(&e, &extra, weights)?;
    print_json(&report::order_report(&r, &a.torsion));
    Ok(if r.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_sweep(family: &Path, output: &Path, jobs: Option<usize>, batch: usize) -> Result<ExitCode, RunError> {
    let text = std::fs::read_to_string(family)
        .map_err(|e| spec::SpecError::Io { path: family.display().to_string(), msg: e.to_string() })?;
    let fam: FamilySpec = serde_json::from_str(&text)
        .map_err(|e| spec::SpecError::Json { line: e.line(), column: e.column(), msg: e.to_string() })?;
    if matches!(fam.p, 2 | 3) {
        return Err(spec::SpecError::UnsupportedCharacteristic(fam.p).into());
    }
    if let Some(n) = jobs {
        // the global pool can only be configured once; ignore a second attempt
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let summary = sweep::sweep(&fam, output, batch).map_err(|e| spec::SpecError::Io { path: output.display().to_string(), msg: e.to_string() })?;
    eprintln!("{}", serde_json::to_string(&summary).expect("json"));
    let ok = summary.errors == 0 && summary.all_pass == summary.curves;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.cmd {
        Cmd::Analyze { spec, fibers_only, json } => analyze(spec, *fibers_only, *json),
        Cmd::Fibers { spec } => analyze(spec, true, false),
        Cmd::Lfunction { spec, check_fe, check_lefschetz } => lfunction(spec, *check_fe, *check_lefschetz),
        Cmd::Predict { spec, j, remove } => predict(spec, j, remove),
        Cmd::Sweep { family, output, jobs, batch } => run_sweep(family, output, *jobs, *batch),
        Cmd::Selftest => {
            let (lines, ok) = ellsurf::selftest::run();
            for l in lines {
                outln!("{}", l);
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
