//! `westervelt`: verification suites, simulation runs, exact-solution
//! sampling and convergence studies.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 invalid arguments or
//! configuration, 3 numerical failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use westervelt_core::exact::{group_transform, parse_range, Generator};
use westervelt_core::pde::{mms_convergence, observed_orders, run, MmsSetup};
use westervelt_core::{catalog, run_suite, Error, ExactSolution, RunManifest, SolverConfig, Suite};

const OK: u8 = 0;
const MISMATCH: u8 = 1;
const BAD_INPUT: u8 = 2;
const NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "westervelt", version, about = "Verification laboratory for Westervelt's equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run symbolic checks; one line per check.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Also write the reports as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Integrate a configured problem.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample an exact solution on a grid.
    Exact {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Comma-separated `key=value` parameters.
        #[arg(long, default_value = "")]
        params: String,
        /// `t0:t1:nt,x0:x1:nx`.
        #[arg(long)]
        grid: String,
        /// Group transformations `X1..X4=eps`, applied in order.
        #[arg(long = "transform")]
        transforms: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Manufactured-solution convergence study on a Dirichlet grid.
    Mms {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value = "")]
        params: String,
        /// `x0:x1`.
        #[arg(long)]
        domain: String,
        /// `t0:t1`.
        #[arg(long)]
        time: String,
        #[arg(long, default_value_t = 17)]
        nx: usize,
        #[arg(long, default_value_t = 3)]
        refinements: usize,
        #[arg(long, default_value_t = 0.5)]
        cfl: f64,
        /// Exit 1 unless every observed order lies in `lo:hi`.
        #[arg(long)]
        expect_order: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect the catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    Dump {
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Deg2,
    Deg3,
    Deg4a,
    Deg4b,
    Similarity,
}

impl FamilyArg {
    fn name(self) -> &'static str {
        match self {
            FamilyArg::Deg2 => "deg2",
            FamilyArg::Deg3 => "deg3",
            FamilyArg::Deg4a => "deg4a",
            FamilyArg::Deg4b => "deg4b",
            FamilyArg::Similarity => "similarity",
        }
    }
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if e.is_numerical() { NUMERICAL } else { BAD_INPUT };
        Failure { code, msg: e.to_string() }
    }
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure { code: BAD_INPUT, msg: msg.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let code = match dispatch(cli.command, argv) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    };
    ExitCode::from(code)
}

fn dispatch(cmd: Command, argv: Vec<String>) -> Result<u8, Failure> {
    match cmd {
        Command::Verify { suite, json } => verify(&suite, json.as_deref()),
        Command::Simulate { config, out } => simulate(&config, &out, argv),
        Command::Exact { family, params, grid, transforms, out } => {
            exact(family, &params, &grid, &transforms, &out, argv)
        }
        Command::Mms { family, params, domain, time, nx, refinements, cfl, expect_order, out } => {
            let setup = mms_setup(&domain, &time, nx, cfl)?;
            mms(family, &params, setup, refinements, expect_order.as_deref(), out.as_deref(), argv)
        }
        Command::Catalog { action: CatalogAction::Dump { format: Format::Json } } => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{}", catalog::dump_json());
            Ok(OK)
        }
    }
}

fn verify(suite: &str, json: Option<&Path>) -> Result<u8, Failure> {
    let selected = if suite == "all" { None } else { Some(suite.parse::<Suite>()?) };
    let outcomes = run_suite(selected);
    let mut stdout = std::io::stdout().lock();
    for o in &outcomes {
        writeln!(stdout, "{o}").map_err(|e| bad(e.to_string()))?;
    }
    let mismatches = outcomes.iter().filter(|o| !o.agrees).count();
    eprintln!("{} checks, {} disagree with expectations", outcomes.len(), mismatches);
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&outcomes).expect("reports serialize");
        fs::write(path, text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    }
    Ok(if mismatches == 0 { OK } else { MISMATCH })
}

fn finish(manifest: &mut RunManifest, dir: &Path, name: &str, result: Result<u8, Failure>) -> Result<u8, Failure> {
    let code = match &result {
        Ok(c) => *c,
        Err(f) => f.code,
    };
    manifest.finish(code as i32);
    if dir.is_dir() {
        manifest.write(&dir.join(name))?;
    }
    result
}

fn simulate(config: &Path, out: &Path, argv: Vec<String>) -> Result<u8, Failure> {
    let text = fs::read_to_string(config).map_err(|e| bad(format!("{}: {e}", config.display())))?;
    let cfg = SolverConfig::parse(&text)?;
    let pairs: serde_json::Map<String, serde_json::Value> =
        cfg.to_pairs().into_iter().map(|(k, v)| (k, serde_json::Value::String(v))).collect();
    let mut manifest = RunManifest::begin("simulate", argv, serde_json::Value::Object(pairs));
    fs::create_dir_all(out).map_err(|e| bad(format!("{}: {e}", out.display())))?;
    fs::write(out.join("config.resolved"), cfg.to_text()).map_err(|e| bad(e.to_string()))?;
    let result = match run(&cfg, out) {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            manifest.warnings = summary.warnings.clone();
            manifest.outputs = (0..summary.outputs)
                .map(|i| format!("fields_{i:04}.csv"))
                .chain(["monitors.csv".to_string(), "config.resolved".to_string()])
                .collect();
            eprintln!("{} steps to t = {}, {} snapshots", summary.steps, summary.t_final, summary.outputs);
            Ok(OK)
        }
        Err(e) => Err(Failure::from(e)),
    };
    finish(&mut manifest, out, "run_manifest.json", result)
}

fn parse_params(s: &str) -> Result<BTreeMap<String, String>, Failure> {
    let mut m = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| bad(format!("parameter `{item}` must be key=value")))?;
        if m.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(bad(format!("duplicate parameter `{}`", k.trim())));
        }
    }
    Ok(m)
}

fn build_solution(family: FamilyArg, params: &str, transforms: &[String]) -> Result<ExactSolution, Failure> {
    let mut sol = ExactSolution::from_params(family.name(), &parse_params(params)?)?;
    for t in transforms {
        let (g, eps) = t.split_once('=').ok_or_else(|| bad(format!("transform `{t}` must be Xk=eps")))?;
        let g: Generator = g.trim().parse()?;
        let eps: f64 = eps.trim().parse().map_err(|_| bad(format!("transform `{t}`: bad epsilon")))?;
        sol = group_transform(&sol, g, eps);
    }
    Ok(sol)
}

fn exact(
    family: FamilyArg,
    params: &str,
    grid: &str,
    transforms: &[String],
    out: &Path,
    argv: Vec<String>,
) -> Result<u8, Failure> {
    let sol = build_solution(family, params, transforms)?;
    let (tr, xr) = grid.split_once(',').ok_or_else(|| bad("grid must be t0:t1:nt,x0:x1:nx"))?;
    let (ts, xs) = (parse_range(tr)?, parse_range(xr)?);
    let config = serde_json::json!({ "solution": sol, "grid": grid });
    let mut manifest = RunManifest::begin("exact", argv, config);
    let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf();
    fs::create_dir_all(&dir).map_err(|e| bad(format!("{}: {e}", dir.display())))?;
    let result = sol.sample(&ts, &xs).map_err(Failure::from).and_then(|rows| {
        let mut body = String::from("t,x,p,v\n");
        for [t, x, p, v] in rows {
            body.push_str(&format!("{t},{x},{p},{v}\n"));
        }
        fs::write(out, body).map_err(|e| bad(format!("{}: {e}", out.display())))?;
        Ok(OK)
    });
    manifest.outputs = vec![out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()];
    let name = format!("{}.manifest.json", out.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default());
    finish(&mut manifest, &dir, &name, result)
}

fn pair(s: &str, what: &str) -> Result<(f64, f64), Failure> {
    let err = || bad(format!("{what} must be a:b, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(err)?;
    Ok((a.trim().parse().map_err(|_| err())?, b.trim().parse().map_err(|_| err())?))
}

fn mms_setup(domain: &str, time: &str, nx: usize, cfl: f64) -> Result<MmsSetup, Failure> {
    let (x0, x1) = pair(domain, "domain")?;
    let (t0, t1) = pair(time, "time")?;
    if x1 <= x0 || t1 <= t0 {
        return Err(bad("domain and time intervals must be increasing"));
    }
    if nx < 5 || !(cfl > 0.0 && cfl <= 1.0) {
        return Err(bad("need nx >= 5 and cfl in (0, 1]"));
    }
    Ok(MmsSetup { x0, x1, t0, t1, nx, cfl })
}

fn mms(
    family: FamilyArg,
    params: &str,
    setup: MmsSetup,
    refinements: usize,
    expect: Option<&str>,
    out: Option<&Path>,
    argv: Vec<String>,
) -> Result<u8, Failure> {
    let sol = build_solution(family, params, &[])?;
    let window = expect.map(|e| pair(e, "expect-order")).transpose()?;
    let config = serde_json::json!({ "solution": sol, "setup": setup, "refinements": refinements });
    let mut manifest = RunManifest::begin("mms", argv, config);
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| bad(format!("{}: {e}", dir.display())))?;
    }
    let result = mms_convergence(&sol, &setup, refinements).map_err(Failure::from).and_then(|levels| {
        let orders = observed_orders(&levels);
        let mut body = String::from("nx,h,max_error,order\n");
        for (i, l) in levels.iter().enumerate() {
            let order = if i == 0 { String::new() } else { orders[i - 1].to_string() };
            body.push_str(&format!("{},{},{},{}\n", l.nx, l.h, l.max_error, order));
        }
        print!("{body}");
        if let Some(dir) = out {
            fs::write(dir.join("mms.csv"), &body).map_err(|e| bad(e.to_string()))?;
        }
        Ok(match window {
            Some((lo, hi)) if orders.iter().any(|o| !(lo..=hi).contains(o)) => MISMATCH,
            _ => OK,
        })
    });
    match out {
        Some(dir) => {
            manifest.outputs = vec!["mms.csv".into()];
            finish(&mut manifest, dir, "run_manifest.json", result)
        }
        None => result,
    }
}
