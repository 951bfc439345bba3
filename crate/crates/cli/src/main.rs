//! `conslaw`: batch front end for catalog verification, single-law checks,
//! multiplier reconstruction and numerical monitoring.
//!
//! Exit codes: 0 all checks passed, 1 verification failure, 2 runtime
//! failure (including numerical blow-up), 3 usage, parse or configuration
//! error.

mod spec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use conslaw::catalog::{adjudicate, export_catalog, list_cases, verify_entries};
use conslaw::jetcalc::PdeSystem;
use conslaw::simulate::{convergence_study, run, ConfigFile, Order, SimError};
use conslaw::verifier::{
    check_characteristic, check_determining, check_onsolution, multiplier_of_density, reconstruct, MultiplierPair,
    VerificationReport, VerifyError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "conslaw",
    version,
    about = "Conservation laws of coupled semilinear wave systems"
)]
struct Cli {
    /// Directory for report artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify every catalog family at random admissible parameters.
    VerifyCatalog {
        #[arg(long, default_value_t = 3)]
        instantiations: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Check that (T, X) is a conservation law of the system.
    Check {
        #[arg(long, allow_hyphen_values = true)]
        system: String,
        #[arg(long = "T", allow_hyphen_values = true)]
        t: String,
        #[arg(long = "X", allow_hyphen_values = true)]
        x: String,
    },
    /// Check the multiplier determining system for (Qu, Qv).
    Determining {
        #[arg(long, allow_hyphen_values = true)]
        system: String,
        #[arg(long = "Qu", allow_hyphen_values = true)]
        qu: String,
        #[arg(long = "Qv", allow_hyphen_values = true)]
        qv: String,
    },
    /// Reconstruct a density/flux pair from a multiplier.
    Reconstruct {
        #[arg(long, allow_hyphen_values = true)]
        system: String,
        #[arg(long = "Qu", allow_hyphen_values = true)]
        qu: String,
        #[arg(long = "Qv", allow_hyphen_values = true)]
        qv: String,
    },
    /// Run a simulation described by a JSON configuration.
    Simulate { config: PathBuf },
    /// Run a convergence study at N, 2N, 4N, ... cells.
    Converge {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Write the catalog as key-value blocks.
    ExportCatalog { path: PathBuf },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(_) | SimError::Plan(_) | SimError::System(_) | SimError::Catalog(_) => {
                Failure::Usage(e.to_string())
            }
            SimError::BlowUp { .. } | SimError::SingularFloor { .. } => Failure::Runtime(e.to_string()),
        }
    }
}

struct Report {
    passed: bool,
    json: Value,
    text: String,
    /// Extra files written under `--out`.
    artifacts: Vec<(String, String)>,
}

fn usage(m: String) -> Failure {
    Failure::Usage(m)
}

fn report_text(title: &str, r: &VerificationReport) -> String {
    let mut s = format!("{}: {}\n", title, if r.passed { "passed" } else { "FAILED" });
    for (name, e) in r.nonzero_residuals() {
        s.push_str(&format!("  {} = {}\n", name, e));
    }
    for n in &r.notes {
        s.push_str(&format!("  note: {}\n", n));
    }
    s
}

fn system_json(sys: &PdeSystem) -> Value {
    json!({
        "a": sys.a.to_string(), "b": sys.b.to_string(),
        "c": sys.c.to_string(), "f": sys.f.to_string(),
        "d": sys.d.to_string(), "g": sys.g.to_string(),
    })
}

fn verify_catalog(instantiations: usize, seed: u64) -> Result<Report, Failure> {
    if instantiations == 0 {
        return Err(usage("--instantiations must be positive".into()));
    }
    let mut families = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for entry in list_cases() {
        let r = verify_entries(std::slice::from_ref(&entry), instantiations, seed);
        passed &= r.passed;
        text.push_str(&format!(
            "{} ({}) {}: {} [{}]\n",
            entry.family,
            entry.case_id,
            entry.name,
            if r.passed { "passed" } else { "FAILED" },
            entry.hypothesis
        ));
        for (name, e) in r.nonzero_residuals() {
            text.push_str(&format!("  {} = {}\n", name, e));
        }
        families.push(json!({
            "family": entry.family,
            "case": entry.case_id.to_string(),
            "name": entry.name,
            "hypothesis": entry.hypothesis,
            "passed": r.passed,
            "checks": r.residuals.len(),
            "report": r.to_json(),
        }));
    }
    let mut adjudications = Vec::new();
    for entry in list_cases()
        .into_iter()
        .filter(|e| ["T2", "T3", "T4"].contains(&e.family))
    {
        let adj = adjudicate(&entry).map_err(|e| Failure::Runtime(e.to_string()))?;
        let shipped = adj.shipped;
        passed &= adj.settled();
        text.push_str(&format!(
            "adjudication {}: printed {}, swapped {}, passing {}, shipped {}, equal at alpha = beta: {}\n",
            entry.family,
            adj.printed_passes,
            adj.swapped_passes,
            adj.passing_variant().unwrap_or("none/both"),
            shipped,
            adj.equal_at_alpha_eq_beta
        ));
        adjudications.push(json!({
            "family": entry.family,
            "case": entry.case_id.to_string(),
            "printed_passes": adj.printed_passes,
            "swapped_passes": adj.swapped_passes,
            "passing_variant": adj.passing_variant(),
            "shipped_variant": shipped,
            "equal_at_alpha_eq_beta": adj.equal_at_alpha_eq_beta,
        }));
    }
    text.push_str(&format!(
        "verify-catalog: {}\n",
        if passed { "passed" } else { "FAILED" }
    ));
    Ok(Report {
        passed,
        json: json!({
            "command": "verify-catalog",
            "instantiations": instantiations,
            "seed": seed,
            "passed": passed,
            "families": families,
            "adjudications": adjudications,
        }),
        text,
        artifacts: Vec::new(),
    })
}

fn check(system: &str, t: &str, x: &str) -> Result<Report, Failure> {
    let sys = spec::parse_system(system).map_err(usage)?;
    let t = spec::parse_expr(t, "T").map_err(usage)?;
    let x = spec::parse_expr(x, "X").map_err(usage)?;
    let onsolution = check_onsolution(&t, &x, &sys)?;
    let mut text = report_text("onsolution", &onsolution);
    let mut json = json!({
        "command": "check",
        "system": system_json(&sys),
        "T": t.to_string(),
        "X": x.to_string(),
        "onsolution": onsolution.to_json(),
    });
    let mut passed = onsolution.passed;
    match multiplier_of_density(&t, &sys) {
        Ok(q) => {
            let ch = check_characteristic(&t, &x, &q, &sys)?;
            passed &= ch.passed;
            text.push_str(&format!("multiplier: Qu = {}, Qv = {}\n", q.q_u, q.q_v));
            text.push_str(&report_text("characteristic", &ch));
            json["multiplier"] = json!({"Qu": q.q_u.to_string(), "Qv": q.q_v.to_string()});
            json["characteristic"] = ch.to_json();
        }
        Err(VerifyError::HigherOrder(e)) => {
            text.push_str(&format!("multiplier: not low order ({})\n", e));
            json["multiplier"] = Value::Null;
        }
        Err(e) => return Err(e.into()),
    }
    json["passed"] = json!(passed);
    text.push_str(&format!("check: {}\n", if passed { "passed" } else { "FAILED" }));
    Ok(Report {
        passed,
        json,
        text,
        artifacts: Vec::new(),
    })
}

fn multiplier(system: &str, qu: &str, qv: &str) -> Result<(PdeSystem, MultiplierPair), Failure> {
    let sys = spec::parse_system(system).map_err(usage)?;
    let q = MultiplierPair::new(
        spec::parse_expr(qu, "Qu").map_err(usage)?.normalize(),
        spec::parse_expr(qv, "Qv").map_err(usage)?.normalize(),
    );
    Ok((sys, q))
}

fn determining(system: &str, qu: &str, qv: &str) -> Result<Report, Failure> {
    let (sys, q) = multiplier(system, qu, qv)?;
    let r = check_determining(&q, &sys)?;
    Ok(Report {
        passed: r.passed,
        json: json!({
            "command": "determining",
            "system": system_json(&sys),
            "Qu": q.q_u.to_string(),
            "Qv": q.q_v.to_string(),
            "passed": r.passed,
            "determining": r.to_json(),
        }),
        text: report_text("determining", &r),
        artifacts: Vec::new(),
    })
}

fn reconstruct_cmd(system: &str, qu: &str, qv: &str) -> Result<Report, Failure> {
    let (sys, q) = multiplier(system, qu, qv)?;
    let base = json!({
        "command": "reconstruct",
        "system": system_json(&sys),
        "Qu": q.q_u.to_string(),
        "Qv": q.q_v.to_string(),
    });
    match reconstruct(&q, &sys) {
        Ok(pair) => {
            let r = check_onsolution(&pair.t_density, &pair.x_flux, &sys)?;
            let mut json = base;
            json["T"] = json!(pair.t_density.to_string());
            json["X"] = json!(pair.x_flux.to_string());
            json["passed"] = json!(r.passed);
            json["onsolution"] = r.to_json();
            let text = format!(
                "T = {}\nX = {}\n{}",
                pair.t_density,
                pair.x_flux,
                report_text("onsolution", &r)
            );
            Ok(Report {
                passed: r.passed,
                json,
                text,
                artifacts: Vec::new(),
            })
        }
        Err(e @ (VerifyError::Inconsistent(_) | VerifyError::HigherOrder(_))) => {
            let mut json = base;
            json["passed"] = json!(false);
            json["error"] = json!(e.to_string());
            Ok(Report {
                passed: false,
                json,
                text: format!("reconstruct: FAILED\n  {}\n", e),
                artifacts: Vec::new(),
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn load_config(path: &Path) -> Result<conslaw::simulate::SimConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {}", path.display(), e)))?;
    Ok(ConfigFile::from_json(&text)?.build()?)
}

fn simulate(path: &Path) -> Result<Report, Failure> {
    let cfg = load_config(path)?;
    let series = run(&cfg)?;
    let mut json = series.summary_json();
    json["command"] = json!("simulate");
    json["passed"] = json!(true);
    let mut text = format!(
        "simulate: {} steps, dx = {:e}, dt = {:e}\n",
        series.steps, series.dx, series.dt
    );
    for (name, d) in series.names.iter().zip(&series.drift) {
        text.push_str(&format!("  {}: drift {:e}\n", name, d));
    }
    if let Some(t) = series.contact_time {
        text.push_str(&format!("  warning: solution reached the boundary at t = {}\n", t));
    }
    Ok(Report {
        passed: true,
        json,
        text,
        artifacts: vec![("series.csv".into(), series.to_csv())],
    })
}

fn converge(path: &Path, levels: usize) -> Result<Report, Failure> {
    let cfg = load_config(path)?;
    let study = convergence_study(&cfg, levels)?;
    let mut json = study.to_json();
    json["command"] = json!("converge");
    json["passed"] = json!(true);
    let mut text = format!("converge: cells {:?}\n", study.cells);
    for (k, name) in study.names.iter().enumerate() {
        let order = match study.orders[k] {
            Order::Exact => "exact".to_string(),
            Order::Fitted(p) => format!("{:.3}", p),
            Order::Undetermined => "undetermined".to_string(),
        };
        text.push_str(&format!("  {}: drift {:?}, order {}\n", name, study.drift[k], order));
    }
    Ok(Report {
        passed: true,
        json,
        text,
        artifacts: Vec::new(),
    })
}

fn export(path: &Path) -> Result<Report, Failure> {
    let catalog = export_catalog();
    std::fs::write(path, &catalog).map_err(|e| Failure::Runtime(format!("{}: {}", path.display(), e)))?;
    Ok(Report {
        passed: true,
        json: json!({"command": "export-catalog", "path": path.display().to_string(), "families": list_cases().len(), "passed": true}),
        text: format!(
            "export-catalog: wrote {} families to {}\n",
            list_cases().len(),
            path.display()
        ),
        artifacts: Vec::new(),
    })
}

fn dispatch(cmd: &Command) -> Result<Report, Failure> {
    spec::max_jet_order().map_err(usage)?;
    match cmd {
        Command::VerifyCatalog { instantiations, seed } => verify_catalog(*instantiations, *seed),
        Command::Check { system, t, x } => check(system, t, x),
        Command::Determining { system, qu, qv } => determining(system, qu, qv),
        Command::Reconstruct { system, qu, qv } => reconstruct_cmd(system, qu, qv),
        Command::Simulate { config } => simulate(config),
        Command::Converge { config, levels } => converge(config, *levels),
        Command::ExportCatalog { path } => export(path),
    }
}

fn write_artifacts(dir: &Path, report: &Report) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(&report.json)? + "\n",
    )?;
    std::fs::write(dir.join("report.txt"), &report.text)?;
    for (name, content) in &report.artifacts {
        std::fs::write(dir.join(name), content)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report = match dispatch(&cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {}", m);
            return ExitCode::from(3);
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {}", m);
            return ExitCode::from(2);
        }
    };
    match cli.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report.json).expect("report serializes")
        ),
        Format::Text => print!("{}", report.text),
    }
    if let Some(dir) = &cli.out {
        if let Err(e) = write_artifacts(dir, &report) {
            eprintln!("error: writing {}: {}", dir.display(), e);
            return ExitCode::from(2);
        }
    }
    ExitCode::from(if report.passed { 0 } else { 1 })
}
