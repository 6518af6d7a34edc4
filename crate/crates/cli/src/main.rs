//! `geogirth`: build, verify and export box and line families with large
//! girth and chromatic number, and manage the certificates behind them.

mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use geogirth::boxworld::{build_box_family, StepOptions};
use geogirth::gallai::{
    provider_pigeonhole, provider_search, provider_vdw, verify_certificate, Check, GallaiCertificate, GroundSet,
    DEFAULT_VERIFY_BUDGET,
};
use geogirth::lineworld::{build_line_family, build_shift_system, LineStepOptions};
use geogirth::scene::{verify_scene, Checks, Scene};
use geogirth::{ProviderPolicy, Rat};
use serde_json::{json, Value};

use report::{box_status, gallai_status, levels, line_status, RunReport, Status};

/// Multiplies every default budget; useful on slow or fast machines.
const SCALE_VAR: &str = "GEOGIRTH_BUDGET_SCALE";

#[derive(Parser)]
#[command(
    name = "geogirth",
    version,
    about = "Exact geometric graphs with large girth and chromatic number"
)]
struct Cli {
    /// Print the full report as JSON instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a family and write its scene, graph and report.
    Build(BuildArgs),
    /// Recompute properties of a stored scene from its coordinates.
    Verify(VerifyArgs),
    /// Make, check or search for Gallai certificates.
    Gallai {
        #[command(subcommand)]
        action: GallaiAction,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Kind {
    Boxes,
    Lines,
    Shift,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum Provider {
    Pigeonhole,
    Vdw,
    Search,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum CheckKind {
    Geometry,
    Girth,
    Chroma,
    All,
}

#[derive(Args)]
struct BuildArgs {
    kind: Kind,
    /// Required girth.
    #[arg(long, default_value_t = 6)]
    g: usize,
    /// Required chromatic number.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Size of the value set for `shift`.
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Provider::Pigeonhole)]
    provider: Provider,
    /// Length of the progression set used by the `vdw` provider instead of its table.
    #[arg(long)]
    vdw_length: Option<usize>,
    /// Seed for `shift` value sampling.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Node budget for providers: small, medium, large or a number.
    #[arg(long, value_parser = parse_budget)]
    budget: Option<u64>,
    /// Node budget for the final chromatic number check.
    #[arg(long, value_parser = parse_budget)]
    chroma_budget: Option<u64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    checks: Vec<CheckKind>,
    /// Output directory for scene.json, graph.dimacs, labels.json and report.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    scene: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    checks: Vec<CheckKind>,
    #[arg(long, value_parser = parse_budget)]
    chroma_budget: Option<u64>,
    /// Also write the report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct GallaiParams {
    /// Ground set, comma separated rationals.
    #[arg(long = "T", value_delimiter = ',', required = true, allow_hyphen_values = true)]
    t: Vec<Rat>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    g: usize,
    #[arg(long, value_parser = parse_budget)]
    budget: Option<u64>,
    /// Write the certificate here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GallaiAction {
    /// Certificate from the pigeonhole (pairs) or Van der Waerden provider.
    Make {
        #[command(flatten)]
        params: GallaiParams,
        #[arg(long, value_enum)]
        provider: Option<Provider>,
        #[arg(long)]
        vdw_length: Option<usize>,
    },
    /// Re-run every check of a stored certificate from scratch.
    Check {
        path: PathBuf,
        #[arg(long, value_parser = parse_budget)]
        budget: Option<u64>,
    },
    /// Search for a sparse certificate within a node budget.
    Search {
        #[command(flatten)]
        params: GallaiParams,
    },
}

fn budget_scale() -> f64 {
    std::env::var(SCALE_VAR)
        .ok()
        .and_then(|v| v.parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0)
        .unwrap_or(1.0)
}

fn scaled(base: u64) -> u64 {
    ((base as f64) * budget_scale()).max(1.0) as u64
}

fn parse_budget(s: &str) -> Result<u64, String> {
    match s {
        "small" => Ok(scaled(100_000)),
        "medium" => Ok(scaled(10_000_000)),
        "large" => Ok(scaled(1_000_000_000)),
        n => n
            .parse()
            .map_err(|_| format!("expected small, medium, large or a number, got {n:?}")),
    }
}

fn default_chroma_budget() -> u64 {
    scaled(10_000_000)
}

fn selected(checks: &[CheckKind]) -> Checks {
    let all = checks.contains(&CheckKind::All);
    Checks {
        geometry: all || checks.contains(&CheckKind::Geometry),
        girth: all || checks.contains(&CheckKind::Girth),
        chroma: all || checks.contains(&CheckKind::Chroma),
    }
}

fn policy(provider: Provider, vdw_length: Option<usize>, budget: Option<u64>) -> ProviderPolicy {
    match provider {
        Provider::Pigeonhole => ProviderPolicy::Pigeonhole,
        Provider::Vdw => ProviderPolicy::Vdw {
            length_hint: vdw_length,
            verify_budget: budget.unwrap_or_else(|| scaled(DEFAULT_VERIFY_BUDGET)),
        },
        Provider::Search => ProviderPolicy::Search {
            budget: budget.unwrap_or_else(|| scaled(10_000_000)),
        },
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Failed builds still leave a report behind when an output directory was given.
fn failed_build(mut report: RunReport, out: Option<&Path>) -> Result<RunReport> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        report.files.push("report.json".into());
        write(&dir.join("report.json"), &report.to_json())?;
    }
    Ok(report)
}

fn build(a: &BuildArgs) -> Result<RunReport> {
    let mut params = BTreeMap::new();
    let kind = match a.kind {
        Kind::Boxes => "boxes",
        Kind::Lines => "lines",
        Kind::Shift => "shift",
    };
    params.insert("kind".into(), json!(kind));
    if a.kind == Kind::Shift {
        params.insert("n".into(), json!(a.n));
        params.insert("seed".into(), json!(a.seed));
    } else {
        params.insert("g".into(), json!(a.g));
        params.insert("k".into(), json!(a.k));
        params.insert("provider".into(), json!(format!("{:?}", a.provider).to_lowercase()));
        if let Some(v) = a.vdw_length {
            params.insert("vdw_length".into(), json!(v));
        }
        if let Some(b) = a.budget {
            params.insert("budget".into(), json!(b));
        }
    }
    let chroma_budget = a.chroma_budget.unwrap_or_else(default_chroma_budget);
    params.insert("chroma_budget".into(), json!(chroma_budget));
    let mut report = RunReport::new("build", params);

    let pol = policy(a.provider, a.vdw_length, a.budget);
    let scene = match a.kind {
        Kind::Boxes => match build_box_family(a.g, a.k, &pol, StepOptions::default()) {
            Ok(f) => {
                report.levels = levels(&f.provenance, f.len());
                Scene::from_boxes(&f, a.g, a.k)
            }
            Err(e) => {
                report.fail(box_status(&e), e.to_string());
                return failed_build(report, a.out.as_deref());
            }
        },
        Kind::Lines => match build_line_family(a.g, a.k, &pol, LineStepOptions::default()) {
            Ok(f) => {
                report.levels = levels(&f.provenance, f.len());
                Scene::from_lines(&f, a.g, a.k)
            }
            Err(e) => {
                report.fail(line_status(&e), e.to_string());
                return failed_build(report, a.out.as_deref());
            }
        },
        Kind::Shift => match build_shift_system(a.n, a.seed) {
            Ok(s) => Scene::from_shift(&s, Some(a.seed)),
            Err(e) => {
                report.fail(line_status(&e), e.to_string());
                return failed_build(report, a.out.as_deref());
            }
        },
    };
    for l in &report.levels {
        let line = match &l.base {
            Some(b) => format!("level 0: {b} base, {} objects", l.objects),
            None => format!("level {}: {} objects", l.level, l.objects),
        };
        report.summary.push(line);
    }
    let verification = verify_scene(&scene, selected(&a.checks), chroma_budget);
    report.absorb(verification);

    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let graph = scene.graph().map_err(anyhow::Error::msg)?;
        let files = [
            ("scene.json", scene.to_json()),
            ("graph.dimacs", graph.to_dimacs()),
            (
                "labels.json",
                format!("{}\n", serde_json::to_string_pretty(&graph.label_sidecar())?),
            ),
        ];
        for (name, text) in files {
            write(&dir.join(name), &text)?;
            report.files.push(name.to_string());
        }
        report.files.push("report.json".into());
        write(&dir.join("report.json"), &report.to_json())?;
    }
    Ok(report)
}

fn verify(a: &VerifyArgs) -> Result<RunReport> {
    let text = fs::read_to_string(&a.scene).with_context(|| format!("reading {}", a.scene.display()))?;
    let scene = Scene::from_json(&text).with_context(|| format!("parsing {}", a.scene.display()))?;
    let chroma_budget = a.chroma_budget.unwrap_or_else(default_chroma_budget);
    let mut params = BTreeMap::new();
    params.insert("scene".into(), json!(a.scene.display().to_string()));
    params.insert("chroma_budget".into(), json!(chroma_budget));
    let mut report = RunReport::new("verify", params);
    report.absorb(verify_scene(&scene, selected(&a.checks), chroma_budget));
    if let Some(p) = &a.report {
        write(p, &report.to_json())?;
    }
    Ok(report)
}

fn gallai_params(p: &GallaiParams) -> BTreeMap<String, Value> {
    let mut params = BTreeMap::new();
    params.insert("T".into(), json!(p.t.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
    params.insert("k".into(), json!(p.k));
    params.insert("g".into(), json!(p.g));
    if let Some(b) = p.budget {
        params.insert("budget".into(), json!(b));
    }
    params
}

fn finish_certificate(
    report: &mut RunReport,
    result: Result<GallaiCertificate, geogirth::GallaiError>,
    out: Option<&PathBuf>,
) -> Result<()> {
    match result {
        Ok(cert) => {
            report.summary.push(format!(
                "certificate: |X| = {}, {} copies, colouring {:?}, sparsity {:?}, copies {:?}",
                cert.points.len(),
                cert.copies.len(),
                cert.flags.coloring,
                cert.flags.sparsity,
                cert.flags.copies_complete
            ));
            if let Some(p) = out {
                write(p, &format!("{}\n", serde_json::to_string_pretty(&cert)?))?;
                report.files.push(p.display().to_string());
            }
        }
        Err(e) => report.fail(gallai_status(&e), e.to_string()),
    }
    Ok(())
}

fn gallai(action: &GallaiAction) -> Result<RunReport> {
    match action {
        GallaiAction::Make {
            params,
            provider,
            vdw_length,
        } => {
            let mut report = RunReport::new("gallai make", gallai_params(params));
            let t = match GroundSet::from_unsorted(params.t.clone()) {
                Ok(t) => t,
                Err(e) => {
                    report.fail(Status::AssertionFailed, e.to_string());
                    return Ok(report);
                }
            };
            let provider = provider.unwrap_or(if t.len() == 2 {
                Provider::Pigeonhole
            } else {
                Provider::Vdw
            });
            report
                .parameters
                .insert("provider".into(), json!(format!("{provider:?}").to_lowercase()));
            let budget = params.budget.unwrap_or_else(|| scaled(DEFAULT_VERIFY_BUDGET));
            let result = match provider {
                Provider::Pigeonhole => provider_pigeonhole(&t, params.k, params.g),
                Provider::Vdw => provider_vdw(&t, params.k, params.g, *vdw_length, budget),
                Provider::Search => provider_search(&t, params.k, params.g, budget),
            };
            finish_certificate(&mut report, result, params.out.as_ref())?;
            Ok(report)
        }
        GallaiAction::Search { params } => {
            let mut report = RunReport::new("gallai search", gallai_params(params));
            let budget = params.budget.unwrap_or_else(|| scaled(10_000_000));
            let result = GroundSet::from_unsorted(params.t.clone())
                .and_then(|t| provider_search(&t, params.k, params.g, budget));
            finish_certificate(&mut report, result, params.out.as_ref())?;
            Ok(report)
        }
        GallaiAction::Check { path, budget } => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cert: GallaiCertificate =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let budget = budget.unwrap_or_else(|| scaled(DEFAULT_VERIFY_BUDGET));
            let mut params = BTreeMap::new();
            params.insert("path".into(), json!(path.display().to_string()));
            params.insert("budget".into(), json!(budget));
            let mut report = RunReport::new("gallai check", params);
            let r = verify_certificate(&cert, budget);
            report.summary.push(format!(
                "colouring {:?}, sparsity {:?}, copies complete {:?} ({} nodes)",
                r.coloring, r.sparsity, r.copies_complete, r.nodes
            ));
            let checks = [r.coloring, r.sparsity, r.copies_complete];
            if checks.contains(&Check::Failed) {
                report.status = Status::AssertionFailed;
            } else if checks.contains(&Check::Inconclusive) {
                report.status = Status::BudgetExhausted;
            }
            report.certificate = Some(r);
            Ok(report)
        }
    }
}

fn run(cli: &Cli) -> Result<RunReport> {
    match &cli.cmd {
        Command::Build(a) => build(a),
        Command::Verify(a) => verify(a),
        Command::Gallai { action } => gallai(action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(report) if cli.json => {
            print!("{}", report.to_json());
            ExitCode::from(report.status.exit_code() as u8)
        }
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            println!(
                "status: {}",
                serde_json::to_value(report.status)
                    .unwrap_or_default()
                    .as_str()
                    .unwrap_or("?")
            );
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
