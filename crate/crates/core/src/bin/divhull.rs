//! Command-line front end: reproducible runs of the surface analysis, tree
//! construction, genus tables, tower constants, and the fiber/prime scans,
//! with JSON-lines or CSV report emission.
//!
//! Exit codes: 0 success, 1 input error, 2 mathematical precondition
//! failure, 3 budget exhaustion.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use divhull::budget::Budget;
use divhull::error::{Error, Result};
use divhull::exactalg::parse_rational;
use divhull::fiberlab::{fiber_scan, prime_density_scan, specialize, torsion_scan};
use divhull::ramtree;
use divhull::surface::{decide_bound, load_fixture, BoundDecision, Section};
use divhull::tateoracle;
use divhull::tower;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_SEED: u64 = 20260809;

#[derive(Parser)]
#[command(
    name = "divhull",
    version,
    about = "division hulls on elliptic surfaces over Q(t)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format for scan commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed recorded in report metadata (runs are deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Node/enumeration budget; overrides DIVHULL_BUDGET.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Surface analysis: j, discriminant, poles, special primes, fiber types.
    Analyze(AnalyzeArgs),
    /// Build the ramification tree and summarize it per level.
    Ramtree(RamtreeArgs),
    /// Genus lower bounds for the preimage and torsion curves.
    Genus(GenusArgs),
    /// Tower constants n0, epsilon, delta, N(B) and the shallow-count bound.
    Tower(TowerArgs),
    /// Decide the per-fiber hull bound for a surface and prime.
    Decide(DecideArgs),
    /// Scan good fibers, computing rational division hulls.
    Fibers(FibersArgs),
    /// Scan good fibers, comparing torsion orders against special primes.
    TorsionScan(TorsionScanArgs),
    /// Scan good primes, counting finite-field division hulls.
    Primes(PrimesArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    surface: std::path::PathBuf,
}

#[derive(Args)]
struct RamtreeArgs {
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    depth: u32,
    /// Rebuild the tree by explicit orbit enumeration and compare.
    #[arg(long)]
    oracle_check: bool,
    /// Write a GraphViz dump of the compressed tree.
    #[arg(long)]
    dot: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct GenusArgs {
    #[arg(long)]
    ell: u64,
    /// Number of distinct geometric poles of j.
    #[arg(long = "N")]
    n_poles: u64,
    #[arg(long, default_value_t = 0)]
    base_genus: i64,
}

#[derive(Args)]
struct TowerArgs {
    #[arg(long)]
    c1: String,
    #[arg(long)]
    c2: String,
    #[arg(long = "B")]
    b_height: Option<u64>,
    /// Prime for the shallow-level count bound.
    #[arg(long, default_value_t = 3)]
    ell: u64,
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long)]
    surface: std::path::PathBuf,
    #[arg(long)]
    ell: u64,
    /// Declare that the section is an l-th multiple of another section.
    #[arg(long)]
    p_is_ell_multiple: bool,
    #[arg(long, default_value_t = 0)]
    base_genus: i64,
}

#[derive(Args)]
struct FibersArgs {
    #[arg(long)]
    surface: std::path::PathBuf,
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    height_max: u64,
    #[arg(long)]
    n_max: u32,
    /// Run even when the bound decision is NotApplicable (special prime or
    /// divisible section).
    #[arg(long)]
    override_special: bool,
    #[arg(long, default_value_t = 0)]
    section_index: usize,
    #[arg(long)]
    p_is_ell_multiple: bool,
}

#[derive(Args)]
struct TorsionScanArgs {
    #[arg(long)]
    surface: std::path::PathBuf,
    #[arg(long)]
    height_max: u64,
}

#[derive(Args)]
struct PrimesArgs {
    #[arg(long)]
    surface: std::path::PathBuf,
    #[arg(long)]
    ell: u64,
    /// Hull-size threshold for a prime to qualify.
    #[arg(long = "M")]
    threshold: u64,
    #[arg(long)]
    p_max: u64,
    /// Fiber parameter; falls back to the fixture's t0 field.
    #[arg(long)]
    t0: Option<String>,
    #[arg(long, default_value_t = 0)]
    section_index: usize,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version output is not an error
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let budget = match cli.budget {
        Some(b) => Budget::new(b),
        None => Budget::from_env(),
    };
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match run(&cli, budget, seed) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn meta(command: &str, seed: u64, budget: &Budget, config: serde_json::Value) -> serde_json::Value {
    json!({
        "tool": "divhull",
        "version": VERSION,
        "command": command,
        "seed": seed,
        "budget": budget.limit(),
        "config": config,
    })
}

fn print_doc(doc: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(doc).expect("serialize"));
}

fn emit_records<R: Serialize>(
    format: Format,
    meta: serde_json::Value,
    records: &[R],
    summary: serde_json::Value,
) -> Result<()> {
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string(&json!({ "meta": meta }))?);
            for r in records {
                println!("{}", serde_json::to_string(r)?);
            }
            println!("{}", serde_json::to_string(&json!({ "summary": summary }))?);
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for r in records {
                w.serialize(r).map_err(|e| Error::input(e.to_string()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn section_at(loaded: &divhull::surface::LoadedSurface, index: usize) -> Result<Section> {
    loaded.sections.get(index).cloned().ok_or_else(|| {
        Error::input(format!(
            "fixture has {} section(s), index {index} out of range",
            loaded.sections.len()
        ))
    })
}

fn run(cli: &Cli, budget: Budget, seed: u64) -> Result<()> {
    match &cli.command {
        Command::Analyze(args) => {
            let loaded = load_fixture(&args.surface)?;
            let analysis = loaded.model.analyze()?;
            let doc = json!({
                "meta": meta("analyze", seed, &budget, json!({
                    "surface": args.surface.display().to_string(),
                })),
                "analysis": analysis.report(),
            });
            print_doc(&doc);
        }
        Command::Ramtree(args) => {
            let (root, summary) = ramtree::build_tree(args.ell, args.m, args.depth, &budget)?;
            let oracle_result = if args.oracle_check {
                let (oracle_root, _) =
                    tateoracle::oracle_tree(args.ell, args.m, args.depth, &budget)?;
                Some(ramtree::canonical_form(&root) == tateoracle::canonical_form(&oracle_root))
            } else {
                None
            };
            if let Some(path) = &args.dot {
                std::fs::write(path, ramtree::tree_to_dot(&root))?;
            }
            let doc = json!({
                "meta": meta("ramtree", seed, &budget, json!({
                    "ell": args.ell, "m": args.m, "depth": args.depth,
                    "oracle_check": args.oracle_check,
                })),
                "summary": summary,
                "oracle_check": oracle_result.map(|ok| if ok { "MATCH" } else { "MISMATCH" }),
            });
            print_doc(&doc);
            match oracle_result {
                Some(true) => println!("oracle: MATCH"),
                Some(false) => {
                    println!("oracle: MISMATCH");
                    return Err(Error::math(
                        "rule-based tree disagrees with the enumeration oracle",
                    ));
                }
                None => {}
            }
        }
        Command::Genus(args) => {
            let bounds = ramtree::genus_bounds(args.ell, args.n_poles, args.base_genus);
            let doc = json!({
                "meta": meta("genus", seed, &budget, json!({
                    "ell": args.ell, "N": args.n_poles, "base_genus": args.base_genus,
                })),
                "bounds": bounds,
            });
            print_doc(&doc);
        }
        Command::Tower(args) => {
            let c1 = parse_rational(&args.c1)?;
            let c2 = parse_rational(&args.c2)?;
            let params = tower::derive_params(&c1, &c2)?;
            let n_of_b = match args.b_height {
                Some(b) => Some(tower::n_of_b(&params, b)?),
                None => None,
            };
            let count = tower::count_bound(args.ell, params.n0);
            let doc = json!({
                "meta": meta("tower", seed, &budget, json!({
                    "c1": args.c1, "c2": args.c2, "B": args.b_height, "ell": args.ell,
                })),
                "params": params.report(),
                "B": args.b_height,
                "N_of_B": n_of_b,
                "count_bound": count.to_string(),
            });
            print_doc(&doc);
        }
        Command::Decide(args) => {
            let loaded = load_fixture(&args.surface)?;
            let analysis = loaded.model.analyze()?;
            let decision =
                decide_bound(&analysis, args.ell, args.p_is_ell_multiple, args.base_genus);
            let doc = json!({
                "meta": meta("decide", seed, &budget, json!({
                    "surface": args.surface.display().to_string(),
                    "ell": args.ell,
                    "p_is_ell_multiple": args.p_is_ell_multiple,
                    "base_genus": args.base_genus,
                })),
                "special_primes": analysis.special_primes,
                "N_geometric_poles": analysis.n_geometric_poles,
                "decision": decision,
            });
            print_doc(&doc);
        }
        Command::Fibers(args) => {
            let loaded = load_fixture(&args.surface)?;
            let section = section_at(&loaded, args.section_index)?;
            let analysis = loaded.model.analyze()?;
            let decision = decide_bound(&analysis, args.ell, args.p_is_ell_multiple, 0);
            let bound = match decision {
                BoundDecision::Bound { value } => Some(value),
                BoundDecision::NotApplicable => {
                    if !args.override_special {
                        return Err(Error::math(format!(
                            "no bound claim for ell = {} on this surface (special prime or \
                             divisible section); pass --override-special to scan anyway",
                            args.ell
                        )));
                    }
                    None
                }
            };
            let report = fiber_scan(
                &loaded.model,
                &section,
                args.ell,
                args.height_max,
                args.n_max,
                bound,
            )?;
            let m = meta(
                "fibers",
                seed,
                &budget,
                json!({
                    "surface": args.surface.display().to_string(),
                    "ell": args.ell, "height_max": args.height_max, "n_max": args.n_max,
                    "section_index": args.section_index,
                    "override_special": args.override_special,
                }),
            );
            let summary = json!({
                "scanned": report.scanned,
                "skipped_singular": report.skipped_singular,
                "bound": report.bound,
                "exceptions": report.exceptions,
            });
            emit_records(cli.format, m, &report.records, summary)?;
        }
        Command::TorsionScan(args) => {
            let loaded = load_fixture(&args.surface)?;
            let report = torsion_scan(&loaded.model, args.height_max)?;
            let m = meta(
                "torsion-scan",
                seed,
                &budget,
                json!({
                    "surface": args.surface.display().to_string(),
                    "height_max": args.height_max,
                }),
            );
            let summary = json!({
                "scanned": report.scanned,
                "skipped_singular": report.skipped_singular,
                "special_primes": report.special_primes,
                "violations": report.violations,
            });
            emit_records(cli.format, m, &report.records, summary)?;
        }
        Command::Primes(args) => {
            let loaded = load_fixture(&args.surface)?;
            let section = section_at(&loaded, args.section_index)?;
            let t0 = match (&args.t0, &loaded.t0) {
                (Some(s), _) => parse_rational(s)?,
                (None, Some(t)) => t.clone(),
                (None, None) => {
                    return Err(Error::input(
                        "no fiber parameter: pass --t0 or add a t0 field to the fixture",
                    ))
                }
            };
            let (curve, point) = specialize(&loaded.model, &section, &t0)?;
            let report = prime_density_scan(&curve, &point, args.ell, args.threshold, args.p_max)?;
            let m = meta(
                "primes",
                seed,
                &budget,
                json!({
                    "surface": args.surface.display().to_string(),
                    "ell": args.ell, "M": args.threshold, "p_max": args.p_max,
                    "t0": divhull::exactalg::rational_to_string(&t0),
                    "section_index": args.section_index,
                }),
            );
            let summary = json!({
                "scanned": report.scanned,
                "qualifying": report.qualifying,
                "density": report.density,
                "density_f64": report.density_f64,
                "guarantee_level": report.guarantee_level,
                "full_split_guarantee": report.full_split_guarantee,
                "theory_floor": report.theory_floor,
                "theory_floor_f64": report.theory_floor_f64,
            });
            emit_records(cli.format, m, &report.records, summary)?;
        }
    }
    Ok(())
}
