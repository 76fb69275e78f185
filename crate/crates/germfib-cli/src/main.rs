use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use germfib::analysis::{analyze, AnalysisError};
use germfib::catalog;
use germfib::conditions::{safe_direction, sample_discriminant};
use germfib::config::Config;
use germfib::export::{fiber_csv, ply_point_cloud, trajectory_csv};
use germfib::flow::{blow_away, sample_fiber, BlowAwayOpts, FiberKind};
use germfib::germ::MapGerm;
use germfib::homogeneity::{detect_polar_weights, detect_radial_weights};
use germfib::report::ConditionId;

/// Numerical analysis of real polynomial map germs: singular and Milnor
/// sets, fibration-condition certificates, and blow-away flow evidence.
#[derive(Parser)]
#[command(name = "germfib", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Tube,
    Sphere,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Ply,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhatArg {
    Fibers,
    Trajectories,
    MilnorSet,
}

#[derive(clap::Args)]
struct CommonOpts {
    /// Sphere radius.
    #[arg(long)]
    eps: Option<f64>,
    /// Tube radius in the target.
    #[arg(long)]
    eta: Option<f64>,
    /// RNG seed; falls back to GERMFIB_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Radius-ladder rungs.
    #[arg(long)]
    rungs: Option<usize>,
    /// Witness seeds per sampling task.
    #[arg(long)]
    samples: Option<usize>,
    /// Config file with `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full certification pipeline and write a bundle directory.
    Analyze {
        /// Germ file path or catalog name.
        germ: String,
        #[arg(long, default_value = "germfib-out")]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run one condition check and print its report as JSON.
    Check {
        /// One of: nice, radial_disc, cond_main, rho_regular_psi,
        /// mvf_exists, tube_exists, sphere_exists, equivalence_evidence.
        condition: String,
        germ: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Detect radial (and, for mixed germs, polar) weights.
    Weights {
        germ: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Sample a tube or sphere fiber over a target direction.
    Fiber {
        germ: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Target direction, comma-separated (normalized internally).
        #[arg(long)]
        y: String,
        #[arg(short = 'n', long, default_value_t = 200)]
        count: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Blow tube-fiber points away to the sphere; write trajectory CSVs.
    Blowaway {
        germ: String,
        #[arg(long)]
        y: String,
        #[arg(short = 'n', long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value = "germfib-out")]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// List the built-in germ catalog.
    Catalog,
    /// Export geometry (fibers, trajectories, or Milnor witnesses).
    Export {
        germ: String,
        #[arg(long, value_enum)]
        what: WhatArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long, default_value = "germfib-out")]
        out: PathBuf,
        /// Target direction for fiber/trajectory export.
        #[arg(long, default_value = "0.6,0.8")]
        y: String,
        #[command(flatten)]
        common: CommonOpts,
    },
}

enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn load_germ(arg: &str) -> Result<MapGerm, CliError> {
    if let Some(g) = catalog::find(arg) {
        return Ok(g);
    }
    let text = std::fs::read_to_string(arg)
        .map_err(|e| CliError::Input(format!("cannot read germ '{}': {}", arg, e)))?;
    MapGerm::from_file_text(&text).map_err(input)
}

fn build_config(common: &CommonOpts) -> Result<Config, CliError> {
    let mut cfg = Config::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config: {}", e)))?;
        cfg.apply_kv_text(&text).map_err(CliError::Input)?;
    }
    if common.seed.is_none() {
        if let Ok(env_seed) = std::env::var("GERMFIB_SEED") {
            cfg.seed = env_seed
                .parse()
                .map_err(|_| CliError::Input(format!("bad GERMFIB_SEED '{}'", env_seed)))?;
        }
    }
    if let Some(v) = common.eps {
        cfg.eps = v;
    }
    if let Some(v) = common.eta {
        cfg.eta = v;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.rungs {
        cfg.rungs = v;
    }
    if let Some(v) = common.samples {
        cfg.samples = v;
    }
    Ok(cfg)
}

fn parse_direction(s: &str, p: usize) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|e| CliError::Input(format!("bad direction '{}': {}", s, e)))?;
    if vals.len() != p {
        return Err(CliError::Input(format!(
            "direction has {} entries, target dimension is {}",
            vals.len(),
            p
        )));
    }
    let n = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(CliError::Input("direction must be nonzero".into()));
    }
    Ok(vals.iter().map(|v| v / n).collect())
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(input),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { germ, out, common } => {
            let g = load_germ(&germ)?;
            let cfg = build_config(&common)?;
            let bundle = analyze(&g, &cfg).map_err(|e| match e {
                AnalysisError::Invariant(m) => CliError::Internal(m),
                other => CliError::Input(other.to_string()),
            })?;
            bundle.write_to(&out).map_err(input)?;
            for r in &bundle.reports {
                println!(
                    "{:<22} {:?}",
                    serde_json::to_value(r.condition)
                        .unwrap()
                        .as_str()
                        .unwrap(),
                    r.verdict
                );
            }
            println!("bundle written to {}", out.display());
            Ok(())
        }
        Command::Check {
            condition,
            germ,
            common,
        } => {
            let id = ConditionId::parse(&condition)
                .ok_or_else(|| CliError::Input(format!("unknown condition '{}'", condition)))?;
            let g = load_germ(&germ)?;
            let cfg = build_config(&common)?;
            let bundle = analyze(&g, &cfg).map_err(|e| match e {
                AnalysisError::Invariant(m) => CliError::Internal(m),
                other => CliError::Input(other.to_string()),
            })?;
            let report = bundle
                .report(id)
                .ok_or_else(|| CliError::Internal("missing report".into()))?;
            println!("{}", serde_json::to_string_pretty(report).unwrap());
            Ok(())
        }
        Command::Weights { germ, common } => {
            let g = load_germ(&germ)?;
            let cfg = build_config(&common)?;
            let radial = detect_radial_weights(&g, cfg.weight_bound);
            let polar = g
                .provenance()
                .and_then(|f| detect_polar_weights(f, cfg.weight_bound as i32));
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "radial": radial,
                    "polar": polar,
                }))
                .unwrap()
            );
            Ok(())
        }
        Command::Fiber {
            germ,
            kind,
            y,
            count,
            format,
            out,
            common,
        } => {
            let g = load_germ(&germ)?;
            let cfg = build_config(&common)?;
            let y = parse_direction(&y, g.target_dim())?;
            let kind = match kind {
                KindArg::Tube => FiberKind::Tube,
                KindArg::Sphere => FiberKind::Sphere,
            };
            let fs = sample_fiber(
                &g,
                kind,
                &y,
                cfg.eps,
                cfg.eta,
                count,
                cfg.seed,
                cfg.tol_variety,
            );
            eprintln!("{} points retained of {} attempted", fs.points.len(), count);
            let text = match format {
                FormatArg::Csv => fiber_csv(&fs, g.source_dim()),
                FormatArg::Ply => {
                    let coords: Vec<Vec<f64>> =
                        fs.points.iter().map(|p| p.coords.clone()).collect();
                    ply_point_cloud(coords.iter(), g.source_dim()).map_err(input)?
                }
            };
            write_or_print(&out, &text)
        }
        Command::Blowaway {
            germ,
            y,
            count,
            out,
            common,
        } => {
            let g = load_germ(&germ)?;
            let cfg = build_config(&common)?;
            let y = parse_direction(&y, g.target_dim())?;
            let fs = sample_fiber(
                &g,
                FiberKind::Tube,
                &y,
                cfg.eps,
                cfg.eta,
                4 * count,
                cfg.seed,
                cfg.tol_variety,
            );
            if fs.points.is_empty() {
                return Err(CliError::Input(
                    "no tube-fiber points found over this direction".into(),
                ));
            }
            std::fs::create_dir_all(&out).map_err(input)?;
            let opts = BlowAwayOpts {
                drift_budget: cfg.drift_budget,
                tol_zero: cfg.tol_zero,
                ..Default::default()
            };
            for (i, pt) in fs.points.iter().take(count).enumerate() {
                let traj = blow_away(&g, &pt.coords, cfg.eps, &opts);
                let path = out.join(format!("trajectory{}.csv", i));
                std::fs::write(
                    &path,
                    trajectory_csv(&traj, g.source_dim(), g.target_dim()),
                )
                .map_err(input)?;
                println!(
                    "trajectory{}: {:?} after {} samples, drift {:.3e}",
                    i,
                    traj.termination,
                    traj.samples.len(),
                    traj.drift()
                );
            }
            Ok(())
        }
        Command::Catalog => {
            for e in catalog::entries() {
                println!("{:<16} {}", e.name, e.description);
            }
            Ok(())
        }
        Command::Export {
            germ,
            what,
            format,
            out,
            y,
            common,
        } => {
            let g = load_germ(&germ)?;
            let cfg = build_config(&common)?;
            let m = g.source_dim();
            if matches!(format, FormatArg::Ply) && m != 3 {
                return Err(CliError::Input(format!(
                    "unsupported format: PLY needs a 3-dimensional source, got {}",
                    m
                )));
            }
            std::fs::create_dir_all(&out).map_err(input)?;
            let params = cfg.check_params();
            match what {
                WhatArg::Fibers => {
                    let ds = sample_discriminant(&g, &params);
                    let y = safe_direction(&ds, &parse_direction(&y, g.target_dim())?, cfg.angular_tol);
                    for (kind, name) in
                        [(FiberKind::Tube, "tube"), (FiberKind::Sphere, "sphere")]
                    {
                        let fs = sample_fiber(
                            &g,
                            kind,
                            &y,
                            cfg.eps,
                            cfg.eta,
                            cfg.samples,
                            cfg.seed,
                            cfg.tol_variety,
                        );
                        let (ext, text) = match format {
                            FormatArg::Csv => ("csv", fiber_csv(&fs, m)),
                            FormatArg::Ply => {
                                let coords: Vec<Vec<f64>> =
                                    fs.points.iter().map(|p| p.coords.clone()).collect();
                                ("ply", ply_point_cloud(coords.iter(), m).map_err(input)?)
                            }
                        };
                        let path = out.join(format!("{}_fiber.{}", name, ext));
                        std::fs::write(&path, text).map_err(input)?;
                        println!("wrote {} ({} points)", path.display(), fs.points.len());
                    }
                    Ok(())
                }
                WhatArg::Trajectories => {
                    let y = parse_direction(&y, g.target_dim())?;
                    let fs = sample_fiber(
                        &g,
                        FiberKind::Tube,
                        &y,
                        cfg.eps,
                        cfg.eta,
                        20,
                        cfg.seed,
                        cfg.tol_variety,
                    );
                    let opts = BlowAwayOpts::default();
                    for (i, pt) in fs.points.iter().take(5).enumerate() {
                        let traj = blow_away(&g, &pt.coords, cfg.eps, &opts);
                        let path = out.join(format!("trajectory{}.csv", i));
                        std::fs::write(&path, trajectory_csv(&traj, m, g.target_dim()))
                            .map_err(input)?;
                        println!("wrote {}", path.display());
                    }
                    Ok(())
                }
                WhatArg::MilnorSet => {
                    let ds = sample_discriminant(&g, &params);
                    let ws = germfib::conditions::milnor_witnesses(
                        &g, &ds, cfg.r0, cfg.samples, cfg.seed, &params,
                    )
                    .map_err(input)?;
                    let (ext, text) = match format {
                        FormatArg::Csv => ("csv", ws.to_csv(m)),
                        FormatArg::Ply => {
                            let coords: Vec<Vec<f64>> =
                                ws.points.iter().map(|p| p.coords.clone()).collect();
                            ("ply", ply_point_cloud(coords.iter(), m).map_err(input)?)
                        }
                    };
                    let path = out.join(format!("milnor_set.{}", ext));
                    std::fs::write(&path, text).map_err(input)?;
                    println!("wrote {} ({} points)", path.display(), ws.len());
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
