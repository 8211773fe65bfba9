//! `kelvin`: convergence studies and field exports for point-force cell
//! boundaries in an infinite elastic medium.

mod config;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kelvin_core::{
    boundary_trace_2d, boundary_trace_3d, field_grid_2d, field_grid_3d, greens_2d, greens_3d,
    BoundaryMesh2D, CaseTable, GridSpec2, GridSpec3, Material, Study2d, Study3d, StudyCase,
    SurfaceMesh3D, Vec2, Vec3,
};

use config::{EvalSetSection, NormVariant, Overrides, ResolvedConfig};
use output::{num, write_atomic};

const UNITS_NOTE: &str = "Parameter units (annotations only, no conversion is performed): \
Young's modulus in kg/(um*min^2), force magnitude Q in kg*um/min^2, lengths in um.";

#[derive(Parser)]
#[command(
    name = "kelvin",
    version,
    about = "Displacement fields of point forces on immersed cell boundaries",
    after_help = UNITS_NOTE
)]
struct Cli {
    /// Study configuration file (TOML); omitted fields take the reference
    /// defaults
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Norm variant highlighted in reports; both are always written to CSV
    #[arg(long, global = true, value_enum)]
    norm: Option<NormVariant>,

    /// Comma-separated resolution list (segment counts in 2D, refinement
    /// levels in 3D), overrides the config
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    resolutions: Option<Vec<u64>>,

    /// Reserved for interface stability; every computation is deterministic
    /// and uses no random numbers
    #[arg(long, global = true)]
    seedless: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Circle-cell convergence study: L2 norm, rate, and normal-component
    /// spread over a concentric circle, per boundary resolution
    Study2d,
    /// Sphere-cell convergence study over the configured evaluation sets
    Study3d,
    /// Displacement field over a lattice, plus the station dump
    Field,
    /// Dirichlet trace export: negated displacement at outer-boundary points
    Trace,
    /// Print the fundamental-solution tensor for one point pair
    Greens(GreensArgs),
}

#[derive(Args)]
struct GreensArgs {
    /// Evaluation point, comma-separated (2 or 3 components)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    at: Vec<f64>,
    /// Source point, same dimension as --at
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    source: Vec<f64>,
    /// Young's modulus
    #[arg(long, default_value_t = 1.0e7)]
    young: f64,
    /// Poisson ratio
    #[arg(long, default_value_t = 0.25)]
    poisson: f64,
}

fn main() -> Result<()> {
    if let Ok(threads) = std::env::var("KELVIN_THREADS") {
        let n: usize = threads
            .parse()
            .with_context(|| format!("KELVIN_THREADS must be a positive integer, got {threads}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing thread pool")?;
    }

    let cli = Cli::parse();
    let overrides = Overrides {
        output_dir: cli.out.clone(),
        norm: cli.norm,
        resolutions: cli.resolutions.clone(),
    };

    match &cli.command {
        Command::Study2d => cmd_study2d(&load(&cli, 2, &overrides)?),
        Command::Study3d => cmd_study3d(&load(&cli, 3, &overrides)?),
        Command::Field => {
            let cfg = load(&cli, 2, &overrides)?;
            cmd_field(&cfg)
        }
        Command::Trace => {
            let cfg = load(&cli, 2, &overrides)?;
            cmd_trace(&cfg)
        }
        Command::Greens(args) => cmd_greens(args),
    }
}

fn load(cli: &Cli, default_dimension: u8, overrides: &Overrides) -> Result<ResolvedConfig> {
    config::load(cli.config.as_deref(), default_dimension, overrides)
}

fn print_table(table: &CaseTable, show_std: bool) {
    if table.theory_violating {
        println!(
            "  [{}] crosses the cell surface: theory-violating, min clearance {:.3e}",
            table.label, table.min_clearance
        );
    }
    if show_std {
        println!(
            "  {:>10} {:>22} {:>22} {:>14} {:>14}",
            "resolution", "norm_plain", "norm_rms", "q", "std"
        );
    } else {
        println!(
            "  {:>10} {:>22} {:>22} {:>14}",
            "resolution", "norm_plain", "norm_rms", "q"
        );
    }
    for row in &table.rows {
        let q = row.q.map(|v| format!("{v:.6}")).unwrap_or_default();
        if show_std {
            let std = row.std_dev.map(|v| format!("{v:.4e}")).unwrap_or_default();
            println!(
                "  {:>10} {:>22} {:>22} {:>14} {:>14}",
                row.resolution,
                num(row.norm_plain),
                num(row.norm_rms),
                q,
                std
            );
        } else {
            println!(
                "  {:>10} {:>22} {:>22} {:>14}",
                row.resolution,
                num(row.norm_plain),
                num(row.norm_rms),
                q
            );
        }
    }
}

fn write_resolved_config(cfg: &ResolvedConfig) -> Result<()> {
    let path = cfg.output_dir.join("config_resolved.toml");
    let text =
        toml::to_string_pretty(&cfg.to_file()).context("serializing resolved config")?;
    write_atomic(&path, &text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn finish_report(cfg: &ResolvedConfig, tables: &[CaseTable], started: Instant) -> Result<()> {
    let report = output::Report {
        tool_version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        cases: tables.iter().map(output::ReportCase::from_table).collect(),
    };
    let path = output::write_report(&cfg.output_dir, &report)?;
    println!("wrote {}", path.display());
    write_resolved_config(cfg)
}

fn cmd_study2d(cfg: &ResolvedConfig) -> Result<()> {
    if cfg.dimension != 2 {
        bail!(
            "study2d needs a 2D configuration (dimension = {})",
            cfg.dimension
        );
    }
    let started = Instant::now();
    let material = cfg.material()?;
    println!(
        "2D study: E = {:e}, nu = {}, Q = {:e}, cell radius {} at ({}, {}); norm variant: {}",
        cfg.young_modulus,
        cfg.poisson_ratio,
        cfg.force,
        cfg.cell_radius,
        cfg.cell_center[0],
        cfg.cell_center[1],
        cfg.norm
    );

    let mut tables = Vec::new();
    for (index, section) in cfg.eval_sets.iter().enumerate() {
        let (center, radius, samples) = match section {
            EvalSetSection::Circle {
                center,
                radius,
                samples,
                ..
            } => (center.clone(), *radius, *samples),
            _ => bail!(
                "study2d evaluates circle sets only; set '{}' is not a circle",
                section.label_or(index)
            ),
        };
        if center.len() != 2 {
            bail!("eval circle center must have 2 components");
        }
        let study = Study2d {
            material,
            magnitude: cfg.force,
            cell_center: cfg.cell_center_2d(),
            cell_radius: cfg.cell_radius,
            eval_center: Vec2::new(center[0], center[1]),
            eval_radius: radius,
            resolutions: cfg.resolutions.iter().map(|&m| m as usize).collect(),
            norm_samples: (samples != 0).then_some(samples),
        };
        let mut table = study.run()?;
        table.label = section.label_or(index);
        println!("case {}", table.label);
        print_table(&table, true);

        let file = if index == 0 {
            "table2.csv".to_string()
        } else {
            format!("table2_{}.csv", table.label)
        };
        let path = cfg.output_dir.join(file);
        write_atomic(&path, &output::convergence_csv(&table))?;
        println!("wrote {}", path.display());
        tables.push(table);
    }
    finish_report(cfg, &tables, started)
}

fn cmd_study3d(cfg: &ResolvedConfig) -> Result<()> {
    if cfg.dimension != 3 {
        bail!(
            "study3d needs a 3D configuration (dimension = {})",
            cfg.dimension
        );
    }
    let started = Instant::now();
    let material = cfg.material()?;
    println!(
        "3D study: E = {:e}, nu = {}, Q = {:e}, cell radius {} at ({}, {}, {}); levels {:?}",
        cfg.young_modulus,
        cfg.poisson_ratio,
        cfg.force,
        cfg.cell_radius,
        cfg.cell_center[0],
        cfg.cell_center[1],
        cfg.cell_center[2],
        cfg.resolutions
    );
    println!("note: table row m maps to the subdivision level listed in `resolutions`");

    let mut cases = Vec::new();
    for (index, section) in cfg.eval_sets.iter().enumerate() {
        cases.push(StudyCase {
            label: section.label_or(index),
            set: section.to_eval_set_3d()?,
        });
    }
    let levels: Vec<u32> = cfg
        .resolutions
        .iter()
        .map(|&l| u32::try_from(l).context("refinement level too large"))
        .collect::<Result<_>>()?;
    let study = Study3d {
        material,
        magnitude: cfg.force,
        cell_center: cfg.cell_center_3d(),
        cell_radius: cfg.cell_radius,
        levels,
        cases,
    };
    let tables = study.run()?;
    for table in &tables {
        println!("case {}", table.label);
        print_table(table, false);
        let path = cfg.output_dir.join(format!("study3d_{}.csv", table.label));
        write_atomic(&path, &output::convergence_csv(table))?;
        println!("wrote {}", path.display());
    }
    finish_report(cfg, &tables, started)
}

fn cmd_field(cfg: &ResolvedConfig) -> Result<()> {
    let material = cfg.material()?;
    let resolution = cfg.field_resolution;
    let dir = &cfg.output_dir;
    match cfg.dimension {
        2 => {
            let mesh = BoundaryMesh2D::circle(
                cfg.cell_center_2d(),
                cfg.cell_radius,
                resolution as usize,
                cfg.force,
            )?;
            let grid = GridSpec2 {
                corner: Vec2::new(cfg.grid.corner[0], cfg.grid.corner[1]),
                edge1: Vec2::new(cfg.grid.edge1[0], cfg.grid.edge1[1]),
                edge2: Vec2::new(cfg.grid.edge2[0], cfg.grid.edge2[1]),
                cells1: cfg.grid.cells[0],
                cells2: cfg.grid.cells[1],
            };
            let out = field_grid_2d(&mesh, &material, &grid)?;
            let mut csv = String::from("x,y,ux,uy,clearance\n");
            for s in &out.samples {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    num(s.point.x),
                    num(s.point.y),
                    num(s.displacement.x),
                    num(s.displacement.y),
                    num(s.min_station_distance)
                ));
            }
            let field_path = dir.join("field.csv");
            write_atomic(&field_path, &csv)?;
            let boundary_path = dir.join("boundary.csv");
            write_atomic(&boundary_path, &output::stations_csv_2d(mesh.stations()))?;
            println!(
                "field: {} samples, {} skipped (clearance)",
                out.samples.len(),
                out.skipped.len()
            );
            for sk in &out.skipped {
                println!(
                    "  skipped cell ({}, {}): ({}, {}), distance {:.3e}",
                    sk.row, sk.col, sk.point.x, sk.point.y, sk.distance
                );
            }
            println!("wrote {}", field_path.display());
            println!("wrote {}", boundary_path.display());
        }
        3 => {
            let mesh = SurfaceMesh3D::icosphere(
                cfg.cell_center_3d(),
                cfg.cell_radius,
                u32::try_from(resolution).context("field resolution too large")?,
                cfg.force,
            )?;
            let grid = GridSpec3 {
                corner: Vec3::new(cfg.grid.corner[0], cfg.grid.corner[1], cfg.grid.corner[2]),
                edge1: Vec3::new(cfg.grid.edge1[0], cfg.grid.edge1[1], cfg.grid.edge1[2]),
                edge2: Vec3::new(cfg.grid.edge2[0], cfg.grid.edge2[1], cfg.grid.edge2[2]),
                cells1: cfg.grid.cells[0],
                cells2: cfg.grid.cells[1],
            };
            let out = field_grid_3d(&mesh, &material, &grid)?;
            let mut csv = String::from("x,y,z,ux,uy,uz,clearance\n");
            for s in &out.samples {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    num(s.point.x),
                    num(s.point.y),
                    num(s.point.z),
                    num(s.displacement.x),
                    num(s.displacement.y),
                    num(s.displacement.z),
                    num(s.min_station_distance)
                ));
            }
            let field_path = dir.join("field.csv");
            write_atomic(&field_path, &csv)?;
            let boundary_path = dir.join("boundary.csv");
            write_atomic(&boundary_path, &output::stations_csv_3d(mesh.stations()))?;
            println!(
                "field: {} samples, {} skipped (clearance)",
                out.samples.len(),
                out.skipped.len()
            );
            for sk in &out.skipped {
                println!(
                    "  skipped cell ({}, {}): ({}, {}, {}), distance {:.3e}",
                    sk.row, sk.col, sk.point.x, sk.point.y, sk.point.z, sk.distance
                );
            }
            println!("wrote {}", field_path.display());
            println!("wrote {}", boundary_path.display());
        }
        other => bail!("unsupported dimension {other}"),
    }
    Ok(())
}

/// Deterministic, roughly uniform point placement on a sphere (golden-angle
/// spiral).
fn sphere_points(center: &Vec3, radius: f64, count: u64) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|i| {
            let z = if count == 1 {
                0.0
            } else {
                1.0 - 2.0 * i as f64 / (count - 1) as f64
            };
            let r = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden * i as f64;
            center + radius * Vec3::new(r * theta.cos(), r * theta.sin(), z)
        })
        .collect()
}

fn cmd_trace(cfg: &ResolvedConfig) -> Result<()> {
    let material = cfg.material()?;
    let dir = &cfg.output_dir;
    let path = dir.join("trace.csv");
    match cfg.dimension {
        2 => {
            let mesh = BoundaryMesh2D::circle(
                cfg.cell_center_2d(),
                cfg.cell_radius,
                cfg.field_resolution as usize,
                cfg.force,
            )?;
            let center = cfg.cell_center_2d();
            let points: Vec<Vec2> = (0..cfg.trace_points)
                .map(|k| {
                    let theta =
                        2.0 * std::f64::consts::PI * k as f64 / cfg.trace_points.max(1) as f64;
                    center + cfg.trace_radius * Vec2::new(theta.cos(), theta.sin())
                })
                .collect();
            let rows = boundary_trace_2d(&mesh, &material, &points)?;
            let mut csv = String::from("x,y,vx,vy\n");
            for (p, v) in &rows {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    num(p.x),
                    num(p.y),
                    num(v.x),
                    num(v.y)
                ));
            }
            write_atomic(&path, &csv)?;
            println!(
                "trace: {} points on circle R = {}",
                rows.len(),
                cfg.trace_radius
            );
        }
        3 => {
            let mesh = SurfaceMesh3D::icosphere(
                cfg.cell_center_3d(),
                cfg.cell_radius,
                u32::try_from(cfg.field_resolution).context("field resolution too large")?,
                cfg.force,
            )?;
            let points = sphere_points(&cfg.cell_center_3d(), cfg.trace_radius, cfg.trace_points);
            let rows = boundary_trace_3d(&mesh, &material, &points)?;
            let mut csv = String::from("x,y,z,vx,vy,vz\n");
            for (p, v) in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    num(p.x),
                    num(p.y),
                    num(p.z),
                    num(v.x),
                    num(v.y),
                    num(v.z)
                ));
            }
            write_atomic(&path, &csv)?;
            println!(
                "trace: {} points on sphere R = {}",
                rows.len(),
                cfg.trace_radius
            );
        }
        other => bail!("unsupported dimension {other}"),
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_greens(args: &GreensArgs) -> Result<()> {
    let material = Material::new(args.young, args.poisson)
        .map_err(|e| anyhow::anyhow!("invalid material: {e}"))?;
    if args.at.len() != args.source.len() {
        bail!(
            "--at has {} components but --source has {}",
            args.at.len(),
            args.source.len()
        );
    }
    match args.at.len() {
        2 => {
            let g = greens_2d(
                &Vec2::new(args.at[0], args.at[1]),
                &Vec2::new(args.source[0], args.source[1]),
                &material,
            )?;
            for i in 0..2 {
                println!("{} {}", num(g[(i, 0)]), num(g[(i, 1)]));
            }
        }
        3 => {
            let g = greens_3d(
                &Vec3::new(args.at[0], args.at[1], args.at[2]),
                &Vec3::new(args.source[0], args.source[1], args.source[2]),
                &material,
            )?;
            for i in 0..3 {
                println!("{} {} {}", num(g[(i, 0)]), num(g[(i, 1)]), num(g[(i, 2)]));
            }
        }
        n => bail!("points must have 2 or 3 components, got {n}"),
    }
    Ok(())
}
