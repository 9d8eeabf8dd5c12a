//! `hypspec`: build hyperbolic surfaces, compute their low Laplace spectrum
//! and run the small-eigenvalue verifications.
//!
//! Exit status: 0 when everything ran and every verdict passed, 1 when a
//! verdict failed or a computation broke down, 2 on usage or input errors.

mod manifest;
mod plot;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hypspec_core::error::{Error, ExperimentError};
use hypspec_core::experiments::{
    campaign_csv, default_m, lambda_lower, run_buser, run_campaign, run_randol, surface_spectrum, CampaignConfig,
};
use hypspec_core::geometry::{BoundReport, FNSurface, LAMBDA0_HYPERBOLIC_PLANE};
use hypspec_core::mesher::{cyclic_cover_mesh, mesh_surface, read_mesh, write_mesh, HyperbolicMesh, MeshOptions};
use hypspec_core::spectral::{
    assemble, convergence_study, lowest_eigenpairs_with, spectrum_csv, BoundaryCondition, SolverOptions,
    SpectralResult, DEFAULT_SEED,
};
use hypspec_core::{verdicts_csv, Verdict};

use manifest::Outputs;

#[derive(Parser)]
#[command(
    name = "hypspec",
    version,
    about = "Hyperbolic surfaces, their Laplace spectra and small-eigenvalue checks"
)]
#[command(
    after_help = "Environment:\n  HYPSPEC_THREADS  maximum number of worker threads (default: all cores)\n\n\
Exit status: 0 all verdicts PASS, 1 some verdict FAIL or a computation failed, 2 usage or input error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Target mesh size (longest edge)
    #[arg(long, default_value_t = 0.1)]
    h: f64,
    /// Number of eigenpairs [default: -chi + 3]
    #[arg(long)]
    m: Option<usize>,
    /// Seed of the eigensolver's start block
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Also write SVG plots of the computed spectra
    #[arg(long)]
    plot: bool,
    /// Output directory
    #[arg(long, default_value = "hypspec-out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh a surface and write the mesh with its quality statistics
    Build {
        /// Surface JSON file
        surface: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Lowest eigenpairs of a surface or of a HYPMESH / FLATMESH file
    Spectrum {
        /// Surface JSON or mesh file
        input: PathBuf,
        /// Eliminate boundary loops tagged Dirichlet or unglued seams
        #[arg(long)]
        dirichlet: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a small-eigenvalue verification
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Mesh the cyclic cover of order (k + 2) n along a non-separating curve
    Cover {
        /// Surface JSON file
        surface: PathBuf,
        #[command(flatten)]
        cover: CoverArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Print and export every closed-form bound for a surface
    Bounds {
        /// Surface JSON file
        surface: PathBuf,
        /// Output directory
        #[arg(long, default_value = "hypspec-out")]
        out: PathBuf,
    },
    /// Refinement study with Richardson extrapolation
    Converge {
        /// Surface JSON file
        surface: PathBuf,
        /// Comma-separated mesh sizes, coarse to fine (at least three)
        #[arg(long = "h-list", value_delimiter = ',', required = true)]
        h_list: Vec<f64>,
        #[arg(long)]
        dirichlet: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct CoverArgs {
    /// Gluing index of the curve to unwrap [default: first non-separating]
    #[arg(long)]
    curve: Option<usize>,
    /// Interior copies per test-function support
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Number of test functions
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Subcommand)]
enum Verify {
    /// Plateau functions on the genus-g surface with all pants curves of length ell
    Buser {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        #[arg(long)]
        ell: f64,
        /// Comma-separated twists, one per pants curve
        #[arg(long, value_delimiter = ',')]
        twists: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Cut-off functions on a cyclic cover of a surface
    Randol {
        /// Surface JSON file
        surface: PathBuf,
        #[command(flatten)]
        cover: CoverArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Many surfaces and checks from a JSON configuration
    Campaign {
        /// Campaign JSON file
        config: PathBuf,
        /// Overrides the configuration's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory
        #[arg(long, default_value = "hypspec-out")]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::Io(_)
            | Error::Json(_)
            | Error::Geometry(_)
            | Error::Experiment(ExperimentError::Config(_))
            | Error::Experiment(ExperimentError::InvalidConstruction(_))
            | Error::Experiment(ExperimentError::UnderResolved { .. }) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<Vec<Verdict>, Failure>;

fn read_input(path: &Path, out: &mut Outputs) -> Result<String, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    out.input(path, text.as_bytes());
    Ok(text)
}

fn load_surface(path: &Path, out: &mut Outputs) -> Result<FNSurface, Failure> {
    let text = read_input(path, out)?;
    FNSurface::from_json_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn check_h(h: f64) -> Result<(), Failure> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--h must be positive, got {h}")))
    }
}

fn quality_csv(mesh: &HyperbolicMesh) -> String {
    let q = mesh.quality();
    format!(
        "vertices,triangles,h_max,min_angle,area,euler_characteristic\n{},{},{:.12},{:.12},{:.12},{}\n",
        q.vertex_count,
        q.triangle_count,
        q.h_max,
        q.min_angle,
        mesh.area(),
        mesh.euler_characteristic()
    )
}

fn solve(mesh: &HyperbolicMesh, bc: BoundaryCondition, m: usize, seed: u64) -> Result<SpectralResult, Failure> {
    let op = assemble(mesh, bc).map_err(Error::from)?;
    if op.dofs() < 2 {
        return Err(Failure::Usage("mesh has fewer than two degrees of freedom".into()));
    }
    let mut o = SolverOptions::new(m.clamp(1, op.dofs() - 1));
    o.seed = seed;
    Ok(lowest_eigenpairs_with(&op, &o).map_err(Error::from)?)
}

fn spectrum_lines(bounds: Option<&BoundReport>) -> Vec<(&'static str, f64)> {
    let mut v = vec![("1/4", LAMBDA0_HYPERBOLIC_PLANE)];
    if let Some(b) = bounds.filter(|b| b.lambda_interval.is_some()) {
        v.push(("Lambda_lower", lambda_lower(b)));
    }
    v
}

fn write_spectrum(
    out: &mut Outputs,
    name: &str,
    r: &SpectralResult,
    plot: bool,
    title: &str,
    bounds: Option<&BoundReport>,
) -> Result<(), Failure> {
    out.write(&format!("{name}.csv"), &spectrum_csv(r))?;
    if plot {
        out.write(
            &format!("{name}.svg"),
            &plot::spectrum_svg(title, &r.eigenvalues, &spectrum_lines(bounds)),
        )?;
    }
    Ok(())
}

fn common_config(c: &Common) -> Value {
    json!({ "h": c.h, "m": c.m, "seed": c.seed, "plot": c.plot })
}

fn first_nonseparating(s: &FNSurface, curve: Option<usize>) -> Result<usize, Failure> {
    match curve {
        Some(c) if c < s.gluings.len() => Ok(c),
        Some(c) => Err(Failure::Usage(format!(
            "gluing {c} does not exist; the surface has {}",
            s.gluings.len()
        ))),
        None => (0..s.gluings.len())
            .find(|&g| s.is_nonseparating(g))
            .ok_or_else(|| Failure::Usage("surface has no non-separating pants curve".into())),
    }
}

fn build(surface: &Path, c: &Common) -> Outcome {
    check_h(c.h)?;
    let mut out = Outputs::new(&c.out)?;
    let s = load_surface(surface, &mut out)?;
    let sm = mesh_surface(&s, &MeshOptions::new(c.h)).map_err(Error::from)?;
    out.write("mesh.hypmesh", &write_mesh(&sm.mesh))?;
    out.write("quality.csv", &quality_csv(&sm.mesh))?;
    println!("{}", quality_csv(&sm.mesh).trim_end());
    out.finish("build", &common_config(c), c.seed)?;
    Ok(Vec::new())
}

fn spectrum(input: &Path, dirichlet: bool, c: &Common) -> Outcome {
    check_h(c.h)?;
    let mut out = Outputs::new(&c.out)?;
    let text = read_input(input, &mut out)?;
    let bc = if dirichlet {
        BoundaryCondition::Dirichlet
    } else {
        BoundaryCondition::Neumann
    };
    let first = text.lines().next().unwrap_or("");
    let (r, bounds) = if first.starts_with("HYPMESH") || first.starts_with("FLATMESH") {
        let mesh = read_mesh(&text).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
        let m = c.m.unwrap_or((3 - mesh.euler_characteristic()).max(1) as usize);
        (solve(&mesh, bc, m, c.seed)?, None)
    } else {
        let s = FNSurface::from_json_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
        let sm = mesh_surface(&s, &MeshOptions::new(c.h)).map_err(Error::from)?;
        let m = c.m.unwrap_or_else(|| default_m(&s));
        let r = if dirichlet {
            solve(&sm.mesh, bc, m, c.seed)?
        } else {
            surface_spectrum(&sm, m, c.seed)?
        };
        (r, BoundReport::for_surface(&s).ok())
    };
    for (i, l) in r.eigenvalues.iter().enumerate() {
        println!("lambda_{i} = {l:.9}");
    }
    write_spectrum(&mut out, "spectrum", &r, c.plot, "spectrum", bounds.as_ref())?;
    let mut cfg = common_config(c);
    cfg["bc"] = json!(bc.as_str());
    out.finish("spectrum", &cfg, c.seed)?;
    Ok(Vec::new())
}

fn verify_buser(genus: usize, ell: f64, twists: Option<&[f64]>, c: &Common) -> Outcome {
    check_h(c.h)?;
    let mut out = Outputs::new(&c.out)?;
    let o = run_buser(genus, ell, twists, c.h, c.m, c.seed)?;
    out.write("verdicts.csv", &verdicts_csv(&o.verdicts))?;
    let title = format!("Buser surface, genus {genus}, l = {ell}");
    write_spectrum(&mut out, "spectrum", &o.result, c.plot, &title, Some(&o.bounds))?;
    let mut cfg = common_config(c);
    cfg["genus"] = json!(genus);
    cfg["ell"] = json!(ell);
    cfg["twists"] = json!(twists);
    out.finish("verify buser", &cfg, c.seed)?;
    Ok(o.verdicts)
}

fn verify_randol(surface: &Path, k: &CoverArgs, c: &Common) -> Outcome {
    check_h(c.h)?;
    let mut out = Outputs::new(&c.out)?;
    let s = load_surface(surface, &mut out)?;
    let curve = first_nonseparating(&s, k.curve)?;
    let o = run_randol(&s, curve, k.k, k.n, c.h, c.m, c.seed)?;
    out.write("verdicts.csv", &verdicts_csv(&o.verdicts))?;
    let bounds = BoundReport::for_surface(&s).ok();
    write_spectrum(
        &mut out,
        "base_spectrum",
        &o.base_result,
        c.plot,
        "base surface",
        bounds.as_ref(),
    )?;
    let title = format!("cyclic cover of order {}", o.cover.sheets);
    write_spectrum(&mut out, "spectrum", &o.cover_result, c.plot, &title, None)?;
    let mut cfg = common_config(c);
    cfg["curve"] = json!(curve);
    cfg["k"] = json!(k.k);
    cfg["n"] = json!(k.n);
    out.finish("verify randol", &cfg, c.seed)?;
    Ok(o.verdicts)
}

fn verify_campaign(config: &Path, seed: Option<u64>, dir: &Path) -> Outcome {
    let mut out = Outputs::new(dir)?;
    let text = read_input(config, &mut out)?;
    let mut cfg = CampaignConfig::from_json_str(&text)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    let base = config.parent().unwrap_or(Path::new("."));
    let rows = run_campaign(&cfg, base)?;
    out.write("campaign.csv", &campaign_csv(&rows)?)?;
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    out.finish("verify campaign", &json!({ "seed": cfg.seed }), seed)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            let mut v = r.verdict;
            v.name = format!("{}/{}", r.surface, v.name);
            v
        })
        .collect())
}

fn cover(surface: &Path, k: &CoverArgs, c: &Common) -> Outcome {
    check_h(c.h)?;
    let mut out = Outputs::new(&c.out)?;
    let s = load_surface(surface, &mut out)?;
    let curve = first_nonseparating(&s, k.curve)?;
    let sm = cyclic_cover_mesh(&s, curve, k.k, k.n, &MeshOptions::new(c.h)).map_err(Error::from)?;
    out.write("cover.hypmesh", &write_mesh(&sm.mesh))?;
    out.write("quality.csv", &quality_csv(&sm.mesh))?;
    println!("cover of order {} along gluing {curve}", sm.sheets);
    println!("{}", quality_csv(&sm.mesh).trim_end());
    let mut cfg = common_config(c);
    cfg["curve"] = json!(curve);
    cfg["k"] = json!(k.k);
    cfg["n"] = json!(k.n);
    out.finish("cover", &cfg, c.seed)?;
    Ok(Vec::new())
}

fn bounds(surface: &Path, dir: &Path) -> Outcome {
    let mut out = Outputs::new(dir)?;
    let s = load_surface(surface, &mut out)?;
    let b = BoundReport::for_surface(&s).map_err(Error::from)?;
    let mut csv = String::from("quantity,value\n");
    for (k, v) in b.rows() {
        println!("{k:<22} {v}");
        csv.push_str(&format!("{k},{v}\n"));
    }
    for w in &b.warnings {
        println!("warning: {w}");
    }
    out.write("bounds.csv", &csv)?;
    out.write("verdicts.csv", &verdicts_csv(&b.verdicts))?;
    out.finish("bounds", &json!({}), DEFAULT_SEED)?;
    Ok(b.verdicts)
}

fn converge(surface: &Path, h_list: &[f64], dirichlet: bool, c: &Common) -> Outcome {
    for &h in h_list {
        check_h(h)?;
    }
    let mut out = Outputs::new(&c.out)?;
    let s = load_surface(surface, &mut out)?;
    let bc = if dirichlet {
        BoundaryCondition::Dirichlet
    } else {
        BoundaryCondition::Neumann
    };
    let m = c.m.unwrap_or_else(|| default_m(&s));
    let rep = convergence_study(&s, h_list, m, bc).map_err(|e| match e {
        Error::Spectral(hypspec_core::error::SpectralError::Convergence(msg)) => Failure::Usage(msg),
        e => e.into(),
    })?;
    let mut levels = String::from("h,h_max,dofs");
    for i in 0..m {
        levels.push_str(&format!(",lambda_{i}"));
    }
    levels.push('\n');
    for (l, ev) in rep.eigenvalues.iter().enumerate() {
        levels.push_str(&format!("{},{:.12},{}", rep.h[l], rep.h_max[l], rep.dofs[l]));
        for x in ev {
            levels.push_str(&format!(",{x:.12e}"));
        }
        levels.push('\n');
    }
    let mut summary = String::from("index,extrapolated,observed_order,monotone\n");
    for i in 0..rep.extrapolated.len() {
        let p = rep.observed_order[i].map_or("nan".to_string(), |p| format!("{p:.6}"));
        summary.push_str(&format!("{i},{:.12e},{p},{}\n", rep.extrapolated[i], rep.monotone[i]));
    }
    print!("{summary}");
    out.write("convergence.csv", &levels)?;
    out.write("extrapolation.csv", &summary)?;
    let mut cfg = common_config(c);
    cfg["h_list"] = json!(h_list);
    cfg["bc"] = json!(bc.as_str());
    out.finish("converge", &cfg, c.seed)?;
    Ok(Vec::new())
}

fn threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HYPSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("HYPSPEC_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Outcome {
    threads()?;
    match &cli.command {
        Command::Build { surface, common } => build(surface, common),
        Command::Spectrum {
            input,
            dirichlet,
            common,
        } => spectrum(input, *dirichlet, common),
        Command::Verify { what } => match what {
            Verify::Buser {
                genus,
                ell,
                twists,
                common,
            } => verify_buser(*genus, *ell, twists.as_deref(), common),
            Verify::Randol { surface, cover, common } => verify_randol(surface, cover, common),
            Verify::Campaign { config, seed, out } => verify_campaign(config, *seed, out),
        },
        Command::Cover {
            surface,
            cover: k,
            common,
        } => cover(surface, k, common),
        Command::Bounds { surface, out } => bounds(surface, out),
        Command::Converge {
            surface,
            h_list,
            dirichlet,
            common,
        } => converge(surface, h_list, *dirichlet, common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(verdicts) => {
            for v in &verdicts {
                println!("{v}");
            }
            let failed: Vec<&str> = verdicts.iter().filter(|v| !v.pass).map(|v| v.name.as_str()).collect();
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("hypspec: failing checks: {}", failed.join(", "));
                ExitCode::from(1)
            }
        }
        Err(Failure::Run(msg)) => {
            eprintln!("hypspec: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("hypspec: {msg}");
            ExitCode::from(2)
        }
    }
}
