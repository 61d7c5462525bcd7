//! `netlod`: generate networks, run single solves, corrector decay and
//! convergence studies, and write the results as CSV.

mod settings;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use netlod::experiment::{make_problem, run_convergence, run_decay, write_solution, Problem};
use netlod::lod::{build_basis, compare, load_correctors, save_correctors, solve_full};
use netlod::network;

use settings::{FileConfig, Options, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "netlod",
    version,
    about = "Localized orthogonal decomposition on fiber networks"
)]
struct Cli {
    /// TOML file with the same keys as the flags; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the network, coefficients and boundary conditions as JSON
    Generate(Options),
    /// Solve the fine problem directly
    SolveFull(Options),
    /// Solve with the localized multiscale basis on the first --R
    SolveLod(LodOptions),
    /// Corrector error against patch radius for the central coarse dof
    Decay(Options),
    /// LOD and coarse FEM errors for every --R
    Convergence(Options),
}

#[derive(Debug, Args)]
struct LodOptions {
    #[command(flatten)]
    options: Options,
    /// Write the computed correctors to this file
    #[arg(long = "save-basis")]
    save_basis: Option<PathBuf>,
    /// Read correctors from this file instead of computing them
    #[arg(long = "load-basis")]
    load_basis: Option<PathBuf>,
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn generate(s: &Settings) -> Result<()> {
    let p = make_problem(&s.experiment)?;
    let path = s.output("network.json")?;
    network::save(&p.net, &p.edge_attrs, &p.pair_attrs, &p.bc, &path)?;
    println!(
        "{} nodes, {} edges, {} pairs, {} fixed dofs -> {}",
        p.net.node_count(),
        p.net.edges().len(),
        p.net.pairs().len(),
        p.bc.fixed().len(),
        path.display()
    );
    Ok(())
}

fn full_solution(p: &Problem) -> Result<Vec<f64>> {
    let k = p.stiffness()?;
    Ok(solve_full(&k, &p.load, &p.bc)?.u)
}

fn solve_full_cmd(s: &Settings) -> Result<()> {
    let p = make_problem(&s.experiment)?;
    let start = Instant::now();
    let u = full_solution(&p)?;
    let path = s.output("solution_full.csv")?;
    write_solution(&p.net, &u, create(&path)?)?;
    println!(
        "{} dofs solved in {:.2} s -> {}",
        u.len(),
        start.elapsed().as_secs_f64(),
        path.display()
    );
    Ok(())
}

fn solve_lod_cmd(s: &Settings) -> Result<()> {
    let p = make_problem(&s.experiment)?;
    let big_r = s.coarse();
    let disc = p.discretize(big_r)?;
    let start = Instant::now();
    let correctors = match &s.load_basis {
        Some(path) => load_correctors(path, &disc.ops)
            .with_context(|| format!("loading correctors from {}", path.display()))?,
        None => disc.correctors(s.lod_radius()?, &p.corrector_set())?,
    };
    if let Some(path) = &s.save_basis {
        save_correctors(&correctors, path)
            .with_context(|| format!("saving correctors to {}", path.display()))?;
    }
    let basis = build_basis(&disc.ops, &correctors)?;
    let sol = p.solve_with(&disc, &basis, &correctors)?;
    let took = start.elapsed().as_secs_f64();
    for w in &sol.warnings {
        eprintln!("warning: {w}");
    }
    if correctors.regularized_count() > 0 {
        eprintln!(
            "warning: {} element problems needed a regularized factorization",
            correctors.regularized_count()
        );
    }
    let path = s.output("solution_lod.csv")?;
    write_solution(&p.net, &sol.u, create(&path)?)?;
    let reference = p.reference(&disc)?;
    let err = compare(&disc.k, &reference.u, &sol.u)?;
    println!(
        "R = {big_r}, rho = {}: relative energy error {:.4e}, relative L2 error {:.4e} ({:.2} s) -> {}",
        s.lod_radius()?.as_f64(),
        err.rel_energy,
        err.rel_l2,
        took,
        path.display()
    );
    Ok(())
}

fn decay_cmd(s: &Settings) -> Result<()> {
    let mut config = s.experiment.clone();
    config.coarse.truncate(1);
    let table = run_decay(&config, &s.decay_radii()?)?;
    let path = s.output("decay.csv")?;
    table.write_csv(create(&path)?)?;
    match table.log_linear_slope() {
        Some(slope) => println!("log-linear decay slope {slope:.3} -> {}", path.display()),
        None => println!("-> {}", path.display()),
    }
    Ok(())
}

fn convergence_cmd(s: &Settings) -> Result<()> {
    let table = run_convergence(&s.experiment)?;
    let path = s.output("convergence.csv")?;
    table.write_csv(create(&path)?)?;
    for row in &table.rows {
        if let netlod::experiment::RowStatus::Failed(msg) = &row.status {
            eprintln!("R = {} failed: {msg}", row.big_r);
        }
    }
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
    println!(
        "slopes: LOD energy {}, LOD L2 {}, FEM energy {} -> {}",
        fmt(table.lod_energy_slope()),
        fmt(table.lod_l2_slope()),
        fmt(table.fem_energy_slope()),
        path.display()
    );
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Generate(o) => generate(&Settings::resolve(o, file, None, None)?),
        Command::SolveFull(o) => solve_full_cmd(&Settings::resolve(o, file, None, None)?),
        Command::SolveLod(l) => solve_lod_cmd(&Settings::resolve(
            l.options,
            file,
            l.save_basis,
            l.load_basis,
        )?),
        Command::Decay(o) => decay_cmd(&Settings::resolve(o, file, None, None)?),
        Command::Convergence(o) => convergence_cmd(&Settings::resolve(o, file, None, None)?),
    }
}
