use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use kinflow_core::junction::{equalpref_resolve, theorem1_resolve, NodeResolution};
use kinflow_core::layer::{integrate_layer, match_node_oracle, OracleConfig, DEFAULT_Y_MAX};
use kinflow_core::lwr::Side;
use kinflow_core::metrics::{network_distance, JUNCTION_EXCLUSION};
use kinflow_core::output::{read_snapshot, snapshot_times, write_run};
use kinflow_core::scenario::{ScenarioConfig, SolverChoice, BUILTINS};
use kinflow_core::sim::run;
use kinflow_core::verify::{oracle_sweep, theorem_vs_unified, unified_vs_cases};
use kinflow_core::FluxFunction;

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "KINFLOW_OUT_DIR";

#[derive(Parser)]
#[command(name = "kinflow", version, about = "Kinetic and LWR traffic flow on a diverging junction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write one CSV per edge, solver and snapshot.
    Simulate(SimulateArgs),
    /// L1 and max distances between two runs, edge by edge.
    Compare {
        /// Run prefix such as `out/diverge-ex2_kinetic`.
        run_a: PathBuf,
        run_b: PathBuf,
        /// Fraction of each edge next to the node left out.
        #[arg(long, default_value_t = JUNCTION_EXCLUSION)]
        exclude: f64,
        /// Snapshot time; defaults to the last one both runs share.
        #[arg(long)]
        time: Option<f64>,
    },
    /// Node fluxes, kinetic traces and LWR states for far-field densities.
    ResolveNode {
        rho1: f64,
        rho2: f64,
        rho3: f64,
        #[arg(long, value_enum, default_value_t = Mode::Nopref)]
        mode: Mode,
        /// Also search the layer combinations numerically on this flux lattice.
        #[arg(long)]
        oracle: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Check the closed-form node against the case table and the layer oracle.
    VerifyTheorem {
        #[arg(long, default_value_t = 400)]
        grid_n: u64,
        /// Points per axis of the density grid.
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Integrate the boundary-layer ODE and print the trajectory as CSV.
    Layer {
        /// Flux through the layer.
        c: f64,
        #[arg(value_enum)]
        side: SideArg,
        rho0: f64,
        #[arg(long, default_value_t = DEFAULT_Y_MAX)]
        y_max: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// JSON config file or builtin name.
    scenario: String,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Overrides the config directory, then `KINFLOW_OUT_DIR`, then `out`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Nopref,
    Equalpref,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    /// Outgoing road, node at its left end.
    Left,
    /// Incoming road, node at its right end.
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Kinetic,
    Lwr,
    Both,
}

impl From<SolverArg> for SolverChoice {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Kinetic => SolverChoice::Kinetic,
            SolverArg::Lwr => SolverChoice::Lwr,
            SolverArg::Both => SolverChoice::Both,
        }
    }
}

fn load_scenario(arg: &str) -> Result<(String, ScenarioConfig)> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg = ScenarioConfig::from_json(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
        return Ok((name, cfg));
    }
    match ScenarioConfig::builtin(arg) {
        Some(cfg) => Ok((arg.to_string(), cfg)),
        None => bail!("{arg} is neither a config file nor a builtin ({})", BUILTINS.join(", ")),
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let (name, mut cfg) = load_scenario(&args.scenario)?;
    if let Some(v) = args.eps {
        cfg.eps = v;
    }
    if let Some(v) = args.cells {
        cfg.cells = v;
    }
    if let Some(v) = args.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = args.cfl {
        cfg.cfl = v;
    }
    if let Some(v) = args.solver {
        cfg.solver = v.into();
    }
    let dir = args
        .out_dir
        .or_else(|| cfg.output.directory.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let scn = cfg.scenario(&name).context("invalid scenario")?;
    for solver in cfg.solver.solvers() {
        let out = run(&scn, solver)?;
        let files = write_run(&dir, &out)?;
        let node = out.last().node;
        println!(
            "{name} {}: {} steps, {} files in {}, node fluxes {:.6?}",
            solver.name(),
            out.steps,
            files.len(),
            dir.display(),
            node.fluxes
        );
        match node.interface_rho {
            Some(rho) => println!("  node traces {rho:.6?}, adjacent cells {:.6?}", node.cell_rho),
            None => println!("  adjacent cells {:.6?}", node.cell_rho),
        }
        if out.clamp_hits > 0 || out.speed_clamps > 0 {
            println!("  {} roundoff clamps, {} speed clamps", out.clamp_hits, out.speed_clamps);
        }
    }
    Ok(())
}

fn split_run(p: &Path) -> Result<(PathBuf, String)> {
    let prefix = p
        .file_name()
        .and_then(|s| s.to_str())
        .with_context(|| format!("bad run prefix {}", p.display()))?;
    let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    Ok((dir.to_path_buf(), prefix.to_string()))
}

fn compare(run_a: &Path, run_b: &Path, exclude: f64, time: Option<f64>) -> Result<()> {
    let (dir_a, pre_a) = split_run(run_a)?;
    let (dir_b, pre_b) = split_run(run_b)?;
    let time = match time {
        Some(t) => t,
        None => {
            let b = snapshot_times(&dir_b, &pre_b)?;
            let key = |t: f64| format!("{t:.6}");
            snapshot_times(&dir_a, &pre_a)?
                .into_iter()
                .rev()
                .find(|t| b.iter().any(|u| key(*u) == key(*t)))
                .with_context(|| format!("no common snapshot for {} and {}", run_a.display(), run_b.display()))?
        }
    };
    let a = read_snapshot(&dir_a, &pre_a, time)?;
    let b = read_snapshot(&dir_b, &pre_b, time)?;
    println!("t = {time:.6}, excluding {:.1}% next to the node", 100.0 * exclude);
    println!("edge,l1,linf");
    for d in network_distance(&a, &b, exclude)? {
        println!("{},{:.6e},{:.6e}", d.edge, d.l1, d.linf);
    }
    Ok(())
}

fn print_resolution(r: &NodeResolution) {
    println!("{}", r.label);
    println!("fluxes  {:?}", r.fluxes);
    let traces: Vec<String> = r
        .traces
        .iter()
        .map(|t| match t {
            Some(t) if t.unique => format!("{}", t.value),
            Some(t) => format!(">= {}", t.value),
            None => "-".into(),
        })
        .collect();
    println!("rho_0   [{}]", traces.join(", "));
    println!("rho_K   {:?}", r.rho_k);
}

fn resolve_node(rho_b: [f64; 3], mode: Mode, oracle: Option<u64>, json: bool) -> Result<()> {
    let f = FluxFunction::lwr();
    let r = match mode {
        Mode::Nopref => theorem1_resolve(rho_b, &f)?,
        Mode::Equalpref => equalpref_resolve(rho_b, &f)?,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&r)?);
    } else {
        print_resolution(&r);
    }
    if let Some(grid_n) = oracle {
        let o = match_node_oracle(rho_b, &f, OracleConfig::with_grid(grid_n))?;
        if json {
            println!("{}", serde_json::to_string_pretty(&o)?);
        } else {
            println!("oracle:");
            print_resolution(&o.resolution);
            for alt in &o.alternatives {
                println!("  alternative fluxes {alt:?}");
            }
        }
    }
    Ok(())
}

fn verify_theorem(grid_n: u64, points: usize) -> Result<bool> {
    let f = FluxFunction::lwr();
    let a = unified_vs_cases(100, f.sigma());
    println!("unified vs case table: {} checked, {} mismatches", a.checked, a.mismatches.len());
    let b = theorem_vs_unified(101, &f);
    println!("closed form vs unified: {} checked, {} mismatches", b.checked, b.mismatches.len());
    let s = oracle_sweep(points, OracleConfig::with_grid(grid_n), &f);
    let failures: Vec<_> = s.failures().collect();
    println!(
        "oracle at grid_n {grid_n}: {} checked, {} skipped near case boundaries, {} failures",
        s.checks.len(),
        s.skipped,
        failures.len()
    );
    for c in failures.iter().take(10) {
        println!("  rho_B {:?}: closed form {:?}, oracle {:?}", c.rho_b, c.theorem, c.oracle);
    }
    Ok(a.passed() && b.passed() && failures.is_empty())
}

fn layer(c: f64, side: SideArg, rho0: f64, y_max: f64, out: Option<PathBuf>) -> Result<()> {
    let side = match side {
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
    };
    let t = integrate_layer(rho0, c, side, y_max, &FluxFunction::lwr())?;
    let mut text = String::from("y,rho\n");
    for (y, r) in &t.points {
        text.push_str(&format!("{y:.16e},{r:.16e}\n"));
    }
    match out {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    eprintln!("{:?}", t.outcome);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate(args).map(|_| true),
        Command::Compare {
            run_a,
            run_b,
            exclude,
            time,
        } => compare(&run_a, &run_b, exclude, time).map(|_| true),
        Command::ResolveNode {
            rho1,
            rho2,
            rho3,
            mode,
            oracle,
            json,
        } => resolve_node([rho1, rho2, rho3], mode, oracle, json).map(|_| true),
        Command::VerifyTheorem { grid_n, points } => verify_theorem(grid_n, points),
        Command::Layer {
            c,
            side,
            rho0,
            y_max,
            out,
        } => layer(c, side, rho0, y_max, out).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
