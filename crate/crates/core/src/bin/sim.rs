//! Command-line driver.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 solver failure,
//! 3 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lc_emulsion::analysis::{
    check_wellposedness, d_infinity_bound, estimate_gn_constant, estimate_lady_constant,
    ConditionReport, D_INF_TOLERANCE,
};
use lc_emulsion::energy::landscape::sample;
use lc_emulsion::energy::{energy_lower_bound_e0, find_landscape_minima, Region};
use lc_emulsion::io::{
    field_by_name, load_config, read_snapshot, render_field_image, Palette, RunConfig, RunOutput,
};
use lc_emulsion::verify::{run_suite, OracleResult, Suite};
use lc_emulsion::{free_energy, run_to_equilibrium, SimError};

#[derive(Parser)]
#[command(
    name = "sim",
    version,
    about = "Phase-field simulator for liquid-crystalline emulsions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a configuration to equilibrium, writing diagnostics and snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        snapshot_every: Option<usize>,
        /// Print a progress line every this many steps (0 disables).
        #[arg(long, default_value_t = 1000)]
        progress_every: usize,
    },
    /// Evaluate the well-posedness condition for a configuration.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Gagliardo-Nirenberg constant (estimated when absent).
        #[arg(long)]
        c_gn: Option<f64>,
        /// Ladyzhenskaya constant (estimated when absent).
        #[arg(long)]
        c_lady: Option<f64>,
    },
    /// Sample the homogeneous energy landscape and list its stationary points.
    Landscape {
        #[arg(long)]
        config: PathBuf,
        /// `s_min,s_max,w_min,w_max`.
        #[arg(long, value_parser = parse_region)]
        region: Option<Region>,
        /// Directory for landscape_samples.csv and landscape_points.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Samples per axis in landscape_samples.csv.
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Render one field of a snapshot as a PPM image.
    Render {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value = "phi")]
        field: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "viridis")]
        palette: Palette,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Run every suite.
    #[arg(long, conflicts_with = "suites")]
    all: bool,
    /// Suites to run: gradient, stress, oracle, order.
    #[arg(value_parser = parse_suite)]
    suites: Vec<Suite>,
    /// Write the results as CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_region(s: &str) -> Result<Region, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(format!(
            "expected s_min,s_max,w_min,w_max, got {} values",
            v.len()
        ));
    }
    Region::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: SimError| e.to_string())
}

enum Failure {
    Usage(String),
    Solver(String),
    Verification(String),
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NonConvergence { .. }
            | SimError::Cfl { .. }
            | SimError::PotentialDomain { .. } => Failure::Solver(e.to_string()),
            SimError::EnergyBelowBound { .. } => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Width cap for data-parallel kernels from `SIM_THREADS`. The kernels run
/// on one thread, so the value is only validated and reported.
fn thread_cap() -> Result<Option<usize>, Failure> {
    match std::env::var("SIM_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!(
                "SIM_THREADS must be a positive integer, got '{v}'"
            ))),
        },
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_run(
    config: &Path,
    out: Option<PathBuf>,
    snapshot_every: Option<usize>,
    progress: usize,
) -> Result<(), Failure> {
    let mut cfg = load_config(config)?;
    if let Some(n) = snapshot_every {
        cfg.output.snapshot_every = Some(n);
    }
    let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
    let initial = cfg.initial_state()?;
    let mut output = RunOutput::create(&dir, cfg.snapshot_every())?;
    output.progress_every = progress;
    write_file(&dir.join("config.toml"), &cfg.to_toml_string())?;

    let summary = run_to_equilibrium(initial.clone(), &cfg.physics, &cfg.numerics, &mut output)?;
    output.finish(&summary.final_state)?;
    for name in &cfg.output.images {
        let f = field_by_name(&summary.final_state, name)?;
        render_field_image(&f, dir.join(format!("{name}.ppm")), cfg.output.palette)?;
    }

    let d_inf = d_infinity_bound(initial.d.max_magnitude(), cfg.physics.phi_cr);
    println!("steps        {} ({})", summary.steps, summary.stop_reason);
    println!("t            {}", summary.final_state.t);
    println!(
        "energy       {:.12e} -> {:.12e}",
        summary.initial_energy, summary.final_energy
    );
    println!(
        "max rise     {:.3e} (relative, per step)",
        summary.max_relative_energy_increase
    );
    println!("mass drift   {:.3e} (relative)", summary.max_mass_drift);
    println!("max |d|      {:.6} (bound {:.6})", summary.max_abs_d, d_inf);
    if summary.max_abs_d > d_inf + D_INF_TOLERANCE {
        eprintln!("warning: max |d| exceeded the a-priori bound by more than {D_INF_TOLERANCE}");
    }
    println!("output       {}", dir.display());
    Ok(())
}

fn condition_report(
    cfg: &RunConfig,
    c_gn: Option<f64>,
    c_lady: Option<f64>,
) -> Result<ConditionReport, Failure> {
    let state = cfg.initial_state()?;
    let p = &cfg.physics;
    let g = *state.grid();
    let e_tot0 = free_energy(&state, p)?.e_total;
    let d_inf = d_infinity_bound(state.d.max_magnitude(), p.phi_cr);
    let e0 = energy_lower_bound_e0(p, &Region::default_for(p))?.e0;
    let c_gn = c_gn.unwrap_or_else(|| estimate_gn_constant(&g));
    let c_lady = c_lady.unwrap_or_else(|| estimate_lady_constant(&g));
    Ok(check_wellposedness(
        p,
        e_tot0,
        d_inf,
        c_gn,
        c_lady,
        e0,
        g.measure(),
    )?)
}

fn cmd_landscape(
    config: &Path,
    region: Option<Region>,
    out: &Path,
    samples: usize,
) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let p = &cfg.physics;
    let region = region.unwrap_or_else(|| Region::default_for(p));
    std::fs::create_dir_all(out)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", out.display())))?;

    let mut text = String::from("s,w,g\n");
    for (s, w, g) in sample(p, &region, samples, samples)? {
        text.push_str(&format!("{s:e},{w:e},{g:e}\n"));
    }
    write_file(&out.join("landscape_samples.csv"), &text)?;

    let points = find_landscape_minima(p, &region)?;
    let mut text = String::from("s,w,g,kind,on_boundary,grad_norm,eig_min,eig_max\n");
    for q in &points {
        text.push_str(&format!(
            "{:e},{:e},{:e},{:?},{},{:e},{:e},{:e}\n",
            q.s,
            q.w,
            q.value,
            q.kind,
            q.on_boundary,
            q.grad_norm,
            q.hessian_eigs[0],
            q.hessian_eigs[1]
        ));
    }
    write_file(&out.join("landscape_points.csv"), &text)?;

    let lb = energy_lower_bound_e0(p, &region)?;
    println!(
        "region  s in [{}, {}], w in [{}, {}]",
        region.s_min, region.s_max, region.w_min, region.w_max
    );
    for q in &points {
        println!(
            "{:<8?} s = {:+.7} w = {:.7} g = {:+.9}{}",
            q.kind,
            q.s,
            q.w,
            q.value,
            if q.on_boundary { " (boundary)" } else { "" }
        );
    }
    println!("E0 = {:.9} at (s, w) = ({:.7}, {:.7})", lb.e0, lb.s, lb.w);
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let suites: Vec<Suite> = if args.all || args.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suites.clone()
    };
    let mut results: Vec<OracleResult> = Vec::new();
    for s in suites {
        for r in run_suite(s)? {
            eprintln!("{r}");
            results.push(r);
        }
    }
    let mut csv = format!("{}\n", OracleResult::CSV_HEADER);
    for r in &results {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(Failure::Verification(format!(
            "{failed} of {} checks failed",
            results.len()
        )));
    }
    eprintln!("all {} checks passed", results.len());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    thread_cap()?;
    match cli.cmd {
        Cmd::Run {
            config,
            out,
            snapshot_every,
            progress_every,
        } => cmd_run(&config, out, snapshot_every, progress_every),
        Cmd::Check {
            config,
            c_gn,
            c_lady,
        } => {
            let cfg = load_config(&config)?;
            let report = condition_report(&cfg, c_gn, c_lady)?;
            print!("{report}");
            println!("{}", ConditionReport::CSV_HEADER);
            println!("{}", report.csv_row());
            Ok(())
        }
        Cmd::Landscape {
            config,
            region,
            out,
            samples,
        } => cmd_landscape(&config, region, &out, samples),
        Cmd::Verify(args) => cmd_verify(&args),
        Cmd::Render {
            snapshot,
            field,
            out,
            palette,
        } => {
            let state = read_snapshot(&snapshot)?;
            render_field_image(&field_by_name(&state, &field)?, &out, palette)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(m)) => {
            eprintln!("solver failure: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failure: {m}");
            ExitCode::from(3)
        }
    }
}
