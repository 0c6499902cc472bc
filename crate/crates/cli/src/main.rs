use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mipt_cli::commands::{self, CollapseSettings, PlaneScanArgs, RunOverrides};
use mipt_cli::spec::default_p_grid;
use mipt_cli::{io, CliError, CliResult, ExperimentSpec, GateSpec};

#[derive(Parser)]
#[command(name = "mipt", version, about = "Measurement-induced transitions in Cartan-gate hybrid circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cartan coefficients, invariants and operator-Schmidt values of a gate.
    GateInfo {
        /// Cartan coefficients `c1,c2,c3`.
        #[arg(long, value_delimiter = ',', conflicts_with = "invariants")]
        cartan: Option<Vec<f64>>,
        /// Invariants `e_p,g_t`.
        #[arg(long, value_delimiter = ',')]
        invariants: Option<Vec<f64>>,
        /// Also write the report to this JSON file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropy-vs-p curves, one CSV per size.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Keep sizes whose curve file already matches the spec.
        #[arg(long)]
        resume: bool,
    },
    /// Data-collapse fit and crossing estimate of a set of curves.
    Collapse {
        /// Curve CSV files.
        #[arg(long, num_args = 1.., required_unless_present = "input_dir")]
        curves: Vec<PathBuf>,
        /// Directory holding `curve_L*.csv` files.
        #[arg(long)]
        input_dir: Option<PathBuf>,
        #[arg(long)]
        output_dir: PathBuf,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Entropy (and optionally p_c, nu) over sampled points of the e_p-g_t plane.
    PlaneScan {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 614)]
        n_points: usize,
        /// Measurement rate of the reported entropy.
        #[arg(long, default_value_t = 0.2)]
        p: f64,
        /// Size of the reported entropy (default: largest in the spec).
        #[arg(long)]
        size: Option<usize>,
        /// Explicit point `e_p,g_t`; repeatable, replaces random sampling.
        #[arg(long, value_delimiter = ',', action = clap::ArgAction::Append)]
        at: Vec<f64>,
        /// Fit a collapse at every point over all spec sizes.
        #[arg(long)]
        fit: bool,
        #[command(flatten)]
        fit_args: FitArgs,
    },
    /// Closed-form measurement-only entropy curve.
    Analytic {
        /// Qubits per half chain.
        #[arg(long = "n-half")]
        n_half: u32,
        #[arg(long)]
        t: u32,
        #[arg(long, value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
        #[arg(long)]
        output_dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec (JSON).
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: $MIPT_WORKERS, else 1).
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn load(&self) -> CliResult<(ExperimentSpec, usize)> {
        let mut spec = ExperimentSpec::load(&self.spec)?;
        RunOverrides { output_dir: self.output_dir.clone(), seed: self.seed, workers: self.workers }
            .apply(&mut spec);
        Ok((spec, commands::resolve_workers(self.workers)?))
    }
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, value_delimiter = ',')]
    p_c_range: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    nu_range: Option<Vec<f64>>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    bootstrap: Option<usize>,
    /// Bootstrap seed.
    #[arg(long)]
    fit_seed: Option<u64>,
}

impl FitArgs {
    fn settings(&self) -> CliResult<CollapseSettings> {
        let mut s = CollapseSettings::default();
        if let Some(r) = &self.p_c_range {
            let [a, b] = fixed::<2>(r, "--p-c-range")?;
            s.p_c_range = (a, b);
        }
        if let Some(r) = &self.nu_range {
            let [a, b] = fixed::<2>(r, "--nu-range")?;
            s.nu_range = (a, b);
        }
        if let Some(g) = self.grid {
            s.grid = g;
        }
        if let Some(b) = self.bootstrap {
            s.n_bootstrap = b;
        }
        if let Some(seed) = self.fit_seed {
            s.seed = seed;
        }
        Ok(s)
    }
}

fn fixed<const N: usize>(values: &[f64], flag: &str) -> CliResult<[f64; N]> {
    values
        .try_into()
        .map_err(|_| CliError::Usage(format!("{flag} takes {N} comma-separated numbers")))
}

fn print_json<T: serde::Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("report serialises");
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::GateInfo { cartan, invariants, out } => {
            let gate = match (cartan, invariants) {
                (Some(c), None) => {
                    let c = fixed::<3>(&c, "--cartan")?;
                    GateSpec::Cartan { c1: c[0], c2: c[1], c3: c[2] }
                }
                (None, Some(i)) => {
                    let [e_p, g_t] = fixed::<2>(&i, "--invariants")?;
                    GateSpec::Invariants { e_p, g_t }
                }
                _ => return Err(CliError::Usage("give --cartan or --invariants".into())),
            };
            let report = commands::gate_info(&gate)?;
            if let Some(path) = out {
                io::write_json(&path, &report)?;
            }
            print_json(&report);
        }
        Command::Sweep { run, resume } => {
            let (spec, workers) = run.load()?;
            for path in commands::run_sweep(&spec, workers, resume)? {
                println!("{}", path.display());
            }
        }
        Command::Collapse { mut curves, input_dir, output_dir, fit, workers } => {
            if let Some(dir) = input_dir {
                let mut found: Vec<PathBuf> = io::read_curve_dir(&dir)?
                    .iter()
                    .map(|f| dir.join(io::curve_file_name(f.curve.size)))
                    .collect();
                curves.append(&mut found);
            }
            let workers = commands::resolve_workers(workers)?;
            let report = commands::run_collapse(&curves, &fit.settings()?, &output_dir, workers)?;
            print_json(&report);
        }
        Command::PlaneScan { run, n_points, p, size, at, fit, fit_args } => {
            let (spec, workers) = run.load()?;
            if at.len() % 2 != 0 {
                return Err(CliError::Usage("--at takes e_p,g_t pairs".into()));
            }
            let args = PlaneScanArgs {
                n_points,
                p,
                size,
                points: at.chunks(2).map(|c| (c[0], c[1])).collect(),
                fit: if fit { Some(fit_args.settings()?) } else { None },
            };
            let rows = commands::run_plane_scan(&spec, &args, workers)?;
            println!("{} points -> {}", rows.len(), spec.output_dir.join(commands::PLANE_TABLE).display());
        }
        Command::Analytic { n_half, t, p_grid, output_dir } => {
            let grid = p_grid.unwrap_or_else(default_p_grid);
            let (path, _) = commands::run_analytic(n_half, t, &grid, &output_dir)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(2)
        }
    }
}
