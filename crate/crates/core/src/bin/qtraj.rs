use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qtraj::channels::FourierFamily;
use qtraj::figures::{
    self, fig4_default_probabilities, Fig3Params, Fig4Params, Fig5Params, Fig6Params,
};
use qtraj::output::{Check, Table};
use qtraj::protocol::{qubit_ground_population, QubitProtocol, Step4};
use qtraj::states::{DensityMatrix, Hamiltonian};
use qtraj::trajectories::{
    build_step3_ensemble, build_step3_ensemble_with_reference, monte_carlo_sample,
};
use qtraj::validation::{run_suite, SuiteConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantum and classical heat atoms for the two qubit panels and the reversible reference.
    Fig3,
    /// Quantum heat variance and entropy production along the Fourier family.
    Fig4a,
    /// The same quantities under dephasing from a fixed member of the family.
    Fig4b,
    /// Classical heat footprint of a diagonal qubit.
    Fig5a,
    /// Quantum heat footprint of a rotated qubit.
    Fig5b,
    /// Average extracted work over the coherence / non-thermality grid.
    Fig6,
    /// Per-record table of a thermalization ensemble, optionally with Monte Carlo counts.
    Trajectories,
    /// One-row report of the work extraction protocol.
    Protocol,
    /// Runs the invariant suite; exit status 3 on any failure.
    Validate,
}

#[derive(Debug, Parser)]
#[command(
    name = "qtraj",
    version,
    about = "Heat, entropy production and work along quantum eigenstate trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Monte Carlo sample count.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    /// Points per grid axis.
    #[arg(long, global = true, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
    grid: u64,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(2..=8))]
    d: Option<u64>,
    /// Comma-separated probabilities (or a single mixing probability for qubits).
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    p: Option<Vec<f64>>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long = "theta-tilde", global = true, allow_negative_numbers = true)]
    theta_tilde: Option<f64>,
    #[arg(long, global = true)]
    q1: Option<f64>,
    /// Ground population of the diagonal state in the first fig3 panel.
    #[arg(long, global = true)]
    r: Option<f64>,
    #[arg(long, global = true, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, global = true)]
    temperature: Option<f64>,
    #[arg(long = "Theta", global = true, allow_negative_numbers = true)]
    big_theta: Option<f64>,
    /// Dephasing time (largest time of the fig4b sweep).
    #[arg(long, global = true)]
    t: Option<f64>,
    #[arg(long = "N-steps", global = true, value_parser = clap::value_parser!(u64).range(1..))]
    n_steps: Option<u64>,
    /// Analytic N → ∞ limit of the final isothermal sweep.
    #[arg(long, global = true)]
    quasistatic: bool,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long = "inject-fault", global = true, hide = true)]
    inject_fault: bool,
}

enum Failure {
    Usage(String),
    Validation(String),
    Io(String),
}

impl From<qtraj::Error> for Failure {
    fn from(e: qtraj::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl Cli {
    fn threads(&self) -> usize {
        self.threads
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            })
            .max(1)
    }

    fn scalar_p(&self, default: f64) -> Result<f64, Failure> {
        match self.p.as_deref() {
            None => Ok(default),
            Some([x]) => Ok(*x),
            Some(v) => Err(Failure::Usage(format!(
                "expected a single --p value, got {}",
                v.len()
            ))),
        }
    }

    fn grid(&self) -> usize {
        self.grid as usize
    }

    fn step4(&self, default: Step4) -> Result<Step4, Failure> {
        match (self.quasistatic, self.n_steps) {
            (true, Some(_)) => Err(Failure::Usage(
                "--quasistatic and --N-steps are exclusive".into(),
            )),
            (true, None) => Ok(Step4::Quasistatic),
            (false, Some(n)) => Ok(Step4::Steps(n as usize)),
            (false, None) => Ok(default),
        }
    }
}

fn step4_json(s: Step4) -> Value {
    match s {
        Step4::Quasistatic => json!("quasistatic"),
        Step4::Steps(n) => json!(n),
    }
}

fn fig3(cli: &Cli) -> Result<(Table, Value), Failure> {
    let d = Fig3Params::default();
    let params = Fig3Params {
        r: cli.r.unwrap_or(d.r),
        q1: cli.q1.unwrap_or(d.q1),
        p: cli.scalar_p(d.p)?,
        theta_tilde: cli.theta_tilde.unwrap_or(d.theta_tilde),
        omega: cli.omega,
    };
    let config = json!({"r": params.r, "q1": params.q1, "p": params.p,
        "theta_tilde": params.theta_tilde, "omega": params.omega});
    Ok((figures::fig3(&params)?, config))
}

fn fig4_params(cli: &Cli) -> Fig4Params {
    let d = Fig4Params::default();
    Fig4Params {
        dims: cli.d.map(|x| vec![x as usize]).unwrap_or(d.dims),
        probabilities: cli.p.clone(),
        grid: cli.grid(),
        omega: cli.omega,
        theta: cli.big_theta.unwrap_or(d.theta),
        t_max: cli.t.unwrap_or(d.t_max),
    }
}

fn fig4(cli: &Cli, sweep_time: bool) -> Result<(Table, Value), Failure> {
    let params = fig4_params(cli);
    let mut config = json!({"dims": params.dims, "grid": params.grid, "omega": params.omega});
    if let Some(p) = &params.probabilities {
        config["p"] = json!(p);
    }
    if sweep_time {
        config["Theta"] = json!(params.theta);
        config["t_max"] = json!(params.t_max);
        Ok((figures::fig4b(&params)?, config))
    } else {
        Ok((figures::fig4a(&params)?, config))
    }
}

fn fig5(cli: &Cli, panel_b: bool) -> Result<(Table, Value), Failure> {
    let d = Fig5Params::default();
    let params = Fig5Params {
        q1: cli.q1.unwrap_or(d.q1),
        omega: cli.omega,
        grid: cli.grid(),
        p: cli.scalar_p(d.p)?,
    };
    if panel_b {
        let config = json!({"p": params.p, "omega": params.omega, "grid": params.grid});
        Ok((figures::fig5b(&params)?, config))
    } else {
        let config = json!({"q1": params.q1, "omega": params.omega, "grid": params.grid,
            "temperature": figures::qubit_temperature(params.q1, params.omega)?});
        Ok((figures::fig5a(&params)?, config))
    }
}

fn fig6(cli: &Cli) -> Result<(Table, Value), Failure> {
    let d = Fig6Params::default();
    let params = Fig6Params {
        p: cli.scalar_p(d.p)?,
        theta: cli.theta.unwrap_or(d.theta),
        temperature: cli.temperature.unwrap_or(d.temperature),
        omega0: cli.omega,
        grid: cli.grid(),
        step4: cli.step4(Step4::Quasistatic)?,
        ..d
    };
    let config = json!({"p": params.p, "theta": params.theta, "temperature": params.temperature,
        "omega0": params.omega0, "grid": params.grid, "coh_range": [params.coh_range.0, params.coh_range.1],
        "nonth_range": [params.nonth_range.0, params.nonth_range.1], "step4": step4_json(params.step4)});
    Ok((figures::fig6(&params)?, config))
}

fn trajectories(cli: &Cli) -> Result<(Table, Value), Failure> {
    let d = cli.d.unwrap_or(2) as usize;
    let (ens, mut config) = if d == 2 {
        let p = cli.scalar_p(0.95)?;
        let theta_tilde = cli.theta_tilde.unwrap_or(PI / 3.0);
        let rho = DensityMatrix::qubit(p, theta_tilde)?;
        let h = Hamiltonian::qubit(cli.omega)?;
        let mut config = json!({"d": 2, "p": p, "theta_tilde": theta_tilde, "omega": cli.omega});
        let ens = match (cli.q1, cli.temperature) {
            (Some(q1), _) => {
                config["q1"] = json!(q1);
                build_step3_ensemble_with_reference(&rho, &h, &[q1, 1.0 - q1])?
            }
            (None, Some(t)) => {
                config["temperature"] = json!(t);
                build_step3_ensemble(&rho, &h, t)?
            }
            (None, None) => {
                let r = qubit_ground_population(p, theta_tilde);
                config["q1"] = json!(r);
                build_step3_ensemble_with_reference(&rho, &h, &[r, 1.0 - r])?
            }
        };
        (ens, config)
    } else {
        let p = match &cli.p {
            Some(p) => p.clone(),
            None => fig4_default_probabilities(d)
                .ok_or_else(|| Failure::Usage(format!("--p is required for d = {d}")))?,
        };
        if p.len() != d {
            return Err(Failure::Usage(format!(
                "{} probabilities given for d = {d}",
                p.len()
            )));
        }
        let big_theta = cli.big_theta.unwrap_or(0.3);
        let t = cli.temperature.unwrap_or(1.0);
        let rho = figures::fourier_state(&FourierFamily::new(d)?, &p, big_theta)?;
        let h = Hamiltonian::uniform(d, cli.omega)?;
        let config =
            json!({"d": d, "p": p, "Theta": big_theta, "temperature": t, "omega": cli.omega});
        (build_step3_ensemble(&rho, &h, t)?, config)
    };
    let mc = match cli.samples {
        Some(n) => {
            config["samples"] = json!(n);
            config["seed"] = json!(cli.seed);
            Some(monte_carlo_sample(&ens, n, cli.seed, cli.threads())?)
        }
        None => None,
    };
    Ok((figures::trajectory_table(&ens, mc.as_ref()), config))
}

fn protocol(cli: &Cli) -> Result<(Table, Value), Failure> {
    let p = cli.scalar_p(0.8)?;
    let theta = cli.theta.unwrap_or(PI / 3.0);
    let theta_tilde = cli.theta_tilde.unwrap_or(0.0);
    let q1 = cli
        .q1
        .unwrap_or_else(|| qubit_ground_population(p, theta_tilde));
    let temperature = cli.temperature.unwrap_or(1.0);
    let step4 = cli.step4(Step4::Steps(8))?;
    let qp = QubitProtocol {
        p,
        theta,
        theta_tilde,
        q1,
        temperature,
        omega0: cli.omega,
    };
    let config = json!({"p": p, "theta": theta, "theta_tilde": theta_tilde, "q1": q1,
        "temperature": temperature, "omega0": cli.omega, "step4": step4_json(step4)});
    Ok((figures::protocol_table(&qp.plan(step4)?)?, config))
}

fn validate(cli: &Cli) -> Result<(Table, Value), Failure> {
    let cfg = SuiteConfig {
        seed: cli.seed,
        samples: cli.samples.unwrap_or(1_000_000),
        workers: cli.threads(),
        grid: cli.grid(),
        inject_fault: cli.inject_fault,
        ..SuiteConfig::default()
    };
    let results = run_suite(&cfg)?;
    let mut table = Table::new(&["criterion", "name", "passed"]);
    for c in &results {
        eprintln!("{}", c.summary());
        table.push(vec![c.id.into(), c.name.into(), c.passed().into()]);
        for check in &c.checks {
            table.checks.push(Check::new(
                format!("{}: {}", c.id, check.name),
                check.passed,
                check.detail.clone(),
            ));
        }
    }
    let config = json!({"seed": cfg.seed, "samples": cfg.samples, "grid": cfg.grid,
        "corpus_size": cfg.corpus_size, "qubit_states": cfg.qubit_states});
    Ok((table, config))
}

fn emit(
    cli: &Cli,
    command: &str,
    table: &Table,
    mut config: Value,
    format: Format,
) -> Result<(), Failure> {
    config["command"] = json!(command);
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(config),
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let (name, default_format) = match cli.command {
        Command::Fig3 => ("fig3", Format::Csv),
        Command::Fig4a => ("fig4a", Format::Csv),
        Command::Fig4b => ("fig4b", Format::Csv),
        Command::Fig5a => ("fig5a", Format::Csv),
        Command::Fig5b => ("fig5b", Format::Csv),
        Command::Fig6 => ("fig6", Format::Csv),
        Command::Trajectories => ("trajectories", Format::Csv),
        Command::Protocol => ("protocol", Format::Csv),
        Command::Validate => ("validate", Format::Json),
    };
    let (table, config) = match cli.command {
        Command::Fig3 => fig3(cli)?,
        Command::Fig4a => fig4(cli, false)?,
        Command::Fig4b => fig4(cli, true)?,
        Command::Fig5a => fig5(cli, false)?,
        Command::Fig5b => fig5(cli, true)?,
        Command::Fig6 => fig6(cli)?,
        Command::Trajectories => trajectories(cli)?,
        Command::Protocol => protocol(cli)?,
        Command::Validate => validate(cli)?,
    };
    emit(
        cli,
        name,
        &table,
        config,
        cli.format.unwrap_or(default_format),
    )?;
    if matches!(cli.command, Command::Validate) && !table.all_checks_pass() {
        return Err(Failure::Validation("validation failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
