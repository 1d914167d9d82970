use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use smoothboost_harness::report::{render, report, Status};
use smoothboost_harness::{execute, run, Constants, Experiment, ExperimentConfig, Format, RunRecord, TieRuleArg};

/// Seeded experiments over lifted majority classes.
///
/// Exit status: 0 when every threshold passes, 1 when any fails, 2 on usage or runtime errors.
#[derive(Parser)]
#[command(name = "smoothboost", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Walsh–Hadamard round trip, Parseval and the MAJ_3 spectrum.
    Spectral(RunArgs),
    /// Best half-junta agreement of MAJ_k and J(MAJ_3, δ).
    JuntaMaj(RunArgs),
    /// Dictator advantages of MAJ_k under random density distributions.
    DictatorIdentity(RunArgs),
    /// Correlated-variance identity and its error sandwich.
    VarianceSandwich(RunArgs),
    /// Random rounding of a correlation vector to a hard junta.
    Rounding(RunArgs),
    /// Soft junta upper bounds against exact junta complexity.
    SoftSandwich(RunArgs),
    /// Σα_i² between fixed and random balanced inner functions.
    Concentration(RunArgs),
    /// Distance from a fixed lift member to random members.
    Covering(RunArgs),
    /// The block-table weak learner under the uniform distribution.
    WeakLearnUniform(RunArgs),
    /// The block-table weak learner under the anti-block distribution.
    WeakLearnAdversarial(RunArgs),
    /// The memorizing learner on small explicit domains.
    MemorizeBaseline(RunArgs),
    /// Simultaneous accuracy of validation estimates over the threshold family.
    UniformConvergence(RunArgs),
    /// Run an experiment from a TOML or JSON configuration file.
    Run {
        config: PathBuf,
    },
    /// Re-run a recorded configuration and compare its per-trial rows byte for byte.
    Rerun {
        record: PathBuf,
    },
    /// Acceptance table over JSON run records.
    Report {
        #[arg(required = true)]
        records: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    grid: Option<u32>,
    #[arg(long)]
    u_override: Option<u32>,
    #[arg(long)]
    fix_inner: bool,
    #[arg(long, value_enum)]
    tie_rule: Option<TieRuleArg>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

impl RunArgs {
    fn into_config(self, experiment: Experiment) -> ExperimentConfig {
        ExperimentConfig {
            experiment,
            seed: self.seed,
            k: self.k,
            n: self.n,
            m: self.m,
            kappa: self.kappa,
            trials: self.trials,
            delta: self.delta,
            epsilon: self.epsilon,
            grid: self.grid,
            u_override: self.u_override,
            fix_inner: self.fix_inner,
            tie_rule: self.tie_rule,
            out: self.out,
            format: self.format,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> smoothboost_harness::Result<bool> {
    let (experiment, args) = match command {
        Command::Spectral(a) => (Experiment::Spectral, a),
        Command::JuntaMaj(a) => (Experiment::JuntaMaj, a),
        Command::DictatorIdentity(a) => (Experiment::DictatorIdentity, a),
        Command::VarianceSandwich(a) => (Experiment::VarianceSandwich, a),
        Command::Rounding(a) => (Experiment::Rounding, a),
        Command::SoftSandwich(a) => (Experiment::SoftSandwich, a),
        Command::Concentration(a) => (Experiment::Concentration, a),
        Command::Covering(a) => (Experiment::Covering, a),
        Command::WeakLearnUniform(a) => (Experiment::WeakLearnUniform, a),
        Command::WeakLearnAdversarial(a) => (Experiment::WeakLearnAdversarial, a),
        Command::MemorizeBaseline(a) => (Experiment::MemorizeBaseline, a),
        Command::UniformConvergence(a) => (Experiment::UniformConvergence, a),
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)?;
            let parsed = if config.extension().is_some_and(|e| e == "json") {
                ExperimentConfig::from_json(&text)?
            } else {
                ExperimentConfig::from_toml(&text)?
            };
            return run_config(&parsed);
        }
        Command::Rerun { record } => return rerun(&record),
        Command::Report { records } => {
            let records = records.iter().map(|p| RunRecord::read(p)).collect::<Result<Vec<_>, _>>()?;
            let rows = report(&records, &[])?;
            print!("{}", render(&rows));
            return Ok(rows.iter().all(|r| r.status == Status::Pass));
        }
    };
    run_config(&args.into_config(experiment))
}

fn run_config(config: &ExperimentConfig) -> smoothboost_harness::Result<bool> {
    let constants = Constants::load()?;
    let record = run(config, &constants)?;
    for (key, value) in &record.summary {
        if key != "diagnostics" {
            println!("{key}: {value}");
        }
    }
    for c in &record.checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {} {}: {} ({})", c.criterion, c.name, c.observed, c.threshold);
    }
    if let Some(out) = &config.out {
        println!("wrote {}", out.display());
    }
    Ok(record.passed())
}

fn rerun(path: &std::path::Path) -> smoothboost_harness::Result<bool> {
    let old = RunRecord::read(path)?;
    let expected = match &old.rows {
        Some(_) => old.to_csv()?,
        None => {
            let out = old
                .config
                .out
                .as_ref()
                .ok_or_else(|| smoothboost_harness::Error::Config("record has neither rows nor an output path".into()))?;
            std::fs::read(out)?
        }
    };
    let fresh = execute(&old.config, &Constants::load()?)?;
    let same = fresh.to_csv()? == expected;
    println!(
        "{}: per-trial rows {}",
        old.config.experiment,
        if same { "identical" } else { "differ" }
    );
    Ok(same)
}
