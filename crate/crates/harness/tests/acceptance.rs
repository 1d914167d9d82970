//! Runs every acceptance criterion at its stated scale and prints one line per criterion.
//!
//! Criteria listed as unattainable in the constants file are still run and reported;
//! any other failure makes the binary exit with status 1.

use std::process::ExitCode;
use std::time::Instant;

use smoothboost_harness::report::{report, Status};
use smoothboost_harness::{run, Check, Constants, Experiment, ExperimentConfig, RunRecord};

fn main() -> ExitCode {
    let constants = match Constants::load() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cannot load constants: {e}");
            return ExitCode::from(2);
        }
    };
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut records: Vec<RunRecord> = Vec::new();
    let mut reproducible = Vec::new();
    let mut errors = Vec::new();
    println!(
        "acceptance: seed {}, constants version {}, pilot seed {}",
        constants.acceptance_seed, constants.version, constants.pilot_seed
    );
    for experiment in Experiment::ALL {
        let start = Instant::now();
        let mut config = ExperimentConfig::new(experiment, constants.acceptance_seed);
        config.out = Some(dir.path().join(format!("{experiment}.csv")));
        let first = run(&config, &constants);
        config.out = Some(dir.path().join(format!("{experiment}-again.csv")));
        let second = run(&config, &constants);
        match (first, second) {
            (Ok(a), Ok(_)) => {
                let bytes = |name: String| std::fs::read(dir.path().join(name)).unwrap_or_default();
                let same = bytes(format!("{experiment}.csv")) == bytes(format!("{experiment}-again.csv"));
                reproducible.push((experiment, same));
                records.push(a);
            }
            (Err(e), _) | (_, Err(e)) => errors.push((experiment, e.to_string())),
        }
        eprintln!("  {experiment} finished in {:.1}s", start.elapsed().as_secs_f64());
    }
    let differing: Vec<String> = reproducible.iter().filter(|(_, s)| !s).map(|(e, _)| e.to_string()).collect();
    let all_ran = errors.is_empty();
    let repro = Check::new(
        13,
        "byte-identical per-trial CSV on re-run",
        format!("{} of {} identical", reproducible.len() - differing.len(), Experiment::ALL.len()),
        "all identical",
        all_ran && differing.is_empty(),
    );
    let mut extra = vec![repro];
    for (experiment, message) in &errors {
        extra.push(Check::new(experiment.criterion(), "run", message, "completes", false));
    }
    let rows = match report(&records, &extra) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("report failed: {e}");
            return ExitCode::from(2);
        }
    };
    let mut unexpected = 0;
    for row in &rows {
        let known = constants.unattainable.contains(&row.criterion);
        let note = match (row.status, known) {
            (Status::Fail, true) => " [known unattainable]",
            (Status::Pass, true) => " [listed unattainable but passed]",
            _ => "",
        };
        println!("{row}{note}");
        if row.status != Status::Pass && !known {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed");
        ExitCode::from(1)
    }
}
