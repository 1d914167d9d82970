//! Experiment dispatch. Each experiment produces per-trial rows, a summary and
//! threshold checks for its acceptance criterion.
//!
//! Trial `t` of an experiment with root seed `s` draws all of its randomness from
//! `substream(s, tag, t)`, where `tag` is fixed per experiment, so rows do not depend
//! on thread scheduling.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde_json::{json, Value};
use smoothboost::junta::{
    alpha_correlated_error, alpha_correlated_variance, derandomized_rounding, dictator_advantage, junta_complexity,
    maj_best_halfjunta_agreement, rounding_expected_error, soft_junta_upper, SoftJuntaSearch,
};
use smoothboost::lift::{concentration_experiment, covering_statistic, ConcentrationConfig, CoveringConfig};
use smoothboost::numeric::{mean_and_stderr, substream, Stream};
use smoothboost::smoothdist::{anti_block_distribution, Certification};
use smoothboost::weaklearn::{
    memorize, uniform_convergence_experiment, weak_learn, EvalMode, ThresholdRule, UniformConvergenceConfig,
    WeakLearnConfig,
};
use smoothboost::{BooleanFunction, CorrelationVector, DensityDistribution, LiftedFunction, Outer, SmoothDistribution};

use crate::config::{Experiment, ExperimentConfig, TieRuleArg};
use crate::constants::Constants;
use crate::record::{unix_now, Check, RunRecord, LIBRARY_VERSION, SCHEMA_VERSION};
use crate::{Error, Result};

const SPECTRAL_TAG: u64 = 0xe1;
const DICTATOR_TAG: u64 = 0xe3;
const VARIANCE_TAG: u64 = 0xe4;
const ROUNDING_TAG: u64 = 0xe5;
const SANDWICH_TAG: u64 = 0xe6;
const COVERING_TARGET_TAG: u64 = 0xe8;
const WEAK_TAG: u64 = 0xe9;
const MEMORIZE_TAG: u64 = 0xeb;

/// Diagnostic draws per weak-learner run when the domain is too large to enumerate.
pub const WEAK_EVAL_SAMPLES: u64 = 50_000;
/// Draws used to certify acceptance of filtered distributions without a closed form.
pub const CERTIFY_SAMPLES: u64 = 200_000;
/// Tie-rule realisations per memorizing-baseline instance.
pub const MEMORIZE_DRAWS: u64 = 2_000;

struct Outcome {
    rows: Vec<Vec<f64>>,
    summary: BTreeMap<String, Value>,
    checks: Vec<Check>,
}

/// Runs the experiment and writes its output if `config.out` is set.
pub fn run(config: &ExperimentConfig, constants: &Constants) -> Result<RunRecord> {
    let record = execute(config, constants)?;
    record.write()?;
    Ok(record)
}

/// Runs the experiment without touching the filesystem.
pub fn execute(config: &ExperimentConfig, constants: &Constants) -> Result<RunRecord> {
    let started = unix_now();
    let outcome = if config.trials == Some(0) {
        let mut summary = BTreeMap::new();
        summary.insert("status".into(), json!("no data"));
        Outcome {
            rows: Vec::new(),
            summary,
            checks: Vec::new(),
        }
    } else {
        let t = &constants.thresholds;
        let c = config.experiment.criterion();
        match config.experiment {
            Experiment::Spectral => spectral(config, c, t),
            Experiment::JuntaMaj => junta_maj(config, c),
            Experiment::DictatorIdentity => dictator(config, c, t),
            Experiment::VarianceSandwich => variance(config, c, t),
            Experiment::Rounding => rounding(config, c),
            Experiment::SoftSandwich => sandwich(config, c),
            Experiment::Concentration => concentration(config, c, t),
            Experiment::Covering => covering(config, c, t),
            Experiment::WeakLearnUniform => weak_uniform(config, c, t),
            Experiment::WeakLearnAdversarial => weak_adversarial(config, c, t),
            Experiment::MemorizeBaseline => memorize_baseline(config, c, t),
            Experiment::UniformConvergence => convergence(config, c, t),
        }?
    };
    Ok(RunRecord {
        version: LIBRARY_VERSION.into(),
        schema: SCHEMA_VERSION,
        config: config.clone(),
        started_unix: started,
        finished_unix: unix_now(),
        columns: columns(config.experiment).iter().map(|s| s.to_string()).collect(),
        rows: Some(outcome.rows),
        summary: outcome.summary,
        checks: outcome.checks,
    })
}

/// CSV column order per experiment.
pub fn columns(experiment: Experiment) -> &'static [&'static str] {
    match experiment {
        Experiment::Spectral => &["k", "trial", "parseval_error", "round_trip"],
        Experiment::JuntaMaj => &["k", "agreement"],
        Experiment::DictatorIdentity => &["k", "trial", "density", "average", "mean_dictator", "max_dictator", "bound"],
        Experiment::VarianceSandwich => &["trial", "k", "direct", "spectral", "error", "sandwich"],
        Experiment::Rounding => &["trial", "k", "alpha_error", "rounded_error"],
        Experiment::SoftSandwich => &["trial", "k", "delta", "soft", "junta", "junta_4delta", "z_size", "z_error"],
        Experiment::Concentration => &["trial", "sum_sq", "unbalanced_sum_sq", "flipped", "flip_bound"],
        Experiment::Covering => &["trial", "distance"],
        Experiment::WeakLearnUniform | Experiment::WeakLearnAdversarial => &[
            "trial",
            "u",
            "constant",
            "tau",
            "validation_advantage",
            "advantage",
            "advantage_stderr",
            "g_correlation",
            "tail",
            "block1_correlation",
        ],
        Experiment::MemorizeBaseline => &["trial", "distinct", "expected", "oracle", "mc_mean", "mc_stderr"],
        Experiment::UniformConvergence => &["trial", "max_deviation"],
    }
}

fn trial_rng(seed: u64, tag: u64, trial: u64) -> Stream {
    substream(seed, tag, trial)
}

fn random_alpha(k: u32, rng: &mut Stream) -> Result<CorrelationVector> {
    Ok(CorrelationVector::new((0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect())?)
}

fn column(rows: &[Vec<f64>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i]).collect()
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

fn mean(values: &[f64]) -> f64 {
    mean_and_stderr(values).0
}

fn summary(pairs: Vec<(&str, Value)>) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn param_k(config: &ExperimentConfig, default: u32, max: u32) -> Result<u32> {
    let k = config.k.unwrap_or(default);
    if k == 0 || k > max {
        return Err(Error::Config(format!("{} needs k in 1..={max}, got {k}", config.experiment)));
    }
    Ok(k)
}

fn spectral(config: &ExperimentConfig, c: u32, t: &crate::constants::Thresholds) -> Result<Outcome> {
    let kmax = param_k(config, 10, 20)?;
    let trials = config.trials.unwrap_or(200);
    let cells: Vec<(u32, u64)> = (1..=kmax).flat_map(|k| (0..trials).map(move |i| (k, i))).collect();
    let rows = cells
        .par_iter()
        .map(|&(k, i)| {
            let g = BooleanFunction::random(k, &mut trial_rng(config.seed, SPECTRAL_TAG, (k as u64) << 32 | i))?;
            let s = g.fourier();
            let round_trip = s.to_boolean_function()? == g;
            Ok(vec![k as f64, i as f64, (s.parseval_sum() - 1.0).abs(), round_trip as u8 as f64])
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = max_of(&column(&rows, 2));
    let failures = rows.iter().filter(|r| r[3] != 1.0).count();
    let maj = BooleanFunction::majority(3)?;
    let spectrum = maj.fourier();
    let mut maj_ok = true;
    let mut coefficients = Vec::new();
    for mask in 0..8u64 {
        let oracle = (0..8u64)
            .map(|x| {
                let chi = if (mask & !x).count_ones() % 2 == 0 { 1 } else { -1 };
                (maj.get(x) as i64 * chi) as f64
            })
            .sum::<f64>()
            / 8.0;
        let expected = if mask.count_ones() % 2 == 1 { 0.5 } else { 0.0 };
        let v = spectrum.coefficient(mask);
        maj_ok &= v == oracle && v.abs() == expected;
        coefficients.push(v);
    }
    let checks = vec![
        Check::new(c, "parseval error", format!("{worst:.3e}"), format!("≤ {:e}", t.spectral_tolerance), worst <= t.spectral_tolerance),
        Check::new(c, "inverse transform failures", failures, "0", failures == 0),
        Check::new(c, "MAJ_3 spectrum matches enumeration", format!("{coefficients:?}"), "±0.5 on odd sets", maj_ok),
    ];
    Ok(Outcome {
        rows,
        summary: summary(vec![
            ("max_parseval_error", json!(worst)),
            ("round_trip_failures", json!(failures)),
            ("maj3_spectrum", json!(coefficients)),
        ]),
        checks,
    })
}

fn junta_maj(config: &ExperimentConfig, c: u32) -> Result<Outcome> {
    let kmax = param_k(config, 10, 16)?;
    if kmax % 2 == 1 || kmax < 4 {
        return Err(Error::Config(format!("junta-maj needs even k ≥ 4, got {kmax}")));
    }
    let ks: Vec<u32> = (4..=kmax).step_by(2).collect();
    let rows = ks
        .iter()
        .map(|&k| Ok(vec![k as f64, maj_best_halfjunta_agreement(k)?]))
        .collect::<Result<Vec<_>>>()?;
    let agreements = column(&rows, 1);
    let maj3 = BooleanFunction::majority(3)?;
    let (j25, _) = junta_complexity(&maj3, 0.25, None)?;
    let (j24, _) = junta_complexity(&maj3, 0.24, None)?;
    let monotone = agreements.windows(2).all(|w| w[1] <= w[0]);
    let floor = agreements.iter().all(|&a| a >= 0.75);
    let mut checks = vec![
        Check::new(c, "J(MAJ_3, 0.25)", j25, "= 1", j25 == 1),
        Check::new(c, "J(MAJ_3, 0.24)", j24, "= 3", j24 == 3),
    ];
    if let Some(a6) = rows.iter().find(|r| r[0] == 6.0).map(|r| r[1]) {
        checks.push(Check::new(c, "half-junta agreement k=6", a6, "= 0.75", a6 == 0.75));
    }
    checks.push(Check::new(
        c,
        "agreement non-increasing toward 3/4",
        format!("{agreements:?}"),
        "non-increasing, ≥ 0.75",
        monotone && floor,
    ));
    Ok(Outcome {
        summary: summary(vec![
            ("best_agreement", json!(agreements.last())),
            ("agreements", json!(ks.iter().zip(&agreements).map(|(k, a)| json!([k, a])).collect::<Vec<_>>())),
            ("j_maj3_0.25", json!(j25)),
            ("j_maj3_0.24", json!(j24)),
        ]),
        rows,
        checks,
    })
}

fn dictator(config: &ExperimentConfig, c: u32, t: &crate::constants::Thresholds) -> Result<Outcome> {
    let ks = match config.k {
        Some(k) => vec![k],
        None => vec![3, 5, 7],
    };
    let trials = config.trials.unwrap_or(100);
    let fixed_density = match config.kappa {
        Some(kappa) if kappa >= 1.0 => Some(1.0 / kappa),
        Some(kappa) => return Err(Error::Config(format!("κ must be at least 1, got {kappa}"))),
        None => None,
    };
    let cells: Vec<(u32, u64)> = ks.iter().flat_map(|&k| (0..trials).map(move |i| (k, i))).collect();
    let rows = cells
        .par_iter()
        .map(|&(k, i)| {
            let mut rng = trial_rng(config.seed, DICTATOR_TAG, (k as u64) << 32 | i);
            let density = fixed_density.unwrap_or_else(|| rng.gen_range(0.1..=1.0));
            let h = DensityDistribution::random(k, density, &mut rng)?;
            let adv = dictator_advantage(&h)?;
            let bound = t.dictator_constant * density * (k as f64).sqrt();
            Ok(vec![k as f64, i as f64, density, adv.average, adv.mean_of_coordinates(), adv.max, bound])
        })
        .collect::<Result<Vec<_>>>()?;
    let identity = rows.iter().map(|r| (r[3] - r[4]).abs()).fold(0.0, f64::max);
    let below = rows.iter().filter(|r| r[5] < r[6]).count();
    let slack = rows.iter().map(|r| r[5] / (r[2] * r[0].sqrt())).fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        summary: summary(vec![
            ("max_identity_error", json!(identity)),
            ("bound_violations", json!(below)),
            ("min_max_over_c_sqrt_k", json!(slack)),
        ]),
        checks: vec![
            Check::new(
                c,
                "identity error",
                format!("{identity:.3e}"),
                format!("≤ {:e}", t.dictator_identity_tolerance),
                identity <= t.dictator_identity_tolerance,
            ),
            Check::new(c, "max dictator below c·√k·const", below, format!("0 (const {})", t.dictator_constant), below == 0),
        ],
        rows,
    })
}

fn variance(config: &ExperimentConfig, c: u32, t: &crate::constants::Thresholds) -> Result<Outcome> {
    let kmax = param_k(config, 6, 12)?;
    let trials = config.trials.unwrap_or(100);
    let rows = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, VARIANCE_TAG, i);
            let k = 1 + (i % kmax as u64) as u32;
            let g = BooleanFunction::random(k, &mut rng)?;
            let alpha = random_alpha(k, &mut rng)?;
            let v = alpha_correlated_variance(&g, &alpha)?;
            let e = alpha_correlated_error(&g, &alpha)?;
            let ok = 2.0 * e <= v.direct + 1e-12 && v.direct <= 4.0 * e + 1e-12;
            Ok(vec![i as f64, k as f64, v.direct, v.spectral, e, ok as u8 as f64])
        })
        .collect::<Result<Vec<_>>>()?;
    let gap = rows.iter().map(|r| (r[2] - r[3]).abs()).fold(0.0, f64::max);
    let violations = rows.iter().filter(|r| r[5] != 1.0).count();
    Ok(Outcome {
        summary: summary(vec![("max_identity_gap", json!(gap)), ("sandwich_violations", json!(violations))]),
        checks: vec![
            Check::new(c, "spectral vs direct variance", format!("{gap:.3e}"), format!("≤ {:e}", t.variance_tolerance), gap <= t.variance_tolerance),
            Check::new(c, "2·error ≤ variance ≤ 4·error violations", violations, "0", violations == 0),
        ],
        rows,
    })
}

fn rounding(config: &ExperimentConfig, c: u32) -> Result<Outcome> {
    let kmax = param_k(config, 8, 12)?;
    let trials = config.trials.unwrap_or(200);
    let rows = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, ROUNDING_TAG, i);
            let k = 1 + (i % kmax as u64) as u32;
            let g = BooleanFunction::random(k, &mut rng)?;
            let alpha = random_alpha(k, &mut rng)?;
            Ok(vec![i as f64, k as f64, alpha_correlated_error(&g, &alpha)?, rounding_expected_error(&g, &alpha)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = rows.iter().filter(|r| r[3] > 2.0 * r[2] + 1e-12).count();
    let ratio = rows
        .iter()
        .filter(|r| r[2] > 0.0)
        .map(|r| r[3] / r[2])
        .fold(0.0, f64::max);
    Ok(Outcome {
        summary: summary(vec![("violations", json!(violations)), ("max_ratio", json!(ratio))]),
        checks: vec![Check::new(c, "E_z[z-error] > 2·α-error", violations, "0", violations == 0)],
        rows,
    })
}

fn sandwich(config: &ExperimentConfig, c: u32) -> Result<Outcome> {
    let kmax = param_k(config, 4, 8)?;
    let trials = config.trials.unwrap_or(50);
    let deltas = match config.delta {
        Some(d) => vec![d],
        None => vec![0.05, 0.1, 0.2],
    };
    let grid = config.grid.unwrap_or(SoftJuntaSearch::default().grid);
    let rows = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, SANDWICH_TAG, i);
            let k = 1 + (i % kmax as u64) as u32;
            let g = BooleanFunction::random(k, &mut rng)?;
            let search = SoftJuntaSearch {
                grid,
                seed: rng.next_u64(),
                ..SoftJuntaSearch::default()
            };
            let mut out = Vec::new();
            for &delta in &deltas {
                let soft = soft_junta_upper(&g, delta, &search)?;
                let (j, _) = junta_complexity(&g, delta, None)?;
                let (j4, _) = junta_complexity(&g, 4.0 * delta, None)?;
                let (z_size, z_error) = match derandomized_rounding(&g, &soft.alpha, delta)? {
                    Some(cert) => (cert.size as f64, cert.error),
                    None => (-1.0, -1.0),
                };
                out.push(vec![i as f64, k as f64, delta, soft.value, j as f64, j4 as f64, z_size, z_error]);
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<Vec<f64>>>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    let upper = rows.iter().filter(|r| r[3] > r[4] + 1e-9).count();
    let witness = rows
        .iter()
        .filter(|r| r[6] < 0.0 || r[6] > 2.0 * r[3] + 1e-9 || r[5] > r[6] || r[7] > 4.0 * r[2] + 1e-12)
        .count();
    Ok(Outcome {
        summary: summary(vec![("upper_violations", json!(upper)), ("witness_violations", json!(witness))]),
        checks: vec![
            Check::new(c, "soft_junta_upper > J(g, δ)", upper, "0", upper == 0),
            Check::new(c, "z-certificate fails J(g, 4δ) ≤ |z| ≤ 2·soft", witness, "0", witness == 0),
        ],
        rows,
    })
}

fn concentration(config: &ExperimentConfig, c: u32, t: &crate::constants::Thresholds) -> Result<Outcome> {
    let n = config.n.unwrap_or(8);
    let k = config.k.unwrap_or(16);
    let cutoff = 4.0 * k as f64 / (1u64 << n) as f64;
    let report = concentration_experiment(&ConcentrationConfig {
        n,
        k,
        trials: config.trials.unwrap_or(10_000),
        seed: config.seed,
        fix_inner: config.fix_inner,
        tail_grid: vec![k as f64 / (1u64 << n) as f64, 2.0 * k as f64 / (1u64 << n) as f64, cutoff],
    })?;
    let rows = report
        .trials
        .iter()
        .map(|r| vec![r.trial as f64, r.sum_sq, r.unbalanced_sum_sq, r.flipped as f64, r.flip_bound as f64])
        .collect();
    let tail = report.tail.last().map(|&(_, p)| p).unwrap_or(0.0);
    let gap = (report.mean - report.expected_mean).abs();
    let band = t.concentration_sigmas * report.stderr;
    Ok(Outcome {
        summary: summary(vec![
            ("mean", json!(report.mean)),
            ("stderr", json!(report.stderr)),
            ("expected_mean", json!(report.expected_mean)),
            ("quantiles", json!(report.quantiles)),
            ("tail", json!(report.tail)),
            ("flip_bound_violations", json!(report.flip_bound_violations)),
        ]),
        checks: vec![
            Check::new(c, "|mean − k/(2^n−1)|", format!("{gap:.3e}"), format!("≤ {band:.3e} (3σ)"), gap <= band),
            Check::new(c, "Pr[Σα² ≥ 4k/2^n]", tail, format!("≤ {}", t.concentration_tail), tail <= t.concentration_tail),
            Check::new(c, "flip bound violations", report.flip_bound_violations, "0", report.flip_bound_violations == 0),
        ],
        rows,
    })
}

fn covering(config: &ExperimentConfig, c: u32, t: &crate::constants::Thresholds) -> Result<Outcome> {
    let n = config.n.unwrap_or(8);
    let outer = Outer::majority(config.k.unwrap_or(15))?;
    let h = LiftedFunction::random(outer.clone(), n, &mut trial_rng(config.seed, COVERING_TARGET_TAG, 0))?;
    let mut cc = CoveringConfig::new(n, config.trials.unwrap_or(1000), config.seed);
    if let Some(r) = config.delta {
        cc.radius = r;
    }
    let report = covering_statistic(&outer, &h, &cc)?;
    let rows: Vec<Vec<f64>> = report.distances.iter().enumerate().map(|(i, &d)| vec![i as f64, d]).collect();
    let mean_distance = mean(&report.distances);
    let gap = (mean_distance - 0.5).abs();
    Ok(Outcome {
        summary: summary(vec![
            ("hits", json!(report.hits)),
            ("fraction", json!(report.fraction)),
            ("clopper_pearson", json!([report.lower, report.upper])),
            ("confidence", json!(cc.confidence)),
            ("radius", json!(cc.radius)),
            ("exhaustive", json!(report.exhaustive)),
            ("mean_distance", json!(mean_distance)),
        ]),
        checks: vec![
            Check::new(c, "members within radius", report.hits, "0", report.hits == 0),
            Check::new(
                c,
                "mean distance",
                format!("{mean_distance:.4}"),
                format!("0.5 ± {}", t.covering_mean_tolerance),
                gap <= t.covering_mean_tolerance,
            ),
        ],
        rows,
    })
}

struct WeakRun {
    row: Vec<f64>,
    diagnostics: Value,
}

fn weak_runs(config: &ExperimentConfig, defaults: (u32, u32), adversarial: bool) -> Result<(Vec<WeakRun>, f64)> {
    let n = config.n.unwrap_or(defaults.0);
    let k = config.k.unwrap_or(defaults.1);
    let m = config.m.unwrap_or(1 << n);
    let trials = config.trials.unwrap_or(100);
    let outer = Outer::majority(k)?;
    let runs = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, WEAK_TAG, i);
            let target = Arc::new(LiftedFunction::random(outer.clone(), n, &mut rng)?);
            let run_seed = rng.next_u64();
            let d = if adversarial {
                anti_block_distribution(
                    target.clone(),
                    Certification::Auto {
                        samples: CERTIFY_SAMPLES,
                        seed: run_seed,
                    },
                )?
            } else {
                SmoothDistribution::uniform(n, k)?
            };
            let eval = if d.has_exact_pmf() {
                EvalMode::Exact
            } else {
                EvalMode::MonteCarlo { samples: WEAK_EVAL_SAMPLES }
            };
            let wl = WeakLearnConfig {
                m,
                kappa: config.kappa,
                u_override: config.u_override,
                eval,
            };
            let out = weak_learn(&target, &d, &wl, run_seed)?;
            let diag = out.diagnostics;
            let (constant, tau) = match diag.rule {
                ThresholdRule::Constant(c) => (c as f64, 0.0),
                ThresholdRule::Threshold(t) => (0.0, t as f64),
            };
            let row = vec![
                i as f64,
                diag.u as f64,
                constant,
                tau,
                diag.validation_advantage,
                diag.advantage.mean,
                diag.advantage.stderr,
                diag.g_correlation.mean,
                diag.tail.mean,
                diag.per_block_correlations[0],
            ];
            Ok((
                WeakRun {
                    row,
                    diagnostics: serde_json::to_value(&diag)?,
                },
                d.kappa(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let kappa = runs.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((runs.into_iter().map(|r| r.0).collect(), kappa))
}

fn weak_uniform(config: &ExperimentConfig, c: u32, t: &crate::constants::Thresholds) -> Result<Outcome> {
    let (runs, _) = weak_runs(config, (10, 21), false)?;
    let k = config.k.unwrap_or(21);
    let rows: Vec<Vec<f64>> = runs.iter().map(|r| r.row.clone()).collect();
    let trials = rows.len() as u64;
    let positive = rows.iter().filter(|r| r[5] > 0.0).count() as u64;
    let mean_adv = mean(&column(&rows, 5));
    let g_corr = mean(&column(&rows, 7));
    let tail_ok = rows.iter().filter(|r| r[8] <= 1.0 / (k * k) as f64).count() as u64;
    let need_pos = Constants::runs_needed(t.weak_uniform_positive_runs, trials);
    let need_tail = Constants::runs_needed(t.weak_uniform_tail_runs, trials);
    Ok(Outcome {
        summary: summary(vec![
            ("positive_runs", json!(positive)),
            ("mean_advantage", json!(mean_adv)),
            ("min_advantage", json!(column(&rows, 5).iter().copied().fold(f64::INFINITY, f64::min))),
            ("mean_g_correlation", json!(g_corr)),
            ("tail_within_bound_runs", json!(tail_ok)),
            ("diagnostics", Value::Array(runs.into_iter().map(|r| r.diagnostics).collect())),
        ]),
        checks: vec![
            Check::new(c, "runs with positive advantage", positive, format!("≥ {need_pos} of {trials}"), positive >= need_pos),
            Check::new(
                c,
                "mean advantage",
                format!("{mean_adv:.4}"),
                format!("≥ {} (pilot)", t.weak_uniform_mean_advantage),
                mean_adv >= t.weak_uniform_mean_advantage,
            ),
            Check::new(
                c,
                "mean g_correlation",
                format!("{g_corr:.4}"),
                format!("≥ {}", t.weak_uniform_g_correlation_mean),
                g_corr >= t.weak_uniform_g_correlation_mean,
            ),
            Check::new(c, "runs with tail ≤ 1/k²", tail_ok, format!("≥ {need_tail} of {trials}"), tail_ok >= need_tail),
        ],
        rows,
    })
}

fn weak_adversarial(config: &ExperimentConfig, c: u32, t: &crate::constants::Thresholds) -> Result<Outcome> {
    let (runs, kappa) = weak_runs(config, (10, 39), true)?;
    let rows: Vec<Vec<f64>> = runs.iter().map(|r| r.row.clone()).collect();
    let trials = rows.len() as u64;
    let separated = rows.iter().filter(|r| r[9] < 0.0 && r[5] > 0.0).count() as u64;
    let need = Constants::runs_needed(t.weak_adversarial_runs, trials);
    Ok(Outcome {
        summary: summary(vec![
            ("kappa", json!(kappa)),
            ("separated_runs", json!(separated)),
            ("negative_block1_runs", json!(rows.iter().filter(|r| r[9] < 0.0).count())),
            ("positive_runs", json!(rows.iter().filter(|r| r[5] > 0.0).count())),
            ("mean_advantage", json!(mean(&column(&rows, 5)))),
            ("diagnostics", Value::Array(runs.into_iter().map(|r| r.diagnostics).collect())),
        ]),
        checks: vec![
            Check::new(c, "certified κ", format!("{kappa:.4}"), format!("≤ {}", t.adversarial_max_kappa), kappa <= t.adversarial_max_kappa),
            Check::new(
                c,
                "block-1 correlation < 0 and advantage > 0",
                separated,
                format!("≥ {need} of {trials}"),
                separated >= need,
            ),
        ],
        rows,
    })
}

fn memorize_baseline(config: &ExperimentConfig, c: u32, t: &crate::constants::Thresholds) -> Result<Outcome> {
    let bits = config.n.unwrap_or(4);
    if bits == 0 || bits > 16 {
        return Err(Error::Config(format!("memorize-baseline needs n in 1..=16, got {bits}")));
    }
    let m = config.m.unwrap_or(6);
    let tie = config.tie_rule.unwrap_or(TieRuleArg::Random);
    let trials = config.trials.unwrap_or(50);
    let domain = 1usize << bits;
    let rows = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, MEMORIZE_TAG, i);
            let weights: Vec<f64> = (0..domain).map(|_| rng.gen_range(0.5..1.5)).collect();
            let total: f64 = weights.iter().sum();
            let pmf: Vec<f64> = weights.iter().map(|w| w / total).collect();
            let target: Vec<i8> = (0..domain).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            let kappa = pmf.iter().copied().fold(0.0, f64::max) * domain as f64;
            let d = SmoothDistribution::explicit(bits, 1, pmf.clone(), kappa.max(1.0))?;
            let mut sample = Vec::with_capacity(m as usize);
            for _ in 0..m {
                let x = d.sample(&mut rng)?.to_index()? as usize;
                sample.push((x, target[x]));
            }
            let h = memorize(&sample, domain, tie.into())?;
            let expected = h.expected_advantage(&target, &pmf)?;
            let seen = h.seen_mass(&pmf);
            let oracle = match tie {
                TieRuleArg::Random => seen,
                TieRuleArg::Plus | TieRuleArg::Minus => {
                    let fill = if tie == TieRuleArg::Plus { 1.0 } else { -1.0 };
                    seen + (0..domain).filter(|&x| !h.seen(x)).map(|x| fill * pmf[x] * target[x] as f64).sum::<f64>()
                }
            };
            let mc = h.monte_carlo_advantage(&target, &pmf, MEMORIZE_DRAWS, &mut rng)?;
            let distinct = (0..domain).filter(|&x| h.seen(x)).count();
            Ok(vec![i as f64, distinct as f64, expected, oracle, mc.mean, mc.stderr])
        })
        .collect::<Result<Vec<_>>>()?;
    let identity = rows.iter().map(|r| (r[2] - r[3]).abs()).fold(0.0, f64::max);
    let outside = rows
        .iter()
        .filter(|r| (r[4] - r[2]).abs() > t.memorize_sigmas * r[5] + 1e-12)
        .count();
    Ok(Outcome {
        summary: summary(vec![
            ("max_identity_error", json!(identity)),
            ("mc_outside_band", json!(outside)),
            ("tie_rule", json!(tie)),
        ]),
        checks: vec![
            Check::new(
                c,
                "expected advantage vs Σ_{x∈S} D(x)",
                format!("{identity:.3e}"),
                format!("≤ {:e}", t.memorize_tolerance),
                identity <= t.memorize_tolerance,
            ),
            Check::new(c, "Monte Carlo outside 3σ", outside, "0", outside == 0),
        ],
        rows,
    })
}

fn convergence(config: &ExperimentConfig, c: u32, t: &crate::constants::Thresholds) -> Result<Outcome> {
    let report = uniform_convergence_experiment(&UniformConvergenceConfig {
        n: config.n.unwrap_or(3),
        k: config.k.unwrap_or(5),
        m_train: config.m.unwrap_or(64),
        epsilon: config.epsilon.unwrap_or(0.1),
        delta: config.delta.unwrap_or(0.1),
        trials: config.trials.unwrap_or(1000),
        seed: config.seed,
    })?;
    let rows: Vec<Vec<f64>> = report.max_deviation.iter().enumerate().map(|(i, &d)| vec![i as f64, d]).collect();
    let fraction = report.envelope_holds as f64 / report.trials as f64;
    Ok(Outcome {
        summary: summary(vec![
            ("family_size", json!(report.family_size)),
            ("sample_size", json!(report.sample_size)),
            ("envelope_holds", json!(report.envelope_holds)),
            ("selection_holds", json!(report.selection_holds)),
            ("fraction", json!(fraction)),
        ]),
        checks: vec![Check::new(
            c,
            "simultaneous ε envelope",
            format!("{fraction:.3}"),
            format!("≥ {}", t.uniform_convergence_fraction),
            fraction >= t.uniform_convergence_fraction,
        )],
        rows,
    })
}
