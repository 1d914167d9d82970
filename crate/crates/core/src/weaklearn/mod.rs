//! Block-table threshold weak learner for lifted majority classes.
//!
//! Training memorises one label per block value: every training point `(X, y)`
//! overwrites `g_i(X^{(i)}) ← y` for each block `i`. The summed predictor is
//! `G_S(X) = Σ_i g_i(X^{(i)})`, and the output hypothesis is the best of
//! `h_τ(X) = sign[G_S(X) ≥ τ]` for `τ ∈ {−u, …, u}` and the two constants,
//! chosen on a held-out validation set.

pub mod memorize;

use std::io::{Read, Write};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lift::{BlockInput, Hypothesis, LiftedFunction, Outer};
use crate::numeric::substream;
use crate::smoothdist::{Estimate, Evaluation, SmoothDistribution};
use crate::{Error, Result};

pub use memorize::{memorize, MemorizingHypothesis, TieRule};

const LEARN_TAG: u64 = 0xb0;
const CONVERGENCE_TAG: u64 = 0xb1;

/// Labelled block inputs in draw order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    n: u32,
    k: u32,
    points: Vec<(BlockInput, i8)>,
    pub source: String,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct SampleRow {
    x_hex: String,
    y: i8,
}

impl LabeledSample {
    pub fn new(n: u32, k: u32, points: Vec<(BlockInput, i8)>) -> Result<Self> {
        for (x, y) in &points {
            if x.block_bits() != n || x.block_count() != k {
                return Err(Error::invalid("sample point does not match the sample shape"));
            }
            if *y != 1 && *y != -1 {
                return Err(Error::invalid(format!("label {y} is not ±1")));
            }
        }
        Ok(LabeledSample {
            n,
            k,
            points,
            source: String::new(),
            seed: 0,
        })
    }

    /// `m` i.i.d. draws from `d` labelled by `target`.
    pub fn draw<H, R>(target: &H, d: &SmoothDistribution, m: u64, rng: &mut R) -> Result<Self>
    where
        H: Hypothesis + ?Sized,
        R: Rng + ?Sized,
    {
        let points = (0..m)
            .map(|_| d.sample(rng).map(|x| (target.predict(&x), x)))
            .map(|r| r.map(|(y, x)| (x, y)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LabeledSample {
            n: d.block_bits(),
            k: d.block_count(),
            points,
            source: d.name(),
            seed: 0,
        })
    }

    pub fn block_bits(&self) -> u32 {
        self.n
    }

    pub fn block_count(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(BlockInput, i8)] {
        &self.points
    }

    /// First `m` points and the rest.
    pub fn split_at(&self, m: usize) -> (LabeledSample, LabeledSample) {
        let m = m.min(self.points.len());
        let part = |points: &[(BlockInput, i8)]| LabeledSample {
            n: self.n,
            k: self.k,
            points: points.to_vec(),
            source: self.source.clone(),
            seed: self.seed,
        };
        (part(&self.points[..m]), part(&self.points[m..]))
    }

    /// True when every label equals `target(X)`.
    pub fn labels_match<H: Hypothesis + ?Sized>(&self, target: &H) -> bool {
        self.points.iter().all(|(x, y)| target.predict(x) == *y)
    }

    /// Writes `x_hex,y` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (x, y) in &self.points {
            w.serialize(SampleRow { x_hex: x.to_hex(), y: *y })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(n: u32, k: u32, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut points = Vec::new();
        for row in r.deserialize() {
            let row: SampleRow = row?;
            points.push((BlockInput::from_hex(n, k, &row.x_hex)?, row.y));
        }
        Self::new(n, k, points)
    }
}

/// Per-block memorisation tables with values in `{−1, 0, +1}`; 0 means never written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTables {
    n: u32,
    tables: Vec<Vec<i8>>,
    writes: Vec<u64>,
}

impl BlockTables {
    pub fn empty(n: u32, k: u32) -> Self {
        BlockTables {
            n,
            tables: vec![vec![0; 1 << n]; k as usize],
            writes: vec![0; k as usize],
        }
    }

    pub fn block_bits(&self) -> u32 {
        self.n
    }

    pub fn block_count(&self) -> u32 {
        self.tables.len() as u32
    }

    pub fn value(&self, block: usize, x: u64) -> i8 {
        self.tables[block][x as usize]
    }

    pub fn table(&self, block: usize) -> &[i8] {
        &self.tables[block]
    }

    /// Number of overwrites per block, including repeated writes to one entry.
    pub fn writes(&self) -> &[u64] {
        &self.writes
    }

    /// Number of distinct written entries per block.
    pub fn written_entries(&self, block: usize) -> usize {
        self.tables[block].iter().filter(|&&v| v != 0).count()
    }

    /// `G_S(X) = Σ_i g_i(X^{(i)})`.
    #[inline]
    pub fn g_sum(&self, x: &BlockInput) -> i32 {
        self.tables
            .iter()
            .zip(x.blocks())
            .map(|(t, &b)| t[b as usize] as i32)
            .sum()
    }

    /// Number of blocks of `X` whose entry has been written.
    pub fn written_blocks(&self, x: &BlockInput) -> u32 {
        self.tables
            .iter()
            .zip(x.blocks())
            .filter(|(t, &b)| t[b as usize] != 0)
            .count() as u32
    }
}

/// Sequential last-write-wins training pass.
pub fn train_tables(sample: &LabeledSample, n: u32, k: u32) -> Result<BlockTables> {
    if sample.block_bits() != n || sample.block_count() != k {
        return Err(Error::invalid(format!(
            "sample has shape n={}, k={}, tables need n={n}, k={k}",
            sample.block_bits(),
            sample.block_count()
        )));
    }
    let mut tables = BlockTables::empty(n, k);
    for (x, y) in sample.points() {
        for (i, &b) in x.blocks().iter().enumerate() {
            tables.tables[i][b as usize] = *y;
            tables.writes[i] += 1;
        }
    }
    Ok(tables)
}

/// Decision rule of a [`ThresholdHypothesis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdRule {
    Constant(i8),
    Threshold(i32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdHypothesis {
    pub tables: Arc<BlockTables>,
    pub rule: ThresholdRule,
    pub u: u32,
}

impl Hypothesis for ThresholdHypothesis {
    fn predict(&self, x: &BlockInput) -> i8 {
        match self.rule {
            ThresholdRule::Constant(c) => c,
            ThresholdRule::Threshold(tau) => threshold_sign(self.tables.g_sum(x), tau),
        }
    }
}

#[inline]
fn threshold_sign(g: i32, tau: i32) -> i8 {
    if g >= tau {
        1
    } else {
        -1
    }
}

/// `[const +1, const −1, h_{−u}, …, h_u]`; this order is also the tie-break order.
pub fn hypothesis_family(tables: &Arc<BlockTables>, u: u32) -> Vec<ThresholdHypothesis> {
    let make = |rule| ThresholdHypothesis {
        tables: Arc::clone(tables),
        rule,
        u,
    };
    let mut family = vec![make(ThresholdRule::Constant(1)), make(ThresholdRule::Constant(-1))];
    family.extend((-(u as i32)..=u as i32).map(|tau| make(ThresholdRule::Threshold(tau))));
    family
}

/// `u = ⌈√(k·ln(2k²κ)) + √(κk)⌉`.
pub fn threshold_range(k: u32, kappa: f64) -> Result<u32> {
    if k == 0 || !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::invalid(format!("threshold range needs k ≥ 1 and κ ≥ 1, got k={k}, κ={kappa}")));
    }
    let k = k as f64;
    Ok(((k * (2.0 * k * k * kappa).ln()).sqrt() + (kappa * k).sqrt()).ceil() as u32)
}

/// `E_{τ∼U[−a,a]}[sign(y ≥ τ)] = clamp(y/a, −1, 1)`.
pub fn threshold_smoothing_value(y: i64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::invalid(format!("interval half-width {a} must be positive")));
    }
    Ok((y as f64 / a).clamp(-1.0, 1.0))
}

/// `(1/|S|) Σ y·h(X)`; zero on an empty sample.
pub fn empirical_advantage<H: Hypothesis + ?Sized>(h: &H, sample: &LabeledSample) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    let total: i64 = sample.points().iter().map(|(x, y)| (h.predict(x) * y) as i64).sum();
    total as f64 / sample.len() as f64
}

/// Index and empirical advantage of the first hypothesis with maximal empirical advantage.
pub fn select<H: Hypothesis>(family: &[H], validation: &LabeledSample) -> Result<(usize, f64)> {
    if family.is_empty() {
        return Err(Error::invalid("cannot select from an empty hypothesis family"));
    }
    if validation.is_empty() {
        return Err(Error::invalid("selection needs a nonempty validation set"));
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, h) in family.iter().enumerate() {
        let a = empirical_advantage(h, validation);
        if a > best.1 {
            best = (i, a);
        }
    }
    Ok(best)
}

/// `E_D[h·F]`.
pub fn advantage<H: Hypothesis + ?Sized, T: Hypothesis + ?Sized>(
    h: &H,
    target: &T,
    d: &SmoothDistribution,
    mode: Evaluation,
) -> Result<Estimate> {
    d.expectation(mode, |x| (h.predict(x) * target.predict(x)) as f64)
}

/// `E_D[F·G_S]`.
pub fn g_correlation<T: Hypothesis + ?Sized>(tables: &BlockTables, target: &T, d: &SmoothDistribution, mode: Evaluation) -> Result<Estimate> {
    d.expectation(mode, |x| target.predict(x) as f64 * tables.g_sum(x) as f64)
}

/// `Pr_D[|G_S(X)| > u]`.
pub fn g_tail(tables: &BlockTables, d: &SmoothDistribution, u: u32, mode: Evaluation) -> Result<Estimate> {
    d.expectation(mode, |x| (tables.g_sum(x).unsigned_abs() > u) as u8 as f64)
}

/// How [`weak_learn`] evaluates its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalMode {
    Exact,
    /// Fresh draws from the run seed on a stream separate from the training draws.
    MonteCarlo { samples: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLearnConfig {
    pub m: u64,
    /// Smoothness used for `u`; defaults to the distribution's certified `κ`.
    pub kappa: Option<f64>,
    pub u_override: Option<u32>,
    pub eval: EvalMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLearnDiagnostics {
    pub seed: u64,
    pub m: u64,
    pub kappa: f64,
    pub u: u32,
    pub rule: ThresholdRule,
    /// Selected `τ`, or `None` for a constant hypothesis.
    pub tau: Option<i32>,
    pub validation_advantage: f64,
    pub advantage: Estimate,
    pub g_correlation: Estimate,
    pub tail: Estimate,
    /// `E_D[f_i(X^{(i)})·g_i(X^{(i)})]` for each block.
    pub per_block_correlations: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct WeakLearnOutcome {
    pub hypothesis: ThresholdHypothesis,
    pub diagnostics: WeakLearnDiagnostics,
}

/// Draws `2m` points from `d`, trains on the first `m`, and picks the threshold
/// hypothesis with best advantage on the last `m`.
pub fn weak_learn(target: &LiftedFunction, d: &SmoothDistribution, config: &WeakLearnConfig, seed: u64) -> Result<WeakLearnOutcome> {
    let (n, k) = (target.block_bits(), target.block_count());
    if d.block_bits() != n || d.block_count() != k {
        return Err(Error::invalid("distribution shape does not match the target"));
    }
    let kappa = config.kappa.unwrap_or_else(|| d.kappa());
    let u = match config.u_override {
        Some(u) => u,
        None => threshold_range(k, kappa)?,
    };
    let mut rng = substream(seed, LEARN_TAG, 0);
    let mut sample = LabeledSample::draw(target, d, 2 * config.m, &mut rng)?;
    sample.seed = seed;
    let (train, validation) = sample.split_at(config.m as usize);
    let tables = Arc::new(train_tables(&train, n, k)?);
    let family = hypothesis_family(&tables, u);
    let (index, validation_advantage) = if validation.is_empty() {
        (0, 0.0)
    } else {
        select(&family, &validation)?
    };
    let hypothesis = family[index].clone();
    let mode = match config.eval {
        EvalMode::Exact => Evaluation::Exact,
        EvalMode::MonteCarlo { samples } => Evaluation::MonteCarlo { samples, seed },
    };
    let inner = target.inner();
    let stats = d.expectations(mode, 3 + k as usize, |x| {
        let f = target.predict(x) as f64;
        let g = tables.g_sum(x);
        let mut row = Vec::with_capacity(3 + k as usize);
        row.push(hypothesis.predict(x) as f64 * f);
        row.push(f * g as f64);
        row.push((g.unsigned_abs() > u) as u8 as f64);
        for (i, &b) in x.blocks().iter().enumerate() {
            row.push((inner[i].get(b) * tables.value(i, b)) as f64);
        }
        row
    })?;
    let tau = match hypothesis.rule {
        ThresholdRule::Threshold(t) => Some(t),
        ThresholdRule::Constant(_) => None,
    };
    let diagnostics = WeakLearnDiagnostics {
        seed,
        m: config.m,
        kappa,
        u,
        rule: hypothesis.rule,
        tau,
        validation_advantage,
        advantage: stats[0],
        g_correlation: stats[1],
        tail: stats[2],
        per_block_correlations: stats[3..].iter().map(|e| e.mean).collect(),
    };
    Ok(WeakLearnOutcome { hypothesis, diagnostics })
}

/// `⌈ln(2|H|/δ)/(2ε²)⌉`, the validation size for simultaneous `ε` accuracy
/// over a finite family with probability `1 − δ`.
pub fn uniform_convergence_sample_size(family_size: usize, epsilon: f64, delta: f64) -> Result<u64> {
    if family_size == 0 || !(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("uniform convergence needs |H| ≥ 1, ε > 0 and δ ∈ (0, 1)"));
    }
    Ok(((2.0 * family_size as f64 / delta).ln() / (2.0 * epsilon * epsilon)).ceil() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformConvergenceConfig {
    pub n: u32,
    pub k: u32,
    pub m_train: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformConvergenceReport {
    pub family_size: usize,
    pub sample_size: u64,
    pub trials: u64,
    /// Trials with `max_h |L_S(h) − L_D(h)| ≤ ε` for the 0-1 loss `L = (1 − advantage)/2`.
    pub envelope_holds: u64,
    /// Trials whose selected hypothesis has true loss within `2ε` of the best in the family.
    pub selection_holds: u64,
    /// Per-trial `max_h |L_S(h) − L_D(h)|`.
    pub max_deviation: Vec<f64>,
}

/// Repeatedly draws a validation set of the prescribed size for a fixed threshold
/// family over a random `MAJ_k` lift under uniform inputs, and compares empirical
/// with exact advantages.
pub fn uniform_convergence_experiment(config: &UniformConvergenceConfig) -> Result<UniformConvergenceReport> {
    let (n, k) = (config.n, config.k);
    let d = SmoothDistribution::uniform(n, k)?;
    let mut setup = substream(config.seed, CONVERGENCE_TAG, 0);
    let target = LiftedFunction::random(Outer::majority(k)?, n, &mut setup)?;
    let train = LabeledSample::draw(&target, &d, config.m_train, &mut setup)?;
    let tables = Arc::new(train_tables(&train, n, k)?);
    let family = hypothesis_family(&tables, threshold_range(k, 1.0)?);
    let truth = family
        .iter()
        .map(|h| advantage(h, &target, &d, Evaluation::Exact).map(|e| e.mean))
        .collect::<Result<Vec<f64>>>()?;
    let best_true = truth.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let size = uniform_convergence_sample_size(family.len(), config.epsilon, config.delta)?;
    use rayon::prelude::*;
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(config.seed, CONVERGENCE_TAG, trial + 1);
            let validation = LabeledSample::draw(&target, &d, size, &mut rng)?;
            let deviation = family
                .iter()
                .zip(&truth)
                .map(|(h, t)| (empirical_advantage(h, &validation) - t).abs() / 2.0)
                .fold(0.0, f64::max);
            let (chosen, _) = select(&family, &validation)?;
            Ok((deviation, truth[chosen] >= best_true - 4.0 * config.epsilon))
        })
        .collect::<Result<Vec<(f64, bool)>>>()?;
    Ok(UniformConvergenceReport {
        family_size: family.len(),
        sample_size: size,
        trials: config.trials,
        envelope_holds: outcomes.iter().filter(|(d, _)| *d <= config.epsilon).count() as u64,
        selection_holds: outcomes.iter().filter(|(_, s)| *s).count() as u64,
        max_deviation: outcomes.iter().map(|(d, _)| *d).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BooleanFunction;

    fn rng() -> crate::numeric::Stream {
        substream(17, 0, 0)
    }

    fn point(n: u32, blocks: Vec<u64>) -> BlockInput {
        BlockInput::new(n, blocks).unwrap()
    }

    #[test]
    fn empty_and_single_point_training() {
        let empty = LabeledSample::new(2, 3, vec![]).unwrap();
        let t = train_tables(&empty, 2, 3).unwrap();
        assert!((0..3).all(|i| t.table(i).iter().all(|&v| v == 0)));
        let x = point(2, vec![1, 2, 3]);
        let one = LabeledSample::new(2, 3, vec![(x.clone(), -1)]).unwrap();
        let t = train_tables(&one, 2, 3).unwrap();
        assert_eq!(t.g_sum(&x), -3);
        assert_eq!(t.written_blocks(&x), 3);
        assert!(train_tables(&one, 3, 3).is_err());
    }

    #[test]
    fn later_points_overwrite() {
        let a = point(2, vec![1, 0]);
        let b = point(2, vec![1, 3]);
        let s = LabeledSample::new(2, 2, vec![(a, 1), (b, -1)]).unwrap();
        let t = train_tables(&s, 2, 2).unwrap();
        assert_eq!(t.value(0, 1), -1);
        assert_eq!(t.value(1, 0), 1);
        assert_eq!(t.writes(), &[2, 2]);
        assert_eq!(t.written_entries(0), 1);
    }

    #[test]
    fn family_shape_and_thresholds() {
        let tables = Arc::new(BlockTables::empty(2, 3));
        let f0 = hypothesis_family(&tables, 0);
        assert_eq!(f0.len(), 3);
        assert_eq!(f0[2].rule, ThresholdRule::Threshold(0));
        let f2 = hypothesis_family(&tables, 2);
        assert_eq!(f2.len(), 7);
        let x = point(2, vec![0, 0, 0]);
        assert_eq!(f2[2].predict(&x), 1);
        assert_eq!(f2[6].predict(&x), -1);
        // a real threshold behaves like its ceiling on integer G
        for g in -4i32..=4 {
            for tau in [-1.5f64, -0.2, 0.7, 2.3] {
                let real = if g as f64 >= tau { 1 } else { -1 };
                assert_eq!(real, threshold_sign(g, tau.ceil() as i32));
            }
        }
    }

    #[test]
    fn threshold_range_values() {
        // k=21, κ=1: √(21·ln 882) + √21 = 11.93 + 4.58
        assert_eq!(threshold_range(21, 1.0).unwrap(), 17);
        assert_eq!(threshold_range(1, 1.0).unwrap(), 2);
        assert!(threshold_range(3, 0.5).is_err());
    }

    #[test]
    fn smoothing_values() {
        assert_eq!(threshold_smoothing_value(0, 3.0).unwrap(), 0.0);
        assert_eq!(threshold_smoothing_value(3, 3.0).unwrap(), 1.0);
        assert_eq!(threshold_smoothing_value(7, 3.0).unwrap(), 1.0);
        assert_eq!(threshold_smoothing_value(2, 4.0).unwrap(), 0.5);
        assert!(threshold_smoothing_value(1, 0.0).is_err());
        // against a fine Riemann sum over τ
        for y in -5i64..=5 {
            let a = 3.5;
            let steps = 70_000;
            let avg: f64 = (0..steps)
                .map(|j| {
                    let tau = -a + (j as f64 + 0.5) * 2.0 * a / steps as f64;
                    if y as f64 >= tau {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .sum::<f64>()
                / steps as f64;
            assert!((avg - threshold_smoothing_value(y, a).unwrap()).abs() < 1e-4);
        }
    }

    #[test]
    fn selection_prefers_first_maximum() {
        let mut r = rng();
        let target = LiftedFunction::random(Outer::majority(3).unwrap(), 2, &mut r).unwrap();
        let d = SmoothDistribution::uniform(2, 3).unwrap();
        let val = LabeledSample::draw(&target, &d, 50, &mut r).unwrap();
        assert_eq!(select(std::slice::from_ref(&target), &val).unwrap(), (0, 1.0));
        let tables = Arc::new(BlockTables::empty(2, 3));
        let family = hypothesis_family(&tables, 1);
        let balanced = LabeledSample::new(2, 3, vec![(point(2, vec![0, 0, 0]), 1), (point(2, vec![1, 1, 1]), -1)]).unwrap();
        assert_eq!(select(&family, &balanced).unwrap().0, 0);
        assert!(select(&family, &LabeledSample::new(2, 3, vec![]).unwrap()).is_err());
        let none: Vec<ThresholdHypothesis> = vec![];
        assert!(select(&none, &balanced).is_err());
    }

    #[test]
    fn advantage_examples_and_accuracy_bridge() {
        let mut r = rng();
        let target = LiftedFunction::random(Outer::majority(3).unwrap(), 2, &mut r).unwrap();
        let d = SmoothDistribution::uniform(2, 3).unwrap();
        assert_eq!(advantage(&target, &target, &d, Evaluation::Exact).unwrap().mean, 1.0);
        let plus = ThresholdHypothesis {
            tables: Arc::new(BlockTables::empty(2, 3)),
            rule: ThresholdRule::Constant(1),
            u: 0,
        };
        assert_eq!(advantage(&plus, &target, &d, Evaluation::Exact).unwrap().mean, 0.0);
        let other = LiftedFunction::random(Outer::majority(3).unwrap(), 2, &mut r).unwrap();
        let adv = advantage(&other, &target, &d, Evaluation::Exact).unwrap().mean;
        let acc = d
            .expectation(Evaluation::Exact, |x| (other.predict(x) == target.predict(x)) as u8 as f64)
            .unwrap()
            .mean;
        assert!((acc - (0.5 + adv / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn full_tables_give_sum_of_inner_correlations() {
        let mut r = rng();
        let (n, k) = (3u32, 5u32);
        let target = LiftedFunction::random(Outer::majority(k).unwrap(), n, &mut r).unwrap();
        let mut tables = BlockTables::empty(n, k);
        for (i, f) in target.inner().iter().enumerate() {
            for x in 0..1u64 << n {
                tables.tables[i][x as usize] = f.get(x);
            }
        }
        let d = SmoothDistribution::uniform(n, k).unwrap();
        let g = g_correlation(&tables, &target, &d, Evaluation::Exact).unwrap().mean;
        let sum: f64 = (0..k as usize)
            .map(|i| {
                d.expectation(Evaluation::Exact, |x| (target.predict(x) * target.inner()[i].get(x.block(i))) as f64)
                    .unwrap()
                    .mean
            })
            .sum();
        assert!((g - sum).abs() < 1e-12);
        // through the balanced inner functions, each term is E[MAJ_5(y)·y_i] = 6/16
        assert!((g - 5.0 * 0.375).abs() < 1e-12);
        assert_eq!(g_correlation(&BlockTables::empty(n, k), &target, &d, Evaluation::Exact).unwrap().mean, 0.0);
        assert_eq!(g_tail(&tables, &d, k, Evaluation::Exact).unwrap().mean, 0.0);
        assert_eq!(g_tail(&BlockTables::empty(n, k), &d, 0, Evaluation::Exact).unwrap().mean, 0.0);
    }

    #[test]
    fn expected_table_identity_by_enumeration() {
        // E_S[g_i(x)] = (1 − (1 − D_i(x))^m)·E_D[F | X^{(i)} = x]
        let mut r = rng();
        let (n, k) = (1u32, 3u32);
        let outer = Outer::Table(BooleanFunction::random(3, &mut r).unwrap());
        let target = LiftedFunction::random(outer, n, &mut r).unwrap();
        let raw: Vec<f64> = (0..8).map(|_| r.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let pmf: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let kappa = pmf.iter().copied().fold(0.0, f64::max) * 8.0;
        let d = SmoothDistribution::explicit(n, k, pmf.clone(), kappa).unwrap();
        let label = |index: u64| target.predict(&BlockInput::from_index(n, k, index).unwrap());
        for m in 1..=3u32 {
            let mut expected = vec![vec![0.0f64; 2]; k as usize];
            for outcome in 0..8u64.pow(m) {
                let draws: Vec<u64> = (0..m).map(|j| (outcome / 8u64.pow(j)) % 8).collect();
                let prob: f64 = draws.iter().map(|&x| pmf[x as usize]).product();
                let points = draws.iter().map(|&x| (BlockInput::from_index(n, k, x).unwrap(), label(x))).collect();
                let t = train_tables(&LabeledSample::new(n, k, points).unwrap(), n, k).unwrap();
                for (i, row) in expected.iter_mut().enumerate() {
                    for (x, cell) in row.iter_mut().enumerate() {
                        *cell += prob * t.value(i, x as u64) as f64;
                    }
                }
            }
            for i in 0..k as usize {
                let marginal = d.block_marginal(i).unwrap();
                for x in 0..2u64 {
                    let di = marginal[x as usize];
                    let joint: f64 = (0..8u64)
                        .filter(|&idx| (idx >> i) & 1 == x)
                        .map(|idx| pmf[idx as usize] * label(idx) as f64)
                        .sum();
                    let mu = if di > 0.0 { joint / di } else { 0.0 };
                    let q = 1.0 - (1.0 - di).powi(m as i32);
                    assert!((expected[i][x as usize] - q * mu).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn weak_learn_is_deterministic_and_handles_m_zero() {
        let mut r = rng();
        let target = LiftedFunction::random(Outer::majority(5).unwrap(), 3, &mut r).unwrap();
        let d = SmoothDistribution::uniform(3, 5).unwrap();
        let config = WeakLearnConfig {
            m: 16,
            kappa: None,
            u_override: None,
            eval: EvalMode::Exact,
        };
        let a = weak_learn(&target, &d, &config, 9).unwrap();
        let b = weak_learn(&target, &d, &config, 9).unwrap();
        assert_eq!(a.hypothesis, b.hypothesis);
        assert_eq!(a.diagnostics, b.diagnostics);
        // selected hypothesis beats both constants on validation
        assert!(a.diagnostics.validation_advantage >= 0.0);
        let zero = weak_learn(&target, &d, &WeakLearnConfig { m: 0, ..config }, 9).unwrap();
        assert_eq!(zero.hypothesis.rule, ThresholdRule::Constant(1));
        assert_eq!(zero.diagnostics.advantage.mean, 0.0);
    }

    #[test]
    fn sample_csv_round_trip() {
        let mut r = rng();
        let target = LiftedFunction::random(Outer::majority(3).unwrap(), 5, &mut r).unwrap();
        let d = SmoothDistribution::uniform(5, 3).unwrap();
        let s = LabeledSample::draw(&target, &d, 20, &mut r).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("x_hex,y\n"));
        let back = LabeledSample::read_csv(5, 3, buf.as_slice()).unwrap();
        assert_eq!(back.points(), s.points());
        assert!(back.labels_match(&target));
    }
}
