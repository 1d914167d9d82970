//! The lifted class `Lift_n(g) = { g(f_1, …, f_k) : f_i balanced on n bits }`.
//!
//! A lifted input `X` on `n·k` bits is split into `k` blocks; block `i` occupies
//! bits `[i·n, (i+1)·n)` of the flat index and feeds the inner function `f_i`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::junta::soft::channel_means;
use crate::numeric::{clopper_pearson, compensated_sum, mean_and_stderr, quantile_sorted, substream, NeumaierSum};
use crate::smoothdist::SmoothDistribution;
use crate::{BooleanFunction, CorrelationVector, DensityDistribution, Error, Result, MAX_ARITY};

/// Largest outer arity; outer inputs are packed into a `u64` mask.
pub const MAX_OUTER_ARITY: u32 = 64;
/// Largest `n·k` for which inputs are enumerated exhaustively.
pub const EXACT_DOMAIN_BITS: u32 = 20;

const CONCENTRATION_TAG: u64 = 0xc0;
const CONCENTRATION_INNER_TAG: u64 = 0xc1;
const COVERING_TAG: u64 = 0xc2;
const COVERING_INPUT_TAG: u64 = 0xc3;

/// Outer function of a lift. `Majority` is evaluated symbolically and allows
/// arities beyond the truth-table limit.
#[derive(Debug, Clone, PartialEq)]
pub enum Outer {
    Table(BooleanFunction),
    Majority { k: u32 },
}

impl Outer {
    pub fn majority(k: u32) -> Result<Self> {
        if k == 0 || k > MAX_OUTER_ARITY {
            return Err(Error::Arity {
                arity: k as usize,
                min: 1,
                max: MAX_OUTER_ARITY as usize,
            });
        }
        Ok(Outer::Majority { k })
    }

    pub fn arity(&self) -> u32 {
        match self {
            Outer::Table(g) => g.arity(),
            Outer::Majority { k } => *k,
        }
    }

    /// Value at the outer input whose bit `i` is set iff `y_i = +1`.
    #[inline]
    pub fn eval_mask(&self, y: u64) -> i8 {
        match self {
            Outer::Table(g) => g.get(y),
            Outer::Majority { k } => crate::boolfn::sign_int(2 * y.count_ones() as i64 - *k as i64),
        }
    }

    /// Truth table of the outer function.
    pub fn table(&self) -> Result<BooleanFunction> {
        match self {
            Outer::Table(g) => Ok(g.clone()),
            Outer::Majority { k } => BooleanFunction::majority(*k),
        }
    }

    /// True when the outer function is `MAJ_k` with `k` odd.
    pub fn is_odd_majority(&self) -> bool {
        match self {
            Outer::Majority { k } => k % 2 == 1,
            Outer::Table(g) => {
                g.arity() % 2 == 1 && BooleanFunction::majority(g.arity()).is_ok_and(|m| &m == g)
            }
        }
    }

    /// Semantic equality, so that `Majority { k }` equals the table of `MAJ_k`.
    pub fn same_function(&self, other: &Outer) -> bool {
        match (self, other) {
            (Outer::Majority { k: a }, Outer::Majority { k: b }) => a == b,
            (Outer::Table(a), Outer::Table(b)) => a == b,
            (Outer::Table(t), Outer::Majority { k }) | (Outer::Majority { k }, Outer::Table(t)) => {
                t.arity() == *k && BooleanFunction::majority(*k).is_ok_and(|m| &m == t)
            }
        }
    }
}

/// An input to a lifted function: `k` blocks of `n` bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockInput {
    n: u32,
    blocks: Vec<u64>,
}

impl BlockInput {
    pub fn new(n: u32, blocks: Vec<u64>) -> Result<Self> {
        check_block_arity(n)?;
        if let Some(&b) = blocks.iter().find(|&&b| b >> n != 0) {
            return Err(Error::IndexOutOfRange { index: b, bits: n });
        }
        Ok(BlockInput { n, blocks })
    }

    /// Splits a flat index of `n·k ≤ 64` bits into blocks.
    pub fn from_index(n: u32, k: u32, index: u64) -> Result<Self> {
        check_block_arity(n)?;
        let bits = n * k;
        if bits > 64 || (bits < 64 && index >> bits != 0) {
            return Err(Error::IndexOutOfRange { index, bits });
        }
        let mask = (1u64 << n) - 1;
        Ok(BlockInput {
            n,
            blocks: (0..k).map(|i| (index >> (i * n)) & mask).collect(),
        })
    }

    /// Flat index; requires `n·k ≤ 64`.
    pub fn to_index(&self) -> Result<u64> {
        if self.domain_bits() > 64 {
            return Err(Error::invalid(format!(
                "{}-bit input does not fit a 64-bit index",
                self.domain_bits()
            )));
        }
        Ok(self
            .blocks
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (b << (i as u32 * self.n))))
    }

    pub fn random<R: Rng + ?Sized>(n: u32, k: u32, rng: &mut R) -> Result<Self> {
        check_block_arity(n)?;
        let size = 1u64 << n;
        Ok(BlockInput {
            n,
            blocks: (0..k).map(|_| rng.gen_range(0..size)).collect(),
        })
    }

    pub fn block_bits(&self) -> u32 {
        self.n
    }

    pub fn block_count(&self) -> u32 {
        self.blocks.len() as u32
    }

    pub fn domain_bits(&self) -> u32 {
        self.n * self.block_count()
    }

    pub fn block(&self, i: usize) -> u64 {
        self.blocks[i]
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    fn flat_bit(&self, j: u32) -> u64 {
        (self.blocks[(j / self.n) as usize] >> (j % self.n)) & 1
    }

    /// Lowercase hex of the flat `n·k`-bit string, most significant digit first,
    /// `max(1, ⌈n·k/4⌉)` digits.
    pub fn to_hex(&self) -> String {
        let bits = self.domain_bits();
        let digits = bits.div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (0..4)
                    .map(|b| d * 4 + b)
                    .filter(|&j| j < bits)
                    .fold(0u32, |acc, j| acc | ((self.flat_bit(j) as u32) << (j - d * 4)));
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(n: u32, k: u32, hex: &str) -> Result<Self> {
        check_block_arity(n)?;
        let bits = n * k;
        let digits = bits.div_ceil(4).max(1) as usize;
        if hex.len() != digits {
            return Err(Error::Parse(format!(
                "expected {digits} hex digits for a {bits}-bit input, got {}",
                hex.len()
            )));
        }
        let mut blocks = vec![0u64; k as usize];
        for (pos, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {ch:?}")))?;
            let d = (digits - 1 - pos) as u32;
            for b in 0..4 {
                if (nibble >> b) & 1 == 1 {
                    let j = d * 4 + b;
                    if j >= bits {
                        return Err(Error::Parse(format!("hex value sets bits beyond {bits}")));
                    }
                    blocks[(j / n) as usize] |= 1 << (j % n);
                }
            }
        }
        Ok(BlockInput { n, blocks })
    }
}

fn check_block_arity(n: u32) -> Result<()> {
    if n == 0 || n > MAX_ARITY {
        return Err(Error::Arity {
            arity: n as usize,
            min: 1,
            max: MAX_ARITY as usize,
        });
    }
    Ok(())
}

/// Anything that labels block inputs with ±1.
pub trait Hypothesis: Sync {
    fn predict(&self, x: &BlockInput) -> i8;
}

/// A member `g(f_1, …, f_k)` of the lifted class.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedFunction {
    outer: Outer,
    inner: Vec<BooleanFunction>,
}

impl LiftedFunction {
    /// Validated composition; every inner function must be balanced.
    pub fn new(outer: Outer, inner: Vec<BooleanFunction>) -> Result<Self> {
        let k = outer.arity();
        if inner.len() != k as usize {
            return Err(Error::ArityMismatch {
                left: k as usize,
                right: inner.len(),
            });
        }
        let n = inner.first().map_or(0, BooleanFunction::arity);
        check_block_arity(n)?;
        for (index, f) in inner.iter().enumerate() {
            if f.arity() != n {
                return Err(Error::ArityMismatch {
                    left: n as usize,
                    right: f.arity() as usize,
                });
            }
            if !f.is_balanced() {
                return Err(Error::Unbalanced {
                    index,
                    weight: f.weight(),
                    size: f.len(),
                });
            }
        }
        Ok(LiftedFunction { outer, inner })
    }

    /// Uniformly random member of `Lift_n(outer)`.
    pub fn random<R: Rng + ?Sized>(outer: Outer, n: u32, rng: &mut R) -> Result<Self> {
        let inner = (0..outer.arity())
            .map(|_| BooleanFunction::random_balanced(n, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(outer, inner)
    }

    pub fn outer(&self) -> &Outer {
        &self.outer
    }

    pub fn inner(&self) -> &[BooleanFunction] {
        &self.inner
    }

    pub fn block_bits(&self) -> u32 {
        self.inner[0].arity()
    }

    pub fn block_count(&self) -> u32 {
        self.inner.len() as u32
    }

    pub fn domain_bits(&self) -> u32 {
        self.block_bits() * self.block_count()
    }

    /// Lift with every inner function negated.
    pub fn negate_inner(&self) -> Self {
        LiftedFunction {
            outer: self.outer.clone(),
            inner: self.inner.iter().map(BooleanFunction::negate).collect(),
        }
    }

    fn check_input(&self, x: &BlockInput) -> Result<()> {
        if x.block_bits() != self.block_bits() || x.block_count() != self.block_count() {
            return Err(Error::invalid(format!(
                "input has {} blocks of {} bits, lift expects {} blocks of {} bits",
                x.block_count(),
                x.block_bits(),
                self.block_count(),
                self.block_bits()
            )));
        }
        Ok(())
    }

    /// Outer input mask `(f_1(X^{(1)}), …, f_k(X^{(k)}))`, bit `i` set for `+1`.
    #[inline]
    pub fn inner_values(&self, x: &BlockInput) -> u64 {
        self.inner
            .iter()
            .zip(x.blocks())
            .enumerate()
            .fold(0u64, |acc, (i, (f, &b))| acc | ((f.is_plus(b) as u64) << i))
    }

    pub fn evaluate(&self, x: &BlockInput) -> Result<i8> {
        self.check_input(x)?;
        Ok(self.outer.eval_mask(self.inner_values(x)))
    }

    fn check_shape(&self, other: &LiftedFunction) -> Result<()> {
        if self.block_bits() != other.block_bits() || self.block_count() != other.block_count() {
            return Err(Error::invalid(format!(
                "lift shapes differ: n={}, k={} vs n={}, k={}",
                self.block_bits(),
                self.block_count(),
                other.block_bits(),
                other.block_count()
            )));
        }
        Ok(())
    }
}

impl Hypothesis for LiftedFunction {
    fn predict(&self, x: &BlockInput) -> i8 {
        self.outer.eval_mask(self.inner_values(x))
    }
}

/// `α_i = E_x[f_i(x) f_i′(x)]` for each block.
pub fn inner_correlations(f: &LiftedFunction, other: &LiftedFunction) -> Result<CorrelationVector> {
    f.check_shape(other)?;
    let alpha = f
        .inner()
        .iter()
        .zip(other.inner())
        .map(|(a, b)| a.correlation(b))
        .collect::<Result<Vec<_>>>()?;
    CorrelationVector::new(alpha)
}

/// Joint cell counts `(n₊₊, n₊₋, n₋₊, n₋₋)` of `(f(x), f′(x))` over all inputs.
pub fn joint_cell_counts(f: &BooleanFunction, other: &BooleanFunction) -> Result<[u64; 4]> {
    if f.arity() != other.arity() {
        return Err(Error::ArityMismatch {
            left: f.arity() as usize,
            right: other.arity() as usize,
        });
    }
    let (mut pp, mut pm, mut mp) = (0u64, 0u64, 0u64);
    for (&a, &b) in f.words().iter().zip(other.words()) {
        pp += (a & b).count_ones() as u64;
        pm += (a & !b).count_ones() as u64;
        mp += (!a & b).count_ones() as u64;
    }
    // padding bits are zero in both tables
    let mm = f.len() - pp - pm - mp;
    Ok([pp, pm, mp, mm])
}

/// `dist(F, F′)` for two lifts with the same outer function, computed from the
/// per-block joint cell counts without enumerating the `2^{n·k}` inputs.
///
/// Blocks are independent under the uniform distribution, so the pairs
/// `(f_i(X^{(i)}), f_i′(X^{(i)}))` are independent with laws given by the counts.
/// Table outers apply the conditional kernel over `2^k` outer inputs; majority
/// outers use a dynamic programme over the pair of vote counts.
pub fn exact_lift_distance(f: &LiftedFunction, other: &LiftedFunction) -> Result<f64> {
    f.check_shape(other)?;
    if !f.outer().same_function(other.outer()) {
        return Err(Error::invalid("exact lift distance needs equal outer functions"));
    }
    let size = f.inner()[0].len() as f64;
    let cells = f
        .inner()
        .iter()
        .zip(other.inner())
        .map(|(a, b)| joint_cell_counts(a, b).map(|c| c.map(|v| v as f64 / size)))
        .collect::<Result<Vec<[f64; 4]>>>()?;
    match f.outer() {
        Outer::Majority { k } => Ok(majority_pair_disagreement(*k, &cells)),
        Outer::Table(g) => {
            if g.arity() > MAX_ARITY {
                return Err(Error::Arity {
                    arity: g.arity() as usize,
                    min: 1,
                    max: MAX_ARITY as usize,
                });
            }
            if cells.iter().all(|c| (c[0] + c[1] - 0.5).abs() < 1e-15) {
                // balanced marginals: the pair law is the α-correlated channel
                let alpha: Vec<f64> = cells.iter().map(|c| c[0] + c[3] - c[1] - c[2]).collect();
                let means = channel_means(g, &alpha);
                let agree = compensated_sum(means.iter().enumerate().map(|(y, m)| g.get(y as u64) as f64 * m));
                return Ok((1.0 - agree / means.len() as f64) / 2.0);
            }
            Err(Error::Consistency("inner functions lost balance".into()))
        }
    }
}

/// `Pr[MAJ_k(y) ≠ MAJ_k(y′)]` for independent blocks with joint laws `cells`.
fn majority_pair_disagreement(k: u32, cells: &[[f64; 4]]) -> f64 {
    let k = k as usize;
    let width = k + 1;
    let mut dp = vec![0.0f64; width * width];
    dp[0] = 1.0;
    for (step, c) in cells.iter().enumerate() {
        let mut next = vec![0.0f64; width * width];
        for s in 0..=step {
            for t in 0..=step {
                let p = dp[s * width + t];
                if p == 0.0 {
                    continue;
                }
                next[(s + 1) * width + t + 1] += p * c[0];
                next[(s + 1) * width + t] += p * c[1];
                next[s * width + t + 1] += p * c[2];
                next[s * width + t] += p * c[3];
            }
        }
        dp = next;
    }
    let vote = |s: usize| crate::boolfn::sign_int(2 * s as i64 - k as i64);
    let mut acc = NeumaierSum::new();
    for s in 0..=k {
        for t in 0..=k {
            if vote(s) != vote(t) {
                acc.add(dp[s * width + t]);
            }
        }
    }
    acc.value()
}

/// Pushforward of `h` through `(f_1, …, f_k)` as a pmf on `{±1}^k`.
///
/// The result is declared with density `1/κ(h)` and the density claim is
/// checked against the computed pmf.
pub fn induced_distribution(h: &SmoothDistribution, inner: &[BooleanFunction]) -> Result<DensityDistribution> {
    let n = h.block_bits();
    let k = h.block_count();
    if inner.len() != k as usize {
        return Err(Error::ArityMismatch {
            left: k as usize,
            right: inner.len(),
        });
    }
    if let Some((index, f)) = inner.iter().enumerate().find(|(_, f)| f.arity() != n || !f.is_balanced()) {
        return Err(Error::Unbalanced {
            index,
            weight: f.weight(),
            size: f.len(),
        });
    }
    if k > MAX_ARITY {
        return Err(Error::Arity {
            arity: k as usize,
            min: 1,
            max: MAX_ARITY as usize,
        });
    }
    let pmf = h.exact_pmf()?;
    let mut buckets = vec![NeumaierSum::new(); 1 << k];
    let mask = (1u64 << n) - 1;
    for (index, &p) in pmf.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let y = inner.iter().enumerate().fold(0u64, |acc, (i, f)| {
            acc | ((f.is_plus((index as u64 >> (i as u32 * n)) & mask) as u64) << i)
        });
        buckets[y as usize].add(p);
    }
    let out: Vec<f64> = buckets.iter().map(NeumaierSum::value).collect();
    let density = 1.0 / h.kappa();
    let dist = DensityDistribution::new(k, out, density)
        .map_err(|e| Error::Consistency(format!("induced distribution violates density {density}: {e}")))?;
    Ok(dist)
}

/// Settings for [`concentration_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationConfig {
    pub n: u32,
    pub k: u32,
    pub trials: u64,
    pub seed: u64,
    /// Use one fixed `f_i` for every trial instead of a fresh one per trial.
    pub fix_inner: bool,
    /// Thresholds `t` for the empirical tail `Pr[Σα_i² ≥ t]`.
    pub tail_grid: Vec<f64>,
}

/// One trial: `Σ α_i²` for the balanced draw and the coupling diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationTrial {
    pub trial: u64,
    pub sum_sq: f64,
    /// `Σ_i E[f_i·u_i]²` for the unbalanced first-stage tables `u_i`.
    pub unbalanced_sum_sq: f64,
    pub flipped: u64,
    /// `Σ_i |Σ_x u_i(x)|/2`.
    pub flip_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub config: ConcentrationConfig,
    pub trials: Vec<ConcentrationTrial>,
    pub mean: f64,
    pub stderr: f64,
    /// `k/(2^n − 1)`, the exact mean of `Σ α_i²`.
    pub expected_mean: f64,
    pub quantiles: Vec<(f64, f64)>,
    pub tail: Vec<(f64, f64)>,
    pub flip_bound_violations: u64,
}

/// Draws `Σ_i α_i²` with `α_i = E[f_i f_i′]`, `f_i′` from the two-stage balanced sampler.
pub fn concentration_experiment(config: &ConcentrationConfig) -> Result<ConcentrationReport> {
    let (n, k) = (config.n, config.k);
    check_block_arity(n)?;
    let fixed = if config.fix_inner {
        let mut rng = substream(config.seed, CONCENTRATION_INNER_TAG, 0);
        Some(
            (0..k)
                .map(|_| BooleanFunction::random_balanced(n, &mut rng))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let rows = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(config.seed, CONCENTRATION_TAG, trial);
            let mut row = ConcentrationTrial {
                trial,
                sum_sq: 0.0,
                unbalanced_sum_sq: 0.0,
                flipped: 0,
                flip_bound: 0,
            };
            for i in 0..k as usize {
                let f = match &fixed {
                    Some(inner) => inner[i].clone(),
                    None => BooleanFunction::random_balanced(n, &mut rng)?,
                };
                let draw = BooleanFunction::random_balanced_two_stage(n, &mut rng)?;
                let alpha = f.correlation(&draw.balanced)?;
                let beta = f.correlation(&draw.unbalanced)?;
                row.sum_sq += alpha * alpha;
                row.unbalanced_sum_sq += beta * beta;
                row.flipped += draw.flipped;
                let ell = 2 * draw.unbalanced.weight() as i64 - draw.unbalanced.len() as i64;
                row.flip_bound += ell.unsigned_abs() / 2;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = rows.iter().map(|r| r.sum_sq).collect();
    let (mean, stderr) = mean_and_stderr(&values);
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let quantiles = [0.5, 0.9, 0.99, 0.999]
        .iter()
        .filter_map(|&q| quantile_sorted(&sorted, q).map(|v| (q, v)))
        .collect();
    let tail = config
        .tail_grid
        .iter()
        .map(|&t| {
            let hits = values.iter().filter(|&&v| v >= t).count();
            (t, if values.is_empty() { 0.0 } else { hits as f64 / values.len() as f64 })
        })
        .collect();
    let flip_bound_violations = rows.iter().filter(|r| r.flipped > r.flip_bound).count() as u64;
    Ok(ConcentrationReport {
        config: config.clone(),
        trials: rows,
        mean,
        stderr,
        expected_mean: k as f64 / ((1u64 << n) - 1) as f64,
        quantiles,
        tail,
        flip_bound_violations,
    })
}

/// How [`covering_statistic`] measures `dist(h, F)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceMode {
    /// Exhaustive when `n·k ≤ 20`, otherwise Monte Carlo.
    Auto,
    MonteCarlo { inputs: u64 },
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringConfig {
    pub n: u32,
    pub trials: u64,
    pub seed: u64,
    pub radius: f64,
    pub mode: DistanceMode,
    pub mc_inputs: u64,
    pub confidence: f64,
}

impl CoveringConfig {
    pub fn new(n: u32, trials: u64, seed: u64) -> Self {
        CoveringConfig {
            n,
            trials,
            seed,
            radius: 0.01,
            mode: DistanceMode::Auto,
            mc_inputs: 10_000,
            confidence: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub trials: u64,
    pub hits: u64,
    /// `None` when no trials were run.
    pub fraction: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub distances: Vec<f64>,
    pub exhaustive: bool,
}

/// `dist(h, F)` for a lift member, by enumeration or by `inputs` uniform samples.
pub fn hypothesis_distance<H: Hypothesis + ?Sized, R: Rng + ?Sized>(
    h: &H,
    f: &LiftedFunction,
    mode: DistanceMode,
    rng: &mut R,
) -> Result<f64> {
    let (n, k) = (f.block_bits(), f.block_count());
    let exhaustive = match mode {
        DistanceMode::Exhaustive => true,
        DistanceMode::Auto => n * k <= EXACT_DOMAIN_BITS,
        DistanceMode::MonteCarlo { .. } => false,
    };
    if exhaustive {
        if n * k > EXACT_DOMAIN_BITS {
            return Err(Error::invalid(format!("cannot enumerate {}-bit inputs", n * k)));
        }
        let mut disagree = 0u64;
        for index in 0..1u64 << (n * k) {
            let x = BlockInput::from_index(n, k, index)?;
            disagree += (h.predict(&x) != f.predict(&x)) as u64;
        }
        return Ok(disagree as f64 / (1u64 << (n * k)) as f64);
    }
    let inputs = match mode {
        DistanceMode::MonteCarlo { inputs } => inputs,
        _ => 10_000,
    };
    if inputs == 0 {
        return Err(Error::invalid("Monte Carlo distance needs at least one input"));
    }
    let mut disagree = 0u64;
    for _ in 0..inputs {
        let x = BlockInput::random(n, k, rng)?;
        disagree += (h.predict(&x) != f.predict(&x)) as u64;
    }
    Ok(disagree as f64 / inputs as f64)
}

/// Fraction of uniformly random members of `Lift_n(outer)` within `radius` of `h`,
/// with a Clopper–Pearson interval.
pub fn covering_statistic<H: Hypothesis + ?Sized>(outer: &Outer, h: &H, config: &CoveringConfig) -> Result<CoveringReport> {
    let k = outer.arity();
    let mode = match config.mode {
        DistanceMode::Auto if config.n * k <= EXACT_DOMAIN_BITS => DistanceMode::Exhaustive,
        DistanceMode::Auto => DistanceMode::MonteCarlo {
            inputs: config.mc_inputs,
        },
        m => m,
    };
    let distances = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(config.seed, COVERING_TAG, trial);
            let f = LiftedFunction::random(outer.clone(), config.n, &mut rng)?;
            let mut inputs = substream(config.seed, COVERING_INPUT_TAG, trial);
            hypothesis_distance(h, &f, mode, &mut inputs)
        })
        .collect::<Result<Vec<f64>>>()?;
    let hits = distances.iter().filter(|&&d| d <= config.radius).count() as u64;
    let (lower, upper) = clopper_pearson(hits, config.trials, config.confidence);
    Ok(CoveringReport {
        trials: config.trials,
        hits,
        fraction: (config.trials > 0).then(|| hits as f64 / config.trials as f64),
        lower,
        upper,
        distances,
        exhaustive: mode == DistanceMode::Exhaustive,
    })
}
