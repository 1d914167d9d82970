//! α-correlated noise quantities and soft junta bounds.
//!
//! Under correlation vector `α`, `x` is uniform on `{±1}^k` and each `y_i`
//! independently equals `x_i` with probability `(1 + α_i)/2`, otherwise `−x_i`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{best_junta_on, junta_complexity, CorrelationVector, JUNTA_SEARCH_MAX_ARITY};
use crate::numeric::{compensated_sum, substream, NeumaierSum};
use crate::{BooleanFunction, Error, FourierSpectrum, Result};

/// Agreement tolerance between the direct and spectral correlated variance.
pub const VARIANCE_IDENTITY_TOLERANCE: f64 = 1e-9;
/// Largest arity for the exact rounding expectation over `z ∈ {0,1}^k`.
pub const ROUNDING_MAX_ARITY: u32 = 12;

const SOFT_SEARCH_TAG: u64 = 0x50f7;
const BISECTION_STEPS: u32 = 40;

fn check_alpha(k: u32, alpha: &CorrelationVector) -> Result<()> {
    if alpha.arity() != k as usize {
        return Err(Error::ArityMismatch {
            left: k as usize,
            right: alpha.arity(),
        });
    }
    Ok(())
}

/// `E_{y|x}[g(y)] = Σ_S ĝ(S) ∏_{i∈S} x_i α_i` at a single input, from the spectrum.
pub fn conditional_mean(spectrum: &FourierSpectrum, alpha: &CorrelationVector, x: u64) -> Result<f64> {
    let k = spectrum.arity();
    check_alpha(k, alpha)?;
    if x >= 1u64 << k {
        return Err(Error::IndexOutOfRange { index: x, bits: k });
    }
    // weight[S] = ∏_{i∈S} x_i α_i, built from the subset without its lowest element
    let a = alpha.as_slice();
    let size = 1usize << k;
    let mut weight = vec![1.0f64; size];
    let mut acc = NeumaierSum::new();
    acc.add(spectrum.coefficient(0));
    for s in 1..size {
        let i = s.trailing_zeros();
        let xi = if (x >> i) & 1 == 1 { 1.0 } else { -1.0 };
        weight[s] = weight[s & (s - 1)] * xi * a[i as usize];
        acc.add(spectrum.coefficient(s as u64) * weight[s]);
    }
    Ok(acc.value())
}

/// `E_{y|x}[g(y)]` at every `x`, by applying the one-coordinate channel in turn.
pub fn conditional_means(g: &BooleanFunction, alpha: &CorrelationVector) -> Result<Vec<f64>> {
    check_alpha(g.arity(), alpha)?;
    Ok(channel_means(g, alpha.as_slice()))
}

pub(crate) fn channel_means(g: &BooleanFunction, alpha: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = (0..g.len()).map(|x| g.get(x) as f64).collect();
    for (i, &a) in alpha.iter().enumerate() {
        let (keep, flip) = ((1.0 + a) / 2.0, (1.0 - a) / 2.0);
        let bit = 1usize << i;
        for x in 0..v.len() {
            if x & bit == 0 {
                let (u, w) = (v[x], v[x | bit]);
                v[x] = keep * u + flip * w;
                v[x | bit] = keep * w + flip * u;
            }
        }
    }
    v
}

fn error_from_means(means: &[f64]) -> f64 {
    compensated_sum(means.iter().map(|m| (1.0 - m.abs()) / 2.0)) / means.len() as f64
}

/// `dist_α(g, h) = Pr[g(y) ≠ h(x)]`.
pub fn alpha_correlated_distance(g: &BooleanFunction, h: &BooleanFunction, alpha: &CorrelationVector) -> Result<f64> {
    if g.arity() != h.arity() {
        return Err(Error::ArityMismatch {
            left: g.arity() as usize,
            right: h.arity() as usize,
        });
    }
    let means = conditional_means(g, alpha)?;
    Ok(compensated_sum(
        means
            .iter()
            .enumerate()
            .map(|(x, m)| (1.0 - h.get(x as u64) as f64 * m) / 2.0),
    ) / means.len() as f64)
}

/// `error_α(g) = min_h dist_α(g, h) = E_x[(1 − |E_{y|x} g(y)|)/2]`.
pub fn alpha_correlated_error(g: &BooleanFunction, alpha: &CorrelationVector) -> Result<f64> {
    Ok(error_from_means(&conditional_means(g, alpha)?))
}

/// Both evaluations of the α-correlated variance `E_x[Var_{y|x} g(y)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedVariance {
    /// `E_x[1 − E_{y|x}[g(y)]²]`
    pub direct: f64,
    /// `1 − Σ_S ĝ(S)² ∏_{i∈S} α_i²`
    pub spectral: f64,
}

impl CorrelatedVariance {
    pub fn value(&self) -> f64 {
        self.direct
    }
}

pub fn alpha_correlated_variance(g: &BooleanFunction, alpha: &CorrelationVector) -> Result<CorrelatedVariance> {
    let means = conditional_means(g, alpha)?;
    let direct = compensated_sum(means.iter().map(|m| 1.0 - m * m)) / means.len() as f64;
    let spectrum = g.fourier();
    let a = alpha.as_slice();
    let size = means.len();
    let mut damp = vec![1.0f64; size];
    let mut acc = NeumaierSum::new();
    let c0 = spectrum.coefficient(0);
    acc.add(c0 * c0);
    for s in 1..size {
        let i = s.trailing_zeros() as usize;
        damp[s] = damp[s & (s - 1)] * a[i] * a[i];
        let c = spectrum.coefficient(s as u64);
        acc.add(c * c * damp[s]);
    }
    let spectral = 1.0 - acc.value();
    if (direct - spectral).abs() > VARIANCE_IDENTITY_TOLERANCE {
        return Err(Error::Consistency(format!(
            "correlated variance disagrees: direct {direct}, spectral {spectral}"
        )));
    }
    Ok(CorrelatedVariance { direct, spectral })
}

fn check_rounding_arity(k: u32) -> Result<()> {
    if k > ROUNDING_MAX_ARITY {
        return Err(Error::Arity {
            arity: k as usize,
            min: 0,
            max: ROUNDING_MAX_ARITY as usize,
        });
    }
    Ok(())
}

/// Error of `g` under a 0/1 correlation vector, i.e. the best junta on `mask`.
fn indicator_error(g: &BooleanFunction, mask: u64) -> Result<f64> {
    Ok(best_junta_on(g, mask, None)?.achieved_distance)
}

/// Probability of `z` when each `z_i ~ Ber(α_i²)` independently.
fn rounding_weight(alpha: &[f64], z: u64) -> f64 {
    alpha
        .iter()
        .enumerate()
        .map(|(i, a)| if (z >> i) & 1 == 1 { a * a } else { 1.0 - a * a })
        .product()
}

/// `E_z[error_z(g)]` for `z_i ~ Ber(α_i²)`, by exact enumeration of `z ∈ {0,1}^k`.
pub fn rounding_expected_error(g: &BooleanFunction, alpha: &CorrelationVector) -> Result<f64> {
    let k = g.arity();
    check_alpha(k, alpha)?;
    check_rounding_arity(k)?;
    let a = alpha.as_slice();
    let terms = (0..1u64 << k)
        .into_par_iter()
        .map(|z| {
            let w = rounding_weight(a, z);
            if w == 0.0 {
                Ok(0.0)
            } else {
                Ok(w * indicator_error(g, z)?)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(terms))
}

/// A 0/1 vector extracted from a soft junta by conditioning the rounding on `‖z‖₁ ≤ 2‖α‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundingCertificate {
    pub z: u64,
    pub size: u32,
    pub error: f64,
}

/// Among `z` with `‖z‖₁ ≤ 2·Σα_i²`, returns the one with smallest `error_z(g)`
/// (ties to smaller size, then smaller mask), provided that error is at most `4δ`.
pub fn derandomized_rounding(g: &BooleanFunction, alpha: &CorrelationVector, delta: f64) -> Result<Option<RoundingCertificate>> {
    let k = g.arity();
    check_alpha(k, alpha)?;
    check_rounding_arity(k)?;
    let budget = 2.0 * alpha.squared_norm();
    let mut best: Option<RoundingCertificate> = None;
    for z in 0..1u64 << k {
        let size = z.count_ones();
        if size as f64 > budget {
            continue;
        }
        let error = indicator_error(g, z)?;
        let better = match &best {
            None => true,
            Some(b) => (error, size) < (b.error, b.size),
        };
        if better {
            best = Some(RoundingCertificate { z, size, error });
        }
    }
    Ok(best.filter(|c| c.error <= 4.0 * delta))
}

/// Search settings for [`soft_junta_upper`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftJuntaSearch {
    /// Grid resolution `G` for `α_i² ∈ {0, 1/G, …, 1}`.
    pub grid: u32,
    /// Random multi-starts on top of the deterministic starts.
    pub restarts: u32,
    pub seed: u64,
    /// Number of best descents that get pairwise refinement.
    pub refine_top: u32,
    pub max_refine_sweeps: u32,
}

impl Default for SoftJuntaSearch {
    fn default() -> Self {
        SoftJuntaSearch {
            grid: 32,
            restarts: 16,
            seed: 0,
            refine_top: 3,
            max_refine_sweeps: 25,
        }
    }
}

/// A feasible correlation vector and its cost `Σ α_i²`, an upper bound on `J̃(g, δ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftJuntaBound {
    pub value: f64,
    pub alpha: CorrelationVector,
    pub error: f64,
}

/// Feasibility oracle over `β = α²`. The error is non-increasing in every `β_i`.
struct SoftProblem<'a> {
    g: &'a BooleanFunction,
    delta: f64,
}

impl SoftProblem<'_> {
    fn error(&self, beta: &[f64]) -> f64 {
        let alpha: Vec<f64> = beta.iter().map(|b| b.sqrt()).collect();
        error_from_means(&channel_means(self.g, &alpha))
    }

    fn feasible(&self, beta: &[f64]) -> bool {
        self.error(beta) <= self.delta
    }

    /// Smallest feasible `β_i ∈ [lo, hi]`, assuming feasibility at `hi`; `None` if
    /// infeasible at `hi`.
    fn lowest_coordinate(&self, beta: &mut [f64], i: usize, lo: f64, hi: f64) -> Option<f64> {
        let saved = beta[i];
        beta[i] = hi;
        if !self.feasible(beta) {
            beta[i] = saved;
            return None;
        }
        beta[i] = lo;
        if self.feasible(beta) {
            beta[i] = saved;
            return Some(lo);
        }
        let (mut bad, mut good) = (lo, hi);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (bad + good);
            beta[i] = mid;
            if self.feasible(beta) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        beta[i] = saved;
        Some(good)
    }

    /// Moves an infeasible point towards all-ones until it becomes feasible.
    fn raise_to_feasible(&self, beta: &mut [f64]) {
        if self.feasible(beta) {
            return;
        }
        let base = beta.to_vec();
        let at = |lambda: f64| -> Vec<f64> { base.iter().map(|b| b + lambda * (1.0 - b)).collect() };
        let (mut bad, mut good) = (0.0, 1.0);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (bad + good);
            if self.feasible(&at(mid)) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        beta.copy_from_slice(&at(good));
    }

    fn grid_descent(&self, beta: &mut [f64], order: &[usize], grid: u32) {
        loop {
            let mut changed = false;
            for &i in order {
                // grid values strictly below the current one, searched by bisection on the index
                let below = ((beta[i] * grid as f64).ceil() as u32).min(grid);
                let below = if below as f64 / grid as f64 >= beta[i] { below.saturating_sub(1) } else { below };
                if beta[i] == 0.0 {
                    continue;
                }
                let saved = beta[i];
                let probe = |beta: &mut [f64], j: u32| {
                    beta[i] = j as f64 / grid as f64;
                    let ok = self.feasible(beta);
                    beta[i] = saved;
                    ok
                };
                if !probe(beta, below) {
                    continue;
                }
                let (mut lo, mut hi) = (0u32, below);
                if probe(beta, 0) {
                    hi = 0;
                } else {
                    while hi - lo > 1 {
                        let mid = (lo + hi) / 2;
                        if probe(beta, mid) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                }
                beta[i] = hi as f64 / grid as f64;
                changed = true;
            }
            if !changed {
                return;
            }
        }
    }

    fn coordinate_refine(&self, beta: &mut [f64]) {
        for i in 0..beta.len() {
            if let Some(v) = self.lowest_coordinate(beta, i, 0.0, beta[i]) {
                beta[i] = v;
            }
        }
    }

    /// Best `β_i + β_j` along the feasibility boundary with the other coordinates fixed.
    fn pair_move(&self, beta: &mut [f64], i: usize, j: usize) -> bool {
        let current = beta[i] + beta[j];
        let saved_j = beta[j];
        let phi = |beta: &mut [f64], t: f64| -> Option<(f64, f64)> {
            beta[j] = t;
            let r = self.lowest_coordinate(beta, i, 0.0, 1.0).map(|bi| (t + bi, bi));
            beta[j] = saved_j;
            r
        };
        const SCAN: usize = 16;
        let mut best: Option<(f64, f64, f64)> = None; // (cost, t, β_i)
        let mut best_idx = 0;
        for s in 0..=SCAN {
            let t = s as f64 / SCAN as f64;
            if let Some((cost, bi)) = phi(beta, t) {
                if best.is_none_or(|b| cost < b.0) {
                    best = Some((cost, t, bi));
                    best_idx = s;
                }
            }
        }
        let Some(mut winner) = best else { return false };
        // golden-section refinement inside the neighbouring scan cells
        let (mut a, mut b) = (
            best_idx.saturating_sub(1) as f64 / SCAN as f64,
            (best_idx + 1).min(SCAN) as f64 / SCAN as f64,
        );
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let eval = |beta: &mut [f64], t: f64| phi(beta, t).map(|(c, _)| c).unwrap_or(f64::INFINITY);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut fc, mut fd) = (eval(beta, c), eval(beta, d));
        for _ in 0..30 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = eval(beta, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = eval(beta, d);
            }
        }
        for t in [c, d] {
            if let Some((cost, bi)) = phi(beta, t) {
                if cost < winner.0 {
                    winner = (cost, t, bi);
                }
            }
        }
        if winner.0 < current - 1e-13 {
            beta[j] = winner.1;
            beta[i] = winner.2;
            debug_assert!(self.feasible(beta));
            true
        } else {
            false
        }
    }

    fn pair_refine(&self, beta: &mut [f64], sweeps: u32) {
        let k = beta.len();
        for _ in 0..sweeps {
            let mut improved = false;
            for i in 0..k {
                for j in 0..k {
                    if i != j && self.pair_move(beta, i, j) {
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
}

/// Upper bound on the soft junta complexity `J̃(g, δ)` with a feasible witness.
///
/// Starts: all-ones, the 0/1 witness of `J(g, δ)`, the smallest feasible uniform
/// vector, and `restarts` random grid points. Each start runs a grid coordinate
/// descent followed by continuous per-coordinate bisection; the best
/// `refine_top` results also get pairwise boundary moves. The 0/1 witness start
/// guarantees the result never exceeds `J(g, δ)`.
pub fn soft_junta_upper(g: &BooleanFunction, delta: f64, search: &SoftJuntaSearch) -> Result<SoftJuntaBound> {
    if delta < 0.0 || delta.is_nan() {
        return Err(Error::invalid(format!("delta {delta} must be non-negative")));
    }
    if search.grid == 0 {
        return Err(Error::invalid("grid resolution must be positive"));
    }
    let k = g.arity() as usize;
    if g.arity() > JUNTA_SEARCH_MAX_ARITY {
        return Err(Error::Arity {
            arity: k,
            min: 0,
            max: JUNTA_SEARCH_MAX_ARITY as usize,
        });
    }
    let problem = SoftProblem { g, delta };
    let natural: Vec<usize> = (0..k).collect();

    let mut starts: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    starts.push((vec![1.0; k], natural.clone()));
    let (_, witness) = junta_complexity(g, delta.min(1.0), None)?;
    starts.push(((0..k).map(|i| ((witness.support >> i) & 1) as f64).collect(), natural.clone()));
    let mut uniform = vec![1.0; k];
    if k > 0 {
        let (mut bad, mut good) = (0.0, 1.0);
        if problem.feasible(&vec![0.0; k]) {
            good = 0.0;
        } else {
            for _ in 0..60 {
                let mid = 0.5 * (bad + good);
                if problem.feasible(&vec![mid; k]) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
        }
        uniform = vec![good; k];
    }
    starts.push((uniform, natural.clone()));
    for r in 0..search.restarts {
        let mut rng = substream(search.seed, SOFT_SEARCH_TAG, r as u64);
        let mut beta: Vec<f64> = (0..k).map(|_| rng.gen_range(0..=search.grid) as f64 / search.grid as f64).collect();
        problem.raise_to_feasible(&mut beta);
        let mut order = natural.clone();
        order.shuffle(&mut rng);
        starts.push((beta, order));
    }

    let mut descended: Vec<(f64, usize, Vec<f64>)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(idx, (mut beta, order))| {
            problem.grid_descent(&mut beta, &order, search.grid);
            problem.coordinate_refine(&mut beta);
            (beta.iter().sum::<f64>(), idx, beta)
        })
        .collect();
    descended.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let top = (search.refine_top.max(1) as usize).min(descended.len());
    let refined: Vec<(f64, usize, Vec<f64>)> = descended[..top]
        .par_iter()
        .map(|(_, idx, beta)| {
            let mut beta = beta.clone();
            problem.pair_refine(&mut beta, search.max_refine_sweeps);
            problem.coordinate_refine(&mut beta);
            (beta.iter().sum::<f64>(), *idx, beta)
        })
        .collect();
    let (_, _, beta) = refined
        .into_iter()
        .chain(descended.into_iter().skip(top))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("at least one start");

    let alpha = CorrelationVector::new(beta.iter().map(|b| b.sqrt().min(1.0)).collect())?;
    let error = alpha_correlated_error(g, &alpha)?;
    if error > delta {
        return Err(Error::Consistency(format!("soft junta witness has error {error} > {delta}")));
    }
    Ok(SoftJuntaBound {
        value: alpha.squared_norm(),
        alpha,
        error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity2() -> BooleanFunction {
        BooleanFunction::parity(2, 0b11).unwrap()
    }

    /// Direct enumeration of the channel: Σ_y Pr[y|x] g(y).
    fn channel_oracle(g: &BooleanFunction, alpha: &[f64], x: u64) -> f64 {
        (0..g.len())
            .map(|y| {
                let p: f64 = alpha
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let same = ((x ^ y) >> i) & 1 == 0;
                        if same {
                            (1.0 + a) / 2.0
                        } else {
                            (1.0 - a) / 2.0
                        }
                    })
                    .product();
                p * g.get(y) as f64
            })
            .sum()
    }

    #[test]
    fn conditional_mean_examples() {
        let g = BooleanFunction::majority(3).unwrap();
        let s = g.fourier();
        for x in 0..8 {
            let ones = conditional_mean(&s, &CorrelationVector::ones(3), x).unwrap();
            assert!((ones - g.get(x) as f64).abs() < 1e-12);
            let zeros = conditional_mean(&s, &CorrelationVector::zeros(3), x).unwrap();
            assert_eq!(zeros, s.coefficient(0));
        }
        let alpha = CorrelationVector::new(vec![0.6, 0.5]).unwrap();
        let m = conditional_mean(&parity2().fourier(), &alpha, 0b11).unwrap();
        assert!((m - 0.30).abs() < 1e-12);
        assert!((channel_oracle(&parity2(), &[0.6, 0.5], 0b11) - 0.30).abs() < 1e-12);
        let all = conditional_means(&parity2(), &alpha).unwrap();
        assert!((all[3] - 0.30).abs() < 1e-12);
    }

    #[test]
    fn error_examples() {
        let alpha = CorrelationVector::new(vec![0.6, 0.5]).unwrap();
        assert!((alpha_correlated_error(&parity2(), &alpha).unwrap() - 0.35).abs() < 1e-12);
        assert_eq!(alpha_correlated_error(&parity2(), &CorrelationVector::ones(2)).unwrap(), 0.0);
        let maj = BooleanFunction::majority(3).unwrap();
        assert_eq!(alpha_correlated_error(&maj, &CorrelationVector::zeros(3)).unwrap(), 0.5);
    }

    #[test]
    fn error_is_minimum_distance_over_all_predictors() {
        let g = BooleanFunction::majority(3).unwrap();
        let alpha = CorrelationVector::new(vec![0.9, -0.3, 0.4]).unwrap();
        let brute = (0..256u64)
            .map(|t| {
                let h = BooleanFunction::from_fn(3, |x| if (t >> x) & 1 == 1 { 1 } else { -1 }).unwrap();
                alpha_correlated_distance(&g, &h, &alpha).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((brute - alpha_correlated_error(&g, &alpha).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn variance_examples() {
        let v = alpha_correlated_variance(&parity2(), &CorrelationVector::ones(2)).unwrap();
        assert!(v.direct.abs() < 1e-12);
        let (a, b) = (0.3, -0.7);
        let v = alpha_correlated_variance(&parity2(), &CorrelationVector::new(vec![a, b]).unwrap()).unwrap();
        assert!((v.spectral - (1.0 - a * a * b * b)).abs() < 1e-12);
        assert!((v.direct - v.spectral).abs() < 1e-12);
    }

    #[test]
    fn rounding_examples() {
        let g = BooleanFunction::majority(3).unwrap();
        for mask in 0..8u64 {
            let alpha = CorrelationVector::indicator(3, mask);
            let r = rounding_expected_error(&g, &alpha).unwrap();
            assert_eq!(r, alpha_correlated_error(&g, &alpha).unwrap());
        }
        assert_eq!(rounding_expected_error(&parity2(), &CorrelationVector::ones(2)).unwrap(), 0.0);
        let big = BooleanFunction::majority(13).unwrap();
        assert!(rounding_expected_error(&big, &CorrelationVector::ones(13)).is_err());
    }

    #[test]
    fn soft_bound_with_zero_delta_counts_relevant_coordinates() {
        // depends on coordinates 0 and 2 only
        let g = BooleanFunction::from_fn(4, |x| if (x & 1) ^ ((x >> 2) & 1) == 1 { 1 } else { -1 }).unwrap();
        let b = soft_junta_upper(&g, 0.0, &SoftJuntaSearch::default()).unwrap();
        assert!((b.value - 2.0).abs() < 1e-9, "{b:?}");
        assert_eq!(b.error, 0.0);
    }

    #[test]
    fn soft_bound_for_parity_reaches_symmetric_optimum() {
        for k in 1..=4u32 {
            let g = BooleanFunction::parity(k, (1 << k) - 1).unwrap();
            for delta in [0.05, 0.1, 0.2, 0.3] {
                let b = soft_junta_upper(&g, delta, &SoftJuntaSearch::default()).unwrap();
                let target = k as f64 * (1.0f64 - 2.0 * delta).powf(2.0 / k as f64);
                assert!(b.value <= target + 1e-6, "k={k} δ={delta}: {} vs {target}", b.value);
                assert!(b.error <= delta);
            }
        }
    }

    #[test]
    fn derandomized_rounding_finds_small_support() {
        let g = BooleanFunction::majority(3).unwrap();
        let alpha = CorrelationVector::indicator(3, 0b001);
        let cert = derandomized_rounding(&g, &alpha, 0.25).unwrap().unwrap();
        assert!(cert.size <= 2);
        assert!(cert.error <= 1.0);
        assert!(soft_junta_upper(&g, -0.1, &SoftJuntaSearch::default()).is_err());
    }
}
