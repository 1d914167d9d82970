//! Junta complexity and the majority tightness quantities.
//!
//! Subsets of coordinates are bitmasks. A junta on support `S` is stored as an
//! inner function on `|S|` bits whose input bit `j` is the `j`-th smallest
//! coordinate of `S`.

mod density;
pub mod soft;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::{gather_bits, sign_int};
use crate::numeric::NeumaierSum;
use crate::{BooleanFunction, Error, Result};

pub use density::{DensityDistribution, PMF_TOLERANCE};
pub(crate) use density::{read_pmf_csv, write_pmf_csv};
pub use soft::{
    alpha_correlated_distance, alpha_correlated_error, alpha_correlated_variance, conditional_mean,
    conditional_means, derandomized_rounding, rounding_expected_error, soft_junta_upper,
    CorrelatedVariance, RoundingCertificate, SoftJuntaBound, SoftJuntaSearch,
};

/// Largest arity accepted by the exhaustive subset search.
pub const JUNTA_SEARCH_MAX_ARITY: u32 = 20;

/// Correlation vector `α ∈ [−1, 1]^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCorrelationVector", into = "RawCorrelationVector")]
pub struct CorrelationVector {
    alpha: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorrelationVector {
    k: usize,
    alpha: Vec<f64>,
}

impl TryFrom<RawCorrelationVector> for CorrelationVector {
    type Error = Error;

    fn try_from(raw: RawCorrelationVector) -> Result<Self> {
        if raw.k != raw.alpha.len() {
            return Err(Error::ArityMismatch {
                left: raw.k,
                right: raw.alpha.len(),
            });
        }
        CorrelationVector::new(raw.alpha)
    }
}

impl From<CorrelationVector> for RawCorrelationVector {
    fn from(v: CorrelationVector) -> Self {
        RawCorrelationVector {
            k: v.alpha.len(),
            alpha: v.alpha,
        }
    }
}

impl CorrelationVector {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if let Some(bad) = alpha.iter().find(|a| !(-1.0..=1.0).contains(*a)) {
            return Err(Error::invalid(format!("correlation {bad} outside [-1, 1]")));
        }
        Ok(CorrelationVector { alpha })
    }

    pub fn ones(k: usize) -> Self {
        CorrelationVector { alpha: vec![1.0; k] }
    }

    pub fn zeros(k: usize) -> Self {
        CorrelationVector { alpha: vec![0.0; k] }
    }

    /// 0/1 vector with ones on the coordinates of `mask`.
    pub fn indicator(k: usize, mask: u64) -> Self {
        CorrelationVector {
            alpha: (0..k).map(|i| ((mask >> i) & 1) as f64).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.alpha.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    /// `Σ α_i²`.
    pub fn squared_norm(&self) -> f64 {
        self.alpha.iter().map(|a| a * a).sum()
    }
}

/// A junta witness: inner function on the coordinates of `support`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuntaCertificate {
    pub arity: u32,
    pub support: u64,
    pub inner: BooleanFunction,
    pub achieved_distance: f64,
}

impl JuntaCertificate {
    pub fn size(&self) -> u32 {
        self.support.count_ones()
    }

    /// Value of the junta at a full input.
    pub fn evaluate(&self, x: u64) -> i8 {
        self.inner.get(gather_bits(x, self.support))
    }
}

fn check_support(g: &BooleanFunction, support: u64) -> Result<()> {
    let k = g.arity();
    if k < 64 && support >> k != 0 {
        return Err(Error::invalid(format!("support {support:#x} exceeds arity {k}")));
    }
    Ok(())
}

fn check_weighting(g: &BooleanFunction, h: Option<&DensityDistribution>) -> Result<()> {
    match h {
        Some(h) if h.arity() != g.arity() => Err(Error::ArityMismatch {
            left: g.arity() as usize,
            right: h.arity() as usize,
        }),
        _ => Ok(()),
    }
}

/// Disagreement of the junta `(support, inner)` with `g`, under `h` or uniform.
pub fn junta_distance(
    g: &BooleanFunction,
    support: u64,
    inner: &BooleanFunction,
    h: Option<&DensityDistribution>,
) -> Result<f64> {
    check_support(g, support)?;
    check_weighting(g, h)?;
    if inner.arity() != support.count_ones() {
        return Err(Error::ArityMismatch {
            left: inner.arity() as usize,
            right: support.count_ones() as usize,
        });
    }
    let mismatch = |x: u64| g.get(x) != inner.get(gather_bits(x, support));
    Ok(match h {
        None => (0..g.len()).filter(|&x| mismatch(x)).count() as f64 / g.len() as f64,
        Some(h) => {
            let mut acc = NeumaierSum::new();
            for x in 0..g.len() {
                if mismatch(x) {
                    acc.add(h.probability(x));
                }
            }
            acc.value()
        }
    })
}

/// Conditional-sign inner function on `support`: per cell, `+1` iff the (weighted)
/// mass of `g = +1` is at least the mass of `g = −1`.
fn conditional_sign(g: &BooleanFunction, support: u64, h: Option<&DensityDistribution>) -> BooleanFunction {
    let r = support.count_ones();
    let cells = 1usize << r;
    match h {
        None => {
            let mut score = vec![0i64; cells];
            for x in 0..g.len() {
                score[gather_bits(x, support) as usize] += g.get(x) as i64;
            }
            BooleanFunction::from_fn(r, |y| sign_int(score[y as usize])).expect("arity bounded by g")
        }
        Some(h) => {
            let mut score = vec![NeumaierSum::new(); cells];
            for x in 0..g.len() {
                let p = h.probability(x);
                if p != 0.0 {
                    score[gather_bits(x, support) as usize].add(p * g.get(x) as f64);
                }
            }
            BooleanFunction::from_fn(r, |y| crate::sign(score[y as usize].value())).expect("arity bounded by g")
        }
    }
}

/// Optimal junta on a fixed support: the inner function is the sign of the
/// conditional mean of `g` on each cell (ties and empty cells go to `+1`).
pub fn best_junta_on(g: &BooleanFunction, support: u64, h: Option<&DensityDistribution>) -> Result<JuntaCertificate> {
    check_support(g, support)?;
    check_weighting(g, h)?;
    let inner = conditional_sign(g, support, h);
    let achieved_distance = junta_distance(g, support, &inner, h)?;
    Ok(JuntaCertificate {
        arity: g.arity(),
        support,
        inner,
        achieved_distance,
    })
}

/// Masks of `k`-bit subsets of size `r` in ascending numeric order.
pub fn subsets_of_size(k: u32, r: u32) -> Vec<u64> {
    if r > k {
        return Vec::new();
    }
    if r == 0 {
        return vec![0];
    }
    let limit = 1u64 << k;
    let mut out = Vec::new();
    let mut m: u64 = (1u64 << r) - 1;
    while m < limit {
        out.push(m);
        // Gosper's hack
        let c = m & m.wrapping_neg();
        let r_ = m + c;
        m = (((r_ ^ m) >> 2) / c) | r_;
    }
    out
}

/// `J(g, δ)` (or `J_H` when `h` is given): the smallest support size whose best
/// junta is within `delta`, together with the first witness in ascending
/// `(size, mask)` order.
pub fn junta_complexity(g: &BooleanFunction, delta: f64, h: Option<&DensityDistribution>) -> Result<(u32, JuntaCertificate)> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid(format!("delta {delta} outside [0, 1]")));
    }
    let k = g.arity();
    if k > JUNTA_SEARCH_MAX_ARITY {
        return Err(Error::Arity {
            arity: k as usize,
            min: 0,
            max: JUNTA_SEARCH_MAX_ARITY as usize,
        });
    }
    check_weighting(g, h)?;
    for r in 0..=k {
        let masks = subsets_of_size(k, r);
        let found = masks.par_iter().find_first(|&&mask| {
            let inner = conditional_sign(g, mask, h);
            junta_distance(g, mask, &inner, h).map(|d| d <= delta).unwrap_or(false)
        });
        if let Some(&mask) = found {
            return Ok((r, best_junta_on(g, mask, h)?));
        }
    }
    Err(Error::Consistency("full support failed to reach distance zero".into()))
}

/// Best agreement of `MAJ_k` with any `k/2`-junta under the uniform distribution.
pub fn maj_best_halfjunta_agreement(k: u32) -> Result<f64> {
    if k == 0 || k % 2 == 1 || k > 16 {
        return Err(Error::invalid(format!("half-junta agreement needs even k in 2..=16, got {k}")));
    }
    let g = BooleanFunction::majority(k)?;
    let best = subsets_of_size(k, k / 2)
        .par_iter()
        .map(|&mask| best_junta_on(&g, mask, None).map(|c| 1.0 - c.achieved_distance))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// Dictator correlations of `MAJ_k` under a density distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictatorAdvantage {
    /// `(1/k)·E_H[|Σ_i x_i|]`.
    pub average: f64,
    /// `E_H[MAJ_k(x)·x_i]` for each `i`.
    pub per_coordinate: Vec<f64>,
    pub max: f64,
    pub argmax: usize,
}

impl DictatorAdvantage {
    pub fn mean_of_coordinates(&self) -> f64 {
        self.per_coordinate.iter().sum::<f64>() / self.per_coordinate.len() as f64
    }
}

pub fn dictator_advantage(h: &DensityDistribution) -> Result<DictatorAdvantage> {
    let k = h.arity();
    if k.is_multiple_of(2) {
        return Err(Error::invalid(format!("dictator identity needs odd k, got {k}")));
    }
    let coord = |x: u64, i: u32| if (x >> i) & 1 == 1 { 1.0 } else { -1.0 };
    let sum = |x: u64| 2.0 * x.count_ones() as f64 - k as f64;
    let average = h.expectation(|x| sum(x).abs()) / k as f64;
    let per_coordinate: Vec<f64> = (0..k)
        .map(|i| h.expectation(|x| crate::sign(sum(x)) as f64 * coord(x, i)))
        .collect();
    let (argmax, max) = per_coordinate
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    Ok(DictatorAdvantage {
        average,
        per_coordinate,
        max,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maj3() -> BooleanFunction {
        BooleanFunction::majority(3).unwrap()
    }

    /// Best junta on `support` by trying every inner function.
    fn exhaustive_best(g: &BooleanFunction, support: u64, h: Option<&DensityDistribution>) -> f64 {
        let r = support.count_ones();
        let cells = 1u64 << r;
        (0..1u64 << cells)
            .map(|table| {
                let inner = BooleanFunction::from_fn(r, |y| if (table >> y) & 1 == 1 { 1 } else { -1 }).unwrap();
                junta_distance(g, support, &inner, h).unwrap()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn best_junta_examples() {
        let c = best_junta_on(&maj3(), 0b001, None).unwrap();
        assert_eq!(c.achieved_distance, 0.25);
        assert_eq!(c.inner, BooleanFunction::dictator(1, 0).unwrap());
        assert_eq!(exhaustive_best(&maj3(), 0b001, None), 0.25);
        let c = best_junta_on(&maj3(), 0b011, None).unwrap();
        assert_eq!(c.achieved_distance, 0.25);
        assert_eq!(exhaustive_best(&maj3(), 0b011, None), 0.25);
        let full = best_junta_on(&maj3(), 0b111, None).unwrap();
        assert_eq!(full.achieved_distance, 0.0);
        assert!(best_junta_on(&maj3(), 0b1000, None).is_err());
    }

    #[test]
    fn junta_complexity_examples() {
        let (j, cert) = junta_complexity(&maj3(), 0.25, None).unwrap();
        assert_eq!(j, 1);
        assert_eq!(cert.support, 0b001);
        assert_eq!(junta_complexity(&maj3(), 0.24, None).unwrap().0, 3);
        assert_eq!(junta_complexity(&maj3(), 0.5, None).unwrap().0, 0);
        assert!(junta_complexity(&maj3(), 1.5, None).is_err());
    }

    #[test]
    fn half_junta_agreement_small_values() {
        // exact values from exhaustive enumeration of the conditional-sign optimum
        assert_eq!(maj_best_halfjunta_agreement(4).unwrap(), 13.0 / 16.0);
        assert_eq!(maj_best_halfjunta_agreement(6).unwrap(), 0.75);
        assert_eq!(maj_best_halfjunta_agreement(8).unwrap(), 201.0 / 256.0);
        assert_eq!(maj_best_halfjunta_agreement(10).unwrap(), 0.75);
        assert!(maj_best_halfjunta_agreement(5).is_err());
        assert!(maj_best_halfjunta_agreement(18).is_err());
    }

    #[test]
    fn weighted_zero_cells_default_to_plus() {
        let h = DensityDistribution::point_mass(3, 0b111).unwrap();
        let c = best_junta_on(&maj3(), 0b001, Some(&h)).unwrap();
        assert_eq!(c.achieved_distance, 0.0);
        // cell x_1 = −1 has no mass
        assert_eq!(c.inner.get(0), 1);
    }

    #[test]
    fn dictator_examples() {
        let u = DensityDistribution::uniform(3).unwrap();
        let d = dictator_advantage(&u).unwrap();
        assert_eq!(d.average, 0.5);
        assert_eq!(d.max, 0.5);
        assert_eq!(d.argmax, 0);
        let p = DensityDistribution::point_mass(3, 0b111).unwrap();
        assert_eq!(dictator_advantage(&p).unwrap().average, 1.0);
        assert!(dictator_advantage(&DensityDistribution::uniform(4).unwrap()).is_err());
    }

    #[test]
    fn subset_enumeration_is_ascending() {
        assert_eq!(subsets_of_size(4, 2), vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(subsets_of_size(3, 0), vec![0]);
        assert_eq!(subsets_of_size(3, 3), vec![0b111]);
        assert!(subsets_of_size(2, 3).is_empty());
    }

    #[test]
    fn correlation_vector_validation_and_json() {
        assert!(CorrelationVector::new(vec![1.5]).is_err());
        let v = CorrelationVector::new(vec![0.5, -1.0]).unwrap();
        assert_eq!(v.squared_norm(), 1.25);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"{"k":2,"alpha":[0.5,-1.0]}"#);
        assert_eq!(serde_json::from_str::<CorrelationVector>(&json).unwrap(), v);
        assert!(serde_json::from_str::<CorrelationVector>(r#"{"k":3,"alpha":[0.5]}"#).is_err());
        assert!(serde_json::from_str::<CorrelationVector>(r#"{"k":1,"alpha":[2.0]}"#).is_err());
    }

    #[test]
    fn certificate_json_round_trip() {
        let (_, cert) = junta_complexity(&maj3(), 0.25, None).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: JuntaCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
        assert_eq!(junta_distance(&maj3(), back.support, &back.inner, None).unwrap(), back.achieved_distance);
    }
}
