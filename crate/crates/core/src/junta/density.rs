use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numeric::{compensated_sum, NeumaierSum};
use crate::{Error, Result, MAX_ARITY};

/// Tolerance on the pmf total and on the density cap.
pub const PMF_TOLERANCE: f64 = 1e-12;

/// Explicit pmf on `{±1}^k` with a declared density `c`: every entry is at most `1/(c·2^k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityDistribution {
    k: u32,
    pmf: Vec<f64>,
    density: f64,
}

#[derive(Serialize, Deserialize)]
struct PmfRow {
    index: u64,
    probability: f64,
}

impl DensityDistribution {
    pub fn new(k: u32, pmf: Vec<f64>, density: f64) -> Result<Self> {
        if k > MAX_ARITY {
            return Err(Error::Arity {
                arity: k as usize,
                min: 0,
                max: MAX_ARITY as usize,
            });
        }
        if pmf.len() as u64 != 1u64 << k {
            return Err(Error::InvalidDistribution(format!(
                "pmf on {k} bits needs {} entries, got {}",
                1u64 << k,
                pmf.len()
            )));
        }
        if !(density > 0.0 && density <= 1.0) {
            return Err(Error::InvalidDistribution(format!("density {density} outside (0, 1]")));
        }
        if let Some(bad) = pmf.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("invalid probability {bad}")));
        }
        let total = compensated_sum(pmf.iter().copied());
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("pmf sums to {total}")));
        }
        let cap = cap_for(k, density);
        let max = pmf.iter().copied().fold(0.0, f64::max);
        if max > cap + PMF_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entry {max} exceeds the density-{density} cap {cap}"
            )));
        }
        Ok(DensityDistribution { k, pmf, density })
    }

    pub fn uniform(k: u32) -> Result<Self> {
        let size = 1usize << k.min(MAX_ARITY + 1);
        Self::new(k, vec![1.0 / size as f64; size], 1.0)
    }

    /// Point mass on `x`, which has density `2^{-k}`.
    pub fn point_mass(k: u32, x: u64) -> Result<Self> {
        if k > MAX_ARITY || x >= 1u64 << k {
            return Err(Error::IndexOutOfRange { index: x, bits: k });
        }
        let mut pmf = vec![0.0; 1 << k];
        pmf[x as usize] = 1.0;
        Self::new(k, pmf, 0.5f64.powi(k as i32))
    }

    /// Random density-`c` pmf: exponential weights water-filled under the cap `1/(c·2^k)`.
    pub fn random<R: Rng + ?Sized>(k: u32, density: f64, rng: &mut R) -> Result<Self> {
        if k > MAX_ARITY || !(density > 0.0 && density <= 1.0) {
            return Err(Error::invalid(format!("cannot build density-{density} pmf on {k} bits")));
        }
        let size = 1usize << k;
        // a random fraction of entries is zeroed so that the cap binds on sparse supports too
        let keep: f64 = rng.gen_range(0.05..=1.0);
        let mut weights: Vec<f64> = (0..size)
            .map(|_| {
                let u: f64 = rng.gen();
                if u < keep {
                    -(1.0 - rng.gen::<f64>()).ln()
                } else {
                    0.0
                }
            })
            .collect();
        if weights.iter().all(|&w| w == 0.0) {
            weights.iter_mut().for_each(|w| *w = 1.0);
        }
        let pmf = water_fill(weights, cap_for(k, density));
        Self::new(k, pmf, density)
    }

    /// Uniform distribution on a random set of `⌈c·2^k⌉` points (a hardcore set of density `c`).
    pub fn random_set<R: Rng + ?Sized>(k: u32, density: f64, rng: &mut R) -> Result<Self> {
        if k > MAX_ARITY || !(density > 0.0 && density <= 1.0) {
            return Err(Error::invalid(format!("cannot build density-{density} set on {k} bits")));
        }
        let size = 1usize << k;
        let count = ((density * size as f64).ceil() as usize).clamp(1, size);
        let mut pmf = vec![0.0; size];
        for x in rand::seq::index::sample(rng, size, count) {
            pmf[x] = 1.0 / count as f64;
        }
        Self::new(k, pmf, density)
    }

    pub fn arity(&self) -> u32 {
        self.k
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn probability(&self, x: u64) -> f64 {
        self.pmf[x as usize]
    }

    /// Largest `c` for which this pmf has density `c`.
    pub fn tightest_density(&self) -> f64 {
        let max = self.pmf.iter().copied().fold(0.0, f64::max);
        (1.0 / (max * self.pmf.len() as f64)).min(1.0)
    }

    /// `E[value(x)]` with compensated summation in index order.
    pub fn expectation(&self, mut value: impl FnMut(u64) -> f64) -> f64 {
        let mut acc = NeumaierSum::new();
        for (x, &p) in self.pmf.iter().enumerate() {
            if p != 0.0 {
                acc.add(p * value(x as u64));
            }
        }
        acc.value()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_pmf_csv(&self.pmf, writer)
    }

    /// Loads `(index, probability)` rows; the arity is inferred from the row count.
    pub fn read_csv<R: Read>(reader: R, density: f64) -> Result<Self> {
        let pmf = read_pmf_csv(reader)?;
        let k = pmf.len().trailing_zeros();
        Self::new(k, pmf, density)
    }
}

fn cap_for(k: u32, density: f64) -> f64 {
    1.0 / (density * (1u64 << k) as f64)
}

/// Normalises `weights` and caps every entry at `cap`, redistributing the excess
/// proportionally over uncapped entries. Requires `cap · len ≥ 1`.
fn water_fill(mut weights: Vec<f64>, cap: f64) -> Vec<f64> {
    let mut capped = vec![false; weights.len()];
    loop {
        let fixed = capped.iter().filter(|&&c| c).count() as f64 * cap;
        let free_mass = compensated_sum(weights.iter().zip(&capped).filter(|(_, c)| !**c).map(|(w, _)| *w));
        let remaining = (1.0 - fixed).max(0.0);
        if free_mass == 0.0 {
            // everything left is zero-weight: spread the remainder evenly
            let free = capped.iter().filter(|&&c| !c).count();
            for (w, c) in weights.iter_mut().zip(&capped) {
                if !*c {
                    *w = if free > 0 { remaining / free as f64 } else { 0.0 };
                }
            }
            return weights;
        }
        let scale = remaining / free_mass;
        let mut changed = false;
        for (w, c) in weights.iter_mut().zip(capped.iter_mut()) {
            if *c {
                *w = cap;
                continue;
            }
            *w *= scale;
            if *w > cap {
                *w = cap;
                *c = true;
                changed = true;
            }
        }
        if !changed {
            return weights;
        }
        // undo scaling on free entries so the next pass renormalises from raw proportions
        for (w, c) in weights.iter_mut().zip(&capped) {
            if !*c {
                *w /= scale;
            }
        }
    }
}

pub(crate) fn write_pmf_csv<W: Write>(pmf: &[f64], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (index, &probability) in pmf.iter().enumerate() {
        w.serialize(PmfRow {
            index: index as u64,
            probability,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn read_pmf_csv<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut rows: Vec<PmfRow> = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    if rows.is_empty() || !rows.len().is_power_of_two() {
        return Err(Error::Parse(format!(
            "pmf needs a power-of-two number of rows, got {}",
            rows.len()
        )));
    }
    let mut pmf = vec![f64::NAN; rows.len()];
    for row in rows {
        let slot = pmf
            .get_mut(row.index as usize)
            .ok_or_else(|| Error::Parse(format!("index {} out of range", row.index)))?;
        if !slot.is_nan() {
            return Err(Error::Parse(format!("duplicate index {}", row.index)));
        }
        *slot = row.probability;
    }
    Ok(pmf)
}
