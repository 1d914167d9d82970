//! Walsh–Hadamard spectra of ±1 functions.
//!
//! Coefficients are indexed by subset masks with the same bit order as inputs:
//! `ĝ(S) = E_x[g(x) χ_S(x)]` where `χ_S(x) = ∏_{i∈S} x_i`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::numeric::compensated_sum;
use crate::{BooleanFunction, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    k: u32,
    coeffs: Vec<f64>,
}

/// In-place unnormalised transform `a[s] ← Σ_x a[x] (−1)^{|x ∧ s|}`.
pub fn fwht_i64(a: &mut [i64]) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for j in block..block + h {
                let (u, v) = (a[j], a[j + h]);
                a[j] = u + v;
                a[j + h] = u - v;
            }
        }
        h *= 2;
    }
}

pub fn fwht_f64(a: &mut [f64]) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for j in block..block + h {
                let (u, v) = (a[j], a[j + h]);
                a[j] = u + v;
                a[j + h] = u - v;
            }
        }
        h *= 2;
    }
}

// χ_S(x) = (−1)^{|S| − |x∧S|}, so the ±1-encoded character differs from the
// 0/1 Walsh kernel by (−1)^{|S|}.
#[inline]
fn character_sign(mask: usize) -> f64 {
    if mask.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl FourierSpectrum {
    /// Spectrum of `f`. The integer transform is exact; each coefficient is a
    /// multiple of `2^{-n}` and representable without rounding.
    pub fn of(f: &BooleanFunction) -> Self {
        let n = f.len() as usize;
        let mut a: Vec<i64> = (0..n as u64).map(|x| f.get(x) as i64).collect();
        fwht_i64(&mut a);
        let scale = 1.0 / n as f64;
        let coeffs = a
            .iter()
            .enumerate()
            .map(|(s, &v)| character_sign(s) * v as f64 * scale)
            .collect();
        FourierSpectrum { k: f.arity(), coeffs }
    }

    pub fn from_coefficients(k: u32, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() as u64 != 1u64 << k {
            return Err(Error::invalid(format!(
                "spectrum of arity {k} needs {} coefficients, got {}",
                1u64 << k,
                coeffs.len()
            )));
        }
        Ok(FourierSpectrum { k, coeffs })
    }

    pub fn arity(&self) -> u32 {
        self.k
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficient(&self, mask: u64) -> f64 {
        self.coeffs[mask as usize]
    }

    /// `Σ_S ĝ(S)²`, which is 1 for every ±1-valued function.
    pub fn parseval_sum(&self) -> f64 {
        compensated_sum(self.coeffs.iter().map(|c| c * c))
    }

    /// `g(x) = Σ_S ĝ(S) χ_S(x)` evaluated at every input.
    pub fn inverse_values(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(s, &c)| character_sign(s) * c)
            .collect();
        fwht_f64(&mut a);
        a
    }

    /// Rebuilds the ±1 function by taking signs of the inverse transform.
    pub fn to_boolean_function(&self) -> Result<BooleanFunction> {
        let values = self.inverse_values();
        if let Some((x, v)) = values.iter().enumerate().find(|(_, v)| (v.abs() - 1.0).abs() > 1e-9) {
            return Err(Error::Consistency(format!(
                "inverse transform gives {v} at input {x}, not ±1"
            )));
        }
        BooleanFunction::from_fn(self.k, |x| crate::sign(values[x as usize]))
    }

    /// Writes `mask,coefficient` rows with a header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (mask, &coefficient) in self.coeffs.iter().enumerate() {
            w.serialize(SpectrumRow {
                mask: mask as u64,
                coefficient,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads rows written by [`FourierSpectrum::write_csv`]; every mask must appear once.
    pub fn read_csv<R: Read>(k: u32, reader: R) -> Result<Self> {
        let size = 1usize << k;
        let mut coeffs = vec![f64::NAN; size];
        let mut r = csv::Reader::from_reader(reader);
        for row in r.deserialize() {
            let row: SpectrumRow = row?;
            let slot = coeffs
                .get_mut(row.mask as usize)
                .ok_or_else(|| Error::Parse(format!("mask {} out of range", row.mask)))?;
            if !slot.is_nan() {
                return Err(Error::Parse(format!("duplicate mask {}", row.mask)));
            }
            *slot = row.coefficient;
        }
        if coeffs.iter().any(|c| c.is_nan()) {
            return Err(Error::Parse("missing spectrum rows".into()));
        }
        Ok(FourierSpectrum { k, coeffs })
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumRow {
    mask: u64,
    coefficient: f64,
}

impl BooleanFunction {
    pub fn fourier(&self) -> FourierSpectrum {
        FourierSpectrum::of(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_has_a_single_coefficient() {
        let p = BooleanFunction::parity(2, 0b11).unwrap();
        assert_eq!(p.fourier().coefficients(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn constant_plus_one() {
        let c = BooleanFunction::constant(3, 1).unwrap();
        let s = c.fourier();
        assert_eq!(s.coefficient(0), 1.0);
        assert!(s.coefficients()[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn majority_three_pattern() {
        let s = BooleanFunction::majority(3).unwrap().fourier();
        let expected = [0.0, 0.5, 0.5, 0.0, 0.5, 0.0, 0.0, -0.5];
        assert_eq!(s.coefficients(), &expected);
    }

    #[test]
    fn dictator_coefficient_is_positive() {
        let d = BooleanFunction::dictator(4, 2).unwrap();
        let s = d.fourier();
        assert_eq!(s.coefficient(0b100), 1.0);
        assert_eq!(s.parseval_sum(), 1.0);
    }

    #[test]
    fn csv_round_trip() {
        let s = BooleanFunction::majority(3).unwrap().fourier();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("mask,coefficient\n0,0.0\n1,0.5\n"));
        assert_eq!(FourierSpectrum::read_csv(3, buf.as_slice()).unwrap(), s);
        assert!(FourierSpectrum::read_csv(3, "mask,coefficient\n0,1.0\n".as_bytes()).is_err());
    }

    #[test]
    fn non_boolean_spectrum_is_rejected() {
        let s = FourierSpectrum::from_coefficients(1, vec![0.5, 0.0]).unwrap();
        assert!(s.to_boolean_function().is_err());
        assert!(FourierSpectrum::from_coefficients(2, vec![0.0; 3]).is_err());
    }
}
