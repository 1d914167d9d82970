//! Bit-packed ±1 truth tables.
//!
//! Input `x` is an unsigned index whose bit `i` is coordinate `x_i`, with a set
//! bit meaning `x_i = +1`. The table stores one bit per input: set for `+1`,
//! clear for `−1`.

use std::fmt;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Largest supported arity (a 2^22-entry table is 512 KiB packed).
pub const MAX_ARITY: u32 = 22;

/// `sign(t)` with the convention `sign(0) = +1`.
#[inline]
pub fn sign(t: f64) -> i8 {
    if t >= 0.0 {
        1
    } else {
        -1
    }
}

#[inline]
pub(crate) fn sign_int(t: i64) -> i8 {
    if t >= 0 {
        1
    } else {
        -1
    }
}

/// Packs the bits of `x` selected by `mask` into the low bits of the result,
/// preserving their order.
#[inline]
pub fn gather_bits(x: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    let mut j = 0;
    while m != 0 {
        let b = m.trailing_zeros();
        out |= ((x >> b) & 1) << j;
        j += 1;
        m &= m - 1;
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: u32,
    words: Vec<u64>,
}

/// Output of the two-stage balanced sampler: a uniform table and the table
/// obtained by flipping a uniformly chosen set of `|Σ u(x)|/2` majority-valued entries.
#[derive(Debug, Clone)]
pub struct TwoStageSample {
    pub unbalanced: BooleanFunction,
    pub balanced: BooleanFunction,
    pub flipped: u64,
}

fn word_count(n: u32) -> usize {
    if n >= 6 {
        1 << (n - 6)
    } else {
        1
    }
}

fn check_arity(n: u32) -> Result<()> {
    if n > MAX_ARITY {
        return Err(Error::Arity {
            arity: n as usize,
            min: 0,
            max: MAX_ARITY as usize,
        });
    }
    Ok(())
}

impl BooleanFunction {
    /// The constant function with the given value (`value >= 0` means `+1`).
    pub fn constant(n: u32, value: i8) -> Result<Self> {
        check_arity(n)?;
        let mut f = BooleanFunction {
            n,
            words: vec![if value >= 0 { u64::MAX } else { 0 }; word_count(n)],
        };
        f.clear_padding();
        Ok(f)
    }

    /// Builds a table from `value(x)`; non-negative results are read as `+1`.
    pub fn from_fn(n: u32, mut value: impl FnMut(u64) -> i8) -> Result<Self> {
        check_arity(n)?;
        let mut words = vec![0u64; word_count(n)];
        for x in 0..(1u64 << n) {
            if value(x) >= 0 {
                words[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        Ok(BooleanFunction { n, words })
    }

    /// `x ↦ x_i`.
    pub fn dictator(n: u32, i: u32) -> Result<Self> {
        if i >= n {
            return Err(Error::invalid(format!("dictator coordinate {i} >= arity {n}")));
        }
        Self::from_fn(n, |x| if (x >> i) & 1 == 1 { 1 } else { -1 })
    }

    /// The character `χ_S(x) = ∏_{i∈S} x_i` for the subset encoded by `mask`.
    pub fn parity(n: u32, mask: u64) -> Result<Self> {
        if n < 64 && mask >> n != 0 {
            return Err(Error::invalid(format!("parity mask {mask:#x} exceeds arity {n}")));
        }
        let size = mask.count_ones();
        Self::from_fn(n, |x| {
            let minus = size - (x & mask).count_ones();
            if minus.is_multiple_of(2) {
                1
            } else {
                -1
            }
        })
    }

    /// `MAJ_k(x) = sign(Σ x_i)` with `sign(0) = +1`.
    pub fn majority(k: u32) -> Result<Self> {
        if k == 0 || k > MAX_ARITY {
            return Err(Error::Arity {
                arity: k as usize,
                min: 1,
                max: MAX_ARITY as usize,
            });
        }
        Self::from_fn(k, |x| sign_int(2 * x.count_ones() as i64 - k as i64))
    }

    /// Uniformly random table.
    pub fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Self> {
        check_arity(n)?;
        let mut f = BooleanFunction {
            n,
            words: (0..word_count(n)).map(|_| rng.gen()).collect(),
        };
        f.clear_padding();
        Ok(f)
    }

    /// Uniformly random table with exactly `2^{n-1}` entries equal to `+1`.
    pub fn random_balanced<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a balanced function needs at least one input bit"));
        }
        check_arity(n)?;
        let size = 1usize << n;
        let mut f = BooleanFunction {
            n,
            words: vec![0; word_count(n)],
        };
        for x in index::sample(rng, size, size / 2) {
            f.set(x as u64, 1);
        }
        Ok(f)
    }

    /// Two-stage balanced sampler: draw a uniform table `u`, then, if
    /// `ℓ = Σ_x u(x) ≠ 0`, flip `|ℓ|/2` uniformly chosen entries of the majority
    /// sign. The balanced output is uniform on the middle layer.
    pub fn random_balanced_two_stage<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<TwoStageSample> {
        if n == 0 {
            return Err(Error::invalid("a balanced function needs at least one input bit"));
        }
        let unbalanced = Self::random(n, rng)?;
        let size = unbalanced.len();
        let plus = unbalanced.weight();
        let excess = plus as i64 - (size / 2) as i64;
        let mut balanced = unbalanced.clone();
        let flip_from: i8 = if excess > 0 { 1 } else { -1 };
        let flips = excess.unsigned_abs();
        if flips > 0 {
            let candidates: Vec<u64> = (0..size).filter(|&x| unbalanced.get(x) == flip_from).collect();
            for j in index::sample(rng, candidates.len(), flips as usize) {
                balanced.set(candidates[j], -flip_from);
            }
        }
        Ok(TwoStageSample {
            unbalanced,
            balanced,
            flipped: flips,
        })
    }

    pub fn arity(&self) -> u32 {
        self.n
    }

    /// Number of table entries, `2^n`.
    pub fn len(&self) -> u64 {
        1u64 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Packed words, least significant index first. Padding bits are zero.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Value at `x`. Panics when `x >= 2^n`; see [`BooleanFunction::evaluate`].
    #[inline]
    pub fn get(&self, x: u64) -> i8 {
        assert!(x < self.len(), "input {x} out of range for arity {}", self.n);
        if (self.words[(x >> 6) as usize] >> (x & 63)) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn is_plus(&self, x: u64) -> bool {
        self.get(x) == 1
    }

    pub fn evaluate(&self, x: u64) -> Result<i8> {
        if x >= self.len() {
            return Err(Error::IndexOutOfRange { index: x, bits: self.n });
        }
        Ok(self.get(x))
    }

    pub fn set(&mut self, x: u64, value: i8) {
        assert!(x < self.len(), "input {x} out of range for arity {}", self.n);
        let w = &mut self.words[(x >> 6) as usize];
        if value >= 0 {
            *w |= 1 << (x & 63);
        } else {
            *w &= !(1 << (x & 63));
        }
    }

    /// Number of inputs mapped to `+1`.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.n > 0 && 2 * self.weight() == self.len()
    }

    /// `E_x[f(x)]` under the uniform distribution.
    pub fn bias(&self) -> f64 {
        (2 * self.weight() as i64 - self.len() as i64) as f64 / self.len() as f64
    }

    /// Number of inputs on which `self` and `other` agree.
    pub fn agreement_count(&self, other: &Self) -> Result<u64> {
        self.check_same_arity(other)?;
        let disagree: u64 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum();
        Ok(self.len() - disagree)
    }

    /// `E_x[f(x) g(x)]` under the uniform distribution, exact up to the final division.
    pub fn correlation(&self, other: &Self) -> Result<f64> {
        let agree = self.agreement_count(other)? as i64;
        Ok((2 * agree - self.len() as i64) as f64 / self.len() as f64)
    }

    /// `Pr_x[f(x) ≠ g(x)]`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        let agree = self.agreement_count(other)?;
        Ok((self.len() - agree) as f64 / self.len() as f64)
    }

    pub fn negate(&self) -> Self {
        let mut f = BooleanFunction {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        };
        f.clear_padding();
        f
    }

    /// `x ↦ f(x ∘ π)`: coordinate `i` of the new function is read from coordinate
    /// `perm[i]` of the original input.
    pub fn permute_inputs(&self, perm: &[u32]) -> Result<Self> {
        if perm.len() != self.n as usize {
            return Err(Error::ArityMismatch {
                left: perm.len(),
                right: self.n as usize,
            });
        }
        let mut seen = 0u64;
        for &p in perm {
            if p >= self.n || seen >> p & 1 == 1 {
                return Err(Error::invalid("not a permutation"));
            }
            seen |= 1 << p;
        }
        Self::from_fn(self.n, |x| {
            let mut y = 0u64;
            for (i, &p) in perm.iter().enumerate() {
                y |= ((x >> i) & 1) << p;
            }
            self.get(y)
        })
    }

    /// Lowercase hex of the packed table, most significant index first, with
    /// `max(1, 2^n / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4) as usize;
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = (d * 4) as u64;
            let nibble = (self.words[(bit >> 6) as usize] >> (bit & 63)) & 0xf;
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(n: u32, hex: &str) -> Result<Self> {
        check_arity(n)?;
        let size = 1u64 << n;
        let digits = size.div_ceil(4) as usize;
        if hex.len() != digits {
            return Err(Error::Parse(format!(
                "expected {digits} hex digits for arity {n}, got {}",
                hex.len()
            )));
        }
        let mut f = BooleanFunction {
            n,
            words: vec![0; word_count(n)],
        };
        for (pos, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {ch:?}")))? as u64;
            let bit = ((digits - 1 - pos) * 4) as u64;
            f.words[(bit >> 6) as usize] |= nibble << (bit & 63);
        }
        if f.has_padding_bits() {
            return Err(Error::Parse(format!("hex value sets bits beyond 2^{n} entries")));
        }
        Ok(f)
    }

    fn check_same_arity(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ArityMismatch {
                left: self.n as usize,
                right: other.n as usize,
            });
        }
        Ok(())
    }

    fn padding_mask(&self) -> u64 {
        if self.n >= 6 {
            0
        } else {
            !((1u64 << (1u64 << self.n)) - 1)
        }
    }

    fn clear_padding(&mut self) {
        let pad = self.padding_mask();
        self.words[0] &= !pad;
    }

    fn has_padding_bits(&self) -> bool {
        self.words[0] & self.padding_mask() != 0
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 8 {
            write!(f, "BooleanFunction({}:{})", self.n, self.to_hex())
        } else {
            write!(f, "BooleanFunction({}: weight {})", self.n, self.weight())
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HexTable {
    arity: u32,
    table: String,
}

impl Serialize for BooleanFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HexTable {
            arity: self.n,
            table: self.to_hex(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BooleanFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = HexTable::deserialize(d)?;
        BooleanFunction::from_hex(raw.arity, &raw.table).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::substream;

    fn maj3() -> BooleanFunction {
        BooleanFunction::majority(3).unwrap()
    }

    #[test]
    fn majority_examples() {
        let m = maj3();
        assert_eq!(m.evaluate(0b111).unwrap(), 1);
        assert_eq!(m.evaluate(0b000).unwrap(), -1);
        assert_eq!(m.evaluate(0b011).unwrap(), 1);
        assert_eq!(m.bias(), 0.0);
        assert!(m.is_balanced());
        assert!(matches!(m.evaluate(8), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn majority_one_is_dictator_and_even_ties_go_up() {
        assert_eq!(
            BooleanFunction::majority(1).unwrap(),
            BooleanFunction::dictator(1, 0).unwrap()
        );
        let m2 = BooleanFunction::majority(2).unwrap();
        // x = (+1, −1): bit 0 set, bit 1 clear
        assert_eq!(m2.get(0b01), 1);
        assert_eq!(m2.get(0b10), 1);
        assert_eq!(m2.get(0b00), -1);
        assert!(BooleanFunction::majority(0).is_err());
        assert!(BooleanFunction::majority(23).is_err());
    }

    #[test]
    fn correlation_and_distance_examples() {
        let m = maj3();
        let d = BooleanFunction::dictator(3, 0).unwrap();
        assert_eq!(m.correlation(&m).unwrap(), 1.0);
        assert_eq!(m.correlation(&d).unwrap(), 0.5);
        assert_eq!(m.correlation(&m.negate()).unwrap(), -1.0);
        assert_eq!(m.distance(&m).unwrap(), 0.0);
        assert_eq!(d.distance(&m).unwrap(), 0.25);
        assert_eq!(m.distance(&m.negate()).unwrap(), 1.0);
        let other = BooleanFunction::majority(5).unwrap();
        assert!(matches!(m.correlation(&other), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn small_arity_padding_is_kept_clear() {
        for n in 0..6 {
            let f = BooleanFunction::constant(n, 1).unwrap();
            assert_eq!(f.weight(), 1 << n);
            assert_eq!(f.negate().weight(), 0);
        }
    }

    #[test]
    fn hex_layout_is_msb_first() {
        // MAJ_3 is +1 on indices 3,5,6,7 -> 0b1110_1000
        assert_eq!(maj3().to_hex(), "e8");
        assert_eq!(BooleanFunction::from_hex(3, "e8").unwrap(), maj3());
        assert_eq!(BooleanFunction::constant(0, 1).unwrap().to_hex(), "1");
        assert_eq!(BooleanFunction::dictator(1, 0).unwrap().to_hex(), "2");
        assert!(BooleanFunction::from_hex(1, "4").is_err());
        assert!(BooleanFunction::from_hex(3, "e").is_err());
        assert!(BooleanFunction::from_hex(3, "zz").is_err());
        let mut rng = substream(1, 0, 0);
        let f = BooleanFunction::random(9, &mut rng).unwrap();
        assert_eq!(BooleanFunction::from_hex(9, &f.to_hex()).unwrap(), f);
    }

    #[test]
    fn serde_round_trip() {
        let f = maj3();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"arity":3,"table":"e8"}"#);
        let back: BooleanFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn balanced_samplers_hit_the_middle_layer() {
        let mut rng = substream(2, 0, 0);
        for n in 1..=10 {
            let f = BooleanFunction::random_balanced(n, &mut rng).unwrap();
            assert_eq!(f.weight(), 1 << (n - 1));
            let two = BooleanFunction::random_balanced_two_stage(n, &mut rng).unwrap();
            assert_eq!(two.balanced.weight(), 1 << (n - 1));
            let excess = (2 * two.unbalanced.weight() as i64 - two.unbalanced.len() as i64).unsigned_abs();
            assert_eq!(two.flipped, excess / 2);
            let changed = two.unbalanced.len() - two.unbalanced.agreement_count(&two.balanced).unwrap();
            assert_eq!(changed, two.flipped);
        }
        assert!(BooleanFunction::random_balanced(0, &mut rng).is_err());
    }

    #[test]
    fn gather_bits_packs_in_order() {
        assert_eq!(gather_bits(0b1011_0110, 0b1111_0000), 0b1011);
        assert_eq!(gather_bits(0b101, 0b101), 0b11);
        assert_eq!(gather_bits(0b010, 0b101), 0b00);
    }

    #[test]
    fn permutation_relabels_coordinates() {
        let d0 = BooleanFunction::dictator(3, 0).unwrap();
        let moved = d0.permute_inputs(&[2, 0, 1]).unwrap();
        // new coordinate 1 reads old coordinate 0
        assert_eq!(moved, BooleanFunction::dictator(3, 1).unwrap());
        assert!(d0.permute_inputs(&[0, 0, 1]).is_err());
    }

    #[test]
    fn parity_matches_product_of_coordinates() {
        let p = BooleanFunction::parity(2, 0b11).unwrap();
        assert_eq!(p.get(0b11), 1);
        assert_eq!(p.get(0b00), 1);
        assert_eq!(p.get(0b01), -1);
        assert!(BooleanFunction::parity(2, 0b100).is_err());
    }
}
