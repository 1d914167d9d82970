//! Boolean function analysis and learning over lifted majority classes.
//!
//! The crate is organised bottom-up:
//!
//! * [`boolfn`] and [`fourier`]: bit-packed ±1 truth tables and their Walsh–Hadamard spectra.
//! * [`junta`]: exact junta complexity, α-correlated noise quantities and soft junta bounds.
//! * [`lift`]: compositions `g(f_1, …, f_k)` with balanced inner functions, exact distances and
//!   the concentration / covering experiments.
//! * [`smoothdist`]: κ-smooth distributions over block inputs with certified smoothness.
//! * [`weaklearn`]: the block-table threshold weak learner and the memorizing baseline.
//!
//! Every value is ±1 encoded as `i8`; the tie convention `sign(0) = +1` is used throughout.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boolfn;
mod error;
pub mod fourier;
pub mod junta;
pub mod lift;
pub mod numeric;
pub mod smoothdist;
pub mod weaklearn;

pub use boolfn::{sign, BooleanFunction, TwoStageSample, MAX_ARITY};
pub use error::{Error, Result};
pub use fourier::FourierSpectrum;
pub use junta::{CorrelationVector, DensityDistribution, JuntaCertificate};
pub use lift::{BlockInput, Hypothesis, LiftedFunction, Outer};
pub use smoothdist::{Predicate, SmoothDistribution};
pub use weaklearn::{BlockTables, LabeledSample, ThresholdHypothesis};
