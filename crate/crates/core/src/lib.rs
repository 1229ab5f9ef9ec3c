//! Spectral pricing engine for derivatives on realized variance and implied
//! volatility.
//!
//! The underlying forward is a finite-state continuous-time Markov chain: a
//! family of CEV regimes with jumps added by Bochner subordination, blended by
//! a level-dependent regime-switching generator and run on a deterministic
//! financial clock. Realized variance is tracked by lifting the generator with
//! a periodic counting chain; the lifted operator is partial-circulant, so it
//! block-diagonalizes into `2C + 1` shifted copies of the base generator and
//! the joint spot/variance kernel comes out of an inverse DFT over the blocks.
//!
//! Module map:
//! - [`model`]: lattice domains, CEV generators, subordination, regime coupling,
//!   time change and the JSON model config.
//! - [`spectral`]: eigendecomposition-based functional calculus, circulant
//!   spectra and partial-circulant block-diagonalization.
//! - [`lift`]: instantaneous variance, block family and the joint kernel.
//! - [`pricing`]: Europeans, Greeks, forward starts, variance payoffs, the log
//!   contract and the VIX portfolio.
//! - [`mc`]: daily-sampled Monte Carlo used to cross-check the lift.
//!
//! Scalar-agnostic pieces (grids, hat functions, time change, circulant DFT)
//! are generic over [`Real`]; the dense linear algebra and the pricing run in
//! `f64`. The aliases below fix the generic types to `f64`.

pub mod error;
pub mod lift;
pub mod mc;
pub mod model;
pub mod pricing;
pub mod scalar;
pub mod spectral;

#[cfg(test)]
#[path = "../tests/common/oracle.rs"]
pub(crate) mod test_oracle;

pub use error::{Result, VolspecError};
pub use scalar::Real;

pub use lift::{BlockFamily, JointDistribution, LiftParams, VarianceGrid, VariancePdf};
pub use model::{MarkovGenerator, Model, ModelConfig, SwitchGenerator};
pub use spectral::SpectralDecomposition;

/// Forward-price lattice in `f64`.
pub type StateGrid = model::grid::StateGrid<f64>;
/// CEV/jump parameters of one regime in `f64`.
pub type RegimeParams = model::cev::RegimeParams<f64>;
/// Calendar-to-financial clock in `f64`.
pub type TimeChange = model::time_change::TimeChange<f64>;
/// First row of a circulant matrix in `f64`.
pub type CirculantRow = spectral::circulant::CirculantRow<f64>;

/// Complex double used throughout the linear algebra.
pub type C64 = num_complex::Complex<f64>;
