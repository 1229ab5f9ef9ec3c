//! Functional calculus through eigendecomposition, circulant spectra and the
//! partial-circulant block-diagonalization.

pub mod circulant;
pub mod decomposition;
pub mod partial;

pub use circulant::{circulant_spectrum, eigenvector, eigenvector_entry, CirculantRow};
pub use decomposition::{
    apply_function, diagonalize, diagonalize_real, transition_kernel, KernelDiagnostics,
    SpectralDecomposition, TransitionKernel,
};
pub use partial::{block_diagonalize, PartialCirculant};
