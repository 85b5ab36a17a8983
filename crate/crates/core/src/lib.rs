//! Classical and quantum optical coherence tomography of layered, dispersive samples.
//!
//! The crate computes OCT interferograms `I(τ) = Γ₀ + 2Re{Γ(τ)e^{-iω₀τ}}` and
//! QOCT coincidence traces `C(τ) = Λ₀ - Re{Λ(2τ)}` for a sample made of
//! discrete reflecting layers in a medium with polynomial dispersion, together
//! with the Wigner map `Λ(τ, ω₀)` and the reconstruction of the sample transfer
//! function from it.
//!
//! Every engine has a quadrature path (direct frequency integration, any
//! spectrum and dispersion order) and, for Gaussian spectra with second-order
//! dispersion, a closed-form path built from the dispersed source correlation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod measure;
pub mod oct;
pub mod qoct;
pub mod sample;
pub mod spectrum;
pub mod wigner;
pub mod xform;

pub use engine::Path;
pub use error::{Error, Result};
pub use oct::{Interferogram, OctOutput, TraceKind};
pub use qoct::{Contributions, EnsembleResult, EnsembleSpec, PumpSweep};
pub use sample::{DispersionProfile, Layer, LocalExpansion, Sample};
pub use spectrum::{Spectrum, SpectrumShape, SPEED_OF_LIGHT};
pub use wigner::{CenterGrid, TabulatedTransfer, WignerMap};
pub use xform::{DelayGrid, FreqGrid};

pub use num_complex::Complex64;
