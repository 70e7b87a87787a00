//! Antisymmetric-subspace maps, Choi-matrix certificates and entanglement
//! bounds for bipartite `d`-level systems.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the double-precision types used by the CLI and the test suites.

pub mod antisym;
pub mod bounds;
pub mod budget;
pub mod certificates;
pub mod channel;
pub mod cli;
pub mod ef;
pub mod error;
pub mod linalg;
pub mod report;
pub mod sampler;
pub mod scalar;
pub mod state;

pub use budget::SizeBudget;
pub use error::{Error, Result};
pub use scalar::Real;

pub use antisym::AntisymBasis;
pub use channel::{ChannelMap, ChoiMatrix, CpCertificate};
pub use linalg::{CMatrix, DimSignature, Spectrum};
pub use state::{DensityMatrix, Ket};

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;

pub type CMatrix64 = CMatrix<f64>;
pub type CMatrix32 = CMatrix<f32>;
pub type Ket64 = Ket<f64>;
pub type Ket32 = Ket<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type ChannelMap64 = ChannelMap<f64>;
pub type ChannelMap32 = ChannelMap<f32>;
pub type Spectrum64 = Spectrum<f64>;
