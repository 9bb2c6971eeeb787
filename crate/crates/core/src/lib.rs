// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod dense;
pub mod entanglement;
pub mod error;
pub mod modewise;
pub mod rng;
pub mod states;
pub mod symplectic;
pub mod tolerance;
pub mod williamson;

pub use batch::Execution;
pub use dense::RealMatrix;
pub use entanglement::{
    beta_from_lambda, entanglement_entropy, lambda_from_beta, mode_entropy, ppt_entangled,
    ppt_oracle, tmss_schmidt, ThermalParameter,
};
pub use error::{Error, Result};
pub use modewise::{modewise_decompose, reconstruct, Bipartition, ModewiseDecomposition};
pub use symplectic::{random_symplectic, SymplecticMatrix};
pub use tolerance::Tolerances;
pub use williamson::{
    check_physical, isotropy_check, purity_check, symplectic_spectrum, williamson_decompose,
    CovarianceMatrix, SymplecticSpectrum,
};
