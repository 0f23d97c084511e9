//! Exact diagonalization and Green's functions for a momentum-space Hubbard ring.
//!
//! The pipeline builds a sparse sector Hamiltonian from hopping and on-site
//! parameters, prepares the exact ground state and a factorized unitary
//! coupled-cluster approximation to it, evaluates the zero-temperature
//! retarded Green's function in the time domain for both, and moves to the
//! frequency domain (windowed Fourier transform, Lehmann poles, Dyson
//! self-energy).
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the usual double-precision instantiation.

pub mod cli;
pub mod error;
pub mod fock;
pub mod greens;
pub mod groundstate;
pub mod hamiltonian;
pub mod reference_values;
pub mod scalar;
pub mod sparse;
pub mod spectral;
pub mod state;
pub mod ucc;

pub use error::{Error, Result};
pub use fock::{build_sector, FockState, Ladder, SectorBasis, SectorKey, Spin, Term};
pub use greens::{retarded_gf, Channel, GreensSeries, StateTag, TimeGrid};
pub use groundstate::{
    diagonalize, ground_state, overlap, EigenDecomposition, GroundStateReport, HubbardModel,
};
pub use hamiltonian::{bandstructure, Bandstructure, HubbardParams};
pub use scalar::{Cplx, Real};
pub use sparse::SparseOperator;
pub use spectral::{
    exact_lehmann_gf, fourier_transform, self_energy, FrequencyGrid, FrequencySeries,
};
pub use state::StateVector;
pub use ucc::{prepare_ucc_state, UccAngles};

pub type HubbardParams64 = HubbardParams<f64>;
pub type HubbardModel64 = HubbardModel<f64>;
pub type StateVector64 = StateVector<f64>;
pub type SparseOperator64 = SparseOperator<f64>;
pub type EigenDecomposition64 = EigenDecomposition<f64>;
pub type UccAngles64 = UccAngles<f64>;
pub type TimeGrid64 = TimeGrid<f64>;
pub type GreensSeries64 = GreensSeries<f64>;
pub type FrequencyGrid64 = FrequencyGrid<f64>;
pub type FrequencySeries64 = FrequencySeries<f64>;
