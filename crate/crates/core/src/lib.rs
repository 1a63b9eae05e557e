//! Energy-dependent effective Hamiltonians for doorway-form Hamiltonians,
//! in both directions.
//!
//! The full Hamiltonian has a dense `MxM` model block whose last state (the
//! doorway) is the only one coupled to the rest, and the rest is a
//! tridiagonal chain. Projecting onto the model space gives `H_eff(E)`,
//! which differs from the model block in a single entry `G(E) + E`.
//!
//! * [`forward`] evaluates `G(E)` and `H_eff(E)` through a continued
//!   fraction and the `U F L` factorization of the excluded block, with a
//!   dense oracle for checking.
//! * [`inverse`] recovers the chain from `2K + 1` samples of `G`.
//! * [`spectral`] solves the self-consistent model-space eigenproblem.
//! * [`toys`] holds the two-level and `M = 2` worked examples.
//!
//! ```
//! use effham::{forward::g_function, inverse::reconstruct, model::GSample, TridiagonalChain};
//!
//! let chain = TridiagonalChain::new(vec![-2.0, 2.0], vec![-1.0]).unwrap();
//! let samples: Vec<GSample> = [0.0, 1.0, 3.0]
//!     .iter()
//!     .map(|&e| GSample::new(e, g_function(&chain, e).unwrap()))
//!     .collect();
//! let report = reconstruct(&samples, 1, &[]).unwrap();
//! assert!((report.chain.rho[0] + 1.0).abs() < 1e-12);
//! assert_eq!(report.hermitizable, vec![false]);
//! ```

pub mod cli;
pub mod error;
pub mod forward;
pub mod instance;
pub mod inverse;
pub mod model;
pub mod poly;
pub mod spectral;
pub mod toys;

pub use error::{DegeneracyReason, Error, Result};
pub use model::{
    FactorStyle, FactoredChain, GSample, PartitionedHamiltonian, SampleSet, TridiagonalChain,
};
