use std::fmt;

use thiserror::Error;

use crate::model::{TridiagonalChain, Violation};

/// Why a sample set could not be linearized.
#[derive(Clone, Debug, PartialEq)]
pub enum DegeneracyReason {
    /// Wrong number of samples for the requested chain length.
    WrongCount { expected: usize, got: usize },
    /// Two probe energies coincide (rank deficiency).
    DuplicateEnergies { first: usize, second: usize },
    /// The coefficient system is singular or too ill-conditioned to trust.
    IllConditioned { condition: f64 },
}

impl fmt::Display for DegeneracyReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegeneracyReason::WrongCount { expected, got } => {
                write!(f, "expected {expected} samples, got {got}")
            }
            DegeneracyReason::DuplicateEnergies { first, second } => {
                write!(f, "samples {first} and {second} share the same energy")
            }
            DegeneracyReason::IllConditioned { condition } => {
                write!(f, "condition estimate {condition:.3e} exceeds limit")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("Validation: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("NotSymmetrizable: negative rho at indices {indices:?}")]
    NotSymmetrizable { indices: Vec<usize> },

    #[error("PoleProximity: pivot breakdown at level {level} (E = {energy})")]
    PoleProximity { level: usize, energy: f64 },

    #[error("NearSingularBlock: condition estimate {condition:.3e}")]
    NearSingularBlock { condition: f64 },

    #[error("EigSolverFailure: dense eigenvalue iteration did not converge ({dim}x{dim})")]
    EigSolverFailure { dim: usize },

    #[error("NonConvergence: no fixed point after {} iterates", .trace.len())]
    NonConvergence { trace: Vec<f64> },

    #[error("ComplexLevel: level {level} of H_eff({energy}) is complex ({re} + {im}i)")]
    ComplexLevel {
        level: usize,
        energy: f64,
        re: f64,
        im: f64,
    },

    #[error("InfeasibleSampling: {0}")]
    InfeasibleSampling(String),

    #[error("SampleDegeneracy: {0}")]
    SampleDegeneracy(DegeneracyReason),

    #[error("MalformedPair: {0}")]
    MalformedPair(String),

    #[error("ChainBreakdown: coupling vanishes after level {level}")]
    ChainBreakdown {
        level: usize,
        recovered_prefix: TridiagonalChain,
    },

    #[error("InvalidInput: {0}")]
    InvalidInput(String),

    #[error("Io: {0}")]
    Io(#[from] std::io::Error),

    #[error("Json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical failures rooted in the data rather than in files or usage.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::NotSymmetrizable { .. }
                | Error::PoleProximity { .. }
                | Error::NearSingularBlock { .. }
                | Error::EigSolverFailure { .. }
                | Error::NonConvergence { .. }
                | Error::ComplexLevel { .. }
                | Error::InfeasibleSampling(_)
                | Error::SampleDegeneracy(_)
                | Error::MalformedPair(_)
                | Error::ChainBreakdown { .. }
        )
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
