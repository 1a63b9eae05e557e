//! Seeded random instances and the forward-then-inverse roundtrip experiment.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::inverse::{choose_probe_energies, reconstruct, sample_chain, ReconstructionReport};
use crate::model::{PartitionedHamiltonian, TridiagonalChain};
use crate::spectral::eigenvalues_dense;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CouplingSign {
    #[default]
    Positive,
    Negative,
    Mixed,
}

/// Diagonal entries uniform in `[-3, 3]`, couplings with magnitude uniform
/// in `[0.2, 4]`.
#[derive(Clone, Debug)]
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
    pub sign: CouplingSign,
    pub diag_range: f64,
    pub rho_range: (f64, f64),
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> Self {
        InstanceGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sign: CouplingSign::Positive,
            diag_range: 3.0,
            rho_range: (0.2, 4.0),
        }
    }

    pub fn with_sign(mut self, sign: CouplingSign) -> Self {
        self.sign = sign;
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn chain(&mut self, k: usize) -> TridiagonalChain {
        let d = self.diag_range;
        let a = (0..=k).map(|_| self.rng.gen_range(-d..=d)).collect();
        let (lo, hi) = self.rho_range;
        let rho = (0..k)
            .map(|_| {
                let mag = self.rng.gen_range(lo..=hi);
                let negative = match self.sign {
                    CouplingSign::Positive => false,
                    CouplingSign::Negative => true,
                    CouplingSign::Mixed => self.rng.gen_bool(0.5),
                };
                if negative {
                    -mag
                } else {
                    mag
                }
            })
            .collect();
        TridiagonalChain { a, rho }
    }

    /// Doorway instance with a symmetric model block.
    pub fn hamiltonian(&mut self, m: usize, k: usize) -> PartitionedHamiltonian {
        self.hamiltonian_with(m, k, true)
    }

    pub fn hamiltonian_with(&mut self, m: usize, k: usize, symmetric: bool) -> PartitionedHamiltonian {
        let d = self.diag_range;
        let mut p = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                if symmetric && j < i {
                    p[(i, j)] = p[(j, i)];
                } else {
                    p[(i, j)] = self.rng.gen_range(-d..=d);
                }
            }
        }
        let chain = self.chain(k);
        PartitionedHamiltonian::new(p, chain).expect("generated instance is valid")
    }
}

/// Real parts of eigenvalues of `m` lying within `margin` of the real axis.
pub fn near_real_eigenvalues(m: &DMatrix<f64>, margin: f64) -> Result<Vec<f64>> {
    Ok(eigenvalues_dense(m)?
        .into_iter()
        .filter(|z| z.im.abs() < margin)
        .map(|z| z.re)
        .collect())
}

/// Padding added on each side of the probe window.
pub const WINDOW_PAD: f64 = 0.2;

/// Probe window covering the real parts of the spectra of the chain and of
/// its trailing block, padded by [`WINDOW_PAD`] on each side.
pub fn probe_window(chain: &TridiagonalChain) -> Result<(f64, f64)> {
    let mut values: Vec<f64> = eigenvalues_dense(&chain.to_dense())?
        .into_iter()
        .map(|z| z.re)
        .collect();
    if chain.k() > 0 {
        values.extend(eigenvalues_dense(&chain.trailing_dense())?.iter().map(|z| z.re));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo - WINDOW_PAD, hi + WINDOW_PAD))
}

/// Poles of G on (or near) the real axis: eigenvalues of the trailing block.
pub fn pole_estimates(chain: &TridiagonalChain, margin: f64) -> Result<Vec<f64>> {
    if chain.k() == 0 {
        return Ok(Vec::new());
    }
    near_real_eigenvalues(&chain.trailing_dense(), margin)
}

/// `|x - y| / max(1, |x|)` maximized over all chain entries.
pub fn max_entry_error(truth: &TridiagonalChain, recovered: &TridiagonalChain) -> f64 {
    if truth.a.len() != recovered.a.len() {
        return f64::INFINITY;
    }
    truth
        .a
        .iter()
        .chain(&truth.rho)
        .zip(recovered.a.iter().chain(&recovered.rho))
        .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundtripOutcome {
    pub truth: TridiagonalChain,
    pub probes: Vec<f64>,
    pub report: ReconstructionReport,
    pub max_err: f64,
}

/// Samples G of `chain` at Chebyshev probes in `window` that keep `margin`
/// from the poles, reconstructs, and scores against `holdout` extra energies.
pub fn roundtrip_in_window(
    chain: &TridiagonalChain,
    window: (f64, f64),
    margin: f64,
    holdout: usize,
) -> Result<RoundtripOutcome> {
    let k = chain.k();
    let poles = pole_estimates(chain, margin)?;
    let probes = choose_probe_energies(2 * k + 1, window, &poles, margin)?;
    let samples = sample_chain(chain, &probes)?;
    let held = if holdout > 0 {
        let mut avoid = poles.clone();
        avoid.extend(&probes);
        let energies = choose_probe_energies(holdout, window, &avoid, margin)?;
        sample_chain(chain, &energies)?
    } else {
        Vec::new()
    };
    let report = reconstruct(&samples, k, &held)?;
    let max_err = max_entry_error(chain, &report.chain);
    Ok(RoundtripOutcome {
        truth: chain.clone(),
        probes,
        report,
        max_err,
    })
}

pub fn roundtrip(chain: &TridiagonalChain, margin: f64) -> Result<RoundtripOutcome> {
    roundtrip_in_window(chain, probe_window(chain)?, margin, 0)
}
