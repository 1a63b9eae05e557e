//! Two worked small examples.
//!
//! The two-level case reconstructs a `2x2` Hamiltonian from its two
//! eigenvalues alone. The `M = 2` case shows how a reconstruction hinges on
//! the guessed G(E): any guess that reproduces two measured levels yields a
//! `3x3` Hamiltonian, but only the guess consistent with the doorway
//! structure fixes the third level.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::{g_function, PIVOT_TOL};
use crate::inverse::{k1_closed_form, K1Variables};
use crate::model::{GSample, PartitionedHamiltonian, TridiagonalChain};
use crate::spectral::real_eigenvalues;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelInput {
    /// First measured level `E^(1)`.
    pub x: f64,
    /// Second measured level `E^(2)`.
    pub y: f64,
    /// Free diagonal parameter of the reconstructed matrix.
    pub a: f64,
}

/// `[[a, varrho], [1, -a]]` in the energy frame centred on `(X + Y)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoLevelReconstruction {
    /// Energy origin moved to the mean level; add it back for the original frame.
    pub shift: f64,
    /// Upper level in the centred frame, `X - shift`.
    pub half_gap: f64,
    pub a: f64,
    pub d: f64,
    pub varrho: f64,
    pub matrix: [[f64; 2]; 2],
}

impl TwoLevelReconstruction {
    /// The same matrix with the shift restored on the diagonal.
    pub fn uncentered(&self) -> DMatrix<f64> {
        let m = &self.matrix;
        DMatrix::from_row_slice(
            2,
            2,
            &[m[0][0] + self.shift, m[0][1], m[1][0], m[1][1] + self.shift],
        )
    }

    pub fn centered(&self) -> DMatrix<f64> {
        let m = &self.matrix;
        DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
    }

    /// `b = c = sqrt(varrho)` exists only when `a^2 < X^2`.
    pub fn is_symmetrizable(&self) -> bool {
        self.varrho >= 0.0
    }
}

pub fn two_level_reconstruct(input: &TwoLevelInput) -> Result<TwoLevelReconstruction> {
    let TwoLevelInput { x, y, a } = *input;
    if !(x.is_finite() && y.is_finite() && a.is_finite()) {
        return Err(Error::InvalidInput("two-level input must be finite".into()));
    }
    if x == y {
        return Err(Error::InvalidInput(format!("levels coincide at {x}")));
    }
    let shift = 0.5 * (x + y);
    let half_gap = x - shift;
    let varrho = half_gap * half_gap - a * a;
    Ok(TwoLevelReconstruction {
        shift,
        half_gap,
        a,
        d: -a,
        varrho,
        matrix: [[a, varrho], [1.0, -a]],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct M2ToyInput {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl M2ToyInput {
    /// `B C != 0`: the model block actually couples to the doorway.
    pub fn is_coupled(&self) -> bool {
        self.b * self.c != 0.0
    }
}

/// `G(E) = B C / (A - E)`, the value G must take at any level of the
/// `M = 2` model for `det(H_eff(E) - E) = 0`.
pub fn m2_g_closed_form(input: &M2ToyInput, energy: f64) -> Result<f64> {
    let denom = input.a - energy;
    if denom.abs() < PIVOT_TOL * (input.a.abs() + energy.abs() + 1.0) {
        return Err(Error::PoleProximity { level: 0, energy });
    }
    Ok(input.b * input.c / denom)
}

/// Demo configuration: a known `3x3` doorway Hamiltonian, a perturbation
/// size for the wrong guess, and the probe energy that is not a level.
#[derive(Clone, Debug, PartialEq)]
pub struct ParadoxSetup {
    pub model: M2ToyInput,
    pub chain: TridiagonalChain,
    pub epsilon: f64,
    /// Extra probe; `None` takes the midpoint of the two measured levels.
    pub third_probe: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GuessOutcome {
    pub label: &'static str,
    pub samples: Vec<GSample>,
    pub chain: TridiagonalChain,
    pub spectrum: Vec<f64>,
    /// Largest distance from any original level to the reconstructed spectrum.
    pub spectral_mismatch: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParadoxReport {
    pub original_spectrum: Vec<f64>,
    /// The two levels treated as measured input.
    pub measured: [f64; 2],
    /// `G(E_l)` versus `B C / (A - E_l)` at the measured levels.
    pub closed_form_check: [(f64, f64); 2],
    pub lucky: GuessOutcome,
    pub wrong: GuessOutcome,
}

/// Reconstructs the `K = 1` tail twice from G sampled at the two measured
/// levels plus one extra probe: once with the true G and once with
/// `G + epsilon (E - E_-)(E - E_+)`, which agrees at both levels.
pub fn m2_paradox(setup: &ParadoxSetup) -> Result<ParadoxReport> {
    if setup.chain.k() != 1 {
        return Err(Error::InvalidInput("paradox demo needs a K = 1 chain".into()));
    }
    if !setup.model.is_coupled() {
        return Err(Error::InvalidInput("paradox demo needs B C != 0".into()));
    }
    let h = m2_hamiltonian(&setup.model, &setup.chain)?;
    let original = real_eigenvalues(&h.assemble_dense()?)?;
    if original.len() != 3 {
        return Err(Error::InvalidInput(
            "paradox demo needs a real three-level spectrum".into(),
        ));
    }
    let measured = [original[0], original[1]];
    let mut closed_form_check = [(0.0, 0.0); 2];
    for (slot, &e) in closed_form_check.iter_mut().zip(&measured) {
        *slot = (g_function(&setup.chain, e)?, m2_g_closed_form(&setup.model, e)?);
    }
    let third = setup
        .third_probe
        .unwrap_or(0.5 * (measured[0] + measured[1]));
    let probes = [measured[0], measured[1], third];

    let truth = |e: f64| g_function(&setup.chain, e);
    let eps = setup.epsilon;
    let perturbed = |e: f64| Ok(truth(e)? + eps * (e - measured[0]) * (e - measured[1]));

    let lucky = guess_outcome("lucky", &probes, &setup.model, &original, truth)?;
    let wrong = guess_outcome("wrong", &probes, &setup.model, &original, perturbed)?;
    Ok(ParadoxReport {
        original_spectrum: original,
        measured,
        closed_form_check,
        lucky,
        wrong,
    })
}

/// The `3x3` Hamiltonian `[[A, B, 0], [C, a0, rho0], [0, 1, a1]]`.
pub fn m2_hamiltonian(model: &M2ToyInput, chain: &TridiagonalChain) -> Result<PartitionedHamiltonian> {
    let a0 = chain.a.first().copied().unwrap_or(f64::NAN);
    let p = DMatrix::from_row_slice(2, 2, &[model.a, model.b, model.c, a0]);
    PartitionedHamiltonian::new(p, chain.clone())
}

fn guess_outcome(
    label: &'static str,
    probes: &[f64; 3],
    model: &M2ToyInput,
    original: &[f64],
    guess: impl Fn(f64) -> Result<f64>,
) -> Result<GuessOutcome> {
    let samples = probes
        .iter()
        .map(|&e| Ok(GSample::new(e, guess(e)?)))
        .collect::<Result<Vec<_>>>()?;
    let chain = k1_closed_form(&samples)?;
    let h = m2_hamiltonian(model, &chain)?;
    let spectrum = real_eigenvalues(&h.assemble_dense()?)?;
    let spectral_mismatch = original
        .iter()
        .map(|e| {
            spectrum
                .iter()
                .map(|s| (s - e).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(GuessOutcome {
        label,
        samples,
        chain,
        spectrum,
        spectral_mismatch,
    })
}

/// The `K = 1` variables of a chain, for printing alongside the demos.
pub fn k1_summary(chain: &TridiagonalChain) -> Result<K1Variables> {
    K1Variables::from_chain(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigenvalues_dense;

    fn two_level(x: f64, a: f64) -> TwoLevelReconstruction {
        two_level_reconstruct(&TwoLevelInput { x, y: -x, a }).unwrap()
    }

    #[test]
    fn two_level_examples() {
        let r = two_level(1.0, 0.0);
        assert_eq!(r.matrix, [[0.0, 1.0], [1.0, 0.0]]);
        let r = two_level(2.0, 1.0);
        assert_eq!(r.matrix, [[1.0, 3.0], [1.0, -1.0]]);
        let ev = eigenvalues_dense(&r.centered()).unwrap();
        assert!((ev[0].re + 2.0).abs() < 1e-14 && (ev[1].re - 2.0).abs() < 1e-14);

        let r = two_level(1.0, 2.0);
        assert_eq!(r.varrho, -3.0);
        assert!(!r.is_symmetrizable());
        let ev = eigenvalues_dense(&r.centered()).unwrap();
        assert!((ev[0].re + 1.0).abs() < 1e-14 && (ev[1].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_level_recentres() {
        let r = two_level_reconstruct(&TwoLevelInput {
            x: 5.0,
            y: 1.0,
            a: 0.5,
        })
        .unwrap();
        assert_eq!(r.shift, 3.0);
        assert_eq!(r.half_gap, 2.0);
        let ev = eigenvalues_dense(&r.uncentered()).unwrap();
        assert!((ev[0].re - 1.0).abs() < 1e-14 && (ev[1].re - 5.0).abs() < 1e-14);
        assert!(two_level_reconstruct(&TwoLevelInput { x: 1.0, y: 1.0, a: 0.0 }).is_err());
    }

    #[test]
    fn m2_closed_form_examples() {
        let m = M2ToyInput { a: 1.0, b: 2.0, c: 3.0 };
        assert_eq!(m2_g_closed_form(&m, 0.0).unwrap(), 6.0);
        assert!(matches!(
            m2_g_closed_form(&m, 1.0),
            Err(Error::PoleProximity { .. })
        ));
        let uncoupled = M2ToyInput { a: 1.0, b: 0.0, c: 3.0 };
        assert!(!uncoupled.is_coupled());
        for e in [-1.0, 0.5, 7.0] {
            assert_eq!(m2_g_closed_form(&uncoupled, e).unwrap(), 0.0);
        }
    }

    #[test]
    fn closed_form_agrees_with_g_on_levels_only() {
        let model = M2ToyInput { a: 1.0, b: 2.0, c: 3.0 };
        let chain = TridiagonalChain::new(vec![0.5, -1.0], vec![2.0]).unwrap();
        let h = m2_hamiltonian(&model, &chain).unwrap();
        for e in real_eigenvalues(&h.assemble_dense().unwrap()).unwrap() {
            let g = g_function(&chain, e).unwrap();
            assert!((g - m2_g_closed_form(&model, e).unwrap()).abs() < 1e-9);
        }
        let off = 0.123;
        let g = g_function(&chain, off).unwrap();
        assert!((g - m2_g_closed_form(&model, off).unwrap()).abs() > 1e-3);
    }

    #[test]
    fn paradox_lucky_is_isospectral_wrong_is_not() {
        let setup = ParadoxSetup {
            model: M2ToyInput { a: 1.0, b: 1.0, c: 1.0 },
            chain: TridiagonalChain::new(vec![0.0, 3.0], vec![1.0]).unwrap(),
            epsilon: 0.5,
            third_probe: None,
        };
        let r = m2_paradox(&setup).unwrap();
        assert!(r.lucky.spectral_mismatch < 1e-9);
        for (g, closed) in r.closed_form_check {
            assert!((g - closed).abs() < 1e-9);
        }
        // measured levels survive the wrong guess, the third does not
        for e in r.measured {
            assert!(r.wrong.spectrum.iter().any(|s| (s - e).abs() < 1e-9));
        }
        assert!(r.wrong.spectral_mismatch > 1e-3);
    }
}
