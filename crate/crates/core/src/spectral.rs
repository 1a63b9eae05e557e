//! Spectra of assembled Hamiltonians and the self-consistent model-space
//! eigenproblem `H_eff(eta) phi = E phi`, `eta = E`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forward::{effective_hamiltonian, resolvent_factored, unit_factored};
use crate::model::PartitionedHamiltonian;

pub const MAX_DENSE_DIM: usize = 64;
const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;
const REAL_COLLAPSE: f64 = 1e-10;

/// All eigenvalues of a small dense matrix, ascending by real part then
/// imaginary part. Imaginary parts below `1e-10 * max(1, |m|_max)` are zeroed.
pub fn eigenvalues_dense(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let (n, cols) = m.shape();
    if n != cols {
        return Err(Error::InvalidInput(format!("matrix is {n}x{cols}, not square")));
    }
    if n > MAX_DENSE_DIM {
        return Err(Error::InvalidInput(format!(
            "dense eigenvalues limited to {MAX_DENSE_DIM}x{MAX_DENSE_DIM}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let schur = m
        .clone()
        .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(Error::EigSolverFailure { dim: n })?;
    let scale = m.amax().max(1.0);
    let mut values: Vec<Complex<f64>> = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| {
            if z.im.abs() <= REAL_COLLAPSE * scale {
                Complex::new(z.re, 0.0)
            } else {
                *z
            }
        })
        .collect();
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(values)
}

/// Real eigenvalues only (those reported with zero imaginary part).
pub fn real_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    Ok(eigenvalues_dense(m)?
        .into_iter()
        .filter(|z| z.im == 0.0)
        .map(|z| z.re)
        .collect())
}

/// `det(H_eff(E) - E I_M)`.
pub fn secular_function(h: &PartitionedHamiltonian, energy: f64) -> Result<f64> {
    let heff = effective_hamiltonian(h, energy)?;
    let m = heff.nrows();
    Ok((heff - DMatrix::identity(m, m) * energy).determinant())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfConsistentOptions {
    /// Mixing weight of the new eigenvalue; 1 is plain iteration.
    pub damping: f64,
    pub fp_tol: f64,
    pub max_iter: usize,
    /// Residual bound for the model-space eigenvector, relative to `max(1, |H|_max)`.
    pub res_tol: f64,
}

impl Default for SelfConsistentOptions {
    fn default() -> Self {
        SelfConsistentOptions {
            damping: 0.5,
            fp_tol: 1e-10,
            max_iter: 200,
            res_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfConsistentResult {
    /// One-based level index into the sorted spectrum of `H_eff`.
    pub level_index: usize,
    pub energy: f64,
    pub iterations: usize,
    /// Iterates `eta_0, eta_1, ...`.
    pub trace: Vec<f64>,
    pub eigvec_model: Vec<f64>,
}

fn level_of(h: &PartitionedHamiltonian, eta: f64, n: usize) -> Result<f64> {
    let heff = effective_hamiltonian(h, eta)?;
    let values = eigenvalues_dense(&heff)?;
    let z = values[n - 1];
    if z.im != 0.0 {
        return Err(Error::ComplexLevel {
            level: n,
            energy: eta,
            re: z.re,
            im: z.im,
        });
    }
    Ok(z.re)
}

/// Damped fixed-point iteration `eta <- (1 - d) eta + d E^(n)(eta)` until
/// successive iterates agree to `fp_tol`.
pub fn self_consistent_solve(
    h: &PartitionedHamiltonian,
    eta0: f64,
    n: usize,
    options: &SelfConsistentOptions,
) -> Result<SelfConsistentResult> {
    h.validate().map_err(Error::Validation)?;
    if n == 0 || n > h.m() {
        return Err(Error::InvalidInput(format!(
            "level {n} outside 1..={}",
            h.m()
        )));
    }
    if !(options.damping > 0.0 && options.damping <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "damping {} outside (0, 1]",
            options.damping
        )));
    }
    let energy_independent = h.k() == 0 || h.chain.rho[0] == 0.0;
    let mut trace = vec![eta0];
    let mut eta = eta0;
    let mut converged = false;
    for _ in 0..options.max_iter {
        let level = level_of(h, eta, n)?;
        let next = if energy_independent {
            level
        } else {
            (1.0 - options.damping) * eta + options.damping * level
        };
        trace.push(next);
        let step = (next - eta).abs();
        eta = next;
        if energy_independent || step <= options.fp_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { trace });
    }
    let heff = effective_hamiltonian(h, eta)?;
    let vec = model_eigenvector(&heff, eta);
    let m = heff.nrows();
    let residual = ((&heff - DMatrix::identity(m, m) * eta) * &vec).norm();
    let scale = h.assemble_dense()?.amax().max(1.0);
    if residual > options.res_tol * scale {
        return Err(Error::NonConvergence { trace });
    }
    Ok(SelfConsistentResult {
        level_index: n,
        energy: eta,
        iterations: trace.len() - 1,
        trace,
        eigvec_model: vec.iter().copied().collect(),
    })
}

/// Unit right singular vector of `heff - E` with the smallest singular value.
fn model_eigenvector(heff: &DMatrix<f64>, energy: f64) -> DVector<f64> {
    let m = heff.nrows();
    let shifted = heff - DMatrix::identity(m, m) * energy;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &s)| {
            if s < best.1 {
                (i, s)
            } else {
                best
            }
        });
    let mut v: DVector<f64> = v_t.row(idx).transpose();
    // fix the sign so the largest component is positive
    let imax = v.iamax();
    if v[imax] < 0.0 {
        v = -v;
    }
    v
}

/// Full-space vector `psi = (phi, -(QHQ - E)^{-1} Q H phi)` for a converged
/// model-space pair.
pub fn full_space_eigenvector(
    h: &PartitionedHamiltonian,
    energy: f64,
    phi: &[f64],
) -> Result<DVector<f64>> {
    let m = h.m();
    let k = h.k();
    if phi.len() != m {
        return Err(Error::InvalidInput(format!(
            "model vector has length {}, expected {m}",
            phi.len()
        )));
    }
    let mut psi = DVector::zeros(m + k);
    psi.rows_mut(0, m).copy_from_slice(phi);
    if k > 0 {
        // Q H phi has a single nonzero: the unit subdiagonal entry times phi_M.
        let resolvent = resolvent_factored(&unit_factored(&h.chain)?, energy)?;
        let doorway = phi[m - 1];
        for i in 0..k {
            psi[m + i] = -resolvent[(i, 0)] * doorway;
        }
    }
    Ok(psi)
}

/// Eigenvalues of the full Hamiltonian that also belong to QHQ and are
/// therefore invisible to the model-space problem.
pub fn hidden_levels(h: &PartitionedHamiltonian, tol: f64) -> Result<Vec<Complex<f64>>> {
    let full = eigenvalues_dense(&h.assemble_dense()?)?;
    let q = eigenvalues_dense(&h.qhq())?;
    Ok(full
        .into_iter()
        .filter(|z| q.iter().any(|w| (z - w).norm() <= tol))
        .collect())
}
