//! The direct problem: from a doorway-form Hamiltonian to `H_eff(E)`.
//!
//! Levels `1..=K` of the chain form the excluded-space block QHQ. Its
//! shifted form `Q(H - E)Q` factors as `U F L` with unit bidiagonal `U`, `L`
//! and diagonal `F = diag(1/f_k)`, where the reciprocal pivots `f_k` come
//! from a downward continued-fraction recursion. Extending that recursion
//! one step to the doorway level gives the scalar `G(E) = 1/f_0(E)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{
    refactorize, validate_chain, FactorStyle, FactoredChain, PartitionedHamiltonian,
    TridiagonalChain,
};

/// Relative pivot threshold below which the recursion is declared to sit on a pole.
pub const PIVOT_TOL: f64 = 1e-12;

/// Condition-number limit for the dense oracle's linear solve.
pub const ORACLE_CONDITION_LIMIT: f64 = 1e12;

/// Output of [`continued_fraction`].
///
/// `f[i]` is `f_{i+1}` for `i = 0..=K`, so the last entry is `f_{K+1} = 0`.
/// `pivots[i]` is `1 / f_{i+1}` as computed, before inversion.
/// `alpha[i]` is `alpha_{i+2} = -b_{i+1} f_{i+2}` and `beta[i]` is
/// `beta_{i+2} = -c_{i+2} f_{i+2}`, both for `i = 0..K-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFractionState {
    pub energy: f64,
    pub f: Vec<f64>,
    pub pivots: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl ContinuedFractionState {
    pub fn k(&self) -> usize {
        self.pivots.len()
    }
}

fn checked_pivot(a: f64, energy: f64, coupling: f64, level: usize) -> Result<f64> {
    let pivot = a - energy - coupling;
    let scale = a.abs() + energy.abs() + coupling.abs() + 1.0;
    if pivot.abs() < PIVOT_TOL * scale || !pivot.is_finite() {
        return Err(Error::PoleProximity { level, energy });
    }
    Ok(pivot)
}

/// Downward recursion `f_k = 1/(a_k - E - b_k f_{k+1} c_{k+1})` for
/// `k = K..1` with `f_{K+1} = 0`. Level 0 of `chain` is ignored.
pub fn continued_fraction(chain: &FactoredChain, energy: f64) -> Result<ContinuedFractionState> {
    let k = chain.k();
    if k == 0 {
        return Err(Error::InvalidInput(
            "continued fraction needs at least one excluded level".into(),
        ));
    }
    if !energy.is_finite() {
        return Err(Error::InvalidInput(format!("energy {energy} is not finite")));
    }
    let mut f = vec![0.0; k + 1];
    let mut pivots = vec![0.0; k];
    for level in (1..=k).rev() {
        let coupling = if level == k {
            0.0
        } else {
            chain.b[level] * f[level] * chain.c[level]
        };
        let pivot = checked_pivot(chain.a[level], energy, coupling, level)?;
        pivots[level - 1] = pivot;
        f[level - 1] = 1.0 / pivot;
    }
    let alpha = (1..k).map(|j| -chain.b[j] * f[j]).collect();
    let beta = (1..k).map(|j| -chain.c[j] * f[j]).collect();
    Ok(ContinuedFractionState {
        energy,
        f,
        pivots,
        alpha,
        beta,
    })
}

/// Bidiagonal and diagonal factors of `Q(H - E)Q = U F L`.
///
/// `u_super[i] = b_{i+1} f_{i+2}`, `f_diag[i] = 1/f_{i+1}`,
/// `l_sub[i] = f_{i+2} c_{i+2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct UFLFactors {
    pub u_super: Vec<f64>,
    pub f_diag: Vec<f64>,
    pub l_sub: Vec<f64>,
}

impl UFLFactors {
    pub fn upper(&self) -> DMatrix<f64> {
        let k = self.f_diag.len();
        let mut u = DMatrix::identity(k, k);
        for (i, &x) in self.u_super.iter().enumerate() {
            u[(i, i + 1)] = x;
        }
        u
    }

    pub fn diagonal(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.f_diag))
    }

    pub fn lower(&self) -> DMatrix<f64> {
        let k = self.f_diag.len();
        let mut l = DMatrix::identity(k, k);
        for (i, &x) in self.l_sub.iter().enumerate() {
            l[(i + 1, i)] = x;
        }
        l
    }

    pub fn product(&self) -> DMatrix<f64> {
        self.upper() * self.diagonal() * self.lower()
    }
}

pub fn ufl_factorize(chain: &FactoredChain, energy: f64) -> Result<UFLFactors> {
    let state = continued_fraction(chain, energy)?;
    let k = state.k();
    Ok(UFLFactors {
        u_super: (1..k).map(|j| chain.b[j] * state.f[j]).collect(),
        f_diag: state.pivots.clone(),
        l_sub: (1..k).map(|j| state.f[j] * chain.c[j]).collect(),
    })
}

/// `[Q(H - E)Q]^{-1}` assembled as `L^{-1} F^{-1} U^{-1}` from the
/// cumulative products of `alpha` and `beta`.
///
/// The resolvent in `H_eff` is `Q/(E - QHQ)`, the negative of this matrix.
pub fn resolvent_factored(chain: &FactoredChain, energy: f64) -> Result<DMatrix<f64>> {
    let state = continued_fraction(chain, energy)?;
    let k = state.k();
    // U^{-1}[i][j] = alpha_{i+2} ... alpha_{j+1} for j >= i
    let mut u_inv = DMatrix::identity(k, k);
    for i in 0..k {
        let mut prod = 1.0;
        for j in i + 1..k {
            prod *= state.alpha[j - 1];
            u_inv[(i, j)] = prod;
        }
    }
    // L^{-1}[i][j] = beta_{i+1} ... beta_{j+2} for i >= j
    let mut l_inv = DMatrix::identity(k, k);
    for j in 0..k {
        let mut prod = 1.0;
        for i in j + 1..k {
            prod *= state.beta[i - 1];
            l_inv[(i, j)] = prod;
        }
    }
    let mut out = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = 0.0;
            for m in 0..=i.min(j) {
                acc += l_inv[(i, m)] * state.f[m] * u_inv[(m, j)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Reciprocal pivots of the unit-subdiagonal chain at levels `1..=K`,
/// returning `f_1` (zero when `K = 0`).
fn first_reciprocal_pivot(chain: &TridiagonalChain, energy: f64) -> Result<f64> {
    let k = chain.k();
    let mut f_next = 0.0;
    for level in (1..=k).rev() {
        let coupling = if level == k {
            0.0
        } else {
            chain.rho[level] * f_next
        };
        f_next = 1.0 / checked_pivot(chain.a[level], energy, coupling, level)?;
    }
    Ok(f_next)
}

/// `G(E) = a_0 - E - rho_0 f_1(E)`.
pub fn g_function(chain: &TridiagonalChain, energy: f64) -> Result<f64> {
    validate_chain(chain).map_err(Error::Validation)?;
    if !energy.is_finite() {
        return Err(Error::InvalidInput(format!("energy {energy} is not finite")));
    }
    if chain.k() == 0 {
        return Ok(chain.a[0] - energy);
    }
    let f1 = first_reciprocal_pivot(chain, energy)?;
    Ok(chain.a[0] - energy - chain.rho[0] * f1)
}

/// `H_eff(E)`: the model block with its doorway entry replaced by `G(E) + E`.
pub fn effective_hamiltonian(h: &PartitionedHamiltonian, energy: f64) -> Result<DMatrix<f64>> {
    h.validate().map_err(Error::Validation)?;
    let g = g_function(&h.chain, energy)?;
    let m = h.m();
    let mut out = h.p_block.clone();
    out[(m - 1, m - 1)] = g + energy;
    Ok(out)
}

/// Dense evaluation of `G(E) = H_MM - E + [H Q (E - QHQ)^{-1} Q H]_MM`
/// straight from the assembled matrix. Test oracle only.
pub fn g_function_dense_oracle(h: &PartitionedHamiltonian, energy: f64) -> Result<f64> {
    let full = h.assemble_dense()?;
    let m = h.m();
    let k = h.k();
    let doorway = m - 1;
    let g0 = full[(doorway, doorway)] - energy;
    if k == 0 {
        return Ok(g0);
    }
    let qhq = full.view((m, m), (k, k)).into_owned();
    let shifted = DMatrix::identity(k, k) * energy - qhq;
    let inverse = shifted
        .clone()
        .try_inverse()
        .ok_or(Error::NearSingularBlock {
            condition: f64::INFINITY,
        })?;
    let condition = norm_one(&shifted) * norm_one(&inverse);
    if !condition.is_finite() || condition > ORACLE_CONDITION_LIMIT {
        return Err(Error::NearSingularBlock { condition });
    }
    let row = full.view((doorway, m), (1, k)).into_owned();
    let col = full.view((m, doorway), (k, 1)).into_owned();
    let x = shifted
        .lu()
        .solve(&col)
        .ok_or(Error::NearSingularBlock { condition })?;
    Ok(g0 + (row * x)[(0, 0)])
}

/// Maximum absolute column sum.
pub(crate) fn norm_one(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// The chain in unit-subdiagonal factorization, for use with the factored routines.
pub fn unit_factored(chain: &TridiagonalChain) -> Result<FactoredChain> {
    refactorize(chain, FactorStyle::UnitSubdiagonal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factored(a: &[f64], b: &[f64], c: &[f64]) -> FactoredChain {
        FactoredChain {
            a: a.to_vec(),
            b: b.to_vec(),
            c: c.to_vec(),
        }
    }

    fn chain(a: &[f64], rho: &[f64]) -> TridiagonalChain {
        TridiagonalChain::new(a.to_vec(), rho.to_vec()).unwrap()
    }

    #[test]
    fn single_level() {
        let s = continued_fraction(&factored(&[0.0, 2.0], &[1.0], &[1.0]), 0.0).unwrap();
        assert_eq!(s.f, vec![0.5, 0.0]);
        assert!(s.alpha.is_empty() && s.beta.is_empty());
    }

    #[test]
    fn exact_breakdown_is_reported() {
        let err = continued_fraction(&factored(&[0.0, 1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]), 0.0)
            .unwrap_err();
        assert!(matches!(err, Error::PoleProximity { level: 1, .. }));
    }

    #[test]
    fn two_level_values() {
        let ch = factored(&[0.0, 2.0, 3.0], &[1.0, 1.0], &[1.0, 1.0]);
        let s = continued_fraction(&ch, 0.0).unwrap();
        assert!((s.f[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.f[0] - 3.0 / 5.0).abs() < 1e-15);
        assert_eq!(s.f[2], 0.0);

        let ufl = ufl_factorize(&ch, 0.0).unwrap();
        assert!((ufl.f_diag[0] - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(ufl.f_diag[1], 3.0);
        assert!((ufl.u_super[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((ufl.l_sub[0] - 1.0 / 3.0).abs() < 1e-15);
        let p = ufl.product();
        let expected = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        assert!((p - expected).amax() < 1e-15);

        let r = resolvent_factored(&ch, 0.0).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.6, -0.2, -0.2, 0.4]);
        assert!((r - expected).amax() < 1e-15);
    }

    #[test]
    fn one_by_one_factorization() {
        let ch = factored(&[0.0, 2.0], &[1.0], &[1.0]);
        let ufl = ufl_factorize(&ch, 0.5).unwrap();
        assert_eq!(ufl.upper(), DMatrix::identity(1, 1));
        assert_eq!(ufl.lower(), DMatrix::identity(1, 1));
        assert_eq!(ufl.product()[(0, 0)], 1.5);
        assert_eq!(resolvent_factored(&ch, 0.0).unwrap()[(0, 0)], 0.5);
    }

    #[test]
    fn g_examples() {
        let ch = chain(&[-2.0, 2.0], &[-1.0]);
        assert_eq!(g_function(&ch, 0.0).unwrap(), -1.5);
        assert_eq!(g_function(&ch, 1.0).unwrap(), -2.0);
        assert_eq!(g_function(&ch, 3.0).unwrap(), -6.0);
        assert!(matches!(
            g_function(&ch, 2.0),
            Err(Error::PoleProximity { level: 1, .. })
        ));
        let decoupled = chain(&[0.7, 1.0, -2.0], &[0.0, 0.0]);
        assert_eq!(g_function(&decoupled, 0.3).unwrap(), 0.7 - 0.3);
        assert_eq!(g_function(&chain(&[4.0], &[]), 1.0).unwrap(), 3.0);
    }

    #[test]
    fn dense_oracle_examples() {
        let h = PartitionedHamiltonian::from_chain(chain(&[-2.0, 2.0], &[-1.0])).unwrap();
        assert!((g_function_dense_oracle(&h, 0.0).unwrap() + 1.5).abs() < 1e-15);
        assert!((g_function_dense_oracle(&h, 1.0).unwrap() + 2.0).abs() < 1e-15);
        assert!(matches!(
            g_function_dense_oracle(&h, 2.0),
            Err(Error::NearSingularBlock { .. })
        ));
        let h0 = PartitionedHamiltonian::from_chain(chain(&[0.5, 1.0], &[0.0])).unwrap();
        assert_eq!(g_function_dense_oracle(&h0, 2.0).unwrap(), -1.5);
    }

    #[test]
    fn effective_hamiltonian_m1_and_k0() {
        let h = PartitionedHamiltonian::from_chain(chain(&[-2.0, 2.0], &[-1.0])).unwrap();
        let heff = effective_hamiltonian(&h, 0.0).unwrap();
        assert_eq!(heff, DMatrix::from_element(1, 1, -1.5));

        let p = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let h = PartitionedHamiltonian::new(p.clone(), chain(&[4.0], &[])).unwrap();
        for e in [-3.0, 0.0, 2.5] {
            assert_eq!(effective_hamiltonian(&h, e).unwrap(), p);
        }
    }

    #[test]
    fn effective_hamiltonian_m2_against_dense() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 0.0]);
        let h = PartitionedHamiltonian::new(p, chain(&[0.5, -1.0], &[2.0])).unwrap();
        for e in [-2.0, 0.0, 0.7, 3.0] {
            let heff = effective_hamiltonian(&h, e).unwrap();
            let oracle = g_function_dense_oracle(&h, e).unwrap() + e;
            assert!((heff[(1, 1)] - oracle).abs() < 1e-10);
            assert_eq!(heff[(0, 1)], 2.0);
        }
    }
}
