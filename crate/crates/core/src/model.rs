//! Domain types: the tridiagonal chain, the doorway-form Hamiltonian that
//! embeds it, factored off-diagonals, and sampled values of G(E).
//!
//! Index conventions are zero-based throughout. The model space occupies
//! rows `0..M`, the doorway state is row `M - 1`, and chain level `k` sits
//! at row `M - 1 + k`, so chain level 0 coincides with the doorway.

use std::fmt;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The tail `S^(K)` of the Hamiltonian with its subdiagonal fixed at one.
///
/// `a` holds the K+1 diagonal entries, `rho` the K superdiagonal entries.
/// Only the products `rho[k] = b_k c_{k+1}` are identifiable from G(E), so
/// this gauge is the canonical form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalChain {
    pub a: Vec<f64>,
    pub rho: Vec<f64>,
}

/// A broken invariant reported by [`validate_chain`] or
/// [`PartitionedHamiltonian::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EmptyDiagonal,
    LengthMismatch { a_len: usize, rho_len: usize },
    NonFinite { field: &'static str, index: usize },
    EmptyModelSpace,
    BlockNotSquare { rows: usize, cols: usize },
    DoorwayMismatch { block: f64, chain: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDiagonal => write!(f, "chain has no diagonal entries"),
            Violation::LengthMismatch { a_len, rho_len } => write!(
                f,
                "length mismatch: {a_len} diagonal entries need {} couplings, got {rho_len}",
                a_len.saturating_sub(1)
            ),
            Violation::NonFinite { field, index } => {
                write!(f, "non-finite entry {field}[{index}]")
            }
            Violation::EmptyModelSpace => write!(f, "model space must have M >= 1"),
            Violation::BlockNotSquare { rows, cols } => {
                write!(f, "p_block is {rows}x{cols}, expected square")
            }
            Violation::DoorwayMismatch { block, chain } => write!(
                f,
                "p_block[M,M] = {block} disagrees with chain a_0 = {chain}"
            ),
        }
    }
}

pub type ValidationResult = std::result::Result<(), Vec<Violation>>;

/// Checks the chain invariants without failing fast; every violation is listed.
pub fn validate_chain(chain: &TridiagonalChain) -> ValidationResult {
    let mut violations = Vec::new();
    if chain.a.is_empty() {
        violations.push(Violation::EmptyDiagonal);
    } else if chain.rho.len() + 1 != chain.a.len() {
        violations.push(Violation::LengthMismatch {
            a_len: chain.a.len(),
            rho_len: chain.rho.len(),
        });
    }
    for (index, x) in chain.a.iter().enumerate() {
        if !x.is_finite() {
            violations.push(Violation::NonFinite { field: "a", index });
        }
    }
    for (index, x) in chain.rho.iter().enumerate() {
        if !x.is_finite() {
            violations.push(Violation::NonFinite { field: "rho", index });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

impl TridiagonalChain {
    pub fn new(a: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        let chain = TridiagonalChain { a, rho };
        validate_chain(&chain).map_err(Error::Validation)?;
        Ok(chain)
    }

    /// Number of excluded-space levels, `K = len(a) - 1`.
    pub fn k(&self) -> usize {
        self.a.len().saturating_sub(1)
    }

    /// Dense `(K+1)x(K+1)` matrix of the chain: `a` on the diagonal, `rho`
    /// above it, ones below it.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.a.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.a[i]
            } else if j == i + 1 {
                self.rho[i]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Levels `1..=K` as a dense `KxK` matrix, i.e. the QHQ block.
    pub fn trailing_dense(&self) -> DMatrix<f64> {
        let k = self.k();
        DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                self.a[i + 1]
            } else if j == i + 1 {
                self.rho[i + 1]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Same chain with every diagonal entry shifted by `s`.
    pub fn shifted(&self, s: f64) -> TridiagonalChain {
        TridiagonalChain {
            a: self.a.iter().map(|x| x + s).collect(),
            rho: self.rho.clone(),
        }
    }
}

/// The full `NxN` Hamiltonian in doorway form.
///
/// `p_block` is the dense model-space block. Its last diagonal entry
/// duplicates `chain.a[0]`; the chain is authoritative and
/// [`PartitionedHamiltonian::new`] copies it into the block.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionedHamiltonian {
    pub p_block: DMatrix<f64>,
    pub chain: TridiagonalChain,
}

impl PartitionedHamiltonian {
    pub fn new(mut p_block: DMatrix<f64>, chain: TridiagonalChain) -> Result<Self> {
        let m = p_block.nrows();
        if m >= 1 && p_block.ncols() == m && !chain.a.is_empty() {
            p_block[(m - 1, m - 1)] = chain.a[0];
        }
        let h = PartitionedHamiltonian { p_block, chain };
        h.validate().map_err(Error::Validation)?;
        Ok(h)
    }

    /// `M = 1` instance where the whole Hamiltonian is the chain.
    pub fn from_chain(chain: TridiagonalChain) -> Result<Self> {
        let a0 = chain.a.first().copied().unwrap_or(f64::NAN);
        Self::new(DMatrix::from_element(1, 1, a0), chain)
    }

    pub fn m(&self) -> usize {
        self.p_block.nrows()
    }

    pub fn k(&self) -> usize {
        self.chain.k()
    }

    pub fn n(&self) -> usize {
        self.m() + self.k()
    }

    pub fn validate(&self) -> ValidationResult {
        let mut violations = match validate_chain(&self.chain) {
            Ok(()) => Vec::new(),
            Err(v) => v,
        };
        let (rows, cols) = self.p_block.shape();
        if rows == 0 {
            violations.push(Violation::EmptyModelSpace);
        } else if rows != cols {
            violations.push(Violation::BlockNotSquare { rows, cols });
        } else {
            for (index, x) in self.p_block.iter().enumerate() {
                if !x.is_finite() {
                    violations.push(Violation::NonFinite {
                        field: "p_block",
                        index,
                    });
                }
            }
            if let Some(&a0) = self.chain.a.first() {
                let block = self.p_block[(rows - 1, rows - 1)];
                if block != a0 {
                    violations.push(Violation::DoorwayMismatch { block, chain: a0 });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Assembles the `NxN` matrix: `p_block` upper-left, the chain along the
    /// diagonal from the doorway on, and zeros between the non-doorway model
    /// rows and the excluded space.
    pub fn assemble_dense(&self) -> Result<DMatrix<f64>> {
        self.validate().map_err(Error::Validation)?;
        let m = self.m();
        let n = self.n();
        let mut h = DMatrix::zeros(n, n);
        h.view_mut((0, 0), (m, m)).copy_from(&self.p_block);
        let d = m - 1;
        for (k, &a) in self.chain.a.iter().enumerate() {
            h[(d + k, d + k)] = a;
        }
        for (k, &rho) in self.chain.rho.iter().enumerate() {
            h[(d + k, d + k + 1)] = rho;
            h[(d + k + 1, d + k)] = 1.0;
        }
        Ok(h)
    }

    /// QHQ: the `KxK` excluded-space block.
    pub fn qhq(&self) -> DMatrix<f64> {
        self.chain.trailing_dense()
    }
}

/// Reads the chain back out of an assembled dense matrix with model-space
/// dimension `m`.
pub fn read_chain(dense: &DMatrix<f64>, m: usize) -> TridiagonalChain {
    let n = dense.nrows();
    let d = m - 1;
    let a = (d..n).map(|i| dense[(i, i)]).collect();
    let rho = (d..n - 1).map(|i| dense[(i, i + 1)]).collect();
    TridiagonalChain { a, rho }
}

/// Individual off-diagonals with `b[k] * c[k] = rho[k]`; `c[k]` is the entry
/// below the diagonal at level `k + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredChain {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl FactoredChain {
    pub fn k(&self) -> usize {
        self.a.len().saturating_sub(1)
    }

    pub fn rho(&self) -> Vec<f64> {
        self.b.iter().zip(&self.c).map(|(b, c)| b * c).collect()
    }

    /// Dense matrix of levels `1..=K` (the excluded-space block).
    pub fn trailing_dense(&self) -> DMatrix<f64> {
        let k = self.k();
        DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                self.a[i + 1]
            } else if j == i + 1 {
                self.b[i + 1]
            } else if i == j + 1 {
                self.c[j + 1]
            } else {
                0.0
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorStyle {
    /// `b_k = c_{k+1} = sqrt(rho_k)`; requires every `rho_k >= 0`.
    Symmetric,
    /// `c = 1`, `b = rho`.
    UnitSubdiagonal,
}

pub fn refactorize(chain: &TridiagonalChain, style: FactorStyle) -> Result<FactoredChain> {
    validate_chain(chain).map_err(Error::Validation)?;
    let (b, c) = match style {
        FactorStyle::UnitSubdiagonal => (chain.rho.clone(), vec![1.0; chain.rho.len()]),
        FactorStyle::Symmetric => {
            let indices: Vec<usize> = chain
                .rho
                .iter()
                .enumerate()
                .filter(|(_, r)| **r < 0.0)
                .map(|(i, _)| i)
                .collect();
            if !indices.is_empty() {
                return Err(Error::NotSymmetrizable { indices });
            }
            let roots: Vec<f64> = chain.rho.iter().map(|r| r.sqrt()).collect();
            (roots.clone(), roots)
        }
    };
    Ok(FactoredChain {
        a: chain.a.clone(),
        b,
        c,
    })
}

/// One probe energy and the value of G there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GSample {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "G")]
    pub g_value: f64,
}

impl GSample {
    pub fn new(energy: f64, g_value: f64) -> Self {
        GSample { energy, g_value }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<GSample>,
}

impl SampleSet {
    pub fn from_json(text: &str) -> Result<Self> {
        let set: SampleSet = serde_json::from_str(text)?;
        for (i, s) in set.samples.iter().enumerate() {
            if !s.energy.is_finite() || !s.g_value.is_finite() {
                return Err(Error::Validation(vec![Violation::NonFinite {
                    field: "samples",
                    index: i,
                }]));
            }
        }
        Ok(set)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct HamiltonianFile {
    #[serde(rename = "M")]
    m: usize,
    p_block: Vec<Vec<f64>>,
    chain: TridiagonalChain,
}

impl PartitionedHamiltonian {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: HamiltonianFile = serde_json::from_str(text)?;
        if file.p_block.len() != file.m || file.p_block.iter().any(|r| r.len() != file.m) {
            let cols = file.p_block.first().map_or(0, Vec::len);
            return Err(Error::Validation(vec![Violation::BlockNotSquare {
                rows: file.p_block.len(),
                cols,
            }]));
        }
        if file.m == 0 {
            return Err(Error::Validation(vec![Violation::EmptyModelSpace]));
        }
        let p_block = DMatrix::from_fn(file.m, file.m, |i, j| file.p_block[i][j]);
        let h = PartitionedHamiltonian {
            p_block,
            chain: file.chain,
        };
        h.validate().map_err(Error::Validation)?;
        Ok(h)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = HamiltonianFile {
            m: self.m(),
            p_block: matrix_rows(&self.p_block),
            chain: self.chain.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// Row-major nested vectors, the JSON layout for matrices.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
