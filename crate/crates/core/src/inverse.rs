//! The inverse problem: recover the chain from values of G(E).
//!
//! Two steps. The samples are first linearized: `G = d0/d1` with `d0`, `d1`
//! the characteristic polynomials of the chain and of its trailing block,
//! so `d0(E_a) - G_a d1(E_a) = 0` is linear in their non-leading
//! coefficients. The rational function is then expanded back into a chain
//! by the division recurrence `d_k = (a_k - E) d_{k+1} - rho_k d_{k+2}`.
//!
//! Both steps run in a rescaled energy `t = (E - center)/halfwidth` where
//! the probes fill `[-1, 1]`, with polynomials held as Chebyshev series.
//! In that variable the chain becomes `(a_k - center)/halfwidth` on the
//! diagonal and `rho_k/halfwidth^2` above it, and `G` is divided by
//! `halfwidth`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{DegeneracyReason, Error, Result};
use crate::forward::g_function;
use crate::model::{GSample, TridiagonalChain};
use crate::poly::{chebyshev_nodes, sign_convention_leading, ChebPoly};

/// Largest acceptable condition estimate of the coefficient system.
pub const LINEAR_CONDITION_LIMIT: f64 = 1e10;

/// Relative size of a division remainder below which the coupling is treated as zero.
pub const DROP_TOL: f64 = 1e-10;

/// Relative agreement required when testing whether a shorter chain explains all samples.
const BREAKDOWN_FIT_TOL: f64 = 1e-8;

/// Affine map between energies `E` and the working variable `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyScale {
    pub center: f64,
    pub halfwidth: f64,
}

impl EnergyScale {
    pub const IDENTITY: EnergyScale = EnergyScale {
        center: 0.0,
        halfwidth: 1.0,
    };

    /// Maps the energy range of `energies` onto `[-1, 1]`.
    pub fn spanning(energies: impl IntoIterator<Item = f64>) -> EnergyScale {
        let (lo, hi) = energies
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
                (lo.min(e), hi.max(e))
            });
        if !(hi > lo) {
            let center = if lo.is_finite() { lo } else { 0.0 };
            return EnergyScale {
                center,
                halfwidth: 1.0,
            };
        }
        EnergyScale {
            center: 0.5 * (lo + hi),
            halfwidth: 0.5 * (hi - lo),
        }
    }

    pub fn to_t(&self, energy: f64) -> f64 {
        (energy - self.center) / self.halfwidth
    }
}

/// `G(E) = halfwidth * d0(t) / d1(t)`, `t = scale.to_t(E)`.
///
/// In `t`, `d0` has degree `K+1` and monomial leading coefficient
/// `(-1)^(K+1)`; `d1` has degree `K` and leading coefficient `(-1)^K`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPolyPair {
    pub scale: EnergyScale,
    pub d0: ChebPoly,
    pub d1: ChebPoly,
}

impl CharPolyPair {
    /// Builds a pair from monomial coefficients (ascending) in `E` itself.
    pub fn from_monomial(d0: &[f64], d1: &[f64]) -> CharPolyPair {
        CharPolyPair {
            scale: EnergyScale::IDENTITY,
            d0: ChebPoly::from_monomial(d0),
            d1: ChebPoly::from_monomial(d1),
        }
    }

    /// Characteristic polynomials of `chain` in the given scale, by the
    /// three-term recurrence.
    pub fn from_chain(chain: &TridiagonalChain, scale: EnergyScale) -> CharPolyPair {
        let k = chain.k();
        let h = scale.halfwidth;
        let mut next = ChebPoly::new(vec![0.0]);
        let mut cur = ChebPoly::new(vec![1.0]);
        for level in (0..=k).rev() {
            let a = (chain.a[level] - scale.center) / h;
            let tc = cur.mul_t();
            let mut coeffs = vec![0.0; tc.coeffs().len()];
            for (i, c) in cur.coeffs().iter().enumerate() {
                coeffs[i] += a * c;
            }
            for (i, c) in tc.coeffs().iter().enumerate() {
                coeffs[i] -= c;
            }
            if level < k {
                let rho = chain.rho[level] / (h * h);
                for (i, c) in next.coeffs().iter().enumerate() {
                    coeffs[i] -= rho * c;
                }
            }
            next = cur;
            cur = ChebPoly::new(coeffs);
        }
        CharPolyPair {
            scale,
            d0: cur,
            d1: next,
        }
    }

    pub fn k(&self) -> usize {
        self.d1.degree()
    }

    pub fn g_at(&self, energy: f64) -> f64 {
        let t = self.scale.to_t(energy);
        self.scale.halfwidth * self.d0.eval(t) / self.d1.eval(t)
    }

    /// Ascending monomial coefficients of `(d0, d1)` in `E`, normalized to
    /// leading coefficients `(-1)^deg`.
    pub fn monomial_in_energy(&self) -> (Vec<f64>, Vec<f64>) {
        let h = self.scale.halfwidth;
        let k = self.k() as i32;
        let d0 = rescale_monomial(&self.d0.to_monomial(), self.scale);
        let d1 = rescale_monomial(&self.d1.to_monomial(), self.scale);
        (
            d0.iter().map(|c| c * h.powi(k + 1)).collect(),
            d1.iter().map(|c| c * h.powi(k)).collect(),
        )
    }
}

/// Substitutes `t = (E - center)/halfwidth` into a monomial series in `t`.
fn rescale_monomial(mono_t: &[f64], scale: EnergyScale) -> Vec<f64> {
    let n = mono_t.len();
    let mut out = vec![0.0; n];
    // power = ((E - c)/h)^j as ascending coefficients in E
    let mut power = vec![1.0];
    let step = [-scale.center / scale.halfwidth, 1.0 / scale.halfwidth];
    for &m in mono_t {
        for (i, p) in power.iter().enumerate() {
            out[i] += m * p;
        }
        let mut next = vec![0.0; power.len() + 1];
        for (i, p) in power.iter().enumerate() {
            next[i] += p * step[0];
            next[i + 1] += p * step[1];
        }
        power = next;
    }
    out
}

/// The `K = 1` variables `x1 = -a0 - a1`, `x2 = a0 a1 - rho0`, `y1 = a1`,
/// in which the three sampled equations become linear.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct K1Variables {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
}

impl K1Variables {
    pub fn from_chain(chain: &TridiagonalChain) -> Result<K1Variables> {
        if chain.k() != 1 {
            return Err(Error::InvalidInput(format!(
                "K1 variables need K = 1, got K = {}",
                chain.k()
            )));
        }
        let (a0, a1, rho0) = (chain.a[0], chain.a[1], chain.rho[0]);
        Ok(K1Variables {
            x1: -a0 - a1,
            x2: a0 * a1 - rho0,
            y1: a1,
        })
    }

    /// Closed-form inverse of the variable change.
    pub fn to_chain(&self) -> TridiagonalChain {
        let K1Variables { x1, x2, y1 } = *self;
        TridiagonalChain {
            a: vec![-x1 - y1, y1],
            rho: vec![-x1 * y1 - x2 - y1 * y1],
        }
    }

    /// Solves `G_a y1 - E_a x1 - x2 = E_a^2 + G_a E_a` for the three samples.
    pub fn from_samples(samples: &[GSample]) -> Result<K1Variables> {
        check_samples(samples, 1)?;
        let a = DMatrix::from_fn(3, 3, |i, j| match j {
            0 => samples[i].g_value,
            1 => -samples[i].energy,
            _ => -1.0,
        });
        let b = DVector::from_fn(3, |i, _| {
            let (e, g) = (samples[i].energy, samples[i].g_value);
            e * e + g * e
        });
        let condition = condition_2norm(&a);
        if !(condition <= LINEAR_CONDITION_LIMIT) {
            return Err(Error::SampleDegeneracy(DegeneracyReason::IllConditioned {
                condition,
            }));
        }
        let x = a
            .full_piv_lu()
            .solve(&b)
            .ok_or(Error::SampleDegeneracy(DegeneracyReason::IllConditioned {
                condition: f64::INFINITY,
            }))?;
        Ok(K1Variables {
            y1: x[0],
            x1: x[1],
            x2: x[2],
        })
    }
}

/// `K = 1` reconstruction straight from three samples.
pub fn k1_closed_form(samples: &[GSample]) -> Result<TridiagonalChain> {
    Ok(K1Variables::from_samples(samples)?.to_chain())
}

fn check_samples(samples: &[GSample], k: usize) -> Result<()> {
    let expected = 2 * k + 1;
    if samples.len() != expected {
        return Err(Error::SampleDegeneracy(DegeneracyReason::WrongCount {
            expected,
            got: samples.len(),
        }));
    }
    for (i, s) in samples.iter().enumerate() {
        if !s.energy.is_finite() || !s.g_value.is_finite() {
            return Err(Error::InvalidInput(format!("sample {i} is not finite")));
        }
        if let Some(j) = samples[..i].iter().position(|p| p.energy == s.energy) {
            return Err(Error::SampleDegeneracy(
                DegeneracyReason::DuplicateEnergies { first: j, second: i },
            ));
        }
    }
    Ok(())
}

fn condition_2norm(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Chebyshev polynomial values `T_0(t) .. T_{n-1}(t)`.
fn chebyshev_row(t: f64, n: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(n);
    for j in 0..n {
        row.push(match j {
            0 => 1.0,
            1 => t,
            _ => 2.0 * t * row[j - 1] - row[j - 2],
        });
    }
    row
}

fn linearize(samples: &[GSample], k: usize) -> Result<(CharPolyPair, f64)> {
    check_samples(samples, k)?;
    let scale = EnergyScale::spanning(samples.iter().map(|s| s.energy));
    let n = 2 * k + 1;
    let lead0 = sign_convention_leading(k + 1);
    let lead1 = sign_convention_leading(k);
    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    for (row, s) in samples.iter().enumerate() {
        let t = scale.to_t(s.energy);
        let g = s.g_value / scale.halfwidth;
        let w = 1.0 / g.abs().max(1.0);
        let cheb = chebyshev_row(t, k + 2);
        // unknowns: d0 coefficients 0..=K, then d1 coefficients 0..K
        for j in 0..=k {
            a[(row, j)] = w * cheb[j];
        }
        for j in 0..k {
            a[(row, k + 1 + j)] = -w * g * cheb[j];
        }
        b[row] = -w * (lead0 * cheb[k + 1] - g * lead1 * cheb[k]);
    }
    let condition = condition_2norm(&a);
    if !(condition <= LINEAR_CONDITION_LIMIT) {
        return Err(Error::SampleDegeneracy(DegeneracyReason::IllConditioned {
            condition,
        }));
    }
    let x = a
        .full_piv_lu()
        .solve(&b)
        .ok_or(Error::SampleDegeneracy(DegeneracyReason::IllConditioned {
            condition: f64::INFINITY,
        }))?;
    let mut d0: Vec<f64> = x.rows(0, k + 1).iter().copied().collect();
    d0.push(lead0);
    let mut d1: Vec<f64> = x.rows(k + 1, k).iter().copied().collect();
    d1.push(lead1);
    Ok((
        CharPolyPair {
            scale,
            d0: ChebPoly::new(d0),
            d1: ChebPoly::new(d1),
        },
        condition,
    ))
}

/// Solves the linear coefficient problem for `(d0, d1)` from exactly
/// `2K + 1` samples with distinct energies.
pub fn linearize_samples(samples: &[GSample], k: usize) -> Result<CharPolyPair> {
    linearize(samples, k).map(|(pair, _)| pair)
}

/// Expands `d0/d1` into the unique unit-subdiagonal chain by repeated division.
pub fn expand_to_chain(pair: &CharPolyPair) -> Result<TridiagonalChain> {
    let k = pair.d1.degree();
    if pair.d0.degree() != k + 1 {
        return Err(Error::MalformedPair(format!(
            "deg d0 = {} but deg d1 = {k}",
            pair.d0.degree()
        )));
    }
    let conforms = |p: &ChebPoly| {
        let want = sign_convention_leading(p.degree());
        (p.leading() - want).abs() <= 1e-9 * want.abs()
    };
    if !conforms(&pair.d0) || !conforms(&pair.d1) {
        return Err(Error::MalformedPair(format!(
            "leading coefficients ({}, {}) break the (-1)^deg convention",
            pair.d0.leading(),
            pair.d1.leading()
        )));
    }
    if pair.d0.coeffs().iter().chain(pair.d1.coeffs()).any(|x| !x.is_finite()) {
        return Err(Error::MalformedPair("non-finite coefficient".into()));
    }

    let scale = pair.scale;
    let to_a = |a_t: f64| scale.center + scale.halfwidth * a_t;
    let to_rho = |rho_t: f64| rho_t * scale.halfwidth * scale.halfwidth;

    let mut prev = pair.d0.clone();
    let mut cur = pair.d1.clone();
    let mut largest = prev
        .coeffs()
        .iter()
        .chain(cur.coeffs())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let mut a = Vec::with_capacity(k + 1);
    let mut rho = Vec::with_capacity(k);
    for level in 0..=k {
        let n = k - level;
        let u = cur.coeffs();
        let v = cur.mul_t();
        let v = v.coeffs();
        // prev = (a - t) cur - rho next, matched on the T_n coefficient
        let a_t = (prev.coeffs()[n] + v[n]) / u[n];
        a.push(to_a(a_t));
        if level == k {
            break;
        }
        let r: Vec<f64> = (0..n).map(|j| prev.coeffs()[j] - a_t * u[j] + v[j]).collect();
        largest = r.iter().fold(largest, |m, x| m.max(x.abs()));
        let lead_next = sign_convention_leading(n - 1);
        let r_top = r[n - 1];
        if r_top.abs() < DROP_TOL * largest {
            return Err(Error::ChainBreakdown {
                level,
                recovered_prefix: TridiagonalChain { a, rho },
            });
        }
        let rho_t = -r_top / lead_next;
        rho.push(to_rho(rho_t));
        let mut next: Vec<f64> = r.iter().map(|x| -x / rho_t).collect();
        next[n - 1] = lead_next;
        prev = std::mem::replace(&mut cur, ChebPoly::new(next));
    }
    Ok(TridiagonalChain { a, rho })
}

/// Chebyshev-distributed probe energies in `window`, each at least `margin`
/// away from every `forbidden` value.
///
/// Nodes that land too close to a forbidden value move to the nearest
/// admissible point. Probes keep a mutual separation of
/// `min(margin, half the smallest node gap)`.
pub fn choose_probe_energies(
    count: usize,
    window: (f64, f64),
    forbidden: &[f64],
    margin: f64,
) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if count == 0 {
        return Err(Error::InvalidInput("probe count must be positive".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) || !(margin >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "bad window [{lo}, {hi}] or margin {margin}"
        )));
    }
    if count > 1 && lo == hi {
        return Err(Error::InfeasibleSampling(format!(
            "degenerate window cannot hold {count} probes"
        )));
    }
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let nodes: Vec<f64> = chebyshev_nodes(count)
        .into_iter()
        .map(|t| center + half * t)
        .collect();
    let gap = nodes
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let separation = if margin > 0.0 {
        margin.min(0.5 * gap)
    } else {
        0.5 * gap
    };

    let mut chosen: Vec<f64> = Vec::with_capacity(count);
    for &node in &nodes {
        let admissible = |x: f64, chosen: &[f64]| {
            x >= lo
                && x <= hi
                && forbidden.iter().all(|f| (x - f).abs() >= margin)
                && chosen.iter().all(|p| (x - p).abs() >= separation)
        };
        if admissible(node, &chosen) {
            chosen.push(node);
            continue;
        }
        // pushed a hair past the boundary so rounding cannot reject them
        let (m, sep) = (margin * (1.0 + 1e-9), separation * (1.0 + 1e-9));
        let mut candidates = vec![lo, hi];
        for f in forbidden {
            candidates.extend([f - m, f + m]);
        }
        for p in &chosen {
            candidates.extend([p - sep, p + sep]);
        }
        let best = candidates
            .into_iter()
            .filter(|&x| admissible(x, &chosen))
            .min_by(|x, y| {
                (x - node)
                    .abs()
                    .total_cmp(&(y - node).abs())
                    .then(x.total_cmp(y))
            });
        match best {
            Some(x) => chosen.push(x),
            None => {
                return Err(Error::InfeasibleSampling(format!(
                    "no admissible probe near {node} in [{lo}, {hi}] with margin {margin}"
                )))
            }
        }
    }
    chosen.sort_by(f64::total_cmp);
    Ok(chosen)
}

/// Evaluates G of `chain` at each energy.
pub fn sample_chain(chain: &TridiagonalChain, energies: &[f64]) -> Result<Vec<GSample>> {
    energies
        .iter()
        .map(|&e| Ok(GSample::new(e, g_function(chain, e)?)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionReport {
    pub chain: TridiagonalChain,
    /// Largest `|G_held - G_chain(E_held)|` over the holdout set; zero when it is empty.
    pub residual_max: f64,
    /// 2-norm condition estimate of the row-scaled coefficient system.
    pub condition_estimate: f64,
    /// `rho_k >= 0` per coupling.
    pub hermitizable: Vec<bool>,
}

impl ReconstructionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Linearize, expand, and score against the holdout samples.
pub fn reconstruct(
    samples: &[GSample],
    k: usize,
    holdout: &[GSample],
) -> Result<ReconstructionReport> {
    let (pair, condition) = match linearize(samples, k) {
        Ok(x) => x,
        Err(err @ Error::SampleDegeneracy(DegeneracyReason::IllConditioned { .. })) => {
            return Err(shorter_chain(samples, k).unwrap_or(err));
        }
        Err(err) => return Err(err),
    };
    let chain = expand_to_chain(&pair)?;
    let mut residual_max: f64 = 0.0;
    for s in holdout {
        let g = g_function(&chain, s.energy)?;
        residual_max = residual_max.max((g - s.g_value).abs());
    }
    let hermitizable = chain.rho.iter().map(|&r| r >= 0.0).collect();
    Ok(ReconstructionReport {
        chain,
        residual_max,
        condition_estimate: condition,
        hermitizable,
    })
}

/// When the full system is singular, looks for the longest shorter chain
/// that explains every sample; a hit means some coupling vanishes.
fn shorter_chain(samples: &[GSample], k: usize) -> Option<Error> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|x, y| x.energy.total_cmp(&y.energy));
    let last = sorted.len() - 1;
    for kp in (0..k).rev() {
        let picks = 2 * kp;
        let subset: Vec<GSample> = if picks == 0 {
            vec![sorted[last / 2]]
        } else {
            (0..=picks)
                .map(|j| sorted[(j * last + picks / 2) / picks])
                .collect()
        };
        let Ok((pair, _)) = linearize(&subset, kp) else {
            continue;
        };
        let Ok(chain) = expand_to_chain(&pair) else {
            continue;
        };
        let fits = samples.iter().all(|s| {
            g_function(&chain, s.energy)
                .map(|g| (g - s.g_value).abs() <= BREAKDOWN_FIT_TOL * s.g_value.abs().max(1.0))
                .unwrap_or(false)
        });
        if fits {
            return Some(Error::ChainBreakdown {
                level: kp,
                recovered_prefix: chain,
            });
        }
    }
    None
}
