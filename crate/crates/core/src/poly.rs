//! Real polynomials stored as Chebyshev series `sum c_j T_j(t)`.
//!
//! The reconstruction works on a rescaled energy `t` in roughly `[-1, 1]`
//! where the Chebyshev representation of characteristic polynomials stays
//! well conditioned; monomial coefficients are only produced for display
//! and for the closed-form `K = 1` variables.

#[derive(Clone, Debug, PartialEq)]
pub struct ChebPoly {
    coeffs: Vec<f64>,
}

impl ChebPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        ChebPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Nominal degree: index of the last stored coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + 2.0 * t * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs.first().copied().unwrap_or(0.0) + t * b1 - b2
    }

    /// Coefficients of `t * p(t)`, one degree higher.
    pub fn mul_t(&self) -> ChebPoly {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n + 1];
        for (j, &c) in self.coeffs.iter().enumerate() {
            if j == 0 {
                out[1] += c;
            } else {
                out[j + 1] += 0.5 * c;
                out[j - 1] += 0.5 * c;
            }
        }
        ChebPoly { coeffs: out }
    }

    pub fn from_monomial(mono: &[f64]) -> ChebPoly {
        // Horner in the Chebyshev basis: p = m_0 + t (m_1 + t (m_2 + ...)).
        let mut acc = ChebPoly::new(vec![0.0]);
        for &m in mono.iter().rev() {
            acc = acc.mul_t();
            acc.coeffs[0] += m;
        }
        acc.coeffs.truncate(mono.len().max(1));
        acc
    }

    pub fn to_monomial(&self) -> Vec<f64> {
        // T_0 = 1, T_1 = t, T_{j+1} = 2t T_j - T_{j-1}.
        let n = self.coeffs.len();
        let mut out = vec![0.0; n.max(1)];
        let mut prev: Vec<f64> = vec![1.0];
        let mut cur: Vec<f64> = vec![0.0, 1.0];
        for (j, &c) in self.coeffs.iter().enumerate() {
            let basis: &[f64] = match j {
                0 => &prev,
                1 => &cur,
                _ => {
                    let mut next = vec![0.0; j + 1];
                    for (i, &x) in cur.iter().enumerate() {
                        next[i + 1] += 2.0 * x;
                    }
                    for (i, &x) in prev.iter().enumerate() {
                        next[i] -= x;
                    }
                    prev = std::mem::replace(&mut cur, next);
                    &cur
                }
            };
            for (i, &x) in basis.iter().enumerate() {
                out[i] += c * x;
            }
        }
        out
    }
}

/// Chebyshev leading coefficient of a degree-`n` polynomial whose monomial
/// leading coefficient is `(-1)^n`.
pub fn sign_convention_leading(n: usize) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    if n == 0 {
        1.0
    } else {
        sign * 0.5f64.powi(n as i32 - 1)
    }
}

/// First-kind Chebyshev nodes on `[-1, 1]`, ascending.
pub fn chebyshev_nodes(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| {
            let k = 2 * j as i64 + 1 - count as i64;
            (std::f64::consts::PI * k as f64 / (2 * count) as f64).sin()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mono_eval(m: &[f64], t: f64) -> f64 {
        m.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    #[test]
    fn chebyshev_basics() {
        // T_2 = 2t^2 - 1
        let p = ChebPoly::new(vec![0.0, 0.0, 1.0]);
        assert_eq!(p.to_monomial(), vec![-1.0, 0.0, 2.0]);
        assert_eq!(p.eval(0.5), -0.5);
        assert_eq!(ChebPoly::from_monomial(&[-1.0, 0.0, 2.0]), p);
    }

    #[test]
    fn leading_convention() {
        // monomial lead (-1)^n converted to Chebyshev
        for n in 0..8 {
            let mut mono = vec![0.0; n + 1];
            mono[n] = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            let c = ChebPoly::from_monomial(&mono);
            assert_eq!(c.leading(), sign_convention_leading(n));
        }
    }

    #[test]
    fn nodes_are_ascending_and_symmetric() {
        let t = chebyshev_nodes(5);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!((t[0] + t[4]).abs() < 1e-15);
        assert!(t[2].abs() < 1e-15);
        assert_eq!(chebyshev_nodes(1).len(), 1);
    }

    proptest! {
        #[test]
        fn basis_change_preserves_values(
            mono in prop::collection::vec(-3.0f64..3.0, 1..9),
            t in -1.0f64..1.0,
        ) {
            let c = ChebPoly::from_monomial(&mono);
            prop_assert!((c.eval(t) - mono_eval(&mono, t)).abs() < 1e-12);
            let back = c.to_monomial();
            for (x, y) in back.iter().zip(&mono) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert!((c.mul_t().eval(t) - t * mono_eval(&mono, t)).abs() < 1e-12);
        }
    }
}
