//! Joint input distributions and the canonical purified input state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qcore::linalg::{CVector, C_ZERO};
use crate::qcore::{PureState, RegisterSystem};
use crate::{Error, Result};

use super::{REG_R, REG_U, REG_V};

/// Probability weights over pairs `(u, v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    u_size: usize,
    v_size: usize,
    weights: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        let u_size = weights.len();
        if u_size == 0 {
            return Err(Error::InvalidDistribution("empty u domain".into()));
        }
        let v_size = weights[0].len();
        let mut total = 0.0;
        for row in &weights {
            if row.len() != v_size {
                return Err(Error::InvalidDistribution("ragged weight table".into()));
            }
            for &w in row {
                if w < 0.0 {
                    return Err(Error::InvalidDistribution(format!("negative weight {w}")));
                }
                total += w;
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(JointDistribution {
            u_size,
            v_size,
            weights,
        })
    }

    pub fn uniform(u_size: usize, v_size: usize) -> Self {
        let w = 1.0 / (u_size * v_size) as f64;
        JointDistribution {
            u_size,
            v_size,
            weights: vec![vec![w; v_size]; u_size],
        }
    }

    pub fn point_mass(u_size: usize, v_size: usize, u: usize, v: usize) -> Self {
        let mut weights = vec![vec![0.0; v_size]; u_size];
        weights[u][v] = 1.0;
        JointDistribution {
            u_size,
            v_size,
            weights,
        }
    }

    /// Distribution from a flat weight vector indexed by `u * v_size + v`,
    /// renormalized.
    pub fn from_flat(u_size: usize, v_size: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != u_size * v_size {
            return Err(Error::InvalidDistribution(format!(
                "flat vector length {} vs {}x{}",
                flat.len(),
                u_size,
                v_size
            )));
        }
        let total: f64 = flat.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("zero total mass".into()));
        }
        let weights = (0..u_size)
            .map(|u| (0..v_size).map(|v| flat[u * v_size + v] / total).collect())
            .collect();
        Self::new(weights)
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }

    pub fn v_size(&self) -> usize {
        self.v_size
    }

    pub fn prob(&self, u: usize, v: usize) -> f64 {
        self.weights[u][v]
    }

    pub fn v_marginal(&self) -> Vec<f64> {
        (0..self.v_size)
            .map(|v| (0..self.u_size).map(|u| self.weights[u][v]).sum())
            .collect()
    }

    /// Pairs `(u, v)` with strictly positive weight.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut s = Vec::new();
        for u in 0..self.u_size {
            for v in 0..self.v_size {
                if self.weights[u][v] > 0.0 {
                    s.push((u, v));
                }
            }
        }
        s
    }

    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.u_size * self.v_size);
        for row in &self.weights {
            out.extend_from_slice(row);
        }
        out
    }

    pub fn transpose(&self) -> JointDistribution {
        let weights = (0..self.v_size)
            .map(|v| (0..self.u_size).map(|u| self.weights[u][v]).collect())
            .collect();
        JointDistribution {
            u_size: self.v_size,
            v_size: self.u_size,
            weights,
        }
    }
}

/// Canonical purification of the classical input mixture: amplitudes
/// `sqrt(p(u,v))` on `|uv>_R |u>_U |v>_V`, with `R` a single register of
/// dimension `|U|·|V|` indexed as `u·|V| + v`.
pub fn input_state(p: &JointDistribution) -> Result<PureState> {
    let (us, vs) = (p.u_size(), p.v_size());
    let system = RegisterSystem::from_pairs(&[(REG_R, us * vs), (REG_U, us), (REG_V, vs)])?;
    let mut amps = CVector::from_element(system.total_dim(), C_ZERO);
    for u in 0..us {
        for v in 0..vs {
            let w = p.prob(u, v);
            if w > 0.0 {
                let idx = system.index_of(&[u * vs + v, u, v]);
                amps[idx] = Complex64::new(w.sqrt(), 0.0);
            }
        }
    }
    PureState::new(system, amps)
}

/// Decodes the reference-register digit back into an input pair.
pub fn decode_reference(r_digit: usize, v_size: usize) -> (usize, usize) {
    (r_digit / v_size, r_digit % v_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_is_basis_state() {
        let p = JointDistribution::point_mass(2, 2, 1, 0);
        let psi = input_state(&p).unwrap();
        let idx = psi.system().index_of(&[2, 1, 0]);
        assert!((psi.amplitudes()[idx].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_two_by_two_amplitudes() {
        let p = JointDistribution::uniform(2, 2);
        let psi = input_state(&p).unwrap();
        let nonzero: Vec<f64> = psi
            .amplitudes()
            .iter()
            .map(|z| z.norm())
            .filter(|m| *m > 1e-12)
            .collect();
        assert_eq!(nonzero.len(), 4);
        for m in nonzero {
            assert!((m - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn uv_marginal_is_classical_mixture() {
        let p = JointDistribution::new(vec![vec![0.5, 0.25], vec![0.0, 0.25]]).unwrap();
        let psi = input_state(&p).unwrap();
        let uv = psi.partial_trace(&[REG_U, REG_V]).unwrap();
        for u in 0..2 {
            for v in 0..2 {
                let idx = uv.system().index_of(&[u, v]);
                assert!((uv.matrix()[(idx, idx)].re - p.prob(u, v)).abs() < 1e-12);
                for j in 0..4 {
                    if j != idx {
                        assert!(uv.matrix()[(idx, j)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn r_trace_reads_off_distribution() {
        let p = JointDistribution::new(vec![vec![0.1, 0.2], vec![0.3, 0.4]]).unwrap();
        let psi = input_state(&p).unwrap();
        let r = psi.partial_trace(&[REG_R]).unwrap();
        for u in 0..2 {
            for v in 0..2 {
                let idx = u * 2 + v;
                assert!((r.matrix()[(idx, idx)].re - p.prob(u, v)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_distributions_rejected() {
        assert!(JointDistribution::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(JointDistribution::new(vec![vec![-0.1, 1.1]]).is_err());
    }
}
