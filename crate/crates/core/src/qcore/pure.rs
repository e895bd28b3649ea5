//! Pure states as complex amplitude vectors over a register system.

use num_complex::Complex64;

use super::density::DensityOperator;
use super::linalg::{CMatrix, CVector, C_ONE, C_ZERO};
use super::register::RegisterSystem;
use crate::{Error, Result, TOL_VALIDATE};

#[derive(Debug, Clone)]
pub struct PureState {
    system: RegisterSystem,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(system: RegisterSystem, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != system.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector length {} vs system dimension {}",
                amplitudes.len(),
                system.total_dim()
            )));
        }
        let state = PureState { system, amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > TOL_VALIDATE {
            return Err(Error::InvalidState(format!(
                "pure state norm {norm} deviates from 1"
            )));
        }
        Ok(state)
    }

    /// Computational basis state with the given digit per register.
    pub fn basis(system: RegisterSystem, digits: &[usize]) -> Result<Self> {
        if digits.len() != system.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} digits for {} registers",
                digits.len(),
                system.len()
            )));
        }
        for (digit, reg) in digits.iter().zip(system.registers()) {
            if *digit >= reg.dim {
                return Err(Error::DimensionMismatch(format!(
                    "digit {} out of range for register {} (dim {})",
                    digit, reg.label, reg.dim
                )));
            }
        }
        let mut amps = CVector::from_element(system.total_dim(), C_ZERO);
        amps[system.index_of(digits)] = C_ONE;
        Ok(PureState {
            system,
            amplitudes: amps,
        })
    }

    pub fn system(&self) -> &RegisterSystem {
        &self.system
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Tensor product; register labels must be disjoint.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let system = self.system.tensor(&other.system)?;
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        Ok(PureState {
            system,
            amplitudes: amps,
        })
    }

    /// State with registers reordered as `perm` (new slot k ← old slot perm[k]).
    pub fn permuted(&self, perm: &[usize]) -> PureState {
        let map = self.system.permutation_map(perm);
        let mut amps = CVector::from_element(self.dim(), C_ZERO);
        for (new_index, &old_index) in map.iter().enumerate() {
            amps[new_index] = self.amplitudes[old_index];
        }
        PureState {
            system: self.system.permuted(perm),
            amplitudes: amps,
        }
    }

    /// State with the given labels moved to the front, order preserved
    /// elsewhere.
    pub fn with_front(&self, front: &[&str]) -> Result<PureState> {
        let perm = self.system.front_permutation(front)?;
        Ok(self.permuted(&perm))
    }

    /// State reordered to match the register order of `target` (same labels).
    pub fn reordered_as(&self, target: &RegisterSystem) -> Result<PureState> {
        if target.len() != self.system.len() {
            return Err(Error::DimensionMismatch(
                "register count mismatch in reorder".into(),
            ));
        }
        let mut perm = Vec::with_capacity(target.len());
        for label in target.labels() {
            perm.push(self.system.position(label)?);
        }
        Ok(self.permuted(&perm))
    }

    pub fn rename_register(&self, old: &str, new: &str) -> Result<PureState> {
        Ok(PureState {
            system: self.system.rename(old, new)?,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// Amplitudes reshaped to a (front × rest) matrix after moving `front`
    /// labels to the front. Row index runs over the front subsystem.
    pub fn reshape_front(&self, front: &[&str]) -> Result<(CMatrix, RegisterSystem, RegisterSystem)> {
        let moved = self.with_front(front)?;
        let front_sys = moved.system.subsystem(front)?;
        let rest_sys = moved.system.complement(front)?;
        let (fd, rd) = (front_sys.total_dim(), rest_sys.total_dim());
        let mut mat = CMatrix::from_element(fd, rd, C_ZERO);
        for a in 0..fd {
            for b in 0..rd {
                mat[(a, b)] = moved.amplitudes[a * rd + b];
            }
        }
        Ok((mat, front_sys, rest_sys))
    }

    pub fn to_density(&self) -> DensityOperator {
        let mat = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::new_unchecked(self.system.clone(), mat)
    }

    /// Reduced density operator on `keep`, in this system's register order.
    /// Contracted with flat buffers: the kept block of each environment
    /// column accumulates as a rank-one update.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityOperator> {
        let keep_sys = self.system.subsystem(keep)?;
        let keep_labels = keep_sys.labels();
        let perm = self.system.front_permutation(&keep_labels)?;
        let map = self.system.permutation_map(&perm);
        let kd = keep_sys.total_dim();
        let ed = self.dim() / kd;
        // bucket[e][k] = amplitude of |k>_keep |e>_env
        let mut bucket = vec![C_ZERO; kd * ed];
        for (new_index, &old_index) in map.iter().enumerate() {
            let (k, e) = (new_index / ed, new_index % ed);
            bucket[e * kd + k] = self.amplitudes[old_index];
        }
        let mut rho = vec![C_ZERO; kd * kd];
        for e in 0..ed {
            let col = &bucket[e * kd..(e + 1) * kd];
            for (a, &ca) in col.iter().enumerate() {
                if ca.norm_sqr() < 1e-300 {
                    continue;
                }
                let row = &mut rho[a * kd..(a + 1) * kd];
                for (slot, &cb) in row.iter_mut().zip(col.iter()) {
                    *slot += ca * cb.conj();
                }
            }
        }
        let mat = CMatrix::from_fn(kd, kd, |i, j| rho[i * kd + j]);
        Ok(DensityOperator::new_unchecked(keep_sys, mat))
    }

    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.system != other.system {
            let aligned = other.reordered_as(&self.system)?;
            return Ok(self.amplitudes.dotc(&aligned.amplitudes));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}
