//! Density operators over labeled register systems.

use num_complex::Complex64;

use super::linalg::{hermitian_eigen, hermitian_eigenvalues, CMatrix, CVector, C_ZERO};
use super::pure::PureState;
use super::register::RegisterSystem;
use crate::{Error, Result, TOL_VALIDATE};

#[derive(Debug, Clone)]
pub struct DensityOperator {
    system: RegisterSystem,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates hermiticity, positivity (within tolerance) and unit trace.
    pub fn new(system: RegisterSystem, matrix: CMatrix) -> Result<Self> {
        let d = system.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} vs system dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                d
            )));
        }
        let op = DensityOperator { system, matrix };
        op.validate()?;
        Ok(op)
    }

    /// Skips validation; for internal construction of states already known to
    /// be well-formed (reductions of valid states, channel outputs).
    pub(crate) fn new_unchecked(system: RegisterSystem, matrix: CMatrix) -> Self {
        DensityOperator { system, matrix }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.matrix.nrows();
        for i in 0..d {
            for j in i..d {
                let skew = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                if skew > TOL_VALIDATE {
                    return Err(Error::InvalidState(format!(
                        "non-Hermitian entry at ({i},{j}): skew {skew:.3e}"
                    )));
                }
            }
        }
        let trace = self.trace();
        if (trace.re - 1.0).abs() > TOL_VALIDATE || trace.im.abs() > TOL_VALIDATE {
            return Err(Error::InvalidState(format!("trace {trace} deviates from 1")));
        }
        let min_eig = hermitian_eigenvalues(&self.matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -TOL_VALIDATE {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(())
    }

    pub fn system(&self) -> &RegisterSystem {
        &self.system
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let system = self.system.tensor(&other.system)?;
        let matrix = self.matrix.kronecker(&other.matrix);
        Ok(DensityOperator { system, matrix })
    }

    pub fn permuted(&self, perm: &[usize]) -> DensityOperator {
        let map = self.system.permutation_map(perm);
        let d = self.dim();
        let mut out = CMatrix::from_element(d, d, C_ZERO);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = self.matrix[(map[i], map[j])];
            }
        }
        DensityOperator {
            system: self.system.permuted(perm),
            matrix: out,
        }
    }

    pub fn with_front(&self, front: &[&str]) -> Result<DensityOperator> {
        let perm = self.system.front_permutation(front)?;
        Ok(self.permuted(&perm))
    }

    pub fn reordered_as(&self, target: &RegisterSystem) -> Result<DensityOperator> {
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

    pub fn rename_register(&self, old: &str, new: &str) -> Result<DensityOperator> {
        Ok(DensityOperator {
            system: self.system.rename(old, new)?,
            matrix: self.matrix.clone(),
        })
    }

    /// Reduced state on `keep` (in this system's order); trace preserved.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityOperator> {
        let keep_sys = self.system.subsystem(keep)?;
        if keep_sys.len() == self.system.len() {
            return Ok(self.clone());
        }
        let keep_labels = keep_sys.labels();
        let fronted = self.with_front(&keep_labels)?;
        let kd = keep_sys.total_dim();
        let ed = self.dim() / kd;
        let mut out = CMatrix::from_element(kd, kd, C_ZERO);
        for a in 0..kd {
            for b in 0..kd {
                let mut acc = C_ZERO;
                for e in 0..ed {
                    acc += fronted.matrix[(a * ed + e, b * ed + e)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityOperator {
            system: keep_sys,
            matrix: out,
        })
    }

    /// Decoheres the given registers in the computational basis (measure and
    /// forget the outcome): off-diagonal blocks between differing target
    /// digits are zeroed.
    pub fn dephase(&self, targets: &[&str]) -> Result<DensityOperator> {
        let perm = self.system.front_permutation(targets)?;
        let fronted = self.permuted(&perm);
        let td = self.system.dim_of_set(targets)?;
        let rd = self.dim() / td;
        let mut mat = fronted.matrix;
        for a in 0..td {
            for b in 0..td {
                if a == b {
                    continue;
                }
                for i in 0..rd {
                    for j in 0..rd {
                        mat[(a * rd + i, b * rd + j)] = C_ZERO;
                    }
                }
            }
        }
        let out = DensityOperator {
            system: fronted.system,
            matrix: mat,
        };
        out.reordered_as(&self.system)
    }

    /// Purification with a fresh environment register of dimension equal to
    /// this state's dimension; tracing the environment back out reproduces
    /// the state.
    pub fn purify(&self, env_label: &str) -> Result<PureState> {
        if self.system.contains(env_label) {
            return Err(Error::LabelCollision(env_label.to_string()));
        }
        let d = self.dim();
        let (vals, vecs) = hermitian_eigen(&self.matrix);
        let system = self
            .system
            .tensor(&RegisterSystem::single(env_label, d))?;
        let mut amps = CVector::from_element(d * d, C_ZERO);
        for (k, &lambda) in vals.iter().enumerate() {
            let w = lambda.max(0.0).sqrt();
            if w == 0.0 {
                continue;
            }
            for i in 0..d {
                // |i>_sys |k>_env amplitude: sqrt(lambda_k) <i|e_k>
                amps[i * d + k] += Complex64::new(w, 0.0) * vecs[(i, k)];
            }
        }
        PureState::new(system, amps)
    }

    /// Diagonal of the matrix as outcome probabilities in basis order.
    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::C_ONE;

    fn maximally_mixed(label: &str, d: usize) -> DensityOperator {
        let sys = RegisterSystem::single(label, d);
        let mat = CMatrix::identity(d, d).scale(1.0 / d as f64);
        DensityOperator::new(sys, mat).unwrap()
    }

    #[test]
    fn tensor_then_trace_recovers_factor() {
        let rho = maximally_mixed("A", 2);
        let pure0 = PureState::basis(RegisterSystem::single("B", 3), &[0])
            .unwrap()
            .to_density();
        let joint = rho.tensor(&pure0).unwrap();
        let back = joint.partial_trace(&["A"]).unwrap();
        let diff = back.matrix() - rho.matrix();
        assert!(diff.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn trace_all_labels_is_identity_case() {
        let rho = maximally_mixed("A", 3);
        let same = rho.partial_trace(&["A"]).unwrap();
        assert_eq!(same.matrix(), rho.matrix());
    }

    #[test]
    fn product_state_reduction() {
        let a = maximally_mixed("A", 2);
        let mut mat = CMatrix::from_element(2, 2, C_ZERO);
        mat[(0, 0)] = Complex64::new(0.25, 0.0);
        mat[(1, 1)] = Complex64::new(0.75, 0.0);
        let b = DensityOperator::new(RegisterSystem::single("B", 2), mat).unwrap();
        let joint = a.tensor(&b).unwrap();
        let got = joint.partial_trace(&["B"]).unwrap();
        let diff = got.matrix() - b.matrix();
        assert!(diff.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn purify_maximally_mixed_gives_bell_type() {
        let rho = maximally_mixed("A", 2);
        let psi = rho.purify("E").unwrap();
        let back = psi.partial_trace(&["A"]).unwrap();
        let diff = back.matrix() - rho.matrix();
        assert!(diff.iter().all(|z| z.norm() < 1e-9));
        // Schmidt weights are 1/2 each, so some amplitude magnitudes are
        // 1/sqrt(2) and the rest vanish.
        let mags: Vec<f64> = psi.amplitudes().iter().map(|z| z.norm()).collect();
        let big: Vec<f64> = mags.iter().copied().filter(|m| *m > 1e-9).collect();
        assert_eq!(big.len(), 2);
        for m in big {
            assert!((m - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        }
    }

    #[test]
    fn purify_rank_deficient_state_round_trips() {
        // Random rank-3 state on a 4-dim system.
        let mut rnd = crate::qcore::selftest::RandomStates::new(11);
        let rho = rnd.density_with_rank(RegisterSystem::single("A", 4), 3);
        let psi = rho.purify("E").unwrap();
        let back = psi.partial_trace(&["A"]).unwrap();
        let worst = (back.matrix() - rho.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "round-trip error {worst}");
    }

    #[test]
    fn purify_pure_state_has_rank_one_env() {
        let psi0 = PureState::basis(RegisterSystem::single("A", 2), &[1]).unwrap();
        let purified = psi0.to_density().purify("E").unwrap();
        let back = purified.partial_trace(&["A"]).unwrap();
        assert!((back.matrix()[(1, 1)].re - 1.0).abs() < 1e-9);
        // Env marginal is pure as well.
        let env = purified.partial_trace(&["E"]).unwrap();
        let purity: f64 = (env.matrix() * env.matrix()).trace().re;
        assert!((purity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dephase_kills_off_diagonals() {
        let sys = RegisterSystem::single("A", 2);
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(
            sys,
            CVector::from_vec(vec![Complex64::new(inv, 0.0), Complex64::new(inv, 0.0)]),
        )
        .unwrap()
        .to_density();
        let dephased = plus.dephase(&["A"]).unwrap();
        assert!(dephased.matrix()[(0, 1)].norm() < 1e-15);
        assert!((dephased.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_matrices_rejected() {
        let sys = RegisterSystem::single("A", 2);
        let mut mat = CMatrix::from_element(2, 2, C_ZERO);
        mat[(0, 0)] = C_ONE;
        mat[(0, 1)] = C_ONE; // not Hermitian
        assert!(DensityOperator::new(sys.clone(), mat).is_err());

        let mut neg = CMatrix::from_element(2, 2, C_ZERO);
        neg[(0, 0)] = Complex64::new(1.5, 0.0);
        neg[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityOperator::new(sys, neg).is_err());
    }
}
