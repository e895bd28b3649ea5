//! Uhlmann isometry extraction: given two purifications sharing a common
//! subsystem, find the isometry on the environment of the first that
//! maximizes the overlap with the second.

use super::channel::QuantumChannel;
use super::linalg::CMatrix;
use super::pure::PureState;
use super::register::RegisterSystem;
use crate::{Error, Result};

const PAD_LABEL: &str = "_pad";

#[derive(Debug, Clone)]
pub struct UhlmannResult {
    /// Isometry from the env registers of `phi` into the env registers of
    /// `psi` (including the ancilla register `_pad` if padding was needed).
    pub isometry: QuantumChannel,
    /// `|<psi|(T ⊗ id)|phi>|`, which equals the fidelity of the two reduced
    /// states on the shared subsystem.
    pub achieved_overlap: f64,
}

/// Builds the overlap-maximizing isometry `T: env_phi → env_psi`.
///
/// Construction: form the overlap matrix
/// `X[e1,e2] = Σ_a phi[a,e1]·conj(psi[a,e2])`, take the SVD `X = V Σ W†`, and
/// return `T = W V†`. If `dim(env_psi) < dim(env_phi)`, `psi` is first
/// tensored with an ancilla basis state to enlarge the target environment.
pub fn uhlmann_isometry(
    phi: &PureState,
    psi: &PureState,
    env_phi: &[&str],
    env_psi: &[&str],
) -> Result<UhlmannResult> {
    let shared_phi = phi.system().complement(env_phi)?;
    let shared_psi = psi.system().complement(env_psi)?;
    if shared_phi.len() != shared_psi.len() {
        return Err(Error::DimensionMismatch(
            "purifications disagree on the shared subsystem".into(),
        ));
    }
    for reg in shared_phi.registers() {
        let other = shared_psi
            .registers()
            .iter()
            .find(|r| r.label == reg.label)
            .ok_or_else(|| Error::UnknownRegister(format!("shared register {}", reg.label)))?;
        if other.dim != reg.dim {
            return Err(Error::DimensionMismatch(format!(
                "shared register {}: dims {} vs {}",
                reg.label, reg.dim, other.dim
            )));
        }
    }

    let e1 = phi.system().dim_of_set(env_phi)?;
    let e2_raw = psi.system().dim_of_set(env_psi)?;

    // Pad the target environment with an ancilla basis state if too small.
    let mut env_psi_owned: Vec<String> = env_psi.iter().map(|s| s.to_string()).collect();
    let psi_padded: PureState;
    let psi_ref: &PureState = if e2_raw < e1 {
        if psi.system().contains(PAD_LABEL) {
            return Err(Error::LabelCollision(PAD_LABEL.to_string()));
        }
        let pad_dim = e1.div_ceil(e2_raw);
        let pad = PureState::basis(RegisterSystem::single(PAD_LABEL, pad_dim), &[0])?;
        psi_padded = psi.tensor(&pad)?;
        env_psi_owned.push(PAD_LABEL.to_string());
        &psi_padded
    } else {
        psi
    };
    let env_psi_refs: Vec<&str> = env_psi_owned.iter().map(|s| s.as_str()).collect();
    let e2 = psi_ref.system().dim_of_set(&env_psi_refs)?;
    if e2 < e1 {
        return Err(Error::DimensionMismatch(format!(
            "target environment dim {e2} still below source dim {e1} after padding"
        )));
    }

    // Flatten both states as (shared × env) matrices with phi's shared order;
    // env columns run in each state's own register order, matching the
    // channel's input/output systems below.
    let shared_labels = shared_phi.labels();
    let (phi_mat, _, _) = phi.reshape_front(&shared_labels)?;
    let (psi_mat, _, _) = psi_ref.reshape_front(&shared_labels)?;

    // X = Φᵀ Ψ*  (E1 × E2)
    let x = phi_mat.transpose() * psi_mat.map(|z| z.conj());
    debug_assert_eq!(x.nrows(), e1);
    debug_assert_eq!(x.ncols(), e2);

    // T = W V† for X = V Σ W†, with the decomposition taken tier by tier so
    // that singular values many decades below the leading one still steer
    // the isometry (see polar_transport).
    let t: CMatrix = polar_transport(&x)?;

    let in_sys = phi.system().subsystem(env_phi)?;
    let out_sys = psi_ref.system().subsystem(&env_psi_refs)?;
    let isometry = QuantumChannel::isometry(in_sys, out_sys, t)?;

    let mapped = isometry.apply_to_pure(phi)?;
    let overlap = mapped.inner(psi_ref)?.norm();

    Ok(UhlmannResult {
        isometry,
        achieved_overlap: overlap,
    })
}

/// Overlap-maximizing isometry `T = W V†` for `X = V Σ W†`, of shape
/// (cols × rows), requiring `cols ≥ rows`.
///
/// Works through the Hermitian eigendecomposition of `X X†`, one scale tier
/// at a time: the overlap matrix of an almost-point-mass input carries
/// singular values spanning many orders of magnitude, and squaring into the
/// Gram would push the small tiers below machine precision. Each round keeps
/// the directions within a few decades of the current residual norm,
/// projects them out, and rescales what is left, so every direction down to
/// `σ_max·1e-12` is transported faithfully.
fn polar_transport(x: &CMatrix) -> Result<CMatrix> {
    use super::linalg::{hermitian_eigen, C_ZERO};
    use num_complex::Complex64;
    let (rows, cols) = (x.nrows(), x.ncols());
    debug_assert!(cols >= rows);

    let mut v_cols: Vec<super::linalg::CVector> = Vec::with_capacity(rows);
    let mut w_cols: Vec<super::linalg::CVector> = Vec::with_capacity(rows);
    let mut work = x.clone();
    let sigma_global = work.norm().max(f64::MIN_POSITIVE);
    let global_floor = sigma_global * 1e-12;

    while v_cols.len() < rows {
        let scale = work.norm();
        if scale <= global_floor {
            break;
        }
        let scaled = work.map(|z| z / Complex64::new(scale, 0.0));
        let gram = &scaled * scaled.adjoint();
        let (vals, vecs) = hermitian_eigen(&gram);
        let mut order: Vec<usize> = (0..rows).collect();
        order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).expect("finite eigenvalues"));
        // Keep this tier: σ (relative to the residual norm) above 1e-5,
        // comfortably clear of the rescaled Gram's ~1e-8 noise floor.
        let mut kept_any = false;
        for &k in &order {
            if v_cols.len() >= rows {
                break;
            }
            let sigma_rel = vals[k].max(0.0).sqrt();
            if sigma_rel <= 1e-5 {
                break;
            }
            let v_k: super::linalg::CVector = vecs.column(k).into_owned();
            let mut w_k = work.adjoint() * &v_k;
            // Re-orthogonalize against earlier tiers to shed projection
            // residue, then normalize.
            for prior in &w_cols {
                let overlap = prior.dotc(&w_k);
                w_k -= prior * overlap;
            }
            let norm = w_k.norm();
            if norm <= scale * 1e-9 {
                continue;
            }
            w_k /= Complex64::new(norm, 0.0);
            let mut v_clean = v_k;
            for prior in &v_cols {
                let overlap = prior.dotc(&v_clean);
                v_clean -= prior * overlap;
            }
            let vnorm = v_clean.norm();
            if vnorm <= 1e-9 {
                continue;
            }
            v_clean /= Complex64::new(vnorm, 0.0);
            v_cols.push(v_clean);
            w_cols.push(w_k);
            kept_any = true;
        }
        if !kept_any {
            break;
        }
        // Deflate the captured row space and continue with the residual.
        let mut projector = CMatrix::identity(rows, rows);
        for v in &v_cols {
            projector -= v * v.adjoint();
        }
        work = &projector * x;
    }

    // Completion: remaining V slots from the standard basis of the row
    // space, remaining W slots from the standard basis of the column space.
    let complete = |dim: usize, cols_so_far: &mut Vec<super::linalg::CVector>, want: usize| {
        let mut candidate = 0usize;
        while cols_so_far.len() < want && candidate < dim {
            let mut vec = super::linalg::CVector::from_element(dim, C_ZERO);
            vec[candidate] = Complex64::new(1.0, 0.0);
            candidate += 1;
            for _pass in 0..2 {
                for prior in cols_so_far.iter() {
                    let overlap = prior.dotc(&vec);
                    vec -= prior * overlap;
                }
            }
            let norm = vec.norm();
            if norm > 1e-6 {
                vec /= Complex64::new(norm, 0.0);
                cols_so_far.push(vec);
            }
        }
    };
    complete(rows, &mut v_cols, rows);
    complete(cols, &mut w_cols, rows);
    if v_cols.len() < rows || w_cols.len() < rows {
        return Err(Error::Numerics(
            "isometry completion exhausted the basis".into(),
        ));
    }

    let mut t = CMatrix::from_element(cols, rows, C_ZERO);
    for (v_k, w_k) in v_cols.iter().zip(&w_cols) {
        t += w_k * v_k.adjoint();
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{CVector, C_ZERO};
    use crate::qcore::metrics::fidelity;
    use num_complex::Complex64;

    fn bell(labels: (&str, &str), flipped: bool) -> PureState {
        let sys = RegisterSystem::from_pairs(&[(labels.0, 2), (labels.1, 2)]).unwrap();
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = CVector::from_element(4, C_ZERO);
        if flipped {
            amps[1] = Complex64::new(inv, 0.0);
            amps[2] = Complex64::new(inv, 0.0);
        } else {
            amps[0] = Complex64::new(inv, 0.0);
            amps[3] = Complex64::new(inv, 0.0);
        }
        PureState::new(sys, amps).unwrap()
    }

    #[test]
    fn identical_purifications_give_identity_overlap() {
        let phi = bell(("S", "E"), false);
        let res = uhlmann_isometry(&phi, &phi, &["E"], &["E"]).unwrap();
        assert!((res.achieved_overlap - 1.0).abs() < 1e-9);
        let k = &res.isometry.kraus()[0];
        assert!((k[(0, 0)].norm() - 1.0).abs() < 1e-9);
        assert!((k[(1, 1)].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn relabeled_bell_purifications_need_bit_flip() {
        let phi = bell(("S", "E"), false);
        let psi = bell(("S", "F"), true);
        let res = uhlmann_isometry(&phi, &psi, &["E"], &["F"]).unwrap();
        assert!((res.achieved_overlap - 1.0).abs() < 1e-9);
        // T must be an off-diagonal (bit-flip style) unitary up to phases.
        let k = &res.isometry.kraus()[0];
        assert!(k[(0, 0)].norm() < 1e-9);
        assert!((k[(0, 1)].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn overlap_matches_fidelity_of_reductions() {
        // Two fixed mixed states on a 2-dim shared system, purified by hand.
        let make = |w0: f64, rot: f64| {
            let sys = RegisterSystem::from_pairs(&[("S", 2), ("E", 2)]).unwrap();
            let (c, s) = (rot.cos(), rot.sin());
            let mut amps = CVector::from_element(4, C_ZERO);
            // sqrt(w0) |v0>|0> + sqrt(1-w0) |v1>|1>, v0=(c,s), v1=(-s,c)
            let a = w0.sqrt();
            let b = (1.0 - w0).sqrt();
            amps[0] = Complex64::new(a * c, 0.0);
            amps[2] = Complex64::new(a * s, 0.0);
            amps[1] = Complex64::new(-b * s, 0.0);
            amps[3] = Complex64::new(b * c, 0.0);
            PureState::new(sys, amps).unwrap()
        };
        let phi = make(0.8, 0.3);
        let psi = make(0.6, 1.1).rename_register("E", "F").unwrap();
        let res = uhlmann_isometry(&phi, &psi, &["E"], &["F"]).unwrap();
        let rho = phi.partial_trace(&["S"]).unwrap();
        let sigma = psi.partial_trace(&["S"]).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        assert!(
            (res.achieved_overlap - f).abs() < 1e-8,
            "overlap {} vs fidelity {}",
            res.achieved_overlap,
            f
        );
    }

    #[test]
    fn padding_enlarges_small_target_env() {
        // phi has a 4-dim env, psi a 2-dim env of the same reduced state.
        let sys_phi = RegisterSystem::from_pairs(&[("S", 2), ("E", 4)]).unwrap();
        let mut amps = CVector::from_element(8, C_ZERO);
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = Complex64::new(inv, 0.0); // |0>|e=0>
        amps[4 + 1] = Complex64::new(inv, 0.0); // |1>|e=1>
        let phi = PureState::new(sys_phi, amps).unwrap();
        let psi = bell(("S", "F"), false);
        let res = uhlmann_isometry(&phi, &psi, &["E"], &["F"]).unwrap();
        assert!((res.achieved_overlap - 1.0).abs() < 1e-9);
        assert!(res.isometry.output_system().contains("_pad"));
        assert_eq!(res.isometry.output_system().total_dim(), 4);
    }

    #[test]
    fn weak_scale_tiers_are_transported() {
        // Overlap matrix with a strong block and 1e-4-scaled weak rows on
        // disjoint columns: the transport must steer every weak row onto its
        // matching column even though its Gram weight is 1e-8.
        let n = 8usize;
        let mut x = crate::qcore::linalg::CMatrix::from_element(n, n, C_ZERO);
        for i in 0..2 {
            x[(i, i)] = Complex64::new(0.7, 0.0);
        }
        for i in 2..n {
            let col = 2 + (i - 1) % 6;
            x[(i, col)] = Complex64::new(1e-4, 0.0);
        }
        let t = super::polar_transport(&x).unwrap();
        let overlap = (&x * &t).trace();
        assert!(
            (overlap.re - (1.4 + 6e-4)).abs() < 1e-10,
            "overlap {overlap}"
        );
        for i in 2..n {
            let col = 2 + (i - 1) % 6;
            assert!(
                (t[(col, i)].norm() - 1.0).abs() < 1e-9,
                "weak row {i} not transported"
            );
        }
    }

    #[test]
    fn mismatched_shared_systems_rejected() {
        let phi = bell(("S", "E"), false);
        let sys = RegisterSystem::from_pairs(&[("T", 2), ("F", 2)]).unwrap();
        let psi = PureState::basis(sys, &[0, 0]).unwrap();
        assert!(uhlmann_isometry(&phi, &psi, &["E"], &["F"]).is_err());
    }
}
