//! The ideal functionality for a classical function, its augmented variant,
//! and ideal-adversary composition in both purified and density form.

use crate::qcore::linalg::{CMatrix, C_ONE, C_ZERO};
use crate::qcore::{DensityOperator, PureState, QuantumChannel, RegisterSystem};
use crate::{Error, Result};

use super::dist::{input_state, JointDistribution};
use super::function::ClassicalFunction;
use super::{REG_PF, REG_U, REG_V, REG_VT, REG_X, REG_YT};

/// The functionality as a channel: measures `(u_label, v_label)` and writes
/// the function value into fresh `x_label`, `y_label` registers. With
/// `augmented` set it additionally emits the measured `v` in `v_out_label`.
pub fn functionality_channel(
    f: &ClassicalFunction,
    u_label: &str,
    v_label: &str,
    x_label: &str,
    y_label: &str,
    augmented: Option<&str>,
) -> Result<QuantumChannel> {
    let (us, vs, os) = (f.u_size(), f.v_size(), f.out_size());
    let input = RegisterSystem::from_pairs(&[(u_label, us), (v_label, vs)])?;
    let mut out_pairs = vec![(x_label, os), (y_label, os)];
    if let Some(v_out) = augmented {
        out_pairs.push((v_out, vs));
    }
    let output = RegisterSystem::from_pairs(&out_pairs)?;
    let dout = output.total_dim();
    let mut kraus = Vec::with_capacity(us * vs);
    for u in 0..us {
        for v in 0..vs {
            let x = f.eval(u, v);
            let y = f.eval_bob(u, v);
            let mut k = CMatrix::from_element(dout, us * vs, C_ZERO);
            let out_digits: Vec<usize> = if augmented.is_some() {
                vec![x, y, v]
            } else {
                vec![x, y]
            };
            k[(output.index_of(&out_digits), input.index_of(&[u, v]))] = C_ONE;
            kraus.push(k);
        }
    }
    QuantumChannel::new(input, output, kraus)
}

/// Applies the plain functionality `F` to the `(U, Vt)` registers of `rho`,
/// writing outputs into `X` and `Yt`; identity on everything else.
pub fn apply_ideal_functionality(
    f: &ClassicalFunction,
    rho: &DensityOperator,
) -> Result<DensityOperator> {
    functionality_channel(f, REG_U, REG_VT, REG_X, REG_YT, None)?.apply(rho)
}

/// As `apply_ideal_functionality` but using the augmented functionality,
/// which re-emits the measured `v` in the `Vt` register.
pub fn apply_augmented_functionality(
    f: &ClassicalFunction,
    rho: &DensityOperator,
) -> Result<DensityOperator> {
    functionality_channel(f, REG_U, REG_VT, REG_X, REG_YT, Some(REG_VT))?.apply(rho)
}

/// Dishonest Bob in the ideal world: a preprocessing channel `V → Vt ⊗ K…`
/// and a postprocessing channel `K… ⊗ Yt → Y′…`. The honest ideal Bob is the
/// forwarding special case.
#[derive(Debug, Clone)]
pub struct IdealAdversary {
    pre: QuantumChannel,
    post: QuantumChannel,
}

impl IdealAdversary {
    pub fn new(pre: QuantumChannel, post: QuantumChannel) -> Result<Self> {
        if pre.input_system().labels() != vec![REG_V] {
            return Err(Error::Protocol(format!(
                "adversary preprocessing must consume exactly [{}]",
                REG_V
            )));
        }
        if !pre.output_system().contains(REG_VT) {
            return Err(Error::Protocol(format!(
                "adversary preprocessing must emit {}",
                REG_VT
            )));
        }
        if !post.input_system().contains(REG_YT) {
            return Err(Error::Protocol(format!(
                "adversary postprocessing must consume {}",
                REG_YT
            )));
        }
        // Memory registers must agree between the two stages.
        let memory = pre.output_system().complement(&[REG_VT])?;
        let wanted = post.input_system().complement(&[REG_YT])?;
        for reg in memory.registers() {
            let found = wanted
                .registers()
                .iter()
                .find(|r| r.label == reg.label && r.dim == reg.dim);
            if found.is_none() {
                return Err(Error::DimensionMismatch(format!(
                    "adversary memory register {} (dim {}) not consumed by postprocessing",
                    reg.label, reg.dim
                )));
            }
        }
        if memory.len() != wanted.len() {
            return Err(Error::DimensionMismatch(
                "adversary postprocessing consumes registers the preprocessing never made".into(),
            ));
        }
        Ok(IdealAdversary { pre, post })
    }

    /// Honest ideal Bob: forwards `v` and the received output unchanged, with
    /// the output register relabeled `y_label`.
    pub fn forwarding(v_dim: usize, out_dim: usize, y_label: &str) -> Result<Self> {
        let pre = QuantumChannel::relabel(
            RegisterSystem::single(REG_V, v_dim),
            RegisterSystem::single(REG_VT, v_dim),
        )?;
        let post = QuantumChannel::relabel(
            RegisterSystem::single(REG_YT, out_dim),
            RegisterSystem::single(y_label, out_dim),
        )?;
        IdealAdversary::new(pre, post)
    }

    pub fn pre(&self) -> &QuantumChannel {
        &self.pre
    }

    pub fn post(&self) -> &QuantumChannel {
        &self.post
    }

    /// Output register labels (`Y′`) this adversary produces.
    pub fn output_labels(&self) -> Vec<&str> {
        self.post.output_system().labels()
    }
}

/// A purified ideal-world execution: the global pure state together with the
/// labels of its purifying registers (the functionality's measurement
/// environment plus any Stinespring environments of the adversary's
/// channels).
#[derive(Debug, Clone)]
pub struct IdealRun {
    pub state: PureState,
    pub purifier_labels: Vec<String>,
}

impl IdealRun {
    /// σ on everything except the purifiers (including `Vt` when augmented).
    pub fn secure_state(&self) -> Result<DensityOperator> {
        let keep: Vec<&str> = self
            .state
            .system()
            .labels()
            .into_iter()
            .filter(|l| !self.purifier_labels.iter().any(|p| p == l))
            .collect();
        self.state.partial_trace(&keep)
    }
}

const ENV_PRE: &str = "Pb1";
const ENV_POST: &str = "Pb2";

/// Runs the ideal world keeping a global purification: every CPTP stage is
/// replaced by its Stinespring isometry, whose environment register joins the
/// purifier set.
pub fn run_ideal_purified(
    f: &ClassicalFunction,
    p: &JointDistribution,
    adversary: &IdealAdversary,
    augmented: bool,
) -> Result<IdealRun> {
    run_ideal_purified_as(f, p, adversary, augmented, REG_X)
}

/// As `run_ideal_purified`, writing Alice's ideal output under a caller-chosen
/// label (protocols whose output registers shadow the default names need it).
pub fn run_ideal_purified_as(
    f: &ClassicalFunction,
    p: &JointDistribution,
    adversary: &IdealAdversary,
    augmented: bool,
    x_label: &str,
) -> Result<IdealRun> {
    if p.u_size() != f.u_size() || p.v_size() != f.v_size() {
        return Err(Error::DimensionMismatch(
            "distribution domain differs from function domain".into(),
        ));
    }
    let mut purifiers = Vec::new();
    let mut psi = input_state(p)?;

    let pre = adversary.pre().stinespring_isometry(ENV_PRE)?;
    if pre.output_system().contains(ENV_PRE) {
        purifiers.push(ENV_PRE.to_string());
    }
    psi = pre.apply_to_pure(&psi)?;

    // The functionality itself always dilates: its environment keeps the
    // measured input pair.
    let f_channel = functionality_channel(
        f,
        REG_U,
        REG_VT,
        x_label,
        REG_YT,
        if augmented { Some(REG_VT) } else { None },
    )?;
    let f_iso = f_channel.stinespring_isometry(REG_PF)?;
    if f_iso.output_system().contains(REG_PF) {
        purifiers.push(REG_PF.to_string());
    }
    psi = f_iso.apply_to_pure(&psi)?;

    let post = adversary.post().stinespring_isometry(ENV_POST)?;
    if post.output_system().contains(ENV_POST) {
        purifiers.push(ENV_POST.to_string());
    }
    psi = post.apply_to_pure(&psi)?;

    Ok(IdealRun {
        state: psi,
        purifier_labels: purifiers,
    })
}

/// The ideal-world output state `σ` (on `R, X, [Vt,] Y′…`).
pub fn run_ideal(
    f: &ClassicalFunction,
    p: &JointDistribution,
    adversary: &IdealAdversary,
    augmented: bool,
) -> Result<DensityOperator> {
    run_ideal_purified(f, p, adversary, augmented)?.secure_state()
}

/// Density-matrix reference path for `run_ideal`, applying each stage as a
/// Kraus channel. Used as an independent oracle in tests.
pub fn run_ideal_dense(
    f: &ClassicalFunction,
    p: &JointDistribution,
    adversary: &IdealAdversary,
    augmented: bool,
) -> Result<DensityOperator> {
    let mut rho = input_state(p)?.to_density();
    rho = adversary.pre().apply(&rho)?;
    let f_channel = functionality_channel(
        f,
        REG_U,
        REG_VT,
        REG_X,
        REG_YT,
        if augmented { Some(REG_VT) } else { None },
    )?;
    rho = f_channel.apply(&rho)?;
    adversary.post().apply(&rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proto::REG_R;
    use crate::qcore::linalg::C_ZERO;
    use crate::qcore::measure::outcome_distribution_density;

    fn eq1() -> ClassicalFunction {
        ClassicalFunction::new(vec![vec![1, 0], vec![0, 1]], 2).unwrap()
    }

    #[test]
    fn functionality_on_classical_input() {
        // EQ(1,1) = 1: basis input |1>_U |1>_Vt maps to |1>_X |1>_Yt.
        let f = eq1();
        let sys = RegisterSystem::from_pairs(&[(REG_U, 2), (REG_VT, 2)]).unwrap();
        let rho = PureState::basis(sys, &[1, 1]).unwrap().to_density();
        let out = apply_ideal_functionality(&f, &rho).unwrap();
        assert_eq!(out.system().labels(), vec![REG_X, REG_YT]);
        let idx = out.system().index_of(&[1, 1]);
        assert!((out.matrix()[(idx, idx)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn off_diagonal_inputs_decohere_to_zero() {
        // ½(|0>+|1>)(<0|+<1|) on U has off-diagonal |0><1| parts; the output
        // must be the classical mixture of the two diagonal sectors.
        let f = eq1();
        let sys = RegisterSystem::from_pairs(&[(REG_U, 2), (REG_VT, 2)]).unwrap();
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let amps = crate::qcore::linalg::CVector::from_vec(vec![
            num_complex::Complex64::new(inv, 0.0),
            C_ZERO,
            num_complex::Complex64::new(inv, 0.0),
            C_ZERO,
        ]);
        let rho = PureState::new(sys, amps).unwrap().to_density();
        let out = apply_ideal_functionality(&f, &rho).unwrap();
        // u superposed, v=0: outputs 50/50 of f(0,0)=1 and f(1,0)=0, fully
        // decohered.
        let m = out.matrix();
        let i11 = out.system().index_of(&[1, 1]);
        let i00 = out.system().index_of(&[0, 0]);
        assert!((m[(i11, i11)].re - 0.5).abs() < 1e-12);
        assert!((m[(i00, i00)].re - 0.5).abs() < 1e-12);
        assert!(m[(i11, i00)].norm() < 1e-12);
    }

    #[test]
    fn augmented_traces_back_to_plain() {
        let f = eq1();
        let sys = RegisterSystem::from_pairs(&[(REG_U, 2), (REG_VT, 2)]).unwrap();
        for u in 0..2 {
            for v in 0..2 {
                let rho = PureState::basis(sys.clone(), &[u, v]).unwrap().to_density();
                let plain = apply_ideal_functionality(&f, &rho).unwrap();
                let aug = apply_augmented_functionality(&f, &rho).unwrap();
                let traced = aug.partial_trace(&[REG_X, REG_YT]).unwrap();
                let diff = traced.matrix() - plain.matrix();
                assert!(diff.iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn augmented_emits_v_copy() {
        let f = eq1();
        let sys = RegisterSystem::from_pairs(&[(REG_U, 2), (REG_VT, 2)]).unwrap();
        let rho = PureState::basis(sys, &[1, 1]).unwrap().to_density();
        let out = apply_augmented_functionality(&f, &rho).unwrap();
        let idx = out.system().index_of(&[1, 1, 1]);
        assert!((out.matrix()[(idx, idx)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn honest_ideal_run_correlates_outputs_with_reference() {
        let f = eq1();
        let p = JointDistribution::uniform(2, 2);
        let adv = IdealAdversary::forwarding(2, 2, "Y").unwrap();
        let sigma = run_ideal(&f, &p, &adv, false).unwrap();
        let outcomes = outcome_distribution_density(&sigma, &[REG_R, REG_X, "Y"]).unwrap();
        for (digits, prob) in outcomes {
            let (u, v) = super::super::dist::decode_reference(digits[0], 2);
            assert_eq!(digits[1], f.eval(u, v));
            assert_eq!(digits[2], f.eval(u, v));
            assert!((prob - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn purified_and_dense_paths_agree() {
        let f = eq1();
        let p = JointDistribution::new(vec![vec![0.4, 0.1], vec![0.2, 0.3]]).unwrap();
        let adv = IdealAdversary::forwarding(2, 2, "Y").unwrap();
        for augmented in [false, true] {
            let pure_path = run_ideal(&f, &p, &adv, augmented).unwrap();
            let dense_path = run_ideal_dense(&f, &p, &adv, augmented).unwrap();
            let aligned = dense_path.reordered_as(pure_path.system()).unwrap();
            let diff = pure_path.matrix() - aligned.matrix();
            assert!(diff.iter().all(|z| z.norm() < 1e-10));
        }
    }

    #[test]
    fn vt_marginal_uniform_for_uniform_inputs() {
        let f = eq1();
        let p = JointDistribution::uniform(2, 2);
        let adv = IdealAdversary::forwarding(2, 2, "Y").unwrap();
        let sigma = run_ideal(&f, &p, &adv, true).unwrap();
        let vt = sigma.partial_trace(&[REG_VT]).unwrap();
        for v in 0..2 {
            assert!((vt.matrix()[(v, v)].re - 0.5).abs() < 1e-12);
        }
    }
}
