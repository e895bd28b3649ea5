//! Completely positive trace-preserving maps in Kraus form, with isometries
//! as the single-Kraus special case.

use num_complex::Complex64;

use super::density::DensityOperator;
use super::linalg::{require_isometry, CMatrix, C_ONE, C_ZERO};
use super::pure::PureState;
use super::register::RegisterSystem;
use crate::{Error, Result, TOL_VALIDATE};

#[derive(Debug, Clone)]
pub struct QuantumChannel {
    input_system: RegisterSystem,
    output_system: RegisterSystem,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    /// Validates shapes and trace preservation (`Σ K†K = I` within 1e-9).
    pub fn new(
        input_system: RegisterSystem,
        output_system: RegisterSystem,
        kraus: Vec<CMatrix>,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::DimensionMismatch("empty Kraus list".into()));
        }
        let (din, dout) = (input_system.total_dim(), output_system.total_dim());
        for k in &kraus {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus element {}x{} vs expected {}x{}",
                    k.nrows(),
                    k.ncols(),
                    dout,
                    din
                )));
            }
        }
        let mut gram = CMatrix::from_element(din, din, C_ZERO);
        for k in &kraus {
            gram += k.adjoint() * k;
        }
        for i in 0..din {
            for j in 0..din {
                let expect = if i == j { C_ONE } else { C_ZERO };
                let dev = (gram[(i, j)] - expect).norm();
                if dev > TOL_VALIDATE {
                    return Err(Error::InvalidState(format!(
                        "channel not trace preserving: deviation {dev:.3e} at ({i},{j})"
                    )));
                }
            }
        }
        Ok(QuantumChannel {
            input_system,
            output_system,
            kraus,
        })
    }

    /// Single-Kraus isometry (`T†T = I`).
    pub fn isometry(
        input_system: RegisterSystem,
        output_system: RegisterSystem,
        matrix: CMatrix,
    ) -> Result<Self> {
        require_isometry(&matrix, TOL_VALIDATE, "channel isometry")?;
        Self::new(input_system, output_system, vec![matrix])
    }

    /// Isometry defined by an injective map on computational basis digits.
    pub fn classical_isometry(
        input_system: RegisterSystem,
        output_system: RegisterSystem,
        map: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        let (din, dout) = (input_system.total_dim(), output_system.total_dim());
        let mut mat = CMatrix::from_element(dout, din, C_ZERO);
        for col in 0..din {
            let digits = input_system.digits_of(col);
            let image = map(&digits);
            if image.len() != output_system.len() {
                return Err(Error::DimensionMismatch(format!(
                    "basis map returned {} digits for {} output registers",
                    image.len(),
                    output_system.len()
                )));
            }
            mat[(output_system.index_of(&image), col)] = C_ONE;
        }
        Self::isometry(input_system, output_system, mat)
    }

    /// Isometry dilating a stochastic basis map: each input basis state goes
    /// to `Σ_k sqrt(w_k) |out_k>` for the returned `(digits, w_k)` branches.
    /// Distinct inputs must map to orthogonal superpositions.
    pub fn stochastic_isometry(
        input_system: RegisterSystem,
        output_system: RegisterSystem,
        map: impl Fn(&[usize]) -> Vec<(Vec<usize>, f64)>,
    ) -> Result<Self> {
        let (din, dout) = (input_system.total_dim(), output_system.total_dim());
        let mut mat = CMatrix::from_element(dout, din, C_ZERO);
        for col in 0..din {
            let digits = input_system.digits_of(col);
            for (image, weight) in map(&digits) {
                if weight < 0.0 {
                    return Err(Error::InvalidDistribution(format!(
                        "negative branch weight {weight}"
                    )));
                }
                mat[(output_system.index_of(&image), col)] += Complex64::new(weight.sqrt(), 0.0);
            }
        }
        Self::isometry(input_system, output_system, mat)
    }

    /// Identity channel, optionally relabeling registers (dims must match).
    pub fn relabel(input_system: RegisterSystem, output_system: RegisterSystem) -> Result<Self> {
        let d = input_system.total_dim();
        if output_system.total_dim() != d {
            return Err(Error::DimensionMismatch(
                "relabel requires equal dimensions".into(),
            ));
        }
        Self::new(input_system, output_system, vec![CMatrix::identity(d, d)])
    }

    pub fn identity(system: RegisterSystem) -> Self {
        let d = system.total_dim();
        QuantumChannel {
            input_system: system.clone(),
            output_system: system,
            kraus: vec![CMatrix::identity(d, d)],
        }
    }

    /// Depolarizing channel of rate `delta` on a single register:
    /// `ρ ↦ (1-δ)ρ + δ I/d`. Kraus family built from the Weyl shift/phase
    /// operators, d² elements.
    pub fn depolarizing(register: RegisterSystem, delta: f64) -> Result<Self> {
        if register.len() != 1 {
            return Err(Error::DimensionMismatch(
                "depolarizing acts on a single register".into(),
            ));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidDistribution(format!(
                "depolarizing rate {delta} outside [0,1]"
            )));
        }
        let d = register.total_dim();
        let df = d as f64;
        let mut kraus = Vec::with_capacity(d * d);
        let omega = 2.0 * std::f64::consts::PI / df;
        for a in 0..d {
            for b in 0..d {
                let coeff = if a == 0 && b == 0 {
                    (1.0 - delta * (df * df - 1.0) / (df * df)).sqrt()
                } else {
                    delta.sqrt() / df
                };
                let mut k = CMatrix::from_element(d, d, C_ZERO);
                for j in 0..d {
                    // X^a Z^b |j> = ω^{bj} |j+a mod d>
                    let phase = Complex64::from_polar(1.0, omega * (b * j) as f64);
                    k[((j + a) % d, j)] = phase * Complex64::new(coeff, 0.0);
                }
                kraus.push(k);
            }
        }
        Self::new(register.clone(), register, kraus)
    }

    /// Computational-basis dephasing of a single register.
    pub fn dephasing(register: RegisterSystem) -> Result<Self> {
        if register.len() != 1 {
            return Err(Error::DimensionMismatch(
                "dephasing acts on a single register".into(),
            ));
        }
        let d = register.total_dim();
        let kraus = (0..d)
            .map(|i| {
                let mut k = CMatrix::from_element(d, d, C_ZERO);
                k[(i, i)] = C_ONE;
                k
            })
            .collect();
        Self::new(register.clone(), register, kraus)
    }

    pub fn input_system(&self) -> &RegisterSystem {
        &self.input_system
    }

    pub fn output_system(&self) -> &RegisterSystem {
        &self.output_system
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn is_isometry(&self) -> bool {
        self.kraus.len() == 1
            && self.kraus[0].nrows() >= self.kraus[0].ncols()
            && super::linalg::isometry_defect(&self.kraus[0]) <= TOL_VALIDATE
    }

    /// Stinespring dilation: an isometry into output ⊗ environment whose
    /// environment trace reproduces this channel. The environment dimension
    /// is the number of Kraus elements; single-Kraus channels return
    /// themselves unchanged (no environment register added).
    pub fn stinespring_isometry(&self, env_label: &str) -> Result<QuantumChannel> {
        if self.kraus.len() == 1 {
            return Ok(self.clone());
        }
        if self.output_system.contains(env_label) || self.input_system.contains(env_label) {
            return Err(Error::LabelCollision(env_label.to_string()));
        }
        let env_dim = self.kraus.len();
        let (din, dout) = (
            self.input_system.total_dim(),
            self.output_system.total_dim(),
        );
        let out_sys = self
            .output_system
            .tensor(&RegisterSystem::single(env_label, env_dim))?;
        let mut v = CMatrix::from_element(dout * env_dim, din, C_ZERO);
        for (e, k) in self.kraus.iter().enumerate() {
            for o in 0..dout {
                for i in 0..din {
                    v[(o * env_dim + e, i)] = k[(o, i)];
                }
            }
        }
        QuantumChannel::isometry(self.input_system.clone(), out_sys, v)
    }

    /// Where the output block lands in the surviving register order, and the
    /// final system: outputs are inserted at the position of the first input
    /// register; untouched registers keep their relative order.
    fn embedded_output_system(&self, state_system: &RegisterSystem) -> Result<RegisterSystem> {
        let in_labels: Vec<&str> = self.input_system.labels();
        let first_pos = in_labels
            .iter()
            .map(|l| state_system.position(l))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .expect("non-empty input system");
        let survivors = state_system.complement(&in_labels)?;
        for out in self.output_system.labels() {
            if survivors.contains(out) {
                return Err(Error::LabelCollision(out.to_string()));
            }
        }
        let insert_at = state_system.registers()[..first_pos]
            .iter()
            .filter(|r| !in_labels.contains(&r.label.as_str()))
            .count();
        let mut regs = survivors.registers().to_vec();
        for (offset, out_reg) in self.output_system.registers().iter().enumerate() {
            regs.insert(insert_at + offset, out_reg.clone());
        }
        RegisterSystem::new(regs)
    }

    fn check_input_dims(&self, state_system: &RegisterSystem) -> Result<()> {
        for reg in self.input_system.registers() {
            let have = state_system.dim_of(&reg.label)?;
            if have != reg.dim {
                return Err(Error::DimensionMismatch(format!(
                    "register {}: state dim {} vs channel input dim {}",
                    reg.label, have, reg.dim
                )));
            }
        }
        Ok(())
    }

    /// Applies the channel to the subsystem named by its input registers,
    /// acting as the identity on all other registers.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_input_dims(rho.system())?;
        let final_system = self.embedded_output_system(rho.system())?;
        // with_front orders the target block exactly as the channel's input
        // registers are listed.
        let in_labels = self.input_system.labels();
        let fronted = rho.with_front(&in_labels)?;
        let din = self.input_system.total_dim();
        let dout = self.output_system.total_dim();
        let rest = fronted.dim() / din;
        let mat = fronted.matrix();
        let mut out = CMatrix::from_element(dout * rest, dout * rest, C_ZERO);
        let mut tmp = CMatrix::from_element(dout * rest, din * rest, C_ZERO);
        for k in &self.kraus {
            tmp.fill(C_ZERO);
            // tmp = (K ⊗ I) ρ
            for o in 0..dout {
                for i in 0..din {
                    let kc = k[(o, i)];
                    if kc.norm_sqr() < 1e-30 {
                        continue;
                    }
                    for r in 0..rest {
                        let (dst, src) = (o * rest + r, i * rest + r);
                        for col in 0..din * rest {
                            tmp[(dst, col)] += kc * mat[(src, col)];
                        }
                    }
                }
            }
            // out += tmp (K ⊗ I)†
            for o2 in 0..dout {
                for j in 0..din {
                    let kc = k[(o2, j)].conj();
                    if kc.norm_sqr() < 1e-30 {
                        continue;
                    }
                    for s in 0..rest {
                        let (dst, src) = (o2 * rest + s, j * rest + s);
                        for row in 0..dout * rest {
                            out[(row, dst)] += tmp[(row, src)] * kc;
                        }
                    }
                }
            }
        }
        let interim_system = self
            .output_system
            .tensor(&fronted.system().complement(&in_labels)?)?;
        DensityOperator::new_unchecked(interim_system, out).reordered_as(&final_system)
    }

    /// Applies a single-Kraus isometry to a pure state.
    pub fn apply_to_pure(&self, psi: &PureState) -> Result<PureState> {
        if self.kraus.len() != 1 {
            return Err(Error::NotIsometry(
                "pure-state application needs a single-Kraus isometry".into(),
            ));
        }
        require_isometry(&self.kraus[0], TOL_VALIDATE, "pure-state application")?;
        self.check_input_dims(psi.system())?;
        let final_system = self.embedded_output_system(psi.system())?;
        // reshape_front orders rows exactly as the labels are passed, i.e. the
        // channel's input register order.
        let in_labels = self.input_system.labels();
        let (mat, _, rest_sys) = psi.reshape_front(&in_labels)?;
        let rest = rest_sys.total_dim();
        let out_mat = &self.kraus[0] * mat;
        let dout = self.output_system.total_dim();
        let mut amps = super::linalg::CVector::from_element(dout * rest, C_ZERO);
        for o in 0..dout {
            for b in 0..rest {
                amps[o * rest + b] = out_mat[(o, b)];
            }
        }
        let interim_system = self.output_system.tensor(&rest_sys)?;
        PureState::new(interim_system, amps)?.reordered_as(&final_system)
    }
}
