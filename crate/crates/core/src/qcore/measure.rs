//! Computational-basis measurement of selected registers.

use super::density::DensityOperator;
use super::linalg::{CMatrix, CVector, C_ZERO};
use super::pure::PureState;
use super::register::RegisterSystem;
use crate::Result;

/// Probability below which an outcome is omitted from measurement results.
const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct MeasurementOutcome<S> {
    /// One digit per measured register, in the order the targets were given.
    pub digits: Vec<usize>,
    pub probability: f64,
    /// Renormalized post-measurement state on the full system, with the
    /// measured registers collapsed onto the outcome.
    pub post_state: S,
}

/// Outcome probabilities for measuring `targets`; zero-probability outcomes
/// omitted. Digits are reported in the order of `targets`.
pub fn outcome_distribution(psi: &PureState, targets: &[&str]) -> Result<Vec<(Vec<usize>, f64)>> {
    let (mat, front_sys, _) = psi.reshape_front(targets)?;
    let mut out = Vec::new();
    for a in 0..front_sys.total_dim() {
        let p: f64 = mat.row(a).iter().map(|z| z.norm_sqr()).sum();
        if p > PROB_FLOOR {
            out.push((front_sys.digits_of(a), p));
        }
    }
    Ok(out)
}

/// As `outcome_distribution`, on a density operator.
pub fn outcome_distribution_density(
    rho: &DensityOperator,
    targets: &[&str],
) -> Result<Vec<(Vec<usize>, f64)>> {
    let fronted = rho.with_front(targets)?;
    let front_sys = fronted.system().subsystem(targets)?;
    let td = front_sys.total_dim();
    let rest = rho.dim() / td;
    let mut out = Vec::new();
    for a in 0..td {
        let mut p = 0.0;
        for r in 0..rest {
            p += fronted.matrix()[(a * rest + r, a * rest + r)].re;
        }
        if p > PROB_FLOOR {
            out.push((front_sys.digits_of(a), p));
        }
    }
    Ok(out)
}

/// Full projective measurement of `targets` on a pure state: outcome tuples,
/// probabilities, and renormalized post-states.
pub fn measure_computational_pure(
    psi: &PureState,
    targets: &[&str],
) -> Result<Vec<MeasurementOutcome<PureState>>> {
    let (mat, front_sys, rest_sys) = psi.reshape_front(targets)?;
    let rest = rest_sys.total_dim();
    let mut outcomes = Vec::new();
    for a in 0..front_sys.total_dim() {
        let p: f64 = mat.row(a).iter().map(|z| z.norm_sqr()).sum();
        if p <= PROB_FLOOR {
            continue;
        }
        let scale = 1.0 / p.sqrt();
        let mut amps = CVector::from_element(front_sys.total_dim() * rest, C_ZERO);
        for b in 0..rest {
            amps[a * rest + b] = mat[(a, b)].scale(scale);
        }
        let collapsed = PureState::new(front_sys.tensor(&rest_sys)?, amps)?
            .reordered_as(psi.system())?;
        outcomes.push(MeasurementOutcome {
            digits: front_sys.digits_of(a),
            probability: p,
            post_state: collapsed,
        });
    }
    Ok(outcomes)
}

/// Full projective measurement of `targets` on a density operator.
pub fn measure_computational(
    rho: &DensityOperator,
    targets: &[&str],
) -> Result<Vec<MeasurementOutcome<DensityOperator>>> {
    let fronted = rho.with_front(targets)?;
    let front_sys = fronted.system().subsystem(targets)?;
    let td = front_sys.total_dim();
    let rest = rho.dim() / td;
    let mut outcomes = Vec::new();
    for a in 0..td {
        let mut p = 0.0;
        for r in 0..rest {
            p += fronted.matrix()[(a * rest + r, a * rest + r)].re;
        }
        if p <= PROB_FLOOR {
            continue;
        }
        let mut block = CMatrix::from_element(td * rest, td * rest, C_ZERO);
        for i in 0..rest {
            for j in 0..rest {
                block[(a * rest + i, a * rest + j)] =
                    fronted.matrix()[(a * rest + i, a * rest + j)].scale(1.0 / p);
            }
        }
        let post = DensityOperator::new_unchecked(fronted.system().clone(), block)
            .reordered_as(rho.system())?;
        outcomes.push(MeasurementOutcome {
            digits: front_sys.digits_of(a),
            probability: p,
            post_state: post,
        });
    }
    Ok(outcomes)
}

/// Helper turning a sparse outcome list into a dense probability vector over
/// the given register system (digit order must match targets order).
pub fn dense_probabilities(
    outcomes: &[(Vec<usize>, f64)],
    system: &RegisterSystem,
) -> Vec<f64> {
    let mut probs = vec![0.0; system.total_dim()];
    for (digits, p) in outcomes {
        probs[system.index_of(digits)] += p;
    }
    probs
}
