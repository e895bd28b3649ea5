//! Bound checks on the extracted conditionals: average success and
//! independence defect against the `6ε` thresholds, and the perfect-case
//! full-row extractor.

use serde::Serialize;

use crate::proto::{ClassicalFunction, JointDistribution};
use crate::qcore::linalg::kahan_sum;
use crate::Result;

use super::ConditionalDistribution;

/// Slack applied to every asserted bound, absorbing double-precision noise.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Report {
    pub eps: f64,
    pub avg_success: f64,
    pub independence_defect: f64,
    pub success_threshold: f64,
    pub defect_threshold: f64,
    pub success_pass: bool,
    pub defect_pass: bool,
    pub pass: bool,
}

/// Evaluates `Σ p(u,v) q(ṽ|u,v) δ_{f(u,v),f(u,ṽ)}` and
/// `Σ p(u,v) |q(ṽ|u,v) − q̃(ṽ|v)|`, and checks them against `1−6ε` and `6ε`.
pub fn lemma1_check(
    q: &ConditionalDistribution,
    q_tilde: &ConditionalDistribution,
    p: &JointDistribution,
    f: &ClassicalFunction,
    eps: f64,
) -> Result<Lemma1Report> {
    let mut success_terms = Vec::new();
    let mut defect_terms = Vec::new();
    for (u, v) in p.support() {
        let weight = p.prob(u, v);
        let q_row = q.require_row(&[u, v])?;
        let qt_row = q_tilde.require_row(&[v])?;
        for (&vt, &prob) in q_row {
            if f.same_output(u, v, vt) {
                success_terms.push(weight * prob);
            }
        }
        let mut outcomes: Vec<usize> = q_row.keys().copied().collect();
        for &vt in qt_row.keys() {
            if !q_row.contains_key(&vt) {
                outcomes.push(vt);
            }
        }
        for vt in outcomes {
            let a = q_row.get(&vt).copied().unwrap_or(0.0);
            let b = qt_row.get(&vt).copied().unwrap_or(0.0);
            defect_terms.push(weight * (a - b).abs());
        }
    }
    let avg_success = kahan_sum(success_terms);
    let independence_defect = kahan_sum(defect_terms);
    let success_threshold = 1.0 - 6.0 * eps;
    let defect_threshold = 6.0 * eps;
    let success_pass = avg_success >= success_threshold - BOUND_SLACK;
    let defect_pass = independence_defect <= defect_threshold + BOUND_SLACK;
    Ok(Lemma1Report {
        eps,
        avg_success,
        independence_defect,
        success_threshold,
        defect_threshold,
        success_pass,
        defect_pass,
        pass: success_pass && defect_pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Extraction {
    /// Bob's input the extraction was run for.
    pub v: usize,
    /// The full function row `[f(u, v)]_u` Alice reconstructs.
    pub row: Vec<usize>,
    /// Values `ṽ` that occur with positive probability.
    pub occurring: Vec<usize>,
    /// `(u, ṽ)` pairs violating `f(u, ṽ) = f(u, v)`, empty in the perfect case.
    pub violations: Vec<(usize, usize)>,
    pub pass: bool,
}

/// Perfect-case extraction: every `ṽ` with `q̃(ṽ|v) > 0` must reproduce the
/// entire row `f(·, v)`, so Alice can evaluate the function on all her
/// inputs at once.
pub fn theorem1_extract(
    q_tilde: &ConditionalDistribution,
    f: &ClassicalFunction,
    v: usize,
) -> Result<Theorem1Extraction> {
    let row_probs = q_tilde.require_row(&[v])?;
    let mut occurring = Vec::new();
    let mut violations = Vec::new();
    for (&vt, &prob) in row_probs {
        if prob <= 1e-9 {
            continue;
        }
        occurring.push(vt);
        for u in 0..f.u_size() {
            if !f.same_output(u, v, vt) {
                violations.push((u, vt));
            }
        }
    }
    let row = (0..f.u_size()).map(|u| f.eval(u, v)).collect();
    let pass = violations.is_empty() && !occurring.is_empty();
    Ok(Theorem1Extraction {
        v,
        row,
        occurring,
        violations,
        pass,
    })
}
