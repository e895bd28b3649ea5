//! Acceptance gate: one test per criterion, each printing a pass line.
//! Thresholds and tolerances are pinned in code; no criterion defers to
//! later calibration.

use num_complex::Complex64;

use q2pc::config::{Scenario, ScenarioConfig};
use q2pc::fixtures::two_copies_simulator_check;
use q2pc::game::ip_collision_identity;
use q2pc::qcore::selftest;
use q2pc::report::BoundCheck;
use q2pc::scenarios::{run_scenario, TWO_COPIES_EXPECTED_DISTANCE};

fn assert_all_pass(criterion: &str, checks: &[BoundCheck]) {
    for c in checks {
        assert!(
            c.pass,
            "{criterion}: {} [{}] value={} threshold={}",
            c.name, c.fixture, c.value, c.threshold
        );
    }
}

/// Criterion 1: property-based state-layer oracle suite on ≥ 1000 random
/// instances at dims ≤ 16, within a minute.
#[test]
fn criterion_1_qcore_oracle_suite() {
    let start = std::time::Instant::now();
    let report = selftest::run(20240817, 1).unwrap();
    let instances: usize = report.checks.iter().map(|c| c.instances).sum();
    assert!(instances >= 1000, "only {instances} instances");
    for check in &report.checks {
        assert!(
            check.pass,
            "{}: max_error {:.3e} > {:.3e}",
            check.name, check.max_error, check.tolerance
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "selftest took {elapsed:?}");
    println!("ACCEPTANCE criterion 1 (qcore oracle suite): PASS in {elapsed:?}");
}

/// Criterion 2: perfect-case reproduction on the reveal fixtures for
/// EQ/IP/DISJ at n = 2 — zero epsilons and exact full-row extraction.
#[test]
fn criterion_2_theorem1_reproduction() {
    let cfg = ScenarioConfig::new(Scenario::Theorem1);
    let outcome = run_scenario(&cfg, false).unwrap();
    assert_all_pass("criterion 2", &outcome.report.bound_checks);
    // The scenario covers exactly the three n = 2 reveal fixtures.
    let fixtures: Vec<&str> = outcome
        .report
        .summary
        .iter()
        .map(|r| r.fixture.as_str())
        .collect();
    assert_eq!(
        fixtures,
        vec!["reveal-eq-n2", "reveal-ip-n2", "reveal-disj-n2"]
    );
    println!("ACCEPTANCE criterion 2 (perfect-case attack): PASS");
}

/// Criterion 3: the 6ε bounds on depolarized reveal fixtures at
/// δ ∈ {0.01, 0.05}, with ε_sec measured by the same pipeline.
#[test]
fn criterion_3_lemma1_bounds() {
    let start = std::time::Instant::now();
    let cfg = ScenarioConfig::new(Scenario::Lemma1);
    let outcome = run_scenario(&cfg, false).unwrap();
    assert_all_pass("criterion 3", &outcome.report.bound_checks);
    let deltas: Vec<Option<f64>> = outcome
        .report
        .summary
        .iter()
        .map(|r| r.delta)
        .collect();
    assert!(deltas.contains(&Some(0.01)) && deltas.contains(&Some(0.05)));
    // Strictly noisy fixtures: the measured distances must be bounded away
    // from zero, so the bounds are exercised, not vacuous identities.
    for row in &outcome.report.summary {
        assert!(row.eps_sec.unwrap() > 1e-3);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "lemma1 scenario took {elapsed:?}");
    println!("ACCEPTANCE criterion 3 (6ε bounds): PASS in {elapsed:?}");
}

/// Criterion 4 and the EQ half of criterion 5: the full net + LP pipeline on
/// EQ with |U| = |V| = 4. The net resolution follows the measured security
/// distance, coarsened only as far as the desk-scale cell cap forces; the
/// 28ε threshold always uses the measured ε. The EQ recovery bound runs on
/// the same pipeline output.
#[test]
fn criterion_4_theorem2_and_eq_recovery() {
    let start = std::time::Instant::now();
    let cfg = ScenarioConfig::new(Scenario::StrengthenEq);
    let outcome = run_scenario(&cfg, false).unwrap();
    assert_all_pass("criterion 4", &outcome.report.bound_checks);
    let names: Vec<&str> = outcome
        .report
        .bound_checks
        .iter()
        .map(|c| c.name.as_str())
        .collect();
    for expected in [
        "theorem2_min_success",
        "lp_duality_gap",
        "chain_value_above_lower",
        "chain_value_below_upper",
        "eq_recovery",
    ] {
        assert!(names.contains(&expected), "missing check {expected}");
    }
    let details = &outcome.report.details;
    assert!(details["net_points"].as_u64().unwrap() >= 100);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "theorem2 pipeline took {elapsed:?}");
    println!(
        "ACCEPTANCE criterion 4 (1−28ε via net+LP, {} net points) and EQ recovery: PASS in {elapsed:?}",
        details["net_points"]
    );
}

/// Criterion 5, IP half: recovery at 1 − 56ε on the game pipeline plus the
/// exhaustive collision-factor identity for n ≤ 3.
#[test]
fn criterion_5_ip_strengthening() {
    let cfg = ScenarioConfig::new(Scenario::StrengthenIp);
    let outcome = run_scenario(&cfg, false).unwrap();
    assert_all_pass("criterion 5", &outcome.report.bound_checks);
    for n in 1..=3 {
        assert!(ip_collision_identity(n).unwrap(), "identity fails at n={n}");
    }
    println!("ACCEPTANCE criterion 5 (EQ/IP strengthenings): PASS");
}

/// Criterion 6: the two-copies simulator comparison, with the entangled-case
/// distance checked against an independent raw-matrix oracle and frozen as a
/// regression constant.
#[test]
fn criterion_6_appendix_reproduction() {
    let report = two_copies_simulator_check(1).unwrap();
    assert!(
        report.tv_without_r <= 1e-9,
        "tv_without_r = {}",
        report.tv_without_r
    );
    assert!(report.distance_with_r > 0.1);
    assert!(report.distance_with_r_computational <= 1e-9);

    let oracle_distance = oracle::two_copies_distance();
    assert!(
        (report.distance_with_r - oracle_distance).abs() < 1e-9,
        "pipeline {} vs oracle {}",
        report.distance_with_r,
        oracle_distance
    );
    assert!(
        (report.distance_with_r - TWO_COPIES_EXPECTED_DISTANCE).abs() < 1e-9,
        "regression constant drifted: {}",
        report.distance_with_r
    );
    // The frozen constant itself equals the closed form sqrt(10-4·sqrt(2))/4.
    let closed_form = (10.0f64 - 4.0 * 2.0f64.sqrt()).sqrt() / 4.0;
    assert!((TWO_COPIES_EXPECTED_DISTANCE - closed_form).abs() < 1e-12);
    println!("ACCEPTANCE criterion 6 (two-copies simulator): PASS");
}

/// Criterion 7: qualitative tightness study for disjointness — security
/// untouched, correctness slack positive and shrinking in n, exact-input
/// recovery on high-weight strings well below the equality-style rate.
#[test]
fn criterion_7_disj_tightness() {
    let cfg = ScenarioConfig::new(Scenario::DisjTightness);
    let outcome = run_scenario(&cfg, false).unwrap();
    assert_all_pass("criterion 7", &outcome.report.bound_checks);
    println!("ACCEPTANCE criterion 7 (disjointness tightness): PASS");
}

/// Criterion 8: identical (config, seed) pairs produce byte-identical
/// reports.
#[test]
fn criterion_8_determinism() {
    let mut cfg = ScenarioConfig::new(Scenario::Lemma1);
    cfg.fixture = Some("reveal-eq-n1".into());
    cfg.deltas = vec![0.05];
    cfg.seed = 99;
    let a = run_scenario(&cfg, false).unwrap();
    let b = run_scenario(&cfg, false).unwrap();
    assert_eq!(a.report.to_json(), b.report.to_json());
    assert_eq!(a.bounds_csv(), b.bounds_csv());
    assert_eq!(a.summary_csv(), b.summary_csv());

    let mut st = ScenarioConfig::new(Scenario::QcoreSelftest);
    st.seed = 4242;
    let a = run_scenario(&st, false).unwrap();
    let b = run_scenario(&st, false).unwrap();
    assert_eq!(a.report.to_json(), b.report.to_json());
    println!("ACCEPTANCE criterion 8 (determinism): PASS");
}

/// Raw-matrix oracle for criterion 6: rebuilds both output states of the
/// basis-switching comparison from the measurement postulate alone (no state
/// layer involved) and evaluates the purified distance with a local Jacobi
/// eigensolver.
mod oracle {
    use super::Complex64;

    type Mat = Vec<Vec<Complex64>>;

    fn zeros(n: usize) -> Mat {
        vec![vec![Complex64::new(0.0, 0.0); n]; n]
    }

    fn matmul(a: &Mat, b: &Mat) -> Mat {
        let n = a.len();
        let mut out = zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = a[i][k];
                if aik.norm_sqr() < 1e-300 {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
        out
    }

    /// Cyclic Jacobi eigenvalue iteration for Hermitian matrices.
    fn jacobi_eigen(a: &Mat) -> (Vec<f64>, Mat) {
        let n = a.len();
        let mut m = a.clone();
        let mut v = zeros(n);
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    off += m[p][q].norm_sqr();
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = m[p][q];
                    if apq.norm() < 1e-15 {
                        continue;
                    }
                    let phase = apq / Complex64::new(apq.norm(), 0.0);
                    let tau = (m[q][q].re - m[p][p].re) / (2.0 * apq.norm());
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Columns p and q of m and v rotate; rows follow by
                    // conjugation.
                    for i in 0..n {
                        let (mip, miq) = (m[i][p], m[i][q]);
                        m[i][p] = mip.scale(c) - miq * phase.conj().scale(s);
                        m[i][q] = miq.scale(c) + mip * phase.scale(s);
                        let (vip, viq) = (v[i][p], v[i][q]);
                        v[i][p] = vip.scale(c) - viq * phase.conj().scale(s);
                        v[i][q] = viq.scale(c) + vip * phase.scale(s);
                    }
                    for j in 0..n {
                        let (mpj, mqj) = (m[p][j], m[q][j]);
                        m[p][j] = mpj.scale(c) - mqj * phase.scale(s);
                        m[q][j] = mqj.scale(c) + mpj * phase.conj().scale(s);
                    }
                }
            }
        }
        let vals = (0..n).map(|i| m[i][i].re).collect();
        (vals, v)
    }

    fn sqrtm(a: &Mat) -> Mat {
        let n = a.len();
        let (vals, vecs) = jacobi_eigen(a);
        let mut out = zeros(n);
        for k in 0..n {
            let w = vals[k].max(0.0).sqrt();
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[i][j] += vecs[i][k] * vecs[j][k].conj() * Complex64::new(w, 0.0);
                }
            }
        }
        out
    }

    fn fidelity(rho: &Mat, sigma: &Mat) -> f64 {
        let sr = sqrtm(rho);
        let inner = matmul(&matmul(&sr, sigma), &sr);
        let (vals, _) = jacobi_eigen(&inner);
        vals.into_iter().map(|l| l.max(0.0).sqrt()).sum()
    }

    /// Index into R(s0,s1,b) ⊗ OUT(b',a'): dims 2·2·2·4 = 32 with the two
    /// equal output registers collapsed to one (they are perfectly
    /// correlated on both sides, which leaves the fidelity unchanged).
    fn idx(s0: usize, s1: usize, b: usize, out: usize) -> usize {
        ((s0 * 2 + s1) * 2 + b) * 4 + out
    }

    fn kron_add(target: &mut Mat, w: f64, r_s0: &Mat, b: usize, out: usize) {
        // rho += w · r_s0 ⊗ (I/2 on s1) ⊗ |b><b| ⊗ |out><out|
        for s0 in 0..2 {
            for s0p in 0..2 {
                for s1 in 0..2 {
                    target[idx(s0, s1, b, out)][idx(s0p, s1, b, out)] +=
                        r_s0[s0][s0p].scale(w * 0.5);
                }
            }
        }
    }

    pub fn two_copies_distance() -> f64 {
        let ket = |a: usize| -> Mat {
            let mut m = zeros(2);
            m[a][a] = Complex64::new(1.0, 0.0);
            m
        };
        let hadamard_proj = |a: usize| -> Mat {
            // H|a><a|H: entries ±1/2.
            let sign = if a == 0 { 1.0 } else { -1.0 };
            vec![
                vec![Complex64::new(0.5, 0.0), Complex64::new(sign * 0.5, 0.0)],
                vec![Complex64::new(sign * 0.5, 0.0), Complex64::new(0.5, 0.0)],
            ]
        };

        let n = 32;
        let mut real = zeros(n);
        let mut ideal = zeros(n);
        // Real adversary. b = 0: computational measurement of the first
        // string qubit leaves R's s0 slot collapsed to the outcome, which is
        // distributed as s0 itself; output (0, a).
        for a in 0..2 {
            kron_add(&mut real, 0.5 * 0.5, &ket(a), 0, a);
        }
        // b = 1: Hadamard measurement; R's s0 slot collapses onto H|a>.
        for a in 0..2 {
            kron_add(&mut real, 0.5 * 0.5, &hadamard_proj(a), 1, 2 + a);
        }
        // Two-copies simulator. First a computational measurement (outcome
        // a0, R collapses to |a0>), then a Hadamard measurement whose outcome
        // a1 is uniform and leaves R untouched.
        for a0 in 0..2 {
            // b = 0 branch outputs a0.
            kron_add(&mut ideal, 0.5 * 0.5, &ket(a0), 0, a0);
            // b = 1 branch outputs a1 ~ uniform, independent of a0.
            for a1 in 0..2 {
                kron_add(&mut ideal, 0.5 * 0.25, &ket(a0), 1, 2 + a1);
            }
        }
        let f = fidelity(&real, &ideal).clamp(0.0, 1.0);
        (1.0 - f * f).max(0.0).sqrt()
    }

    #[test]
    fn jacobi_solves_pauli_x() {
        let x = vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ];
        let (mut vals, _) = jacobi_eigen(&x);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] + 1.0).abs() < 1e-10);
        assert!((vals[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn jacobi_handles_complex_entries() {
        let y = vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        ];
        let (mut vals, _) = jacobi_eigen(&y);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] + 1.0).abs() < 1e-10);
        assert!((vals[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oracle_fidelity_on_known_pair() {
        // F(|0><0|, |+><+|) = 1/sqrt(2).
        let zero = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ];
        let plus = vec![
            vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
            vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
        ];
        let f = fidelity(&zero, &plus);
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }
}
