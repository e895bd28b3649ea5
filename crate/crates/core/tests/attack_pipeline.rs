//! End-to-end checks of the cheating pipeline on the bundled fixtures.

use q2pc::attack::{
    attack_joint_distribution, construct_cheat_isometry, execute_attack, extract_q_tilde,
    lemma1_check, theorem1_extract,
};
use q2pc::fixtures::{
    appendix_protocol, classical_reveal_protocol, depolarize_fixture, make_function, FunctionKind,
};
use q2pc::proto::{correctness_epsilon, JointDistribution};

#[test]
fn reveal_eq1_attack_reads_off_bobs_input() {
    let f = make_function(FunctionKind::Eq, 1).unwrap();
    let fixture = classical_reveal_protocol(&f).unwrap();
    let p = JointDistribution::uniform(2, 2);
    let build =
        construct_cheat_isometry(&fixture.protocol, &f, &p, &fixture.ideal_adversary).unwrap();
    assert!(build.eps_sec < 1e-9, "eps_sec = {}", build.eps_sec);
    assert!(
        (build.isometry.achieved_overlap - 1.0).abs() < 1e-9,
        "overlap = {}",
        build.isometry.achieved_overlap
    );

    let q = execute_attack(&fixture.protocol, &p, &build.isometry).unwrap();
    for u in 0..2 {
        for v in 0..2 {
            let got = q.prob(&[u, v], v);
            assert!(
                (got - 1.0).abs() < 1e-9,
                "q({v}|{u},{v}) = {got}, expected 1"
            );
        }
    }

    let q_tilde = extract_q_tilde(&f, &p, &fixture.ideal_adversary).unwrap();
    for v in 0..2 {
        assert!((q_tilde.prob(&[v], v) - 1.0).abs() < 1e-9);
    }

    let report = lemma1_check(&q, &q_tilde, &p, &f, build.eps_sec).unwrap();
    assert!(report.pass);
    assert!((report.avg_success - 1.0).abs() < 1e-9);
    assert!(report.independence_defect < 1e-9);

    for v in 0..2 {
        let ext = theorem1_extract(&q_tilde, &f, v).unwrap();
        assert!(ext.pass, "extraction failed for v={v}: {:?}", ext.violations);
    }
}

#[test]
fn uhlmann_overlap_tracks_security_epsilon_on_noisy_fixture() {
    let f = make_function(FunctionKind::Eq, 1).unwrap();
    let base = classical_reveal_protocol(&f)
        .unwrap()
        .with_id("reveal-eq-n1");
    let noisy = depolarize_fixture(&base, 0.05).unwrap();
    let p = JointDistribution::uniform(2, 2);
    let build =
        construct_cheat_isometry(&noisy.protocol, &f, &p, &noisy.ideal_adversary).unwrap();
    assert!(build.eps_sec > 1e-3, "noise should show: {}", build.eps_sec);
    // Uhlmann optimality transfer: overlap² + ε² = 1 up to numerics.
    let lhs = build.isometry.achieved_overlap.powi(2) + build.eps_sec.powi(2);
    assert!(
        (lhs - 1.0).abs() < 1e-6,
        "overlap² + ε² = {lhs}, overlap {} eps {}",
        build.isometry.achieved_overlap,
        build.eps_sec
    );
}

#[test]
fn lemma1_bounds_hold_on_depolarized_eq1() {
    let f = make_function(FunctionKind::Eq, 1).unwrap();
    let base = classical_reveal_protocol(&f)
        .unwrap()
        .with_id("reveal-eq-n1");
    let p = JointDistribution::uniform(2, 2);
    for delta in [0.01, 0.05] {
        let noisy = depolarize_fixture(&base, delta).unwrap();
        let build =
            construct_cheat_isometry(&noisy.protocol, &f, &p, &noisy.ideal_adversary).unwrap();
        let q = execute_attack(&noisy.protocol, &p, &build.isometry).unwrap();
        let q_tilde = extract_q_tilde(&f, &p, &noisy.ideal_adversary).unwrap();
        let report = lemma1_check(&q, &q_tilde, &p, &f, build.eps_sec).unwrap();
        assert!(
            report.pass,
            "delta={delta}: success {} vs {} / defect {} vs {}",
            report.avg_success,
            report.success_threshold,
            report.independence_defect,
            report.defect_threshold
        );
        // Correctness is dominated by security for these fixtures.
        let eps_corr = correctness_epsilon(&noisy.protocol, &f, &p).unwrap();
        assert!(eps_corr <= build.eps_sec + 1e-9);
    }
}

#[test]
fn appendix_attack_recovers_choice_bit_and_breaks_function() {
    let fixture = appendix_protocol(1).unwrap();
    let f = &fixture.function;
    let p = JointDistribution::uniform(4, 2);
    let build =
        construct_cheat_isometry(&fixture.protocol, f, &p, &fixture.ideal_adversary).unwrap();
    assert!(build.eps_sec < 1e-9);
    assert!((build.isometry.achieved_overlap - 1.0).abs() < 1e-9);

    let q = execute_attack(&fixture.protocol, &p, &build.isometry).unwrap();
    let q_tilde = extract_q_tilde(f, &p, &fixture.ideal_adversary).unwrap();
    let report = lemma1_check(&q, &q_tilde, &p, f, 0.0).unwrap();
    assert!(report.pass);
    assert!((report.avg_success - 1.0).abs() < 1e-9);

    // The attack's ṽ equals Bob's actual choice bit.
    for u in 0..4 {
        for b in 0..2 {
            assert!((q.prob(&[u, b], b) - 1.0).abs() < 1e-9);
        }
    }
    // Knowing ṽ = b, Alice evaluates f(u', b) = (b, s'_b) for every u' of
    // hers at once: the full-row extraction is exact.
    for v in 0..2 {
        let ext = theorem1_extract(&q_tilde, f, v).unwrap();
        assert!(ext.pass);
    }
}

#[test]
fn attack_conditionals_are_distribution_independent() {
    let f = make_function(FunctionKind::Eq, 1).unwrap();
    let fixture = classical_reveal_protocol(&f).unwrap();
    let p_build = JointDistribution::uniform(2, 2);
    let build =
        construct_cheat_isometry(&fixture.protocol, &f, &p_build, &fixture.ideal_adversary)
            .unwrap();
    let p_other = JointDistribution::new(vec![vec![0.5, 0.2], vec![0.2, 0.1]]).unwrap();
    let q_uniform = execute_attack(&fixture.protocol, &p_build, &build.isometry).unwrap();
    let q_other = execute_attack(&fixture.protocol, &p_other, &build.isometry).unwrap();
    for (cond, row) in q_other.rows() {
        for (outcome, prob) in row {
            let reference = q_uniform.prob(cond, *outcome);
            assert!(
                (prob - reference).abs() < 1e-9,
                "conditional changed with ambient distribution at {cond:?}"
            );
        }
    }
}

#[test]
fn perfect_chain_reproduces_product_form() {
    // At ε = 0 the measured joint over (u, v, ṽ, x) must factor as
    // p(u,v)·q̃(ṽ|v) with x = f(u, ṽ).
    let f = make_function(FunctionKind::Eq, 1).unwrap();
    let fixture = classical_reveal_protocol(&f).unwrap();
    let p = JointDistribution::new(vec![vec![0.4, 0.1], vec![0.3, 0.2]]).unwrap();
    let build =
        construct_cheat_isometry(&fixture.protocol, &f, &p, &fixture.ideal_adversary).unwrap();
    let joint = attack_joint_distribution(&fixture.protocol, &p, &build.isometry).unwrap();
    let q_tilde = extract_q_tilde(&f, &p, &fixture.ideal_adversary).unwrap();
    let mut checked = 0usize;
    for (&(u, v, vt, x), &w) in &joint.weights {
        let expect = p.prob(u, v) * q_tilde.prob(&[v], vt);
        assert!((w - expect).abs() < 1e-8, "joint weight off at {u},{v},{vt}");
        assert_eq!(x, f.eval(u, vt));
        checked += 1;
    }
    assert!(checked > 0);
    // r(x|u,v,ṽ) diagnostic is the deterministic point mass on f(u,ṽ).
    let r = joint.r_conditional();
    for (cond, row) in r.rows() {
        let expect = f.eval(cond[0], cond[2]);
        assert!((row.get(&expect).copied().unwrap_or(0.0) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn reveal_attack_roundtrip_is_deterministic() {
    let f = make_function(FunctionKind::Ip, 1).unwrap();
    let fixture = classical_reveal_protocol(&f).unwrap();
    let p = JointDistribution::uniform(2, 2);
    let b1 =
        construct_cheat_isometry(&fixture.protocol, &f, &p, &fixture.ideal_adversary).unwrap();
    let b2 =
        construct_cheat_isometry(&fixture.protocol, &f, &p, &fixture.ideal_adversary).unwrap();
    let q1 = execute_attack(&fixture.protocol, &p, &b1.isometry).unwrap();
    let q2 = execute_attack(&fixture.protocol, &p, &b2.isometry).unwrap();
    for (cond, row) in q1.rows() {
        for (outcome, prob) in row {
            assert_eq!(*prob, q2.prob(cond, *outcome), "nondeterministic pipeline");
        }
    }
}
