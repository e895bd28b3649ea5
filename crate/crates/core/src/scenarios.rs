//! Scenario pipelines: each wires fixtures through the attack and game
//! machinery, returning a report with explicit bound checks.

use serde_json::json;

use crate::attack::lemma::BOUND_SLACK;
use crate::attack::{
    construct_cheat_isometry, execute_attack, extract_q_tilde, lemma1_check, theorem1_extract,
    AttackReport,
};
use crate::config::{Scenario, ScenarioConfig};
use crate::error::{Error, Result};
use crate::fixtures::{
    self, depolarize_fixture, depolarize_fixture_on, disj_perturbed_fixture, disj_quantum_fixture,
    load_custom_fixture, two_copies_simulator_check, Fixture,
};
use crate::fixtures::disj::{classical_reference, FlipWrapper};
use crate::game::{
    build_simplex_net, ip_collision_identity, run_theorem2, strengthen_eq, strengthen_ip,
    Theorem2Config, Theorem2Run,
};
use crate::proto::{correctness_epsilon, JointDistribution};
use crate::qcore::selftest;
use crate::report::{bounds_csv, summary_csv, BoundCheck, Report, SummaryRow, REPORT_SCHEMA_VERSION};

/// Frozen regression value for the two-copies comparison at `n = 1`; equals
/// `sqrt(10 - 4·sqrt(2))/4`, confirmed by the independent oracle in the
/// acceptance suite.
pub const TWO_COPIES_EXPECTED_DISTANCE: f64 = 0.521005383279987;

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub report: Report,
}

impl ScenarioOutcome {
    pub fn all_pass(&self) -> bool {
        self.report.all_pass()
    }

    pub fn bounds_csv(&self) -> String {
        bounds_csv(&self.report.bound_checks)
    }

    pub fn summary_csv(&self) -> String {
        summary_csv(&self.report.summary)
    }
}

struct Pieces {
    checks: Vec<BoundCheck>,
    summary: Vec<SummaryRow>,
    details: serde_json::Value,
}

/// Runs the named scenario. With `parallel` set, independent fixtures are
/// evaluated on scoped threads; report ordering stays fixture-sorted either
/// way.
pub fn run_scenario(cfg: &ScenarioConfig, parallel: bool) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let pieces = match cfg.scenario {
        Scenario::Theorem1 => theorem1(cfg, parallel)?,
        Scenario::Lemma1 => lemma1(cfg, parallel)?,
        Scenario::Theorem2 => theorem2(cfg, false)?,
        Scenario::StrengthenEq => theorem2(cfg, true)?,
        Scenario::StrengthenIp => strengthen_ip_scenario(cfg)?,
        Scenario::Appendix => appendix(cfg)?,
        Scenario::DisjTightness => disj_tightness(cfg)?,
        Scenario::QcoreSelftest => qcore_selftest(cfg)?,
    };
    let report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        scenario: cfg.scenario.name().to_string(),
        seed: cfg.seed,
        config_echo: serde_json::to_value(cfg).expect("config serializes"),
        bound_checks: pieces.checks,
        summary: pieces.summary,
        details: pieces.details,
    };
    Ok(ScenarioOutcome { report })
}

fn fixture_list(cfg: &ScenarioConfig, default: &[&str]) -> Vec<String> {
    match &cfg.fixture {
        Some(id) => vec![id.clone()],
        None => default.iter().map(|s| s.to_string()).collect(),
    }
}

/// Resolves a fixture reference: a path to a `.toml`/`.json` file loads a
/// custom fixture (possibly with its own evaluation distribution), anything
/// else is a catalog id.
fn resolve_fixture(reference: &str) -> Result<(Fixture, Option<JointDistribution>)> {
    let path = std::path::Path::new(reference);
    let is_file_ref = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("toml") || e.eq_ignore_ascii_case("json"));
    if is_file_ref {
        let custom = load_custom_fixture(path)?;
        return Ok((custom.fixture, custom.distribution));
    }
    Ok((fixtures::by_id(reference)?, None))
}

/// Runs one closure per fixture id, optionally on scoped threads; results
/// come back in input order.
fn per_fixture<T: Send>(
    ids: &[String],
    parallel: bool,
    job: impl Fn(&str) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    if !parallel || ids.len() < 2 {
        return ids.iter().map(|id| job(id)).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = ids
            .iter()
            .map(|id| scope.spawn(|| job(id)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario worker panicked"))
            .collect()
    })
}

/// Per-fixture evaluation shared by the theorem1 and lemma1 scenarios.
struct FixtureEval {
    fixture_id: String,
    delta: Option<f64>,
    eps_corr: f64,
    eps_sec: f64,
    overlap: f64,
    avg_success: f64,
    independence_defect: f64,
    extraction_ok: bool,
    attack_report: AttackReport,
}

fn evaluate_fixture(
    fx: &Fixture,
    delta: Option<f64>,
    distribution: Option<&JointDistribution>,
) -> Result<FixtureEval> {
    let f = &fx.function;
    let uniform = JointDistribution::uniform(f.u_size(), f.v_size());
    let p = distribution.unwrap_or(&uniform);
    let eps_corr = correctness_epsilon(&fx.protocol, f, p)?;
    let build = construct_cheat_isometry(&fx.protocol, f, p, &fx.ideal_adversary)?;
    let q = execute_attack(&fx.protocol, p, &build.isometry)?;
    let q_tilde = extract_q_tilde(f, p, &fx.ideal_adversary)?;
    let lemma = lemma1_check(&q, &q_tilde, p, f, build.eps_sec)?;
    let mut extraction_ok = true;
    for v in 0..f.v_size() {
        if q_tilde.row(&[v]).is_some() {
            extraction_ok &= theorem1_extract(&q_tilde, f, v)?.pass;
        }
    }
    let attack_report = AttackReport {
        fixture_id: fx.id.clone(),
        eps_corr,
        eps_sec: build.eps_sec,
        achieved_overlap: build.isometry.achieved_overlap,
        avg_success: lemma.avg_success,
        independence_defect: lemma.independence_defect,
        success_threshold: lemma.success_threshold,
        defect_threshold: lemma.defect_threshold,
        success_pass: lemma.success_pass,
        defect_pass: lemma.defect_pass,
        q,
        q_tilde,
    };
    Ok(FixtureEval {
        fixture_id: fx.id.clone(),
        delta,
        eps_corr,
        eps_sec: build.eps_sec,
        overlap: build.isometry.achieved_overlap,
        avg_success: lemma.avg_success,
        independence_defect: lemma.independence_defect,
        extraction_ok,
        attack_report,
    })
}

fn theorem1(cfg: &ScenarioConfig, parallel: bool) -> Result<Pieces> {
    let ids = fixture_list(cfg, &["reveal-eq-n2", "reveal-ip-n2", "reveal-disj-n2"]);
    let evals = per_fixture(&ids, parallel, |id| {
        let (fx, dist) = resolve_fixture(id)?;
        evaluate_fixture(&fx, None, dist.as_ref())
    })?;
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    for e in &evals {
        checks.push(BoundCheck::le(
            "eps_corr_zero",
            &e.fixture_id,
            None,
            e.eps_corr,
            1e-9,
        ));
        checks.push(BoundCheck::le(
            "eps_sec_zero",
            &e.fixture_id,
            None,
            e.eps_sec,
            1e-9,
        ));
        checks.push(BoundCheck::ge(
            "uhlmann_overlap_unit",
            &e.fixture_id,
            None,
            e.overlap,
            1.0 - 1e-9,
        ));
        checks.push(BoundCheck::ge(
            "avg_success_unit",
            &e.fixture_id,
            None,
            e.avg_success,
            1.0 - 1e-9,
        ));
        checks.push(BoundCheck::ge(
            "theorem1_full_row_extraction",
            &e.fixture_id,
            None,
            if e.extraction_ok { 1.0 } else { 0.0 },
            1.0,
        ));
        summary.push(SummaryRow {
            fixture: e.fixture_id.clone(),
            delta: None,
            eps_corr: Some(e.eps_corr),
            eps_sec: Some(e.eps_sec),
            avg_success: Some(e.avg_success),
            threshold_6eps: Some(1.0 - 6.0 * e.eps_sec),
            min_success: None,
            threshold_28eps: None,
            pass: e.extraction_ok,
        });
    }
    let attack_reports: Vec<&AttackReport> = evals.iter().map(|e| &e.attack_report).collect();
    Ok(Pieces {
        checks,
        summary,
        details: json!({ "fixtures": ids, "attack_reports": attack_reports }),
    })
}

fn lemma1(cfg: &ScenarioConfig, parallel: bool) -> Result<Pieces> {
    let ids = fixture_list(cfg, &["reveal-eq-n2", "reveal-ip-n1"]);
    let deltas = if cfg.deltas.is_empty() {
        vec![0.01, 0.05]
    } else {
        cfg.deltas.clone()
    };
    let jobs: Vec<(String, f64)> = ids
        .iter()
        .flat_map(|id| deltas.iter().map(move |d| (id.clone(), *d)))
        .collect();
    let job_ids: Vec<String> = jobs.iter().map(|(id, d)| format!("{id}@{d}")).collect();
    let evals = per_fixture(&job_ids, parallel, |tag| {
        let (id, delta_str) = tag.split_once('@').expect("tagged job id");
        let delta: f64 = delta_str.parse().expect("tagged delta");
        let (base, dist) = resolve_fixture(id)?;
        let noisy = depolarize_fixture(&base, delta)?;
        evaluate_fixture(&noisy, Some(delta), dist.as_ref())
    })?;
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    for e in &evals {
        let thr_success = 1.0 - 6.0 * e.eps_sec;
        checks.push(BoundCheck::ge(
            "lemma1_avg_success",
            &e.fixture_id,
            e.delta,
            e.avg_success,
            thr_success - BOUND_SLACK,
        ));
        checks.push(BoundCheck::le(
            "lemma1_independence_defect",
            &e.fixture_id,
            e.delta,
            e.independence_defect,
            6.0 * e.eps_sec + BOUND_SLACK,
        ));
        checks.push(BoundCheck::le(
            "eps_corr_dominated_by_eps_sec",
            &e.fixture_id,
            e.delta,
            e.eps_corr,
            e.eps_sec + 1e-9,
        ));
        checks.push(BoundCheck::ge(
            "uhlmann_overlap_optimality",
            &e.fixture_id,
            e.delta,
            e.overlap * e.overlap + e.eps_sec * e.eps_sec,
            1.0 - 1e-6,
        ));
        summary.push(SummaryRow {
            fixture: e.fixture_id.clone(),
            delta: e.delta,
            eps_corr: Some(e.eps_corr),
            eps_sec: Some(e.eps_sec),
            avg_success: Some(e.avg_success),
            threshold_6eps: Some(thr_success),
            min_success: None,
            threshold_28eps: None,
            pass: e.avg_success >= thr_success - BOUND_SLACK
                && e.independence_defect <= 6.0 * e.eps_sec + BOUND_SLACK,
        });
    }
    let attack_reports: Vec<&AttackReport> = evals.iter().map(|e| &e.attack_report).collect();
    Ok(Pieces {
        checks,
        summary,
        details: json!({ "deltas": deltas, "attack_reports": attack_reports }),
    })
}

/// Builds the noisy game fixture and picks a net resolution: the measured
/// security distance when the resulting net fits the cell cap, otherwise the
/// coarsest power-of-two multiple that fits.
fn game_setup(cfg: &ScenarioConfig, default_fixture: &str) -> Result<(Fixture, f64, bool)> {
    let ids = fixture_list(cfg, &[default_fixture]);
    let (base, _) = resolve_fixture(&ids[0])?;
    let delta = cfg.deltas.first().copied().unwrap_or(0.01);
    let bob_out = base.protocol.bob_output().to_string();
    let noisy = depolarize_fixture_on(&base, delta, Some(&[bob_out.as_str()]))?;
    let f = &noisy.function;
    let w = f.u_size() * f.v_size();
    let uniform = JointDistribution::uniform(f.u_size(), f.v_size());
    let probe = construct_cheat_isometry(&noisy.protocol, f, &uniform, &noisy.ideal_adversary)?;
    let (net_eps, coarsened) = match cfg.net_eps {
        Some(e) => (e, false),
        None => {
            let mut eps = probe.eps_sec.max(1e-6);
            let mut coarsened = false;
            while build_simplex_net(w, eps, cfg.net_cap).is_err() {
                eps *= 2.0;
                coarsened = true;
                if eps > 64.0 {
                    return Err(Error::Config("net resolution search diverged".into()));
                }
            }
            (eps, coarsened)
        }
    };
    Ok((noisy, net_eps, coarsened))
}

fn theorem2_bounds(run: &Theorem2Run, fixture_id: &str, delta: Option<f64>) -> Vec<BoundCheck> {
    vec![
        BoundCheck::ge(
            "theorem2_min_success",
            fixture_id,
            delta,
            run.check.min_success,
            run.check.threshold - BOUND_SLACK,
        ),
        BoundCheck::le(
            "lp_duality_gap",
            fixture_id,
            delta,
            run.game.duality_gap.abs(),
            1e-9,
        ),
        BoundCheck::ge(
            "chain_value_above_lower",
            fixture_id,
            delta,
            run.chain.min_net_max_payoff,
            run.chain.lower - BOUND_SLACK,
        ),
        BoundCheck::le(
            "chain_value_below_upper",
            fixture_id,
            delta,
            run.chain.min_net_max_payoff,
            run.chain.upper + BOUND_SLACK,
        ),
        BoundCheck::le(
            "eps1_eps2_budget",
            fixture_id,
            delta,
            run.combined.eps1_eps2_budget,
            14.0 * run.eps_used + 2.0 * run.net.resolution + BOUND_SLACK,
        ),
    ]
}

fn theorem2(cfg: &ScenarioConfig, with_eq_recovery: bool) -> Result<Pieces> {
    let (noisy, net_eps, coarsened) = game_setup(cfg, "reveal-eq-n2")?;
    let delta = noisy.noise;
    let t2cfg = Theorem2Config {
        u0: cfg.u0,
        net_eps,
        net_cap: cfg.net_cap,
    };
    let run = run_theorem2(&noisy.protocol, &noisy.function, &noisy.ideal_adversary, &t2cfg)?;
    let mut checks = theorem2_bounds(&run, &noisy.id, delta);
    if with_eq_recovery {
        let rec = strengthen_eq(&run.combined.q, cfg.u0, run.eps_used, noisy.function.v_size())?;
        checks.push(BoundCheck::ge(
            "eq_recovery",
            &noisy.id,
            delta,
            rec.min_recovery,
            rec.threshold - BOUND_SLACK,
        ));
    }
    let summary = vec![SummaryRow {
        fixture: noisy.id.clone(),
        delta,
        eps_corr: None,
        eps_sec: Some(run.eps_used),
        avg_success: None,
        threshold_6eps: None,
        min_success: Some(run.check.min_success),
        threshold_28eps: Some(run.check.threshold),
        pass: checks.iter().all(|c| c.pass),
    }];
    let mut details = json!({
        "net_points": run.net.len(),
        "net_eps": run.net.resolution,
        "net_grid_denominator": run.net.grid_n,
        "net_coarsened": coarsened,
        "eps_used": run.eps_used,
        "game_value": run.game.value,
        "duality_gap": run.game.duality_gap,
        "col_strategy_support": run
            .game
            .col_strategy
            .iter()
            .filter(|w| **w > 1e-12)
            .count(),
        "chain": run.chain,
        "combined_attack": run.combined,
    });
    // Full game artifacts (payoff tensor and strategies) are inspectable for
    // small nets; large nets keep reports lean.
    if run.net.len() <= 256 {
        details["game"] = serde_json::to_value(&run.game).expect("serializable");
    }
    Ok(Pieces {
        checks,
        summary,
        details,
    })
}

fn strengthen_ip_scenario(cfg: &ScenarioConfig) -> Result<Pieces> {
    let (noisy, net_eps, coarsened) = game_setup(cfg, "reveal-ip-n1")?;
    let delta = noisy.noise;
    let t2cfg = Theorem2Config {
        u0: cfg.u0,
        net_eps,
        net_cap: cfg.net_cap,
    };
    let run = run_theorem2(&noisy.protocol, &noisy.function, &noisy.ideal_adversary, &t2cfg)?;
    let mut checks = theorem2_bounds(&run, &noisy.id, delta);
    let rec = strengthen_ip(&run.combined.q, cfg.u0, run.eps_used, noisy.function.v_size())?;
    checks.push(BoundCheck::ge(
        "ip_recovery",
        &noisy.id,
        delta,
        rec.min_recovery,
        rec.threshold - BOUND_SLACK,
    ));
    for n in 1..=3usize {
        checks.push(BoundCheck::ge(
            &format!("ip_collision_identity_n{n}"),
            &noisy.id,
            None,
            if ip_collision_identity(n)? { 1.0 } else { 0.0 },
            1.0,
        ));
    }
    let summary = vec![SummaryRow {
        fixture: noisy.id.clone(),
        delta,
        eps_corr: None,
        eps_sec: Some(run.eps_used),
        avg_success: None,
        threshold_6eps: None,
        min_success: Some(rec.min_recovery),
        threshold_28eps: Some(rec.threshold),
        pass: checks.iter().all(|c| c.pass),
    }];
    let details = json!({
        "net_points": run.net.len(),
        "net_eps": run.net.resolution,
        "net_coarsened": coarsened,
        "eps_used": run.eps_used,
        "game_value": run.game.value,
    });
    Ok(Pieces {
        checks,
        summary,
        details,
    })
}

fn appendix(cfg: &ScenarioConfig) -> Result<Pieces> {
    let ids = fixture_list(cfg, &["appendix-ot-n1"]);
    let (fx, dist) = resolve_fixture(&ids[0])?;
    let eval = evaluate_fixture(&fx, None, dist.as_ref())?;
    let two_copies = two_copies_simulator_check(1)?;
    let checks = vec![
        BoundCheck::le("eps_sec_zero", &fx.id, None, eval.eps_sec, 1e-9),
        BoundCheck::le("eps_corr_zero", &fx.id, None, eval.eps_corr, 1e-9),
        BoundCheck::ge(
            "theorem1_full_row_extraction",
            &fx.id,
            None,
            if eval.extraction_ok { 1.0 } else { 0.0 },
            1.0,
        ),
        BoundCheck::le(
            "two_copies_tv_without_r",
            &fx.id,
            None,
            two_copies.tv_without_r,
            1e-9,
        ),
        BoundCheck::ge(
            "two_copies_distance_with_r",
            &fx.id,
            None,
            two_copies.distance_with_r,
            0.1,
        ),
        BoundCheck::le(
            "two_copies_distance_regression",
            &fx.id,
            None,
            (two_copies.distance_with_r - TWO_COPIES_EXPECTED_DISTANCE).abs(),
            1e-9,
        ),
        BoundCheck::le(
            "two_copies_computational_variant",
            &fx.id,
            None,
            two_copies.distance_with_r_computational,
            1e-9,
        ),
    ];
    let summary = vec![SummaryRow {
        fixture: fx.id.clone(),
        delta: None,
        eps_corr: Some(eval.eps_corr),
        eps_sec: Some(eval.eps_sec),
        avg_success: Some(eval.avg_success),
        threshold_6eps: Some(1.0 - 6.0 * eval.eps_sec),
        min_success: None,
        threshold_28eps: None,
        pass: checks.iter().all(|c| c.pass),
    }];
    let details = serde_json::to_value(&two_copies).expect("serializable");
    Ok(Pieces {
        checks,
        summary,
        details,
    })
}

fn disj_tightness(cfg: &ScenarioConfig) -> Result<Pieces> {
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    let mut reports = Vec::new();
    let mut slacks = Vec::new();
    for n in [4usize, 9] {
        let study = disj_perturbed_fixture(n, cfg.seed)?;
        let report = study.analyze()?;
        let id = format!("disj-perturbed-n{n}");
        checks.push(BoundCheck::le(
            "disj_eps_sec_unchanged",
            &id,
            None,
            (report.eps_sec_perturbed - report.eps_sec_base).abs(),
            1e-8,
        ));
        checks.push(BoundCheck::ge(
            "disj_corr_slack_positive",
            &id,
            None,
            report.eps_corr_perturbed - report.eps_corr_base,
            1e-6,
        ));
        checks.push(BoundCheck::le(
            "disj_error_mass_sqrt_n_scaled",
            &id,
            None,
            report.error_mass * (n as f64).sqrt(),
            0.25,
        ));
        checks.push(BoundCheck::le(
            "disj_recovery_below_eq_style",
            &id,
            None,
            report.recovery_high_weight,
            report.recovery_unperturbed - 0.05,
        ));
        summary.push(SummaryRow {
            fixture: id,
            delta: None,
            eps_corr: Some(report.eps_corr_perturbed),
            eps_sec: Some(report.eps_sec_perturbed),
            avg_success: Some(1.0 - report.error_mass),
            threshold_6eps: None,
            min_success: Some(report.recovery_high_weight),
            threshold_28eps: None,
            pass: true,
        });
        slacks.push(report.eps_corr_perturbed);
        reports.push(report);
    }
    checks.push(BoundCheck::ge(
        "disj_slack_shrinks_with_n",
        "disj-perturbed",
        None,
        slacks[0] - slacks[1],
        1e-6,
    ));
    // Cross-validate the enumeration against the dense pipeline at n = 2.
    let fx = disj_quantum_fixture(2)?;
    let p = JointDistribution::uniform(4, 4);
    let wrapper = FlipWrapper::new(2);
    let (corr_cl, sec_cl) = classical_reference(&fx.function, &p, &wrapper);
    let corr_q = correctness_epsilon(&fx.protocol, &fx.function, &p)?;
    let build = construct_cheat_isometry(&fx.protocol, &fx.function, &p, &fx.ideal_adversary)?;
    checks.push(BoundCheck::le(
        "disj_enumeration_matches_quantum_corr",
        &fx.id,
        None,
        (corr_q - corr_cl).abs(),
        1e-9,
    ));
    checks.push(BoundCheck::le(
        "disj_enumeration_matches_quantum_sec",
        &fx.id,
        None,
        (build.eps_sec - sec_cl).abs(),
        1e-9,
    ));
    // Mark summary pass flags from the full check set.
    for row in &mut summary {
        row.pass = checks
            .iter()
            .filter(|c| c.fixture == row.fixture)
            .all(|c| c.pass);
    }
    Ok(Pieces {
        checks,
        summary,
        details: serde_json::to_value(&reports).expect("serializable"),
    })
}

fn qcore_selftest(cfg: &ScenarioConfig) -> Result<Pieces> {
    let report = selftest::run(cfg.seed, 1)?;
    let checks = report
        .checks
        .iter()
        .map(|c| {
            BoundCheck::le(
                &format!("selftest_{}", c.name),
                "qcore",
                None,
                c.max_error,
                c.tolerance,
            )
        })
        .collect();
    let summary = vec![SummaryRow {
        fixture: "qcore".into(),
        pass: report.pass,
        ..Default::default()
    }];
    Ok(Pieces {
        checks,
        summary,
        details: serde_json::to_value(&report).expect("serializable"),
    })
}
