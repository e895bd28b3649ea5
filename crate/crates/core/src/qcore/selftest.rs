//! Seeded random-instance self-test suite for the state layer: metric
//! identities, purification round-trips, channel trace preservation, and
//! Uhlmann optimality, each checked against independent routes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::channel::QuantumChannel;
use super::density::DensityOperator;
use super::linalg::{CMatrix, CVector};
use super::measure::{dense_probabilities, outcome_distribution_density};
use super::metrics::{fidelity, purified_distance, total_variation};
use super::pure::PureState;
use super::register::RegisterSystem;
use super::uhlmann::uhlmann_isometry;
use crate::{Result, TOL_DERIVED};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub instances: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl SelftestReport {
    fn push(&mut self, name: &str, instances: usize, max_error: f64, tolerance: f64) {
        let pass = max_error <= tolerance;
        self.pass &= pass;
        self.checks.push(CheckResult {
            name: name.to_string(),
            instances,
            max_error,
            tolerance,
            pass,
        });
    }
}

pub struct RandomStates {
    rng: ChaCha8Rng,
}

impl RandomStates {
    pub fn new(seed: u64) -> Self {
        RandomStates {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn gaussian(&mut self) -> f64 {
        // Box-Muller.
        let u1: f64 = self.rng.random::<f64>().max(1e-300);
        let u2: f64 = self.rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    fn complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.gaussian(), self.gaussian())
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }

    pub fn pure_state(&mut self, system: RegisterSystem) -> PureState {
        let d = system.total_dim();
        let mut v = CVector::from_fn(d, |_, _| self.complex_gaussian());
        v /= Complex64::new(v.norm(), 0.0);
        PureState::new(system, v).expect("normalized random vector")
    }

    /// Full-rank random density operator via G G† / tr.
    pub fn density(&mut self, system: RegisterSystem) -> DensityOperator {
        let d = system.total_dim();
        let g = self.ginibre(d, d);
        let mut m = &g * g.adjoint();
        let tr = m.trace().re;
        m /= Complex64::new(tr, 0.0);
        DensityOperator::new(system, m).expect("Ginibre state is valid")
    }

    /// Rank-limited random density operator.
    pub fn density_with_rank(&mut self, system: RegisterSystem, rank: usize) -> DensityOperator {
        let d = system.total_dim();
        let g = self.ginibre(d, rank.min(d));
        let mut m = &g * g.adjoint();
        let tr = m.trace().re;
        m /= Complex64::new(tr, 0.0);
        DensityOperator::new(system, m).expect("Ginibre state is valid")
    }

    /// Haar-style random isometry (QR of a Ginibre matrix, phases fixed).
    pub fn isometry(&mut self, rows: usize, cols: usize) -> CMatrix {
        assert!(rows >= cols);
        let g = self.ginibre(rows, cols);
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..cols {
            let d = r[(j, j)];
            if d.norm() > 0.0 {
                let phase = d / Complex64::new(d.norm(), 0.0);
                for i in 0..rows {
                    q[(i, j)] *= phase;
                }
            }
        }
        q
    }

    /// Random CPTP channel on `dim` with the given Kraus count, from a random
    /// Stinespring isometry.
    pub fn channel(&mut self, system: RegisterSystem, kraus_count: usize) -> QuantumChannel {
        let d = system.total_dim();
        let v = self.isometry(d * kraus_count, d);
        let kraus: Vec<CMatrix> = (0..kraus_count)
            .map(|e| {
                CMatrix::from_fn(d, d, |o, i| v[(o * kraus_count + e, i)])
            })
            .collect();
        QuantumChannel::new(system.clone(), system, kraus).expect("Stinespring slices are CPTP")
    }

    pub fn dim_in(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }
}

/// Runs the full suite. `scale` multiplies the instance counts (1 = the
/// acceptance configuration: ≥1000 random instances across checks).
pub fn run(seed: u64, scale: usize) -> Result<SelftestReport> {
    let mut report = SelftestReport {
        seed,
        checks: Vec::new(),
        pass: true,
    };
    let mut rnd = RandomStates::new(seed);
    let scale = scale.max(1);

    // Metric identities on random states.
    {
        let n = 250 * scale;
        let mut worst = 0.0f64;
        for _ in 0..n {
            let d = rnd.dim_in(2, 16);
            let sys = RegisterSystem::single("A", d);
            let rho = rnd.density(sys);
            let f = fidelity(&rho, &rho)?;
            let c = purified_distance(&rho, &rho)?;
            worst = worst.max((f - 1.0).abs()).max(c);
        }
        report.push("fidelity_self_identity", n, worst, 1e-9);
    }

    // Fidelity symmetry.
    {
        let n = 100 * scale;
        let mut worst = 0.0f64;
        for _ in 0..n {
            let d = rnd.dim_in(2, 8);
            let sys = RegisterSystem::single("A", d);
            let (rho, sigma) = (rnd.density(sys.clone()), rnd.density(sys));
            worst = worst.max((fidelity(&rho, &sigma)? - fidelity(&sigma, &rho)?).abs());
        }
        report.push("fidelity_symmetry", n, worst, 1e-9);
    }

    // Purify round-trip on random states up to dim 16.
    {
        let n = 150 * scale;
        let mut worst = 0.0f64;
        for _ in 0..n {
            let d = rnd.dim_in(2, 16);
            let sys = RegisterSystem::single("A", d);
            let rho = rnd.density(sys);
            let psi = rho.purify("E")?;
            let back = psi.partial_trace(&["A"])?;
            let dev = (back.matrix() - rho.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            worst = worst.max(dev);
        }
        report.push("purify_round_trip", n, worst, 1e-9);
    }

    // Channel application preserves trace and positivity.
    {
        let n = 1000 * scale;
        let mut worst_trace = 0.0f64;
        let mut worst_neg = 0.0f64;
        for _ in 0..n {
            let d = rnd.dim_in(2, 8);
            let sys = RegisterSystem::single("A", d);
            let kraus_count = rnd.dim_in(1, 4);
            let ch = rnd.channel(sys.clone(), kraus_count);
            let rho = rnd.density(sys);
            let out = ch.apply(&rho)?;
            worst_trace = worst_trace.max((out.trace().re - 1.0).abs());
            let min_eig = super::linalg::hermitian_eigenvalues(out.matrix())
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            worst_neg = worst_neg.max((-min_eig).max(0.0));
        }
        report.push("channel_trace_preservation", n, worst_trace, 1e-9);
        report.push("channel_positivity", n, worst_neg, TOL_DERIVED);
    }

    // Uhlmann achieved overlap equals fidelity of the reduced states.
    {
        let n = 60 * scale;
        let mut worst = 0.0f64;
        for _ in 0..n {
            let d = rnd.dim_in(2, 4);
            let sys_s = RegisterSystem::single("S", d);
            let rho = rnd.density(sys_s.clone());
            let sigma = rnd.density(sys_s);
            let phi = rho.purify("E")?;
            let psi = sigma.purify("F")?;
            let res = uhlmann_isometry(&phi, &psi, &["E"], &["F"])?;
            let f = fidelity(&rho, &sigma)?;
            worst = worst.max((res.achieved_overlap - f).abs());
        }
        report.push("uhlmann_overlap_equals_fidelity", n, worst, TOL_DERIVED);
    }

    // Uhlmann optimality against Haar-random isometries.
    {
        let n = 10 * scale;
        let samples = 100;
        let mut worst_excess = 0.0f64;
        for _ in 0..n {
            let d = 3;
            let sys_s = RegisterSystem::single("S", d);
            let rho = rnd.density(sys_s.clone());
            let sigma = rnd.density(sys_s);
            let phi = rho.purify("E")?;
            let psi = sigma.purify("F")?;
            let res = uhlmann_isometry(&phi, &psi, &["E"], &["F"])?;
            let in_sys = phi.system().subsystem(&["E"])?;
            let out_sys = psi.system().subsystem(&["F"])?;
            for _ in 0..samples {
                let t = rnd.isometry(d, d);
                let ch = QuantumChannel::isometry(in_sys.clone(), out_sys.clone(), t)?;
                let overlap = ch.apply_to_pure(&phi)?.inner(&psi)?.norm();
                worst_excess = worst_excess.max(overlap - res.achieved_overlap);
            }
        }
        report.push("uhlmann_optimality_haar", n * samples, worst_excess, TOL_DERIVED);
    }

    // Purified distance dominates total variation of measurement outcomes.
    {
        let n = 120 * scale;
        let mut worst = 0.0f64;
        for _ in 0..n {
            let d = rnd.dim_in(2, 8);
            let sys = RegisterSystem::single("A", d);
            let rho = rnd.density(sys.clone());
            let sigma = rnd.density(sys.clone());
            let c = purified_distance(&rho, &sigma)?;
            let p = dense_probabilities(&outcome_distribution_density(&rho, &["A"])?, &sys);
            let q = dense_probabilities(&outcome_distribution_density(&sigma, &["A"])?, &sys);
            let tv = total_variation(&p, &q);
            worst = worst.max(tv - c);
        }
        report.push("purified_distance_dominates_tv", n, worst, 1e-9);
    }

    // Triangle inequality spot-check.
    {
        let n = 80 * scale;
        let mut worst = 0.0f64;
        for _ in 0..n {
            let d = rnd.dim_in(2, 6);
            let sys = RegisterSystem::single("A", d);
            let (a, b, c) = (
                rnd.density(sys.clone()),
                rnd.density(sys.clone()),
                rnd.density(sys),
            );
            let (ab, bc, ac) = (
                purified_distance(&a, &b)?,
                purified_distance(&b, &c)?,
                purified_distance(&a, &c)?,
            );
            worst = worst.max(ac - ab - bc);
        }
        report.push("purified_distance_triangle", n, worst, TOL_DERIVED);
    }

    // Monotonicity under partial trace and channel application.
    {
        let n = 80 * scale;
        let mut worst = 0.0f64;
        for _ in 0..n {
            let da = rnd.dim_in(2, 4);
            let db = rnd.dim_in(2, 2);
            let sys = RegisterSystem::from_pairs(&[("A", da), ("B", db)]).unwrap();
            let rho = rnd.density(sys.clone());
            let sigma = rnd.density(sys.clone());
            let full = purified_distance(&rho, &sigma)?;
            let reduced = purified_distance(
                &rho.partial_trace(&["A"])?,
                &sigma.partial_trace(&["A"])?,
            )?;
            worst = worst.max(reduced - full);
            let ch = rnd.channel(RegisterSystem::single("A", da), 2);
            let mapped = purified_distance(&ch.apply(&rho)?, &ch.apply(&sigma)?)?;
            worst = worst.max(mapped - full);
        }
        report.push("purified_distance_monotone", n, worst, TOL_DERIVED);
    }

    Ok(report)
}
