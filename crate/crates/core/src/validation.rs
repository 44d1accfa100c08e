//! The invariant suite: twelve numbered criteria, each a list of named checks.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::channels::{covariance_check, Channel, Dephasing, Depolarizing, UnitaryConjugation};
use crate::error::Result;
use crate::figures::{
    self, monte_carlo_agreement, trajectory_table, Fig3Params, Fig4Params, Fig5Params, Fig6Params,
};
use crate::numerics::{matrix_log, DomainMode};
use crate::oracles::{brute_force_moments, qubit_var_clheat, qubit_var_qheat, QubitParams};
use crate::output::Check;
use crate::protocol::{
    enumerate_averages, plan_protocol, report, Imperfection, QubitProtocol, Rotation, Step4,
};
use crate::random;
use crate::states::{
    bloch_coherence, bloch_vector, decohere, kl_divergence, relative_entropy, thermal_populations,
    thermal_state, von_neumann_entropy, DensityMatrix, Hamiltonian,
};
use crate::trajectories::{
    backward_probability_swap, build_step3_ensemble, build_step3_ensemble_with_reference,
    classical_heat_distribution, entropy_production_stats, integral_fluctuation_sum,
    monte_carlo_sample, quantum_heat_distribution, variance_sandwich, Step3Ensemble, SwapBath,
};

pub const CRITERIA: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub corpus_size: usize,
    pub qubit_states: usize,
    pub samples: u64,
    pub workers: usize,
    pub grid: usize,
    /// Perturb one record probability by 1e-3 before the fluctuation-theorem check.
    pub inject_fault: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            corpus_size: 1000,
            qubit_states: 10_000,
            samples: 1_000_000,
            workers: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            grid: 101,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// "[PASS] 3 name" plus the failing checks.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "[{}] {:>2} {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name
        );
        for c in self.checks.iter().filter(|c| !c.passed) {
            s.push_str(&format!("\n       failed: {} ({})", c.name, c.detail));
        }
        s
    }
}

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "vanishing average quantum heat",
        2 => "entropy production equals relative entropies",
        3 => "relative entropy splits into quantum and classical parts",
        4 => "forward/backward ratio and integral fluctuation theorem",
        5 => "quantum heat variance sandwich",
        6 => "qubit closed forms",
        7 => "Fourier-family sweeps",
        8 => "qubit heat footprints",
        9 => "work extraction landscape",
        10 => "quasistatic convergence and protocol bookkeeping",
        11 => "coherence monotonicity and covariance",
        12 => "Monte Carlo consistency",
        _ => "unknown criterion",
    }
}

fn max_check(name: &str, worst: f64, tol: f64) -> Check {
    Check::new(
        name,
        worst <= tol,
        format!("max deviation {worst:.3e} (tolerance {tol:.0e})"),
    )
}

struct Corpus {
    entries: Vec<(random::CorpusEntry, Step3Ensemble)>,
}

fn corpus(cfg: &SuiteConfig) -> Result<Corpus> {
    let mut entries = Vec::with_capacity(cfg.corpus_size);
    for e in random::corpus(cfg.seed, cfg.corpus_size) {
        let ens = build_step3_ensemble(&e.state, &e.hamiltonian, e.temperature)?;
        entries.push((e, ens));
    }
    Ok(Corpus { entries })
}

fn heat_mean(ens: &Step3Ensemble) -> f64 {
    ens.records().iter().map(|r| r.probability * r.q_heat).sum()
}

fn criterion_1(cfg: &SuiteConfig, corpus: &Corpus) -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for (e, ens) in &corpus.entries {
        worst = worst.max(heat_mean(ens).abs());
        let m = brute_force_moments(e.state.matrix(), e.hamiltonian.levels(), e.temperature, 1)?;
        worst_oracle = worst_oracle.max(m.mean_quantum().abs());
    }
    Ok(vec![
        max_check(
            &format!("|<Q_qu>| over {} configurations", cfg.corpus_size),
            worst,
            1e-12,
        ),
        max_check("|<Q_qu>| by brute-force summation", worst_oracle, 1e-12),
    ])
}

fn criterion_2(corpus: &Corpus) -> Result<Vec<Check>> {
    let mut wq: f64 = 0.0;
    let mut wc: f64 = 0.0;
    let mut wo: f64 = 0.0;
    for (e, ens) in &corpus.entries {
        let stats = entropy_production_stats(ens);
        let eta = decohere(&e.state, &e.hamiltonian)?;
        let tau = thermal_populations(&e.hamiltonian, e.temperature)?;
        let d_q = relative_entropy(&e.state, &eta);
        let d_c = kl_divergence(&eta.populations(), &tau);
        wq = wq.max((stats.avg_s_qu - d_q).abs());
        wc = wc.max((stats.avg_s_cl - d_c).abs());
        let m = brute_force_moments(e.state.matrix(), e.hamiltonian.levels(), e.temperature, 1)?;
        wo = wo.max((m.s_qu[1] - d_q).abs()).max((m.s_cl[1] - d_c).abs());
    }
    Ok(vec![
        max_check("<s_qu> = D[rho~||eta~]", wq, 1e-12),
        max_check("<s_cl> = D[eta~||tau]", wc, 1e-12),
        max_check("brute-force entropy averages", wo, 1e-12),
    ])
}

/// tr ρ(ln ρ - ln σ) through matrix logarithms.
fn relative_entropy_direct(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let lr = matrix_log(rho.matrix(), DomainMode::Lenient)?;
    let ls = matrix_log(sigma.matrix(), DomainMode::Strict)?;
    Ok((rho.matrix() * &(&lr - &ls)).trace().re)
}

fn criterion_3(corpus: &Corpus) -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    let mut finite = 0usize;
    for (e, _) in &corpus.entries {
        let tau = thermal_state(&e.hamiltonian, e.temperature)?;
        let eta = decohere(&e.state, &e.hamiltonian)?;
        let total = relative_entropy_direct(&e.state, &tau)?;
        let quantum = relative_entropy_direct(&e.state, &eta)?;
        let classical = kl_divergence(&eta.populations(), &tau.populations());
        if total.is_finite() && quantum.is_finite() && classical.is_finite() {
            finite += 1;
            worst = worst.max((total - quantum - classical).abs());
        }
    }
    Ok(vec![
        max_check("D[rho~||tau] = D[rho~||eta~] + D[eta~||tau]", worst, 1e-12),
        Check::new(
            "finite instances",
            finite == corpus.entries.len(),
            format!("{finite} of {}", corpus.entries.len()),
        ),
    ])
}

fn criterion_4(cfg: &SuiteConfig, corpus: &Corpus) -> Result<Vec<Check>> {
    let mut ratio: f64 = 0.0;
    let mut ift: f64 = 0.0;
    let mut completeness: f64 = 0.0;
    for (i, (_, ens)) in corpus.entries.iter().enumerate() {
        let ens = if cfg.inject_fault && i == 0 {
            let top = (0..ens.len())
                .max_by(|&a, &b| {
                    ens.records()[a]
                        .probability
                        .total_cmp(&ens.records()[b].probability)
                })
                .unwrap_or(0);
            ens.with_perturbed_probability(top, 1e-3)
        } else {
            ens.clone()
        };
        for (k, r) in ens.records().iter().enumerate() {
            if r.probability > 0.0 {
                let back = backward_probability_swap(&ens, k)?;
                ratio = ratio.max(((r.probability / back).ln() - r.s_irr()).abs());
            }
        }
        ift = ift.max((integral_fluctuation_sum(&ens) - 1.0).abs());
        completeness = completeness.max(SwapBath::for_ensemble(&ens).completeness_residual());
    }
    Ok(vec![
        max_check("ln(P/P*) = s_qu + s_cl per record", ratio, 1e-12),
        max_check("<exp(-s_irr)> = 1", ift, 1e-12),
        max_check("swap-bath Kraus completeness", completeness, 1e-12),
    ])
}

fn criterion_5(cfg: &SuiteConfig, corpus: &Corpus) -> Result<Vec<Check>> {
    let alphas: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let mut violations = 0usize;
    let mut oracle: f64 = 0.0;
    for (e, ens) in &corpus.entries {
        let rep = variance_sandwich(&e.state, &e.hamiltonian, &alphas)?;
        if !rep.holds {
            violations += 1;
        }
        let dist = quantum_heat_distribution(ens);
        oracle = oracle.max((dist.variance() - rep.var_qu).abs());
    }
    let mut rng = random::rng(cfg.seed ^ 0x5a5a);
    let mut unsaturated = 0usize;
    let pure_count = cfg.corpus_size.max(4) / 4;
    for i in 0..pure_count {
        let d = 2 + i % 4;
        let psi = random::pure_state(d, &mut rng);
        let h = random::hamiltonian(d, &mut rng);
        let rep = variance_sandwich(&DensityMatrix::pure(&psi)?, &h, &alphas)?;
        if !rep.saturated {
            unsaturated += 1;
        }
    }
    Ok(vec![
        Check::new(
            "Delta(H, rho~) >= Var[Q_qu] >= I_alpha for alpha in 0.1..0.9",
            violations == 0,
            format!("{violations} violations"),
        ),
        max_check("Var[Q_qu] closed form vs atom distribution", oracle, 1e-12),
        Check::new(
            "equalities for pure states",
            unsaturated == 0,
            format!("{unsaturated} of {pure_count} not saturated"),
        ),
    ])
}

fn criterion_6() -> Result<Vec<Check>> {
    let omega = 1.3;
    let h = Hamiltonian::qubit(omega)?;
    let mut wq: f64 = 0.0;
    let mut wc: f64 = 0.0;
    let mut points = 0usize;
    for p in figures::linspace(0.55, 0.99, 10) {
        for theta_tilde in figures::linspace(-PI / 2.0, PI / 2.0, 10) {
            for q1 in figures::linspace(0.05, 0.95, 10) {
                let params = QubitParams {
                    p,
                    theta: 0.0,
                    theta_tilde,
                    omega,
                    q1,
                };
                let ens = build_step3_ensemble_with_reference(
                    &DensityMatrix::qubit(p, theta_tilde)?,
                    &h,
                    &[q1, 1.0 - q1],
                )?;
                wq = wq.max(
                    (quantum_heat_distribution(&ens).variance() - qubit_var_qheat(&params)).abs(),
                );
                wc = wc.max(
                    (classical_heat_distribution(&ens).variance() - qubit_var_clheat(&params))
                        .abs(),
                );
                points += 1;
            }
        }
    }
    let mut wp: f64 = 0.0;
    for theta_tilde in figures::linspace(-PI / 2.0, PI / 2.0, 101) {
        let a = QubitParams {
            p: 0.6,
            theta: 0.0,
            theta_tilde,
            omega,
            q1: 0.5,
        };
        let b = QubitParams { p: 0.95, ..a };
        wp = wp.max((qubit_var_qheat(&a) - qubit_var_qheat(&b)).abs());
    }
    Ok(vec![
        max_check(
            &format!("Var[Q_qu] = w^2(coh - coh^2) on {points} points"),
            wq,
            1e-12,
        ),
        max_check(
            &format!("Var[Q_cl] = w^2[(r - r^2) + (q1 - q1^2)] on {points} points"),
            wc,
            1e-12,
        ),
        max_check("Var[Q_qu] independent of p", wp, 1e-15),
    ])
}

fn criterion_7(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let params = Fig4Params {
        grid: cfg.grid,
        ..Fig4Params::default()
    };
    let mut checks = figures::fig4a(&params)?.checks;
    checks.extend(figures::fig4b(&params)?.checks);
    Ok(checks)
}

fn criterion_8(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let params = Fig5Params {
        grid: cfg.grid,
        ..Fig5Params::default()
    };
    let mut checks = figures::fig5a(&params)?.checks;
    checks.extend(figures::fig5b(&params)?.checks);
    Ok(checks)
}

fn criterion_9(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let params = Fig6Params {
        grid: cfg.grid,
        ..Fig6Params::default()
    };
    let mut checks = figures::fig6(&params)?.checks;
    let w = figures::fig6_report(&params, 0.0, 0.0)?.avg_w_ext / params.temperature;
    checks.push(Check::new(
        "<W_ext>(0, 0) = 0.147045 k_B T",
        (w - 0.147045).abs() <= 1e-6,
        format!("{w:.9}"),
    ));
    Ok(checks)
}

fn criterion_10(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let base = Fig6Params::default();
    let qp =
        QubitProtocol::from_coh_nonth(base.p, base.theta, 0.0, 0.0, base.temperature, base.omega0)?;
    let s4 = |n: usize| -> Result<f64> { Ok(report(&qp.plan(Step4::Steps(n))?)?.avg_s_step4) };
    let mut checks = Vec::new();
    for n in [64, 128, 256] {
        let ratio = s4(n)? / s4(2 * n)?;
        checks.push(Check::new(
            format!("s_step4({n}) / s_step4({}) in [1.8, 2.2]", 2 * n),
            (1.8..=2.2).contains(&ratio),
            format!("{ratio:.6}"),
        ));
    }
    let mut rng = random::rng(cfg.seed ^ 0x0f0f);
    let mut footprint: f64 = 0.0;
    let mut enumerated: f64 = 0.0;
    let mut step4_sum: f64 = 0.0;
    let mut free_energy: f64 = 0.0;
    let specs = 100;
    for i in 0..specs {
        let d = 2 + i % 2;
        let n = rng.gen_range(1..=5) + 1;
        let t = rng.gen_range(0.3..3.0);
        let rho = random::density(d, &mut rng);
        let h0 = random::hamiltonian(d, &mut rng);
        let imp = Imperfection {
            rotation: Rotation::Unitary(random::unitary(d, &mut rng)),
            h1: random::hamiltonian(d, &mut rng),
        };
        let spec = plan_protocol(&rho, &h0, t, &imp, Step4::Steps(n))?;
        let rep = report(&spec)?;
        footprint = footprint.max(rep.footprint_residual);
        let avg = enumerate_averages(&spec, 1_000_000)?;
        let lhs = avg.avg_work;
        let rhs = -rep.delta_f_prot - t * (avg.avg_s_qu + avg.avg_s_cl + avg.avg_s_step4);
        enumerated = enumerated
            .max((lhs - rhs).abs())
            .max((avg.fluctuation_sum - 1.0).abs());
        let analytic: f64 = spec
            .populations
            .windows(2)
            .map(|w| kl_divergence(&w[0], &w[1]))
            .sum();
        step4_sum = step4_sum.max((avg.avg_s_step4 - analytic).abs());
        let eta = DensityMatrix::diagonal(&spec.eta)?;
        let df = -t * (von_neumann_entropy(&eta) - von_neumann_entropy(&rho));
        free_energy = free_energy.max((rep.delta_f_prot - df).abs());
    }
    checks.push(max_check(
        &format!("footprint identity on {specs} seeded specs"),
        footprint,
        1e-10,
    ));
    checks.push(max_check(
        "footprint identity and fluctuation sum by enumeration",
        enumerated,
        1e-10,
    ));
    checks.push(max_check(
        "<s_step4> = sum of D[tau_(i-1)||tau_i]",
        step4_sum,
        1e-12,
    ));
    checks.push(max_check(
        "Delta F = -T(S(eta) - S(rho))",
        free_energy,
        1e-12,
    ));
    Ok(checks)
}

fn criterion_11(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let h = Hamiltonian::qubit(1.0)?;
    let times = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0];
    let mixings = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    let mut rng = random::rng(cfg.seed ^ 0x1111);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cfg.qubit_states {
        let rho = random::density(2, &mut rng);
        let before = bloch_coherence(bloch_vector(&rho)?);
        let channels: Vec<Box<dyn Channel>> = times
            .iter()
            .map(|&t| Dephasing::new(2, t).map(|c| Box::new(c) as Box<dyn Channel>))
            .chain(
                mixings
                    .iter()
                    .map(|&m| Depolarizing::new(2, m).map(|c| Box::new(c) as Box<dyn Channel>)),
            )
            .collect::<Result<_>>()?;
        for ch in &channels {
            let out = DensityMatrix::new(ch.apply(rho.matrix()))?;
            worst = worst.max(bloch_coherence(bloch_vector(&out)?) - before);
        }
    }
    let deph = covariance_check(&Dephasing::new(2, 0.7)?, &h, 100, cfg.seed);
    let depol = covariance_check(&Depolarizing::new(2, 0.3)?, &h, 100, cfg.seed);
    let mut urng = random::rng(cfg.seed ^ 0x2222);
    let rogue = covariance_check(
        &UnitaryConjugation {
            unitary: random::unitary(2, &mut urng),
        },
        &h,
        100,
        cfg.seed,
    );
    Ok(vec![
        Check::new(
            format!("coh(E(rho)) <= coh(rho) over {} states", cfg.qubit_states),
            worst <= 1e-12,
            format!("max increase {worst:.3e}"),
        ),
        Check::new(
            "dephasing is covariant",
            deph.passed,
            format!("{:.3e}", deph.max_residual),
        ),
        Check::new(
            "depolarizing is covariant",
            depol.passed,
            format!("{:.3e}", depol.max_residual),
        ),
        Check::new(
            "random unitary is not covariant",
            !rogue.passed,
            format!("{:.3e}", rogue.max_residual),
        ),
    ])
}

pub fn fig3b_ensemble() -> Result<Step3Ensemble> {
    let p = Fig3Params::default();
    let rho = DensityMatrix::qubit(p.p, p.theta_tilde)?;
    let r = rho.populations()[0];
    build_step3_ensemble_with_reference(&rho, &Hamiltonian::qubit(p.omega)?, &[r, 1.0 - r])
}

fn criterion_12(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let ens = fig3b_ensemble()?;
    let first = monte_carlo_sample(&ens, cfg.samples, cfg.seed, cfg.workers)?;
    let (ok, detail) = monte_carlo_agreement(&ens, &first);
    let again = monte_carlo_sample(&ens, cfg.samples, cfg.seed, 1)?;
    let a = trajectory_table(&ens, Some(&first)).to_csv();
    let b = trajectory_table(&ens, Some(&again)).to_csv();
    Ok(vec![
        Check::new("frequencies within 4 sigma of exact", ok, detail),
        Check::new(
            "byte-identical rerun at fixed seed",
            a == b,
            format!("{} workers vs 1 worker", cfg.workers),
        ),
    ])
}

/// Runs one criterion (1..=12).
pub fn criterion(id: usize, cfg: &SuiteConfig) -> Result<Criterion> {
    let needs_corpus = (1..=5).contains(&id);
    let corpus = if needs_corpus {
        Some(corpus(cfg)?)
    } else {
        None
    };
    run_with(id, cfg, corpus.as_ref())
}

fn run_with(id: usize, cfg: &SuiteConfig, corpus: Option<&Corpus>) -> Result<Criterion> {
    let checks = match (id, corpus) {
        (1, Some(c)) => criterion_1(cfg, c)?,
        (2, Some(c)) => criterion_2(c)?,
        (3, Some(c)) => criterion_3(c)?,
        (4, Some(c)) => criterion_4(cfg, c)?,
        (5, Some(c)) => criterion_5(cfg, c)?,
        (6, _) => criterion_6()?,
        (7, _) => criterion_7(cfg)?,
        (8, _) => criterion_8(cfg)?,
        (9, _) => criterion_9(cfg)?,
        (10, _) => criterion_10(cfg)?,
        (11, _) => criterion_11(cfg)?,
        (12, _) => criterion_12(cfg)?,
        _ => {
            return Err(crate::Error::InvalidArgument(format!(
                "criterion {id} outside 1..={CRITERIA}"
            )))
        }
    };
    Ok(Criterion {
        id,
        name: criterion_name(id),
        checks,
    })
}

/// All twelve criteria, sharing one corpus.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<Criterion>> {
    let c = corpus(cfg)?;
    (1..=CRITERIA)
        .map(|id| run_with(id, cfg, Some(&c)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_fault_is_caught() {
        let cfg = SuiteConfig {
            corpus_size: 40,
            qubit_states: 200,
            samples: 100_000,
            ..SuiteConfig::default()
        };
        let all = run_suite(&cfg).unwrap();
        for c in &all {
            eprintln!("{}", c.summary());
        }
        assert!(all.iter().all(Criterion::passed));
        let faulty = criterion(
            4,
            &SuiteConfig {
                inject_fault: true,
                ..cfg
            },
        )
        .unwrap();
        assert!(!faulty.passed());
    }
}
