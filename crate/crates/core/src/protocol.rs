//! Five-step work extraction: rotate, quench, thermalize, slow Hamiltonian sweep, quench back.

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, UNITARY_TOL};
use crate::states::{
    check_dims, check_temperature, decohere, kl_divergence, shannon_entropy, thermal_populations,
    von_neumann_entropy, Configuration, DensityMatrix, Hamiltonian, SUPPORT_TOL,
};
use crate::trajectories::{
    build_step3_ensemble_with_reference, entropy_production_stats, Step3Ensemble,
};

/// Default cap on the number of enumerated full-protocol trajectories.
pub const DEFAULT_ENSEMBLE_CAP: u128 = 10_000_000;
/// Tolerance for τ₁ = η when Step IV is absent.
const TERMINAL_TOL: f64 = 1e-10;

/// How the rotated state ρ̃ is specified.
#[derive(Clone, Debug)]
pub enum Rotation {
    /// ρ̃ = VρV^H.
    Unitary(ComplexMatrix),
    /// ρ̃ given directly; its spectrum must equal that of ρ.
    State(DensityMatrix),
}

#[derive(Clone, Debug)]
pub struct Imperfection {
    pub rotation: Rotation,
    /// Hamiltonian after the first quench.
    pub h1: Hamiltonian,
}

/// Step IV discretization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step4 {
    /// N thermalizing Hamiltonians H¹ … H^N; N = 1 means no sweep.
    Steps(usize),
    /// The N → ∞ limit evaluated analytically.
    Quasistatic,
}

/// Step IV interpolation rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathRule {
    /// Linear in log-populations between τ₁ and η, renormalized.
    LogLinear,
}

#[derive(Clone, Debug)]
pub struct ProtocolSpec {
    pub initial: Configuration,
    pub rho_tilde: DensityMatrix,
    pub h1: Hamiltonian,
    pub step4: Step4,
    pub path_rule: PathRule,
    /// H² … H^N.
    pub path: Vec<Hamiltonian>,
    /// Thermal populations q^(1) … q^(N) (only q^(1) in quasistatic mode).
    pub populations: Vec<Vec<f64>>,
    /// Populations of η, the decohered initial state.
    pub eta: Vec<f64>,
}

impl ProtocolSpec {
    pub fn dim(&self) -> usize {
        self.h1.dim()
    }

    pub fn temperature(&self) -> f64 {
        self.initial.temperature
    }

    /// Number of Hamiltonians in Step III/IV, or `None` in quasistatic mode.
    pub fn steps(&self) -> Option<usize> {
        match self.step4 {
            Step4::Steps(n) => Some(n),
            Step4::Quasistatic => None,
        }
    }

    /// H^(i) for 1 ≤ i ≤ N.
    pub fn hamiltonian(&self, i: usize) -> &Hamiltonian {
        if i == 1 {
            &self.h1
        } else {
            &self.path[i - 2]
        }
    }

    pub fn step3_ensemble(&self) -> Result<Step3Ensemble> {
        build_step3_ensemble_with_reference(&self.rho_tilde, &self.h1, &self.populations[0])
    }
}

fn spectrum_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn plan_protocol(
    rho: &DensityMatrix,
    h0: &Hamiltonian,
    temperature: f64,
    imperfection: &Imperfection,
    step4: Step4,
) -> Result<ProtocolSpec> {
    let initial = Configuration::new(rho.clone(), h0.clone(), temperature)?;
    let d = rho.dim();
    check_dims(d, imperfection.h1.dim())?;
    let pmin = rho.probabilities()[0];
    if pmin <= SUPPORT_TOL {
        return Err(Error::RankDeficientState(pmin));
    }
    if step4 == Step4::Steps(0) {
        return Err(Error::InvalidArgument("Step IV needs N >= 1".into()));
    }
    let rho_tilde = match &imperfection.rotation {
        Rotation::Unitary(v) => {
            check_dims(d, v.dim())?;
            let residual = v.unitary_residual();
            if residual > UNITARY_TOL {
                return Err(Error::NonUnitaryInput { residual });
            }
            let rotated = v * &rho.eigensystem().vectors;
            DensityMatrix::from_spectrum(rho.probabilities(), &rotated)?
        }
        Rotation::State(s) => {
            check_dims(d, s.dim())?;
            let gap = spectrum_gap(rho.probabilities(), s.probabilities());
            if gap > 1e-10 {
                return Err(Error::SpectrumMismatch(gap));
            }
            s.clone()
        }
    };
    let eta = decohere(rho, h0)?.populations();
    if let Some(r) = eta.iter().find(|&&r| r <= SUPPORT_TOL) {
        return Err(Error::InfeasibleTerminal(format!(
            "decohered population {r:.3e} vanishes"
        )));
    }
    let tau1 = thermal_populations(&imperfection.h1, temperature)?;
    let (path, populations) = match step4 {
        Step4::Quasistatic => (Vec::new(), vec![tau1]),
        Step4::Steps(1) => {
            let gap = spectrum_gap(&tau1, &eta);
            if gap > TERMINAL_TOL {
                return Err(Error::InfeasibleTerminal(format!(
                    "without Step IV the thermal state of H1 must equal the decohered state (gap {gap:.3e})"
                )));
            }
            (Vec::new(), vec![tau1])
        }
        Step4::Steps(n) => {
            let path = quasistatic_path(&tau1, &eta, n, temperature)?;
            let mut pops = vec![tau1];
            for h in &path {
                pops.push(thermal_populations(h, temperature)?);
            }
            (path, pops)
        }
    };
    Ok(ProtocolSpec {
        initial,
        rho_tilde,
        h1: imperfection.h1.clone(),
        step4,
        path_rule: PathRule::LogLinear,
        path,
        populations,
        eta,
    })
}

/// H² … H^N with ln q^(i) = (1-s) ln q^(1) + s ln r, s = (i-1)/(N-1), and E^(i) = -T ln q^(i).
pub fn quasistatic_path(
    tau1: &[f64],
    eta: &[f64],
    n: usize,
    temperature: f64,
) -> Result<Vec<Hamiltonian>> {
    check_temperature(temperature)?;
    check_dims(tau1.len(), eta.len())?;
    for &x in tau1.iter().chain(eta) {
        if x <= SUPPORT_TOL {
            return Err(Error::InfeasibleTerminal(format!(
                "population {x:.3e} vanishes"
            )));
        }
    }
    if n <= 1 {
        return Ok(Vec::new());
    }
    let la: Vec<f64> = tau1.iter().map(|x| x.ln()).collect();
    let lb: Vec<f64> = eta.iter().map(|x| x.ln()).collect();
    (2..=n)
        .map(|i| {
            let s = (i - 1) as f64 / (n - 1) as f64;
            let logs: Vec<f64> = la
                .iter()
                .zip(&lb)
                .map(|(a, b)| (1.0 - s) * a + s * b)
                .collect();
            let mx = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = logs.iter().map(|x| (x - mx).exp()).collect();
            let z: f64 = w.iter().sum();
            let q: Vec<f64> = w.iter().map(|x| x / z).collect();
            Hamiltonian::from_populations(&q, temperature)
        })
        .collect()
}

/// One full-protocol trajectory (l, n₀, n₁, …, n_N).
#[derive(Clone, Debug, PartialEq)]
pub struct FullTrajectory {
    pub l: usize,
    /// n₀ (decoherence outcome) through n_N.
    pub path: Vec<usize>,
    pub probability: f64,
    pub s_qu: f64,
    pub s_cl: f64,
    pub s_step4: f64,
    /// <ψ_l|H⁰|ψ_l> - E⁰_{n_N}
    pub delta_u: f64,
    pub q_qu: f64,
    pub q_cl: f64,
    pub q_step4: f64,
}

impl FullTrajectory {
    pub fn s_irr(&self) -> f64 {
        self.s_qu + self.s_cl + self.s_step4
    }

    /// W_ext = ΔU + Q_qu + Q_cl + Q_cl^(IV).
    pub fn work(&self) -> f64 {
        self.delta_u + self.q_qu + self.q_cl + self.q_step4
    }
}

fn finite_steps(spec: &ProtocolSpec) -> Result<usize> {
    spec.steps().ok_or_else(|| {
        Error::InvalidArgument(
            "trajectory enumeration needs a finite number of Step IV Hamiltonians".into(),
        )
    })
}

/// Number of records d^(N+2).
pub fn ensemble_size(spec: &ProtocolSpec) -> Result<u128> {
    let n = finite_steps(spec)?;
    let d = spec.dim() as u128;
    let mut total: u128 = 1;
    for _ in 0..(n + 2) {
        total = total.saturating_mul(d);
    }
    Ok(total)
}

/// Visits every trajectory in (l, n₀, …, n_N) lexicographic order.
pub fn for_each_trajectory(
    spec: &ProtocolSpec,
    cap: u128,
    mut visit: impl FnMut(&FullTrajectory),
) -> Result<()> {
    let n = finite_steps(spec)?;
    let size = ensemble_size(spec)?;
    if size > cap {
        return Err(Error::EnsembleTooLarge(size, cap));
    }
    let d = spec.dim();
    let ens = spec.step3_ensemble()?;
    let p = ens.weights();
    let r = ens.decohered();
    let q = &spec.populations;
    let h0 = spec.initial.hamiltonian.levels();
    let rho = &spec.initial.state;
    let initial_energy: Vec<f64> = (0..d)
        .map(|l| spec.initial.hamiltonian.expectation(&rho.eigenvector(l)))
        .collect();
    let e1 = spec.h1.levels();

    let mut idx = vec![0usize; n + 2];
    loop {
        let l = idx[0];
        let path = &idx[1..];
        let n0 = path[0];
        let mut prob = p[l] * ens.overlap(l, n0);
        for i in 1..=n {
            prob *= q[i - 1][path[i]];
        }
        let mut s_step4 = 0.0;
        let mut q_step4 = 0.0;
        for i in 2..=n {
            let prev = path[i - 1];
            s_step4 += q[i - 2][prev].ln() - q[i - 1][prev].ln();
            let ei = spec.hamiltonian(i).levels();
            q_step4 += ei[path[i]] - ei[prev];
        }
        let rec = FullTrajectory {
            l,
            path: path.to_vec(),
            probability: prob,
            s_qu: p[l].ln() - r[n0].ln(),
            s_cl: r[n0].ln() - q[0][n0].ln(),
            s_step4,
            delta_u: initial_energy[l] - h0[path[n]],
            q_qu: e1[n0] - ens.state_energy(l),
            q_cl: e1[path[1]] - e1[n0],
            q_step4,
        };
        visit(&rec);

        let mut k = n + 1;
        loop {
            idx[k] += 1;
            if idx[k] < d {
                break;
            }
            idx[k] = 0;
            if k == 0 {
                return Ok(());
            }
            k -= 1;
        }
    }
}

pub fn full_trajectory_ensemble(spec: &ProtocolSpec, cap: u128) -> Result<Vec<FullTrajectory>> {
    let mut out = Vec::with_capacity(ensemble_size(spec)?.min(cap) as usize);
    for_each_trajectory(spec, cap, |r| out.push(r.clone()))?;
    Ok(out)
}

/// W_ext of a single record.
pub fn stochastic_work(record: &FullTrajectory) -> f64 {
    record.work()
}

/// Probability-weighted sums accumulated over an enumerated ensemble.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrajectoryAverages {
    pub total_probability: f64,
    pub avg_s_qu: f64,
    pub avg_s_cl: f64,
    pub avg_s_step4: f64,
    pub avg_delta_u: f64,
    pub avg_q_qu: f64,
    pub avg_q_cl: f64,
    pub avg_q_step4: f64,
    pub avg_work: f64,
    /// Σ P e^{-s_irr}
    pub fluctuation_sum: f64,
}

pub fn enumerate_averages(spec: &ProtocolSpec, cap: u128) -> Result<TrajectoryAverages> {
    let mut a = TrajectoryAverages::default();
    for_each_trajectory(spec, cap, |t| {
        let w = t.probability;
        a.total_probability += w;
        if w > 0.0 {
            a.avg_s_qu += w * t.s_qu;
            a.avg_s_cl += w * t.s_cl;
            a.avg_s_step4 += w * t.s_step4;
            a.fluctuation_sum += w * (-t.s_irr()).exp();
        }
        a.avg_delta_u += w * t.delta_u;
        a.avg_q_qu += w * t.q_qu;
        a.avg_q_cl += w * t.q_cl;
        a.avg_q_step4 += w * t.q_step4;
        a.avg_work += w * t.work();
    })?;
    Ok(a)
}

/// Populations of the system at stage i of the full ensemble, from record marginals.
pub fn stage_marginals(spec: &ProtocolSpec, cap: u128) -> Result<Vec<Vec<f64>>> {
    let n = finite_steps(spec)?;
    let d = spec.dim();
    let mut out = vec![vec![0.0; d]; n + 1];
    for_each_trajectory(spec, cap, |t| {
        for (stage, &k) in t.path.iter().enumerate() {
            out[stage][k] += t.probability;
        }
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolReport {
    /// -T(S(η) - S(ρ))
    pub delta_f_prot: f64,
    pub avg_w_ext: f64,
    pub avg_s_qu: f64,
    pub avg_s_cl: f64,
    pub avg_s_step4: f64,
    /// S(η̃) - S(ρ̃)
    pub delta_s_qu: f64,
    /// S(τ₁) - S(η̃)
    pub delta_s_cl: f64,
    /// S(η) - S(τ₁)
    pub delta_s_step4: f64,
    /// S(η) - S(ρ)
    pub delta_s_prot: f64,
    pub avg_q_qu: f64,
    pub avg_q_cl_step3: f64,
    pub avg_q_cl_step4: f64,
    pub avg_delta_u: f64,
    /// T⟨s_cl⟩
    pub q_diss: f64,
    /// T(⟨s_qu⟩ + ⟨s_cl⟩ + ⟨s_step4⟩)
    pub w_irr: f64,
    pub footprint_residual: f64,
    pub degenerate: bool,
}

/// Averages from per-step marginals; O(N d²), so large N is cheap.
pub fn report(spec: &ProtocolSpec) -> Result<ProtocolReport> {
    let t = spec.temperature();
    let ens = spec.step3_ensemble()?;
    let stats = entropy_production_stats(&ens);
    let mut avg_q_qu = 0.0;
    let mut avg_q_cl_step3 = 0.0;
    for r in ens.records() {
        avg_q_qu += r.probability * r.q_heat;
        avg_q_cl_step3 += r.probability * r.cl_heat;
    }
    let s_rho = von_neumann_entropy(&spec.initial.state);
    let s_eta = shannon_entropy(&spec.eta);
    let s_tilde = von_neumann_entropy(&spec.rho_tilde);
    let s_eta_tilde = shannon_entropy(ens.decohered());
    let s_tau1 = shannon_entropy(&spec.populations[0]);

    let (avg_s_step4, avg_q_cl_step4, final_pops) = match spec.step4 {
        Step4::Quasistatic => (0.0, t * (s_eta - s_tau1), spec.eta.clone()),
        Step4::Steps(n) => {
            let q = &spec.populations;
            let mut s4 = 0.0;
            let mut q4 = 0.0;
            for i in 2..=n {
                let e = spec.hamiltonian(i).levels();
                s4 += kl_divergence(&q[i - 2], &q[i - 1]);
                let after: f64 = q[i - 1].iter().zip(e).map(|(a, b)| a * b).sum();
                let before: f64 = q[i - 2].iter().zip(e).map(|(a, b)| a * b).sum();
                q4 += after - before;
            }
            (s4, q4, q[n - 1].clone())
        }
    };

    let rho = &spec.initial.state;
    let h0 = &spec.initial.hamiltonian;
    let initial_energy: f64 = (0..rho.dim())
        .map(|l| rho.probabilities()[l] * h0.expectation(&rho.eigenvector(l)))
        .sum();
    let final_energy: f64 = final_pops.iter().zip(h0.levels()).map(|(a, b)| a * b).sum();
    let avg_delta_u = initial_energy - final_energy;
    let avg_w_ext = avg_delta_u + avg_q_qu + avg_q_cl_step3 + avg_q_cl_step4;
    let delta_f_prot = -t * (s_eta - s_rho);
    let w_irr = t * (stats.avg_s_qu + stats.avg_s_cl + avg_s_step4);
    Ok(ProtocolReport {
        delta_f_prot,
        avg_w_ext,
        avg_s_qu: stats.avg_s_qu,
        avg_s_cl: stats.avg_s_cl,
        avg_s_step4,
        delta_s_qu: s_eta_tilde - s_tilde,
        delta_s_cl: s_tau1 - s_eta_tilde,
        delta_s_step4: s_eta - s_tau1,
        delta_s_prot: s_eta - s_rho,
        avg_q_qu,
        avg_q_cl_step3,
        avg_q_cl_step4,
        avg_delta_u,
        q_diss: t * stats.avg_s_cl,
        w_irr,
        footprint_residual: (avg_w_ext - (-delta_f_prot - w_irr)).abs(),
        degenerate: spec.rho_tilde.is_degenerate() || rho.is_degenerate(),
    })
}

/// Qubit protocol parameters: ρ = ρ_θ(p), ρ̃ = ρ_θ̃(p), H⁰ = qubit(ω₀) and H¹ fixed by q₁ at T.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitProtocol {
    pub p: f64,
    pub theta: f64,
    pub theta_tilde: f64,
    pub q1: f64,
    pub temperature: f64,
    pub omega0: f64,
}

impl QubitProtocol {
    /// Parameters from the coherence and non-thermality of ρ̃: θ̃ = 2 arcsin √coh, q₁ = r_θ̃ e^{nonth}.
    pub fn from_coh_nonth(
        p: f64,
        theta: f64,
        coh: f64,
        nonth: f64,
        temperature: f64,
        omega0: f64,
    ) -> Result<Self> {
        if !(0.0..=0.5).contains(&coh) {
            return Err(Error::InvalidArgument(format!(
                "coherence {coh} outside [0, 1/2]"
            )));
        }
        let theta_tilde = 2.0 * coh.sqrt().asin();
        let r = qubit_ground_population(p, theta_tilde);
        let q1 = r * nonth.exp();
        if !(q1 > 0.0 && q1 < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "non-thermality {nonth} gives ground population {q1} outside (0, 1)"
            )));
        }
        Ok(QubitProtocol {
            p,
            theta,
            theta_tilde,
            q1,
            temperature,
            omega0,
        })
    }

    pub fn plan(&self, step4: Step4) -> Result<ProtocolSpec> {
        let rho = DensityMatrix::qubit(self.p, self.theta)?;
        let rho_tilde = DensityMatrix::qubit(self.p, self.theta_tilde)?;
        let h0 = Hamiltonian::qubit(self.omega0)?;
        let h1 = Hamiltonian::from_populations(&[self.q1, 1.0 - self.q1], self.temperature)?;
        plan_protocol(
            &rho,
            &h0,
            self.temperature,
            &Imperfection {
                rotation: Rotation::State(rho_tilde),
                h1,
            },
            step4,
        )
    }
}

/// r_θ = p cos²(θ/2) + (1-p) sin²(θ/2).
pub fn qubit_ground_population(p: f64, theta: f64) -> f64 {
    let (s, c) = (theta / 2.0).sin_cos();
    p * c * c + (1.0 - p) * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn binary_entropy(x: f64) -> f64 {
        -x * x.ln() - (1.0 - x) * (1.0 - x).ln()
    }

    #[test]
    fn optimum_work_at_origin() {
        let qp = QubitProtocol::from_coh_nonth(0.8, PI / 3.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        let rep = report(&qp.plan(Step4::Quasistatic).unwrap()).unwrap();
        let oracle = binary_entropy(0.65) - binary_entropy(0.8);
        assert!((rep.avg_w_ext - oracle).abs() < 1e-12);
        assert!((rep.avg_w_ext - 0.147045).abs() < 1e-6);
        assert!(rep.footprint_residual < 1e-12);
        assert!(rep.avg_delta_u.abs() < 1e-12);
    }

    #[test]
    fn skipping_the_rotation_extracts_nothing() {
        let coh = (PI / 6.0).sin().powi(2);
        let qp = QubitProtocol::from_coh_nonth(0.8, PI / 3.0, coh, 0.0, 1.0, 1.0).unwrap();
        let rep = report(&qp.plan(Step4::Quasistatic).unwrap()).unwrap();
        assert!(rep.avg_w_ext.abs() < 1e-12);
    }

    #[test]
    fn enumeration_matches_marginal_sums() {
        let qp = QubitProtocol::from_coh_nonth(0.8, PI / 3.0, 0.1, -0.2, 1.0, 1.3).unwrap();
        let spec = qp.plan(Step4::Steps(2)).unwrap();
        let recs = full_trajectory_ensemble(&spec, DEFAULT_ENSEMBLE_CAP).unwrap();
        assert_eq!(recs.len(), 16);
        let avg = enumerate_averages(&spec, DEFAULT_ENSEMBLE_CAP).unwrap();
        let rep = report(&spec).unwrap();
        assert!((avg.total_probability - 1.0).abs() < 1e-12);
        assert!((avg.avg_work - rep.avg_w_ext).abs() < 1e-12);
        assert!((avg.avg_s_step4 - rep.avg_s_step4).abs() < 1e-12);
        assert!((avg.avg_s_qu - rep.avg_s_qu).abs() < 1e-12);
        assert!((avg.fluctuation_sum - 1.0).abs() < 1e-12);
        let tau2 = &spec.populations[1];
        assert!(spectrum_gap(tau2, &spec.eta) < 1e-12);
        assert!((rep.avg_s_step4 - kl_divergence(&spec.populations[0], tau2)).abs() < 1e-15);
    }

    #[test]
    fn single_step_requires_matching_terminal() {
        let qp = QubitProtocol::from_coh_nonth(0.8, PI / 3.0, 0.0, 0.1, 1.0, 1.0).unwrap();
        assert!(matches!(
            qp.plan(Step4::Steps(1)),
            Err(Error::InfeasibleTerminal(_))
        ));
        let ok = QubitProtocol::from_coh_nonth(0.8, PI / 3.0, 0.0, (0.65f64 / 0.8).ln(), 1.0, 1.0)
            .unwrap();
        let spec = ok.plan(Step4::Steps(1)).unwrap();
        assert!(report(&spec).unwrap().footprint_residual < 1e-12);
    }

    #[test]
    fn rank_deficient_state_rejected() {
        let rho = DensityMatrix::qubit(1.0, 0.3).unwrap();
        let h = Hamiltonian::qubit(1.0).unwrap();
        let imp = Imperfection {
            rotation: Rotation::Unitary(ComplexMatrix::identity(2)),
            h1: h.clone(),
        };
        assert!(matches!(
            plan_protocol(&rho, &h, 1.0, &imp, Step4::Steps(3)),
            Err(Error::RankDeficientState(_))
        ));
    }

    #[test]
    fn ensemble_cap_is_enforced() {
        let qp = QubitProtocol::from_coh_nonth(0.8, PI / 3.0, 0.1, 0.0, 1.0, 1.0).unwrap();
        let spec = qp.plan(Step4::Steps(30)).unwrap();
        assert!(matches!(
            full_trajectory_ensemble(&spec, DEFAULT_ENSEMBLE_CAP),
            Err(Error::EnsembleTooLarge(_, _))
        ));
    }
}
