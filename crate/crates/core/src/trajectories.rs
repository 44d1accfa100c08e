//! Step-III trajectory ensembles: decoherence jumps followed by full thermalization.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{c, ComplexMatrix};
use crate::states::{
    check_dims, kl_divergence, shannon_entropy, skew_information, thermal_populations,
    weighted_variance, DensityMatrix, Hamiltonian,
};

/// Heat values closer than this are merged into one atom.
pub const MERGE_TOL: f64 = 1e-9;
/// Atoms lighter than this are dropped from distributions.
pub const ATOM_CUTOFF: f64 = 1e-15;
/// Samples per Monte Carlo chunk; each chunk has its own random stream.
pub const CHUNK_SIZE: usize = 1 << 16;

/// Trajectory |ψ̃_l> → |e_m> → |e_n>.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugmentedTrajectory {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub probability: f64,
    /// E_m - <ψ̃_l|H|ψ̃_l>
    pub q_heat: f64,
    /// E_n - E_m
    pub cl_heat: f64,
    /// ln(p_l / r_m)
    pub s_qu: f64,
    /// ln(r_m / q_m)
    pub s_cl: f64,
}

impl AugmentedTrajectory {
    pub fn s_irr(&self) -> f64 {
        self.s_qu + self.s_cl
    }
}

/// ln(a/b) with ln(0/b) = -∞, ln(a/0) = +∞ and NaN for 0/0.
pub fn log_ratio(a: f64, b: f64) -> f64 {
    match (a > 0.0, b > 0.0) {
        (true, true) => a.ln() - b.ln(),
        (false, true) => f64::NEG_INFINITY,
        (true, false) => f64::INFINITY,
        (false, false) => f64::NAN,
    }
}

/// All d³ augmented trajectories of one state, Hamiltonian and reference.
#[derive(Clone, Debug)]
pub struct Step3Ensemble {
    dim: usize,
    records: Vec<AugmentedTrajectory>,
    rho_tilde: DensityMatrix,
    levels: Vec<f64>,
    overlaps: Vec<f64>,
    state_energies: Vec<f64>,
    decohered: Vec<f64>,
    reference: Vec<f64>,
}

pub fn build_step3_ensemble(
    rho_tilde: &DensityMatrix,
    h: &Hamiltonian,
    temperature: f64,
) -> Result<Step3Ensemble> {
    check_dims(h.dim(), rho_tilde.dim())?;
    let q = thermal_populations(h, temperature)?;
    build_step3_ensemble_with_reference(rho_tilde, h, &q)
}

/// As `build_step3_ensemble`, with the thermalized populations q_n given directly.
/// Useful for population-inverted references that no positive temperature produces.
pub fn build_step3_ensemble_with_reference(
    rho_tilde: &DensityMatrix,
    h: &Hamiltonian,
    reference: &[f64],
) -> Result<Step3Ensemble> {
    let d = rho_tilde.dim();
    check_dims(d, h.dim())?;
    check_dims(d, reference.len())?;
    if reference.iter().any(|&q| !(q >= 0.0)) || (reference.iter().sum::<f64>() - 1.0).abs() > 1e-10
    {
        return Err(Error::InvalidArgument(
            "reference populations must form a distribution".into(),
        ));
    }
    let p = rho_tilde.probabilities().to_vec();
    let vectors = &rho_tilde.eigensystem().vectors;
    let levels = h.levels().to_vec();
    let mut overlaps = vec![0.0; d * d];
    let mut state_energies = vec![0.0; d];
    for l in 0..d {
        for m in 0..d {
            let ov = vectors[(m, l)].norm_sqr();
            overlaps[l * d + m] = ov;
            state_energies[l] += ov * levels[m];
        }
    }
    let mut decohered = vec![0.0; d];
    for l in 0..d {
        for m in 0..d {
            decohered[m] += p[l] * overlaps[l * d + m];
        }
    }
    let mut records = Vec::with_capacity(d * d * d);
    for l in 0..d {
        for m in 0..d {
            for n in 0..d {
                records.push(AugmentedTrajectory {
                    l,
                    m,
                    n,
                    probability: p[l] * overlaps[l * d + m] * reference[n],
                    q_heat: levels[m] - state_energies[l],
                    cl_heat: levels[n] - levels[m],
                    s_qu: log_ratio(p[l], decohered[m]),
                    s_cl: log_ratio(decohered[m], reference[m]),
                });
            }
        }
    }
    Ok(Step3Ensemble {
        dim: d,
        records,
        rho_tilde: rho_tilde.clone(),
        levels,
        overlaps,
        state_energies,
        decohered,
        reference: reference.to_vec(),
    })
}

impl Step3Ensemble {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn records(&self) -> &[AugmentedTrajectory] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Index of record (l, m, n).
    pub fn index(&self, l: usize, m: usize, n: usize) -> usize {
        (l * self.dim + m) * self.dim + n
    }

    pub fn rho_tilde(&self) -> &DensityMatrix {
        &self.rho_tilde
    }

    pub fn weights(&self) -> &[f64] {
        self.rho_tilde.probabilities()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// |<e_m|ψ̃_l>|²
    pub fn overlap(&self, l: usize, m: usize) -> f64 {
        self.overlaps[l * self.dim + m]
    }

    /// <ψ̃_l|H|ψ̃_l>
    pub fn state_energy(&self, l: usize) -> f64 {
        self.state_energies[l]
    }

    /// Populations r_m of η̃.
    pub fn decohered(&self) -> &[f64] {
        &self.decohered
    }

    /// Populations q_n of the thermalized state.
    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn is_degenerate(&self) -> bool {
        self.rho_tilde.is_degenerate()
    }

    pub fn total_probability(&self) -> f64 {
        self.records.iter().map(|r| r.probability).sum()
    }

    /// Decoherence-trajectory probabilities Σ_n P(l, m, n), indexed l*d + m.
    pub fn quantum_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim * self.dim];
        for r in &self.records {
            out[r.l * self.dim + r.m] += r.probability;
        }
        out
    }

    /// Thermalization-trajectory probabilities Σ_l P(l, m, n), indexed m*d + n.
    pub fn classical_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim * self.dim];
        for r in &self.records {
            out[r.m * self.dim + r.n] += r.probability;
        }
        out
    }

    /// Σ_m Π[e_m] Σ_l P_q(l, m).
    pub fn reconstructed_decohered_state(&self) -> ComplexMatrix {
        let marg = self.quantum_marginal();
        let d = self.dim;
        let diag: Vec<f64> = (0..d)
            .map(|m| (0..d).map(|l| marg[l * d + m]).sum())
            .collect();
        ComplexMatrix::from_diagonal(&diag)
    }

    /// Ensemble with one record's probability shifted by `delta`; used to exercise failing checks.
    pub fn with_perturbed_probability(&self, index: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.records[index].probability += delta;
        out
    }
}

/// Finite distribution over real values; atoms sorted by value.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDistribution {
    /// Drops atoms below `ATOM_CUTOFF` and merges values within `MERGE_TOL` of a cluster's
    /// first value; merged atoms sit at the probability-weighted mean value.
    pub fn from_weighted(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut raw: Vec<(f64, f64)> = pairs
            .into_iter()
            .filter(|&(_, p)| p >= ATOM_CUTOFF)
            .collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        let mut start = 0;
        while start < raw.len() {
            let first = raw[start].0;
            let mut end = start + 1;
            while end < raw.len()
                && (raw[end].0 == first || (raw[end].0 - first).abs() <= MERGE_TOL)
            {
                end += 1;
            }
            let total: f64 = raw[start..end].iter().map(|a| a.1).sum();
            let value = if end - start == 1 || !first.is_finite() {
                first
            } else {
                raw[start..end].iter().map(|a| a.0 * a.1).sum::<f64>() / total
            };
            atoms.push((value, total));
            start = end;
        }
        DiscreteDistribution { atoms }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Raw moment Σ p x^k.
    pub fn moment(&self, k: i32) -> f64 {
        self.atoms.iter().map(|(x, p)| p * x.powi(k)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// Central second moment.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.atoms
            .iter()
            .map(|(x, p)| p * (x - mu) * (x - mu))
            .sum()
    }

    /// Probability of the atom at `value` (within `MERGE_TOL`), zero if absent.
    pub fn probability_of(&self, value: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| (a.0 - value).abs() <= MERGE_TOL)
            .map(|a| a.1)
            .sum()
    }
}

pub fn quantum_heat_distribution(ens: &Step3Ensemble) -> DiscreteDistribution {
    DiscreteDistribution::from_weighted(ens.records.iter().map(|r| (r.q_heat, r.probability)))
}

pub fn classical_heat_distribution(ens: &Step3Ensemble) -> DiscreteDistribution {
    DiscreteDistribution::from_weighted(ens.records.iter().map(|r| (r.cl_heat, r.probability)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatVariances {
    pub var_qu: f64,
    pub var_cl: f64,
}

/// Var[Q_qu] = Σ_l p_l Δ(H, ψ̃_l) and Var[Q_cl] = Δ(H, η̃) + Δ(H, τ).
pub fn heat_variances(ens: &Step3Ensemble) -> HeatVariances {
    let d = ens.dim;
    let p = ens.weights();
    let var_qu = (0..d)
        .map(|l| p[l] * weighted_variance(&ens.levels, &ens.overlaps[l * d..(l + 1) * d]))
        .sum();
    let var_cl = weighted_variance(&ens.levels, &ens.decohered)
        + weighted_variance(&ens.levels, &ens.reference);
    HeatVariances { var_qu, var_cl }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichReport {
    /// Δ(H, ρ̃)
    pub upper: f64,
    pub var_qu: f64,
    /// (α, I_α(H, ρ̃))
    pub skew: Vec<(f64, f64)>,
    /// Δ ≥ Var ≥ I_α for every α, with 1e-12 slack.
    pub holds: bool,
    /// All values coincide to 1e-12.
    pub saturated: bool,
}

pub fn variance_sandwich(
    rho_tilde: &DensityMatrix,
    h: &Hamiltonian,
    alphas: &[f64],
) -> Result<SandwichReport> {
    let d = rho_tilde.dim();
    check_dims(h.dim(), d)?;
    let upper = weighted_variance(h.levels(), &rho_tilde.populations());
    let p = rho_tilde.probabilities();
    let v = &rho_tilde.eigensystem().vectors;
    let var_qu: f64 = (0..d)
        .map(|l| {
            let ov: Vec<f64> = (0..d).map(|m| v[(m, l)].norm_sqr()).collect();
            p[l] * weighted_variance(h.levels(), &ov)
        })
        .sum();
    let mut skew = Vec::with_capacity(alphas.len());
    for &a in alphas {
        skew.push((a, skew_information(h, rho_tilde, a)?));
    }
    let holds = upper + 1e-12 >= var_qu && skew.iter().all(|&(_, i)| var_qu >= i - 1e-12);
    let saturated =
        (upper - var_qu).abs() <= 1e-12 && skew.iter().all(|&(_, i)| (var_qu - i).abs() <= 1e-12);
    Ok(SandwichReport {
        upper,
        var_qu,
        skew,
        holds,
        saturated,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyStats {
    pub avg_s_qu: f64,
    pub avg_s_cl: f64,
    pub s_irr: DiscreteDistribution,
}

/// Averages over records with nonzero probability.
pub fn entropy_production_stats(ens: &Step3Ensemble) -> EntropyStats {
    let live = ens.records.iter().filter(|r| r.probability > 0.0);
    let mut avg_s_qu = 0.0;
    let mut avg_s_cl = 0.0;
    for r in live.clone() {
        avg_s_qu += r.probability * r.s_qu;
        avg_s_cl += r.probability * r.s_cl;
    }
    EntropyStats {
        avg_s_qu,
        avg_s_cl,
        s_irr: DiscreteDistribution::from_weighted(live.map(|r| (r.s_irr(), r.probability))),
    }
}

/// Σ_Γ P(Γ) e^{-s_irr(Γ)} over records with nonzero probability.
pub fn integral_fluctuation_sum(ens: &Step3Ensemble) -> f64 {
    ens.records
        .iter()
        .filter(|r| r.probability > 0.0)
        .map(|r| r.probability * (-r.s_irr()).exp())
        .sum()
}

/// Full-swap thermalization with a single ancilla carrying the system Hamiltonian.
///
/// Composite index |system, bath> = system·d + bath; V|a, b> = |b, a>.
#[derive(Clone, Debug)]
pub struct SwapBath {
    dim: usize,
    populations: Vec<f64>,
    swap: ComplexMatrix,
}

impl SwapBath {
    pub fn new(populations: &[f64]) -> Self {
        let d = populations.len();
        let swap = ComplexMatrix::from_fn(d * d, |row, col| {
            let (a, b) = (col / d, col % d);
            if row == b * d + a {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        SwapBath {
            dim: d,
            populations: populations.to_vec(),
            swap,
        }
    }

    pub fn for_ensemble(ens: &Step3Ensemble) -> Self {
        Self::new(ens.reference())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// K_{μν} = √q_μ <ν|V|μ> as a system operator.
    pub fn kraus(&self, mu: usize, nu: usize) -> ComplexMatrix {
        let d = self.dim;
        let s = self.populations[mu].sqrt();
        ComplexMatrix::from_fn(d, |i, j| self.swap[(i * d + nu, j * d + mu)] * s)
    }

    /// K*_{νμ} = √q_ν <μ|V^H|ν>.
    pub fn reversed_kraus(&self, nu: usize, mu: usize) -> ComplexMatrix {
        let d = self.dim;
        let s = self.populations[nu].sqrt();
        ComplexMatrix::from_fn(d, |i, j| self.swap[(j * d + nu, i * d + mu)].conj() * s)
    }

    /// max |Σ K^H K - I|.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim;
        let mut acc = ComplexMatrix::zeros(d);
        for mu in 0..d {
            for nu in 0..d {
                let k = self.kraus(mu, nu);
                acc = &acc + &(&k.adjoint() * &k);
            }
        }
        acc.max_abs_diff(&ComplexMatrix::identity(d))
    }

    /// p_l ‖Π[e_n] K_{μν} Π[e_m] |ψ̃_l>‖².
    pub fn forward_probability(
        &self,
        ens: &Step3Ensemble,
        l: usize,
        m: usize,
        n: usize,
        mu: usize,
        nu: usize,
    ) -> f64 {
        let d = self.dim;
        let psi = ens.rho_tilde.eigenvector(l);
        let mut w = vec![c(0.0, 0.0); d];
        w[m] = psi[m];
        let w = self.kraus(mu, nu).apply(&w);
        ens.weights()[l] * w[n].norm_sqr()
    }

    /// q_n ‖Π[ψ̃_l] Π[e_m] K*_{νμ} |e_n>‖², starting from the reference state.
    pub fn backward_probability(
        &self,
        ens: &Step3Ensemble,
        l: usize,
        m: usize,
        n: usize,
        mu: usize,
        nu: usize,
    ) -> f64 {
        let d = self.dim;
        let mut e = vec![c(0.0, 0.0); d];
        e[n] = c(1.0, 0.0);
        let w = self.reversed_kraus(nu, mu).apply(&e);
        let psi = ens.rho_tilde.eigenvector(l);
        let amp: Complex64 = psi[m].conj() * w[m];
        self.populations[n] * amp.norm_sqr()
    }
}

/// Coarse-grained backward probability of record `index`, summed over bath indices.
pub fn backward_probability_swap(ens: &Step3Ensemble, index: usize) -> Result<f64> {
    let r = ens
        .records
        .get(index)
        .ok_or_else(|| Error::InvalidArgument(format!("record {index} out of range")))?;
    if !(r.probability > 0.0) {
        return Err(Error::ZeroProbabilityRecord);
    }
    let bath = SwapBath::for_ensemble(ens);
    let d = ens.dim;
    let mut total = 0.0;
    for mu in 0..d {
        for nu in 0..d {
            total += bath.backward_probability(ens, r.l, r.m, r.n, mu, nu);
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClausiusReport {
    pub avg_s_cl: f64,
    pub avg_q_cl: f64,
    /// S(τ) - S(η̃)
    pub delta_s_cl: f64,
    /// T⟨s_cl⟩
    pub q_diss: f64,
    /// |⟨s_cl⟩ - (ΔS_cl - ⟨Q_cl⟩/T)|
    pub residual: f64,
}

pub fn clausius_report(ens: &Step3Ensemble, temperature: f64) -> ClausiusReport {
    let stats = entropy_production_stats(ens);
    let avg_q_cl: f64 = ens.records.iter().map(|r| r.probability * r.cl_heat).sum();
    let delta_s_cl = shannon_entropy(&ens.reference) - shannon_entropy(&ens.decohered);
    ClausiusReport {
        avg_s_cl: stats.avg_s_cl,
        avg_q_cl,
        delta_s_cl,
        q_diss: temperature * stats.avg_s_cl,
        residual: (stats.avg_s_cl - (delta_s_cl - avg_q_cl / temperature)).abs(),
    }
}

/// D[η̃‖τ] from the ensemble populations.
pub fn classical_relative_entropy(ens: &Step3Ensemble) -> f64 {
    kl_divergence(&ens.decohered, &ens.reference)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloResult {
    pub samples: u64,
    /// Hits per record, aligned with `Step3Ensemble::records`.
    pub counts: Vec<u64>,
}

impl MonteCarloResult {
    /// Empirical distribution of a per-record quantity.
    pub fn empirical(
        &self,
        ens: &Step3Ensemble,
        value: impl Fn(&AugmentedTrajectory) -> f64,
    ) -> DiscreteDistribution {
        let n = self.samples as f64;
        DiscreteDistribution::from_weighted(
            ens.records
                .iter()
                .zip(&self.counts)
                .map(|(r, &k)| (value(r), k as f64 / n)),
        )
    }
}

/// Inverse-CDF sampling of records. Samples are split into chunks of `CHUNK_SIZE`; chunk k
/// draws from ChaCha8 seeded with `seed` on stream k, so the result does not depend on `workers`.
pub fn monte_carlo_sample(
    ens: &Step3Ensemble,
    count: u64,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloResult> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be positive".into(),
        ));
    }
    let mut cdf = Vec::with_capacity(ens.len());
    let mut acc = 0.0;
    for r in &ens.records {
        acc += r.probability.max(0.0);
        cdf.push(acc);
    }
    let total = acc;
    let last_live = ens
        .records
        .iter()
        .rposition(|r| r.probability > 0.0)
        .unwrap_or(0);
    let chunks = count.div_ceil(CHUNK_SIZE as u64);
    let run = |k: u64| -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k);
        let len = (count - k * CHUNK_SIZE as u64).min(CHUNK_SIZE as u64);
        let mut counts = vec![0u64; cdf.len()];
        for _ in 0..len {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&x| x <= u).min(last_live);
            counts[idx] += 1;
        }
        counts
    };
    let merge = |mut a: Vec<u64>, b: Vec<u64>| {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        a
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let counts = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(run)
            .reduce(|| vec![0u64; cdf.len()], merge)
    });
    Ok(MonteCarloResult {
        samples: count,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fig3b() -> Step3Ensemble {
        let rho = DensityMatrix::qubit(0.95, PI / 3.0).unwrap();
        let h = Hamiltonian::qubit(1.0).unwrap();
        build_step3_ensemble_with_reference(&rho, &h, &[0.85, 0.15]).unwrap()
    }

    #[test]
    fn record_probability_product() {
        let ens = fig3b();
        // p = 0.95 is the larger weight, stored last
        let l = 1;
        assert!((ens.weights()[l] - 0.95).abs() < 1e-15);
        let r = ens.records()[ens.index(l, 1, 0)];
        assert!((r.probability - 0.95 * 0.25 * 0.85).abs() < 1e-15);
        assert!((r.probability - 0.201875).abs() < 1e-12);
        let marg = ens.quantum_marginal();
        assert!((marg[l * 2 + 1] - 0.2375).abs() < 1e-15);
    }

    #[test]
    fn quantum_heat_support() {
        let ens = fig3b();
        let dist = quantum_heat_distribution(&ens);
        let values: Vec<f64> = dist.atoms().iter().map(|a| a.0).collect();
        let expect = [-0.75, -0.25, 0.25, 0.75];
        assert_eq!(values.len(), 4);
        for (v, e) in values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        assert!(dist.mean().abs() < 1e-15);
        assert!((dist.variance() - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn diagonal_state_has_no_quantum_heat() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let h = Hamiltonian::qubit(1.0).unwrap();
        let ens = build_step3_ensemble_with_reference(&rho, &h, &[0.2, 0.8]).unwrap();
        for r in ens.records() {
            if r.l != r.m {
                assert_eq!(r.probability, 0.0);
            }
        }
        let q = quantum_heat_distribution(&ens);
        assert_eq!(q.len(), 1);
        assert_eq!(q.atoms()[0].0, 0.0);
        assert!((q.atoms()[0].1 - 1.0).abs() < 1e-15);
        let cl = classical_heat_distribution(&ens);
        assert!((cl.mean() - 0.1).abs() < 1e-15);
        assert!((heat_variances(&ens).var_cl - 0.37).abs() < 1e-15);
        let t = 1.3;
        let h_ref = Hamiltonian::from_populations(&[0.2, 0.8], t).unwrap();
        let ens = build_step3_ensemble(&rho, &h_ref, t).unwrap();
        let stats = entropy_production_stats(&ens);
        let report = clausius_report(&ens, t);
        assert!((report.q_diss - 1.3 * 0.028168).abs() < 1e-6 * 1.3);
        assert!(report.residual < 1e-12);
        assert!((stats.avg_s_cl - classical_relative_entropy(&ens)).abs() < 1e-12);
    }

    #[test]
    fn entropy_terms_of_single_records() {
        let ens = fig3b();
        let r = ens.records()[ens.index(1, 0, 0)];
        assert!((r.s_qu - (0.95f64 / 0.725).ln()).abs() < 1e-14);
        assert!((r.s_qu - 0.270291).abs() < 1e-6);
        assert!((r.s_cl - (0.725f64 / 0.85).ln()).abs() < 1e-14);
        assert!((r.s_cl + 0.159065).abs() < 1e-6);
    }

    #[test]
    fn swap_bath_reproduces_forward_probabilities() {
        let ens = fig3b();
        let bath = SwapBath::for_ensemble(&ens);
        assert!(bath.completeness_residual() < 1e-15);
        for (i, r) in ens.records().iter().enumerate() {
            let mut fwd = 0.0;
            for mu in 0..2 {
                for nu in 0..2 {
                    let f = bath.forward_probability(&ens, r.l, r.m, r.n, mu, nu);
                    let b = bath.backward_probability(&ens, r.l, r.m, r.n, mu, nu);
                    if mu != r.n || nu != r.m {
                        assert_eq!(f, 0.0);
                        assert_eq!(b, 0.0);
                    }
                    fwd += f;
                }
            }
            assert!((fwd - r.probability).abs() < 1e-15);
            let back = backward_probability_swap(&ens, i).unwrap();
            assert!(((r.probability / back).ln() - r.s_irr()).abs() < 1e-12);
        }
        assert!((integral_fluctuation_sum(&ens) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_record_is_rejected() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let h = Hamiltonian::qubit(1.0).unwrap();
        let ens = build_step3_ensemble_with_reference(&rho, &h, &[0.2, 0.8]).unwrap();
        let idx = ens.index(0, 1, 0);
        assert_eq!(
            backward_probability_swap(&ens, idx),
            Err(Error::ZeroProbabilityRecord)
        );
    }

    #[test]
    fn thermal_input_has_zero_entropy_production() {
        let h = Hamiltonian::qubit(1.0).unwrap();
        let tau = crate::states::thermal_state(&h, 0.8).unwrap();
        let ens = build_step3_ensemble(&tau, &h, 0.8).unwrap();
        for (i, r) in ens.records().iter().enumerate() {
            if r.probability > 0.0 {
                assert!(r.s_irr().abs() < 1e-15);
                assert!(
                    (backward_probability_swap(&ens, i).unwrap() - r.probability).abs() < 1e-15
                );
            }
        }
        let cl = classical_heat_distribution(&ens);
        assert!(cl.mean().abs() < 1e-15);
        assert!(cl.len() == 3);
        assert!((cl.probability_of(1.0) - cl.probability_of(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn merging_rule() {
        let d = DiscreteDistribution::from_weighted(vec![
            (1.0, 0.25),
            (1.0 + 5e-10, 0.25),
            (2.0, 0.5),
            (3.0, 1e-16),
        ]);
        assert_eq!(d.len(), 2);
        assert!((d.atoms()[0].0 - (1.0 + 2.5e-10)).abs() < 1e-15);
        assert_eq!(d.atoms()[0].1, 0.5);
    }

    #[test]
    fn sandwich_for_pure_and_mixed() {
        let h = Hamiltonian::qubit(1.0).unwrap();
        let alphas: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
        let mixed = DensityMatrix::qubit(0.95, PI / 3.0).unwrap();
        let rep = variance_sandwich(&mixed, &h, &alphas).unwrap();
        assert!(rep.holds && !rep.saturated);
        assert!((rep.var_qu - 0.1875).abs() < 1e-15);
        let pure = DensityMatrix::qubit(1.0, PI / 3.0).unwrap();
        let rep = variance_sandwich(&pure, &h, &alphas).unwrap();
        assert!(rep.holds && rep.saturated);
        let mix = DensityMatrix::maximally_mixed(2);
        let rep = variance_sandwich(&mix, &h, &alphas).unwrap();
        assert!(rep.upper - 0.25 < 1e-15);
    }

    #[test]
    fn monte_carlo_is_reproducible_across_workers() {
        let ens = fig3b();
        let a = monte_carlo_sample(&ens, 200_000, 7, 1).unwrap();
        let b = monte_carlo_sample(&ens, 200_000, 7, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), 200_000);
        for (r, &k) in ens.records().iter().zip(&a.counts) {
            if r.probability == 0.0 {
                assert_eq!(k, 0);
            }
        }
    }

    #[test]
    fn single_record_ensemble_samples_one_record() {
        let h = Hamiltonian::qubit(1.0).unwrap();
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let ens = build_step3_ensemble_with_reference(&rho, &h, &[1.0, 0.0]).unwrap();
        let res = monte_carlo_sample(&ens, 1000, 3, 2).unwrap();
        let live: Vec<u64> = res.counts.iter().copied().filter(|&k| k > 0).collect();
        assert_eq!(live, vec![1000]);
    }
}
