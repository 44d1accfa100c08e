//! Quantum channels: thermalization, dephasing, depolarization, covariant qubit maps
//! and the Fourier-interpolated unitary family.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{c, unitary_eig, ComplexMatrix, UnitaryEigen};
use crate::random;
use crate::states::{
    bloch_coherence, bloch_matrix, bloch_of_matrix, check_dims, thermal_state, DensityMatrix,
    Hamiltonian,
};

/// A completely positive trace-preserving map acting on matrices of a fixed dimension.
pub trait Channel {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix;
}

/// Λ(ρ) = τ for every ρ.
pub fn full_thermalization(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    temperature: f64,
) -> Result<DensityMatrix> {
    check_dims(h.dim(), rho.dim())?;
    thermal_state(h, temperature)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// Off-diagonal entries in the energy basis decay as e^{-t}.
pub fn dephasing_semigroup(rho: &DensityMatrix, h: &Hamiltonian, t: f64) -> Result<DensityMatrix> {
    check_dims(h.dim(), rho.dim())?;
    let ch = Dephasing::new(h.dim(), t)?;
    DensityMatrix::new(ch.apply(rho.matrix()))
}

/// (1-μ)ρ + μ I/d.
pub fn depolarize(rho: &DensityMatrix, mu: f64) -> Result<DensityMatrix> {
    let ch = Depolarizing::new(rho.dim(), mu)?;
    DensityMatrix::new(ch.apply(rho.matrix()))
}

#[derive(Clone, Debug)]
pub struct Dephasing {
    dim: usize,
    factor: f64,
}

impl Dephasing {
    pub fn new(dim: usize, t: f64) -> Result<Self> {
        check_time(t)?;
        Ok(Dephasing {
            dim,
            factor: (-t).exp(),
        })
    }
}

impl Channel for Dephasing {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(rho.dim(), |i, j| {
            if i == j {
                rho[(i, j)]
            } else {
                rho[(i, j)] * self.factor
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct Depolarizing {
    dim: usize,
    mu: f64,
}

impl Depolarizing {
    pub fn new(dim: usize, mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::MixingOutOfRange(mu));
        }
        Ok(Depolarizing { dim, mu })
    }
}

impl Channel for Depolarizing {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = rho.dim();
        let mix = ComplexMatrix::identity(d).scale_real(self.mu / d as f64);
        &rho.scale_real(1.0 - self.mu) + &mix
    }
}

/// ρ ↦ U ρ U^H.
#[derive(Clone, Debug)]
pub struct UnitaryConjugation {
    pub unitary: ComplexMatrix,
}

impl Channel for UnitaryConjugation {
    fn dim(&self) -> usize {
        self.unitary.dim()
    }
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        rho.conjugate_by(&self.unitary)
    }
}

/// ρ ↦ τ, diagonal with the given populations.
#[derive(Clone, Debug)]
pub struct Thermalization {
    pub populations: Vec<f64>,
}

impl Channel for Thermalization {
    fn dim(&self) -> usize {
        self.populations.len()
    }
    fn apply(&self, _rho: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.populations)
    }
}

#[derive(Clone, Debug)]
pub struct CovarianceReport {
    pub passed: bool,
    pub max_residual: f64,
}

/// Max over seeded random (ρ, t) of ‖E(e^{-itH}ρe^{itH}) - e^{-itH}E(ρ)e^{itH}‖_max.
pub fn covariance_check(
    channel: &dyn Channel,
    h: &Hamiltonian,
    samples: usize,
    seed: u64,
) -> CovarianceReport {
    let d = h.dim();
    assert_eq!(
        channel.dim(),
        d,
        "channel and Hamiltonian dimensions differ"
    );
    let mut rng = random::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let rho = random::density(d, &mut rng);
        let t: f64 = rng.gen_range(0.0..10.0);
        let u = ComplexMatrix::from_fn(d, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, -t * h.energy(i))
            } else {
                c(0.0, 0.0)
            }
        });
        let lhs = channel.apply(&rho.matrix().conjugate_by(&u));
        let rhs = channel.apply(rho.matrix()).conjugate_by(&u);
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    CovarianceReport {
        passed: worst <= 1e-10,
        max_residual: worst,
    }
}

/// Discrete Fourier transform F_kl = e^{2πi(k-1)(l-1)/d}/√d with its principal logarithm.
#[derive(Clone, Debug)]
pub struct FourierFamily {
    dim: usize,
    f: ComplexMatrix,
    eigen: UnitaryEigen,
    g: ComplexMatrix,
}

impl FourierFamily {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "Fourier family needs d >= 2, got {dim}"
            )));
        }
        let norm = 1.0 / (dim as f64).sqrt();
        let f = ComplexMatrix::from_fn(dim, |k, l| {
            let phase = 2.0 * PI * ((k * l) % dim) as f64 / dim as f64;
            Complex64::from_polar(norm, phase)
        });
        let eigen = unitary_eig(&f)?;
        let g = eigen.generator();
        Ok(FourierFamily { dim, f, eigen, g })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fourier(&self) -> &ComplexMatrix {
        &self.f
    }

    pub fn generator(&self) -> &ComplexMatrix {
        &self.g
    }

    pub fn eigenphases(&self) -> &[f64] {
        &self.eigen.phases
    }

    /// U(Θ) = exp(Θ log F).
    pub fn interpolated_unitary(&self, theta: f64) -> Result<ComplexMatrix> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::ThetaOutOfRange(theta));
        }
        Ok(self.eigen.power(theta))
    }
}

pub fn fourier_unitary_family(dim: usize) -> Result<FourierFamily> {
    FourierFamily::new(dim)
}

pub fn interpolated_unitary(family: &FourierFamily, theta: f64) -> Result<ComplexMatrix> {
    family.interpolated_unitary(theta)
}

/// Square matrix of nonnegative reals, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl StochasticMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[k * self.dim + l]
    }

    /// (M p)_k = Σ_l M_kl p_l.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|k| (0..self.dim).map(|l| self.get(k, l) * p[l]).sum())
            .collect()
    }

    /// Largest deviation of any row or column sum from one.
    pub fn doubly_stochastic_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            let row: f64 = (0..self.dim).map(|j| self.get(i, j)).sum();
            let col: f64 = (0..self.dim).map(|j| self.get(j, i)).sum();
            worst = worst.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
        worst
    }

    pub fn symmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// M_kl = |<e_k|U|e_l>|².
pub fn transition_matrix(u: &ComplexMatrix) -> Result<StochasticMatrix> {
    let residual = u.unitary_residual();
    if residual > crate::numerics::UNITARY_TOL {
        return Err(Error::NonUnitaryInput { residual });
    }
    Ok(StochasticMatrix {
        dim: u.dim(),
        entries: u.as_slice().iter().map(|z| z.norm_sqr()).collect(),
    })
}

/// Qubit angle θ̃ whose coherence equals the off-diagonal of M(Θ): 2 arcsin(sin(Θπ/2)/√2).
pub fn theta_tilde_from_theta(theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    Ok(2.0 * ((theta * PI / 2.0).sin() / 2f64.sqrt()).asin())
}

/// Unitary part of a covariant qubit channel.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitaryPart {
    /// Mixture of rotations diag(e^{iφ}, e^{-iφ}) with weights p_j.
    Rotations(Vec<(f64, f64)>),
    /// Uniform average over all rotations about the energy axis.
    HaarAveraged,
    /// The dephasing semigroup at time t.
    Dephasing { t: f64 },
}

impl UnitaryPart {
    /// Factor multiplying ⟨e_-|ρ|e_+⟩.
    fn coherence_factor(&self) -> Complex64 {
        match self {
            UnitaryPart::Rotations(list) => list
                .iter()
                .map(|&(w, phi)| Complex64::from_polar(w, 2.0 * phi))
                .sum(),
            UnitaryPart::HaarAveraged => c(0.0, 0.0),
            UnitaryPart::Dephasing { t } => c((-t).exp(), 0.0),
        }
    }

    /// δ = |Σ_j p_j e^{2iφ_j}|².
    pub fn delta(&self) -> f64 {
        self.coherence_factor().norm_sqr()
    }
}

/// E = λ·(unitary part) + (1-λ)·(q₁T₁ + q₂T₂ + q₃T₃) with
/// T₁(ρ) = ½(I + σ₃), T₂(ρ) = ½(I - σ₃), T₃(ρ) = ½(I - n₃σ₃).
#[derive(Clone, Debug, PartialEq)]
pub struct CovariantQubitChannel {
    lambda: f64,
    unitary: UnitaryPart,
    weights: [f64; 3],
}

const WEIGHT_SUM_TOL: f64 = 1e-10;

impl CovariantQubitChannel {
    pub fn new(lambda: f64, unitary: UnitaryPart, weights: [f64; 3]) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::MixingOutOfRange(lambda));
        }
        if weights.iter().any(|&w| !(w >= 0.0))
            || (weights.iter().sum::<f64>() - 1.0).abs() > WEIGHT_SUM_TOL
        {
            return Err(Error::InvalidArgument(format!(
                "nonunitary weights {weights:?} must be nonnegative and sum to one"
            )));
        }
        match &unitary {
            UnitaryPart::Rotations(list) => {
                let total: f64 = list.iter().map(|p| p.0).sum();
                if list.is_empty()
                    || list.iter().any(|p| !(p.0 >= 0.0) || !p.1.is_finite())
                    || (total - 1.0).abs() > WEIGHT_SUM_TOL
                {
                    return Err(Error::InvalidArgument(
                        "rotation weights must be nonnegative and sum to one".into(),
                    ));
                }
            }
            UnitaryPart::Dephasing { t } => check_time(*t)?,
            UnitaryPart::HaarAveraged => {}
        }
        Ok(CovariantQubitChannel {
            lambda,
            unitary,
            weights,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn unitary_part(&self) -> &UnitaryPart {
        &self.unitary
    }

    pub fn weights(&self) -> [f64; 3] {
        self.weights
    }

    pub fn apply_bloch(&self, n: [f64; 3]) -> [f64; 3] {
        let f = self.unitary.coherence_factor();
        // ⟨e_-|ρ|e_+⟩ = (n₁ + i n₂)/2 in this ordering
        let t = f * c(n[0], n[1]);
        let v = self.v(n[2]);
        [
            self.lambda * t.re,
            self.lambda * t.im,
            self.lambda * n[2] + (1.0 - self.lambda) * v,
        ]
    }

    /// v = q₁ - q₂ - q₃n₃.
    pub fn v(&self, n3: f64) -> f64 {
        self.weights[0] - self.weights[1] - self.weights[2] * n3
    }
}

impl Channel for CovariantQubitChannel {
    fn dim(&self) -> usize {
        2
    }
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = bloch_of_matrix(rho).expect("qubit input");
        bloch_matrix(self.apply_bloch(n))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityCertificate {
    pub beta_sq: f64,
    pub delta: f64,
    pub v: f64,
    /// β² ≥ δ.
    pub verdict: bool,
    pub coh_before: f64,
    pub coh_after: f64,
}

impl MonotonicityCertificate {
    pub fn coherence_decreased(&self, tol: f64) -> bool {
        self.coh_after <= self.coh_before + tol
    }
}

pub fn coh_monotonicity_certificate(
    ch: &CovariantQubitChannel,
    rho: &DensityMatrix,
) -> Result<MonotonicityCertificate> {
    if rho.dim() != 2 {
        return Err(Error::DimensionError {
            expected: 2,
            found: rho.dim(),
        });
    }
    let n = bloch_of_matrix(rho.matrix())?;
    let v = ch.v(n[2]);
    let delta = ch.unitary.delta();
    let beta = if ch.lambda == 0.0 {
        f64::INFINITY
    } else if n[2] == 0.0 {
        if v == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        1.0 + ((1.0 - ch.lambda) / ch.lambda) * (v / n[2])
    };
    let beta_sq = beta * beta;
    Ok(MonotonicityCertificate {
        beta_sq,
        delta,
        v,
        verdict: beta_sq >= delta,
        coh_before: bloch_coherence(n),
        coh_after: bloch_coherence(ch.apply_bloch(n)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{coherence_measure, decohere, thermal_populations};

    #[test]
    fn thermalization_ignores_input() {
        let h = Hamiltonian::qubit(1.0).unwrap();
        let t = 1.0 / (0.85f64 / 0.15).ln();
        let out = full_thermalization(&DensityMatrix::qubit(0.6, 1.0).unwrap(), &h, t).unwrap();
        assert!((out.populations()[0] - 0.85).abs() < 1e-12);
    }

    #[test]
    fn dephasing_limits() {
        let h = Hamiltonian::qubit(1.0).unwrap();
        let rho = DensityMatrix::qubit(0.9, PI / 3.0).unwrap();
        let same = dephasing_semigroup(&rho, &h, 0.0).unwrap();
        assert!(same.matrix().max_abs_diff(rho.matrix()) == 0.0);
        let one = dephasing_semigroup(&rho, &h, 1.0).unwrap();
        assert!((one.matrix()[(0, 1)] - rho.matrix()[(0, 1)] * (-1f64).exp()).norm() < 1e-15);
        let late = dephasing_semigroup(&rho, &h, 50.0).unwrap();
        assert!(
            late.matrix()
                .max_abs_diff(decohere(&rho, &h).unwrap().matrix())
                < 1e-12
        );
        assert!(matches!(
            dephasing_semigroup(&rho, &h, -1.0),
            Err(Error::NegativeTime(_))
        ));
    }

    #[test]
    fn depolarize_scales_bloch() {
        let rho = DensityMatrix::qubit(0.9, 0.4).unwrap();
        let n = crate::states::bloch_vector(&rho).unwrap();
        let out = crate::states::bloch_vector(&depolarize(&rho, 0.3).unwrap()).unwrap();
        for i in 0..3 {
            assert!((out[i] - 0.7 * n[i]).abs() < 1e-14);
        }
        assert!(matches!(
            depolarize(&rho, 1.5),
            Err(Error::MixingOutOfRange(_))
        ));
    }

    #[test]
    fn fourier_d2_is_hadamard() {
        let fam = FourierFamily::new(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let h = ComplexMatrix::from_real(2, &[s, s, s, -s]).unwrap();
        assert!(fam.fourier().max_abs_diff(&h) < 1e-15);
        let u = fam.interpolated_unitary(0.5).unwrap();
        assert!((u[(0, 1)].norm_sqr() - 0.25).abs() < 1e-12);
        assert!(
            fam.interpolated_unitary(0.0)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-12
        );
        assert!(
            fam.interpolated_unitary(1.0)
                .unwrap()
                .max_abs_diff(fam.fourier())
                < 1e-12
        );
        assert!(matches!(
            fam.interpolated_unitary(1.1),
            Err(Error::ThetaOutOfRange(_))
        ));
    }

    #[test]
    fn fourier_is_unbiased_and_logs_round_trip() {
        for d in 2..=8 {
            let fam = FourierFamily::new(d).unwrap();
            let m = transition_matrix(fam.fourier()).unwrap();
            for k in 0..d {
                for l in 0..d {
                    assert!((m.get(k, l) - 1.0 / d as f64).abs() < 1e-14);
                }
            }
            let back = crate::numerics::exp_skew_hermitian(fam.generator()).unwrap();
            assert!(back.max_abs_diff(fam.fourier()) < 1e-10, "d={d}");
        }
    }

    #[test]
    fn theta_tilde_examples() {
        assert_eq!(theta_tilde_from_theta(0.0).unwrap(), 0.0);
        assert!((theta_tilde_from_theta(1.0).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((theta_tilde_from_theta(0.5).unwrap() - PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn covariance_of_standard_channels() {
        let h = Hamiltonian::new(vec![-0.7, 0.2, 1.3]).unwrap();
        assert!(covariance_check(&Dephasing::new(3, 0.8).unwrap(), &h, 50, 1).passed);
        assert!(covariance_check(&Depolarizing::new(3, 0.4).unwrap(), &h, 50, 2).passed);
        let mut r = random::rng(3);
        let generic = UnitaryConjugation {
            unitary: random::unitary(3, &mut r),
        };
        assert!(!covariance_check(&generic, &h, 50, 4).passed);
        let q = thermal_populations(&h, 0.9).unwrap();
        assert!(covariance_check(&Thermalization { populations: q }, &h, 50, 5).passed);
    }

    #[test]
    fn certificate_examples() {
        let rho = DensityMatrix::qubit(0.8, 0.9).unwrap();
        let h = Hamiltonian::qubit(1.0).unwrap();
        let haar =
            CovariantQubitChannel::new(1.0, UnitaryPart::HaarAveraged, [0.0, 0.0, 1.0]).unwrap();
        let cert = coh_monotonicity_certificate(&haar, &rho).unwrap();
        assert_eq!(cert.delta, 0.0);
        assert!(cert.coh_after.abs() < 1e-15);
        let dep = CovariantQubitChannel::new(
            0.6,
            UnitaryPart::Rotations(vec![(1.0, 0.3)]),
            [0.0, 0.0, 0.0],
        )
        .err();
        assert!(dep.is_some());
        let depol = CovariantQubitChannel::new(
            0.6,
            UnitaryPart::Rotations(vec![(1.0, 0.3)]),
            [0.5, 0.5, 0.0],
        )
        .unwrap();
        let cert = coh_monotonicity_certificate(&depol, &rho).unwrap();
        assert!((cert.beta_sq - 1.0).abs() < 1e-15 && cert.verdict);
        assert!(cert.coherence_decreased(1e-12));
        let via_matrix = DensityMatrix::new(depol.apply(rho.matrix())).unwrap();
        assert!((coherence_measure(&via_matrix, &h).unwrap().value - cert.coh_after).abs() < 1e-12);
    }
}
