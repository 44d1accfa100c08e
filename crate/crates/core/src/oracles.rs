//! Closed-form qubit results and brute-force moment enumerators, kept apart from the
//! trajectory pipeline so they can serve as independent checks.

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitParams {
    pub p: f64,
    pub theta: f64,
    pub theta_tilde: f64,
    pub omega: f64,
    pub q1: f64,
}

impl QubitParams {
    /// sin²(θ̃/2)
    pub fn coh(&self) -> f64 {
        (self.theta_tilde / 2.0).sin().powi(2)
    }

    /// Ground population of ρ̃: p - (2p - 1) sin²(θ̃/2).
    pub fn r_tilde(&self) -> f64 {
        self.p - (2.0 * self.p - 1.0) * self.coh()
    }

    /// ln(q₁ / r)
    pub fn nonth(&self) -> f64 {
        (self.q1 / self.r_tilde()).ln()
    }
}

/// ω²(coh - coh²).
pub fn qubit_var_qheat(params: &QubitParams) -> f64 {
    let coh = params.coh();
    params.omega * params.omega * (coh - coh * coh)
}

/// ω²[(r - r²) + (q₁ - q₁²)] with r = q₁ e^{-nonth}.
pub fn qubit_var_clheat(params: &QubitParams) -> f64 {
    let r = params.q1 * (-params.nonth()).exp();
    qubit_var_clheat_from_populations(r, params.q1, params.omega)
}

pub fn qubit_var_clheat_from_populations(r: f64, q1: f64, omega: f64) -> f64 {
    omega * omega * ((r - r * r) + (q1 - q1 * q1))
}

/// Raw moments E[X^k], k = 0..=order, of the Step-III heats and entropy terms.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    pub quantum_heat: Vec<f64>,
    pub classical_heat: Vec<f64>,
    pub s_qu: Vec<f64>,
    pub s_cl: Vec<f64>,
}

fn central_second(m: &[f64]) -> f64 {
    m[2] - m[1] * m[1]
}

impl MomentTable {
    pub fn mean_quantum(&self) -> f64 {
        self.quantum_heat[1]
    }
    pub fn var_quantum(&self) -> f64 {
        central_second(&self.quantum_heat)
    }
    pub fn mean_classical(&self) -> f64 {
        self.classical_heat[1]
    }
    pub fn var_classical(&self) -> f64 {
        central_second(&self.classical_heat)
    }
}

/// Moments with the thermal reference at temperature T.
pub fn brute_force_moments(
    rho_tilde: &ComplexMatrix,
    levels: &[f64],
    temperature: f64,
    order: usize,
) -> Result<MomentTable> {
    if !(temperature > 0.0) {
        return Err(Error::NonpositiveTemperature(temperature));
    }
    let weights: Vec<f64> = levels.iter().map(|e| (-e / temperature).exp()).collect();
    let z: f64 = weights.iter().sum();
    let q: Vec<f64> = weights.iter().map(|w| w / z).collect();
    brute_force_moments_with_reference(rho_tilde, levels, &q, order)
}

/// Moments by explicit summation over (l, m, n, μ, ν) with the full-swap bath selection rule.
pub fn brute_force_moments_with_reference(
    rho_tilde: &ComplexMatrix,
    levels: &[f64],
    reference: &[f64],
    order: usize,
) -> Result<MomentTable> {
    let d = rho_tilde.dim();
    if d > 5 {
        return Err(Error::DimensionTooLarge(d));
    }
    if levels.len() != d || reference.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: levels.len().min(reference.len()),
        });
    }
    if order > 4 {
        return Err(Error::InvalidArgument(format!(
            "moment order {order} above 4"
        )));
    }
    let eig = hermitian_eig(rho_tilde)?;
    let r: Vec<f64> = (0..d).map(|m| rho_tilde[(m, m)].re).collect();
    let mut table = MomentTable {
        quantum_heat: vec![0.0; order + 1],
        classical_heat: vec![0.0; order + 1],
        s_qu: vec![0.0; order + 1],
        s_cl: vec![0.0; order + 1],
    };
    for l in 0..d {
        let p = eig.values[l].max(0.0);
        let mut psi_energy = 0.0;
        for k in 0..d {
            psi_energy += eig.vectors[(k, l)].norm_sqr() * levels[k];
        }
        for m in 0..d {
            let ov = eig.vectors[(m, l)].norm_sqr();
            for n in 0..d {
                for mu in 0..d {
                    for nu in 0..d {
                        if mu != n || nu != m {
                            continue;
                        }
                        let prob = p * ov * reference[mu];
                        if prob <= 0.0 {
                            continue;
                        }
                        let xq = levels[m] - psi_energy;
                        let xc = levels[n] - levels[m];
                        let sq = (p / r[m]).ln();
                        let sc = (r[m] / reference[m]).ln();
                        for k in 0..=order {
                            let kk = k as i32;
                            table.quantum_heat[k] += prob * xq.powi(kk);
                            table.classical_heat[k] += prob * xc.powi(kk);
                            table.s_qu[k] += prob * sq.powi(kk);
                            table.s_cl[k] += prob * sc.powi(kk);
                        }
                    }
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn qheat_closed_form() {
        let mut qp = QubitParams {
            p: 0.6,
            theta: 0.0,
            theta_tilde: PI / 3.0,
            omega: 1.0,
            q1: 0.85,
        };
        let a = qubit_var_qheat(&qp);
        qp.p = 0.95;
        assert_eq!(a, qubit_var_qheat(&qp));
        assert!((a - 0.1875).abs() < 1e-15);
        qp.theta_tilde = PI / 2.0;
        assert!((qubit_var_qheat(&qp) - 0.25).abs() < 1e-15);
        qp.theta_tilde = 0.0;
        assert_eq!(qubit_var_qheat(&qp), 0.0);
    }

    #[test]
    fn clheat_closed_form() {
        assert!((qubit_var_clheat_from_populations(0.3, 0.2, 1.0) - 0.37).abs() < 1e-15);
        assert!((qubit_var_clheat_from_populations(0.85, 0.85, 1.0) - 0.255).abs() < 1e-15);
        assert_eq!(qubit_var_clheat_from_populations(1.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn brute_force_fig3() {
        let s = (PI / 6.0).sin();
        let c = (PI / 6.0).cos();
        let p: f64 = 0.95;
        let rho = ComplexMatrix::from_real(
            2,
            &[
                p * c * c + (1.0 - p) * s * s,
                -(2.0 * p - 1.0) * s * c,
                -(2.0 * p - 1.0) * s * c,
                p * s * s + (1.0 - p) * c * c,
            ],
        )
        .unwrap();
        let m = brute_force_moments_with_reference(&rho, &[-0.5, 0.5], &[0.725, 0.275], 2).unwrap();
        assert!(m.mean_quantum().abs() < 1e-15);
        assert!((m.var_quantum() - 0.1875).abs() < 1e-14);
        let diag = ComplexMatrix::from_diagonal(&[0.3, 0.7]);
        let m = brute_force_moments_with_reference(&diag, &[-0.5, 0.5], &[0.2, 0.8], 2).unwrap();
        assert!((m.mean_classical() - 0.1).abs() < 1e-15);
        assert!((m.var_classical() - 0.37).abs() < 1e-15);
        assert!(matches!(
            brute_force_moments(
                &ComplexMatrix::identity(6).scale_real(1.0 / 6.0),
                &[0.0; 6],
                1.0,
                2
            ),
            Err(Error::DimensionTooLarge(6))
        ));
    }
}
