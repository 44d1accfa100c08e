use proptest::prelude::*;

use qtraj::channels::{
    coh_monotonicity_certificate, dephasing_semigroup, transition_matrix, CovariantQubitChannel,
    FourierFamily, UnitaryPart,
};
use qtraj::numerics::{hermitian_eig, unitary_eig, ComplexMatrix};
use qtraj::oracles::brute_force_moments;
use qtraj::protocol::{
    enumerate_averages, plan_protocol, report, Imperfection, QubitProtocol, Rotation, Step4,
};
use qtraj::random;
use qtraj::states::{
    bloch_vector, from_bloch, pythagorean_split, relative_entropy, thermal_state, DensityMatrix,
    Hamiltonian,
};
use qtraj::trajectories::{
    build_step3_ensemble, classical_heat_distribution, entropy_production_stats,
    integral_fluctuation_sum, monte_carlo_sample, quantum_heat_distribution,
};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), d in 2usize..7) {
        let mut rng = random::rng(seed);
        let a = random::hermitian(d, &mut rng);
        let eig = hermitian_eig(&a).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&a) < 1e-10);
        prop_assert!(eig.orthonormality_residual() < 1e-10);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn unitary_powers_compose(seed in any::<u64>(), d in 2usize..6, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let mut rng = random::rng(seed);
        let u = random::unitary(d, &mut rng);
        let eig = unitary_eig(&u).unwrap();
        prop_assert!(eig.power(1.0).max_abs_diff(&u) < 1e-9);
        let lhs = &eig.power(s) * &eig.power(t);
        prop_assert!(lhs.max_abs_diff(&eig.power(s + t)) < 1e-9);
        prop_assert!(eig.power(s).unitary_residual() < 1e-9);
    }

    #[test]
    fn fourier_transition_matrix_is_symmetric_doubly_stochastic(d in 2usize..9, theta in 0.0f64..1.0) {
        let fam = FourierFamily::new(d).unwrap();
        let m = transition_matrix(&fam.interpolated_unitary(theta).unwrap()).unwrap();
        prop_assert!(m.doubly_stochastic_residual() < 1e-10);
        prop_assert!(m.symmetry_residual() < 1e-10);
    }

    #[test]
    fn ensemble_identities(seed in any::<u64>(), d in 2usize..6, t in 0.2f64..4.0) {
        let mut rng = random::rng(seed);
        let rho = random::density(d, &mut rng);
        let h = random::hamiltonian(d, &mut rng);
        let ens = build_step3_ensemble(&rho, &h, t).unwrap();
        prop_assert_eq!(ens.len(), d * d * d);
        prop_assert!((ens.total_probability() - 1.0).abs() < 1e-12);
        prop_assert!((integral_fluctuation_sum(&ens) - 1.0).abs() < 1e-12);
        prop_assert!(quantum_heat_distribution(&ens).mean().abs() < 1e-12);
        let stats = entropy_production_stats(&ens);
        let split = pythagorean_split(&rho, &h, t).unwrap();
        prop_assert!((stats.avg_s_qu - split.quantum).abs() < 1e-12);
        prop_assert!((stats.avg_s_cl - split.classical).abs() < 1e-12);
        prop_assert!(stats.avg_s_qu >= -1e-12 && stats.avg_s_cl >= -1e-12);
        prop_assert!(ens.reconstructed_decohered_state().max_abs_diff(&ComplexMatrix::from_diagonal(ens.decohered())) < 1e-12);
    }

    #[test]
    fn heat_moments_match_brute_force(seed in any::<u64>(), d in 2usize..6, t in 0.2f64..4.0) {
        let mut rng = random::rng(seed);
        let rho = random::density(d, &mut rng);
        let h = random::hamiltonian(d, &mut rng);
        let ens = build_step3_ensemble(&rho, &h, t).unwrap();
        let oracle = brute_force_moments(rho.matrix(), h.levels(), t, 4).unwrap();
        let q = quantum_heat_distribution(&ens);
        let c = classical_heat_distribution(&ens);
        for k in 0..=4 {
            let scale = 1.0 + oracle.quantum_heat[k].abs();
            prop_assert!((q.moment(k as i32) - oracle.quantum_heat[k]).abs() < 1e-10 * scale);
            let scale = 1.0 + oracle.classical_heat[k].abs();
            prop_assert!((c.moment(k as i32) - oracle.classical_heat[k]).abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn relative_entropy_is_nonnegative(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = random::rng(seed);
        let a = random::density(d, &mut rng);
        let b = random::density(d, &mut rng);
        prop_assert!(relative_entropy(&a, &b) >= -1e-12);
        prop_assert!(relative_entropy(&a, &a).abs() < 1e-10);
    }

    #[test]
    fn dephasing_is_a_semigroup(seed in any::<u64>(), d in 2usize..5, t1 in 0.0f64..3.0, t2 in 0.0f64..3.0) {
        let mut rng = random::rng(seed);
        let rho = random::density(d, &mut rng);
        let h = random::hamiltonian(d, &mut rng);
        let once = dephasing_semigroup(&rho, &h, t1 + t2).unwrap();
        let twice = dephasing_semigroup(&dephasing_semigroup(&rho, &h, t1).unwrap(), &h, t2).unwrap();
        prop_assert!(once.matrix().max_abs_diff(twice.matrix()) < 1e-12);
        prop_assert_eq!(once.populations(), rho.populations());
    }

    #[test]
    fn bloch_round_trip(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        let norm = (x * x + y * y + z * z).sqrt();
        prop_assume!(norm <= 1.0);
        let rho = from_bloch([x, y, z]).unwrap();
        let n = bloch_vector(&rho).unwrap();
        prop_assert!((n[0] - x).abs() < 1e-12 && (n[1] - y).abs() < 1e-12 && (n[2] - z).abs() < 1e-12);
    }

    #[test]
    fn certified_channels_do_not_raise_coherence(
        seed in any::<u64>(),
        lambda in 0.0f64..=1.0,
        t in 0.0f64..5.0,
        w in prop::array::uniform3(0.0f64..1.0),
    ) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 1e-3);
        let weights = [w[0] / total, w[1] / total, 1.0 - w[0] / total - w[1] / total];
        prop_assume!(weights[2] >= 0.0);
        let ch = CovariantQubitChannel::new(lambda, UnitaryPart::Dephasing { t }, weights).unwrap();
        let mut rng = random::rng(seed);
        let rho = random::density(2, &mut rng);
        let cert = coh_monotonicity_certificate(&ch, &rho).unwrap();
        if cert.verdict {
            prop_assert!(cert.coherence_decreased(1e-12));
        }
    }

    #[test]
    fn qubit_protocol_footprint(
        p in 0.55f64..0.99,
        theta in -1.5f64..1.5,
        coh in 0.0f64..0.5,
        nonth in -0.5f64..0.1,
        t in 0.3f64..3.0,
        n in 2usize..40,
    ) {
        let qp = QubitProtocol::from_coh_nonth(p, theta, coh, nonth, t, 1.0).unwrap();
        for step4 in [Step4::Quasistatic, Step4::Steps(n)] {
            let rep = report(&qp.plan(step4).unwrap()).unwrap();
            prop_assert!(rep.footprint_residual < 1e-10);
            prop_assert!(rep.avg_s_step4 >= -1e-12);
        }
        let quasi = report(&qp.plan(Step4::Quasistatic).unwrap()).unwrap();
        let finite = report(&qp.plan(Step4::Steps(n)).unwrap()).unwrap();
        prop_assert!(finite.avg_w_ext <= quasi.avg_w_ext + 1e-12);
    }

    #[test]
    fn protocol_enumeration_matches_report(seed in any::<u64>(), d in 2usize..4, n in 2usize..5) {
        let mut rng = random::rng(seed);
        let rho = random::density(d, &mut rng);
        let h0 = random::hamiltonian(d, &mut rng);
        let imp = Imperfection {
            rotation: Rotation::Unitary(random::unitary(d, &mut rng)),
            h1: random::hamiltonian(d, &mut rng),
        };
        let spec = plan_protocol(&rho, &h0, 1.1, &imp, Step4::Steps(n)).unwrap();
        let rep = report(&spec).unwrap();
        let avg = enumerate_averages(&spec, 1_000_000).unwrap();
        prop_assert!((avg.total_probability - 1.0).abs() < 1e-12);
        prop_assert!((avg.avg_work - rep.avg_w_ext).abs() < 1e-12);
        prop_assert!((avg.avg_s_qu - rep.avg_s_qu).abs() < 1e-12);
        prop_assert!((avg.avg_s_cl - rep.avg_s_cl).abs() < 1e-12);
        prop_assert!((avg.avg_s_step4 - rep.avg_s_step4).abs() < 1e-12);
        prop_assert!((avg.fluctuation_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_state_is_the_reference_fixed_point(seed in any::<u64>(), d in 2usize..6, t in 0.2f64..4.0) {
        let mut rng = random::rng(seed);
        let h = random::hamiltonian(d, &mut rng);
        let tau = thermal_state(&h, t).unwrap();
        let ens = build_step3_ensemble(&tau, &h, t).unwrap();
        let stats = entropy_production_stats(&ens);
        prop_assert!(stats.avg_s_qu.abs() < 1e-12 && stats.avg_s_cl.abs() < 1e-12);
        prop_assert!(classical_heat_distribution(&ens).mean().abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn monte_carlo_ignores_worker_count(seed in any::<u64>(), workers in 2usize..9) {
        let rho = DensityMatrix::qubit(0.95, std::f64::consts::PI / 3.0).unwrap();
        let h = Hamiltonian::qubit(1.0).unwrap();
        let ens = build_step3_ensemble(&rho, &h, 1.0).unwrap();
        let a = monte_carlo_sample(&ens, 200_000, seed, 1).unwrap();
        let b = monte_carlo_sample(&ens, 200_000, seed, workers).unwrap();
        prop_assert_eq!(a.counts, b.counts);
    }
}
