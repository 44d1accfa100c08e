//! Seeded generators for random states, Hamiltonians and unitaries.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{inner, vector_norm, ComplexMatrix};
use crate::states::{DensityMatrix, Hamiltonian};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// B + B^H for Ginibre B.
pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let b = ginibre(dim, rng);
    &b + &b.adjoint()
}

/// G G^H / tr(G G^H); full rank with probability one.
pub fn density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).expect("Ginibre construction is a density matrix")
}

pub fn pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let n = vector_norm(&v);
    for z in v.iter_mut() {
        *z /= n;
    }
    v
}

/// Haar-distributed unitary via Gram-Schmidt on Ginibre columns.
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for u in &cols {
                let ov = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= ov * y;
                }
            }
        }
        let n = vector_norm(&v);
        if n < 1e-8 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= n;
        }
        cols.push(v);
    }
    ComplexMatrix::from_columns(&cols).expect("square")
}

/// Levels drawn uniformly from [-2, 2].
pub fn hamiltonian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Hamiltonian {
    let levels: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
    Hamiltonian::new(levels).expect("finite levels")
}

/// Population vector drawn from a flat Dirichlet, floored away from zero.
pub fn populations<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim)
        .map(|_| -rng.gen_range(1e-6f64..1.0).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// One random (state, Hamiltonian, temperature) triple.
pub struct CorpusEntry {
    pub state: DensityMatrix,
    pub hamiltonian: Hamiltonian,
    pub temperature: f64,
}

/// `count` seeded configurations cycling through dimensions 2..=5.
pub fn corpus(seed: u64, count: usize) -> Vec<CorpusEntry> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let dim = 2 + i % 4;
            CorpusEntry {
                state: density(dim, &mut r),
                hamiltonian: hamiltonian(dim, &mut r),
                temperature: r.gen_range(0.3..3.0),
            }
        })
        .collect()
}
