//! Dense complex linear algebra for small Hermitian and unitary matrices.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-12;
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Eigenvalues below this are zero for log/power kernels in lenient mode.
pub const LENIENT_ZERO: f64 = 1e-15;

const JACOBI_STOP: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;
const PHASE_ANCHOR_TOL: f64 = 1e-12;
const PHASE_CLUSTER_TOL: f64 = 1e-8;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Builds from row-major entries; `entries.len()` must be a nonzero perfect square.
    pub fn from_row_major(entries: Vec<Complex64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(Error::InvalidArgument(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(ComplexMatrix { dim, data: entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| c(entries[i * dim + j], 0.0)))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                c(diag[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    /// |v><v|
    pub fn projector(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Result<Self> {
        let dim = cols.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("no columns".into()));
        }
        for col in cols {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: col.len(),
                });
            }
        }
        Ok(Self::from_fn(dim, |i, j| cols[j][i]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermitian_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn unitary_residual(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim))
    }

    /// Largest off-diagonal modulus.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    worst = worst.max(self[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// U A U^H
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// <v| A |v>
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        inner(v, &self.apply(v))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// <a|b>, conjugate-linear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues ascending; `vectors` holds the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.vectors.column(i)
    }

    /// Σ f(λ_i) |v_i><v_i|
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    pub fn orthonormality_residual(&self) -> f64 {
        (&self.vectors.adjoint() * &self.vectors).max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }

    pub fn has_degeneracy(&self, tol: f64) -> bool {
        self.values.windows(2).any(|w| (w[1] - w[0]).abs() <= tol)
    }
}

fn off_diagonal_frobenius(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenSystem> {
    let residual = a.hermitian_residual();
    if !(residual <= HERMITIAN_TOL) {
        return Err(Error::NonHermitianInput { residual });
    }
    let n = a.dim();
    let mut m = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            c(a[(i, i)].re, 0.0)
        } else {
            (a[(i, j)] + a[(j, i)].conj()) * 0.5
        }
    });
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_STOP * m.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_frobenius(&m) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let theta = (m[(q, q)].re - m[(p, p)].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let jpp = c(cs, 0.0);
                let jpq = c(sn, 0.0);
                let jqp = -phase.conj() * sn;
                let jqq = phase.conj() * cs;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * jpp + mkq * jqp;
                    m[(k, q)] = mkp * jpq + mkq * jqq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = jpp.conj() * mpk + jqp.conj() * mqk;
                    m[(q, k)] = jpq.conj() * mpk + jqq.conj() * mqk;
                }
                m[(p, q)] = c(0.0, 0.0);
                m[(q, p)] = c(0.0, 0.0);
                m[(p, p)].im = 0.0;
                m[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    let pairs: Vec<(f64, Vec<Complex64>)> = (0..n).map(|k| (m[(k, k)].re, v.column(k))).collect();
    Ok(canonical_order(pairs))
}

/// Applies the phase and ordering conventions to eigenpairs.
fn canonical_order(mut pairs: Vec<(f64, Vec<Complex64>)>) -> EigenSystem {
    for (_, vec) in pairs.iter_mut() {
        fix_phase(vec);
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lexicographic(&b.1, &a.1));
        }
        start = end;
    }
    let values = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<Vec<Complex64>> = pairs.into_iter().map(|p| p.1).collect();
    EigenSystem {
        values,
        vectors: ComplexMatrix::from_columns(&cols).expect("square eigenvector matrix"),
    }
}

/// Multiplies by a global phase so the first non-negligible component is real positive.
pub fn fix_phase(v: &mut [Complex64]) {
    if let Some(anchor) = v.iter().find(|z| z.norm() > PHASE_ANCHOR_TOL).copied() {
        let rot = anchor.conj() / anchor.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
        match x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

pub fn matrix_function(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(a)?.map(f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainMode {
    /// Any eigenvalue at or below `LENIENT_ZERO` is an error.
    Strict,
    /// Eigenvalues below `LENIENT_ZERO` (and above `-POSITIVITY_TOL`) map to zero.
    Lenient,
}

fn check_domain(eig: &EigenSystem, mode: DomainMode) -> Result<()> {
    for &lam in &eig.values {
        let bad = match mode {
            DomainMode::Strict => lam <= LENIENT_ZERO,
            DomainMode::Lenient => lam < -POSITIVITY_TOL,
        };
        if bad {
            return Err(Error::DomainError { value: lam });
        }
    }
    Ok(())
}

pub fn matrix_log(a: &ComplexMatrix, mode: DomainMode) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    check_domain(&eig, mode)?;
    Ok(eig.map(|x| if x < LENIENT_ZERO { 0.0 } else { x.ln() }))
}

pub fn matrix_power(a: &ComplexMatrix, alpha: f64, mode: DomainMode) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    check_domain(&eig, mode)?;
    Ok(eig.map(|x| if x < LENIENT_ZERO { 0.0 } else { x.powf(alpha) }))
}

pub fn matrix_exp_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_function(a, f64::exp)
}

/// Eigen-decomposition of a unitary: phases in (-π, π] with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    pub phases: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl UnitaryEigen {
    /// V diag(e^{i s φ}) V^H, i.e. exp(s·G) for the principal generator G.
    pub fn power(&self, s: f64) -> ComplexMatrix {
        let n = self.phases.len();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &phi) in self.phases.iter().enumerate() {
            let w = Complex64::from_polar(1.0, s * phi);
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn generator(&self) -> ComplexMatrix {
        let n = self.phases.len();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &phi) in self.phases.iter().enumerate() {
            let w = c(0.0, phi);
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

pub fn unitary_eig(u: &ComplexMatrix) -> Result<UnitaryEigen> {
    let residual = u.unitary_residual();
    if !(residual <= UNITARY_TOL) {
        return Err(Error::NonUnitaryInput { residual });
    }
    let n = u.dim();
    let ud = u.adjoint();
    let h1 = (u + &ud).scale_real(0.5);
    let h2 = (u - &ud).scale(c(0.0, -0.5));
    let e1 = hermitian_eig(&h1)?;

    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && e1.values[end] - e1.values[end - 1] <= PHASE_CLUSTER_TOL {
            end += 1;
        }
        let block: Vec<Vec<Complex64>> = (start..end).map(|k| e1.vector(k)).collect();
        if block.len() == 1 {
            cols.push(block[0].clone());
        } else {
            let k = block.len();
            let restricted =
                ComplexMatrix::from_fn(k, |a, b| inner(&block[a], &h2.apply(&block[b])));
            let sub = hermitian_eig(&restricted)?;
            for s in 0..k {
                let mut w = vec![c(0.0, 0.0); n];
                for (a, basis) in block.iter().enumerate() {
                    let coef = sub.vectors[(a, s)];
                    for i in 0..n {
                        w[i] += basis[i] * coef;
                    }
                }
                cols.push(w);
            }
        }
        start = end;
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = cols
        .into_iter()
        .map(|mut w| {
            let norm = vector_norm(&w);
            for z in w.iter_mut() {
                *z /= norm;
            }
            let lam = inner(&w, &u.apply(&w));
            let mut phi = lam.im.atan2(lam.re);
            if phi <= -std::f64::consts::PI + 1e-9 {
                phi = std::f64::consts::PI;
            }
            (phi, w)
        })
        .collect();
    for (_, w) in pairs.iter_mut() {
        fix_phase(w);
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let phases = pairs.iter().map(|p| p.0).collect();
    let vecs: Vec<Vec<Complex64>> = pairs.into_iter().map(|p| p.1).collect();
    Ok(UnitaryEigen {
        phases,
        vectors: ComplexMatrix::from_columns(&vecs)?,
    })
}

/// Principal logarithm G (skew-Hermitian, eigenphases in (-π, π]) with exp(G) = U.
pub fn unitary_log_principal(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(unitary_eig(u)?.generator())
}

/// exp(G) for skew-Hermitian G.
pub fn exp_skew_hermitian(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = g.scale(c(0.0, -1.0));
    let eig = hermitian_eig(&h)?;
    let n = g.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (k, &lam) in eig.values.iter().enumerate() {
        let w = Complex64::from_polar(1.0, lam);
        for i in 0..n {
            let vi = eig.vectors[(i, k)] * w;
            for j in 0..n {
                out[(i, j)] += vi * eig.vectors[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Hermitian,
    Unitary,
    Density,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Validation {
    pub passed: bool,
    pub diagnostic: String,
}

pub fn validate(a: &ComplexMatrix, kind: MatrixKind) -> Validation {
    let herm = a.hermitian_residual();
    match kind {
        MatrixKind::Hermitian => Validation {
            passed: herm <= HERMITIAN_TOL,
            diagnostic: format!("max |A - A^H| = {herm:.3e}"),
        },
        MatrixKind::Unitary => {
            let r = a.unitary_residual();
            Validation {
                passed: r <= UNITARY_TOL,
                diagnostic: format!("max |U^H U - I| = {r:.3e}"),
            }
        }
        MatrixKind::Density => {
            if herm > HERMITIAN_TOL {
                return Validation {
                    passed: false,
                    diagnostic: format!("not Hermitian: max |A - A^H| = {herm:.3e}"),
                };
            }
            let tr = a.trace();
            let trace_err = (tr - c(1.0, 0.0)).norm();
            let min_eig = match hermitian_eig(a) {
                Ok(e) => e.values[0],
                Err(e) => {
                    return Validation {
                        passed: false,
                        diagnostic: e.to_string(),
                    }
                }
            };
            Validation {
                passed: trace_err <= TRACE_TOL && min_eig >= -POSITIVITY_TOL,
                diagnostic: format!(
                    "|tr - 1| = {trace_err:.3e}, min eigenvalue = {min_eig:.3e}, max |A - A^H| = {herm:.3e}"
                ),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = hermitian_eig(&pauli_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&pauli_x()) < 1e-14);
    }

    #[test]
    fn identity_spectrum_is_flat() {
        let e = hermitian_eig(&ComplexMatrix::identity(3)).unwrap();
        assert!(e.values.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        assert!(e.orthonormality_residual() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            hermitian_eig(&a),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn phase_convention_makes_anchor_real_positive() {
        let a = ComplexMatrix::from_row_major(vec![
            c(1.0, 0.0),
            c(0.0, 2.0),
            c(0.0, -2.0),
            c(-1.0, 0.0),
        ])
        .unwrap();
        let e = hermitian_eig(&a).unwrap();
        for k in 0..2 {
            let v = e.vector(k);
            assert!(v[0].re > 0.0 && v[0].im.abs() < 1e-15);
        }
    }

    #[test]
    fn exp_of_diagonal() {
        let m = matrix_exp_hermitian(&ComplexMatrix::from_diagonal(&[0.0, 1.0])).unwrap();
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((m[(1, 1)].re - std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn sqrt_of_half_identity() {
        let a = ComplexMatrix::identity(2).scale_real(0.5);
        let m = matrix_power(&a, 0.5, DomainMode::Strict).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5f64.sqrt())) < 1e-14);
    }

    #[test]
    fn strict_log_rejects_singular() {
        let a = ComplexMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            matrix_log(&a, DomainMode::Strict),
            Err(Error::DomainError { .. })
        ));
        let l = matrix_log(&a, DomainMode::Lenient).unwrap();
        assert!(l.max_abs() < 1e-15);
    }

    #[test]
    fn log_of_identity_and_minus_one() {
        let g = unitary_log_principal(&ComplexMatrix::identity(3)).unwrap();
        assert!(g.max_abs() < 1e-15);
        let g = unitary_log_principal(&ComplexMatrix::from_diagonal(&[1.0, -1.0])).unwrap();
        assert!(g[(0, 0)].norm() < 1e-15);
        assert!((g[(1, 1)] - c(0.0, std::f64::consts::PI)).norm() < 1e-14);
    }

    #[test]
    fn density_validation() {
        assert!(
            validate(
                &ComplexMatrix::identity(3).scale_real(1.0 / 3.0),
                MatrixKind::Density
            )
            .passed
        );
        assert!(!validate(&pauli_x(), MatrixKind::Density).passed);
        assert!(validate(&pauli_x(), MatrixKind::Unitary).passed);
    }
}
