//! Small dense complex linear algebra.
//!
//! Everything here targets matrices of dimension at most a few hundred:
//! the 4x4 dynamical matrix, (2N+1)x(2N+1) density matrices, and the
//! (2N+1)^2 square generator matrices. Two solvers are provided:
//!
//! * cyclic complex Jacobi rotations for Hermitian eigenvalues,
//! * Householder reduction to Hessenberg form followed by single-shift
//!   complex QR iterations for the Schur form of a general matrix, with
//!   eigenvectors recovered by back-substitution on the triangular factor.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)] // unused when std is linked
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from rows; panics if the rows are not square.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| {
            assert_eq!(rows[i].len(), n, "row {i} has the wrong length");
            rows[i][j]
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|z| *z = C64::zero());
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Only the upper triangle is read; the strictly lower part is taken to be
/// its conjugate mirror.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut a = CMatrix::from_fn(n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)].conj() });
    for i in 0..n {
        a[(i, i)] = c(a[(i, i)].re, 0.0);
    }
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return vec![0.0; n];
    }

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let abs = apq.norm();
                if abs <= 1e-300 {
                    continue;
                }
                let phase = apq / abs;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * abs);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // U = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let u00 = c(cs, 0.0);
                let u01 = c(sn, 0.0);
                let u10 = -phase.conj() * sn;
                let u11 = phase.conj() * cs;
                for k in 0..n {
                    let x = a[(k, p)];
                    let y = a[(k, q)];
                    a[(k, p)] = x * u00 + y * u10;
                    a[(k, q)] = x * u01 + y * u11;
                }
                for k in 0..n {
                    let x = a[(p, k)];
                    let y = a[(q, k)];
                    a[(p, k)] = u00.conj() * x + u10.conj() * y;
                    a[(q, k)] = u01.conj() * x + u11.conj() * y;
                }
                a[(p, q)] = C64::zero();
                a[(q, p)] = C64::zero();
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Complex Schur factorisation `A = Z T Z^H` with `T` upper triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub t: CMatrix,
    pub z: CMatrix,
}

// (c, s) such that [[c, s], [-conj(s), c]] maps (a, b) to (r, 0).
fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C64::zero());
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    let cs = na / r;
    let sn = (a / na) * b.conj() / r;
    (cs, sn)
}

fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let norm: f64 = ((k + 1)..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { c(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vnorm);

        // H <- (I - 2 v v^H) H
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(l, vl)| vl.conj() * h[(k + 1 + l, j)]).sum();
            for (l, vl) in v.iter().enumerate() {
                h[(k + 1 + l, j)] -= vl * dot * 2.0;
            }
        }
        // H <- H (I - 2 v v^H), Q <- Q (I - 2 v v^H)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let dot: C64 = v.iter().enumerate().map(|(l, vl)| m[(i, k + 1 + l)] * vl).sum();
                for (l, vl) in v.iter().enumerate() {
                    m[(i, k + 1 + l)] -= dot * vl.conj() * 2.0;
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C64::zero();
        }
    }
    (h, q)
}

fn wilkinson_shift(a: C64, b: C64, cc: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * cc).sqrt();
    let mean = (a + d) * 0.5;
    let e1 = mean + disc;
    let e2 = mean - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Computes the complex Schur form of `a`.
pub fn schur(a: &CMatrix) -> Result<Schur> {
    let n = a.dim();
    let (mut t, mut z) = hessenberg(a);
    if n == 0 {
        return Ok(Schur { t, z });
    }
    let eps = f64::EPSILON;
    let small = f64::MIN_POSITIVE / eps;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let mut rot: Vec<(f64, C64)> = Vec::with_capacity(n);

    while hi > 0 {
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let diag = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            if sub <= eps * diag || sub <= small {
                t[(lo, lo - 1)] = C64::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > 100 * n.max(10) {
            return Err(Error::NoConvergence("complex Schur QR iteration"));
        }

        let shift = if iter.is_multiple_of(11) {
            t[(hi, hi)] + c(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };

        for k in lo..=hi {
            t[(k, k)] -= shift;
        }
        rot.clear();
        for k in lo..hi {
            let (cs, sn) = givens(t[(k, k)], t[(k + 1, k)]);
            rot.push((cs, sn));
            for j in k..n {
                let x = t[(k, j)];
                let y = t[(k + 1, j)];
                t[(k, j)] = x * cs + sn * y;
                t[(k + 1, j)] = -sn.conj() * x + y * cs;
            }
            t[(k + 1, k)] = C64::zero();
        }
        for (idx, &(cs, sn)) in rot.iter().enumerate() {
            let k = lo + idx;
            let row_end = (k + 2).min(hi);
            for i in 0..=row_end {
                let x = t[(i, k)];
                let y = t[(i, k + 1)];
                t[(i, k)] = x * cs + sn.conj() * y;
                t[(i, k + 1)] = -sn * x + y * cs;
            }
            for i in 0..n {
                let x = z[(i, k)];
                let y = z[(i, k + 1)];
                z[(i, k)] = x * cs + sn.conj() * y;
                z[(i, k + 1)] = -sn * x + y * cs;
            }
        }
        for k in lo..=hi {
            t[(k, k)] += shift;
        }
    }

    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = C64::zero();
        }
    }
    Ok(Schur { t, z })
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.dim()).map(|i| self.t[(i, i)]).collect()
    }

    /// Right eigenvector for the `k`-th diagonal entry of `T`, unit
    /// Euclidean norm, arbitrary phase.
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        let n = self.t.dim();
        let lambda = self.t[(k, k)];
        let smin = (f64::EPSILON * self.t.max_abs()).max(f64::MIN_POSITIVE);
        let mut x = vec![C64::zero(); n];
        x[k] = c(1.0, 0.0);
        for j in (0..k).rev() {
            let sum: C64 = ((j + 1)..=k).map(|l| self.t[(j, l)] * x[l]).sum();
            let mut denom = self.t[(j, j)] - lambda;
            if denom.norm() < smin {
                denom = c(smin, 0.0);
            }
            x[j] = -sum / denom;
        }
        let mut v = self.z.mul_vec(&x);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        v
    }
}

/// Eigenvalues of a general complex matrix (unordered).
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    Ok(schur(a)?.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        CMatrix::from_fn(n, |_, _| c(next(), next()))
    }

    #[test]
    fn schur_reconstructs_matrix() {
        for (n, seed) in [(1, 1), (2, 2), (4, 3), (9, 4), (25, 5)] {
            let a = random_matrix(n, seed);
            let s = schur(&a).unwrap();
            let back = s.z.matmul(&s.t).matmul(&s.z.adjoint());
            assert!(back.sub(&a).max_abs() < 1e-12, "n={n}");
            let unit = s.z.adjoint().matmul(&s.z).sub(&CMatrix::identity(n)).max_abs();
            assert!(unit < 1e-12);
        }
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let a = random_matrix(7, 11);
        let s = schur(&a).unwrap();
        for k in 0..7 {
            let v = s.eigenvector(k);
            let av = a.mul_vec(&v);
            let lam = s.t[(k, k)];
            let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - lam * y).norm()).fold(0.0, f64::max);
            assert!(res < 1e-11, "k={k} res={res}");
        }
    }

    #[test]
    fn hermitian_eigenvalues_of_known_matrix() {
        // Pauli-y has eigenvalues -1, +1.
        let m = CMatrix::from_rows(&[&[c(0.0, 0.0), c(0.0, -1.0)], &[c(0.0, 1.0), c(0.0, 0.0)]]);
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_eigenvalues_match_schur() {
        let a = random_matrix(6, 7);
        let h = a.add(&a.adjoint());
        let mut from_schur: Vec<f64> = eigenvalues(&h).unwrap().iter().map(|z| z.re).collect();
        from_schur.sort_by(f64::total_cmp);
        let jac = hermitian_eigenvalues(&h);
        for (x, y) in jac.iter().zip(&from_schur) {
            assert!((x - y).abs() < 1e-12);
        }
        let tr: f64 = jac.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-12);
    }

    #[test]
    fn defective_jordan_block_converges() {
        let m = CMatrix::from_rows(&[&[c(2.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(2.0, 0.0)]]);
        let ev = eigenvalues(&m).unwrap();
        assert!(ev.iter().all(|z| (z - c(2.0, 0.0)).norm() < 1e-7));
    }
}
