//! Truncated atom-cavity Hilbert space: basis ordering, density matrices,
//! observables and distance measures.
//!
//! For an excitation cap `N` the basis is
//! `|g,0>, |g,1>, ..., |g,N>, |e,0>, ..., |e,N-1>` (dimension `2N+1`).
//! The single-excitation sector used by the three-state models is the
//! `N = 1` case, so `|1> = |e,0>` sits at index 2, `|2> = |g,1>` at 1 and
//! `|3> = |g,0>` at 0.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, CMatrix, C64};

/// Default validity tolerances for density matrices.
pub const TRACE_TOLERANCE: f64 = 1e-9;
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Ground,
    Excited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub atom: Atom,
    pub photons: usize,
}

impl BasisLabel {
    pub const fn ground(photons: usize) -> Self {
        Self { atom: Atom::Ground, photons }
    }

    pub const fn excited(photons: usize) -> Self {
        Self { atom: Atom::Excited, photons }
    }

    /// Total excitation number `a^dag a + sigma^+ sigma^-`.
    pub fn excitations(&self) -> usize {
        self.photons + usize::from(self.atom == Atom::Excited)
    }
}

/// The three single-excitation sector states in the canonical `N = 1` basis.
pub mod sector {
    /// `|1> = |e,0>`
    pub const EXCITED_VACUUM: usize = 2;
    /// `|2> = |g,1>`
    pub const GROUND_ONE_PHOTON: usize = 1;
    /// `|3> = |g,0>`
    pub const GROUND_VACUUM: usize = 0;
}

pub const fn dimension(n_cap: usize) -> usize {
    2 * n_cap + 1
}

pub fn basis_index(label: BasisLabel, n_cap: usize) -> Result<usize> {
    match label.atom {
        Atom::Ground if label.photons <= n_cap => Ok(label.photons),
        Atom::Excited if label.photons < n_cap => Ok(n_cap + 1 + label.photons),
        _ => Err(Error::InvalidLabel {
            atom: if label.atom == Atom::Ground { 'g' } else { 'e' },
            photons: label.photons,
            n_cap,
        }),
    }
}

pub fn basis_label(index: usize, n_cap: usize) -> Result<BasisLabel> {
    if index <= n_cap {
        Ok(BasisLabel::ground(index))
    } else if index < dimension(n_cap) {
        Ok(BasisLabel::excited(index - n_cap - 1))
    } else {
        Err(Error::DimensionMismatch { expected: dimension(n_cap), found: index + 1 })
    }
}

/// Validity tolerances for density matrices, overridable per call site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub trace: f64,
    pub positivity: f64,
    pub hermiticity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { trace: TRACE_TOLERANCE, positivity: POSITIVITY_TOLERANCE, hermiticity: HERMITICITY_TOLERANCE }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on the truncated
/// space with excitation cap `n_cap`.
///
/// The stored matrix is always exactly Hermitian: constructors keep the
/// upper triangle and mirror it.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_cap: usize,
    entries: CMatrix,
}

fn mirror_upper(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(m.dim(), |i, j| match i.cmp(&j) {
        core::cmp::Ordering::Less => m[(i, j)],
        core::cmp::Ordering::Equal => c(m[(i, i)].re, 0.0),
        core::cmp::Ordering::Greater => m[(j, i)].conj(),
    })
}

impl DensityMatrix {
    /// Validates and wraps `entries` with the default tolerances.
    pub fn new(n_cap: usize, entries: CMatrix) -> Result<Self> {
        Self::with_tolerances(n_cap, entries, &Tolerances::default())
    }

    pub fn with_tolerances(n_cap: usize, entries: CMatrix, tol: &Tolerances) -> Result<Self> {
        if n_cap < 1 {
            return Err(Error::InvalidParams("excitation cap N must be at least 1".into()));
        }
        if entries.dim() != dimension(n_cap) {
            return Err(Error::DimensionMismatch { expected: dimension(n_cap), found: entries.dim() });
        }
        let residual = entries.hermiticity_residual();
        if residual > tol.hermiticity {
            return Err(Error::NotHermitian(residual));
        }
        let rho = Self { n_cap, entries: mirror_upper(&entries) };
        rho.check(tol)?;
        Ok(rho)
    }

    /// Mirrors the upper triangle without any validation.
    pub(crate) fn from_upper_unchecked(n_cap: usize, entries: &CMatrix) -> Self {
        Self { n_cap, entries: mirror_upper(entries) }
    }

    pub fn check(&self, tol: &Tolerances) -> Result<()> {
        let drift = self.trace() - 1.0;
        if drift.abs() > tol.trace {
            return Err(Error::TraceViolation(drift));
        }
        let min = self.min_eigenvalue();
        if min < -tol.positivity {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    pub fn pure(label: BasisLabel, n_cap: usize) -> Result<Self> {
        let idx = basis_index(label, n_cap)?;
        let mut m = CMatrix::zeros(dimension(n_cap));
        m[(idx, idx)] = c(1.0, 0.0);
        Ok(Self { n_cap, entries: m })
    }

    /// Diagonal state from `(label, probability)` pairs.
    pub fn diagonal(n_cap: usize, populations: &[(BasisLabel, f64)]) -> Result<Self> {
        let mut m = CMatrix::zeros(dimension(n_cap));
        for &(label, p) in populations {
            let idx = basis_index(label, n_cap)?;
            m[(idx, idx)] += c(p, 0.0);
        }
        Self::new(n_cap, m)
    }

    /// Convex combination `a rho + (1 - a) sigma`.
    pub fn mix(a: f64, rho: &Self, sigma: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidParams(format!("mixing weight {a} outside [0, 1]")));
        }
        rho.same_space(sigma)?;
        let m = rho.entries.scale(c(a, 0.0)).add(&sigma.entries.scale(c(1.0 - a, 0.0)));
        Ok(Self { n_cap: rho.n_cap, entries: m })
    }

    pub fn n_cap(&self) -> usize {
        self.n_cap
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn element(&self, row: BasisLabel, col: BasisLabel) -> Result<C64> {
        Ok(self.entries[(basis_index(row, self.n_cap)?, basis_index(col, self.n_cap)?)])
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.entries.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Expectation of the total excitation number.
    pub fn excitation_number(&self) -> f64 {
        self.diagonal_weighted(|l| l.excitations() as f64)
    }

    fn diagonal_weighted(&self, weight: impl Fn(BasisLabel) -> f64) -> f64 {
        (0..self.dim())
            .map(|i| {
                let label = basis_label(i, self.n_cap).expect("index within dimension");
                weight(label) * self.entries[(i, i)].re
            })
            .sum()
    }

    /// Divides by the trace; returns the trace deviation that was removed.
    pub(crate) fn renormalize(&mut self) -> f64 {
        let tr = self.trace();
        let inv = c(1.0 / tr, 0.0);
        self.entries = self.entries.scale(inv);
        tr - 1.0
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.n_cap != other.n_cap {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

/// Atomic excitation probability `Tr(|e><e| rho)`.
pub fn atomic_excitation(rho: &DensityMatrix) -> f64 {
    rho.diagonal_weighted(|l| if l.atom == Atom::Excited { 1.0 } else { 0.0 })
}

/// Intracavity photon number `Tr(a^dag a rho)`.
pub fn photon_number(rho: &DensityMatrix) -> f64 {
    rho.diagonal_weighted(|l| l.photons as f64)
}

/// Trace distance `1/2 Tr|rho - sigma|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.same_space(sigma)?;
    let diff = rho.entries.sub(&sigma.entries);
    let half_sum: f64 = 0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>();
    Ok(half_sum.min(1.0))
}

/// Hilbert-Schmidt distance `sqrt(Tr[(rho - sigma)^2])`.
pub fn hs_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.same_space(sigma)?;
    Ok(rho.entries.sub(&sigma.entries).frobenius_norm())
}

/// Both distances of a pair of states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistancePair {
    pub d_tr: f64,
    pub d_hs: f64,
}

pub fn distances(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DistancePair> {
    Ok(DistancePair { d_tr: trace_distance(rho, sigma)?, d_hs: hs_distance(rho, sigma)? })
}

// Packed real representation of a Hermitian matrix: the real diagonal
// followed by (re, im) of each strictly-upper entry in row-major order.
pub(crate) fn packed_len(dim: usize) -> usize {
    dim * dim
}

pub(crate) fn pack_upper(m: &CMatrix, out: &mut [f64]) {
    let d = m.dim();
    debug_assert_eq!(out.len(), packed_len(d));
    for i in 0..d {
        out[i] = m[(i, i)].re;
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            out[k] = m[(i, j)].re;
            out[k + 1] = m[(i, j)].im;
            k += 2;
        }
    }
}

pub(crate) fn unpack_hermitian(y: &[f64], m: &mut CMatrix) {
    let d = m.dim();
    debug_assert_eq!(y.len(), packed_len(d));
    for i in 0..d {
        m[(i, i)] = c(y[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = c(y[k], y[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
}

impl DensityMatrix {
    pub(crate) fn to_packed(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; packed_len(self.dim())];
        pack_upper(&self.entries, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e0() -> DensityMatrix {
        DensityMatrix::pure(BasisLabel::excited(0), 1).unwrap()
    }
    fn g0() -> DensityMatrix {
        DensityMatrix::pure(BasisLabel::ground(0), 1).unwrap()
    }
    fn g1() -> DensityMatrix {
        DensityMatrix::pure(BasisLabel::ground(1), 1).unwrap()
    }

    #[test]
    fn basis_index_examples() {
        assert_eq!(basis_index(BasisLabel::ground(0), 1), Ok(0));
        assert_eq!(basis_index(BasisLabel::excited(0), 1), Ok(2));
        assert_eq!(basis_index(BasisLabel::ground(2), 2), Ok(2));
        assert!(basis_index(BasisLabel::excited(1), 1).is_err());
        assert!(basis_index(BasisLabel::ground(3), 2).is_err());
    }

    #[test]
    fn basis_index_is_a_bijection() {
        for n in 1..6 {
            for i in 0..dimension(n) {
                let label = basis_label(i, n).unwrap();
                assert_eq!(basis_index(label, n).unwrap(), i);
            }
            assert!(basis_label(dimension(n), n).is_err());
        }
    }

    #[test]
    fn sector_constants_follow_the_ordering() {
        assert_eq!(basis_index(BasisLabel::excited(0), 1).unwrap(), sector::EXCITED_VACUUM);
        assert_eq!(basis_index(BasisLabel::ground(1), 1).unwrap(), sector::GROUND_ONE_PHOTON);
        assert_eq!(basis_index(BasisLabel::ground(0), 1).unwrap(), sector::GROUND_VACUUM);
    }

    #[test]
    fn observables_on_basis_states() {
        assert_eq!(atomic_excitation(&e0()), 1.0);
        assert_eq!(atomic_excitation(&g0()), 0.0);
        let half = DensityMatrix::mix(0.5, &e0(), &g1()).unwrap();
        assert!((atomic_excitation(&half) - 0.5).abs() < 1e-15);

        let g2 = DensityMatrix::pure(BasisLabel::ground(2), 2).unwrap();
        assert_eq!(photon_number(&g2), 2.0);
        assert_eq!(photon_number(&e0()), 0.0);
        let mixed = DensityMatrix::mix(0.5, &g1(), &g0()).unwrap();
        assert!((photon_number(&mixed) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let half = DensityMatrix::mix(0.5, &e0(), &g0()).unwrap();
        assert!((trace_distance(&e0(), &g0()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(trace_distance(&e0(), &e0()).unwrap(), 0.0);
        assert!((trace_distance(&half, &g0()).unwrap() - 0.5).abs() < 1e-12);

        assert!((hs_distance(&e0(), &g0()).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(hs_distance(&e0(), &e0()).unwrap(), 0.0);
        assert!((hs_distance(&half, &g0()).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let big = DensityMatrix::pure(BasisLabel::ground(0), 2).unwrap();
        assert!(matches!(trace_distance(&big, &g0()), Err(Error::DimensionMismatch { .. })));
        assert!(hs_distance(&g0(), &big).is_err());
    }

    #[test]
    fn constructor_rejects_invalid_matrices() {
        let mut m = CMatrix::zeros(3);
        m[(0, 0)] = c(0.5, 0.0);
        assert!(matches!(DensityMatrix::new(1, m.clone()), Err(Error::TraceViolation(_))));
        m[(1, 1)] = c(0.5, 0.0);
        m[(0, 1)] = c(0.0, 0.1);
        assert!(matches!(DensityMatrix::new(1, m.clone()), Err(Error::NotHermitian(_))));
        m[(1, 0)] = c(0.0, -0.1);
        assert!(DensityMatrix::new(1, m.clone()).is_ok());
        // |rho_01| larger than sqrt(rho_00 rho_11) breaks positivity
        m[(0, 1)] = c(0.8, 0.0);
        m[(1, 0)] = c(0.8, 0.0);
        assert!(matches!(DensityMatrix::new(1, m), Err(Error::NotPositive(_))));
        assert!(matches!(DensityMatrix::new(2, CMatrix::identity(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn packing_round_trips() {
        let mut m = CMatrix::zeros(3);
        m[(0, 0)] = c(0.2, 0.0);
        m[(1, 1)] = c(0.3, 0.0);
        m[(2, 2)] = c(0.5, 0.0);
        m[(0, 2)] = c(0.1, -0.05);
        m[(2, 0)] = c(0.1, 0.05);
        let rho = DensityMatrix::new(1, m).unwrap();
        let y = rho.to_packed();
        let mut back = CMatrix::zeros(3);
        unpack_hermitian(&y, &mut back);
        assert_eq!(&back, rho.entries());
    }
}
