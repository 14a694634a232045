//! Relaxation spectrum of the resonant single-excitation sector.
//!
//! With `delta = gamma = 0` the populations and the atom-photon coherence,
//! collected in `r = (rho_11, rho_22, rho_12, rho_21)`, obey `dr/dt = R r`
//! with the complex-symmetric 4x4 matrix `R(g, kappa)`. Its spectrum is
//!
//! ```text
//! lambda_1,2 = -kappa/2,    lambda_3,4 = -kappa/2 +/- sqrt(kappa^2/4 - 4 g^2)
//! ```
//!
//! and two eigenvalues coalesce at `kappa/g = 4` (an exceptional point,
//! where `R` is defective). Away from it, `R` has a biorthonormal
//! eigenbasis with left vectors proportional to the conjugated right
//! vectors, and `r(t) = sum_i v_i <u_i|r(0)> exp(lambda_i t)`.

#[allow(unused_imports)] // unused when std is linked
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hilbert::{sector, DensityMatrix};
use crate::linalg::{c, schur, CMatrix, C64};

/// Exceptional point of `R` in units of `kappa/g`.
pub const CRITICAL_RATIO: f64 = 4.0;

/// Half-width (in `kappa/g`) of the window around the exceptional point in
/// which modal propagation is refused.
pub const DEFAULT_EP_TOLERANCE: f64 = 1e-3;

const I: C64 = c(0.0, 1.0);

/// `(rho_11, rho_22, rho_12, rho_21)` with `|1> = |e,0>`, `|2> = |g,1>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RVector(pub [C64; 4]);

impl RVector {
    pub const ZERO: RVector = RVector([c(0.0, 0.0); 4]);

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.n_cap() != 1 {
            return Err(Error::DimensionMismatch { expected: 3, found: rho.dim() });
        }
        let (e, p) = (sector::EXCITED_VACUUM, sector::GROUND_ONE_PHOTON);
        Ok(Self([rho.get(e, e), rho.get(p, p), rho.get(e, p), rho.get(p, e)]))
    }

    /// Populations only, e.g. `(1, 0, 0, 0)` for the excited atom.
    pub fn populations(excited: f64, photon: f64) -> Self {
        Self([c(excited, 0.0), c(photon, 0.0), C64::zero(), C64::zero()])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// The dynamical matrix `R(g, kappa)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicalMatrix {
    g: f64,
    kappa: f64,
    entries: [[C64; 4]; 4],
}

impl DynamicalMatrix {
    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn entries(&self) -> &[[C64; 4]; 4] {
        &self.entries
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_fn(4, |i, j| self.entries[i][j])
    }

    pub fn apply(&self, r: &RVector) -> RVector {
        let mut out = [C64::zero(); 4];
        for (i, row) in self.entries.iter().enumerate() {
            out[i] = row.iter().zip(&r.0).map(|(a, b)| a * b).sum();
        }
        RVector(out)
    }
}

pub fn build_dynamical_matrix(g: f64, kappa: f64) -> DynamicalMatrix {
    let ig = I * g;
    let z = C64::zero();
    let k = c(kappa, 0.0);
    let h = c(0.5 * kappa, 0.0);
    let entries = [[z, z, ig, -ig], [z, -k, -ig, ig], [ig, -ig, -h, z], [-ig, ig, z, -h]];
    DynamicalMatrix { g, kappa, entries }
}

/// `[-kappa/2, -kappa/2, -kappa/2 + s, -kappa/2 - s]`, `s = sqrt(kappa^2/4 - 4 g^2)`.
///
/// Below the exceptional point `s` is imaginary and `lambda_3` carries the
/// positive imaginary part.
pub fn closed_form_eigenvalues(g: f64, kappa: f64) -> [C64; 4] {
    let half = -0.5 * kappa;
    let disc = 0.25 * kappa * kappa - 4.0 * g * g;
    let s = if disc >= 0.0 { c(disc.sqrt(), 0.0) } else { c(0.0, (-disc).sqrt()) };
    [c(half, 0.0), c(half, 0.0), c(half, 0.0) + s, c(half, 0.0) - s]
}

/// Unnormalised right eigenvector for a root of `lambda^2 + kappa lambda + 4 g^2`.
pub fn closed_form_mode_vector(g: f64, kappa: f64, lambda: C64) -> [C64; 4] {
    let kl = lambda + kappa;
    let coh = I * g * (lambda * 2.0 + kappa) / (kl * (lambda + 0.5 * kappa));
    [c(1.0, 0.0), -lambda / kl, coh, -coh]
}

/// Basis of the `-kappa/2` eigenspace: `(0,0,1,1)` and `(1,1,i k/4g,-i k/4g)`.
///
/// The two are orthogonal under the bilinear form `x^T y`.
pub fn degenerate_basis(g: f64, kappa: f64) -> [[C64; 4]; 2] {
    let a = I * (kappa / (4.0 * g));
    [[C64::zero(), C64::zero(), c(1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0), a, -a]]
}

/// Slow-mode decay rate `4 g^2 / kappa` in the strong-dissipation limit.
pub fn purcell_rate(g: f64, kappa: f64) -> f64 {
    4.0 * g * g / kappa
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Underdamped,
    Critical,
    Overdamped,
}

pub fn classify_regime(g: f64, kappa: f64, ep_tol: f64) -> Regime {
    let ratio = kappa / g;
    if (ratio - CRITICAL_RATIO).abs() <= ep_tol {
        Regime::Critical
    } else if ratio < CRITICAL_RATIO {
        Regime::Underdamped
    } else {
        Regime::Overdamped
    }
}

// Orders a raw spectrum as [pair at -kappa/2, slow or +Im, fast or -Im].
fn order_spectrum(raw: &[C64], kappa: f64) -> [C64; 4] {
    let centre = c(-0.5 * kappa, 0.0);
    let mut idx = [0usize, 1, 2, 3];
    idx.sort_by(|&a, &b| (raw[a] - centre).norm().total_cmp(&(raw[b] - centre).norm()));
    let (mut p, mut q) = (raw[idx[0]], raw[idx[1]]);
    if (p.im, p.re) < (q.im, q.re) {
        core::mem::swap(&mut p, &mut q);
    }
    let (mut a, mut b) = (raw[idx[2]], raw[idx[3]]);
    let scale = a.norm().max(b.norm()).max(1.0);
    let same_re = (a.re - b.re).abs() <= 1e-12 * scale;
    if (same_re && a.im < b.im) || (!same_re && a.re < b.re) {
        core::mem::swap(&mut a, &mut b);
    }
    [p, q, a, b]
}

/// Eigenvalues of `R` from the general complex eigen-solver, ordered like
/// [`closed_form_eigenvalues`].
pub fn numerical_eigenvalues(r: &DynamicalMatrix) -> Result<[C64; 4]> {
    let s = schur(&r.to_cmatrix())?;
    Ok(order_spectrum(&s.eigenvalues(), r.kappa))
}

/// Eigenvalues with paired right/left eigenvectors of `R`.
///
/// Right vectors have unit Euclidean norm, with the phase chosen so that the
/// first largest-modulus component is real and positive. Left vectors are
/// `u_i = conj(v_i) / conj(v_i^T v_i)`, which gives `<u_i|v_j> = delta_ij`.
/// Inside the exceptional-point window `ep_flag` is set and the left
/// vectors are left at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: [C64; 4],
    pub right: [[C64; 4]; 4],
    pub left: [[C64; 4]; 4],
    pub regime: Regime,
    pub ep_flag: bool,
    pub kappa_over_g: f64,
}

fn normalize_with_phase(v: &mut [C64; 4]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let largest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v.iter().position(|z| z.norm() >= largest * (1.0 - 1e-9)).expect("non-empty vector");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

fn bilinear(a: &[C64; 4], b: &[C64; 4]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn eigen_decompose(r: &DynamicalMatrix, ep_tol: f64) -> Result<SpectralDecomposition> {
    let (g, kappa) = (r.g, r.kappa);
    let s = schur(&r.to_cmatrix())?;
    let raw = s.eigenvalues();
    let eigenvalues = order_spectrum(&raw, kappa);
    let regime = classify_regime(g, kappa, ep_tol);
    let ep_flag = regime == Regime::Critical;

    let [v1, v2] = degenerate_basis(g, kappa);
    let mut right = [v1, v2, [C64::zero(); 4], [C64::zero(); 4]];
    for slot in 2..4 {
        let target = eigenvalues[slot];
        let k = (0..4)
            .min_by(|&a, &b| (raw[a] - target).norm().total_cmp(&(raw[b] - target).norm()))
            .expect("four eigenvalues");
        let v = s.eigenvector(k);
        right[slot] = [v[0], v[1], v[2], v[3]];
    }
    for v in right.iter_mut() {
        normalize_with_phase(v);
    }

    let mut left = [[C64::zero(); 4]; 4];
    if !ep_flag {
        for (u, v) in left.iter_mut().zip(&right) {
            let beta = bilinear(v, v);
            for (uk, vk) in u.iter_mut().zip(v) {
                *uk = vk.conj() / beta.conj();
            }
        }
    }

    Ok(SpectralDecomposition { eigenvalues, right, left, regime, ep_flag, kappa_over_g: kappa / g })
}

impl SpectralDecomposition {
    /// `<u_i|v_j>`.
    pub fn overlap(&self, i: usize, j: usize) -> C64 {
        self.left[i].iter().zip(&self.right[j]).map(|(u, v)| u.conj() * v).sum()
    }

    fn usable(&self) -> Result<()> {
        if self.ep_flag {
            Err(Error::ExceptionalPoint(self.kappa_over_g))
        } else {
            Ok(())
        }
    }
}

/// Modal coefficients `c_i = <u_i|r0>`, so that `r0 = sum_i c_i v_i`.
pub fn mode_overlaps(r0: &RVector, dec: &SpectralDecomposition) -> Result<[C64; 4]> {
    dec.usable()?;
    let mut coeffs = [C64::zero(); 4];
    for (ci, u) in coeffs.iter_mut().zip(&dec.left) {
        *ci = u.iter().zip(&r0.0).map(|(a, b)| a.conj() * b).sum();
    }
    Ok(coeffs)
}

/// `r(t) = sum_i v_i <u_i|r0> exp(lambda_i t)`.
pub fn propagate_spectral(r0: &RVector, dec: &SpectralDecomposition, t: f64) -> Result<RVector> {
    let coeffs = mode_overlaps(r0, dec)?;
    let mut out = [C64::zero(); 4];
    for i in 0..4 {
        let amp = coeffs[i] * (dec.eigenvalues[i] * t).exp();
        for (o, v) in out.iter_mut().zip(&dec.right[i]) {
            *o += amp * v;
        }
    }
    Ok(RVector(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn matrix_rows_match_the_printed_form() {
        let r = build_dynamical_matrix(1.0, 8.0);
        let e = r.entries();
        assert_eq!(e[0], [c(0.0, 0.0), c(0.0, 0.0), I, -I]);
        assert_eq!(e[1], [c(0.0, 0.0), c(-8.0, 0.0), -I, I]);
        assert_eq!(e[2], [I, -I, c(-4.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(e[3], [-I, I, c(0.0, 0.0), c(-4.0, 0.0)]);
        let m = r.to_cmatrix();
        assert_eq!(m, m.transpose());
    }

    #[test]
    fn lossless_matrix_is_anti_hermitian() {
        let m = build_dynamical_matrix(1.0, 0.0).to_cmatrix();
        assert_eq!(m.adjoint(), m.scale(c(-1.0, 0.0)));
    }

    #[test]
    fn weak_coupling_matrix_is_nearly_diagonal() {
        let m = build_dynamical_matrix(1e-8, 3.0).to_cmatrix();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(m[(i, j)].norm() < 1e-7);
                }
            }
        }
        let diag: [f64; 4] = core::array::from_fn(|i| m[(i, i)].re);
        assert_eq!(diag, [0.0, -3.0, -1.5, -1.5]);
    }

    #[test]
    fn closed_form_examples() {
        let ev = closed_form_eigenvalues(1.0, 8.0);
        let expected = [-4.0, -4.0, -0.535_898_384_862_245_4, -7.464_101_615_137_754];
        for (z, e) in ev.iter().zip(expected) {
            assert!(close(*z, c(e, 0.0), 1e-12));
        }
        assert!(closed_form_eigenvalues(1.0, 4.0).iter().all(|z| close(*z, c(-2.0, 0.0), 1e-15)));
        let ev = closed_form_eigenvalues(1.0, 0.0);
        assert_eq!(ev, [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 2.0), c(0.0, -2.0)]);
    }

    #[test]
    fn regime_examples() {
        assert_eq!(classify_regime(1.0, 2.0, 1e-6), Regime::Underdamped);
        assert_eq!(classify_regime(1.0, 4.0, 1e-6), Regime::Critical);
        assert_eq!(classify_regime(1.0, 8.0, 1e-6), Regime::Overdamped);
    }

    #[test]
    fn degenerate_basis_spans_the_half_kappa_eigenspace() {
        let r = build_dynamical_matrix(1.3, 2.7);
        for v in degenerate_basis(1.3, 2.7) {
            let rv = r.apply(&RVector(v));
            for k in 0..4 {
                assert!(close(rv.0[k], v[k] * -1.35, 1e-14));
            }
        }
    }

    #[test]
    fn numerical_matches_closed_form() {
        for &k in &[0.0, 0.5, 2.0, 3.9, 4.1, 8.0, 16.0] {
            let num = numerical_eigenvalues(&build_dynamical_matrix(1.0, k)).unwrap();
            let cf = closed_form_eigenvalues(1.0, k);
            for (a, b) in num.iter().zip(&cf) {
                assert!(close(*a, *b, 1e-10), "kappa={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn decomposition_is_biorthonormal() {
        let dec = eigen_decompose(&build_dynamical_matrix(1.0, 8.0), DEFAULT_EP_TOLERANCE).unwrap();
        assert!(!dec.ep_flag);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(close(dec.overlap(i, j), c(want, 0.0), 1e-9), "({i},{j})");
            }
        }
        let v3 = dec.right[2];
        assert!(v3[0].im == 0.0 && v3[0].re > 0.9);
    }

    #[test]
    fn exceptional_point_is_flagged() {
        let dec = eigen_decompose(&build_dynamical_matrix(1.0, 4.0), DEFAULT_EP_TOLERANCE).unwrap();
        assert!(dec.ep_flag);
        assert_eq!(dec.regime, Regime::Critical);
        let r0 = RVector::populations(1.0, 0.0);
        assert!(matches!(mode_overlaps(&r0, &dec), Err(Error::ExceptionalPoint(_))));
        assert!(matches!(propagate_spectral(&r0, &dec, 1.0), Err(Error::ExceptionalPoint(_))));
    }

    #[test]
    fn overlap_examples() {
        let dec = eigen_decompose(&build_dynamical_matrix(1.0, 8.0), DEFAULT_EP_TOLERANCE).unwrap();
        let cs = mode_overlaps(&RVector(dec.right[2]), &dec).unwrap();
        for (i, ci) in cs.iter().enumerate() {
            let want = if i == 2 { 1.0 } else { 0.0 };
            assert!(close(*ci, c(want, 0.0), 1e-12));
        }
        let cs = mode_overlaps(&RVector::ZERO, &dec).unwrap();
        assert!(cs.iter().all(|z| z.is_zero()));
    }

    #[test]
    fn propagation_limits() {
        let dec = eigen_decompose(&build_dynamical_matrix(1.0, 8.0), DEFAULT_EP_TOLERANCE).unwrap();
        let r0 = RVector::populations(1.0, 0.0);
        let back = propagate_spectral(&r0, &dec, 0.0).unwrap();
        assert!(back.max_abs_diff(&r0) < 1e-12);
        assert!(propagate_spectral(&r0, &dec, 50.0).unwrap().norm() < 1e-9);
        // frozen from the two-mode amplitude oracle, |c_e(4)|^2 = 0.1360702
        let p = propagate_spectral(&r0, &dec, 4.0).unwrap();
        assert!((p.0[0].re - 0.13608).abs() < 1e-4);
    }
}
