//! Lindblad right-hand sides for the three model families and the
//! stationary-state solver.
//!
//! * [`GeneratorKind::SingleExcitation`]: the three-state sector
//!   `{|e,0>, |g,1>, |g,0>}` at zero temperature.
//! * [`GeneratorKind::NManifold`]: the truncated space with at most `N`
//!   excitations, zero temperature, ladder factors `sqrt(n)`.
//! * [`GeneratorKind::ThermalRestricted`]: the three-state sector with
//!   thermal photon and atomic excitation rates.
//!
//! The kernels act on arbitrary complex matrices (they are linear maps), so
//! the same code is used for integration and for assembling the
//! superoperator matrix.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused when std is linked
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hilbert::{dimension, sector, DensityMatrix};
use crate::linalg::{c, schur, CMatrix, C64};
use crate::params::ModelParams;

/// Null-space acceptance threshold relative to the largest `|lambda|`.
pub const NULL_SPACE_RELATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    SingleExcitation,
    NManifold,
    ThermalRestricted,
}

impl GeneratorKind {
    /// The natural family for a parameter set: thermal when any bath
    /// occupation is non-zero, otherwise single-excitation for `N = 1` and
    /// the N-manifold above.
    pub fn for_params(p: &ModelParams) -> Self {
        if !p.is_zero_temperature() {
            GeneratorKind::ThermalRestricted
        } else if p.n_excitations == 1 {
            GeneratorKind::SingleExcitation
        } else {
            GeneratorKind::NManifold
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::SingleExcitation => "single-excitation",
            GeneratorKind::NManifold => "n-manifold",
            GeneratorKind::ThermalRestricted => "thermal-restricted",
        }
    }
}

/// A generator with parameters validated once at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Generator {
    kind: GeneratorKind,
    params: ModelParams,
    n_cap: usize,
}

impl Generator {
    pub fn new(kind: GeneratorKind, params: ModelParams) -> Result<Self> {
        params.validate()?;
        let mismatch = |reason: &str| Error::GeneratorMismatch { kind: kind.name(), reason: reason.into() };
        match kind {
            GeneratorKind::SingleExcitation | GeneratorKind::NManifold if !params.is_zero_temperature() => {
                return Err(mismatch("thermal occupations must be zero; use the thermal-restricted generator"));
            }
            GeneratorKind::SingleExcitation | GeneratorKind::ThermalRestricted if params.n_excitations != 1 => {
                return Err(mismatch("requires the N = 1 three-state basis"));
            }
            _ => {}
        }
        let n_cap = match kind {
            GeneratorKind::NManifold => params.n_excitations,
            _ => 1,
        };
        Ok(Self { kind, params, n_cap })
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n_cap(&self) -> usize {
        self.n_cap
    }

    /// Hilbert-space dimension `2N+1`.
    pub fn dim(&self) -> usize {
        dimension(self.n_cap)
    }

    /// Writes `L(rho)` into `out`. Both must be `dim x dim`.
    pub fn apply(&self, rho: &CMatrix, out: &mut CMatrix) {
        debug_assert_eq!(rho.dim(), self.dim());
        debug_assert_eq!(out.dim(), self.dim());
        match self.kind {
            GeneratorKind::SingleExcitation => single_excitation(rho, &self.params, out),
            GeneratorKind::NManifold => n_manifold(rho, &self.params, self.n_cap, out),
            GeneratorKind::ThermalRestricted => thermal(rho, &self.params, out),
        }
    }

    /// `d rho / dt` for a density matrix on this generator's space.
    pub fn rhs(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        if rho.n_cap() != self.n_cap {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        let mut out = CMatrix::zeros(self.dim());
        self.apply(rho.entries(), &mut out);
        Ok(out)
    }

    /// Superoperator matrix acting on column-stacked density matrices,
    /// `vec(rho)[i + j d] = rho_ij`.
    pub fn matrix(&self) -> GeneratorMatrix {
        let d = self.dim();
        let mut entries = CMatrix::zeros(d * d);
        let mut unit = CMatrix::zeros(d);
        let mut image = CMatrix::zeros(d);
        for j in 0..d {
            for i in 0..d {
                unit[(i, j)] = c(1.0, 0.0);
                image.fill_zero();
                self.apply(&unit, &mut image);
                unit[(i, j)] = C64::zero();
                let col = i + j * d;
                for q in 0..d {
                    for p in 0..d {
                        entries[(p + q * d, col)] = image[(p, q)];
                    }
                }
            }
        }
        GeneratorMatrix { hilbert_dim: d, entries }
    }

    /// Unique unit-trace fixed point of the generator.
    ///
    /// Found as the eigenvector of the smallest-modulus eigenvalue of the
    /// superoperator matrix; fails if that eigenvalue is not numerically
    /// zero or if the null space is more than one-dimensional.
    pub fn stationary_state(&self) -> Result<DensityMatrix> {
        let d = self.dim();
        let lm = self.matrix();
        let s = schur(&lm.entries)?;
        let ev = s.eigenvalues();
        let largest = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let threshold = NULL_SPACE_RELATIVE_TOLERANCE * largest;
        if largest == 0.0 {
            return Err(Error::DegenerateNullSpace { count: ev.len(), threshold });
        }
        let (k0, smallest) =
            ev.iter().map(|z| z.norm()).enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty spectrum");
        if smallest >= threshold {
            return Err(Error::NoNullSpace { smallest, threshold });
        }
        let count = ev.iter().filter(|z| z.norm() < threshold).count();
        if count > 1 {
            return Err(Error::DegenerateNullSpace { count, threshold });
        }

        let v = s.eigenvector(k0);
        let mut m = CMatrix::from_fn(d, |i, j| v[i + j * d]);
        let tr = m.trace();
        if tr.norm() < 1e-12 {
            return Err(Error::NoNullSpace { smallest, threshold });
        }
        m = m.scale(tr.inv());
        let herm = m.add(&m.adjoint()).scale(c(0.5, 0.0));
        DensityMatrix::new(self.n_cap, herm)
    }
}

/// Column-stacked superoperator matrix of a generator.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMatrix {
    hilbert_dim: usize,
    entries: CMatrix,
}

impl GeneratorMatrix {
    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Applies the matrix to `vec(rho)` and reshapes back.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.hilbert_dim;
        let v: Vec<C64> = (0..d * d).map(|k| rho[(k % d, k / d)]).collect();
        let w = self.entries.mul_vec(&v);
        CMatrix::from_fn(d, |i, j| w[i + j * d])
    }

    /// `max_col |sum_i L[(i,i), col]|`: how far `Tr` is from a left null vector.
    pub fn trace_residual(&self) -> f64 {
        let d = self.hilbert_dim;
        (0..d * d).map(|col| (0..d).map(|i| self.entries[(i + i * d, col)]).sum::<C64>().norm()).fold(0.0, f64::max)
    }
}

// Labels |1> = |e,0>, |2> = |g,1>, |3> = |g,0> mapped to the
// canonical N = 1 indices.
const S: [usize; 4] = [usize::MAX, sector::EXCITED_VACUUM, sector::GROUND_ONE_PHOTON, sector::GROUND_VACUUM];

const I: C64 = c(0.0, 1.0);

fn single_excitation(rho: &CMatrix, p: &ModelParams, out: &mut CMatrix) {
    let r = |a: usize, b: usize| rho[(S[a], S[b])];
    let (g, kappa, gamma, delta) = (p.g, p.kappa, p.gamma, p.delta);
    let coh = 0.5 * (gamma + kappa);

    let exchange = r(2, 1) - r(1, 2);
    out[(S[1], S[1])] = -I * g * exchange - gamma * r(1, 1);
    out[(S[2], S[2])] = I * g * exchange - kappa * r(2, 2);
    out[(S[3], S[3])] = gamma * r(1, 1) + kappa * r(2, 2);

    let pop = r(2, 2) - r(1, 1);
    out[(S[1], S[2])] = -I * delta * r(1, 2) - I * g * pop - coh * r(1, 2);
    out[(S[2], S[1])] = I * delta * r(2, 1) + I * g * pop - coh * r(2, 1);

    out[(S[1], S[3])] = -I * (0.5 * delta) * r(1, 3) - I * g * r(2, 3) - 0.5 * gamma * r(1, 3);
    out[(S[2], S[3])] = I * (0.5 * delta) * r(2, 3) - I * g * r(1, 3) - 0.5 * kappa * r(2, 3);
    out[(S[3], S[1])] = I * (0.5 * delta) * r(3, 1) + I * g * r(3, 2) - 0.5 * gamma * r(3, 1);
    out[(S[3], S[2])] = -I * (0.5 * delta) * r(3, 2) + I * g * r(3, 1) - 0.5 * kappa * r(3, 2);
}

fn thermal(rho: &CMatrix, p: &ModelParams, out: &mut CMatrix) {
    let r = |a: usize, b: usize| rho[(S[a], S[b])];
    let (g, kappa, gamma, delta) = (p.g, p.kappa, p.gamma, p.delta);
    let (nc, na) = (p.n_th, p.n_th_atom);

    let down_atom = gamma * (1.0 + na);
    let up_atom = gamma * na;
    let down_cav = kappa * (1.0 + nc);
    let up_cav = kappa * nc;

    let exchange = r(2, 1) - r(1, 2);
    out[(S[1], S[1])] = -I * g * exchange - down_atom * r(1, 1) + up_atom * r(3, 3);
    out[(S[2], S[2])] = I * g * exchange - down_cav * r(2, 2) + up_cav * r(3, 3);
    out[(S[3], S[3])] = down_atom * r(1, 1) + down_cav * r(2, 2) - (up_atom + up_cav) * r(3, 3);

    let coh12 = 0.5 * gamma * (1.0 + 2.0 * na) + 0.5 * kappa * (1.0 + nc);
    let pop = r(2, 2) - r(1, 1);
    out[(S[1], S[2])] = -I * delta * r(1, 2) - I * g * pop - coh12 * r(1, 2);
    out[(S[2], S[1])] = I * delta * r(2, 1) + I * g * pop - coh12 * r(2, 1);

    let coh13 = 0.5 * gamma * (1.0 + na) + 0.5 * kappa * nc;
    let coh23 = 0.5 * kappa * (1.0 + 2.0 * nc) + 0.5 * gamma * na;
    out[(S[1], S[3])] = -I * (0.5 * delta) * r(1, 3) - I * g * r(2, 3) - coh13 * r(1, 3);
    out[(S[2], S[3])] = I * (0.5 * delta) * r(2, 3) - I * g * r(1, 3) - coh23 * r(2, 3);
    out[(S[3], S[1])] = I * (0.5 * delta) * r(3, 1) + I * g * r(3, 2) - coh13 * r(3, 1);
    out[(S[3], S[2])] = -I * (0.5 * delta) * r(3, 2) + I * g * r(3, 1) - coh23 * r(3, 2);
}

// Block accessors with explicit range guards; out-of-range elements are zero.
struct Blocks<'a> {
    rho: &'a CMatrix,
    n_cap: isize,
}

impl Blocks<'_> {
    fn gi(&self, n: isize) -> usize {
        n as usize
    }

    fn ei(&self, n: isize) -> usize {
        (self.n_cap + 1 + n) as usize
    }

    fn g_ok(&self, n: isize) -> bool {
        (0..=self.n_cap).contains(&n)
    }

    fn e_ok(&self, n: isize) -> bool {
        (0..self.n_cap).contains(&n)
    }

    fn gg(&self, n: isize, m: isize) -> C64 {
        if self.g_ok(n) && self.g_ok(m) {
            self.rho[(self.gi(n), self.gi(m))]
        } else {
            C64::zero()
        }
    }

    fn ee(&self, n: isize, m: isize) -> C64 {
        if self.e_ok(n) && self.e_ok(m) {
            self.rho[(self.ei(n), self.ei(m))]
        } else {
            C64::zero()
        }
    }

    fn eg(&self, n: isize, m: isize) -> C64 {
        if self.e_ok(n) && self.g_ok(m) {
            self.rho[(self.ei(n), self.gi(m))]
        } else {
            C64::zero()
        }
    }

    fn ge(&self, n: isize, m: isize) -> C64 {
        if self.g_ok(n) && self.e_ok(m) {
            self.rho[(self.gi(n), self.ei(m))]
        } else {
            C64::zero()
        }
    }
}

fn sqrt_i(n: isize) -> f64 {
    (n as f64).sqrt()
}

fn n_manifold(rho: &CMatrix, p: &ModelParams, n_cap: usize, out: &mut CMatrix) {
    let b = Blocks { rho, n_cap: n_cap as isize };
    let nc = n_cap as isize;
    let (g, kappa, gamma, delta) = (p.g, p.kappa, p.gamma, p.delta);
    let ladder = |n: isize, m: isize| sqrt_i((n + 1) * (m + 1));
    let half_sum = |n: isize, m: isize| 0.5 * (n + m) as f64;

    for n in 0..=nc {
        for m in 0..=nc {
            let coherent = -I * g * (sqrt_i(n) * b.eg(n - 1, m) - sqrt_i(m) * b.ge(n, m - 1));
            let loss = kappa * (ladder(n, m) * b.gg(n + 1, m + 1) - half_sum(n, m) * b.gg(n, m));
            out[(b.gi(n), b.gi(m))] = coherent + loss + gamma * b.ee(n, m);
        }
    }
    for n in 0..nc {
        for m in 0..nc {
            let coherent = -I * g * (sqrt_i(n + 1) * b.ge(n + 1, m) - sqrt_i(m + 1) * b.eg(n, m + 1));
            let loss = kappa * (ladder(n, m) * b.ee(n + 1, m + 1) - half_sum(n, m) * b.ee(n, m));
            out[(b.ei(n), b.ei(m))] = coherent + loss - gamma * b.ee(n, m);
        }
    }
    for n in 0..nc {
        for m in 0..=nc {
            let coherent =
                I * delta * b.eg(n, m) - I * g * (sqrt_i(n + 1) * b.gg(n + 1, m) - sqrt_i(m) * b.ee(n, m - 1));
            let loss = kappa * (ladder(n, m) * b.eg(n + 1, m + 1) - half_sum(n, m) * b.eg(n, m));
            out[(b.ei(n), b.gi(m))] = coherent + loss - 0.5 * gamma * b.eg(n, m);
        }
    }
    for n in 0..=nc {
        for m in 0..nc {
            let coherent =
                -I * delta * b.ge(n, m) - I * g * (sqrt_i(n) * b.ee(n - 1, m) - sqrt_i(m + 1) * b.gg(n, m + 1));
            let loss = kappa * (ladder(n, m) * b.ge(n + 1, m + 1) - half_sum(n, m) * b.ge(n, m));
            out[(b.gi(n), b.ei(m))] = coherent + loss - 0.5 * gamma * b.ge(n, m);
        }
    }
}

fn check_n_cap(rho: &DensityMatrix, expected: usize) -> Result<()> {
    if rho.n_cap() != expected {
        return Err(Error::DimensionMismatch { expected: dimension(expected), found: rho.dim() });
    }
    Ok(())
}

/// Zero-temperature three-state right-hand side.
pub fn rhs_single_excitation(rho: &DensityMatrix, p: &ModelParams) -> Result<CMatrix> {
    check_n_cap(rho, 1)?;
    let gen = Generator::new(GeneratorKind::SingleExcitation, ModelParams { n_excitations: 1, ..*p })?;
    gen.rhs(rho)
}

/// Zero-temperature right-hand side on the `N`-excitation manifold.
pub fn rhs_n_manifold(rho: &DensityMatrix, p: &ModelParams, n_cap: usize) -> Result<CMatrix> {
    if n_cap < 1 {
        return Err(Error::InvalidParams(format!("excitation cap N must be at least 1, got {n_cap}")));
    }
    check_n_cap(rho, n_cap)?;
    let gen = Generator::new(GeneratorKind::NManifold, ModelParams { n_excitations: n_cap, ..*p })?;
    gen.rhs(rho)
}

/// Three-state right-hand side with thermal baths.
pub fn rhs_thermal(rho: &DensityMatrix, p: &ModelParams) -> Result<CMatrix> {
    check_n_cap(rho, 1)?;
    let gen = Generator::new(GeneratorKind::ThermalRestricted, ModelParams { n_excitations: 1, ..*p })?;
    gen.rhs(rho)
}

pub fn stationary_state(kind: GeneratorKind, p: &ModelParams) -> Result<DensityMatrix> {
    Generator::new(kind, *p)?.stationary_state()
}
