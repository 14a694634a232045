//! Physical parameters of the dissipative Jaynes-Cummings model.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Thermal occupations above this value leave the validity range of the
/// restricted three-state thermal model.
pub const THERMAL_OCCUPATION_WARNING: f64 = 0.2;

/// Rates and occupations in the rotating frame of the cavity.
///
/// All rates share one unit; the CLI fixes it to `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Atom-cavity coupling.
    pub g: f64,
    /// Cavity loss rate of the high-loss stage.
    pub kappa: f64,
    /// Cavity loss rate of the low-loss stage of a two-step protocol.
    pub kappa1: f64,
    /// Atomic spontaneous emission rate.
    pub gamma: f64,
    /// Atom-cavity detuning.
    pub delta: f64,
    /// Mean thermal photon number of the cavity bath.
    pub n_th: f64,
    /// Mean thermal excitation of the atomic bath.
    pub n_th_atom: f64,
    /// Excitation cap `N` of the truncated Hilbert space.
    pub n_excitations: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { g: 1.0, kappa: 8.0, kappa1: 0.0, gamma: 0.0, delta: 0.0, n_th: 0.0, n_th_atom: 0.0, n_excitations: 1 }
    }
}

/// Non-fatal parameter diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamWarning {
    LargeThermalPhotons(f64),
    LargeThermalAtom(f64),
}

impl core::fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ParamWarning::LargeThermalPhotons(n) => write!(
                f,
                "n_th = {n} exceeds {THERMAL_OCCUPATION_WARNING}; the restricted thermal manifold may be inaccurate"
            ),
            ParamWarning::LargeThermalAtom(n) => write!(
                f,
                "n_th_atom = {n} exceeds {THERMAL_OCCUPATION_WARNING}; the restricted thermal manifold may be inaccurate"
            ),
        }
    }
}

impl ModelParams {
    /// Resonant, atom-loss-free parameters with only `g` and `kappa` set.
    pub fn resonant(g: f64, kappa: f64) -> Self {
        Self { g, kappa, ..Self::default() }
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.n_th == 0.0 && self.n_th_atom == 0.0
    }

    /// Checks signs and finiteness. `g = 0` is accepted (purely dissipative limit).
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g", self.g),
            ("kappa", self.kappa),
            ("kappa1", self.kappa1),
            ("gamma", self.gamma),
            ("n_th", self.n_th),
            ("n_th_atom", self.n_th_atom),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
            if v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParams(format!("delta must be finite, got {}", self.delta)));
        }
        if self.n_excitations < 1 {
            return Err(Error::InvalidParams("excitation cap N must be at least 1".into()));
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<ParamWarning> {
        let mut out = Vec::new();
        if self.n_th > THERMAL_OCCUPATION_WARNING {
            out.push(ParamWarning::LargeThermalPhotons(self.n_th));
        }
        if self.n_th_atom > THERMAL_OCCUPATION_WARNING {
            out.push(ParamWarning::LargeThermalAtom(self.n_th_atom));
        }
        out
    }

    /// Largest rate in the model, used to bound the first integration step.
    pub fn max_rate(&self) -> f64 {
        let ladder = (self.n_excitations as f64).sqrt();
        [self.g * ladder, self.kappa, self.kappa1, self.gamma, self.delta.abs()].into_iter().fold(0.0, f64::max)
    }
}
