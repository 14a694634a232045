//! Run configuration: a TOML file, overridden field by field by flags.
//!
//! Every rate is given in units of `g` and every time in units of `1/g`.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use pontus_core::integrator::{IntegratorOptions, Tolerance};
use pontus_core::liouvillian::GeneratorKind;
use pontus_core::protocol::{AxisParam, EquilibriumReference, ProtocolKind, ProtocolSpec};
use pontus_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

macro_rules! section {
    ($(#[$meta:meta])* $name:ident { $($field:ident: $ty:ty),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(
                #[serde(default, skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl $name {
            /// Field-wise override; values set in `over` win.
            pub fn merge(self, over: Self) -> Self {
                Self { $($field: over.$field.or(self.$field),)* }
            }

            pub fn is_empty(&self) -> bool {
                *self == Self::default()
            }
        }
    };
}

section!(
    /// Physical parameters. `n` is the excitation cap.
    ModelSection {
        g: f64,
        kappa: f64,
        kappa1: f64,
        gamma: f64,
        delta: f64,
        n_th: f64,
        n_th_atom: f64,
        n: usize,
        generator: String,
    }
);

section!(ProtocolSection { kind: String, tau: f64, t_max: f64, samples: usize, reference: String, t_star: f64 });

section!(SpectrumSection { kappa_min: f64, kappa_max: f64, steps: usize });

section!(SweepSection {
    x_axis: String,
    x_min: f64,
    x_max: f64,
    x_steps: usize,
    y_axis: String,
    y_min: f64,
    y_max: f64,
    y_steps: usize,
    workers: usize,
});

section!(IntegratorSection { rel_tol: f64, abs_tol: f64, max_steps: usize });

section!(OutputSection { path: PathBuf, single_csv: PathBuf, two_csv: PathBuf });

/// Whole configuration; also the shape of the resolved config written into
/// output headers, so a header can be fed back as a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "ModelSection::is_empty")]
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "ProtocolSection::is_empty")]
    pub protocol: ProtocolSection,
    #[serde(default, skip_serializing_if = "SpectrumSection::is_empty")]
    pub spectrum: SpectrumSection,
    #[serde(default, skip_serializing_if = "SweepSection::is_empty")]
    pub sweep: SweepSection,
    #[serde(default, skip_serializing_if = "IntegratorSection::is_empty")]
    pub integrator: IntegratorSection,
    #[serde(default, skip_serializing_if = "OutputSection::is_empty")]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn merge(self, over: Self) -> Self {
        Self {
            model: self.model.merge(over.model),
            protocol: self.protocol.merge(over.protocol),
            spectrum: self.spectrum.merge(over.spectrum),
            sweep: self.sweep.merge(over.sweep),
            integrator: self.integrator.merge(over.integrator),
            output: self.output.merge(over.output),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_generator(name: &str) -> Result<Option<GeneratorKind>, CliError> {
    match name {
        "auto" => Ok(None),
        "single-excitation" => Ok(Some(GeneratorKind::SingleExcitation)),
        "n-manifold" => Ok(Some(GeneratorKind::NManifold)),
        "thermal-restricted" => Ok(Some(GeneratorKind::ThermalRestricted)),
        other => Err(config_err(format!(
            "unknown generator '{other}' (expected auto, single-excitation, n-manifold or thermal-restricted)"
        ))),
    }
}

pub fn parse_kind(name: &str) -> Result<ProtocolKind, CliError> {
    match name {
        "single-step" | "single" => Ok(ProtocolKind::SingleStep),
        "two-step" | "two" => Ok(ProtocolKind::TwoStep),
        other => Err(config_err(format!("unknown protocol kind '{other}' (expected single-step or two-step)"))),
    }
}

pub fn parse_reference(name: &str) -> Result<EquilibriumReference, CliError> {
    match name {
        "stationary" => Ok(EquilibriumReference::Stationary),
        "ground" => Ok(EquilibriumReference::GroundState),
        other => Err(config_err(format!("unknown reference '{other}' (expected stationary or ground)"))),
    }
}

/// Fills defaults and converts to physical parameters.
pub fn resolve_model(s: &ModelSection) -> Result<(ModelSection, ModelParams, Option<GeneratorKind>), CliError> {
    let filled = ModelSection {
        g: Some(s.g.unwrap_or(1.0)),
        kappa: Some(s.kappa.unwrap_or(8.0)),
        kappa1: Some(s.kappa1.unwrap_or(0.0)),
        gamma: Some(s.gamma.unwrap_or(0.0)),
        delta: Some(s.delta.unwrap_or(0.0)),
        n_th: Some(s.n_th.unwrap_or(0.0)),
        n_th_atom: Some(s.n_th_atom.unwrap_or(0.0)),
        n: Some(s.n.unwrap_or(1)),
        generator: Some(s.generator.clone().unwrap_or_else(|| "auto".into())),
    };
    let g = filled.g.unwrap();
    if !(g.is_finite() && g > 0.0) {
        return Err(config_err(format!("g must be positive, got {g}")));
    }
    let params = ModelParams {
        g,
        kappa: filled.kappa.unwrap() * g,
        kappa1: filled.kappa1.unwrap() * g,
        gamma: filled.gamma.unwrap() * g,
        delta: filled.delta.unwrap() * g,
        n_th: filled.n_th.unwrap(),
        n_th_atom: filled.n_th_atom.unwrap(),
        n_excitations: filled.n.unwrap(),
    };
    params.validate()?;
    for w in params.warnings() {
        log::warn!("{w}");
    }
    let generator = parse_generator(filled.generator.as_deref().unwrap())?;
    Ok((filled, params, generator))
}

/// A protocol run with its resolved settings.
#[derive(Debug, Clone)]
pub struct ResolvedProtocol {
    pub section: ProtocolSection,
    pub spec: ProtocolSpec,
    pub samples: usize,
    /// Physical observation time.
    pub t_star: f64,
}

pub fn resolve_protocol(
    s: &ProtocolSection,
    model: ModelParams,
    generator: Option<GeneratorKind>,
) -> Result<ResolvedProtocol, CliError> {
    let g = model.g;
    let default_tau = FRAC_PI_2 / (model.n_excitations as f64).sqrt();
    let section = ProtocolSection {
        kind: Some(s.kind.clone().unwrap_or_else(|| "two-step".into())),
        tau: Some(s.tau.unwrap_or(default_tau)),
        t_max: Some(s.t_max.unwrap_or(8.0)),
        samples: Some(s.samples.unwrap_or(pontus_core::protocol::DEFAULT_SAMPLE_COUNT)),
        reference: Some(s.reference.clone().unwrap_or_else(|| "stationary".into())),
        t_star: Some(s.t_star.unwrap_or(pontus_core::protocol::DEFAULT_T_STAR_G)),
    };
    let samples = section.samples.unwrap();
    if samples < 2 {
        return Err(config_err(format!("samples must be at least 2, got {samples}")));
    }
    let mut spec = ProtocolSpec::two_step(model);
    spec.kind = parse_kind(section.kind.as_deref().unwrap())?;
    spec.tau = section.tau.unwrap() / g;
    spec.t_max = section.t_max.unwrap() / g;
    spec.reference = parse_reference(section.reference.as_deref().unwrap())?;
    spec.generator = generator;
    spec.validate()?;
    Ok(ResolvedProtocol { spec, samples, t_star: section.t_star.unwrap() / g, section })
}

pub fn resolve_integrator(s: &IntegratorSection) -> Result<(IntegratorSection, IntegratorOptions), CliError> {
    let defaults = IntegratorOptions::default();
    let filled = IntegratorSection {
        rel_tol: Some(s.rel_tol.unwrap_or(defaults.tol.rel)),
        abs_tol: Some(s.abs_tol.unwrap_or(defaults.tol.abs)),
        max_steps: Some(s.max_steps.unwrap_or(defaults.max_steps)),
    };
    let (rel, abs) = (filled.rel_tol.unwrap(), filled.abs_tol.unwrap());
    if !(rel > 0.0 && rel.is_finite() && abs > 0.0 && abs.is_finite()) {
        return Err(config_err(format!("tolerances must be positive, got rel = {rel}, abs = {abs}")));
    }
    let opts = IntegratorOptions { tol: Tolerance { rel, abs }, max_steps: filled.max_steps.unwrap(), ..defaults };
    Ok((filled, opts))
}

pub fn resolve_spectrum(s: &SpectrumSection) -> Result<SpectrumSection, CliError> {
    let filled = SpectrumSection {
        kappa_min: Some(s.kappa_min.unwrap_or(0.0)),
        kappa_max: Some(s.kappa_max.unwrap_or(12.0)),
        steps: Some(s.steps.unwrap_or(241)),
    };
    let (lo, hi, steps) = (filled.kappa_min.unwrap(), filled.kappa_max.unwrap(), filled.steps.unwrap());
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi >= lo) {
        return Err(config_err(format!("kappa range must satisfy 0 <= kappa_min <= kappa_max, got [{lo}, {hi}]")));
    }
    if steps < 1 || (steps < 2 && hi > lo) {
        return Err(config_err(format!("steps must be at least 2 for a non-empty range, got {steps}")));
    }
    Ok(filled)
}

pub fn resolve_sweep(s: &SweepSection) -> Result<SweepSection, CliError> {
    let filled = SweepSection {
        x_axis: Some(s.x_axis.clone().unwrap_or_else(|| AxisParam::TauOverTau0.name().into())),
        x_min: Some(s.x_min.unwrap_or(0.0)),
        x_max: Some(s.x_max.unwrap_or(2.0)),
        x_steps: Some(s.x_steps.unwrap_or(21)),
        y_axis: Some(s.y_axis.clone().unwrap_or_else(|| AxisParam::DeltaOverG.name().into())),
        y_min: Some(s.y_min.unwrap_or(-1.0)),
        y_max: Some(s.y_max.unwrap_or(1.0)),
        y_steps: Some(s.y_steps.unwrap_or(21)),
        workers: s.workers,
    };
    Ok(filled)
}
