//! Single-step and two-step relaxation runs, the speed-up predicate and
//! two-parameter sweeps.
//!
//! A two-step run holds the cavity at the low loss `kappa1` for `t < tau`
//! and switches to `kappa` at `tau`; the single-step run uses `kappa` from
//! the start. Both are measured against the stationary state of the final
//! generator.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // unused when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::{atomic_excitation, distances, photon_number, BasisLabel, DensityMatrix};
use crate::integrator::{integrate, make_schedule, uniform_times, IntegratorOptions};
use crate::liouvillian::{stationary_state, GeneratorKind};
use crate::params::ModelParams;

/// Strict margin for the speed-up predicate; ties count as no effect.
pub const TIE_EPSILON: f64 = 1e-9;
/// Default observation time in units of `1/g`.
pub const DEFAULT_T_STAR_G: f64 = 8.0;
pub const DEFAULT_SAMPLE_COUNT: usize = 2001;

/// Half a vacuum Rabi period, `pi / (2 g)`.
pub fn tau0(g: f64) -> f64 {
    FRAC_PI_2 / g
}

/// Half a Rabi period in the `N`-excitation manifold, `pi / (2 g sqrt(N))`.
pub fn default_tau(model: &ModelParams) -> f64 {
    tau0(model.g) / (model.n_excitations as f64).sqrt()
}

pub fn default_t_star(g: f64) -> f64 {
    DEFAULT_T_STAR_G / g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    SingleStep,
    TwoStep,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub enum InitialState {
    /// `|e, N-1><e, N-1|`.
    #[default]
    ExcitedAtomVacuum,
    Custom(DensityMatrix),
}

/// State the distances are measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EquilibriumReference {
    /// Stationary state of the final generator.
    #[default]
    Stationary,
    /// `|g,0><g,0|`, the zero-temperature target.
    GroundState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    pub model: ModelParams,
    /// Switching time; ignored for single-step runs.
    pub tau: f64,
    pub t_max: f64,
    pub initial: InitialState,
    pub reference: EquilibriumReference,
    /// Generator family; chosen from the parameters when `None`.
    pub generator: Option<GeneratorKind>,
}

impl ProtocolSpec {
    /// Two-step run with the default switching time and `t_max = 8/g`.
    pub fn two_step(model: ModelParams) -> Self {
        Self {
            kind: ProtocolKind::TwoStep,
            model,
            tau: default_tau(&model),
            t_max: default_t_star(model.g),
            initial: InitialState::default(),
            reference: EquilibriumReference::default(),
            generator: None,
        }
    }

    pub fn single_step(model: ModelParams) -> Self {
        Self { kind: ProtocolKind::SingleStep, ..Self::two_step(model) }
    }

    pub fn with_kind(&self, kind: ProtocolKind) -> Self {
        Self { kind, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.model.g > 0.0) {
            return Err(Error::InvalidProtocol(format!("coupling g must be positive, got {}", self.model.g)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidProtocol(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.kind == ProtocolKind::TwoStep && !(self.tau >= 0.0 && self.tau < self.t_max) {
            return Err(Error::InvalidProtocol(format!(
                "switching time must lie in [0, t_max = {}), got {}",
                self.t_max, self.tau
            )));
        }
        if let InitialState::Custom(rho) = &self.initial {
            if rho.n_cap() != self.model.n_excitations {
                return Err(Error::DimensionMismatch {
                    expected: crate::hilbert::dimension(self.model.n_excitations),
                    found: rho.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn generator_kind(&self) -> GeneratorKind {
        self.generator.unwrap_or_else(|| GeneratorKind::for_params(&self.model))
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        match &self.initial {
            InitialState::ExcitedAtomVacuum => {
                let n = self.model.n_excitations;
                DensityMatrix::pure(BasisLabel::excited(n - 1), n)
            }
            InitialState::Custom(rho) => Ok(rho.clone()),
        }
    }

    /// Reference state of the final segment.
    pub fn equilibrium(&self) -> Result<DensityMatrix> {
        match self.reference {
            EquilibriumReference::Stationary => stationary_state(self.generator_kind(), &self.model),
            EquilibriumReference::GroundState => DensityMatrix::pure(BasisLabel::ground(0), self.model.n_excitations),
        }
    }
}

/// Sampled observables of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxationRecord {
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    pub n_ph: Vec<f64>,
    pub d_tr: Vec<f64>,
    pub d_hs: Vec<f64>,
    pub segment: Vec<usize>,
    pub spec: ProtocolSpec,
    pub initial: DensityMatrix,
    pub equilibrium: DensityMatrix,
    pub max_renormalization: f64,
}

impl RelaxationRecord {
    /// Trace distance at `t`, linearly interpolated.
    pub fn d_tr_at(&self, t: f64) -> Result<f64> {
        interpolate(&self.times, &self.d_tr, t)
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> Result<f64> {
    let (first, last) = match (times.first(), times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::MismatchedRecords("record has no samples".into())),
    };
    if !(t >= first && t <= last) {
        return Err(Error::MismatchedRecords(format!("t = {t} outside sampled range [{first}, {last}]")));
    }
    let i = times.partition_point(|&s| s <= t);
    if i == 0 {
        return Ok(values[0]);
    }
    let i = i - 1;
    if times[i] == t || i + 1 == times.len() {
        return Ok(values[i]);
    }
    let w = (t - times[i]) / (times[i + 1] - times[i]);
    Ok(values[i] + w * (values[i + 1] - values[i]))
}

/// Runs `spec` with `sample_count` uniform samples on `[0, t_max]`.
pub fn run_protocol(spec: &ProtocolSpec, sample_count: usize) -> Result<RelaxationRecord> {
    if sample_count < 2 {
        return Err(Error::InvalidProtocol(format!("need at least 2 samples, got {sample_count}")));
    }
    spec.validate()?;
    let rho0 = spec.initial_state()?;
    let eq = spec.equilibrium()?;
    run_from(spec, rho0, eq, &uniform_times(spec.t_max, sample_count), &IntegratorOptions::default())
}

/// Runs `spec` from a given initial state against a given reference.
pub fn run_from(
    spec: &ProtocolSpec,
    rho0: DensityMatrix,
    equilibrium: DensityMatrix,
    sample_times: &[f64],
    opts: &IntegratorOptions,
) -> Result<RelaxationRecord> {
    spec.validate()?;
    let schedule = make_schedule(spec)?;
    let traj = integrate(spec.generator_kind(), &rho0, &schedule, sample_times, opts)?;
    let n = traj.times.len();
    let mut rec = RelaxationRecord {
        times: traj.times,
        p_e: Vec::with_capacity(n),
        n_ph: Vec::with_capacity(n),
        d_tr: Vec::with_capacity(n),
        d_hs: Vec::with_capacity(n),
        segment: traj.params_at,
        spec: spec.clone(),
        initial: rho0,
        equilibrium,
        max_renormalization: traj.max_renormalization,
    };
    for rho in &traj.states {
        let d = distances(rho, &rec.equilibrium)?;
        rec.p_e.push(atomic_excitation(rho));
        rec.n_ph.push(photon_number(rho));
        rec.d_tr.push(d.d_tr);
        rec.d_hs.push(d.d_hs);
    }
    Ok(rec)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpembaVerdict {
    pub effect: bool,
    pub t_star: f64,
    pub d_tr_single: f64,
    pub d_tr_two: f64,
    /// `d_tr_single - d_tr_two`; positive when the two-step run is closer.
    pub margin: f64,
}

/// Compares the trace distances of both runs at `t_star`.
pub fn detect_pontus_mpemba(single: &RelaxationRecord, two: &RelaxationRecord, t_star: f64) -> Result<MpembaVerdict> {
    if single.spec.kind != ProtocolKind::SingleStep || two.spec.kind != ProtocolKind::TwoStep {
        return Err(Error::MismatchedRecords("expected a single-step and a two-step record".into()));
    }
    let strip = |m: &ModelParams| ModelParams { kappa1: 0.0, ..*m };
    if strip(&single.spec.model) != strip(&two.spec.model) {
        return Err(Error::MismatchedRecords("model parameters differ".into()));
    }
    if single.initial != two.initial {
        return Err(Error::MismatchedRecords("initial states differ".into()));
    }
    if single.equilibrium != two.equilibrium {
        return Err(Error::MismatchedRecords("reference states differ".into()));
    }
    if !(t_star > two.spec.tau) {
        return Err(Error::InvalidProtocol(format!(
            "observation time {t_star} must exceed the switching time {}",
            two.spec.tau
        )));
    }
    let d_tr_single = single.d_tr_at(t_star)?;
    let d_tr_two = two.d_tr_at(t_star)?;
    Ok(MpembaVerdict {
        effect: d_tr_two < d_tr_single - TIE_EPSILON,
        t_star,
        d_tr_single,
        d_tr_two,
        margin: d_tr_single - d_tr_two,
    })
}

/// Both runs of one comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub single: RelaxationRecord,
    pub two: RelaxationRecord,
    pub verdict: MpembaVerdict,
}

/// Runs `base` as both protocols from one initial state and one reference.
///
/// `base.kind` is ignored. `t_star` must lie in `(tau, t_max]`.
pub fn compare_protocols(
    base: &ProtocolSpec,
    t_star: f64,
    sample_times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Comparison> {
    let two_spec = base.with_kind(ProtocolKind::TwoStep);
    two_spec.validate()?;
    if !(t_star > two_spec.tau && t_star <= two_spec.t_max) {
        return Err(Error::InvalidProtocol(format!(
            "observation time {t_star} must lie in (tau = {}, t_max = {}]",
            two_spec.tau, two_spec.t_max
        )));
    }
    let rho0 = two_spec.initial_state()?;
    let eq = two_spec.equilibrium()?;
    let mut times: Vec<f64> = sample_times.to_vec();
    if !times.contains(&t_star) {
        let at = times.partition_point(|&s| s < t_star);
        times.insert(at, t_star);
    }
    let two = run_from(&two_spec, rho0.clone(), eq.clone(), &times, opts)?;
    let single = run_from(&base.with_kind(ProtocolKind::SingleStep), rho0, eq, &times, opts)?;
    let verdict = detect_pontus_mpemba(&single, &two, t_star)?;
    Ok(Comparison { single, two, verdict })
}

/// Parameter that a sweep axis varies, in units of `g` or `tau0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisParam {
    TauOverTau0,
    DeltaOverG,
    GammaOverG,
    Kappa1OverG,
}

impl AxisParam {
    pub const ALL: [AxisParam; 4] =
        [AxisParam::TauOverTau0, AxisParam::DeltaOverG, AxisParam::GammaOverG, AxisParam::Kappa1OverG];

    pub fn name(&self) -> &'static str {
        match self {
            AxisParam::TauOverTau0 => "tau_over_tau0",
            AxisParam::DeltaOverG => "delta_over_g",
            AxisParam::GammaOverG => "gamma_over_g",
            AxisParam::Kappa1OverG => "kappa1_over_g",
        }
    }

    /// Writes the axis value into `spec`.
    pub fn apply(&self, spec: &mut ProtocolSpec, value: f64) {
        let g = spec.model.g;
        match self {
            AxisParam::TauOverTau0 => spec.tau = value * tau0(g),
            AxisParam::DeltaOverG => spec.model.delta = value * g,
            AxisParam::GammaOverG => spec.model.gamma = value * g,
            AxisParam::Kappa1OverG => spec.model.kappa1 = value * g,
        }
    }
}

impl fmt::Display for AxisParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxisParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau_over_tau0" | "tau/tau0" | "tau" => Ok(AxisParam::TauOverTau0),
            "delta_over_g" | "delta/g" | "delta" => Ok(AxisParam::DeltaOverG),
            "gamma_over_g" | "gamma/g" | "gamma" => Ok(AxisParam::GammaOverG),
            "kappa1_over_g" | "kappa1/g" | "kappa1" => Ok(AxisParam::Kappa1OverG),
            other => Err(Error::InvalidAxis(format!(
                "unknown axis '{other}' (expected tau_over_tau0, delta_over_g, gamma_over_g or kappa1_over_g)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(param: AxisParam, min: f64, max: f64, steps: usize) -> Result<Self> {
        let axis = Self { param, min, max, steps };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidAxis(format!("{} range must be finite", self.param)));
        }
        if self.steps < 2 {
            return Err(Error::InvalidAxis(format!("{} needs at least 2 steps, got {}", self.param, self.steps)));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseCell {
    pub x: f64,
    pub y: f64,
    pub effect: bool,
    pub margin: f64,
}

/// Grid of verdicts, row-major with `y` in the outer loop and `x` inner:
/// cell `(ix, iy)` sits at `iy * x.steps + ix`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseDiagram {
    pub x: Axis,
    pub y: Axis,
    pub t_star: f64,
    pub cells: Vec<PhaseCell>,
}

impl PhaseDiagram {
    pub fn cell(&self, ix: usize, iy: usize) -> &PhaseCell {
        &self.cells[iy * self.x.steps + ix]
    }
}

/// Everything a sweep cell needs; cheap to share between threads.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    pub base: ProtocolSpec,
    pub x: Axis,
    pub y: Axis,
    pub t_star: f64,
    pub opts: IntegratorOptions,
}

impl SweepPlan {
    pub fn new(base: ProtocolSpec, x: Axis, y: Axis, t_star: f64) -> Result<Self> {
        x.validate()?;
        y.validate()?;
        if x.param == y.param {
            return Err(Error::InvalidAxis(format!("both axes vary {}", x.param)));
        }
        if !(t_star.is_finite() && t_star > 0.0) {
            return Err(Error::InvalidProtocol(format!("observation time must be positive, got {t_star}")));
        }
        let plan = Self { base, x, y, t_star, opts: IntegratorOptions::default() };
        // Surface bad base parameters before any cell runs.
        plan.spec_at(0).validate()?;
        Ok(plan)
    }

    pub fn len(&self) -> usize {
        self.x.steps * self.y.steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Two-step spec of the cell at row-major `index`.
    pub fn spec_at(&self, index: usize) -> ProtocolSpec {
        let (ix, iy) = (index % self.x.steps, index / self.x.steps);
        let mut spec = self.base.with_kind(ProtocolKind::TwoStep);
        spec.t_max = self.t_star;
        self.x.param.apply(&mut spec, self.x.value(ix));
        self.y.param.apply(&mut spec, self.y.value(iy));
        spec
    }

    /// Evaluates one cell; depends on nothing but `self` and `index`.
    pub fn cell(&self, index: usize) -> Result<PhaseCell> {
        let (ix, iy) = (index % self.x.steps, index / self.x.steps);
        let spec = self.spec_at(index);
        let cmp = compare_protocols(&spec, self.t_star, &[self.t_star], &self.opts)?;
        Ok(PhaseCell {
            x: self.x.value(ix),
            y: self.y.value(iy),
            effect: cmp.verdict.effect,
            margin: cmp.verdict.margin,
        })
    }

    pub fn assemble(&self, cells: Vec<PhaseCell>) -> Result<PhaseDiagram> {
        if cells.len() != self.len() {
            return Err(Error::InvalidAxis(format!("expected {} cells, got {}", self.len(), cells.len())));
        }
        Ok(PhaseDiagram { x: self.x, y: self.y, t_star: self.t_star, cells })
    }
}

/// Sequential sweep over a 2-D grid of two-step protocols derived from `base`.
pub fn sweep_phase_diagram(base: &ProtocolSpec, x: Axis, y: Axis, t_star: f64) -> Result<PhaseDiagram> {
    let plan = SweepPlan::new(base.clone(), x, y, t_star)?;
    let cells = (0..plan.len()).map(|i| plan.cell(i)).collect::<Result<Vec<_>>>()?;
    plan.assemble(cells)
}

/// Samples for a comparison: `count` uniform times on `[0, t_max]`.
pub fn default_sample_times(t_max: f64) -> Vec<f64> {
    uniform_times(t_max, DEFAULT_SAMPLE_COUNT)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resonant() -> ProtocolSpec {
        ProtocolSpec::two_step(ModelParams::resonant(1.0, 8.0))
    }

    #[test]
    fn defaults_follow_the_manifold() {
        let p = ModelParams { n_excitations: 2, ..ModelParams::resonant(1.0, 8.0) };
        let spec = ProtocolSpec::two_step(p);
        assert!((spec.tau - FRAC_PI_2 / 2f64.sqrt()).abs() < 1e-15);
        let rho = spec.initial_state().unwrap();
        assert_eq!(rho.element(BasisLabel::excited(1), BasisLabel::excited(1)).unwrap().re, 1.0);
    }

    #[test]
    fn initial_distances() {
        let rec = run_protocol(&resonant(), 11).unwrap();
        assert!((rec.d_tr[0] - 1.0).abs() < 1e-12);
        assert!((rec.d_hs[0] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn two_step_parks_the_excitation_in_the_cavity() {
        let spec = resonant();
        let times = [spec.tau, spec.tau + 0.76, 6.0];
        let rec = run_from(
            &spec,
            spec.initial_state().unwrap(),
            spec.equilibrium().unwrap(),
            &times,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!(rec.p_e[0] < 1e-6);
        // Re-absorption bump after the switch peaks near 0.0478.
        assert!((rec.p_e[1] - 0.0478).abs() < 2e-4, "{}", rec.p_e[1]);
        assert!(rec.p_e[2] < 0.01);
    }

    #[test]
    fn resonant_quench_shows_the_effect() {
        let cmp =
            compare_protocols(&resonant(), 8.0, &default_sample_times(8.0), &IntegratorOptions::default()).unwrap();
        assert!(cmp.verdict.effect);
        assert!(cmp.verdict.margin > 0.0);
    }

    #[test]
    fn zero_switching_time_is_a_tie() {
        let mut spec = resonant();
        spec.tau = 0.0;
        let cmp = compare_protocols(&spec, 8.0, &[8.0], &IntegratorOptions::default()).unwrap();
        assert!(!cmp.verdict.effect);
        assert_eq!(cmp.verdict.margin, 0.0);
    }

    #[test]
    fn detection_preconditions() {
        let spec = resonant();
        let times = [0.0, 1.0, 2.0];
        let opts = IntegratorOptions::default();
        let rho0 = spec.initial_state().unwrap();
        let eq = spec.equilibrium().unwrap();
        let two = run_from(&spec, rho0.clone(), eq.clone(), &times, &opts).unwrap();
        let single = run_from(&spec.with_kind(ProtocolKind::SingleStep), rho0, eq, &times, &opts).unwrap();
        assert!(matches!(detect_pontus_mpemba(&single, &two, 1.0), Err(Error::InvalidProtocol(_))));
        assert!(matches!(detect_pontus_mpemba(&single, &two, 3.0), Err(Error::MismatchedRecords(_))));
        assert!(matches!(detect_pontus_mpemba(&two, &single, 2.0), Err(Error::MismatchedRecords(_))));
        assert!(detect_pontus_mpemba(&single, &two, 1.7).is_ok());
    }

    #[test]
    fn interpolation_is_linear() {
        let t = [0.0, 1.0, 2.0];
        let v = [0.0, 10.0, 30.0];
        assert_eq!(interpolate(&t, &v, 0.5).unwrap(), 5.0);
        assert_eq!(interpolate(&t, &v, 1.5).unwrap(), 20.0);
        assert_eq!(interpolate(&t, &v, 2.0).unwrap(), 30.0);
        assert!(interpolate(&t, &v, 2.5).is_err());
    }

    #[test]
    fn axis_parsing_and_overlap() {
        assert_eq!("delta/g".parse::<AxisParam>().unwrap(), AxisParam::DeltaOverG);
        assert!("kappa".parse::<AxisParam>().is_err());
        let a = Axis::new(AxisParam::GammaOverG, 0.0, 1.0, 3).unwrap();
        assert!(SweepPlan::new(resonant(), a, a, 8.0).is_err());
        assert!(Axis::new(AxisParam::GammaOverG, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn small_sweep_layout() {
        let x = Axis::new(AxisParam::TauOverTau0, 0.0, 1.0, 3).unwrap();
        let y = Axis::new(AxisParam::DeltaOverG, -0.5, 0.5, 2).unwrap();
        let pd = sweep_phase_diagram(&resonant(), x, y, 8.0).unwrap();
        assert_eq!(pd.cells.len(), 6);
        assert_eq!(pd.cell(2, 1).x, 1.0);
        assert_eq!(pd.cell(2, 1).y, 0.5);
        for iy in 0..2 {
            assert!(!pd.cell(0, iy).effect);
        }
    }
}
