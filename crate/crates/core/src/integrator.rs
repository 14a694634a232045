//! Adaptive Dormand-Prince 5(4) integration of the master equation over
//! piecewise-constant parameter schedules.
//!
//! The state is the upper triangle of the density matrix packed into
//! `d^2` reals; the lower triangle is never stored. Segment boundaries are
//! hard breakpoints and every requested sample time is hit exactly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::{pack_upper, packed_len, unpack_hermitian, DensityMatrix, Tolerances};
use crate::linalg::CMatrix;
use crate::liouvillian::{Generator, GeneratorKind};
use crate::params::ModelParams;
use crate::protocol::{ProtocolKind, ProtocolSpec};

pub const DEFAULT_REL_TOL: f64 = 1e-8;
pub const DEFAULT_ABS_TOL: f64 = 1e-10;

/// Trace drift below this is left alone in sampled states.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub params: ModelParams,
}

/// Contiguous constant-parameter segments covering `[0, t_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuenchSchedule {
    segments: Vec<Segment>,
    t_max: f64,
}

impl QuenchSchedule {
    pub fn new(segments: Vec<Segment>, t_max: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("no segments".into()));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidSchedule(format!("t_max must be positive, got {t_max}")));
        }
        if segments[0].t_start != 0.0 {
            return Err(Error::InvalidSchedule("first segment must start at t = 0".into()));
        }
        for w in segments.windows(2) {
            if !(w[1].t_start > w[0].t_start) {
                return Err(Error::InvalidSchedule("segment start times must strictly increase".into()));
            }
        }
        if segments.last().map(|s| s.t_start >= t_max).unwrap_or(false) {
            return Err(Error::InvalidSchedule("last segment starts at or after t_max".into()));
        }
        for s in &segments {
            s.params.validate().map_err(|e| Error::InvalidSchedule(format!("{e}")))?;
        }
        Ok(Self { segments, t_max })
    }

    pub fn constant(params: ModelParams, t_max: f64) -> Result<Self> {
        Self::new(vec![Segment { t_start: 0.0, params }], t_max)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn segment_end(&self, i: usize) -> f64 {
        self.segments.get(i + 1).map(|s| s.t_start).unwrap_or(self.t_max)
    }

    /// Index of the segment containing `t`; a boundary belongs to the later segment.
    pub fn segment_at(&self, t: f64) -> usize {
        self.segments.iter().rposition(|s| s.t_start <= t).unwrap_or(0)
    }
}

/// Builds the quench schedule of a protocol.
///
/// Single-step runs use `kappa` throughout. Two-step runs use `kappa1` on
/// `[0, tau)` and `kappa` afterwards; `tau = 0` collapses to single-step.
pub fn make_schedule(protocol: &ProtocolSpec) -> Result<QuenchSchedule> {
    protocol.model.validate().map_err(|e| Error::InvalidSchedule(format!("{e}")))?;
    let t_max = protocol.t_max;
    let tau = protocol.tau;
    match protocol.kind {
        ProtocolKind::TwoStep if tau < 0.0 || !tau.is_finite() => {
            Err(Error::InvalidSchedule(format!("switching time must be non-negative, got {tau}")))
        }
        ProtocolKind::TwoStep if tau >= t_max => {
            Err(Error::InvalidSchedule(format!("switching time {tau} must be below t_max = {t_max}")))
        }
        ProtocolKind::TwoStep if tau > 0.0 => {
            let low = ModelParams { kappa: protocol.model.kappa1, ..protocol.model };
            QuenchSchedule::new(
                vec![Segment { t_start: 0.0, params: low }, Segment { t_start: tau, params: protocol.model }],
                t_max,
            )
        }
        _ => QuenchSchedule::constant(protocol.model, t_max),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: DEFAULT_REL_TOL, abs: DEFAULT_ABS_TOL }
    }
}

impl Tolerance {
    pub fn halved(&self) -> Self {
        Self { rel: 0.5 * self.rel, abs: 0.5 * self.abs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub tol: Tolerance,
    /// Consecutive rejected steps allowed before giving up.
    pub max_halvings: usize,
    pub max_steps: usize,
    pub validity: Tolerances,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { tol: Tolerance::default(), max_halvings: 60, max_steps: 10_000_000, validity: Tolerances::default() }
    }
}

/// Sampled states of one integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Segment index in force at each sample.
    pub params_at: Vec<usize>,
    /// Largest trace correction applied to a sampled state.
    pub max_renormalization: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// B - B_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct PackedRhs {
    gen: Generator,
    rho: CMatrix,
    drho: CMatrix,
}

impl PackedRhs {
    fn new(gen: Generator) -> Self {
        let d = gen.dim();
        Self { gen, rho: CMatrix::zeros(d), drho: CMatrix::zeros(d) }
    }

    fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
        unpack_hermitian(y, &mut self.rho);
        self.gen.apply(&self.rho, &mut self.drho);
        pack_upper(&self.drho, dy);
    }
}

struct Stepper {
    n: usize,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    fsal_valid: bool,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Self { n, k: core::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n], y_new: vec![0.0; n], fsal_valid: false }
    }

    fn stage(&mut self, f: &mut PackedRhs, y: &[f64], h: f64, coeffs: &[(usize, f64)], out: usize) {
        for i in 0..self.n {
            let mut acc = y[i];
            for &(j, a) in coeffs {
                acc += h * a * self.k[j][i];
            }
            self.tmp[i] = acc;
        }
        let (tmp, k) = (&self.tmp, &mut self.k[out]);
        f.eval(tmp, k);
    }

    // Attempts one step; returns the scaled error norm and leaves the
    // candidate in `y_new`.
    fn attempt(&mut self, f: &mut PackedRhs, y: &[f64], h: f64, tol: &Tolerance) -> f64 {
        if !self.fsal_valid {
            f.eval(y, &mut self.k[0]);
            self.fsal_valid = true;
        }
        self.stage(f, y, h, &[(0, A21)], 1);
        self.stage(f, y, h, &[(0, A31), (1, A32)], 2);
        self.stage(f, y, h, &[(0, A41), (1, A42), (2, A43)], 3);
        self.stage(f, y, h, &[(0, A51), (1, A52), (2, A53), (3, A54)], 4);
        self.stage(f, y, h, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], 5);
        for i in 0..self.n {
            self.y_new[i] = y[i]
                + h * (B1 * self.k[0][i]
                    + B3 * self.k[2][i]
                    + B4 * self.k[3][i]
                    + B5 * self.k[4][i]
                    + B6 * self.k[5][i]);
        }
        {
            let (y_new, k6) = (&self.y_new, &mut self.k[6]);
            f.eval(y_new, k6);
        }
        let mut acc = 0.0;
        for i in 0..self.n {
            let err = h
                * (E1 * self.k[0][i]
                    + E3 * self.k[2][i]
                    + E4 * self.k[3][i]
                    + E5 * self.k[4][i]
                    + E6 * self.k[5][i]
                    + E7 * self.k[6][i]);
            let scale = tol.abs + tol.rel * y[i].abs().max(self.y_new[i].abs());
            acc += (err / scale) * (err / scale);
        }
        (acc / self.n as f64).sqrt()
    }

    fn accept(&mut self, y: &mut [f64]) {
        y.copy_from_slice(&self.y_new);
        self.k.swap(0, 6);
    }
}

/// Integrates `rho0` under `schedule` with the generator family `kind`,
/// recording states at `sample_times` (sorted, within `[0, t_max]`).
pub fn integrate(
    kind: GeneratorKind,
    rho0: &DensityMatrix,
    schedule: &QuenchSchedule,
    sample_times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    rho0.check(&opts.validity)?;
    if let Some(w) = sample_times.windows(2).find(|w| w[1] < w[0]) {
        return Err(Error::InvalidSchedule(format!("sample times not sorted ({} after {})", w[1], w[0])));
    }
    if let Some(&t) = sample_times.iter().find(|&&t| !(0.0..=schedule.t_max()).contains(&t)) {
        return Err(Error::InvalidSchedule(format!("sample time {t} outside [0, {}]", schedule.t_max())));
    }
    let generators = schedule
        .segments()
        .iter()
        .map(|s| {
            let gen = Generator::new(kind, s.params)?;
            if gen.n_cap() != rho0.n_cap() {
                return Err(Error::DimensionMismatch { expected: gen.dim(), found: rho0.dim() });
            }
            Ok(gen)
        })
        .collect::<Result<Vec<_>>>()?;

    let n = packed_len(rho0.dim());
    let mut y = rho0.to_packed();
    let mut stepper = Stepper::new(n);
    let mut traj = Trajectory {
        times: Vec::with_capacity(sample_times.len()),
        states: Vec::with_capacity(sample_times.len()),
        params_at: Vec::with_capacity(sample_times.len()),
        max_renormalization: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut upper = CMatrix::zeros(rho0.dim());

    let mut t = 0.0;
    let mut seg = 0usize;
    let mut rhs = PackedRhs::new(generators[0]);
    let step_cap = |p: &ModelParams, span: f64| {
        let rate = p.max_rate();
        if rate > 0.0 {
            (0.1 / rate).min(span)
        } else {
            span
        }
    };
    let mut h = step_cap(&schedule.segments()[0].params, schedule.t_max());

    for &target in sample_times {
        loop {
            // Switch segment once the boundary has been reached.
            while seg + 1 < generators.len() && t >= schedule.segment_end(seg) {
                seg += 1;
                rhs = PackedRhs::new(generators[seg]);
                stepper.fsal_valid = false;
                h = h.min(step_cap(&schedule.segments()[seg].params, schedule.t_max()));
            }
            let stop = target.min(schedule.segment_end(seg));
            if t >= stop {
                break;
            }
            let remaining = stop - t;
            let mut rejections = 0usize;
            loop {
                let clipped = remaining <= h * (1.0 + 1e-12);
                let step = if clipped { remaining } else { h };
                let err = stepper.attempt(&mut rhs, &y, step, &opts.tol);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if err <= 1.0 && err.is_finite() {
                    stepper.accept(&mut y);
                    traj.accepted_steps += 1;
                    if traj.accepted_steps > opts.max_steps {
                        return Err(Error::TooManySteps(opts.max_steps));
                    }
                    t = if clipped { stop } else { t + step };
                    // Keep the natural step size when a sample time clipped it.
                    if !clipped || step >= h {
                        h = step * factor;
                    }
                    break;
                }
                traj.rejected_steps += 1;
                rejections += 1;
                // A rejected step leaves k[0] = f(t, y) intact.
                h = step * if err.is_finite() { factor.min(0.5) } else { 0.25 };
                if rejections > opts.max_halvings || h <= 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepSizeUnderflow { t, h });
                }
            }
        }

        unpack_hermitian(&y, &mut upper);
        let mut state = DensityMatrix::from_upper_unchecked(rho0.n_cap(), &upper);
        let drift = state.trace() - 1.0;
        if drift.abs() > opts.validity.trace {
            return Err(Error::InvalidState { t, reason: format!("trace drift {drift:e}") });
        }
        if drift.abs() > RENORMALIZE_THRESHOLD {
            let removed = state.renormalize();
            traj.max_renormalization = traj.max_renormalization.max(removed.abs());
        }
        let min = state.min_eigenvalue();
        if min < -opts.validity.positivity {
            return Err(Error::InvalidState { t, reason: format!("smallest eigenvalue {min:e}") });
        }
        traj.times.push(target);
        traj.states.push(state);
        traj.params_at.push(schedule.segment_at(target));
    }
    Ok(traj)
}

/// `count` uniformly spaced times on `[0, t_max]`, endpoints included.
pub fn uniform_times(t_max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![t_max],
        _ => (0..count).map(|i| t_max * i as f64 / (count - 1) as f64).collect(),
    }
}
