//! The four subcommands. Each resolves its config, computes, and returns the
//! file contents; writing happens in one place afterwards.

use std::path::PathBuf;

use pontus_core::integrator::uniform_times;
use pontus_core::protocol::{compare_protocols, run_from, Axis, AxisParam, PhaseCell, RelaxationRecord, SweepPlan};
use pontus_core::spectral::{build_dynamical_matrix, numerical_eigenvalues};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{resolve_integrator, resolve_model, resolve_protocol, resolve_spectrum, resolve_sweep, RunConfig};
use crate::output::{num, Csv};
use crate::CliError;

/// One file to write; `None` means stdout.
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: String,
}

/// Sorts `(re, im)` pairs by real part descending, ties (within a relative
/// 1e-9) by imaginary part descending.
pub fn sort_spectrum(values: &mut [(f64, f64)]) {
    let scale = values.iter().map(|v| v.0.abs().max(v.1.abs())).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    values.sort_by(|a, b| if (a.0 - b.0).abs() <= tol { b.1.total_cmp(&a.1) } else { b.0.total_cmp(&a.0) });
}

pub fn spectrum(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let s = resolve_spectrum(&cfg.spectrum)?;
    let g = cfg.model.g.unwrap_or(1.0);
    if !(g.is_finite() && g > 0.0) {
        return Err(CliError::Config(format!("g must be positive, got {g}")));
    }
    let (lo, hi, steps) = (s.kappa_min.unwrap(), s.kappa_max.unwrap(), s.steps.unwrap());
    let resolved = RunConfig {
        model: crate::config::ModelSection { g: Some(g), ..Default::default() },
        spectrum: s,
        ..Default::default()
    };
    let mut csv = Csv::new(
        "spectrum",
        &resolved,
        &["eigenvalues in units of g, sorted by real part then imaginary part, both descending".into()],
        &["kappa_over_g", "re_l1", "re_l2", "re_l3", "re_l4", "im_l1", "im_l2", "im_l3", "im_l4"],
    );
    for i in 0..steps {
        let ratio = match steps {
            1 => lo,
            _ if i + 1 == steps => hi,
            _ => lo + (hi - lo) * i as f64 / (steps - 1) as f64,
        };
        let eig = numerical_eigenvalues(&build_dynamical_matrix(g, ratio * g))?;
        let mut vals: Vec<(f64, f64)> = eig.iter().map(|l| (l.re / g, l.im / g)).collect();
        sort_spectrum(&mut vals);
        let mut row = vec![num(ratio)];
        row.extend(vals.iter().map(|v| num(v.0)));
        row.extend(vals.iter().map(|v| num(v.1)));
        csv.row(&row);
    }
    Ok(vec![Artifact { path: cfg.output.path.clone(), contents: csv.finish() }])
}

fn record_csv(command: &str, resolved: &RunConfig, rec: &RelaxationRecord) -> String {
    let g = rec.spec.model.g;
    let mut csv = Csv::new(
        command,
        resolved,
        &[format!("protocol = {:?}; times in units of 1/g", rec.spec.kind)],
        &["t", "p_e", "n_ph", "d_tr", "d_hs", "segment"],
    );
    for i in 0..rec.times.len() {
        csv.row(&[
            num(rec.times[i] * g),
            num(rec.p_e[i]),
            num(rec.n_ph[i]),
            num(rec.d_tr[i]),
            num(rec.d_hs[i]),
            rec.segment[i].to_string(),
        ]);
    }
    csv.finish()
}

struct Resolved {
    config: RunConfig,
    run: crate::config::ResolvedProtocol,
    opts: pontus_core::integrator::IntegratorOptions,
}

fn resolve_run(cfg: &RunConfig) -> Result<Resolved, CliError> {
    let (model_s, params, generator) = resolve_model(&cfg.model)?;
    let run = resolve_protocol(&cfg.protocol, params, generator)?;
    let (int_s, opts) = resolve_integrator(&cfg.integrator)?;
    let config = RunConfig { model: model_s, protocol: run.section.clone(), integrator: int_s, ..Default::default() };
    Ok(Resolved { config, run, opts })
}

pub fn simulate(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let r = resolve_run(cfg)?;
    let spec = &r.run.spec;
    let rec =
        run_from(spec, spec.initial_state()?, spec.equilibrium()?, &uniform_times(spec.t_max, r.run.samples), &r.opts)?;
    if rec.max_renormalization > 0.0 {
        log::info!("largest trace renormalization {:e}", rec.max_renormalization);
    }
    Ok(vec![Artifact { path: cfg.output.path.clone(), contents: record_csv("simulate", &r.config, &rec) }])
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct CompareSummary {
    pub schema_version: u32,
    pub effect: bool,
    /// Units of 1/g.
    pub t_star: f64,
    pub d_tr_single: f64,
    pub d_tr_two: f64,
    pub margin: f64,
    pub params: RunConfig,
}

pub fn compare(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let r = resolve_run(cfg)?;
    let spec = &r.run.spec;
    let cmp = compare_protocols(spec, r.run.t_star, &uniform_times(spec.t_max, r.run.samples), &r.opts)?;
    let v = cmp.verdict;
    log::info!("d_tr(t*) single-step {:.6e}, two-step {:.6e}", v.d_tr_single, v.d_tr_two);
    let summary = CompareSummary {
        schema_version: SCHEMA_VERSION,
        effect: v.effect,
        t_star: v.t_star * spec.model.g,
        d_tr_single: v.d_tr_single,
        d_tr_two: v.d_tr_two,
        margin: v.margin,
        params: r.config.clone(),
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    let mut out = vec![Artifact { path: cfg.output.path.clone(), contents: json }];
    if let Some(p) = &cfg.output.single_csv {
        out.push(Artifact { path: Some(p.clone()), contents: record_csv("compare", &r.config, &cmp.single) });
    }
    if let Some(p) = &cfg.output.two_csv {
        out.push(Artifact { path: Some(p.clone()), contents: record_csv("compare", &r.config, &cmp.two) });
    }
    Ok(out)
}

fn parse_axis(name: &str, min: f64, max: f64, steps: usize) -> Result<Axis, CliError> {
    let param: AxisParam = name.parse()?;
    Ok(Axis::new(param, min, max, steps)?)
}

pub fn phase_diagram(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let r = resolve_run(cfg)?;
    let sweep = resolve_sweep(&cfg.sweep)?;
    let x = parse_axis(
        sweep.x_axis.as_deref().unwrap(),
        sweep.x_min.unwrap(),
        sweep.x_max.unwrap(),
        sweep.x_steps.unwrap(),
    )?;
    let y = parse_axis(
        sweep.y_axis.as_deref().unwrap(),
        sweep.y_min.unwrap(),
        sweep.y_max.unwrap(),
        sweep.y_steps.unwrap(),
    )?;
    let mut plan = SweepPlan::new(r.run.spec.clone(), x, y, r.run.t_star)?;
    plan.opts = r.opts;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    log::info!("sweeping {} cells on {} workers", plan.len(), pool.current_num_threads());
    let cells: Vec<PhaseCell> =
        pool.install(|| (0..plan.len()).into_par_iter().map(|i| plan.cell(i)).collect::<Result<Vec<_>, _>>())?;
    let pd = plan.assemble(cells)?;

    // Worker count does not affect the output, so it stays out of the header.
    let resolved = RunConfig { sweep: crate::config::SweepSection { workers: None, ..sweep }, ..r.config };
    let mut csv = Csv::new(
        "phase-diagram",
        &resolved,
        &[format!("x = {}, y = {}; rows ordered with y outer, x inner", x.param, y.param)],
        &["x", "y", "effect", "margin"],
    );
    for c in &pd.cells {
        csv.row(&[num(c.x), num(c.y), u8::from(c.effect).to_string(), num(c.margin)]);
    }
    Ok(vec![Artifact { path: cfg.output.path.clone(), contents: csv.finish() }])
}
