use num_complex::Complex64;
use pontus_core::hilbert::{
    dimension, distances, hs_distance, photon_number, trace_distance, BasisLabel, DensityMatrix,
};
use pontus_core::integrator::{integrate, uniform_times, IntegratorOptions, QuenchSchedule};
use pontus_core::linalg::CMatrix;
use pontus_core::liouvillian::{Generator, GeneratorKind};
use pontus_core::ModelParams;
use proptest::prelude::*;

fn density(n_cap: usize, raw: &[(f64, f64)]) -> DensityMatrix {
    let d = dimension(n_cap);
    let a = CMatrix::from_fn(d, |i, j| {
        let (re, im) = raw[i * d + j];
        Complex64::new(re, im)
    });
    let m = a.matmul(&a.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(n_cap, m.scale(Complex64::new(1.0 / tr, 0.0))).unwrap()
}

fn state(n_cap: usize) -> impl Strategy<Value = DensityMatrix> {
    let d = dimension(n_cap);
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d)
        .prop_filter("non-degenerate", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(move |raw| density(n_cap, &raw))
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.1..2.0f64, 0.0..12.0f64, 0.0..1.0f64, -1.0..1.0f64).prop_map(|(g, kappa, gamma, delta)| ModelParams {
        g,
        kappa,
        gamma,
        delta,
        ..Default::default()
    })
}

fn thermal_params() -> impl Strategy<Value = ModelParams> {
    (params(), 0.0..0.2f64, 0.0..0.2f64).prop_map(|(p, n_th, n_th_atom)| ModelParams { n_th, n_th_atom, ..p })
}

fn cases() -> Vec<(GeneratorKind, usize)> {
    vec![(GeneratorKind::SingleExcitation, 1), (GeneratorKind::NManifold, 1), (GeneratorKind::NManifold, 2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distances_are_metrics(a in state(2), b in state(2), c in state(2)) {
        let ab = distances(&a, &b).unwrap();
        let ba = distances(&b, &a).unwrap();
        prop_assert!((ab.d_tr - ba.d_tr).abs() < 1e-12);
        prop_assert!((ab.d_hs - ba.d_hs).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab.d_tr));
        // ||X||_2 <= ||X||_1 = 2 D_tr.
        prop_assert!(ab.d_hs <= 2.0 * ab.d_tr + 1e-12);
        let ac = trace_distance(&a, &c).unwrap();
        let cb = trace_distance(&c, &b).unwrap();
        prop_assert!(ab.d_tr <= ac + cb + 1e-12);
        let hac = hs_distance(&a, &c).unwrap();
        let hcb = hs_distance(&c, &b).unwrap();
        prop_assert!(ab.d_hs <= hac + hcb + 1e-12);
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-12);
    }

    #[test]
    fn generators_preserve_trace_and_hermiticity(p in params(), r1 in state(1), r2 in state(2)) {
        for (kind, n_cap) in cases() {
            let gen = Generator::new(kind, ModelParams { n_excitations: n_cap, ..p }).unwrap();
            let rho = if n_cap == 1 { &r1 } else { &r2 };
            let d = gen.rhs(rho).unwrap();
            let scale = d.max_abs().max(1.0);
            prop_assert!(d.trace().norm() < 1e-12 * scale, "{kind:?}: trace {}", d.trace());
            prop_assert!(d.hermiticity_residual() < 1e-12 * scale, "{kind:?}");
        }
    }

    #[test]
    fn thermal_generator_preserves_trace_and_hermiticity(p in thermal_params(), rho in state(1)) {
        let gen = Generator::new(GeneratorKind::ThermalRestricted, p).unwrap();
        let d = gen.rhs(&rho).unwrap();
        prop_assert!(d.trace().norm() < 1e-12 * d.max_abs().max(1.0));
        prop_assert!(d.hermiticity_residual() < 1e-12 * d.max_abs().max(1.0));
    }

    #[test]
    fn generators_are_linear(p in params(), a in state(2), b in state(2), s in -2.0..2.0f64) {
        let gen = Generator::new(GeneratorKind::NManifold, ModelParams { n_excitations: 2, ..p }).unwrap();
        let d = gen.dim();
        let mix = a.entries().add(&b.entries().scale(Complex64::new(s, 0.5)));
        let mut lhs = CMatrix::zeros(d);
        gen.apply(&mix, &mut lhs);
        let (mut la, mut lb) = (CMatrix::zeros(d), CMatrix::zeros(d));
        gen.apply(a.entries(), &mut la);
        gen.apply(b.entries(), &mut lb);
        let rhs = la.add(&lb.scale(Complex64::new(s, 0.5)));
        prop_assert!(lhs.sub(&rhs).max_abs() < 1e-12 * lhs.max_abs().max(1.0));
    }

    #[test]
    fn superoperator_matrix_matches_the_kernel(p in params(), rho in state(2)) {
        let gen = Generator::new(GeneratorKind::NManifold, ModelParams { n_excitations: 2, ..p }).unwrap();
        let m = gen.matrix();
        let direct = gen.rhs(&rho).unwrap();
        let via = m.apply(rho.entries());
        prop_assert!(direct.sub(&via).max_abs() < 1e-12 * direct.max_abs().max(1.0));
        prop_assert!(m.trace_residual() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn integration_keeps_states_physical_and_contracts(p in params(), rho0 in state(1)) {
        let p = ModelParams { kappa: p.kappa.max(0.5), ..p };
        let sched = QuenchSchedule::constant(p, 6.0).unwrap();
        let times = uniform_times(6.0, 61);
        let traj = integrate(GeneratorKind::SingleExcitation, &rho0, &sched, &times, &IntegratorOptions::default())
            .unwrap();
        let ground = DensityMatrix::pure(BasisLabel::ground(0), 1).unwrap();
        let mut last = trace_distance(&rho0, &ground).unwrap();
        prop_assert!(traj.max_renormalization < 1e-9);
        for rho in &traj.states {
            prop_assert!((rho.trace() - 1.0).abs() < 1e-9);
            prop_assert!(rho.min_eigenvalue() > -1e-9);
            let d = trace_distance(rho, &ground).unwrap();
            prop_assert!(d <= last + 1e-7, "distance grew from {last} to {d}");
            last = d;
        }
    }

    #[test]
    fn lossless_evolution_is_unitary(delta in -1.0..1.0f64, rho0 in state(2)) {
        let p = ModelParams { kappa: 0.0, delta, n_excitations: 2, ..Default::default() };
        let sched = QuenchSchedule::constant(p, 5.0).unwrap();
        let times = uniform_times(5.0, 11);
        let traj = integrate(GeneratorKind::NManifold, &rho0, &sched, &times, &IntegratorOptions::default()).unwrap();
        let (purity, exc) = (rho0.purity(), rho0.excitation_number());
        for rho in &traj.states {
            prop_assert!((rho.purity() - purity).abs() < 1e-8);
            prop_assert!((rho.excitation_number() - exc).abs() < 1e-8);
            prop_assert!(photon_number(rho) <= 2.0 + 1e-12);
        }
    }
}
