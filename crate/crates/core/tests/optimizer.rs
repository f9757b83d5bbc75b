mod common;

use common::*;
use ica_emk::emk_density::{
    gaussian_lambda, select_kernels, MaxEntModel, MeasuringSpec, QuadratureGrid,
};
use ica_emk::experiment::{make_trial, separate_known, SourceKind};
use ica_emk::linalg::inv_sqrt_spd;
use ica_emk::optimizer::*;
use ica_emk::preprocess::{center, center_and_whiten, covariance};
use ica_emk::{gain_matrix, isr};
use ndarray::{array, Array2};

fn white_ggd(n: usize, t: usize, seed: u64) -> Array2<f64> {
    let trial = make_trial::<f64>(SourceKind::GgdMixture, n, t, seed).unwrap();
    exactly_white(&trial.sources)
}

#[test]
fn gradient_matches_frozen_surrogate_differences() {
    for (k, n) in [2usize, 3, 4].into_iter().enumerate() {
        let z = exactly_white(
            &make_trial::<f64>(SourceKind::GgdMixture, n, 500, k as u64)
                .unwrap()
                .mixtures,
        );
        let mut w = gaussian_matrix(n, n, 10 + k as u64);
        for mut r in w.rows_mut() {
            let s = r.dot(&r).sqrt();
            r.mapv_inplace(|v| v / s);
        }
        for m in 0..n {
            let y: Vec<f64> = z.t().dot(&w.row(m)).to_vec();
            let model = select_kernels(&y).unwrap().model;
            let g = decoupled_gradient(w.view(), z.view(), m, &model).unwrap();
            let fd = surrogate_fd_gradient(&w, &z, m, &model);
            let scale = fd.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let err = g
                .iter()
                .zip(&fd)
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            assert!(err / scale < 1e-5, "N={n} m={m}: rel err {}", err / scale);
        }
    }
}

#[test]
fn gaussian_score_at_separating_point() {
    let z = exactly_white(&gaussian_matrix(2, 20_000, 3));
    let w = Array2::<f64>::eye(2);
    let grid = QuadratureGrid::uniform(-8.0, 8.0, 2048);
    let model = MaxEntModel {
        spec: MeasuringSpec::globals_only(),
        lambda: gaussian_lambda(0.0, 1.0, 4),
        alpha: vec![1.0, 0.0, 1.0, 0.0],
        grid,
    };
    let g = decoupled_gradient(w.view(), z.view(), 0, &model).unwrap();
    // data term is E{y z} = e_0 and cancels the determinant term exactly
    assert!(g.iter().all(|v| v.abs() < 1e-10), "{g:?}");
    let u = project_to_tangent(w.row(0), g.view());
    assert!(u.dot(&u).sqrt() < 1e-10);
}

#[test]
fn gradient_pole_is_guarded() {
    let z = exactly_white(&gaussian_matrix(3, 500, 4));
    let w = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 1.0, 0.0]];
    let y: Vec<f64> = z.row(0).to_vec();
    let model = select_kernels(&y).unwrap().model;
    assert!(matches!(
        decoupled_gradient(w.view(), z.view(), 0, &model),
        Err(ica_emk::IcaError::DegenerateDemixing(_))
    ));
}

#[test]
fn init_strategies_are_orthogonal() {
    let z = white_ggd(4, 3000, 5);
    for strat in [
        InitStrategy::RandomOrthogonal,
        InitStrategy::FixedNonlinearity,
        InitStrategy::Identity,
    ] {
        let w = init_demixing(z.view(), strat, 17);
        let e = w.dot(&w.t()) - Array2::<f64>::eye(4);
        assert!(e.iter().all(|v| v.abs() < 1e-8), "{strat:?}");
    }
    assert_eq!(
        init_demixing(z.view(), InitStrategy::RandomOrthogonal, 3),
        init_demixing(z.view(), InitStrategy::RandomOrthogonal, 3)
    );
}

#[test]
fn fixed_nonlinearity_finds_identity_mixing() {
    let trial = make_trial::<f64>(SourceKind::GgdMixture, 3, 5000, 6).unwrap();
    let (z, wt) = center_and_whiten(trial.sources.view()).unwrap();
    let w0 = init_demixing(z.view(), InitStrategy::FixedNonlinearity, 6);
    let g = gain_matrix(w0.view(), &wt, Array2::<f64>::eye(3).view()).unwrap();
    assert!(max_offdiag_ratio(&g) < 0.1, "{g:?}");
}

#[test]
fn cost_of_single_gaussian_source() {
    let z = exactly_white(&gaussian_matrix(1, 10_000, 7));
    let w = Array2::<f64>::eye(1);
    let y = z.row(0).to_vec();
    let model = select_kernels(&y).unwrap().model;
    let j = cost(w.view(), &[model]).unwrap();
    assert!((j - 1.418_938_533_2).abs() < 5e-2);
}

#[test]
fn cost_row_scaling_and_degeneracy() {
    let z = white_ggd(3, 2000, 8);
    let w = orthogonal(3, 8);
    let models: Vec<_> = (0..3)
        .map(|m| {
            select_kernels(&z.t().dot(&w.row(m)).to_vec())
                .unwrap()
                .model
        })
        .collect();
    let base = cost(w.view(), &models).unwrap();
    let mut scaled = w.clone();
    scaled.row_mut(1).mapv_inplace(|v| v * 2.5);
    let j = cost(scaled.view(), &models).unwrap();
    assert!((j - base + 2.5f64.ln()).abs() < 1e-12);
    let mut flat = w.clone();
    let r0 = flat.row(0).to_owned();
    flat.row_mut(2).assign(&r0);
    assert!(cost(flat.view(), &models).is_err());
}

#[test]
fn cost_is_rotation_invariant_on_gaussian_data() {
    let z = exactly_white(&gaussian_matrix(3, 10_000, 9));
    let eval = |w: &Array2<f64>| {
        let models: Vec<_> = (0..3)
            .map(|m| {
                select_kernels(&z.t().dot(&w.row(m)).to_vec())
                    .unwrap()
                    .model
            })
            .collect();
        cost(w.view(), &models).unwrap()
    };
    let a = eval(&orthogonal(3, 1));
    let b = eval(&orthogonal(3, 2));
    assert!((a - b).abs() < 1e-1, "{a} vs {b}");
}

#[test]
fn separating_point_is_stable() {
    for seed in 0..3u64 {
        let trial = make_trial::<f64>(SourceKind::GgdMixture, 3, 10_000, seed).unwrap();
        let (sc, _) = center(trial.sources.view()).unwrap();
        // symmetric whitening leaves W = I as a separating point
        let v = inv_sqrt_spd(covariance(sc.view()).view()).unwrap();
        let z = v.dot(&sc);
        let config = IcaConfig {
            init: InitStrategy::Identity,
            ..IcaConfig::<f64>::default()
        };
        let state = run_ica_whitened(z.view(), Array2::eye(3), &config).unwrap();
        assert!(state.converged, "seed {seed}");
        let db = isr(state.w.dot(&v).view()).unwrap();
        assert!(db < -40.0, "seed {seed}: {db} dB");
    }
}

#[test]
fn jacobi_mode_is_independent_of_worker_count() {
    let trial = make_trial::<f64>(SourceKind::GgdMixture, 4, 1500, 11).unwrap();
    let base = IcaConfig::<f64> {
        seed: 11,
        max_iters: 30,
        force_jacobi: true,
        ..IcaConfig::default()
    };
    let (a, _) = run_ica(
        trial.mixtures.view(),
        &IcaConfig {
            workers: 0,
            ..base.clone()
        },
    )
    .unwrap();
    for workers in [1, 2, 4] {
        let (b, _) = run_ica(
            trial.mixtures.view(),
            &IcaConfig {
                workers,
                ..base.clone()
            },
        )
        .unwrap();
        assert_eq!(a.w, b.w, "workers = {workers}");
        assert_eq!(a.cost_trace, b.cost_trace);
    }
}

#[test]
fn row_norms_trace_and_termination() {
    let trial = make_trial::<f64>(SourceKind::Gamma, 3, 2000, 12).unwrap();
    for max_iters in [8, 25] {
        let config = IcaConfig::<f64> {
            seed: 12,
            max_iters,
            ..IcaConfig::default()
        };
        let (state, _) = run_ica(trial.mixtures.view(), &config).unwrap();
        for r in state.w.rows() {
            assert!((r.dot(&r) - 1.0).abs() < 1e-12);
        }
        assert_eq!(state.cost_trace.len(), state.iterations_run);
        assert!(state.iterations_run <= max_iters);
        if state.converged {
            let k = config.lag_k;
            let j = &state.cost_trace;
            assert!((j[j.len() - 1] - j[j.len() - 1 - k]).abs() < config.delta);
        } else {
            assert_eq!(state.iterations_run, max_iters);
        }
    }
}

#[test]
fn fixed_iteration_mode_runs_to_the_cap() {
    let trial = make_trial::<f64>(SourceKind::Gamma, 2, 1000, 13).unwrap();
    let config = IcaConfig::<f64> {
        max_iters: 15,
        lag_k: 1,
        fixed_iterations: true,
        ..IcaConfig::default()
    };
    let (state, _) = run_ica(trial.mixtures.view(), &config).unwrap();
    assert_eq!(state.iterations_run, 15);
    assert!(!state.converged);
}

#[test]
fn co_permuted_sources_and_mixing_give_identical_isr() {
    let trial = make_trial::<f64>(SourceKind::GgdMixture, 3, 3000, 14).unwrap();
    let perm = [2usize, 0, 1];
    let mut s2 = trial.sources.clone();
    let mut a2 = trial.mixing.clone();
    for (dst, &src) in perm.iter().enumerate() {
        s2.row_mut(dst).assign(&trial.sources.row(src));
        a2.column_mut(dst).assign(&trial.mixing.column(src));
    }
    let config = IcaConfig::<f64> {
        seed: 14,
        max_iters: 60,
        ..IcaConfig::default()
    };
    let a = separate_known(&trial.sources, &trial.mixing, &config).unwrap();
    let b = separate_known(&s2, &a2, &config).unwrap();
    // X = A S is the same matrix up to summation order
    assert!((a.report.isr_db - b.report.isr_db).abs() < 1e-6);
    for (dst, &src) in perm.iter().enumerate() {
        let d = &a.report.gain.column(src) - &b.report.gain.column(dst);
        assert!(d.iter().all(|v| v.abs() < 1e-9));
    }
}

#[test]
fn rank_deficient_mixtures_are_rejected() {
    let mut x = gaussian_matrix(3, 500, 15);
    let r = x.row(0).to_owned();
    x.row_mut(1).assign(&r);
    assert!(matches!(
        run_ica(x.view(), &IcaConfig::<f64>::default()),
        Err(ica_emk::IcaError::RankDeficient { .. })
    ));
}

#[test]
fn two_source_ggd_separates() {
    // Laplace-like and uniform-like sources under random mixing.
    let mut good = 0;
    let runs = 10;
    for r in 0..runs {
        let seed = 100 + r as u64;
        let mut s = Array2::<f64>::zeros((2, 10_000));
        s.row_mut(0).assign(&ndarray::Array1::from(
            ica_emk::sources_bench::sample_ggd::<f64>(0.5, 0.0, 1.0, 10_000, seed).unwrap(),
        ));
        s.row_mut(1).assign(&ndarray::Array1::from(
            ica_emk::sources_bench::sample_ggd::<f64>(4.0, 0.0, 1.0, 10_000, seed + 1000).unwrap(),
        ));
        ica_emk::sources_bench::standardize_rows(&mut s);
        let a = ica_emk::sources_bench::random_mixing::<f64>(2, seed).unwrap();
        let out = separate_known(
            &s,
            &a,
            &IcaConfig {
                seed,
                ..IcaConfig::default()
            },
        )
        .unwrap();
        if out.report.isr_db < -20.0 {
            good += 1;
        }
        let g = isr(out.report.gain.view()).unwrap();
        assert_eq!(g, out.report.isr_db);
    }
    assert!(good * 10 >= runs * 9, "{good}/{runs} runs below -20 dB");
}

#[test]
fn f32_pipeline_runs() {
    let trial = make_trial::<f32>(SourceKind::Gamma, 2, 2000, 16).unwrap();
    let out = separate_known(
        &trial.sources,
        &trial.mixing,
        &IcaConfig::<f32> {
            max_iters: 40,
            ..IcaConfig::default()
        },
    )
    .unwrap();
    assert!(out.report.isr_db < -10.0, "{}", out.report.isr_db);
}
