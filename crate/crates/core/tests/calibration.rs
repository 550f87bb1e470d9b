mod common;

use common::calibration_fixture;
use lcf_risk::calibration::*;
use lcf_risk::strain_life::{solve_cmb, solve_cmb_notched};

fn oracle_theta() -> Theta {
    Theta {
        sigma_f: 1400.0,
        b: -0.09,
        eps_f: 0.25,
        c: -0.65,
        a: 0.35,
        k: 0.6,
        m: 3.2,
    }
}

fn oracle_profiles() -> Vec<SpecimenProfile> {
    let rows = [(0.5, 1.8, 1.2), (2.0, 1.3, 0.4), (6.0, 1.0, 0.0)]
        .iter()
        .map(|&(area, kappa, chi)| ProfileRow { area, kappa, chi })
        .collect();
    vec![
        SpecimenProfile::uniform("smooth", 20.0).unwrap(),
        SpecimenProfile::tabulated("notch", rows).unwrap(),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn uniform_unit_area_is_deterministic_life() {
    let theta = oracle_theta();
    let ctx = FitContext::elastic(150_000.0);
    let p = SpecimenProfile::uniform("u", 1.0).unwrap();
    let n = solve_cmb(0.005, &theta.cmb(ctx.e_modulus), ctx.n_cap).unwrap().cycles;
    assert_eq!(specimen_eta(&p, 0.005, &theta, &ctx).unwrap().eta, n);
}

#[test]
fn uniform_area_scaling() {
    let theta = Theta {
        m: 2.0,
        ..oracle_theta()
    };
    let ctx = FitContext::elastic(150_000.0);
    let one = SpecimenProfile::uniform("u", 1.0).unwrap();
    let hundred = SpecimenProfile::uniform("u", 100.0).unwrap();
    let a = specimen_eta(&one, 0.005, &theta, &ctx).unwrap().eta;
    let b = specimen_eta(&hundred, 0.005, &theta, &ctx).unwrap().eta;
    assert!(rel(b, a / 10.0) < 1e-15);
}

#[test]
fn tabulated_eta_matches_oracle() {
    // tests/oracles/likelihood.py
    let expected = 3397.9144229501100586;
    let eta = specimen_eta(
        &oracle_profiles()[1],
        0.004,
        &oracle_theta(),
        &FitContext::elastic(150_000.0),
    )
    .unwrap();
    assert!(rel(eta.eta, expected) < 1e-12, "{}", eta.eta);
    assert_eq!(eta.capped_rows, 0);
}

#[test]
fn all_capped_profile_uses_caps() {
    let ctx = FitContext::elastic(150_000.0);
    let eta = specimen_eta(&oracle_profiles()[1], 1e-7, &oracle_theta(), &ctx).unwrap();
    assert!(eta.all_capped());
    let expected = ctx.n_cap * 8.5f64.powf(-1.0 / 3.2);
    assert!(rel(eta.eta, expected) < 1e-14);
}

fn oracle_dataset() -> FatigueDataset {
    let csv = "profile_id,eps_a,temp_C,n_obs,censored\n\
        smooth,0.004,850,7000,0\n\
        smooth,0.004,850,4200,0\n\
        smooth,0.006,850,620,0\n\
        smooth,0.003,850,60000,1\n\
        smooth,0.008,850,150,0\n\
        notch,0.004,850,3000,0\n\
        notch,0.004,850,5200,0\n\
        notch,0.005,850,900,0\n\
        notch,0.0025,850,100000,1\n\
        notch,0.007,850,330,0\n";
    FatigueDataset::from_csv_str("oracle", csv).unwrap()
}

#[test]
fn likelihood_matches_oracle() {
    let model = LikelihoodModel::new(&oracle_dataset(), &oracle_profiles(), FitContext::elastic(150_000.0)).unwrap();
    let expected = 60.425369781110180901;
    let nll = model.try_neg_log_likelihood(&oracle_theta()).unwrap();
    assert!(rel(nll, expected) < 1e-10, "{nll}");
}

fn single_record(n_obs: f64, censored: u8, eps: f64) -> FatigueDataset {
    let csv = format!("profile_id,eps_a,temp_C,n_obs,censored\nu,{eps},20,{n_obs},{censored}\n");
    FatigueDataset::from_csv_str("one", &csv).unwrap()
}

#[test]
fn exponential_density_at_scale() {
    let theta = Theta {
        m: 1.0,
        ..oracle_theta()
    };
    let ctx = FitContext::elastic(150_000.0);
    let profiles = [SpecimenProfile::uniform("u", 1.0).unwrap()];
    let eta = specimen_eta(&profiles[0], 0.005, &theta, &ctx).unwrap().eta;
    let model = LikelihoodModel::new(&single_record(eta, 0, 0.005), &profiles, ctx).unwrap();
    let nll = model.try_neg_log_likelihood(&theta).unwrap();
    assert!(rel(nll, 1.0 + eta.ln()) < 1e-14);
}

#[test]
fn censored_record_is_survival_term() {
    let theta = oracle_theta();
    let ctx = FitContext::elastic(150_000.0);
    let profiles = [SpecimenProfile::uniform("u", 3.0).unwrap()];
    let eta = specimen_eta(&profiles[0], 0.005, &theta, &ctx).unwrap().eta;
    let model = LikelihoodModel::new(&single_record(2000.0, 1, 0.005), &profiles, ctx).unwrap();
    let nll = model.try_neg_log_likelihood(&theta).unwrap();
    assert!(rel(nll, (2000.0 / eta).powf(theta.m)) < 1e-13);
}

#[test]
fn out_of_bounds_is_infinite() {
    let model = LikelihoodModel::new(&oracle_dataset(), &oracle_profiles(), FitContext::elastic(150_000.0)).unwrap();
    for bad in [
        Theta {
            b: 0.01,
            ..oracle_theta()
        },
        Theta {
            c: 0.0,
            ..oracle_theta()
        },
        Theta {
            a: -0.1,
            ..oracle_theta()
        },
        Theta {
            k: 2.5,
            ..oracle_theta()
        },
        Theta {
            m: 0.0,
            ..oracle_theta()
        },
        Theta {
            sigma_f: f64::NAN,
            ..oracle_theta()
        },
    ] {
        assert_eq!(model.neg_log_likelihood(&bad), f64::INFINITY, "{bad:?}");
    }
}

#[test]
fn missing_profile_is_named() {
    let err = LikelihoodModel::new(
        &single_record(10.0, 0, 0.01),
        &oracle_profiles(),
        FitContext::elastic(1e5),
    )
    .unwrap_err()
    .to_string();
    assert!(err.contains("profile u"), "{err}");
}

#[test]
fn characteristic_quantile_is_deterministic_life() {
    let theta = oracle_theta();
    let ctx = FitContext::elastic(150_000.0);
    let p = SpecimenProfile::uniform("u", 1.0).unwrap();
    let grid = log_grid(0.003, 0.02, 9);
    let curve = en_curve(&theta, &p, 1.0 - (-1.0f64).exp(), &grid, &ctx).unwrap();
    for c in &curve {
        let n = solve_cmb(c.eps_a, &theta.cmb(ctx.e_modulus), ctx.n_cap).unwrap().cycles;
        assert!(rel(c.cycles, n) < 1e-14);
    }
}

#[test]
fn median_curve_closed_form() {
    let theta = oracle_theta();
    let ctx = FitContext::elastic(150_000.0);
    let p = SpecimenProfile::uniform("u", 12.0).unwrap();
    let grid = log_grid(0.003, 0.02, 9);
    for c in en_curve(&theta, &p, 0.5, &grid, &ctx).unwrap() {
        let n = solve_cmb(c.eps_a, &theta.cmb(ctx.e_modulus), ctx.n_cap).unwrap().cycles;
        let expected = n * 2f64.ln().powf(1.0 / theta.m) * 12f64.powf(-1.0 / theta.m);
        assert!(rel(c.cycles, expected) < 1e-14);
    }
}

#[test]
fn tabulated_curve_matches_direct_integration() {
    let theta = oracle_theta();
    let ctx = FitContext::elastic(150_000.0);
    let profile = &oracle_profiles()[1];
    let ProfileShape::Tabulated { rows } = &profile.shape else {
        unreachable!()
    };
    let grid = log_grid(0.0025, 0.012, 7);
    for c in en_curve(&theta, profile, 0.1, &grid, &ctx).unwrap() {
        let sum: f64 = rows
            .iter()
            .map(|r| {
                let n = solve_cmb_notched(
                    r.kappa * c.eps_a,
                    r.chi,
                    &theta.cmb(ctx.e_modulus),
                    &theta.notch(),
                    ctx.n_cap,
                )
                .unwrap()
                .cycles;
                r.area * n.powf(-theta.m)
            })
            .sum();
        let expected = sum.powf(-1.0 / theta.m) * (-(0.9f64).ln()).powf(1.0 / theta.m);
        assert!(rel(c.cycles, expected) < 1e-12);
    }
}

#[test]
fn notched_curve_dominates_zero_gradient_counterpart() {
    let theta = oracle_theta();
    let ctx = FitContext::elastic(150_000.0);
    let profile = &oracle_profiles()[1];
    let ProfileShape::Tabulated { rows } = &profile.shape else {
        unreachable!()
    };
    let flat =
        SpecimenProfile::tabulated("flat", rows.iter().map(|r| ProfileRow { chi: 0.0, ..*r }).collect()).unwrap();
    let grid = log_grid(0.002, 0.02, 15);
    let a = en_curve(&theta, profile, 0.5, &grid, &ctx).unwrap();
    let b = en_curve(&theta, &flat, 0.5, &grid, &ctx).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(x.cycles >= y.cycles);
    }
}

#[test]
fn quantile_outside_unit_interval_rejected() {
    let p = SpecimenProfile::uniform("u", 1.0).unwrap();
    let ctx = FitContext::elastic(150_000.0);
    assert!(en_curve(&oracle_theta(), &p, 1.0, &[0.01], &ctx).is_err());
    assert!(en_curve(&oracle_theta(), &p, 0.0, &[0.01], &ctx).is_err());
}

fn simulated(theta: &Theta, seed: u64) -> LikelihoodModel {
    let fx = calibration_fixture();
    let data = simulate_dataset(&fx.profiles, &fx.design, theta, &fx.ctx, 850.0, seed).unwrap();
    LikelihoodModel::new(&data, &fx.profiles, fx.ctx).unwrap()
}

#[test]
fn tiny_scatter_recovers_curve_parameters() {
    let fx = calibration_fixture();
    let truth = Theta { m: 300.0, ..fx.truth };
    let level = |profile_id: &str, eps_a: f64| DesignLevel {
        profile_id: profile_id.into(),
        eps_a,
        count: 4,
        runout: None,
    };
    let mut design: Vec<DesignLevel> = log_grid(0.0025, 0.04, 9)
        .into_iter()
        .map(|e| level("smooth", e))
        .collect();
    design.extend(log_grid(0.0018, 0.03, 6).into_iter().map(|e| level("notch_r2.4", e)));
    let data = simulate_dataset(&fx.profiles, &design, &truth, &fx.ctx, 850.0, 11).unwrap();
    let model = LikelihoodModel::new(&data, &fx.profiles, fx.ctx).unwrap();
    let start = Theta { m: 150.0, ..fx.start };
    let r = fit(&model, &start, &FitOptions::default()).unwrap();
    assert!(r.converged);
    assert!(r.neg_log_likelihood <= r.initial_neg_log_likelihood);
    for (name, got, want) in [
        ("sigma_f", r.theta.sigma_f, truth.sigma_f),
        ("b", r.theta.b, truth.b),
        ("eps_f", r.theta.eps_f, truth.eps_f),
        ("c", r.theta.c, truth.c),
    ] {
        assert!(rel(got, want) < 0.02, "{name}: {got} vs {want} ({:?})", r.theta);
    }
}

#[test]
fn smooth_only_data_freezes_notch_parameters() {
    let fx = calibration_fixture();
    let design: Vec<DesignLevel> = fx.design.iter().filter(|d| d.profile_id == "smooth").cloned().collect();
    let data = simulate_dataset(&fx.profiles, &design, &fx.truth, &fx.ctx, 850.0, 3).unwrap();
    let model = LikelihoodModel::new(&data, &fx.profiles, fx.ctx).unwrap();
    let a = model.neg_log_likelihood(&fx.truth);
    let b = model.neg_log_likelihood(&Theta {
        a: 5.0,
        k: 1.7,
        ..fx.truth
    });
    assert_eq!(a, b);
    let r = fit(
        &model,
        &fx.start,
        &FitOptions {
            starts: 1,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(r.warnings.iter().any(|w| w.contains("not identifiable")));
    assert!(!r.free[4] && !r.free[5]);
    assert_eq!((r.theta.a, r.theta.k), (fx.start.a, fx.start.k));
}

#[test]
fn fit_never_ends_above_its_start() {
    let fx = calibration_fixture();
    let model = simulated(&fx.truth, 5);
    let r = fit(
        &model,
        &fx.start,
        &FitOptions {
            starts: 2,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(r.neg_log_likelihood <= r.initial_neg_log_likelihood);
    for s in &r.starts {
        assert!(s.neg_log_likelihood <= model.neg_log_likelihood(&s.start));
    }
}

#[test]
fn hitting_iteration_limit_is_an_error_with_best_result() {
    let fx = calibration_fixture();
    let model = simulated(&fx.truth, 5);
    let opts = FitOptions {
        starts: 2,
        restarts: 0,
        nelder_mead: NelderMeadOptions {
            max_iter: 10,
            ..Default::default()
        },
        ..Default::default()
    };
    match fit(&model, &fx.start, &opts) {
        Err(lcf_risk::Error::FitNotConverged(best)) => {
            assert!(!best.converged);
            assert!(best.neg_log_likelihood <= best.initial_neg_log_likelihood);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn log_and_raw_parametrizations_agree() {
    let fx = calibration_fixture();
    let model = simulated(&fx.truth, 21);
    // σ'f, b and m free; the rest held at the truth.
    let fixed = [false, false, true, true, true, true, false];
    let start = Theta {
        sigma_f: 1100.0,
        b: -0.11,
        m: 2.6,
        ..fx.truth
    };
    let run = |parametrization| {
        fit(
            &model,
            &start,
            &FitOptions {
                starts: 1,
                fixed,
                parametrization,
                ..Default::default()
            },
        )
        .unwrap()
        .theta
    };
    let a = run(Parametrization::Log);
    let b = run(Parametrization::Raw);
    for (x, y) in a.to_array().iter().zip(b.to_array()) {
        assert!(rel(*x, y) < 1e-6, "{a:?} vs {b:?}");
    }
}

#[test]
fn truth_beats_perturbations_on_average() {
    use rand::{Rng, SeedableRng};
    let fx = calibration_fixture();
    let models: Vec<LikelihoodModel> = (0..50).map(|s| simulated(&fx.truth, 1000 + s)).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let mut wins = 0;
    for _ in 0..20 {
        let pert = Theta::from_array(std::array::from_fn(|i| {
            let v = fx.truth.to_array()[i];
            v * if rng.random::<bool>() { 1.2 } else { 0.8 }
        }));
        let votes = models
            .iter()
            .filter(|m| m.neg_log_likelihood(&fx.truth) <= m.neg_log_likelihood(&pert))
            .count();
        if votes * 2 > models.len() {
            wins += 1;
        }
    }
    assert_eq!(wins, 20);
}

#[test]
fn censoring_a_failure_widens_the_median_interval() {
    let fx = calibration_fixture();
    let model = simulated(&fx.truth, 8);
    let opts = FitOptions {
        starts: 1,
        fixed: [false, true, true, true, true, true, true],
        ..Default::default()
    };
    let data = model.dataset();
    let base = fit(&model, &fx.truth, &opts).unwrap();
    let smooth = &model.profiles()[0];
    for i in [0, 17, 42, 63, 88] {
        let obs: Vec<(f64, bool)> = data
            .records()
            .iter()
            .enumerate()
            .map(|(j, r)| (r.n_obs, r.censored || j == i))
            .collect();
        let censored = model.with_observations(&obs).unwrap();
        let refit = fit(&censored, &fx.truth, &opts).unwrap();
        for eps in log_grid(0.003, 0.014, 5) {
            let w0 = median_log_std_error(&model, &base, smooth, eps).unwrap();
            let w1 = median_log_std_error(&censored, &refit, smooth, eps).unwrap();
            assert!(w1 >= w0, "record {i}, eps {eps}: {w1} < {w0}");
        }
    }
}

fn small_bootstrap(model: &LikelihoodModel, fitted: &FitResult, ci_level: f64) -> BootstrapResult {
    bootstrap(
        model,
        fitted,
        &BootstrapOptions {
            replicates: 100,
            ci_level,
            seed: 7,
            grid: log_grid(0.003, 0.01, 5),
            spaghetti: 3,
            ..Default::default()
        },
    )
    .unwrap()
}

#[test]
fn bootstrap_is_deterministic_and_collapses_at_zero_level() {
    let fx = calibration_fixture();
    let model = simulated(&fx.truth, 4);
    let fitted = fit(
        &model,
        &fx.truth,
        &FitOptions {
            starts: 1,
            ..Default::default()
        },
    )
    .unwrap();
    let a = small_bootstrap(&model, &fitted, 0.925);
    let b = small_bootstrap(&model, &fitted, 0.925);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.spaghetti.len(), 3 * model.profiles().len());
    for p in &a.profiles {
        for j in 0..p.lower.len() {
            assert!(p.lower[j] <= p.median[j] && p.median[j] <= p.upper[j]);
        }
    }
    let z = small_bootstrap(&model, &fitted, 0.0);
    for p in &z.profiles {
        assert_eq!(p.lower, p.median);
        assert_eq!(p.upper, p.median);
    }
}

#[test]
fn bootstrap_preconditions() {
    let fx = calibration_fixture();
    let model = simulated(&fx.truth, 4);
    let fitted = fit(
        &model,
        &fx.truth,
        &FitOptions {
            starts: 1,
            ..Default::default()
        },
    )
    .unwrap();
    let opts = BootstrapOptions {
        replicates: 50,
        ..Default::default()
    };
    assert!(bootstrap(&model, &fitted, &opts).is_err());
    let opts = BootstrapOptions {
        replicates: 100,
        ci_level: 1.0,
        ..Default::default()
    };
    assert!(bootstrap(&model, &fitted, &opts).is_err());
}

#[test]
fn percentile_type_seven() {
    let v = [1.0, 2.0, 3.0, 4.0];
    assert_eq!(percentile(&v, 0.0), 1.0);
    assert_eq!(percentile(&v, 1.0), 4.0);
    assert_eq!(percentile(&v, 0.5), 2.5);
    assert!((percentile(&v, 0.1) - 1.3).abs() < 1e-15);
}
