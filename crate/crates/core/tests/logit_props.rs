mod common;

use fplogit::logit::{fit_logit, logistic, logit_summary, predict_logit, DesignMatrix};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

#[test]
fn matches_grid_search_mle() {
    let (x, y) = common::oracles::eight_point_instance();
    let design = DesignMatrix::from_columns(8, [("x", x.to_vec())]).unwrap();
    let fit = fit_logit(&y, &design).unwrap();
    assert!(fit.converged);
    let (dev, a, g) = common::oracles::grid_search_mle(&x, &y, 1e-5);
    assert!((fit.coef[0] - a).abs() <= 1e-3, "{} vs {a}", fit.coef[0]);
    assert!((fit.coef[1] - g).abs() <= 1e-3, "{} vs {g}", fit.coef[1]);
    assert!((fit.residual_deviance - dev).abs() <= 1e-3);
    assert!(fit.residual_deviance <= dev + 1e-12);
}

#[test]
fn intercept_only_symmetric_response() {
    let y = [1.0, 1.0, 0.0, 0.0];
    let fit = fit_logit(&y, &DesignMatrix::intercept_only(4)).unwrap();
    assert!(fit.coef[0].abs() < 1e-12);
    assert!(fit.fitted.iter().all(|&p| (p - 0.5).abs() < 1e-12));
    assert!((fit.null_deviance - fit.residual_deviance).abs() < 1e-12);
}

#[test]
fn standard_errors_match_fisher_information() {
    let inst = common::random_instance(3, false);
    let mut d = DesignMatrix::intercept_only(inst.y.len());
    d.push_column("u", &inst.nonfd.columns()[0]).unwrap();
    d.push_column("a1", &inst.fd.coefs().column(0).iter().cloned().collect::<Vec<_>>()).unwrap();
    let fit = fit_logit(&inst.y, &d).unwrap();
    let x = d.matrix();
    let w = DMatrix::from_diagonal(&DVector::from_iterator(x.nrows(), fit.fitted.iter().map(|p| p * (1.0 - p))));
    let info_inv = (x.transpose() * w * x).try_inverse().unwrap();
    let summary = logit_summary(&fit);
    for (j, row) in summary.coefficients.iter().enumerate() {
        let se = info_inv[(j, j)].sqrt();
        assert!((row.std_error - se).abs() <= 1e-8 * se.max(1.0), "{} {} vs {se}", row.name, row.std_error);
        assert!((row.z_value - row.estimate / row.std_error).abs() < 1e-12);
    }
}

#[test]
fn symmetric_design_has_symmetric_errors() {
    // balanced orthogonal ±1 design, the two predictors play mirrored roles
    let x1 = [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
    let x2 = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
    let y = [1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0];
    let d = DesignMatrix::from_columns(8, [("x1", x1.to_vec()), ("x2", x2.to_vec())]).unwrap();
    let s = logit_summary(&fit_logit(&y, &d).unwrap());
    assert!((s.coefficients[1].std_error - s.coefficients[2].std_error).abs() < 1e-10);
}

#[test]
fn extreme_logits_do_not_overflow() {
    assert!(1.0 - logistic(40.0) < 1e-15);
    assert_eq!(logistic(1e6), 1.0 - f64::EPSILON);
    assert_eq!(logistic(-1e6), logistic(-700.0));
    assert!(logistic(-1e6) > 0.0);
}

fn instance_design(inst: &common::LogitInstance, cols: usize) -> DesignMatrix {
    let mut d = DesignMatrix::intercept_only(inst.y.len());
    for j in 0..cols {
        let c: Vec<f64> = inst.fd.coefs().column(j).iter().cloned().collect();
        d.push_column(format!("a{j}"), &c).unwrap();
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn irls_properties(seed in 0u64..100_000, fourier in any::<bool>()) {
        let inst = common::random_instance(seed, fourier);
        let n = inst.y.len();
        let d = instance_design(&inst, 3);
        let fit = fit_logit(&inst.y, &d).unwrap();
        prop_assume!(!fit.separation_flag);
        prop_assert!(fit.converged);

        for w in fit.deviance_trace.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!((fit.aic - fit.residual_deviance - 2.0 * 4.0).abs() < 1e-12);

        let x = d.matrix();
        for j in 0..x.ncols() {
            let score: f64 = (0..n).map(|i| x[(i, j)] * (inst.y[i] - fit.fitted[i])).sum();
            prop_assert!(score.abs() <= 1e-6, "score {j}: {score}");
        }

        let again = predict_logit(&fit, &d).unwrap();
        prop_assert!(common::max_abs_diff(&again, &fit.fitted) <= 1e-12);

        // nesting: one more column never increases the deviance
        let bigger = instance_design(&inst, 4);
        let fit4 = fit_logit(&inst.y, &bigger).unwrap();
        prop_assert!(fit4.residual_deviance <= fit.residual_deviance + 1e-9);
        let smaller = instance_design(&inst, 2);
        let fit2 = fit_logit(&inst.y, &smaller).unwrap();
        prop_assert!(fit.residual_deviance <= fit2.residual_deviance + 1e-9);
        prop_assert!(fit2.residual_deviance <= fit2.null_deviance + 1e-9);
    }

    #[test]
    fn column_scaling_invariance(seed in 0u64..100_000, c in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0]) {
        let inst = common::random_instance(seed, true);
        let d = instance_design(&inst, 2);
        let fit = fit_logit(&inst.y, &d).unwrap();
        prop_assume!(!fit.separation_flag);
        let mut scaled = DesignMatrix::intercept_only(inst.y.len());
        scaled.push_column("a0", &d.column("a0").unwrap().iter().map(|v| v * c).collect::<Vec<_>>()).unwrap();
        scaled.push_column("a1", &d.column("a1").unwrap()).unwrap();
        let fit_s = fit_logit(&inst.y, &scaled).unwrap();
        prop_assert!(common::max_abs_diff(&fit.fitted, &fit_s.fitted) <= 1e-8);
        let want = fit.coef[1] / c;
        prop_assert!((fit_s.coef[1] - want).abs() <= 1e-8 * want.abs().max(1.0));
    }
}

#[test]
fn error_cases() {
    let d = DesignMatrix::from_columns(4, [("x", vec![1.0, 2.0, 3.0, 4.0])]).unwrap();
    assert!(matches!(fit_logit(&[1.0; 4], &d), Err(fplogit::Error::DegenerateResponse(_))));
    let dup = DesignMatrix::from_columns(4, [("x", vec![1.0, 2.0, 3.0, 4.0]), ("x2", vec![2.0, 4.0, 6.0, 8.0])]).unwrap();
    assert!(matches!(
        fit_logit(&[1.0, 0.0, 1.0, 0.0], &dup),
        Err(fplogit::Error::RankDeficient { .. })
    ));
    let other = DesignMatrix::from_columns(4, [("z", vec![1.0, 2.0, 3.0, 4.0])]).unwrap();
    let fit = fit_logit(&[1.0, 0.0, 0.0, 1.0], &d).unwrap();
    assert!(matches!(predict_logit(&fit, &other), Err(fplogit::Error::SchemaMismatch(_))));
}
