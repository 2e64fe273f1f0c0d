mod common;

use climact::experiments::{
    ablation_variants, coefficient_correlation, coefficients_csv, errorbars_svg, paired_coefficients, pearson, report,
    run_ablation, run_robustness, sympathy_histogram, AblationConfig, PairedCoefficient, ERRORBAR_PANELS,
};
use climact::inference::{fit, FitConfig, FitResult};
use climact::model::{Dataset, Hyperparameters, ModelParameters, Structure, VariableGroup};
use proptest::prelude::*;

fn quick() -> FitConfig {
    FitConfig {
        n_restarts: 2,
        n_steps: 400,
        n_predictive_samples: 50,
        seed: 3,
        ..FitConfig::default()
    }
}

fn fit_at(data: &Dataset, structure: &Structure, var_s: f64) -> FitResult {
    fit(data, &Hyperparameters::default(), structure, &FitConfig { var_s, ..quick() }).unwrap()
}

fn csv_rows(bytes: &[u8]) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(bytes).records().map(Result::unwrap).collect()
}

#[test]
fn coefficient_table_has_one_row_per_parameter_and_fit() {
    let data = common::simulate(&ModelParameters::example(), 5, 120, 1.0, 1);
    let no_m = fit_at(&data, &Structure::without([VariableGroup::Media]), 1.0);
    assert_eq!(no_m.parameters.len(), 30);
    let rows = csv_rows(&coefficients_csv(std::slice::from_ref(&no_m)).unwrap());
    assert_eq!(rows.len(), 30);
    for r in &rows {
        let (mean, lo, hi): (f64, f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap(), r[3].parse().unwrap());
        assert!(lo <= mean && mean <= hi);
    }

    let fits: Vec<FitResult> = [0.01, 1.0, 100.0].iter().map(|&v| fit_at(&data, &Structure::full(), v)).collect();
    assert_eq!(csv_rows(&coefficients_csv(&fits).unwrap()).len(), 3 * 39);
    let svg = errorbars_svg(&fits);
    let panels: Vec<&str> = svg.split("<g class=\"panel\"").skip(1).collect();
    assert_eq!(panels.len(), ERRORBAR_PANELS.len());
    for p in panels {
        assert_eq!(p.matches("<g class=\"series\"").count(), 3);
    }
}

#[test]
fn histogram_counts_every_user_once() {
    let data = common::simulate(&ModelParameters::example(), 5, 150, 1.0, 2);
    let f = fit_at(&data, &Structure::full(), 1.0);
    let h = sympathy_histogram(&f, 30);
    assert_eq!(h.edges.len(), 31);
    let active = data.users.iter().filter(|u| u.activated).count();
    assert_eq!(h.activated.iter().sum::<usize>(), active);
    assert_eq!(h.not_activated.iter().sum::<usize>(), 150 - active);
}

#[test]
fn report_writes_figures_and_twins() {
    let data = common::simulate(&ModelParameters::example(), 5, 100, 1.0, 4);
    let dir = tempfile::tempdir().unwrap();
    assert!(report(&[], None, dir.path()).is_err());
    let f = fit_at(&data, &Structure::full(), 1.0);
    let files = report(std::slice::from_ref(&f), None, dir.path()).unwrap();
    let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(names, ["coefficients.csv", "errorbars.svg", "sympathy_hist.csv", "sympathy_hist.svg"]);
    for p in &files {
        assert!(std::fs::metadata(p).unwrap().len() > 0);
    }
}

#[test]
fn ablation_fits_every_variant_at_every_sweep_value() {
    let data = common::simulate(&ModelParameters::example(), 5, 100, 1.0, 5);
    let config = AblationConfig {
        groups: vec![VariableGroup::Engagement, VariableGroup::Interaction, VariableGroup::Engagement],
        var_s_values: vec![0.01, 1.0],
        fit: quick(),
        include_joint_removal: true,
    };
    let variants = ablation_variants(&config);
    assert_eq!(variants.len(), 4);
    assert!(variants[0].is_full());
    let out = run_ablation(&data, &Hyperparameters::default(), &config).unwrap();
    assert_eq!(out.rows.len(), 8);
    let full = out.rows.iter().find(|r| r.variant == Structure::full().label()).unwrap();
    assert_eq!(full.n_parameters, 39);
    let no_e = Structure::without([VariableGroup::Engagement]).label();
    assert_eq!(out.rows.iter().find(|r| r.variant == no_e).unwrap().n_parameters, 31);
    assert!(out.fit_for(&no_e, 1.0).is_some());
}

#[test]
fn removing_a_group_with_no_effect_keeps_accuracy() {
    let mut p = ModelParameters::example();
    p.beta_s3 = [0.0; 3];
    p.beta_a3 = [0.0; 3];
    p.beta_a4 = [0.0; 3];
    let data = common::simulate(&p, 8, 1000, 1.0, 6);
    let config = AblationConfig {
        groups: vec![VariableGroup::Media],
        var_s_values: vec![1.0],
        fit: FitConfig { n_restarts: 3, ..FitConfig::default() },
        include_joint_removal: false,
    };
    let out = run_ablation(&data, &Hyperparameters::default(), &config).unwrap();
    let (a, b) = (out.rows[0].accuracy_mean, out.rows[1].accuracy_mean);
    println!("full {a:.4}, without media {b:.4}");
    assert!((a - b).abs() < 0.02);
}

#[test]
fn removing_everything_leaves_a_base_rate_predictor() {
    let data = common::simulate(&ModelParameters::example(), 5, 600, 1.0, 7);
    let everything = Structure::without(VariableGroup::ALL);
    let f = fit(
        &data,
        &Hyperparameters::default(),
        &everything,
        &FitConfig { var_s: 0.01, n_restarts: 3, ..FitConfig::default() },
    )
    .unwrap();
    // With sympathy pinned near zero every user is a coin with the base rate.
    let r = data.activation_rate();
    let want = r * r + (1.0 - r) * (1.0 - r);
    println!("accuracy {:.4}, base-rate predictor {want:.4}", f.accuracy());
    assert!((f.accuracy() - want).abs() < 0.02);
}

#[test]
fn identical_regimes_are_perfectly_correlated() {
    let data = common::simulate(&ModelParameters::example(), 5, 150, 1.0, 8);
    let out = run_robustness(&data, &data, &Hyperparameters::default(), &Structure::full(), &quick()).unwrap();
    assert!(out.correlation > 0.999);
    assert_eq!(out.pairs.len(), 39);
    let mut other = data.clone();
    other.users.reverse();
    assert!(run_robustness(&data, &other, &Hyperparameters::default(), &Structure::full(), &quick()).is_err());
}

#[test]
fn paired_coefficients_align_by_name() {
    let data = common::simulate(&ModelParameters::example(), 5, 100, 1.0, 9);
    let full = fit_at(&data, &Structure::full(), 1.0);
    let no_i = fit_at(&data, &Structure::without([VariableGroup::Interaction]), 1.0);
    let pairs = paired_coefficients(&full, &no_i);
    assert_eq!(pairs.len(), 32);
    for p in &pairs {
        assert_eq!(full.parameter(&p.name).unwrap().mean, p.gap_on);
        assert_eq!(no_i.parameter(&p.name).unwrap().mean, p.gap_off);
    }
}

fn two_pass_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sx += a;
        sy += b;
    }
    let (mx, my) = (sx / n, sy / n);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

proptest! {
    #[test]
    fn pearson_matches_two_pass_formula(
        pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..60)
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        prop_assume!(x.iter().any(|v| *v != x[0]) && y.iter().any(|v| *v != y[0]));
        let want = two_pass_pearson(&x, &y);
        let got = pearson(&x, &y).unwrap();
        prop_assert!((got - want).abs() < 1e-10, "{} vs {}", got, want);
        let pc: Vec<PairedCoefficient> = x
            .iter()
            .zip(&y)
            .enumerate()
            .map(|(i, (a, b))| PairedCoefficient { name: format!("c{i}"), gap_on: *a, gap_off: *b })
            .collect();
        prop_assert!((coefficient_correlation(&pc).unwrap() - got).abs() < 1e-15);
    }
}
