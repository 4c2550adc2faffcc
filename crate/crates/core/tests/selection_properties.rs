use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bestsubset::data::{make_folds, DesignMatrix, GroupStructure};
use bestsubset::engine::{unpenalized_loss, Family};
use bestsubset::selection::{
    cross_validate, deviance, gsection_search, path_search, select, Criterion, Dataset, IcKind, IcValues, PathEntry,
    SelectionOptions, Tuning,
};
use bestsubset::synthetic::{beta_from_entries, random_sparse_beta, simulate};

fn gaussian_instance(n: usize, p: usize, k: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta = random_sparse_beta(p, k, 1.0, 3.0, &mut rng);
    let sim = simulate(Family::Gaussian, n, &beta, 0.5, 1.0, seed).unwrap();
    Dataset::with_singletons(sim.x, sim.y).unwrap()
}

fn full_beta(p: usize, e: &PathEntry) -> Vec<f64> {
    let mut beta = vec![0.0; p];
    for (&j, &b) in e.selected.iter().zip(&e.coefficients) {
        beta[j] = b;
    }
    beta
}

fn rss(data: &Dataset, e: &PathEntry) -> f64 {
    let eta = data.x.linear_predictor(e.intercept, &full_beta(data.p(), e));
    data.y.values().iter().zip(&eta).map(|(y, f)| (y - f).powi(2)).sum()
}

fn combinations(p: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (k - 1..p)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

fn exhaustive_rss(data: &Dataset, k: usize) -> f64 {
    let n = data.n();
    combinations(data.p(), k)
        .iter()
        .map(|cols| {
            let a = nalgebra::DMatrix::from_fn(n, k + 1, |i, j| if j == 0 { 1.0 } else { data.x.get(i, cols[j - 1]) });
            let b = nalgebra::DVector::from_column_slice(data.y.values());
            let coef = a.clone().svd(true, true).solve(&b, 1e-12).unwrap();
            (b - a * coef).norm_squared()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn warm_starts_never_lose_to_cold_starts() {
    let sizes: Vec<usize> = (0..=6).collect();
    for seed in 0..100 {
        let data = gaussian_instance(60, 15, 3, seed);
        let warm = path_search(&data, &SelectionOptions::default(), Some(&sizes), IcKind::Gic).unwrap();
        for (s, e) in sizes.iter().zip(&warm.path) {
            let cold = path_search(&data, &SelectionOptions::default(), Some(&[*s]), IcKind::Gic).unwrap();
            let (w, c) = (rss(&data, e) / 120.0, rss(&data, &cold.path[0]) / 120.0);
            assert!(w <= c + 1e-10, "seed {seed} s {s}: warm {w} cold {c}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reports_are_self_consistent(seed in any::<u64>(), fam in 0u8..3, p in 3usize..12) {
        let family = [Family::Gaussian, Family::Logistic, Family::Poisson][fam as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta = random_sparse_beta(p, 2, 0.3, 1.0, &mut rng);
        let sim = simulate(family, 80, &beta, 0.1, 1.0, seed).unwrap();
        let data = Dataset::with_singletons(sim.x, sim.y).unwrap();
        let sizes: Vec<usize> = (0..=p.min(5)).collect();
        let report = path_search(&data, &SelectionOptions::default(), Some(&sizes), IcKind::Gic).unwrap();
        prop_assert_eq!(report.path.iter().map(|e| e.s).collect::<Vec<_>>(), sizes);
        for e in &report.path {
            prop_assert!(e.selected.windows(2).all(|w| w[0] < w[1]));
            let dev = deviance(family, &data.x, data.y.values(), e.intercept, &full_beta(p, e));
            prop_assert!((dev - e.deviance).abs() <= 1e-8 * dev.abs().max(1.0), "deviance {dev} vs {}", e.deviance);
            let ic = IcValues::new(e.deviance, e.selected.len(), data.n(), p);
            for kind in [IcKind::Aic, IcKind::Bic, IcKind::Gic, IcKind::Ebic] {
                let (a, b) = (ic.get(kind), e.ic.get(kind));
                prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
            }
        }
        let best = report.path.iter().map(|e| e.ic.gic).fold(f64::INFINITY, f64::min);
        let first = report.path.iter().find(|e| e.ic.gic == best).unwrap();
        prop_assert_eq!(report.chosen_s, first.s);
    }
}

/// GIC at p = 10 penalizes less than BIC, so the size check uses EBIC.
#[test]
fn information_criterion_finds_the_true_size() {
    let mut hits = 0;
    let mut oracle_agrees = 0;
    let sizes: Vec<usize> = (0..=6).collect();
    for seed in 0..100 {
        let data = gaussian_instance(100, 10, 3, seed);
        let report = path_search(&data, &SelectionOptions::default(), Some(&sizes), IcKind::Ebic).unwrap();
        let at3 = &report.path[3];
        if (rss(&data, at3) - exhaustive_rss(&data, 3)).abs() <= 1e-8 * rss(&data, at3) {
            oracle_agrees += 1;
        }
        hits += usize::from(report.chosen_s == 3);
    }
    assert!(hits >= 90, "{hits}/100 choose s = 3");
    assert!(oracle_agrees >= 90, "{oracle_agrees}/100 s = 3 fits match exhaustive search");
}

#[test]
fn single_candidate_zero_is_intercept_only() {
    let data = gaussian_instance(30, 5, 2, 1);
    let report = path_search(&data, &SelectionOptions::default(), Some(&[0]), IcKind::Bic).unwrap();
    assert_eq!(report.chosen_s, 0);
    let e = report.chosen();
    assert!(e.selected.is_empty() && e.coefficients.is_empty());
    let ybar = data.y.mean();
    assert!((e.intercept - ybar).abs() < 1e-12);
}

#[test]
fn cross_validation_is_deterministic_and_averages_folds() {
    let data = gaussian_instance(90, 12, 3, 4);
    let folds = make_folds(data.n(), 5, 9, None).unwrap();
    let sizes: Vec<usize> = (0..=5).collect();
    let a = cross_validate(&data, &SelectionOptions::default(), Some(&sizes), &folds).unwrap();
    let b = cross_validate(&data, &SelectionOptions::default(), Some(&sizes), &folds).unwrap();
    assert_eq!(a.clone().without_timing().to_json(), b.without_timing().to_json());
    for e in &a.path {
        let cv = e.cv.as_ref().unwrap();
        assert_eq!(cv.fold_losses.len(), 5);
        let mean = cv.fold_losses.iter().sum::<f64>() / 5.0;
        assert!((cv.mean - mean).abs() <= 1e-12);
    }
    assert!(matches!(a.criterion, Criterion::Cv { .. }));
}

/// Each fold loss equals the loss of a model fitted on the training rows
/// alone, so held-out rows cannot leak into the normalization.
#[test]
fn held_out_rows_do_not_touch_training_statistics() {
    let mut data = gaussian_instance(40, 6, 2, 12);
    let folds = make_folds(data.n(), 4, 3, None).unwrap();
    // one held-out row of fold 0 gets an extreme value in column 2
    let (_, test0) = folds.split(0);
    let mut rows: Vec<Vec<f64>> = (0..data.n()).map(|i| data.x.row(i)).collect();
    rows[test0[0]][2] = 500.0;
    data.x = DesignMatrix::from_rows(&rows).unwrap();

    let sizes = [0, 1, 2, 3];
    let report = cross_validate(&data, &SelectionOptions::default(), Some(&sizes), &folds).unwrap();
    for fold in 0..4 {
        let (train, test) = folds.split(fold);
        let fitted = path_search(&data.select_rows(&train).unwrap(), &SelectionOptions::default(), Some(&sizes), IcKind::Gic).unwrap();
        let tx = data.x.select_rows(&test).unwrap();
        let ty: Vec<f64> = test.iter().map(|&i| data.y.values()[i]).collect();
        for (k, e) in fitted.path.iter().enumerate() {
            let eta = tx.linear_predictor(e.intercept, &full_beta(data.p(), e));
            let want = unpenalized_loss(Family::Gaussian, &ty, &eta);
            let got = report.path[k].cv.as_ref().unwrap().fold_losses[fold];
            assert!((got - want).abs() <= 1e-10 * want.max(1.0), "fold {fold} s {}: {got} vs {want}", e.s);
        }
    }
    // the training mean of column 2 without the extreme row differs from the full mean
    let (train0, _) = folds.split(0);
    let full_mean = data.x.column_stats(2).0;
    let train_mean = data.x.select_rows(&train0).unwrap().column_stats(2).0;
    assert!((full_mean - train_mean).abs() > 1.0);
}

/// The null rate sits near 0.8; 760 of 1000 is three binomial standard
/// errors below that.
#[test]
fn pure_noise_selects_the_null_model() {
    let beta = vec![0.0; 10];
    let mut nulls = 0;
    for seed in 0..1000 {
        let sim = simulate(Family::Gaussian, 100, &beta, 0.0, 1.0, seed).unwrap();
        let data = Dataset::with_singletons(sim.x, sim.y).unwrap();
        let tuning = Tuning::Cv {
            s_list: Some((0..=5).collect()),
            folds: 5,
            seed,
        };
        let report = select(&data, &SelectionOptions::default(), &tuning).unwrap();
        nulls += usize::from(report.chosen_s == 0);
    }
    assert!(nulls >= 760, "{nulls}/1000 choose the null model");
}

#[test]
fn golden_section_solves_each_size_once() {
    for seed in 0..10 {
        let data = gaussian_instance(120, 40, 4, seed);
        let report = gsection_search(&data, &SelectionOptions::default(), 0, 30, IcKind::Gic).unwrap();
        let probed: Vec<usize> = report.path.iter().map(|e| e.s).collect();
        let mut unique = probed.clone();
        unique.dedup();
        assert_eq!(probed, unique, "seed {seed}");
        assert!(probed.len() < 31);
        assert!(report.path.iter().any(|e| e.s == report.chosen_s));
    }
}

#[test]
fn gsection_agrees_with_full_path_on_planted_signal() {
    let beta = beta_from_entries(200, &[(0, 3.0), (1, -2.0), (4, 2.0)]);
    let sim = simulate(Family::Gaussian, 300, &beta, 0.0, 1.0, 5).unwrap();
    let data = Dataset::with_singletons(sim.x, sim.y).unwrap();
    let full = path_search(&data, &SelectionOptions::default(), Some(&(0..=12).collect::<Vec<_>>()), IcKind::Gic).unwrap();
    let gs = gsection_search(&data, &SelectionOptions::default(), 0, 12, IcKind::Gic).unwrap();
    assert_eq!(full.chosen_s, gs.chosen_s);
    assert_eq!(full.chosen().selected, gs.chosen().selected);
}

#[test]
fn nuisance_columns_count_towards_degrees_of_freedom() {
    let data = gaussian_instance(50, 6, 2, 8);
    let groups = GroupStructure::singletons(6).with_always_included(&[5]).unwrap();
    let data = Dataset::new(data.x, data.y, groups).unwrap();
    let report = path_search(&data, &SelectionOptions::default(), Some(&[0, 1, 2]), IcKind::Aic).unwrap();
    for e in &report.path {
        assert!(e.selected.contains(&5));
        assert_eq!(e.selected.len(), e.s + 1);
        assert!((e.ic.aic - (e.deviance + 2.0 * (e.s + 1) as f64)).abs() < 1e-9);
    }
}
