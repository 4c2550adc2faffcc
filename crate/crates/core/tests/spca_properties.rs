use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bestsubset::data::{normalize, ResponseVector};
use bestsubset::engine::Family;
use bestsubset::spca::{leading_eig, spca_components, spca_fixed_support, spca_path, CovarianceView, SpcaConfig};
use bestsubset::synthetic::{random_psd, standard_normal_design};

fn eigenvalues_desc(cov: &CovarianceView) -> Vec<f64> {
    let p = cov.p();
    let m = DMatrix::from_fn(p, p, |i, j| cov.get(i, j));
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn psd(p: usize, seed: u64) -> CovarianceView {
    CovarianceView::from_rows(&random_psd(p, seed)).unwrap()
}

#[test]
fn covariance_matches_brute_force() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = standard_normal_design(30, 6, &mut rng).unwrap();
        let cov = CovarianceView::from_data(&x).unwrap();
        let n = x.n() as f64;
        let m = DMatrix::from_fn(x.n(), x.p(), |i, j| x.get(i, j));
        let means = m.row_mean();
        let c = DMatrix::from_fn(x.n(), x.p(), |i, j| m[(i, j)] - means[j]);
        let want = c.transpose() * &c / n;
        for i in 0..6 {
            for j in 0..6 {
                let (a, b) = (cov.get(i, j), want[(i, j)]);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "seed {seed} ({i},{j}): {a} vs {b}");
            }
        }
    }
}

#[test]
fn standardized_design_has_unit_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = standard_normal_design(50, 5, &mut rng).unwrap();
    let y = ResponseVector::new(vec![0.0; 50], Family::Gaussian).unwrap();
    let (xs, _, _) = normalize(&x, &y).unwrap();
    let cov = CovarianceView::from_data(&xs).unwrap();
    for d in cov.diagonal() {
        assert!((d - 1.0).abs() <= 1e-10, "{d}");
    }
}

#[test]
fn leading_eigenpair_matches_dense_solver() {
    for seed in 0..50 {
        let cov = psd(8, seed);
        let e = leading_eig(&cov.principal(&(0..8).collect::<Vec<_>>()), 8);
        assert!(e.converged);
        let lambda = eigenvalues_desc(&cov)[0];
        assert!((e.value - lambda).abs() <= 1e-8 * lambda, "seed {seed}: {} vs {lambda}", e.value);
        let norm = e.vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-12);
        let av = cov.mul_vec(&e.vector);
        let residual = av.iter().zip(&e.vector).map(|(a, v)| (a - e.value * v).powi(2)).sum::<f64>().sqrt();
        assert!(residual <= 1e-4 * lambda, "seed {seed}: residual {residual}");
    }
}

#[test]
fn full_cardinality_explains_the_top_eigenvalue() {
    for seed in 0..20 {
        let cov = psd(7, seed);
        let l = spca_fixed_support(&cov, 7, &SpcaConfig::default(), None).unwrap();
        let lambda = eigenvalues_desc(&cov)[0];
        assert!((l.explained_variance - lambda).abs() <= 1e-8 * lambda);
    }
}

#[test]
fn deflated_matrix_annihilates_the_loading() {
    for seed in 0..20 {
        let cov = psd(8, seed);
        let l = spca_fixed_support(&cov, 3, &SpcaConfig::default(), None).unwrap();
        let d = cov.deflate(&l.loading).unwrap();
        let scale = eigenvalues_desc(&cov)[0];
        assert!(d.quadratic_form(&l.loading).abs() <= 1e-12 * scale);
        assert!(eigenvalues_desc(&d).iter().all(|&v| v >= -1e-10 * scale));
    }
}

#[test]
fn two_components_stay_below_the_top_two_eigenvalues() {
    for seed in 0..30 {
        let cov = psd(8, seed);
        let comps = spca_components(&cov, 3, 2, &SpcaConfig::default()).unwrap();
        let ev = eigenvalues_desc(&cov);
        let total = comps[0].explained_variance + comps[1].explained_variance;
        assert!(total <= (ev[0] + ev[1]) * (1.0 + 1e-10), "seed {seed}: {total} vs {}", ev[0] + ev[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn loadings_are_unit_and_exactly_sparse(seed in any::<u64>(), p in 2usize..12, s_frac in 0.0f64..1.0) {
        let cov = psd(p, seed);
        let s = 1 + ((p - 1) as f64 * s_frac) as usize;
        let l = spca_fixed_support(&cov, s, &SpcaConfig::default(), None).unwrap();
        prop_assert_eq!(l.support.len(), s);
        prop_assert!(l.support.windows(2).all(|w| w[0] < w[1]));
        let norm = l.loading.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        for (j, v) in l.loading.iter().enumerate() {
            if !l.support.contains(&j) {
                prop_assert_eq!(*v, 0.0);
            }
        }
        prop_assert!(l.trace.windows(2).all(|w| w[1] > w[0]));
        let last = *l.trace.last().unwrap();
        prop_assert!((last - l.explained_variance).abs() <= 1e-8 * last.max(1.0));
    }

    #[test]
    fn path_is_monotone_bounded_and_beats_cold_solves(seed in any::<u64>(), p in 2usize..12) {
        let cov = psd(p, seed);
        let sizes: Vec<usize> = (1..=p).collect();
        let config = SpcaConfig::default();
        let path = spca_path(&cov, &sizes, &config).unwrap();
        let lambda = eigenvalues_desc(&cov)[0];
        prop_assert!(path.ev_curve[0] >= 0.0);
        prop_assert!(path.ev_curve.windows(2).all(|w| w[0] <= w[1] + 1e-12 * lambda));
        prop_assert!(path.ev_curve.iter().all(|&v| v <= lambda * (1.0 + 1e-8)));
        for (&s, &ev) in sizes.iter().zip(&path.ev_curve) {
            let cold = spca_fixed_support(&cov, s, &config, None).unwrap();
            prop_assert!(ev >= cold.explained_variance - 1e-10 * lambda, "s {}: {} < {}", s, ev, cold.explained_variance);
        }
    }

    #[test]
    fn relabelling_columns_relabels_the_support(seed in any::<u64>(), p in 2usize..=10, s_frac in 0.0f64..1.0) {
        let cov = psd(p, seed);
        let s = 1 + ((p - 1) as f64 * s_frac) as usize;
        let mut perm: Vec<usize> = (0..p).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
        // permuted[i][j] = S[perm[i]][perm[j]]
        let rows: Vec<Vec<f64>> = (0..p).map(|i| (0..p).map(|j| cov.get(perm[i], perm[j])).collect()).collect();
        let permuted = CovarianceView::from_rows(&rows).unwrap();
        let a = spca_fixed_support(&cov, s, &SpcaConfig::default(), None).unwrap();
        let b = spca_fixed_support(&permuted, s, &SpcaConfig::default(), None).unwrap();
        let mut mapped: Vec<usize> = b.support.iter().map(|&i| perm[i]).collect();
        mapped.sort_unstable();
        prop_assert_eq!(&mapped, &a.support);
        prop_assert!((a.explained_variance - b.explained_variance).abs() <= 1e-10 * a.explained_variance.max(1.0));
    }
}
