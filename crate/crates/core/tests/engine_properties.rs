use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use bestsubset::data::{normalize, DesignMatrix, GroupStructure, ResponseVector};
use bestsubset::engine::sacrifice::{scalar_backward, scalar_forward};
use bestsubset::engine::{compute_sacrifices, fit_on_active, solve_fixed_support, splice_once, Family, Problem, SplicingConfig};
use bestsubset::selection::{path_search, Dataset, IcKind, SelectionOptions};
use bestsubset::synthetic::{random_sparse_beta, simulate, standard_normal_design};

struct Normalized {
    x: DesignMatrix,
    y: ResponseVector,
    groups: GroupStructure,
}

impl Normalized {
    fn new(x: &DesignMatrix, y: &ResponseVector, groups: GroupStructure) -> Self {
        let (x, y, _) = normalize(x, y).unwrap();
        Normalized { x, y, groups }
    }

    fn problem(&self) -> Problem<'_> {
        Problem::new(&self.x, &self.y, &self.groups).unwrap()
    }
}

fn instance(family: Family, n: usize, p: usize, k: usize, seed: u64) -> Normalized {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta = random_sparse_beta(p, k, 0.5, 1.5, &mut rng);
    let sim = simulate(family, n, &beta, 0.2, 1.0, seed).unwrap();
    Normalized::new(&sim.x, &sim.y, GroupStructure::singletons(p))
}

/// Infimum of the unpenalized loss over all linear predictors.
fn saturated_loss(family: Family, y: &[f64]) -> f64 {
    let point = |y: f64| match family {
        Family::Poisson if y > 0.0 => y - y * y.ln(),
        _ => 0.0,
    };
    y.iter().map(|&v| point(v)).sum::<f64>() / y.len() as f64
}

fn family_of(k: u8) -> Family {
    [Family::Gaussian, Family::Logistic, Family::Poisson][k as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn accepted_losses_fall_by_more_than_tau(seed in any::<u64>(), fam in 0u8..3, s in 1usize..5) {
        let data = instance(family_of(fam), 80, 15, 3, seed);
        let prob = data.problem();
        let cfg = SplicingConfig::default().with_support_size(s);
        let tau = cfg.tau(prob.n(), prob.p());
        let fit = solve_fixed_support(&prob, &cfg, None).unwrap();
        for w in fit.trace.windows(2) {
            prop_assert!(w[0] - w[1] > tau, "{} -> {} with tau {tau}", w[0], w[1]);
        }
        let bound = ((fit.trace[0] - saturated_loss(prob.family, prob.y)) / tau).ceil() as usize;
        prop_assert!(fit.splices() <= bound);
        prop_assert_eq!(fit.active.len(), s);
    }

    #[test]
    fn coefficients_vanish_exactly_off_support(seed in any::<u64>(), fam in 0u8..3, s in 0usize..6) {
        let data = instance(family_of(fam), 60, 12, 3, seed);
        let prob = data.problem();
        let fit = solve_fixed_support(&prob, &SplicingConfig::default().with_support_size(s), None).unwrap();
        for (j, b) in fit.beta.iter().enumerate() {
            if !fit.is_active(j) {
                prop_assert_eq!(b.to_bits(), 0.0f64.to_bits());
            }
        }
    }

    #[test]
    fn singleton_sacrifices_equal_scalar_formulas(seed in any::<u64>(), fam in 0u8..3) {
        let data = instance(family_of(fam), 40, 8, 2, seed);
        let prob = data.problem();
        let state = fit_on_active(&prob, &[1, 4, 6], &SplicingConfig::default(), None).unwrap();
        let table = compute_sacrifices(&state, &prob, 0.0).unwrap();
        let n = prob.n() as f64;
        let h = |j: usize| data.x.column(j).iter().zip(&state.weights).map(|(x, w)| w * x * x).sum::<f64>() / n;
        for &(g, xi) in &table.xi {
            prop_assert_eq!(xi.to_bits(), scalar_backward(h(g), state.beta[g]).to_bits());
        }
        for &(g, zeta) in &table.zeta {
            prop_assert_eq!(zeta.to_bits(), scalar_forward(h(g), state.grad[g]).to_bits());
        }
        prop_assert!(table.xi.iter().chain(&table.zeta).all(|(_, v)| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn rescaling_a_column_rescales_its_coefficient(seed in any::<u64>(), col in 0usize..10, c in 0.01f64..100.0) {
        let beta = {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_sparse_beta(10, 3, 0.5, 2.0, &mut rng)
        };
        let sim = simulate(Family::Gaussian, 70, &beta, 1.0, 1.0, seed).unwrap();
        let rows: Vec<Vec<f64>> = (0..sim.x.n()).map(|i| sim.x.row(i)).collect();
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| {
            let mut r = r.clone();
            r[col] *= c;
            r
        }).collect();
        let run = |rows: &[Vec<f64>]| {
            let data = Dataset::with_singletons(DesignMatrix::from_rows(rows).unwrap(), sim.y.clone()).unwrap();
            path_search(&data, &SelectionOptions::default(), Some(&[3]), IcKind::Gic).unwrap()
        };
        let (a, b) = (run(&rows), run(&scaled));
        let (ea, eb) = (a.chosen(), b.chosen());
        prop_assert_eq!(&ea.selected, &eb.selected);
        for (k, &j) in ea.selected.iter().enumerate() {
            let want = if j == col { ea.coefficients[k] / c } else { ea.coefficients[k] };
            prop_assert!((eb.coefficients[k] - want).abs() <= 1e-8 * want.abs().max(1.0), "column {j}: {} vs {want}", eb.coefficients[k]);
        }
    }

    #[test]
    fn nuisance_groups_stay_active(seed in any::<u64>(), fam in 0u8..3, s in 0usize..4, nuisance_mask in 0u32..(1 << 6)) {
        // six groups over twelve columns, some of them forced in
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = standard_normal_design(90, 12, &mut rng).unwrap();
        let beta: Vec<f64> = (0..12).map(|j| if j % 5 == 0 { 1.0 } else { 0.0 }).collect();
        let sim = bestsubset::synthetic::simulate_response(family_of(fam), &x, &beta, 0.0, 1.0, &mut rng).unwrap();
        let nuisance: Vec<usize> = (0..6).filter(|g| nuisance_mask & (1 << g) != 0).collect();
        let s = s.min(6 - nuisance.len());
        let groups = GroupStructure::new((0..12).map(|j| j / 2).collect(), nuisance.clone()).unwrap();
        let data = Normalized::new(&x, &sim, groups);
        let prob = data.problem();
        let mut warm = None;
        for size in 0..=s {
            let fit = solve_fixed_support(&prob, &SplicingConfig::default().with_support_size(size), warm.as_ref()).unwrap();
            for g in &nuisance {
                prop_assert!(fit.is_active(*g));
            }
            prop_assert_eq!(fit.active.len(), size + nuisance.len());
            warm = Some(fit);
        }
    }

    #[test]
    fn fixed_points_are_stationary_on_their_support(seed in any::<u64>(), fam in 0u8..3, s in 1usize..5) {
        let data = instance(family_of(fam), 120, 10, 3, seed);
        let prob = data.problem();
        let fit = solve_fixed_support(&prob, &SplicingConfig::default().with_support_size(s), None).unwrap();
        prop_assume!(fit.converged);
        let norm = fit.active.iter().map(|&j| fit.grad[j] * fit.grad[j]).sum::<f64>().sqrt();
        prop_assert!(norm <= 1e-6, "restricted gradient norm {norm}");
    }
}

/// Tries every exchange of one active group for one inactive group.
#[test]
fn converged_states_admit_no_improving_single_swap() {
    let mut checked = 0;
    for seed in 0..60 {
        let fam = family_of(seed as u8);
        let p = 20 + (seed as usize % 11);
        let data = instance(fam, 100, p, 3, seed);
        let prob = data.problem();
        let cfg = SplicingConfig::default().with_support_size(3);
        let tau = cfg.tau(prob.n(), prob.p());
        let fit = solve_fixed_support(&prob, &cfg, None).unwrap();
        if !fit.converged {
            continue;
        }
        checked += 1;
        for &out in &fit.active {
            for inn in (0..p).filter(|j| !fit.is_active(*j)) {
                let mut cand: Vec<usize> = fit.active.iter().copied().filter(|&g| g != out).collect();
                cand.push(inn);
                let refit = fit_on_active(&prob, &cand, &cfg, None).unwrap();
                assert!(
                    fit.loss - refit.loss <= tau,
                    "seed {seed}: swapping {out} for {inn} drops the loss by {} > tau {tau}",
                    fit.loss - refit.loss
                );
            }
        }
    }
    assert!(checked >= 50, "only {checked} converged instances");
}

/// Loss of the gaussian fit on `active` minus the loss on all of `base`.
fn drop_increase(prob: &Problem<'_>, base: &[usize], j: usize, base_loss: f64) -> f64 {
    let rest: Vec<usize> = base.iter().copied().filter(|&g| g != j).collect();
    fit_on_active(prob, &rest, &SplicingConfig::default(), None).unwrap().loss - base_loss
}

fn ranks(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    idx
}

#[test]
fn backward_sacrifice_ranks_like_exact_refits() {
    let active = [0, 1, 2, 3];
    let mut separated = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = standard_normal_design(50, 6, &mut rng).unwrap();
        let beta = [4.0, -2.0, 1.0, 0.5, 0.0, 0.0];
        let y: Vec<f64> = (0..50)
            .map(|i| (0..6).map(|j| x.get(i, j) * beta[j]).sum::<f64>() + 0.1 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let data = Normalized::new(&x, &ResponseVector::new(y, Family::Gaussian).unwrap(), GroupStructure::singletons(6));
        let prob = data.problem();
        let state = fit_on_active(&prob, &active, &SplicingConfig::default(), None).unwrap();
        let table = compute_sacrifices(&state, &prob, 0.0).unwrap();
        let xi: Vec<f64> = table.xi.iter().map(|(_, v)| *v).collect();
        let exact: Vec<f64> = active.iter().map(|&j| drop_increase(&prob, &active, j, state.loss)).collect();
        let mut sorted = exact.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).all(|w| w[1] > 1.5 * w[0]) {
            separated += 1;
            assert_eq!(ranks(&xi), ranks(&exact), "seed {seed}: xi {xi:?} exact {exact:?}");
        }
    }
    assert!(separated >= 50, "only {separated} well-separated instances");
}

#[test]
fn one_splice_replaces_a_proxy_by_the_true_column() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 60;
    let x0: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let x1: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let x2: Vec<f64> = x0.iter().zip(&x1).map(|(a, b)| 0.9 * a + 0.5 * b).collect();
    let y: Vec<f64> = x0.iter().map(|a| a + 0.1 * rng.sample::<f64, _>(StandardNormal)).collect();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![x0[i], x1[i], x2[i]]).collect();
    let x = DesignMatrix::from_rows(&rows).unwrap();
    let data = Normalized::new(&x, &ResponseVector::new(y, Family::Gaussian).unwrap(), GroupStructure::singletons(3));
    let prob = data.problem();
    let cfg = SplicingConfig::default().with_support_size(1);

    let losses: Vec<f64> = (0..3).map(|j| fit_on_active(&prob, &[j], &cfg, None).unwrap().loss).collect();
    let best = (0..3).min_by(|&a, &b| losses[a].total_cmp(&losses[b])).unwrap();
    assert_eq!(best, 0);

    // the ranked exchange prefers column 1 given the residual of column 2
    let start = fit_on_active(&prob, &[2], &cfg, None).unwrap();
    let (_, improved) = splice_once(&start, &cfg, &prob).unwrap();
    assert!(!improved);
    let fit = solve_fixed_support(&prob, &cfg, Some(&start)).unwrap();
    assert_eq!(fit.splices(), 1);
    assert_eq!(fit.active, vec![0]);
    assert!(fit.converged);
}
