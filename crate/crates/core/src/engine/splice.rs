use crate::engine::fit::fit_on_active;
use crate::engine::model::{ActiveModel, Problem};
use crate::engine::sacrifice::compute_sacrifices;
use crate::engine::SplicingConfig;
use crate::error::{Error, Result};

/// One splicing pass.
///
/// Sacrifices are computed once at `state`. For `k = 1, 2, ...` the `k`
/// cheapest active groups are exchanged for the `k` most promising inactive
/// groups and the model is refitted; the first exchange whose loss drops by
/// more than `tau` is returned together with `true`.
pub fn splice_once(
    state: &ActiveModel,
    config: &SplicingConfig,
    problem: &Problem<'_>,
) -> Result<(ActiveModel, bool)> {
    let groups = problem.groups;
    let selected = state.selected_groups(groups);
    let s = selected.len();
    let inactive = groups.n_groups() - state.active.len();
    let k_limit = config.effective_k_max().min(s).min(inactive);
    if k_limit == 0 {
        return Ok((state.clone(), false));
    }
    let tau = config.with_support_size(s).tau(problem.n(), problem.p());
    let table = compute_sacrifices(state, problem, config.lambda)?;
    let drop_order = table.backward_order();
    let add_order = table.forward_order();

    for k in 1..=k_limit {
        let mut candidate: Vec<usize> = state
            .active
            .iter()
            .copied()
            .filter(|g| !drop_order[..k].contains(g))
            .collect();
        candidate.extend_from_slice(&add_order[..k]);
        let refit = fit_on_active(problem, &candidate, config, Some(state))?;
        if state.loss - refit.loss > tau {
            return Ok((refit, true));
        }
    }
    Ok((state.clone(), false))
}

/// Best-subset solve at a fixed support size.
///
/// The starting set is the nuisance groups plus either an adapted warm start
/// (grown by forward or shrunk by backward sacrifice) or, cold, the `s` groups
/// with the largest forward sacrifice at the nuisance-only fit. Splicing then
/// runs until neither a ranked exchange nor (within budget) any single
/// exchange is accepted, or `max_splice_iter` passes were made;
/// hitting the cap clears `converged`.
pub fn solve_fixed_support(
    problem: &Problem<'_>,
    config: &SplicingConfig,
    warm: Option<&ActiveModel>,
) -> Result<ActiveModel> {
    config.validate()?;
    let groups = problem.groups;
    let s = config.support_size;
    if s > groups.n_selectable() {
        return Err(Error::usage(format!(
            "support size {s} exceeds the {} selectable groups",
            groups.n_selectable()
        )));
    }
    let nuisance = groups.nuisance().to_vec();

    let mut start = match warm {
        Some(w) => adapt_warm_start(w, problem, config, s)?,
        None => {
            let base = fit_on_active(problem, &nuisance, config, None)?;
            if s == 0 {
                let mut base = base;
                base.trace = vec![base.loss];
                return Ok(base);
            }
            let table = compute_sacrifices(&base, problem, config.lambda)?;
            table.forward_order()[..s].to_vec()
        }
    };
    start.extend_from_slice(&nuisance);

    let mut state = fit_on_active(problem, &start, config, warm)?;
    let mut trace = vec![state.loss];
    let mut fixed_point = false;
    for _ in 0..config.max_splice_iter {
        let next = match splice_once(&state, config, problem)? {
            (next, true) => next,
            _ => match best_single_swap(&state, config, problem)? {
                Some(next) => next,
                None => {
                    fixed_point = true;
                    break;
                }
            },
        };
        state = next;
        trace.push(state.loss);
    }
    state.converged &= fixed_point;
    state.trace = trace;
    Ok(state)
}

/// The best exchange of one selected group for one inactive group, if it
/// lowers the loss by more than `tau` and the exchange count is within
/// `swap_check_budget`. Ties go to the earliest (dropped, added) pair.
fn best_single_swap(
    state: &ActiveModel,
    config: &SplicingConfig,
    problem: &Problem<'_>,
) -> Result<Option<ActiveModel>> {
    let groups = problem.groups;
    let selected = state.selected_groups(groups);
    let inactive: Vec<usize> = (0..groups.n_groups()).filter(|&g| !state.is_active(g)).collect();
    let count = selected.len() * inactive.len();
    if count == 0 || count > config.swap_check_budget {
        return Ok(None);
    }
    let tau = config.with_support_size(selected.len()).tau(problem.n(), problem.p());
    let mut best: Option<ActiveModel> = None;
    for &out in &selected {
        for &inn in &inactive {
            let mut candidate: Vec<usize> = state.active.iter().copied().filter(|&g| g != out).collect();
            candidate.push(inn);
            let refit = fit_on_active(problem, &candidate, config, Some(state))?;
            let bar = best.as_ref().map_or(state.loss - tau, |b| b.loss);
            if refit.loss < bar {
                best = Some(refit);
            }
        }
    }
    Ok(best)
}

/// Selected groups of `warm` resized to `s` by sacrifice ranking.
fn adapt_warm_start(
    warm: &ActiveModel,
    problem: &Problem<'_>,
    config: &SplicingConfig,
    s: usize,
) -> Result<Vec<usize>> {
    let groups = problem.groups;
    let mut selected = warm.selected_groups(groups);
    if selected.len() == s {
        return Ok(selected);
    }
    let table = compute_sacrifices(warm, problem, config.lambda)?;
    if selected.len() < s {
        let need = s - selected.len();
        selected.extend(table.forward_order().into_iter().take(need));
    } else {
        let drop: Vec<usize> = table.backward_order().into_iter().take(selected.len() - s).collect();
        selected.retain(|g| !drop.contains(g));
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DesignMatrix, GroupStructure};
    use crate::engine::Family;

    fn hadamard8() -> DesignMatrix {
        // columns 1..=7 of the 8x8 Sylvester Hadamard matrix: orthonormal, centered
        let mut rows = Vec::new();
        for i in 0..8u32 {
            rows.push((1..8u32).map(|j| if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 }).collect());
        }
        DesignMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn empty_support_is_intercept_only() {
        let x = hadamard8();
        let y: Vec<f64> = (0..8).map(|i| i as f64 * 0.5 - 1.0).collect();
        let g = GroupStructure::singletons(7);
        let prob = Problem::from_parts(&x, &y, Family::Gaussian, &g).unwrap();
        let fit = solve_fixed_support(&prob, &SplicingConfig::default(), None).unwrap();
        assert!(fit.beta.iter().all(|&b| b == 0.0));
        let ybar = y.iter().sum::<f64>() / 8.0;
        let expect = y.iter().map(|v| (v - ybar).powi(2)).sum::<f64>() / 16.0;
        assert!((fit.loss - expect).abs() < 1e-14);
        assert_eq!(fit.trace, vec![fit.loss]);
    }

    #[test]
    fn orthonormal_design_picks_marginal_top_s() {
        let x = hadamard8();
        let y = [0.3, -1.05, 2.2, 0.7, -0.4, 1.9, -2.5, 0.1];
        let g = GroupStructure::singletons(7);
        let prob = Problem::from_parts(&x, &y, Family::Gaussian, &g).unwrap();
        let scores: Vec<f64> = x.xt_dot(&y).iter().map(|v| v.abs()).collect();
        let mut order: Vec<usize> = (0..7).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        for s in 1..=6 {
            let cfg = SplicingConfig::default().with_support_size(s);
            let fit = solve_fixed_support(&prob, &cfg, None).unwrap();
            let mut expect = order[..s].to_vec();
            expect.sort_unstable();
            assert_eq!(fit.active, expect, "s = {s}");
            assert!(fit.converged);
            let (again, improved) = splice_once(&fit, &cfg, &prob).unwrap();
            assert!(!improved);
            assert_eq!(again, fit);
        }
    }

    #[test]
    fn huge_threshold_blocks_every_swap() {
        let x = hadamard8();
        let y = [0.3, -1.05, 2.2, 0.7, -0.4, 1.9, -2.5, 0.1];
        let g = GroupStructure::singletons(7);
        let prob = Problem::from_parts(&x, &y, Family::Gaussian, &g).unwrap();
        let cfg = SplicingConfig {
            tau_const: 1e12,
            ..SplicingConfig::default().with_support_size(2)
        };
        let start = fit_on_active(&prob, &[5, 6], &cfg, None).unwrap();
        let (_, improved) = splice_once(&start, &cfg, &prob).unwrap();
        assert!(!improved);
    }

    #[test]
    fn support_size_bounds() {
        let x = hadamard8();
        let y = [0.0; 8];
        let g = GroupStructure::new((0..7).collect(), vec![0, 1]).unwrap();
        let prob = Problem::from_parts(&x, &y, Family::Gaussian, &g).unwrap();
        let cfg = SplicingConfig::default().with_support_size(6);
        assert!(matches!(solve_fixed_support(&prob, &cfg, None), Err(Error::Usage(_))));
        let fit = solve_fixed_support(&prob, &cfg.with_support_size(2), None).unwrap();
        assert!(fit.is_active(0) && fit.is_active(1));
        assert_eq!(fit.active.len(), 4);
    }
}
