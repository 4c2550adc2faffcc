use nalgebra::{DMatrix, DVector};

use crate::engine::fit::{cholesky_with_jitter, JITTER};
use crate::engine::model::{ActiveModel, Problem};
use crate::error::{Error, Result};

/// Estimated loss changes of the candidate swap moves.
#[derive(Debug, Clone, PartialEq)]
pub struct SacrificeTable {
    /// `(group, xi)` for every active non-nuisance group, ascending by group.
    pub xi: Vec<(usize, f64)>,
    /// `(group, zeta)` for every inactive group, ascending by group.
    pub zeta: Vec<(usize, f64)>,
}

impl SacrificeTable {
    /// Active groups ordered by increasing backward sacrifice (ties: lower id).
    pub fn backward_order(&self) -> Vec<usize> {
        let mut v = self.xi.clone();
        v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        v.into_iter().map(|(g, _)| g).collect()
    }

    /// Inactive groups ordered by decreasing forward sacrifice (ties: lower id).
    pub fn forward_order(&self) -> Vec<usize> {
        let mut v = self.zeta.clone();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v.into_iter().map(|(g, _)| g).collect()
    }
}

/// Backward and forward sacrifices from the quadratic model of the loss.
///
/// With `H_G = X_G^T W X_G / n + 2 lambda I` an active group costs
/// `xi = beta_G^T H_G beta_G / 2` to drop and an inactive group gains
/// `zeta = d_G^T H_G^{-1} d_G / 2` when added. Blocks are formed one group at
/// a time; the full Hessian is never built.
pub fn compute_sacrifices(
    state: &ActiveModel,
    problem: &Problem<'_>,
    lambda: f64,
) -> Result<SacrificeTable> {
    let groups = problem.groups;
    let n = problem.n() as f64;
    let w = &state.weights;
    let mut xi = Vec::new();
    let mut zeta = Vec::new();
    let mut col = vec![0.0; problem.n()];
    for g in 0..groups.n_groups() {
        if groups.is_nuisance(g) {
            continue;
        }
        let active = state.is_active(g);
        let members = groups.members(g);
        let value = if let [j] = *members {
            problem.x.column_into(j, &mut col);
            let mut h = col.iter().zip(w).map(|(x, w)| w * x * x).sum::<f64>() / n + 2.0 * lambda;
            if !(h > 0.0) {
                h += JITTER;
            }
            if !(h > 0.0) {
                return Err(Error::numerical(format!("zero curvature for group {g}")));
            }
            if active {
                scalar_backward(h, state.beta[j])
            } else {
                scalar_forward(h, state.grad[j])
            }
        } else {
            let xg = problem.x.gather(members);
            let mut xw = xg.clone();
            for (i, &wi) in w.iter().enumerate() {
                xw.row_mut(i).scale_mut(wi);
            }
            let mut h: DMatrix<f64> = xg.tr_mul(&xw) / n;
            for k in 0..members.len() {
                h[(k, k)] += 2.0 * lambda;
            }
            if active {
                let b = DVector::from_iterator(members.len(), members.iter().map(|&j| state.beta[j]));
                0.5 * (b.transpose() * &h * &b)[(0, 0)]
            } else {
                let d = DVector::from_iterator(members.len(), members.iter().map(|&j| state.grad[j]));
                let chol = cholesky_with_jitter(h)
                    .ok_or_else(|| Error::numerical(format!("singular Hessian block for group {g}")))?;
                0.5 * d.dot(&chol.solve(&d))
            }
        };
        if active {
            xi.push((g, value));
        } else {
            zeta.push((g, value));
        }
    }
    Ok(SacrificeTable { xi, zeta })
}

/// `h * beta^2 / 2`
#[inline]
pub fn scalar_backward(h: f64, beta: f64) -> f64 {
    0.5 * h * beta * beta
}

/// `d^2 / (2 h)`
#[inline]
pub fn scalar_forward(h: f64, d: f64) -> f64 {
    d * d / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DesignMatrix, GroupStructure};
    use crate::engine::fit::fit_on_active;
    use crate::engine::{Family, SplicingConfig};

    /// Columns of a scaled 4x4 Hadamard matrix: X^T X / n = I.
    fn orthonormal() -> DesignMatrix {
        DesignMatrix::from_rows(&[
            vec![1.0, 1.0, 1.0],
            vec![-1.0, 1.0, -1.0],
            vec![1.0, -1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn orthonormal_design_gives_half_squares() {
        let x = orthonormal();
        let y = [3.0, -1.0, 2.0, 0.5];
        let g = GroupStructure::singletons(3);
        let prob = Problem::from_parts(&x, &y, Family::Gaussian, &g).unwrap();
        let fit = fit_on_active(&prob, &[0, 2], &SplicingConfig::default(), None).unwrap();
        let t = compute_sacrifices(&fit, &prob, 0.0).unwrap();
        for &(j, xi) in &t.xi {
            assert!((xi - fit.beta[j] * fit.beta[j] / 2.0).abs() < 1e-14);
        }
        for &(j, zeta) in &t.zeta {
            assert!((zeta - fit.grad[j] * fit.grad[j] / 2.0).abs() < 1e-14);
        }
        assert_eq!(t.xi.iter().map(|e| e.0).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(t.zeta.iter().map(|e| e.0).collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn perfect_fit_has_zero_forward_sacrifice() {
        let x = orthonormal();
        let y: Vec<f64> = (0..4).map(|i| 1.0 + 2.0 * x.get(i, 0)).collect();
        let g = GroupStructure::singletons(3);
        let prob = Problem::from_parts(&x, &y, Family::Gaussian, &g).unwrap();
        let fit = fit_on_active(&prob, &[0], &SplicingConfig::default(), None).unwrap();
        let t = compute_sacrifices(&fit, &prob, 0.0).unwrap();
        assert!(t.zeta.iter().all(|&(_, z)| z.abs() < 1e-28));
    }

    #[test]
    fn group_blocks_with_nuisance() {
        let x = DesignMatrix::from_rows(&[
            vec![1.0, 0.5, -1.0, 2.0],
            vec![0.0, 1.5, 1.0, -1.0],
            vec![2.0, -0.5, 0.0, 0.5],
            vec![-1.0, 1.0, 2.0, 1.0],
            vec![0.5, 0.0, -2.0, -0.5],
        ])
        .unwrap();
        let y = [1.0, -2.0, 0.5, 3.0, -1.0];
        let g = GroupStructure::new(vec![0, 0, 1, 2], vec![2]).unwrap();
        let prob = Problem::from_parts(&x, &y, Family::Gaussian, &g).unwrap();
        let fit = fit_on_active(&prob, &[0, 2], &SplicingConfig::default(), None).unwrap();
        let t = compute_sacrifices(&fit, &prob, 0.1).unwrap();
        assert_eq!(t.xi.len(), 1);
        assert_eq!(t.zeta.len(), 1);
        assert_eq!(t.xi[0].0, 0);
        assert_eq!(t.zeta[0].0, 1);
        assert!(t.xi[0].1 > 0.0 && t.zeta[0].1 >= 0.0);
    }

    #[test]
    fn orderings_break_ties_by_id() {
        let t = SacrificeTable {
            xi: vec![(1, 0.5), (3, 0.2), (4, 0.2)],
            zeta: vec![(0, 1.0), (2, 3.0), (5, 3.0)],
        };
        assert_eq!(t.backward_order(), vec![3, 4, 1]);
        assert_eq!(t.forward_order(), vec![2, 5, 0]);
    }
}
