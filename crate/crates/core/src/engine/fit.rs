use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::engine::family::unpenalized_loss;
use crate::engine::model::{ActiveModel, Problem};
use crate::engine::{Family, SplicingConfig};
use crate::error::{Error, Result};

pub(crate) const JITTER: f64 = 1e-9;

/// Cholesky factor of `m`, retrying once with `JITTER` on the diagonal.
pub(crate) fn cholesky_with_jitter(m: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    if m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let k = m.nrows();
    Cholesky::new(m.clone()).or_else(|| Cholesky::new(m + DMatrix::identity(k, k) * JITTER))
}

/// Fits the model restricted to the columns of `active` plus an intercept.
///
/// Gaussian fits solve the ridge-adjusted normal equations directly. The
/// logistic and poisson fits run damped Newton iterations from `warm` (or
/// from the null model), halving the step until the loss does not increase.
pub fn fit_on_active(
    problem: &Problem<'_>,
    active: &[usize],
    config: &SplicingConfig,
    warm: Option<&ActiveModel>,
) -> Result<ActiveModel> {
    let groups = problem.groups;
    let mut active = active.to_vec();
    active.sort_unstable();
    active.dedup();
    if let Some(&g) = active.iter().find(|&&g| g >= groups.n_groups()) {
        return Err(Error::usage(format!("group {g} does not exist")));
    }
    if let Some(&g) = groups.nuisance().iter().find(|&&g| active.binary_search(&g).is_err()) {
        return Err(Error::usage(format!("active set is missing nuisance group {g}")));
    }
    let cols = groups.columns_of(&active);
    let xa = problem.x.gather(&cols);

    let (intercept, coef, converged) = match problem.family {
        Family::Gaussian => {
            let (b0, b) = gaussian_solve(problem, &xa, config.lambda, &active)?;
            (b0, b, true)
        }
        family => newton_solve(problem, family, &xa, &cols, config, warm, &active)?,
    };

    let n = problem.n() as f64;
    let mut beta = vec![0.0; problem.p()];
    for (&j, &b) in cols.iter().zip(coef.iter()) {
        beta[j] = b;
    }
    let eta = linear_predictor(&xa, intercept, &coef);
    let family = problem.family;
    let resid: Vec<f64> = problem.y.iter().zip(&eta).map(|(&y, &e)| y - family.mean(e)).collect();
    let grad = problem.x.xt_dot(&resid).into_iter().map(|g| g / n).collect();
    let loss = unpenalized_loss(family, problem.y, &eta) + config.lambda * coef.norm_squared();
    Ok(ActiveModel {
        active,
        beta,
        intercept,
        loss,
        grad,
        weights: eta.iter().map(|&e| family.weight(e)).collect(),
        converged,
        trace: Vec::new(),
    })
}

fn linear_predictor(xa: &DMatrix<f64>, intercept: f64, coef: &DVector<f64>) -> Vec<f64> {
    let mut eta = xa * coef;
    eta.add_scalar_mut(intercept);
    eta.data.into()
}

fn gaussian_solve(
    problem: &Problem<'_>,
    xa: &DMatrix<f64>,
    lambda: f64,
    active: &[usize],
) -> Result<(f64, DVector<f64>)> {
    let n = problem.n();
    let m = xa.ncols();
    let ybar = problem.y.iter().sum::<f64>() / n as f64;
    if m == 0 {
        return Ok((ybar, DVector::zeros(0)));
    }
    let means: Vec<f64> = (0..m).map(|k| xa.column(k).sum() / n as f64).collect();
    let mut xc = xa.clone();
    for (k, mean) in means.iter().enumerate() {
        xc.column_mut(k).add_scalar_mut(-mean);
    }
    let yc = DVector::from_iterator(n, problem.y.iter().map(|v| v - ybar));
    let mut gram = xc.tr_mul(&xc);
    for k in 0..m {
        gram[(k, k)] += 2.0 * n as f64 * lambda;
    }
    let rhs = xc.tr_mul(&yc);
    let chol = cholesky_with_jitter(gram).ok_or_else(|| {
        Error::numerical(format!("singular normal equations on active groups {active:?}"))
    })?;
    let coef = chol.solve(&rhs);
    if coef.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical(format!("non-finite solution on active groups {active:?}")));
    }
    let b0 = ybar - means.iter().zip(coef.iter()).map(|(m, b)| m * b).sum::<f64>();
    Ok((b0, coef))
}

fn newton_solve(
    problem: &Problem<'_>,
    family: Family,
    xa: &DMatrix<f64>,
    cols: &[usize],
    config: &SplicingConfig,
    warm: Option<&ActiveModel>,
    active: &[usize],
) -> Result<(f64, DVector<f64>, bool)> {
    let n = problem.n();
    let m = xa.ncols();
    let nf = n as f64;
    let y = problem.y;
    let lambda = config.lambda;

    let mut theta = DVector::zeros(m + 1);
    match warm {
        Some(w) => {
            theta[0] = w.intercept;
            for (k, &j) in cols.iter().enumerate() {
                theta[k + 1] = w.beta[j];
            }
        }
        None => theta[0] = family.null_intercept(y.iter().sum::<f64>() / nf),
    }

    let objective = |theta: &DVector<f64>| -> (f64, Vec<f64>) {
        let coef = theta.rows(1, m).into_owned();
        let eta = linear_predictor(xa, theta[0], &coef);
        (unpenalized_loss(family, y, &eta) + lambda * coef.norm_squared(), eta)
    };

    let (mut loss, mut eta) = objective(&theta);
    let mut converged = false;
    for _ in 0..config.newton_max_iter {
        // gradient and Hessian of the penalized loss in (intercept, coef)
        let mut resid = DVector::zeros(n);
        let mut zw = DMatrix::zeros(n, m + 1);
        for i in 0..n {
            resid[i] = family.mean(eta[i]) - y[i];
            let sw = family.weight(eta[i]).sqrt();
            zw[(i, 0)] = sw;
            for k in 0..m {
                zw[(i, k + 1)] = sw * xa[(i, k)];
            }
        }
        let mut grad = DVector::zeros(m + 1);
        grad[0] = resid.sum() / nf;
        if m > 0 {
            let g = xa.tr_mul(&resid) / nf;
            grad.rows_mut(1, m).copy_from(&g);
        }
        let mut hess = zw.tr_mul(&zw) / nf;
        for k in 1..=m {
            grad[k] += 2.0 * lambda * theta[k];
            hess[(k, k)] += 2.0 * lambda;
        }
        let chol = cholesky_with_jitter(hess).ok_or_else(|| {
            Error::numerical(format!("singular Hessian on active groups {active:?}"))
        })?;
        let step = chol.solve(&grad);

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=20 {
            let cand = &theta - &step * t;
            let (l, e) = objective(&cand);
            if l <= loss {
                accepted = Some((cand, l, e));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, new_loss, new_eta)) = accepted else {
            // no descent possible at working precision
            converged = true;
            break;
        };
        let change = (loss - new_loss) / loss.abs().max(f64::MIN_POSITIVE);
        theta = cand;
        loss = new_loss;
        eta = new_eta;
        if change < config.newton_tol {
            converged = true;
            break;
        }
    }
    Ok((theta[0], theta.rows(1, m).into_owned(), converged))
}
