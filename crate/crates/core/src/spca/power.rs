pub const EIG_TOL: f64 = 1e-10;
pub const EIG_MAX_ITER: usize = 10_000;

/// Dominant eigenpair of a symmetric PSD matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit norm, largest-magnitude entry positive.
    pub vector: Vec<f64>,
    /// False when the iteration cap was hit; `value` and `vector` then hold
    /// the last iterate.
    pub converged: bool,
    pub iterations: usize,
}

/// Flips `v` so its largest-magnitude entry (ties: lowest index) is positive.
pub fn apply_sign_convention(v: &mut [f64]) {
    let mut k = 0;
    for j in 1..v.len() {
        if v[j].abs() > v[k].abs() {
            k = j;
        }
    }
    if v.get(k).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Power iteration on the row-major `m x m` matrix `a`, started from `e_j`
/// with `j` the largest diagonal entry (ties: lowest index). Stops when the
/// Rayleigh quotient changes by at most `1e-10 * max(1, |lambda|)`.
pub fn leading_eig(a: &[f64], m: usize) -> EigenPair {
    assert!(m >= 1 && a.len() == m * m, "leading_eig needs a non-empty square matrix");
    let start = (0..m).fold(0, |best, j| if a[j * m + j] > a[best * m + best] { j } else { best });
    let mut v = vec![0.0; m];
    v[start] = 1.0;
    let mut lambda = a[start * m + start];
    let mut w = vec![0.0; m];
    for it in 1..=EIG_MAX_ITER {
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = a[i * m..(i + 1) * m].iter().zip(&v).map(|(x, y)| x * y).sum();
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            // v lies in the null space; a PSD matrix with this start is zero on it.
            apply_sign_convention(&mut v);
            return EigenPair {
                value: 0.0,
                vector: v,
                converged: true,
                iterations: it,
            };
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        let next = rayleigh(a, m, &v);
        let done = (next - lambda).abs() <= EIG_TOL * next.abs().max(1.0);
        lambda = next;
        if done {
            apply_sign_convention(&mut v);
            return EigenPair {
                value: lambda,
                vector: v,
                converged: true,
                iterations: it,
            };
        }
    }
    apply_sign_convention(&mut v);
    EigenPair {
        value: lambda,
        vector: v,
        converged: false,
        iterations: EIG_MAX_ITER,
    }
}

fn rayleigh(a: &[f64], m: usize, v: &[f64]) -> f64 {
    (0..m)
        .map(|i| v[i] * a[i * m..(i + 1) * m].iter().zip(v).map(|(x, y)| x * y).sum::<f64>())
        .sum()
}
