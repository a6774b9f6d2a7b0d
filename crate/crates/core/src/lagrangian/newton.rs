//! Damped Newton iteration for the stationarity system on a fixed support:
//! `L(x_i) = c` for `i ∈ S`, `Σ_S x_i = 1`, `x_j = 0` off `S`.

use nalgebra::{DMatrix, DVector};

const MAX_STEPS: usize = 100;
const MAX_HALVINGS: usize = 40;
const NEGATIVE_TOL: f64 = 1e-10;
const CONVERGED: f64 = 1e-14;
const ACCEPTED: f64 = 1e-11;

#[derive(Debug)]
pub(crate) enum NewtonOutcome {
    /// A nonnegative stationary point on the simplex, zero off the support.
    Converged(Vec<f64>),
    /// The system converged but this support vertex came out negative.
    Negative(usize),
    Failed,
}

/// Solves from `start` (full length, only support entries are read).
/// `edges` may contain edges leaving the support; they are ignored.
pub(crate) fn solve(edges: &[Vec<usize>], n: usize, support: &[usize], start: &[f64]) -> NewtonOutcome {
    let k = support.len();
    if k == 0 {
        return NewtonOutcome::Failed;
    }
    let local = localize(edges, n, support);
    if local.is_empty() {
        return NewtonOutcome::Failed;
    }

    let s: f64 = support.iter().map(|&v| start[v]).sum();
    let mut x: Vec<f64> = if s > 0.0 {
        support.iter().map(|&v| start[v] / s).collect()
    } else {
        vec![1.0 / k as f64; k]
    };
    let mut l = vec![0.0; k];
    super::grad_raw(&local, &x, &mut l);
    let mut c = l.iter().sum::<f64>() / k as f64;

    let mut f = residual(&local, &x, c, &mut l);
    let mut merit = norm2(&f);
    for _ in 0..MAX_STEPS {
        if max_abs(&f) < CONVERGED {
            break;
        }
        let jac = jacobian(&local, &x);
        let rhs = DVector::from_iterator(k + 1, f.iter().map(|v| -v));
        let svd = jac.svd(true, true);
        let eps = 1e-13 * svd.singular_values.max();
        let Ok(step) = svd.solve(&rhs, eps) else {
            return NewtonOutcome::Failed;
        };
        if step.iter().any(|v| !v.is_finite()) {
            return NewtonOutcome::Failed;
        }
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..=MAX_HALVINGS {
            let xt: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            let ct = c + t * step[k];
            let ft = residual(&local, &xt, ct, &mut l);
            let mt = norm2(&ft);
            if mt < merit {
                x = xt;
                c = ct;
                f = ft;
                merit = mt;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if max_abs(&f) > ACCEPTED {
        return NewtonOutcome::Failed;
    }
    if let Some((a, _)) = x
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < -NEGATIVE_TOL)
        .min_by(|a, b| a.1.total_cmp(b.1))
    {
        return NewtonOutcome::Negative(support[a]);
    }
    let mut full = vec![0.0; n];
    for (a, &v) in support.iter().enumerate() {
        full[v] = x[a].max(0.0);
    }
    let s: f64 = full.iter().sum();
    full.iter_mut().for_each(|v| *v /= s);
    NewtonOutcome::Converged(full)
}

/// Edges inside `support`, renumbered by position in `support`.
fn localize(edges: &[Vec<usize>], n: usize, support: &[usize]) -> Vec<Vec<usize>> {
    let mut pos = vec![usize::MAX; n];
    for (a, &v) in support.iter().enumerate() {
        pos[v] = a;
    }
    edges
        .iter()
        .filter(|e| e.iter().all(|&v| pos[v] != usize::MAX))
        .map(|e| e.iter().map(|&v| pos[v]).collect())
        .collect()
}

/// A direction inside the face of `support`, tangent to the simplex, along
/// which `λ` curves upward at `x`; `None` when `x` is a local maximum of the
/// face to second order.
pub(crate) fn uphill_direction(edges: &[Vec<usize>], n: usize, support: &[usize], x: &[f64]) -> Option<Vec<f64>> {
    let k = support.len();
    if k < 2 {
        return None;
    }
    let local = localize(edges, n, support);
    let xs: Vec<f64> = support.iter().map(|&v| x[v]).collect();
    let h = jacobian(&local, &xs).view((0, 0), (k, k)).into_owned();
    let p = DMatrix::identity(k, k) - DMatrix::from_element(k, k, 1.0 / k as f64);
    let m = &p * h * &p;
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let eig = m.symmetric_eigen();
    let (top, &value) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if value <= 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return None;
    }
    let dir = eig.eigenvectors.column(top);
    let mut full = vec![0.0; n];
    for (a, &v) in support.iter().enumerate() {
        full[v] = dir[a];
    }
    Some(full)
}

fn residual(edges: &[Vec<usize>], x: &[f64], c: f64, l: &mut [f64]) -> Vec<f64> {
    super::grad_raw(edges, x, l);
    let mut f: Vec<f64> = l.iter().map(|v| v - c).collect();
    f.push(x.iter().sum::<f64>() - 1.0);
    f
}

/// Rows `i < k`: Hessian row of `L(x_i)` and `−1` in the `c` column.
/// Last row: the simplex constraint.
fn jacobian(edges: &[Vec<usize>], x: &[f64]) -> DMatrix<f64> {
    let k = x.len();
    let mut j = DMatrix::zeros(k + 1, k + 1);
    for e in edges {
        for (a, &u) in e.iter().enumerate() {
            for &v in &e[a + 1..] {
                let p: f64 = e.iter().filter(|&&w| w != u && w != v).map(|&w| x[w]).product();
                j[(u, v)] += p;
                j[(v, u)] += p;
            }
        }
    }
    for i in 0..k {
        j[(i, k)] = -1.0;
        j[(k, i)] = 1.0;
    }
    j
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}
