//! Right-preconditioned BiCGSTAB with restarts on breakdown.

use super::operator::Operator;
use super::precond::Preconditioner;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOutcome {
    pub converged: bool,
    pub iterations: usize,
    /// Max norm of the true residual at exit.
    pub residual: f64,
}

const STALL_LIMIT: usize = 200;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn true_residual(op: &Operator, b: &[f64], x: &[f64], r: &mut [f64]) -> f64 {
    op.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    max_norm(r)
}

pub fn bicgstab<P: Preconditioner>(
    op: &Operator,
    m: &P,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> KrylovOutcome {
    let n = b.len();
    let mut r = vec![0.0; n];
    let mut res = true_residual(op, b, x, &mut r);
    let mut iterations = 0;
    if !res.is_finite() {
        return KrylovOutcome { converged: false, iterations, residual: res };
    }
    let (mut p, mut v, mut y, mut s, mut z, mut t) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut restarts = 0;
    // give up when the residual has not improved on its best value for a while
    let mut best = res;
    let mut since_best = 0usize;
    'outer: while res > tol && iterations < max_iter && restarts < 50 {
        let r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        p.iter_mut().for_each(|e| *e = 0.0);
        v.iter_mut().for_each(|e| *e = 0.0);
        while iterations < max_iter {
            iterations += 1;
            let rho_new = dot(&r_hat, &r);
            if rho_new == 0.0 || !rho_new.is_finite() {
                break;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            m.apply(&p, &mut y);
            op.apply(&y, &mut v);
            let denom = dot(&r_hat, &v);
            if denom == 0.0 || !denom.is_finite() {
                break;
            }
            alpha = rho_new / denom;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            if max_norm(&s) <= tol {
                for i in 0..n {
                    x[i] += alpha * y[i];
                }
                res = true_residual(op, b, x, &mut r);
                if res <= tol {
                    break 'outer;
                }
                break;
            }
            m.apply(&s, &mut z);
            op.apply(&z, &mut t);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            for i in 0..n {
                x[i] += alpha * y[i] + omega * z[i];
                r[i] = s[i] - omega * t[i];
            }
            rho = rho_new;
            let rn = max_norm(&r);
            if !rn.is_finite() {
                break;
            }
            if rn < 0.5 * best {
                best = rn;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best > STALL_LIMIT {
                    res = true_residual(op, b, x, &mut r);
                    break 'outer;
                }
            }
            if rn <= tol {
                res = true_residual(op, b, x, &mut r);
                if res <= tol {
                    break 'outer;
                }
                break;
            }
            if omega == 0.0 {
                break;
            }
        }
        restarts += 1;
        res = true_residual(op, b, x, &mut r);
        if !res.is_finite() {
            break;
        }
    }
    KrylovOutcome { converged: res <= tol, iterations, residual: res }
}
