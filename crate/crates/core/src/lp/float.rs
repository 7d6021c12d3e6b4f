//! Floating-point proposers for convex-hull membership. Nothing returned
//! here is trusted: the caller turns each proposal into an exact witness
//! and checks it.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

fn dot(y: &[f64], col: &[i32]) -> f64 {
    y.iter().zip(col).map(|(a, &c)| a * f64::from(c)).sum()
}

/// Frank–Wolfe descent on `|p - target|²` over the hull of `columns`.
///
/// At every iterate `p` the residual `y = target - p` is tested as a
/// separating direction; it is returned as soon as `y·target` beats
/// `max_j y·col_j`. Gives up after `max_iter` steps or once `p` is within
/// `1e-7` of the target (the target is then probably inside).
pub fn separating_direction(columns: &[Vec<i32>], target: &[f64], max_iter: usize) -> Option<Vec<f64>> {
    let first = columns.first()?;
    let mut p: Vec<f64> = first.iter().map(|&v| f64::from(v)).collect();
    for _ in 0..max_iter {
        let y: Vec<f64> = target.iter().zip(&p).map(|(t, q)| t - q).collect();
        let norm2: f64 = y.iter().map(|v| v * v).sum();
        if norm2 < 1e-14 {
            return None;
        }
        let (best, best_val) = columns
            .iter()
            .enumerate()
            .map(|(j, c)| (j, dot(&y, c)))
            .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let y_target: f64 = y.iter().zip(target).map(|(a, b)| a * b).sum();
        if y_target > best_val + 1e-9 * (1.0 + y_target.abs()) {
            return Some(y);
        }
        let d: Vec<f64> = columns[best].iter().zip(&p).map(|(&s, q)| f64::from(s) - q).collect();
        let num: f64 = y.iter().zip(&d).map(|(a, b)| a * b).sum();
        let den: f64 = d.iter().map(|v| v * v).sum();
        if den == 0.0 {
            return None;
        }
        let step = (num / den).clamp(0.0, 1.0);
        for (q, dv) in p.iter_mut().zip(&d) {
            *q += step * dv;
        }
    }
    None
}

/// Basic solution of `Σ w_j col_j = target, Σ w_j = 1, w >= 0` from a
/// revised simplex, or `None` if the solver reports infeasibility.
pub fn feasible_weights(columns: &[Vec<i32>], target: &[f64]) -> Option<Vec<f64>> {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = columns
        .iter()
        .map(|_| problem.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    for (r, &t) in target.iter().enumerate() {
        let row: Vec<_> = columns
            .iter()
            .zip(&vars)
            .filter(|(c, _)| c[r] != 0)
            .map(|(c, &v)| (v, f64::from(c[r])))
            .collect();
        problem.add_constraint(row.as_slice(), ComparisonOp::Eq, t);
    }
    let ones: Vec<_> = vars.iter().map(|&v| (v, 1.0)).collect();
    problem.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    let outcome = problem.solve().ok()?;
    let solution = outcome.solution()?;
    Some(vars.iter().map(|&v| solution.var_value(v)).collect())
}
