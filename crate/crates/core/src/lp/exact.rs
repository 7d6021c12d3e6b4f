//! Dense-tableau phase-one simplex over exact rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Result of testing `A x = b, x >= 0` for feasibility.
#[derive(Clone, Debug, PartialEq)]
pub enum Phase1 {
    /// A basic feasible point.
    Feasible(Vec<Rational>),
    /// Farkas vector `y`: `yᵀA <= 0` componentwise and `yᵀb > 0`.
    Infeasible(Vec<Rational>),
}

/// Solves phase one of `A x = b, x >= 0` where `a` is given column-major
/// (`a[j]` is column `j`, each of length `b.len()`).
///
/// Entering variable: lowest index with negative reduced cost. Leaving row:
/// minimum ratio, ties broken by lowest basic variable index.
pub fn phase_one(a: &[Vec<Rational>], b: &[Rational]) -> Phase1 {
    phase_one_from(a, b, None)
}

/// As [`phase_one`], first pivoting the listed original columns into the
/// basis where possible (warm start).
pub fn phase_one_from(a: &[Vec<Rational>], b: &[Rational], warm: Option<&[usize]>) -> Phase1 {
    let m = b.len();
    let ncols = a.len();
    let width = ncols + m + 1;
    let rhs = width - 1;

    let flip: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = vec![Rational::zero(); width];
            for (j, col) in a.iter().enumerate() {
                row[j] = if flip[i] { -&col[i] } else { col[i].clone() };
            }
            row[ncols + i] = Rational::one();
            row[rhs] = if flip[i] { -&b[i] } else { b[i].clone() };
            row
        })
        .collect();
    let mut basis: Vec<usize> = (ncols..ncols + m).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![Rational::zero(); width];
    for c in &mut cost[ncols..ncols + m] {
        *c = Rational::one();
    }
    for row in &t {
        for (c, v) in cost.iter_mut().zip(row) {
            if !v.is_zero() {
                *c -= v;
            }
        }
    }
    // cost[rhs] now holds -(objective)

    if let Some(cols) = warm {
        for &j in cols {
            if j >= ncols || basis.contains(&j) {
                continue;
            }
            // pivot on any artificial row with a nonzero entry, keeping feasibility
            if let Some(r) = ratio_test(&t, &basis, j, rhs) {
                if basis[r] >= ncols {
                    pivot(&mut t, &mut cost, &mut basis, r, j);
                }
            }
        }
    }

    loop {
        let entering = (0..ncols + m).find(|&j| cost[j].is_negative());
        let Some(j) = entering else { break };
        let r = ratio_test(&t, &basis, j, rhs).expect("phase one is bounded below by zero");
        pivot(&mut t, &mut cost, &mut basis, r, j);
    }

    let objective = -&cost[rhs];
    if objective.is_positive() {
        // y_i = c_art_i - reduced cost of artificial i
        let y = (0..m)
            .map(|i| {
                let yi = Rational::one() - &cost[ncols + i];
                if flip[i] {
                    -yi
                } else {
                    yi
                }
            })
            .collect();
        Phase1::Infeasible(y)
    } else {
        let mut x = vec![Rational::zero(); ncols];
        for (i, &j) in basis.iter().enumerate() {
            if j < ncols {
                x[j] = t[i][rhs].clone();
            }
        }
        Phase1::Feasible(x)
    }
}

fn ratio_test(t: &[Vec<Rational>], basis: &[usize], j: usize, rhs: usize) -> Option<usize> {
    let mut best: Option<(usize, Rational)> = None;
    for (i, row) in t.iter().enumerate() {
        if !row[j].is_positive() {
            continue;
        }
        let ratio = &row[rhs] / &row[j];
        let better = match &best {
            None => true,
            Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
        };
        if better {
            best = Some((i, ratio));
        }
    }
    best.map(|(i, _)| i)
}

fn pivot(t: &mut [Vec<Rational>], cost: &mut [Rational], basis: &mut [usize], r: usize, j: usize) {
    let p = t[r][j].clone();
    if !p.is_one() {
        let inv = p.recip();
        for v in t[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
    }
    let pivot_row = t[r].clone();
    let nz: Vec<usize> = (0..pivot_row.len()).filter(|&k| !pivot_row[k].is_zero()).collect();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[j].is_zero() {
            continue;
        }
        let f = row[j].clone();
        for &k in &nz {
            row[k] -= &f * &pivot_row[k];
        }
    }
    if !cost[j].is_zero() {
        let f = cost[j].clone();
        for &k in &nz {
            cost[k] -= &f * &pivot_row[k];
        }
    }
    basis[r] = j;
}

/// Solves `M z = rhs` for a consistent, possibly overdetermined system,
/// returning one solution (free variables set to zero) or `None`.
pub fn solve_consistent(m: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut v = row.clone();
            v.push(r.clone());
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&i| !aug[i][col].is_zero()) else {
            continue;
        };
        aug.swap(row, p);
        let inv = aug[row][col].recip();
        for v in aug[row].iter_mut() {
            *v *= &inv;
        }
        let pr = aug[row].clone();
        for (i, r) in aug.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let f = r[col].clone();
                for k in col..=cols {
                    if !pr[k].is_zero() {
                        r[k] -= &f * &pr[k];
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    if aug[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    let mut z = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        z[c] = aug[i][cols].clone();
    }
    Some(z)
}
