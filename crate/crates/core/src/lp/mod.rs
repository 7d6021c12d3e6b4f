//! Exact membership of a point in the convex hull of integer vectors.
//!
//! Small problems go straight to the exact simplex. For larger ones a
//! floating-point search proposes an answer first: Frank–Wolfe descent
//! towards the target looks for a separating direction, and failing that a
//! revised simplex looks for weights. A proposal is only accepted once it
//! has been turned into an exact witness (a separating functional, or
//! nonnegative weights reproducing the point) and checked in rationals.
//! Otherwise the exact simplex decides, warm-started from the float support.

pub mod exact;
pub mod float;

use log::debug;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};
use exact::Phase1;

/// Tableaux with at most this many entries are solved exactly from scratch.
pub const EXACT_TABLEAU_LIMIT: usize = 5_000;

/// Bits kept when rounding a float dual vector to a dyadic rational.
const DUAL_BITS: u32 = 40;

/// Iteration budget of the Frank–Wolfe separation search.
const FRANK_WOLFE_STEPS: usize = 5_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// Nonnegative weights summing to 1 with `Σ w_j col_j = target`.
    Inside { weights: Vec<Rational> },
    /// `functional · col <= bound` for every column while
    /// `functional · target = target_value > bound`.
    Outside(Separation),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Separation {
    pub functional: Vec<Rational>,
    pub bound: Rational,
    pub target_value: Rational,
}

pub fn dot_int(functional: &[Rational], col: &[i32]) -> Rational {
    let mut acc = Rational::zero();
    for (f, &c) in functional.iter().zip(col) {
        match c {
            0 => {}
            1 => acc += f,
            -1 => acc -= f,
            c => acc += f * Rational::from_integer(BigInt::from(c)),
        }
    }
    acc
}

pub fn dot(functional: &[Rational], v: &[Rational]) -> Rational {
    functional.iter().zip(v).map(|(f, x)| f * x).sum()
}

/// Checks a separation exactly against every column and the target.
pub fn verify_separation(sep: &Separation, columns: &[Vec<i32>], target: &[Rational]) -> bool {
    let max = columns.iter().map(|c| dot_int(&sep.functional, c)).max();
    let value = dot(&sep.functional, target);
    match max {
        Some(m) => m <= sep.bound && value == sep.target_value && value > sep.bound,
        None => value == sep.target_value && value > sep.bound,
    }
}

/// Checks weights exactly: nonnegative, summing to 1, reproducing `target`.
pub fn verify_weights(weights: &[Rational], columns: &[Vec<i32>], target: &[Rational]) -> bool {
    if weights.len() != columns.len() || weights.iter().any(|w| w.is_negative()) {
        return false;
    }
    if weights.iter().sum::<Rational>() != Rational::one() {
        return false;
    }
    (0..target.len()).all(|r| {
        let v: Rational = weights
            .iter()
            .zip(columns)
            .filter(|(w, _)| !w.is_zero())
            .map(|(w, c)| w * Rational::from_integer(BigInt::from(c[r])))
            .sum();
        v == target[r]
    })
}

/// Builds the tightest separation with direction `functional`, or `None`
/// if that direction does not separate.
fn separation_from(functional: Vec<Rational>, columns: &[Vec<i32>], target: &[Rational]) -> Option<Separation> {
    let functional = rational::primitive_integer_form(&functional);
    let bound = columns
        .iter()
        .map(|c| dot_int(&functional, c))
        .max()
        .unwrap_or_else(Rational::zero);
    let target_value = dot(&functional, target);
    (target_value > bound).then_some(Separation {
        functional,
        bound,
        target_value,
    })
}

fn augmented(columns: &[Vec<i32>]) -> Vec<Vec<Rational>> {
    columns
        .iter()
        .map(|c| {
            c.iter()
                .map(|&v| Rational::from_integer(BigInt::from(v)))
                .chain(std::iter::once(Rational::one()))
                .collect()
        })
        .collect()
}

fn exact_membership(columns: &[Vec<i32>], target: &[Rational], warm: Option<&[usize]>) -> Membership {
    let a = augmented(columns);
    let mut b = target.to_vec();
    b.push(Rational::one());
    match exact::phase_one_from(&a, &b, warm) {
        Phase1::Feasible(weights) => Membership::Inside { weights },
        Phase1::Infeasible(mut y) => {
            y.pop();
            let sep = separation_from(y, columns, target).expect("exact Farkas vector separates the target");
            Membership::Outside(sep)
        }
    }
}

/// Decides whether `target` lies in the convex hull of `columns`, returning
/// an exactly verified witness either way.
pub fn convex_hull_membership(columns: &[Vec<i32>], target: &[Rational]) -> Membership {
    let d = target.len();
    let size = (d + 1) * (columns.len() + d + 2);
    if size <= EXACT_TABLEAU_LIMIT {
        return exact_membership(columns, target, None);
    }

    let t: Vec<f64> = target.iter().map(rational::to_f64).collect();
    if let Some(y) = float::separating_direction(columns, &t, FRANK_WOLFE_STEPS) {
        let direction: Vec<Rational> = y.iter().map(|&v| rational::from_f64_dyadic(v, DUAL_BITS)).collect();
        if let Some(sep) = separation_from(direction, columns, target) {
            return Membership::Outside(sep);
        }
        debug!("rounded float direction does not separate");
    }
    let mut warm = None;
    if let Some(x) = float::feasible_weights(columns, &t) {
        let support: Vec<usize> = (0..x.len()).filter(|&j| x[j] > 1e-9).collect();
        if let Some(weights) = exact_weights_on(columns, target, &support) {
            return Membership::Inside { weights };
        }
        debug!("float support does not give exact weights");
        warm = Some(support);
    }
    debug!("falling back to the exact simplex");
    exact_membership(columns, target, warm.as_deref())
}

/// Solves for weights supported on `support` exactly; `None` unless they
/// are nonnegative.
fn exact_weights_on(columns: &[Vec<i32>], target: &[Rational], support: &[usize]) -> Option<Vec<Rational>> {
    let d = target.len();
    let system: Vec<Vec<Rational>> = (0..=d)
        .map(|r| {
            support
                .iter()
                .map(|&j| {
                    if r == d {
                        Rational::one()
                    } else {
                        Rational::from_integer(BigInt::from(columns[j][r]))
                    }
                })
                .collect()
        })
        .collect();
    let mut rhs = target.to_vec();
    rhs.push(Rational::one());
    let z = exact::solve_consistent(&system, &rhs)?;
    if z.iter().any(|w| w.is_negative()) {
        return None;
    }
    let mut weights = vec![Rational::zero(); columns.len()];
    for (&j, w) in support.iter().zip(z) {
        weights[j] = w;
    }
    Some(weights)
}
