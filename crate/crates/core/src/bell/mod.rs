//! Mermin-Bell expressions, the Σ-expression, and the bound comparisons
//! built on them. All values are exact elements of ℚ[√2].

mod local;

pub use local::{
    deterministic_columns, local_lp, strategy_behavior, strategy_output, LocalLpOutcome, LocalModel, MAX_LOCAL_PARTIES,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::behavior::Behavior;
use crate::rational::{self, Rational};
use crate::root2::Root2Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MerminSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl fmt::Display for MerminSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MerminSign::Plus => "+",
            MerminSign::Minus => "-",
        })
    }
}

/// `cos(k·π/4)` for integer `k`.
pub fn cos_eighth_turns(k: i64) -> Root2Scalar {
    let half = Root2Scalar::new(Rational::default(), rational::ratio(1, 2));
    match k.rem_euclid(8) {
        0 => Root2Scalar::integer(1),
        1 | 7 => half,
        2 | 6 => Root2Scalar::zero(),
        3 | 5 => -half,
        _ => Root2Scalar::integer(-1),
    }
}

/// `cos{π/4 [1 ± (n - 2w)]}` where `w` is the input weight.
pub fn mermin_coefficient(n: usize, sign: MerminSign, weight: usize) -> Root2Scalar {
    let d = n as i64 - 2 * weight as i64;
    let k = match sign {
        MerminSign::Plus => 1 + d,
        MerminSign::Minus => 1 - d,
    };
    cos_eighth_turns(k)
}

/// Signed `B^n_± = 2^((1-n)/2) Σ_x coeff(x) E(x)` with `E` the full correlator.
pub fn mermin_value(b: &Behavior, sign: MerminSign) -> Root2Scalar {
    let n = b.n();
    let mut sum = Root2Scalar::zero();
    for x in 0..(1u32 << n) {
        let c = mermin_coefficient(n, sign, x.count_ones() as usize);
        if c.is_zero() {
            continue;
        }
        let e = b.full_correlator(x);
        sum = sum + c.scale(&e);
    }
    sum * Root2Scalar::sqrt2_pow(1 - n as i64)
}

/// `|Σ_x cos[π/4 (n - 2w)] E(x)|`, i.e. `(1/√2)|B_+ + B_-|` on the
/// unnormalized sums, the scale on which the 3-separable bound `2^(n-2)` holds.
pub fn sigma_value(b: &Behavior) -> Root2Scalar {
    let n = b.n() as i64;
    let mut sum = Root2Scalar::zero();
    for x in 0..(1u32 << n) {
        let c = cos_eighth_turns(n - 2 * x.count_ones() as i64);
        if c.is_zero() {
            continue;
        }
        sum = sum + c.scale(&b.full_correlator(x));
    }
    sum.abs()
}

/// Whether a partition into three groups is ruled out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThreeSeparability {
    /// Odd `n`: the Mermin value reaches `2^((n-1)/2)`, which no 3-separable
    /// resource attains (external theorem, not re-derived here).
    ExcludedByMaximalMermin,
    /// Even `n` with even `n/2`: `B_Σ` exceeds `2^(n-2)`.
    ExcludedBySigma,
    /// The applicable criterion is not met.
    NotExcluded,
    /// Even `n` with odd `n/2`: no criterion available.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellReport {
    pub n: usize,
    pub b_plus: Root2Scalar,
    pub b_minus: Root2Scalar,
    pub max_abs_mermin: Root2Scalar,
    pub sigma: Root2Scalar,
    pub local_bound: Root2Scalar,
    pub biseparable_quantum_bound: Root2Scalar,
    pub quantum_maximum: Root2Scalar,
    pub three_separable_sigma_bound: Root2Scalar,
    pub nonlocal: bool,
    pub exceeds_biseparable_quantum_bound: bool,
    pub maximal_mermin_violation: bool,
    pub three_separability: ThreeSeparability,
}

/// `2^(n/2 - 1)`.
pub fn biseparable_quantum_bound(n: usize) -> Root2Scalar {
    Root2Scalar::sqrt2_pow(n as i64 - 2)
}

/// `2^((n-1)/2)`.
pub fn quantum_maximum(n: usize) -> Root2Scalar {
    Root2Scalar::sqrt2_pow(n as i64 - 1)
}

/// `2^(n-2)` on the scale of [`sigma_value`].
pub fn three_separable_sigma_bound(n: usize) -> Root2Scalar {
    Root2Scalar::rational(rational::pow2(n as i64 - 2))
}

/// Expected `max_± |B^n_±|` for the GHZ correlation.
pub fn ghz_mermin_maximum(n: usize) -> Root2Scalar {
    if n % 2 == 1 {
        Root2Scalar::rational(rational::pow2((n as i64 - 1) / 2))
    } else {
        Root2Scalar::rational(rational::pow2((n as i64 - 2) / 2))
    }
}

pub fn classify(b: &Behavior) -> BellReport {
    let n = b.n();
    let b_plus = mermin_value(b, MerminSign::Plus);
    let b_minus = mermin_value(b, MerminSign::Minus);
    let max_abs_mermin = b_plus.abs().max(b_minus.abs());
    let sigma = sigma_value(b);
    let local_bound = Root2Scalar::integer(1);
    let bisep = biseparable_quantum_bound(n);
    let qmax = quantum_maximum(n);
    let sigma_bound = three_separable_sigma_bound(n);

    let maximal = max_abs_mermin == qmax;
    let three_separability = if n % 2 == 1 {
        if maximal {
            ThreeSeparability::ExcludedByMaximalMermin
        } else {
            ThreeSeparability::NotExcluded
        }
    } else if (n / 2) % 2 == 0 {
        if sigma > sigma_bound {
            ThreeSeparability::ExcludedBySigma
        } else {
            ThreeSeparability::NotExcluded
        }
    } else {
        ThreeSeparability::Unknown
    };

    BellReport {
        n,
        nonlocal: max_abs_mermin > local_bound,
        exceeds_biseparable_quantum_bound: max_abs_mermin > bisep,
        maximal_mermin_violation: maximal,
        b_plus,
        b_minus,
        max_abs_mermin,
        sigma,
        local_bound,
        biseparable_quantum_bound: bisep,
        quantum_maximum: qmax,
        three_separable_sigma_bound: sigma_bound,
        three_separability,
    }
}
