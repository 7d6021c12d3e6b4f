//! Reference computations written independently of the library internals.
#![allow(dead_code)]

use anl_core::behavior::Behavior;
use anl_core::rational::{self, Rational};
use num_traits::{One, Zero};

/// `P(a|x) = 2^-n (1 + cos(wπ/2) (-1)^{Σa'})`, with `cos` from `w mod 4`.
pub fn ghz_oracle(n: usize) -> Vec<Rational> {
    let size = 1u32 << n;
    let unit = Rational::new(1.into(), (1u64 << n).into());
    let mut out = Vec::new();
    for x in 0..size {
        let c: i64 = match x.count_ones() % 4 {
            0 => 1,
            2 => -1,
            _ => 0,
        };
        for a in 0..size {
            let s: i64 = if a.count_ones() % 2 == 0 { 1 } else { -1 };
            out.push(&unit * Rational::from_integer((1 + c * s).into()));
        }
    }
    out
}

/// `F(k, x) = Σ_{|G|=k} Π_{i∈G} x_i Π_{j∉G} (1 - x_j)`, summed over every subset.
pub fn f_literal(n: usize, k: usize, x: u32) -> u32 {
    let mut total = 0;
    for g in 0u32..(1 << n) {
        if g.count_ones() as usize != k {
            continue;
        }
        let mut term = 1;
        for i in 0..n {
            let xi = (x >> i) & 1;
            term *= if (g >> i) & 1 == 1 { xi } else { 1 - xi };
        }
        total += term;
    }
    total
}

/// `H_ℓ(x) = Σ_j F(4j + ℓ, x)` with the literal F.
pub fn h_literal(n: usize, l: usize, x: u32) -> u32 {
    (l..=n).step_by(4).map(|k| f_literal(n, k, x)).sum()
}

/// Full correlator straight from the table: `Σ_a (-1)^{Σa'} P(a|x)`.
pub fn correlator_from_table(b: &Behavior, x: u32) -> Rational {
    let size = 1u32 << b.n();
    (0..size)
        .map(|a| {
            let p = b.prob(x, a).clone();
            if a.count_ones() % 2 == 0 {
                p
            } else {
                -p
            }
        })
        .sum()
}

/// All `4^n` deterministic behaviors, built party by party with `tensor`
/// semantics re-derived here: party `i` answers `r_i(x_i)`.
pub fn deterministic_behaviors(n: usize) -> Vec<Behavior> {
    let size = 1u32 << n;
    (0..(1u32 << (2 * n)))
        .map(|d| {
            let table = (0..size)
                .flat_map(|x| {
                    let a: u32 = (0..n)
                        .map(|i| {
                            let r = (d >> (2 * i)) & 3;
                            ((r >> ((x >> i) & 1)) & 1) << i
                        })
                        .sum();
                    (0..size).map(move |b| if b == a { Rational::one() } else { Rational::zero() })
                })
                .collect();
            Behavior::new(n, table).unwrap()
        })
        .collect()
}

/// Marginal of `b` on the party mask `s` at input `x`, summed directly.
pub fn marginal_literal(b: &Behavior, s: u32, x: u32) -> Vec<Rational> {
    let n = b.n();
    let k = s.count_ones();
    let mut out = vec![Rational::zero(); 1 << k];
    for a in 0..(1u32 << n) {
        let mut idx = 0;
        let mut bit = 0;
        for i in 0..n {
            if (s >> i) & 1 == 1 {
                idx |= ((a >> i) & 1) << bit;
                bit += 1;
            }
        }
        out[idx as usize] += b.prob(x, a);
    }
    out
}

pub fn pow2(k: i64) -> Rational {
    rational::pow2(k)
}

/// `|observed - expected| ≤ 5σ` for a binomial count.
pub fn within_5_sigma(successes: u64, trials: u64, p: f64) -> bool {
    let mean = trials as f64 * p;
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    (successes as f64 - mean).abs() <= 5.0 * sd
}

fn compress_bits(word: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut bit = 0;
    for i in 0..32 {
        if (mask >> i) & 1 == 1 {
            out |= ((word >> i) & 1) << bit;
            bit += 1;
        }
    }
    out
}

/// `P(a|x) = P_g(a_G|x_G) P_h(a_H|x_H)` for the group mask `g`.
pub fn product_literal(n: usize, g: u32, pg: &Behavior, ph: &Behavior) -> Behavior {
    let h = ((1u32 << n) - 1) & !g;
    Behavior::from_fn(n, |x, a| {
        pg.prob(compress_bits(x, g), compress_bits(a, g)) * ph.prob(compress_bits(x, h), compress_bits(a, h))
    })
    .unwrap()
}
