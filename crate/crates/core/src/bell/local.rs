use num_traits::Zero;
use serde::Serialize;

use crate::behavior::{correlator_coordinates, Behavior, NsReport};
use crate::certificate::{BellFunctional, SeparationCertificate};
use crate::error::{Error, Result};
use crate::lp::{convex_hull_membership, Membership};
use crate::rational::{self, Rational};

/// The local polytope has `4^n` vertices; beyond this the LP is not attempted.
pub const MAX_LOCAL_PARTIES: usize = 7;

/// Output word of deterministic strategy `d` on input `x`. Party `i` uses
/// bits `2i` (output on input 0) and `2i + 1` (output on input 1) of `d`.
pub fn strategy_output(n: usize, d: u32, x: u32) -> u32 {
    let mut a = 0;
    for i in 0..n {
        let response = (d >> (2 * i)) & 3;
        let xi = (x >> i) & 1;
        a |= ((response >> xi) & 1) << i;
    }
    a
}

pub fn strategy_behavior(n: usize, d: u32) -> Behavior {
    let responses: Vec<u8> = (0..n).map(|i| ((d >> (2 * i)) & 3) as u8).collect();
    Behavior::deterministic(&responses).expect("deterministic box is valid")
}

/// Correlator vectors of all `4^n` deterministic strategies.
pub fn deterministic_columns(n: usize) -> Vec<Vec<i32>> {
    let coords = correlator_coordinates(n);
    (0..(1u32 << (2 * n)))
        .map(|d| {
            coords
                .iter()
                .map(|&(s, x)| {
                    if (strategy_output(n, d, x) & s).count_ones() % 2 == 0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        })
        .collect()
}

/// Convex weights over deterministic strategies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalModel {
    pub n: usize,
    /// `(strategy index, weight)` with positive weights.
    #[serde(serialize_with = "weights_as_text")]
    pub weights: Vec<(u32, Rational)>,
}

fn weights_as_text<S: serde::Serializer>(w: &[(u32, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(w.len()))?;
    for (d, p) in w {
        seq.serialize_element(&(d, rational::to_text(p)))?;
    }
    seq.end()
}

impl LocalModel {
    pub fn reconstruct(&self) -> Behavior {
        let n = self.n;
        let size = 1usize << n;
        let mut table = vec![Rational::zero(); size * size];
        for (d, w) in &self.weights {
            for x in 0..size as u32 {
                table[x as usize * size + strategy_output(n, *d, x) as usize] += w;
            }
        }
        Behavior::new(n, table).expect("convex weights give a valid behavior")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LocalLpOutcome {
    Local(LocalModel),
    /// A Bell inequality violated by the behavior; `bound` is its maximum
    /// over all deterministic strategies.
    Nonlocal(SeparationCertificate),
}

impl LocalLpOutcome {
    pub fn is_local(&self) -> bool {
        matches!(self, LocalLpOutcome::Local(_))
    }
}

/// Exact membership test in the local polytope.
pub fn local_lp(b: &Behavior) -> Result<LocalLpOutcome> {
    let n = b.n();
    if n > MAX_LOCAL_PARTIES {
        return Err(Error::CapacityExceeded {
            n,
            max: MAX_LOCAL_PARTIES,
        });
    }
    if let NsReport::Signaling(w) = b.ns_report() {
        let functional = BellFunctional::from_signaling_witness(b, w);
        let behavior_value = functional.evaluate(b);
        return Ok(LocalLpOutcome::Nonlocal(SeparationCertificate {
            functional,
            bound: Rational::zero(),
            behavior_value,
        }));
    }

    let columns = deterministic_columns(n);
    let target = b.correlator_vector();
    match convex_hull_membership(&columns, &target) {
        Membership::Inside { weights } => {
            let model = LocalModel {
                n,
                weights: weights
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(d, w)| (d as u32, w))
                    .collect(),
            };
            assert!(model.reconstruct() == *b, "local weights must reproduce the behavior");
            Ok(LocalLpOutcome::Local(model))
        }
        Membership::Outside(sep) => {
            let functional = BellFunctional::from_correlator_form(n, &sep.functional);
            let bound = (0..(1u32 << (2 * n)))
                .map(|d| functional.evaluate_deterministic(|x| strategy_output(n, d, x)))
                .max()
                .expect("at least one strategy");
            let behavior_value = functional.evaluate(b);
            assert!(behavior_value > bound, "certificate must separate");
            Ok(LocalLpOutcome::Nonlocal(SeparationCertificate {
                functional,
                bound,
                behavior_value,
            }))
        }
    }
}
