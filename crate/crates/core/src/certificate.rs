//! Linear functionals on behavior tables used as separation certificates.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::behavior::{correlator_coordinates, parity_sign, Behavior, SignalingWitness};
use crate::rational::{self, Rational};

/// A linear functional `Σ c(a, x) P(a|x)` over a full table, stored in the
/// table's own index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellFunctional {
    n: usize,
    coefficients: Vec<Rational>,
}

impl BellFunctional {
    pub fn new(n: usize, coefficients: Vec<Rational>) -> Self {
        assert_eq!(coefficients.len(), 1 << (2 * n));
        BellFunctional { n, coefficients }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn evaluate(&self, b: &Behavior) -> Rational {
        self.coefficients
            .iter()
            .zip(b.table())
            .filter(|(c, p)| !c.is_zero() && !p.is_zero())
            .map(|(c, p)| c * p)
            .sum()
    }

    /// Value on the deterministic behavior whose output word on input `x`
    /// is `outputs(x)`.
    pub fn evaluate_deterministic(&self, outputs: impl Fn(u32) -> u32) -> Rational {
        let w = 1usize << self.n;
        (0..w as u32)
            .map(|x| &self.coefficients[x as usize * w + outputs(x) as usize])
            .sum()
    }

    /// Lifts a functional on the correlator coordinates (see
    /// [`correlator_coordinates`]) to the table. On non-signaling behaviors
    /// both forms give the same value.
    pub fn from_correlator_form(n: usize, coefficients: &[Rational]) -> Self {
        let w = 1usize << n;
        let mut c = vec![Rational::zero(); w * w];
        for ((s, x), y) in correlator_coordinates(n).into_iter().zip(coefficients) {
            if y.is_zero() {
                continue;
            }
            for a in 0..w {
                let entry = &mut c[x as usize * w + a];
                if parity_sign(a as u32, s) > 0 {
                    *entry += y;
                } else {
                    *entry -= y;
                }
            }
        }
        BellFunctional::new(n, c)
    }

    /// Difference of the two marginal probabilities named by the witness,
    /// oriented to be positive on the signaling behavior. Every
    /// non-signaling behavior evaluates to 0.
    pub fn from_signaling_witness(b: &Behavior, w: &SignalingWitness) -> Self {
        let n = b.n();
        let size = 1usize << n;
        let s = w.subset.mask();
        let mut c = vec![Rational::zero(); size * size];
        for a in 0..size as u32 {
            if crate::behavior::compress(a, s) == w.outputs {
                c[w.inputs.0 as usize * size + a as usize] += rational::int(1);
                c[w.inputs.1 as usize * size + a as usize] -= rational::int(1);
            }
        }
        let f = BellFunctional::new(n, c);
        if f.evaluate(b).is_negative() {
            f.negated()
        } else {
            f
        }
    }

    pub fn negated(&self) -> Self {
        BellFunctional::new(self.n, self.coefficients.iter().map(|c| -c).collect())
    }

    /// Adds `t` to the value of every normalized behavior.
    pub fn shifted(&self, t: &Rational) -> Self {
        let mut c = self.coefficients.clone();
        for v in c.iter_mut().take(1 << self.n) {
            *v += t;
        }
        BellFunctional::new(self.n, c)
    }

    pub fn scaled(&self, r: &Rational) -> Self {
        BellFunctional::new(self.n, self.coefficients.iter().map(|c| c * r).collect())
    }
}

/// A functional whose value on the tested behavior strictly exceeds its
/// maximum `bound` over a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationCertificate {
    pub functional: BellFunctional,
    pub bound: Rational,
    pub behavior_value: Rational,
}

impl SeparationCertificate {
    /// Re-checks the certificate exactly against the behavior and the
    /// generators (given as behaviors).
    pub fn verify<'a>(&self, b: &Behavior, generators: impl IntoIterator<Item = &'a Behavior>) -> bool {
        let value = self.functional.evaluate(b);
        if value != self.behavior_value || value <= self.bound {
            return false;
        }
        generators
            .into_iter()
            .all(|g| self.functional.evaluate(g) <= self.bound)
    }

    /// Shifts and rescales so the value on the uniformly random behavior is
    /// 0 and the bound is 1; the behavior value is then the violation ratio.
    /// Returns `None` when the bound equals the noise value.
    pub fn normalized(&self) -> Option<SeparationCertificate> {
        let n = self.functional.n();
        let noise = self
            .functional
            .evaluate(&Behavior::uniform(n).expect("uniform behavior fits"));
        let span = &self.bound - &noise;
        if !span.is_positive() {
            return None;
        }
        let inv = span.recip();
        let functional = self.functional.shifted(&-&noise).scaled(&inv);
        Some(SeparationCertificate {
            functional,
            bound: rational::int(1),
            behavior_value: (&self.behavior_value - &noise) * &inv,
        })
    }

    pub fn to_document(&self) -> CertificateDocument {
        let w = 1usize << self.functional.n();
        CertificateDocument {
            n: self.functional.n(),
            bound: rational::to_text(&self.bound),
            behavior_value: rational::to_text(&self.behavior_value),
            terms: self
                .functional
                .coefficients()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| CertificateTerm {
                    input: (i / w) as u32,
                    output: (i % w) as u32,
                    coefficient: rational::to_text(c),
                })
                .collect(),
        }
    }
}

/// Sparse JSON form of a certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub n: usize,
    pub bound: String,
    pub behavior_value: String,
    pub terms: Vec<CertificateTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateTerm {
    pub input: u32,
    pub output: u32,
    pub coefficient: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsbox::ghz_behavior;

    #[test]
    fn correlator_lift_matches_correlators() {
        let b = ghz_behavior(3).unwrap();
        let coords = correlator_coordinates(3);
        let y: Vec<Rational> = (0..coords.len()).map(|k| rational::int(k as i64 % 5 - 2)).collect();
        let f = BellFunctional::from_correlator_form(3, &y);
        let expected: Rational = b.correlator_vector().iter().zip(&y).map(|(e, c)| e * c).sum();
        assert_eq!(f.evaluate(&b), expected);
    }
}
