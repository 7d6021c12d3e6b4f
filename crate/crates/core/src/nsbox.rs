//! The GHZ correlation under σx/σy measurements and the four families of
//! n-partite non-signaling boxes built from the F/H input indicators.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::behavior::{check_capacity, full_mask, Behavior};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// An n-bit input word; party `i` is bit `i - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InputWord {
    n: usize,
    bits: u32,
}

impl InputWord {
    pub fn new(n: usize, bits: u32) -> Self {
        debug_assert!(bits & !full_mask(n) == 0, "input word wider than n");
        InputWord {
            n,
            bits: bits & full_mask(n),
        }
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// Number of parties with input 1.
    pub fn weight(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn all(n: usize) -> impl Iterator<Item = InputWord> {
        (0..=full_mask(n)).map(move |bits| InputWord::new(n, bits))
    }
}

/// `cos(w·π/2)` for an integer `w`.
pub fn cos_quarter_turns(w: usize) -> i32 {
    match w % 4 {
        0 => 1,
        2 => -1,
        _ => 0,
    }
}

/// `P(a|x) = 2^-n [1 + cos(|x|π/2) · Π a_i]`.
pub fn ghz_behavior(n: usize) -> Result<Behavior> {
    check_capacity(n)?;
    let half = rational::pow2(-(n as i64));
    let double = rational::pow2(1 - n as i64);
    Behavior::from_fn(n, |x, a| {
        let sign = cos_quarter_turns(x.count_ones() as usize);
        let product = if a.count_ones() % 2 == 0 { 1 } else { -1 };
        match sign * product {
            0 => half.clone(),
            1 => double.clone(),
            _ => Rational::zero(),
        }
    })
}

/// `F(k, x)`: equals 1 exactly when `x` has weight `k`.
pub fn f_indicator(k: usize, x: InputWord) -> Result<u8> {
    if k > x.n() {
        return Err(Error::KOutOfRange { k, n: x.n() });
    }
    Ok(u8::from(x.weight() == k))
}

/// `H^n_l(x) = Σ_{j=0}^{⌊(n-l)/4⌋} F(4j + l, x)`.
pub fn h_indicator(n: usize, residue: usize, x: InputWord) -> Result<u8> {
    if residue > 3 {
        return Err(Error::ResidueOutOfRange { residue });
    }
    if x.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.n(),
        });
    }
    let mut sum = 0;
    let mut k = residue;
    while k <= n {
        sum += f_indicator(k, x)?;
        k += 4;
    }
    Ok(sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoxFamily {
    #[serde(rename = "mu1")]
    Mu1,
    #[serde(rename = "mu2")]
    Mu2,
    #[serde(rename = "mu3")]
    Mu3,
    #[serde(rename = "mu4")]
    Mu4,
}

impl BoxFamily {
    pub const ALL: [BoxFamily; 4] = [BoxFamily::Mu1, BoxFamily::Mu2, BoxFamily::Mu3, BoxFamily::Mu4];

    /// The two H residues whose sum fixes the output parity.
    pub fn residues(self) -> [usize; 2] {
        match self {
            BoxFamily::Mu1 => [0, 3],
            BoxFamily::Mu2 => [0, 1],
            BoxFamily::Mu3 => [1, 2],
            BoxFamily::Mu4 => [2, 3],
        }
    }

    /// Parity the outputs must have, computed from the H indicators.
    pub fn target_parity(self, x: InputWord) -> u8 {
        let [l1, l2] = self.residues();
        let h = |l| h_indicator(x.n(), l, x).expect("residue in range");
        (h(l1) + h(l2)) % 2
    }

    /// Same as [`target_parity`](Self::target_parity), from the input weight mod 4 alone.
    pub fn parity_for_weight(self, weight: usize) -> u8 {
        u8::from(self.residues().contains(&(weight % 4)))
    }

    pub fn label(self) -> &'static str {
        match self {
            BoxFamily::Mu1 => "mu1",
            BoxFamily::Mu2 => "mu2",
            BoxFamily::Mu3 => "mu3",
            BoxFamily::Mu4 => "mu4",
        }
    }
}

impl fmt::Display for BoxFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BoxFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu1" => Ok(BoxFamily::Mu1),
            "mu2" => Ok(BoxFamily::Mu2),
            "mu3" => Ok(BoxFamily::Mu3),
            "mu4" => Ok(BoxFamily::Mu4),
            other => Err(Error::Parse(format!("unknown box family {other:?} (mu1..mu4)"))),
        }
    }
}

/// `P(a'|x) = 2^(1-n) δ[Σ a'_i ≡ H-pair(x) mod 2]`.
pub fn ns_box(n: usize, fam: BoxFamily) -> Result<Behavior> {
    check_capacity(n)?;
    let p = rational::pow2(1 - n as i64);
    let parities: Vec<u8> = InputWord::all(n).map(|x| fam.target_parity(x)).collect();
    Behavior::from_fn(n, |x, a| {
        if (a.count_ones() % 2) as u8 == parities[x as usize] {
            p.clone()
        } else {
            Rational::zero()
        }
    })
}

/// Full correlator `E(x)` of `ns_box(n, fam)` in closed form, indexed by input word.
pub fn ns_box_correlator_table(n: usize, fam: BoxFamily) -> Vec<i8> {
    InputWord::all(n)
        .map(|x| {
            let h = |l| h_indicator(n, l, x).expect("residue in range");
            let e13 = if (h(0) ^ h(3)) == 0 { 1 } else { -1 };
            let e24 = if (h(0) ^ h(1)) == 0 { 1 } else { -1 };
            match fam {
                BoxFamily::Mu1 => e13,
                BoxFamily::Mu3 => -e13,
                BoxFamily::Mu2 => e24,
                BoxFamily::Mu4 => -e24,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::PartySubset;
    use crate::rational::{int, ratio};

    #[test]
    fn ghz_entries() {
        let g3 = ghz_behavior(3).unwrap();
        // a = (+,+,+) is a' = 000
        assert_eq!(g3.prob(0b000, 0b000), &ratio(1, 4));
        for a in 0..8 {
            assert_eq!(g3.prob(0b001, a), &ratio(1, 8));
        }
        let g2 = ghz_behavior(2).unwrap();
        assert_eq!(g2.prob(0b11, 0b00), &int(0));
        assert!(matches!(ghz_behavior(13), Err(Error::CapacityExceeded { .. })));
    }

    #[test]
    fn ghz_correlators() {
        let g3 = ghz_behavior(3).unwrap();
        let all = PartySubset::full(3);
        assert_eq!(g3.correlator(all, 0b000), int(1));
        assert_eq!(g3.correlator(all, 0b011), int(-1));
        let g4 = ghz_behavior(4).unwrap();
        for x in 0..16 {
            assert_eq!(g4.correlator(PartySubset::from_mask(0b0011), x), int(0));
        }
        assert_eq!(
            g3.marginal(PartySubset::single(1), 0).unwrap(),
            vec![ratio(1, 2), ratio(1, 2)]
        );
    }

    #[test]
    fn indicator_examples() {
        let w = |n, bits| InputWord::new(n, bits);
        assert_eq!(f_indicator(2, w(3, 0b011)).unwrap(), 1);
        assert_eq!(f_indicator(1, w(3, 0b011)).unwrap(), 0);
        assert!(matches!(f_indicator(4, w(3, 0)), Err(Error::KOutOfRange { .. })));
        assert_eq!(h_indicator(3, 0, w(3, 0)).unwrap(), 1);
        assert_eq!(h_indicator(3, 3, w(3, 0b111)).unwrap(), 1);
        assert_eq!(h_indicator(5, 0, w(5, 0b01111)).unwrap(), 1);
        assert!(h_indicator(3, 4, w(3, 0)).is_err());
    }

    #[test]
    fn small_box_reductions() {
        // n = 1: mu1/mu3 are a' = x⊕1 and a' = x, mu2/mu4 are a' = 1 and a' = 0
        let det = |responses| Behavior::deterministic(&[responses]).unwrap();
        assert_eq!(ns_box(1, BoxFamily::Mu1).unwrap(), det(0b01));
        assert_eq!(ns_box(1, BoxFamily::Mu3).unwrap(), det(0b10));
        assert_eq!(ns_box(1, BoxFamily::Mu2).unwrap(), det(0b11));
        assert_eq!(ns_box(1, BoxFamily::Mu4).unwrap(), det(0b00));

        // n = 2: PR boxes
        let pr = |rule: fn(u32, u32) -> u32| {
            Behavior::from_fn(2, |x, a| {
                let (x1, x2) = (x & 1, x >> 1);
                if ((a & 1) ^ (a >> 1)) == rule(x1, x2) {
                    ratio(1, 2)
                } else {
                    int(0)
                }
            })
            .unwrap()
        };
        assert_eq!(ns_box(2, BoxFamily::Mu1).unwrap(), pr(|a, b| (a ^ 1) & (b ^ 1)));
        assert_eq!(ns_box(2, BoxFamily::Mu3).unwrap(), pr(|a, b| ((a ^ 1) & (b ^ 1)) ^ 1));
        assert_eq!(ns_box(2, BoxFamily::Mu2).unwrap(), pr(|a, b| (a & b) ^ 1));
        assert_eq!(ns_box(2, BoxFamily::Mu4).unwrap(), pr(|a, b| a & b));
    }

    #[test]
    fn mu1_three_party_support_at_zero_input() {
        let b = ns_box(3, BoxFamily::Mu1).unwrap();
        for a in 0..8u32 {
            let expected = if a.count_ones() % 2 == 1 { ratio(1, 4) } else { int(0) };
            assert_eq!(b.prob(0, a), &expected);
        }
    }

    #[test]
    fn closed_form_correlators() {
        assert_eq!(ns_box_correlator_table(2, BoxFamily::Mu1)[0], -1);
        assert_eq!(ns_box_correlator_table(3, BoxFamily::Mu2)[0b001], -1);
        for n in 1..7 {
            for fam in BoxFamily::ALL {
                let b = ns_box(n, fam).unwrap();
                let table = ns_box_correlator_table(n, fam);
                for x in 0..(1u32 << n) {
                    assert_eq!(b.full_correlator(x), int(table[x as usize] as i64));
                }
            }
        }
    }

    #[test]
    fn family_names() {
        for fam in BoxFamily::ALL {
            assert_eq!(fam.label().parse::<BoxFamily>().unwrap(), fam);
        }
        assert!("mu5".parse::<BoxFamily>().is_err());
    }
}
