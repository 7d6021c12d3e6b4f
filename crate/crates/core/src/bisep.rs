//! Bipartitions, the explicit four-strategy biseparable decomposition of the
//! GHZ correlation, and an exact biseparability LP for small groups.

use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::behavior::{self, full_mask, mix, tensor, Behavior, Factor, Mixture, MixtureTerm, NsReport, PartySubset};
use crate::certificate::{BellFunctional, SeparationCertificate};
use crate::error::{Error, Result};
use crate::lp::{convex_hull_membership, Membership};
use crate::nsbox::{ghz_behavior, ns_box, BoxFamily};
use crate::rational::{self, Rational};

/// Split of `[n]` into two nonempty groups; `group` always contains party 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    n: usize,
    group: PartySubset,
}

impl Bipartition {
    /// Canonicalizes: if `group` lacks party 1 its complement is used.
    pub fn new(n: usize, group: PartySubset) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidBipartition(format!("{n} parties cannot be split")));
        }
        if !group.fits(n) {
            return Err(Error::InvalidBipartition(format!("{group} exceeds {n} parties")));
        }
        if group.is_empty() || group == PartySubset::full(n) {
            return Err(Error::InvalidBipartition(format!("{group} leaves an empty group")));
        }
        let group = if group.contains(1) { group } else { group.complement(n) };
        Ok(Bipartition { n, group })
    }

    /// Parses `"1,3|2,4"` (1-based labels, either side may hold party 1).
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let sides: Vec<&str> = text.split('|').collect();
        if sides.len() != 2 {
            return Err(Error::Parse(format!("expected `<parties>|<parties>`, got {text:?}")));
        }
        let mut masks = [0u32; 2];
        for (side, mask) in sides.iter().zip(masks.iter_mut()) {
            for label in side.split(',') {
                let label = label.trim();
                let p: usize = label
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad party label {label:?} in {text:?}")))?;
                if p == 0 || p > n {
                    return Err(Error::NotAPartition(format!("party {p} is outside 1..={n}")));
                }
                let bit = 1u32 << (p - 1);
                if *mask & bit != 0 {
                    return Err(Error::NotAPartition(format!("party {p} listed twice")));
                }
                *mask |= bit;
            }
        }
        let overlap = masks[0] & masks[1];
        if overlap != 0 {
            return Err(Error::NotAPartition(format!(
                "parties {} appear on both sides",
                PartySubset::from_mask(overlap)
            )));
        }
        let missing = full_mask(n) & !(masks[0] | masks[1]);
        if missing != 0 {
            return Err(Error::NotAPartition(format!(
                "parties {} are not assigned",
                PartySubset::from_mask(missing)
            )));
        }
        Bipartition::new(n, PartySubset::from_mask(masks[0]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> PartySubset {
        self.group
    }

    pub fn complement(&self) -> PartySubset {
        self.group.complement(self.n)
    }

    /// Size of the group holding party 1.
    pub fn k(&self) -> usize {
        self.group.len()
    }

    /// `"1,3|2,4"` form accepted by [`parse`](Self::parse).
    pub fn spec(&self) -> String {
        let side = |s: PartySubset| s.parties().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        format!("{}|{}", side(self.group), side(self.complement()))
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.group, self.complement())
    }
}

impl Serialize for Bipartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec())
    }
}

/// All `2^(n-1) - 1` canonical bipartitions, by increasing group mask.
pub fn enumerate_bipartitions(n: usize) -> Vec<Bipartition> {
    if n < 2 {
        return Vec::new();
    }
    (1..full_mask(n))
        .filter(|m| m & 1 == 1)
        .map(|m| Bipartition {
            n,
            group: PartySubset::from_mask(m),
        })
        .collect()
}

/// Box families `(group, complement)` of the four equal-weight strategies.
pub const GHZ_STRATEGIES: [(BoxFamily, BoxFamily); 4] = [
    (BoxFamily::Mu1, BoxFamily::Mu2),
    (BoxFamily::Mu3, BoxFamily::Mu4),
    (BoxFamily::Mu2, BoxFamily::Mu1),
    (BoxFamily::Mu4, BoxFamily::Mu3),
];

/// Equal-weight mixture of the four product strategies reproducing the
/// n-partite GHZ correlation across `bp`.
pub fn ghz_bisep_mixture(n: usize, bp: &Bipartition) -> Result<Mixture> {
    if bp.n() != n {
        return Err(Error::InvalidBipartition(format!(
            "bipartition of {} parties used with n = {n}",
            bp.n()
        )));
    }
    let g = bp.group();
    let h = bp.complement();
    let quarter = rational::ratio(1, 4);
    let terms = GHZ_STRATEGIES
        .iter()
        .map(|&(fg, fh)| {
            Ok(MixtureTerm {
                weight: quarter.clone(),
                factors: vec![
                    Factor {
                        parties: g,
                        behavior: ns_box(g.len(), fg)?,
                    },
                    Factor {
                        parties: h,
                        behavior: ns_box(h.len(), fh)?,
                    },
                ],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Mixture::new(n, terms)
}

/// Mixes the four strategies and compares with the GHZ table entry by entry.
pub fn verify_ghz_bisep(n: usize, bp: &Bipartition) -> bool {
    let Ok(m) = ghz_bisep_mixture(n, bp) else {
        return false;
    };
    match (mix(&m), ghz_behavior(n)) {
        (Ok(mixed), Ok(ghz)) => mixed == ghz,
        _ => false,
    }
}

/// The four deterministic one-party boxes.
pub fn one_party_vertices() -> Vec<Behavior> {
    (0..4u8)
        .map(|r| Behavior::deterministic(&[r]).expect("valid"))
        .collect()
}

/// Vertices of the two-party non-signaling polytope: 16 deterministic
/// products followed by the 8 PR boxes `a1 ⊕ a2 = x1·x2 ⊕ αx1 ⊕ βx2 ⊕ γ`.
pub fn two_party_vertices() -> Vec<Behavior> {
    let mut v: Vec<Behavior> = (0..16u8)
        .map(|d| Behavior::deterministic(&[d & 3, d >> 2]).expect("valid"))
        .collect();
    for code in 0..8u32 {
        let (alpha, beta, gamma) = (code & 1, (code >> 1) & 1, (code >> 2) & 1);
        let pr = Behavior::from_fn(2, |x, a| {
            let (x1, x2) = (x & 1, x >> 1);
            let rule = (x1 & x2) ^ (alpha & x1) ^ (beta & x2) ^ gamma;
            if ((a & 1) ^ (a >> 1)) == rule {
                rational::ratio(1, 2)
            } else {
                Rational::zero()
            }
        })
        .expect("valid");
        v.push(pr);
    }
    v
}

fn vertices(size: usize) -> Result<Vec<Behavior>> {
    match size {
        1 => Ok(one_party_vertices()),
        2 => Ok(two_party_vertices()),
        _ => Err(Error::GroupTooLarge { size }),
    }
}

/// Product vertices generating the biseparable polytope for `bp`, in the
/// same order as the LP columns: group vertex major, complement vertex minor.
pub fn bisep_generators(bp: &Bipartition) -> Result<Vec<(Behavior, Behavior)>> {
    let vg = vertices(bp.k())?;
    let vh = vertices(bp.n() - bp.k())?;
    Ok(vg
        .iter()
        .flat_map(|g| vh.iter().map(move |h| (g.clone(), h.clone())))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum BisepCertificate {
    Biseparable(Mixture),
    NotBiseparable(SeparationCertificate),
}

impl BisepCertificate {
    pub fn is_biseparable(&self) -> bool {
        matches!(self, BisepCertificate::Biseparable(_))
    }
}

/// Exact LP over products of group vertices; both groups must have at most
/// two parties.
pub fn bisep_lp(b: &Behavior, bp: &Bipartition) -> Result<BisepCertificate> {
    if bp.n() != b.n() {
        return Err(Error::InvalidBipartition(format!(
            "bipartition of {} parties used with a {}-party behavior",
            bp.n(),
            b.n()
        )));
    }
    for size in [bp.k(), bp.n() - bp.k()] {
        if size > 2 {
            return Err(Error::GroupTooLarge { size });
        }
    }
    if let NsReport::Signaling(w) = b.ns_report() {
        let functional = BellFunctional::from_signaling_witness(b, w);
        let behavior_value = functional.evaluate(b);
        return Ok(BisepCertificate::NotBiseparable(SeparationCertificate {
            functional,
            bound: Rational::zero(),
            behavior_value,
        }));
    }

    let (g, h) = (bp.group(), bp.complement());
    let products: Vec<Behavior> = bisep_generators(bp)?
        .into_iter()
        .map(|(vg, vh)| tensor(&[(g, vg), (h, vh)]).expect("groups partition [n]"))
        .collect();
    let columns: Vec<Vec<i32>> = products
        .iter()
        .map(|p| {
            p.correlator_vector()
                .iter()
                .map(|e| e.to_integer().try_into().expect("correlators of vertices are ±1 or 0"))
                .collect()
        })
        .collect();
    let generators = bisep_generators(bp)?;

    match convex_hull_membership(&columns, &b.correlator_vector()) {
        Membership::Inside { weights } => {
            let terms = weights
                .into_iter()
                .zip(generators)
                .filter(|(w, _)| !w.is_zero())
                .map(|(weight, (vg, vh))| MixtureTerm {
                    weight,
                    factors: vec![
                        Factor {
                            parties: g,
                            behavior: vg,
                        },
                        Factor {
                            parties: h,
                            behavior: vh,
                        },
                    ],
                })
                .collect();
            let m = Mixture::new(b.n(), terms)?;
            assert!(
                behavior::mix(&m)? == *b,
                "biseparable weights must reproduce the behavior"
            );
            Ok(BisepCertificate::Biseparable(m))
        }
        Membership::Outside(sep) => {
            let functional = BellFunctional::from_correlator_form(b.n(), &sep.functional);
            let bound = products
                .iter()
                .map(|p| functional.evaluate(p))
                .max()
                .expect("nonempty generator set");
            let behavior_value = functional.evaluate(b);
            assert!(behavior_value > bound, "certificate must separate");
            Ok(BisepCertificate::NotBiseparable(SeparationCertificate {
                functional,
                bound,
                behavior_value,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts_and_order() {
        let b3 = enumerate_bipartitions(3);
        let specs: Vec<String> = b3.iter().map(|b| b.spec()).collect();
        assert_eq!(specs, vec!["1|2,3", "1,2|3", "1,3|2"]);
        assert_eq!(enumerate_bipartitions(4).len(), 7);
        assert_eq!(enumerate_bipartitions(2).len(), 1);
        for n in 2..10 {
            assert_eq!(enumerate_bipartitions(n).len(), (1 << (n - 1)) - 1);
        }
    }

    #[test]
    fn parsing() {
        let bp = Bipartition::parse("1|2,3", 3).unwrap();
        assert_eq!(bp.group(), PartySubset::single(1));
        let swapped = Bipartition::parse("2,3|1", 3).unwrap();
        assert_eq!(swapped, bp);
        assert!(matches!(Bipartition::parse("1,2|2,3", 3), Err(Error::NotAPartition(_))));
        assert!(matches!(Bipartition::parse("1|2", 3), Err(Error::NotAPartition(_))));
        assert!(matches!(Bipartition::parse("1,x|2", 3), Err(Error::Parse(_))));
        assert!(matches!(Bipartition::parse("1,2,3", 3), Err(Error::Parse(_))));
        assert!(matches!(Bipartition::parse("1|2,4", 3), Err(Error::NotAPartition(_))));
    }

    #[test]
    fn mixture_shape() {
        let bp = Bipartition::parse("1|2,3", 3).unwrap();
        let m = ghz_bisep_mixture(3, &bp).unwrap();
        assert_eq!(m.terms().len(), 4);
        for t in m.terms() {
            assert_eq!(t.weight, rational::ratio(1, 4));
            assert_eq!(t.factors[0].behavior.n(), 1);
            assert_eq!(t.factors[1].behavior.n(), 2);
        }
        let wrong = Bipartition::parse("1|2,3,4", 4).unwrap();
        assert!(ghz_bisep_mixture(3, &wrong).is_err());
    }

    #[test]
    fn decomposition_small_n() {
        for n in 2..=5 {
            for bp in enumerate_bipartitions(n) {
                assert!(verify_ghz_bisep(n, &bp), "n={n} {bp}");
            }
        }
    }

    #[test]
    fn vertex_lists_are_non_signaling_and_extremal_by_support() {
        let one = one_party_vertices();
        let two = two_party_vertices();
        assert_eq!((one.len(), two.len()), (4, 24));
        for v in one.iter().chain(&two) {
            assert!(v.is_non_signaling());
        }
        // extremal by support: no other vertex has support contained in this one's
        let support = |b: &Behavior| -> Vec<bool> { b.table().iter().map(|p| !p.is_zero()).collect() };
        for (i, v) in two.iter().enumerate() {
            let sv = support(v);
            for (j, u) in two.iter().enumerate() {
                if i == j {
                    continue;
                }
                let su = support(u);
                let contained = su.iter().zip(&sv).all(|(a, b)| !a || *b);
                assert!(!contained, "vertex {j} supported inside vertex {i}");
            }
        }
    }

    #[test]
    fn group_size_limit() {
        let g = ghz_behavior(5).unwrap();
        let bp = Bipartition::parse("1,2|3,4,5", 5).unwrap();
        assert!(matches!(bisep_lp(&g, &bp), Err(Error::GroupTooLarge { size: 3 })));
    }

    #[test]
    fn ghz3_biseparable_for_every_split() {
        let g = ghz_behavior(3).unwrap();
        for bp in enumerate_bipartitions(3) {
            let cert = bisep_lp(&g, &bp).unwrap();
            let BisepCertificate::Biseparable(m) = cert else {
                panic!("{bp} should be biseparable")
            };
            assert_eq!(mix(&m).unwrap(), g);
        }
    }
}
