mod common;

use anl_core::behavior::{self, Factor, MixtureTerm};
use anl_core::nsbox::{f_indicator, h_indicator, InputWord};
use anl_core::rational::{self, Rational};
use anl_core::{
    enumerate_bipartitions, ghz_behavior, mix, ns_box, tensor, Behavior, BoxFamily, Mixture, PartySubset, Root2Scalar,
};
use num_traits::One;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = BoxFamily> {
    prop_oneof![
        Just(BoxFamily::Mu1),
        Just(BoxFamily::Mu2),
        Just(BoxFamily::Mu3),
        Just(BoxFamily::Mu4),
    ]
}

/// A random non-signaling behavior: a product of deterministic parties mixed
/// with a box family.
fn mixed_box(n: usize, responses: &[u8], fam: BoxFamily, w: u32) -> Behavior {
    let det = Behavior::deterministic(responses).unwrap();
    let weight = rational::ratio(i64::from(w), 8);
    let table = det
        .table()
        .iter()
        .zip(ns_box(n, fam).unwrap().table())
        .map(|(d, b)| &weight * d + (Rational::one() - &weight) * b)
        .collect();
    Behavior::new(n, table).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mixing_keeps_non_signaling(n in 2usize..=4, fam in family(), w in 0u32..=8, seed in any::<u64>()) {
        let responses: Vec<u8> = (0..n).map(|i| ((seed >> (2 * i)) & 3) as u8).collect();
        let b = mixed_box(n, &responses, fam, w);
        prop_assert!(b.is_non_signaling());
        prop_assert!(behavior::is_non_signaling(&b).is_ok());
    }

    #[test]
    fn marginals_match_literal_sums(n in 2usize..=4, fam in family(), w in 0u32..=8, s_bits in 1u32..16, x_bits in 0u32..16) {
        let mask = (1u32 << n) - 1;
        let s = s_bits & mask;
        prop_assume!(s != 0);
        let x = x_bits & mask;
        let responses: Vec<u8> = (0..n).map(|i| (i % 4) as u8).collect();
        let b = mixed_box(n, &responses, fam, w);
        let subset = PartySubset::from_parties(&(1..=n).filter(|p| s >> (p - 1) & 1 == 1).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(b.marginal(subset, x).unwrap(), common::marginal_literal(&b, s, x));
        let total: Rational = b.marginal(subset, x).unwrap().iter().sum();
        prop_assert_eq!(total, Rational::one());
    }

    #[test]
    fn full_correlator_matches_table_sum(n in 2usize..=5, fam in family(), x_bits in 0u32..32) {
        let x = x_bits & ((1u32 << n) - 1);
        let b = ns_box(n, fam).unwrap();
        prop_assert_eq!(b.full_correlator(x), common::correlator_from_table(&b, x));
    }

    #[test]
    fn root2_arithmetic_is_a_ring(a in -20i64..20, b in -20i64..20, c in -20i64..20, d in -20i64..20) {
        let p = Root2Scalar::new(rational::int(a), rational::int(b));
        let q = Root2Scalar::new(rational::int(c), rational::int(d));
        let prod = p.clone() * q.clone();
        prop_assert_eq!(prod.clone(), q.clone() * p.clone());
        prop_assert!(((prod.to_f64()) - p.to_f64() * q.to_f64()).abs() < 1e-9);
        prop_assert_eq!(p.clone() - p.clone(), Root2Scalar::zero());
        prop_assert_eq!((p.clone() + q.clone()).to_f64().signum() == 0.0, (p.clone() + q.clone()).is_zero());
        let exact = p.cmp(&q);
        let approx = p.to_f64().partial_cmp(&q.to_f64()).unwrap();
        if (p.to_f64() - q.to_f64()).abs() > 1e-9 {
            prop_assert_eq!(exact, approx);
        }
    }

    #[test]
    fn sqrt2_powers_square_to_powers_of_two(k in 0i64..24) {
        let r = Root2Scalar::sqrt2_pow(k);
        prop_assert_eq!(r.clone() * r, Root2Scalar::rational(common::pow2(k)));
    }

    #[test]
    fn json_round_trip(n in 1usize..=4, fam in family(), w in 0u32..=8) {
        let responses = vec![1u8; n];
        let b = mixed_box(n, &responses, fam, w);
        prop_assert_eq!(Behavior::from_json(&b.to_json()).unwrap(), b);
    }
}

#[test]
fn f_indicator_matches_subset_sum() {
    for n in 1..=10usize {
        for x in 0u32..(1 << n) {
            let word = InputWord::new(n, x);
            for k in 0..=n {
                assert_eq!(
                    u32::from(f_indicator(k, word).unwrap()),
                    common::f_literal(n, k, x),
                    "n={n} k={k} x={x:b}"
                );
            }
            for l in 0..4 {
                assert_eq!(u32::from(h_indicator(n, l, word).unwrap()), common::h_literal(n, l, x));
            }
        }
    }
}

#[test]
fn ghz_equals_oracle_and_mixtures() {
    for n in 2..=6 {
        let g = ghz_behavior(n).unwrap();
        assert_eq!(g.table(), common::ghz_oracle(n).as_slice());
        for bp in enumerate_bipartitions(n) {
            let m = anl_core::ghz_bisep_mixture(n, &bp).unwrap();
            assert_eq!(mix(&m).unwrap(), g, "split {}", bp.spec());
        }
    }
}

#[test]
fn tensor_agrees_with_literal_product() {
    let n = 4;
    let g = PartySubset::from_parties(&[1, 3]).unwrap();
    let h = g.complement(n);
    let pg = ns_box(2, BoxFamily::Mu3).unwrap();
    let ph = Behavior::deterministic(&[2, 1]).unwrap();
    let product = tensor(&[(g, pg.clone()), (h, ph.clone())]).unwrap();
    assert_eq!(product, common::product_literal(n, 0b0101, &pg, &ph));
}

#[test]
fn mixture_rejects_bad_weights() {
    let factor = |b: Behavior| Factor {
        parties: PartySubset::full(2),
        behavior: b,
    };
    let term = |w: Rational| MixtureTerm {
        weight: w,
        factors: vec![factor(ghz_behavior(2).unwrap())],
    };
    assert!(Mixture::new(2, vec![term(rational::ratio(1, 2))]).is_err());
    assert!(Mixture::new(2, vec![term(rational::ratio(3, 2)), term(rational::ratio(-1, 2))]).is_err());
    let ok = Mixture::new(2, vec![term(rational::ratio(1, 2)), term(rational::ratio(1, 2))]).unwrap();
    assert_eq!(mix(&ok).unwrap(), ghz_behavior(2).unwrap());
}
