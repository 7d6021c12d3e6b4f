mod common;

use anl_core::protocols::{
    bisep_guess_exact_success, run_mss, run_qkd, run_qkd_leakage, AdversaryModel, Grouping, LeakPolicy,
};
use anl_core::rational;
use anl_core::{enumerate_bipartitions, Bipartition};

#[test]
fn sifted_rounds_satisfy_parity_rule() {
    for n in 3..=6 {
        let t = run_mss(n, 100_000, 40 + n as u64, Grouping::Random, AdversaryModel::None).unwrap();
        for r in &t.records {
            let total = (r.announcements[0] + r.announcements[1]) % 4;
            assert_eq!(r.sifted, total % 2 == 0);
            let Some([k1, k2]) = r.keys else {
                assert!(!r.sifted);
                continue;
            };
            let parity = (r.outputs.count_ones() % 2) as u8;
            assert_eq!(k1 ^ k2, parity);
            assert_eq!(parity, u8::from(total == 2), "round {} of n={n}", r.round);
            assert_eq!(k1, (r.outputs & r.group).count_ones() as u8 % 2);
        }
        assert_eq!(t.summary.agreement_rate, 1.0);
        assert!(common::within_5_sigma(t.summary.sifted, 100_000, 0.5));
    }
}

#[test]
fn key_bits_are_balanced() {
    for n in 3..=5 {
        let t = run_mss(n, 100_000, 7 * n as u64, Grouping::Random, AdversaryModel::None).unwrap();
        let sifted = t.summary.sifted;
        for ones in t.summary.key_ones {
            assert!(common::within_5_sigma(ones, sifted, 0.5), "n={n} ones={ones}/{sifted}");
        }
    }
    let t = run_qkd(4, 100_000, 9, AdversaryModel::None).unwrap();
    assert!(common::within_5_sigma(t.summary.key_ones[0], t.summary.sifted, 0.5));
}

#[test]
fn transcripts_are_reproducible() {
    let grouping = Grouping::Fixed(Bipartition::parse("1,2|3,4", 4).unwrap());
    let a = run_mss(4, 5_000, 123, grouping, AdversaryModel::None).unwrap();
    let b = run_mss(4, 5_000, 123, grouping, AdversaryModel::None).unwrap();
    let c = run_mss(4, 5_000, 124, grouping, AdversaryModel::None).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.summary_json(), b.summary_json());
    assert_ne!(a.to_csv(), c.to_csv());
    assert!(a.records.iter().all(|r| r.group == 0b0011));
}

const RESIDUES: [[u32; 2]; 4] = [[0, 3], [0, 1], [1, 2], [2, 3]];
/// Strategy list as (family on the group holding party 1, family on the rest).
const STRATEGIES: [(usize, usize); 4] = [(0, 1), (2, 3), (1, 0), (3, 2)];

/// Parity a box family forces on its group for a group input of weight `w`.
fn forced_parity(fam: usize, w: u32) -> u32 {
    u32::from(RESIDUES[fam].contains(&(w % 4)))
}

/// Eve's success over every strategy, sifted input and output, counted from
/// literal box definitions.
fn brute_force_success(n: usize, eve_g: u32, target: u32) -> rational::Rational {
    let full = (1u32 << n) - 1;
    let eve_h = full & !eve_g;
    let (mut wins, mut total) = (0i64, 0i64);
    for (fg, fh) in STRATEGIES {
        for x in (0..=full).filter(|x| x.count_ones() % 2 == 0) {
            let pg = forced_parity(fg, (x & eve_g).count_ones());
            let ph = forced_parity(fh, (x & eve_h).count_ones());
            let guess = if target == eve_g {
                pg
            } else if target == eve_h {
                ph
            } else {
                0
            };
            // Each output word consistent with both forced parities is equally likely.
            for a in 0..=full {
                if (a & eve_g).count_ones() % 2 != pg || (a & eve_h).count_ones() % 2 != ph {
                    continue;
                }
                total += 1;
                if (a & target).count_ones() % 2 == guess {
                    wins += 1;
                }
            }
        }
    }
    rational::ratio(wins, total)
}

#[test]
fn literal_boxes_match_library() {
    use anl_core::BoxFamily::*;
    for (i, fam) in [Mu1, Mu2, Mu3, Mu4].into_iter().enumerate() {
        for m in 1..=4usize {
            let b = anl_core::ns_box(m, fam).unwrap();
            for x in 0u32..(1 << m) {
                for a in 0u32..(1 << m) {
                    let on = a.count_ones() % 2 == forced_parity(i, x.count_ones());
                    let expected = if on {
                        rational::ratio(2, 1 << m)
                    } else {
                        rational::int(0)
                    };
                    assert_eq!(b.prob(x, a), &expected);
                }
            }
        }
    }
}

#[test]
fn exact_eve_success_matches_brute_force() {
    for n in 3..=5 {
        let splits = enumerate_bipartitions(n);
        for eve in &splits {
            for target in &splits {
                let exact = bisep_guess_exact_success(eve, target.group()).unwrap();
                let expected = if eve == target {
                    rational::int(1)
                } else {
                    rational::ratio(1, 2)
                };
                assert_eq!(exact, expected, "eve {} target {}", eve.spec(), target.spec());
                assert_eq!(
                    brute_force_success(n, eve.group().mask(), target.group().mask()),
                    expected
                );
            }
        }
    }
}

#[test]
fn mismatched_attack_is_a_coin_flip() {
    let eve = Bipartition::parse("1|2,3,4", 4).unwrap();
    let target = Bipartition::parse("1,2|3,4", 4).unwrap();
    let t = run_mss(
        4,
        100_000,
        55,
        Grouping::Fixed(target),
        AdversaryModel::BisepBox { guess: eve },
    )
    .unwrap();
    let eve = t.summary.eve.unwrap();
    assert!(common::within_5_sigma(eve.successes, eve.attempts, 0.5));
    assert_eq!(t.summary.agreement_rate, 1.0);
}

#[test]
fn leakage_policies() {
    for n in 3..=5 {
        let full = run_qkd_leakage(n, 20_000, 3, LeakPolicy::All).unwrap();
        assert_eq!(full.eve.success_rate, 1.0);
        let none = run_qkd_leakage(n, 100_000, 4, LeakPolicy::None).unwrap();
        assert!(common::within_5_sigma(none.eve.successes, none.eve.attempts, 0.5));
    }
}

#[test]
fn small_party_counts_are_rejected() {
    assert!(run_mss(2, 10, 0, Grouping::Random, AdversaryModel::None).is_err());
    assert!(run_qkd(1, 10, 0, AdversaryModel::None).is_err());
    assert!(run_qkd_leakage(3, 10, 0, LeakPolicy::Mask(0b1_0000)).is_err());
}
