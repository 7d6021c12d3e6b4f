//! Monte-Carlo simulation of the secret-sharing (MSS) and leakage-resilient
//! QKD protocols built on the GHZ correlation, with their adversary models.
//!
//! Every round draws from its own ChaCha8 stream: the generator is seeded
//! with the master seed and switched to stream number `round`, so rounds can
//! run in any order or in parallel and still reproduce exactly. Within a
//! round the draws happen in a fixed order: inputs, the box strategy `λ`
//! (biseparable source only), outputs, the grouping, Eve's guessed
//! bipartition (partition experiment only).
//!
//! Both groups announce their input sum mod 4. A round is sifted when the
//! total is even; each group's key bit is the parity of its output bits and
//! the two keys differ exactly when the total is 2 mod 4.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{compress, expand, full_mask, tensor, Behavior, PartySubset, Sampler, MAX_PARTIES};
use crate::bisep::{enumerate_bipartitions, Bipartition, GHZ_STRATEGIES};
use crate::error::{Error, Result};
use crate::nsbox::{ghz_behavior, ns_box, BoxFamily};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Mss,
    Qkd,
}

/// Which output bits Eve sees in the leakage experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeakPolicy {
    None,
    /// Everything except the lowest-numbered party of each side.
    AllButOnePerSide,
    All,
    /// All outputs of side A (the QKD side, or the MSS group with party 1).
    SideA,
    SideB,
    /// A fixed set of parties.
    Mask(u32),
}

impl LeakPolicy {
    fn leaked(self, n: usize, side_a: u32) -> u32 {
        let full = full_mask(n);
        let side_b = full & !side_a;
        match self {
            LeakPolicy::None => 0,
            LeakPolicy::AllButOnePerSide => full & !lowest_bit(side_a) & !lowest_bit(side_b),
            LeakPolicy::All => full,
            LeakPolicy::SideA => side_a,
            LeakPolicy::SideB => side_b,
            LeakPolicy::Mask(m) => m,
        }
    }

    fn validate(self, n: usize) -> Result<()> {
        match self {
            LeakPolicy::Mask(m) if m & !full_mask(n) != 0 => {
                Err(Error::InvalidMask(format!("mask {m:#b} names parties beyond {n}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for LeakPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeakPolicy::None => f.write_str("none"),
            LeakPolicy::AllButOnePerSide => f.write_str("all-but-one"),
            LeakPolicy::All => f.write_str("all"),
            LeakPolicy::SideA => f.write_str("side-a"),
            LeakPolicy::SideB => f.write_str("side-b"),
            LeakPolicy::Mask(m) => write!(f, "{}", PartySubset::from_mask(*m)),
        }
    }
}

impl FromStr for LeakPolicy {
    type Err = Error;

    /// `none`, `all-but-one`, `all`, `side-a`, `side-b`, or a party list like `1,2,4`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(LeakPolicy::None),
            "all-but-one" => Ok(LeakPolicy::AllButOnePerSide),
            "all" => Ok(LeakPolicy::All),
            "side-a" => Ok(LeakPolicy::SideA),
            "side-b" => Ok(LeakPolicy::SideB),
            list => {
                let parties = list
                    .split(',')
                    .map(|p| p.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::InvalidMask(format!("cannot read leak policy {list:?}")))?;
                let subset = PartySubset::from_parties(&parties).map_err(|e| Error::InvalidMask(e.to_string()))?;
                Ok(LeakPolicy::Mask(subset.mask()))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdversaryModel {
    None,
    /// Eve prepares the boxes from the four-strategy mixture across `guess`
    /// and learns the strategy index `λ` of every round.
    BisepBox {
        guess: Bipartition,
    },
    Leakage(LeakPolicy),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grouping {
    Fixed(Bipartition),
    Random,
}

/// One protocol round. Party subsets are bit masks (party 1 in bit 0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub inputs: u32,
    pub outputs: u32,
    /// Parties of group 1 (MSS: the group holding party 1; QKD: side A).
    pub group: u32,
    /// Input sums mod 4 of group 1 and group 2.
    pub announcements: [u8; 2],
    pub sifted: bool,
    pub keys: Option<[u8; 2]>,
    /// Strategy index 1..=4 when the source is Eve's biseparable mixture.
    pub lambda: Option<u8>,
    /// Group-1 bipartition Eve assumed, when it varies per round.
    pub eve_group: Option<u32>,
    pub leaked: Option<u32>,
    /// Eve's guess of group 1's key bit.
    pub eve_guess: Option<u8>,
}

impl RoundRecord {
    fn agrees(&self) -> Option<bool> {
        let [k1, k2] = self.keys?;
        let flip = u8::from((self.announcements[0] + self.announcements[1]) % 4 == 2);
        Some(k1 == k2 ^ flip)
    }

    fn eve_correct(&self) -> Option<bool> {
        Some(self.eve_guess? == self.keys?[0])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EveStats {
    /// Sifted rounds on which Eve guessed.
    pub attempts: u64,
    pub successes: u64,
    pub success_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rounds: u64,
    pub sifted: u64,
    pub sift_rate: f64,
    pub agreements: u64,
    pub agreement_rate: f64,
    /// Number of 1 bits in each group's sifted key stream.
    pub key_ones: [u64; 2],
    pub eve: Option<EveStats>,
}

impl Summary {
    pub fn from_records(records: &[RoundRecord]) -> Summary {
        let rounds = records.len() as u64;
        let sifted = records.iter().filter(|r| r.sifted).count() as u64;
        let agreements = records.iter().filter(|r| r.agrees() == Some(true)).count() as u64;
        let mut key_ones = [0u64; 2];
        for k in records.iter().filter_map(|r| r.keys) {
            key_ones[0] += u64::from(k[0]);
            key_ones[1] += u64::from(k[1]);
        }
        let outcomes: Vec<bool> = records.iter().filter_map(RoundRecord::eve_correct).collect();
        let eve = records.iter().any(|r| r.eve_guess.is_some()).then(|| {
            let successes = outcomes.iter().filter(|&&c| c).count() as u64;
            EveStats {
                attempts: outcomes.len() as u64,
                successes,
                success_rate: rate(successes, outcomes.len() as u64),
            }
        });
        Summary {
            rounds,
            sifted,
            sift_rate: rate(sifted, rounds),
            agreements,
            agreement_rate: rate(agreements, sifted),
            key_ones,
            eve,
        }
    }
}

fn rate(k: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        k as f64 / total as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub protocol: ProtocolKind,
    pub n: usize,
    pub rounds: u64,
    pub seed: u64,
    pub records: Vec<RoundRecord>,
    pub summary: Summary,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    round: u64,
    inputs: &'a str,
    outputs: &'a str,
    group: &'a str,
    announcement_1: u8,
    announcement_2: u8,
    sifted: bool,
    key_1: Option<u8>,
    key_2: Option<u8>,
    lambda: Option<u8>,
    eve_guess: Option<u8>,
}

impl Transcript {
    /// Summary without the per-round records.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "protocol": self.protocol,
            "n": self.n,
            "rounds": self.rounds,
            "seed": self.seed,
            "summary": self.summary,
        })
    }

    /// One line per round; bit strings list party 1 first.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            let inputs = bit_string(r.inputs, self.n);
            let outputs = bit_string(r.outputs, self.n);
            let group = split_label(self.n, r.group);
            w.serialize(CsvRow {
                round: r.round,
                inputs: &inputs,
                outputs: &outputs,
                group: &group,
                announcement_1: r.announcements[0],
                announcement_2: r.announcements[1],
                sifted: r.sifted,
                key_1: r.keys.map(|k| k[0]),
                key_2: r.keys.map(|k| k[1]),
                lambda: r.lambda,
                eve_guess: r.eve_guess,
            })
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv is utf-8")
    }
}

fn bit_string(word: u32, n: usize) -> String {
    (0..n).map(|i| if (word >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

fn split_label(n: usize, group: u32) -> String {
    let list = |m: u32| {
        PartySubset::from_mask(m)
            .parties()
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("{}|{}", list(group), list(full_mask(n) & !group))
}

fn lowest_bit(m: u32) -> u32 {
    m & m.wrapping_neg()
}

fn parity(word: u32) -> u8 {
    (word.count_ones() % 2) as u8
}

fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

/// Samplers for the honest GHZ source and for every μ box that can appear
/// in a biseparable strategy on `n` parties.
struct Sources {
    n: usize,
    ghz: Option<Sampler>,
    /// `boxes[k - 1][f]` samples the `k`-party box of family `f`.
    boxes: Vec<[Sampler; 4]>,
}

impl Sources {
    fn new(n: usize, ghz: bool, bisep: bool) -> Result<Self> {
        let ghz = if ghz {
            Some(Sampler::new(&ghz_behavior(n)?))
        } else {
            None
        };
        let boxes = if bisep {
            (1..n)
                .map(|k| {
                    let s = |f| ns_box(k, f).map(|b| Sampler::new(&b));
                    Ok([
                        s(BoxFamily::Mu1)?,
                        s(BoxFamily::Mu2)?,
                        s(BoxFamily::Mu3)?,
                        s(BoxFamily::Mu4)?,
                    ])
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Sources { n, ghz, boxes })
    }

    fn sample_ghz<R: Rng>(&self, x: u32, rng: &mut R) -> u32 {
        self.ghz.as_ref().expect("GHZ source prepared").sample(x, rng)
    }

    /// Samples strategy `lambda` (0-based) across the bipartition with group `g`.
    fn sample_bisep<R: Rng>(&self, g: u32, lambda: usize, x: u32, rng: &mut R) -> u32 {
        let h = full_mask(self.n) & !g;
        let (fg, fh) = GHZ_STRATEGIES[lambda];
        let draw = |mask: u32, fam: BoxFamily, rng: &mut R| {
            let k = mask.count_ones() as usize;
            let local = self.boxes[k - 1][family_index(fam)].sample(compress(x, mask), rng);
            expand(local, mask)
        };
        let ag = draw(g, fg, rng);
        let ah = draw(h, fh, rng);
        ag | ah
    }
}

fn family_index(f: BoxFamily) -> usize {
    match f {
        BoxFamily::Mu1 => 0,
        BoxFamily::Mu2 => 1,
        BoxFamily::Mu3 => 2,
        BoxFamily::Mu4 => 3,
    }
}

/// Eve's guess of the key bit of `target` when she prepared strategy
/// `lambda` across the bipartition with group `eve_g`. She predicts the
/// parity of the box she believes `target` holds; if `target` is not one of
/// her two groups she has nothing better than a fixed guess.
pub fn bisep_guess(n: usize, eve_g: u32, lambda: usize, target: u32, inputs: u32) -> u8 {
    let (fg, fh) = GHZ_STRATEGIES[lambda];
    let eve_h = full_mask(n) & !eve_g;
    let weight = (inputs & target).count_ones() as usize;
    if target == eve_g {
        fg.parity_for_weight(weight)
    } else if target == eve_h {
        fh.parity_for_weight(weight)
    } else {
        0
    }
}

/// Eve's guess of side A's key bit from the leaked outputs: exact if all of
/// A leaked, exact via the announced sign if all of B leaked on a sifted
/// round, otherwise the parity of A's leaked bits (any single hidden output
/// leaves the key bit uniform).
pub fn leakage_guess(n: usize, side_a: u32, leaked: u32, outputs: u32, total_mod4: u8) -> u8 {
    let side_b = full_mask(n) & !side_a;
    if side_a & !leaked == 0 {
        parity(outputs & side_a)
    } else if side_b & !leaked == 0 && total_mod4 % 2 == 0 {
        parity(outputs & side_b) ^ u8::from(total_mod4 == 2)
    } else {
        parity(outputs & side_a & leaked)
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_round(
    n: usize,
    round: u64,
    inputs: u32,
    outputs: u32,
    group: u32,
    lambda: Option<usize>,
    eve_group: Option<u32>,
    adversary: &AdversaryModel,
) -> RoundRecord {
    let other = full_mask(n) & !group;
    let announcements = [
        ((inputs & group).count_ones() % 4) as u8,
        ((inputs & other).count_ones() % 4) as u8,
    ];
    let total = (announcements[0] + announcements[1]) % 4;
    let sifted = total % 2 == 0;
    let keys = sifted.then(|| [parity(outputs & group), parity(outputs & other)]);

    let (leaked, eve_guess) = match adversary {
        AdversaryModel::None => (None, None),
        AdversaryModel::BisepBox { guess } => {
            let eve_g = eve_group.unwrap_or(guess.group().mask());
            let lambda = lambda.expect("biseparable source records λ");
            (None, sifted.then(|| bisep_guess(n, eve_g, lambda, group, inputs)))
        }
        AdversaryModel::Leakage(policy) => {
            let leaked = policy.leaked(n, group);
            (
                Some(leaked),
                sifted.then(|| leakage_guess(n, group, leaked, outputs, total)),
            )
        }
    };

    RoundRecord {
        round,
        inputs,
        outputs,
        group,
        announcements,
        sifted,
        keys,
        lambda: lambda.map(|l| l as u8 + 1),
        eve_group,
        leaked,
        eve_guess,
    }
}

fn check_parties(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::TooFewParties { n, min });
    }
    if n > MAX_PARTIES {
        return Err(Error::CapacityExceeded { n, max: MAX_PARTIES });
    }
    Ok(())
}

fn check_bipartition(n: usize, bp: &Bipartition) -> Result<()> {
    if bp.n() != n {
        return Err(Error::InvalidBipartition(format!(
            "{bp} splits {} parties, protocol has {n}",
            bp.n()
        )));
    }
    Ok(())
}

fn check_adversary(n: usize, adversary: &AdversaryModel) -> Result<()> {
    match adversary {
        AdversaryModel::None => Ok(()),
        AdversaryModel::BisepBox { guess } => check_bipartition(n, guess),
        AdversaryModel::Leakage(policy) => policy.validate(n),
    }
}

fn run_rounds(rounds: u64, f: impl Fn(u64) -> RoundRecord + Sync + Send) -> Vec<RoundRecord> {
    (0..rounds).into_par_iter().map(f).collect()
}

/// Multipartite secret sharing: uniform inputs, outputs from the source,
/// then the grouping into two groups is revealed.
pub fn run_mss(n: usize, rounds: u64, seed: u64, grouping: Grouping, adversary: AdversaryModel) -> Result<Transcript> {
    check_parties(n, 3)?;
    if let Grouping::Fixed(bp) = &grouping {
        check_bipartition(n, bp)?;
    }
    check_adversary(n, &adversary)?;
    let bisep = matches!(adversary, AdversaryModel::BisepBox { .. });
    let sources = Sources::new(n, !bisep, bisep)?;
    let splits = enumerate_bipartitions(n);

    let records = run_rounds(rounds, |round| {
        let mut rng = round_rng(seed, round);
        let x = rng.random::<u32>() & full_mask(n);
        let (a, lambda) = match &adversary {
            AdversaryModel::BisepBox { guess } => {
                let lambda = rng.random_range(0..4usize);
                (
                    sources.sample_bisep(guess.group().mask(), lambda, x, &mut rng),
                    Some(lambda),
                )
            }
            _ => (sources.sample_ghz(x, &mut rng), None),
        };
        let group = match &grouping {
            Grouping::Fixed(bp) => bp.group().mask(),
            Grouping::Random => splits[rng.random_range(0..splits.len())].group().mask(),
        };
        finish_round(n, round, x, a, group, lambda, None, &adversary)
    });

    Ok(Transcript {
        protocol: ProtocolKind::Mss,
        n,
        rounds,
        seed,
        summary: Summary::from_records(&records),
        records,
    })
}

/// Leakage-resilient QKD: each round a uniformly random nonempty proper
/// subset of the subsystems goes to A, the rest to B.
pub fn run_qkd(n: usize, rounds: u64, seed: u64, adversary: AdversaryModel) -> Result<Transcript> {
    check_parties(n, 2)?;
    check_adversary(n, &adversary)?;
    let bisep = matches!(adversary, AdversaryModel::BisepBox { .. });
    let sources = Sources::new(n, !bisep, bisep)?;
    let proper = u64::from(full_mask(n)) - 1;

    let records = run_rounds(rounds, |round| {
        let mut rng = round_rng(seed, round);
        let x = rng.random::<u32>() & full_mask(n);
        let (a, lambda) = match &adversary {
            AdversaryModel::BisepBox { guess } => {
                let lambda = rng.random_range(0..4usize);
                (
                    sources.sample_bisep(guess.group().mask(), lambda, x, &mut rng),
                    Some(lambda),
                )
            }
            _ => (sources.sample_ghz(x, &mut rng), None),
        };
        let side_a = rng.random_range(1..=proper) as u32;
        finish_round(n, round, x, a, side_a, lambda, None, &adversary)
    });

    Ok(Transcript {
        protocol: ProtocolKind::Qkd,
        n,
        rounds,
        seed,
        summary: Summary::from_records(&records),
        records,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageStats {
    pub n: usize,
    pub rounds: u64,
    pub seed: u64,
    pub policy: String,
    pub sifted: u64,
    pub agreement_rate: f64,
    pub eve: EveStats,
}

pub fn run_qkd_leakage(n: usize, rounds: u64, seed: u64, policy: LeakPolicy) -> Result<LeakageStats> {
    let t = run_qkd(n, rounds, seed, AdversaryModel::Leakage(policy))?;
    Ok(LeakageStats {
        n,
        rounds,
        seed,
        policy: policy.to_string(),
        sifted: t.summary.sifted,
        agreement_rate: t.summary.agreement_rate,
        eve: t.summary.eve.expect("leakage adversary always guesses"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub n: usize,
    pub rounds: u64,
    pub seed: u64,
    pub matches: u64,
    pub match_rate: f64,
    /// `1 / (2^(n-1) - 1)`.
    pub expected_match_rate: f64,
    pub matched: EveStats,
    pub mismatched: EveStats,
    pub overall: EveStats,
    /// `m + (1 - m)/2` with `m` the expected match rate.
    pub expected_success_rate: f64,
}

/// Eve prepares biseparable boxes across a uniformly guessed bipartition
/// while the parties pick their grouping uniformly and independently.
pub fn eve_partition_success(n: usize, rounds: u64, seed: u64) -> Result<PartitionStats> {
    check_parties(n, 3)?;
    let sources = Sources::new(n, false, true)?;
    let splits = enumerate_bipartitions(n);
    let adversary = AdversaryModel::BisepBox { guess: splits[0] };

    let records = run_rounds(rounds, |round| {
        let mut rng = round_rng(seed, round);
        let x = rng.random::<u32>() & full_mask(n);
        let lambda = rng.random_range(0..4usize);
        let eve_g = splits[rng.random_range(0..splits.len())].group().mask();
        let a = sources.sample_bisep(eve_g, lambda, x, &mut rng);
        let group = splits[rng.random_range(0..splits.len())].group().mask();
        finish_round(n, round, x, a, group, Some(lambda), Some(eve_g), &adversary)
    });

    let stats = |filter: &dyn Fn(&RoundRecord) -> bool| {
        let outcomes: Vec<bool> = records
            .iter()
            .filter(|r| filter(r))
            .filter_map(RoundRecord::eve_correct)
            .collect();
        let successes = outcomes.iter().filter(|&&c| c).count() as u64;
        EveStats {
            attempts: outcomes.len() as u64,
            successes,
            success_rate: rate(successes, outcomes.len() as u64),
        }
    };
    let is_match = |r: &RoundRecord| r.eve_group == Some(r.group);
    let matches = records.iter().filter(|r| is_match(r)).count() as u64;
    let m = 1.0 / (splits.len() as f64);
    Ok(PartitionStats {
        n,
        rounds,
        seed,
        matches,
        match_rate: rate(matches, rounds),
        expected_match_rate: m,
        matched: stats(&|r| is_match(r)),
        mismatched: stats(&|r| !is_match(r)),
        overall: stats(&|_| true),
        expected_success_rate: m + (1.0 - m) / 2.0,
    })
}

/// Exact probability, over uniform sifted inputs, `λ` and the box outputs,
/// that [`bisep_guess`] recovers the key bit of `target` when Eve prepared
/// the mixture across `eve`. Enumerates every outcome, so it is meant for
/// small `n`.
pub fn bisep_guess_exact_success(eve: &Bipartition, target: PartySubset) -> Result<Rational> {
    let n = eve.n();
    let g = eve.group();
    let h = eve.complement();
    let mut hits = Rational::zero();
    let mut sifted_inputs = 0i64;
    let products = GHZ_STRATEGIES
        .iter()
        .map(|&(fg, fh)| tensor(&[(g, ns_box(g.len(), fg)?), (h, ns_box(h.len(), fh)?)]))
        .collect::<Result<Vec<Behavior>>>()?;
    let t = target.mask();
    for x in 0..(1u32 << n) {
        if x.count_ones() % 2 != 0 {
            continue;
        }
        sifted_inputs += 1;
        for (lambda, b) in products.iter().enumerate() {
            let guess = bisep_guess(n, g.mask(), lambda, t, x);
            for a in 0..(1u32 << n) {
                let p = b.prob(x, a);
                if !p.is_zero() && parity(a & t) == guess {
                    hits += p;
                }
            }
        }
    }
    Ok(hits / rational::int(4 * sifted_inputs))
}

/// Output counts `counts[x·2^n + a]` from `rounds` uniform-input draws of
/// the honest source (`split = None`) or of the biseparable mixture across
/// `split`.
pub fn empirical_counts(n: usize, split: Option<&Bipartition>, rounds: u64, seed: u64) -> Result<Vec<u64>> {
    check_parties(n, 2)?;
    if let Some(bp) = split {
        check_bipartition(n, bp)?;
    }
    let sources = Sources::new(n, split.is_none(), split.is_some())?;
    let size = 1usize << n;
    let chunk = 1u64 << 14;
    let chunks = rounds.div_ceil(chunk);
    let partial: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; size * size];
            for round in c * chunk..((c + 1) * chunk).min(rounds) {
                let mut rng = round_rng(seed, round);
                let x = rng.random::<u32>() & full_mask(n);
                let a = match split {
                    Some(bp) => {
                        let lambda = rng.random_range(0..4usize);
                        sources.sample_bisep(bp.group().mask(), lambda, x, &mut rng)
                    }
                    None => sources.sample_ghz(x, &mut rng),
                };
                counts[x as usize * size + a as usize] += 1;
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; size * size];
    for counts in partial {
        for (t, c) in total.iter_mut().zip(counts) {
            *t += c;
        }
    }
    Ok(total)
}
