//! Conditional distributions `P(a|x)` for `n` parties with binary inputs and
//! binary outputs.
//!
//! Tables are dense, of length `4^n`, with the entry for input word `x` and
//! output word `a` stored at `x * 2^n + a`. Party `i` (1-based) occupies bit
//! `i - 1` of both words. An output bit `a' = 0` stands for the outcome `+1`
//! and `a' = 1` for `-1`, so the product of outcomes on a subset `S` is
//! `(-1)^(sum of a'_i over S)`.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Largest party count accepted for dense tables (`4^12` entries).
pub const MAX_PARTIES: usize = 12;

/// Tag stored in the JSON form; names the index order and the outcome encoding.
pub const ENCODING: &str = "x-lsb-party1;a0=plus";

/// Set of parties as a bitmask; party `i` is bit `i - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct PartySubset(u32);

impl PartySubset {
    pub const fn from_mask(mask: u32) -> Self {
        PartySubset(mask)
    }

    /// Builds a subset from 1-based party labels.
    pub fn from_parties(parties: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &p in parties {
            if p == 0 || p > 32 {
                return Err(Error::Parse(format!("party label {p} out of range")));
            }
            mask |= 1 << (p - 1);
        }
        Ok(PartySubset(mask))
    }

    pub fn full(n: usize) -> Self {
        PartySubset(full_mask(n))
    }

    pub fn single(party: usize) -> Self {
        PartySubset(1 << (party - 1))
    }

    pub const fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, party: usize) -> bool {
        (1..=32).contains(&party) && self.0 & (1 << (party - 1)) != 0
    }

    pub fn fits(self, n: usize) -> bool {
        self.0 & !full_mask(n) == 0
    }

    pub fn complement(self, n: usize) -> Self {
        PartySubset(!self.0 & full_mask(n))
    }

    /// 1-based labels in increasing order.
    pub fn parties(self) -> Vec<usize> {
        (0..32).filter(|i| self.0 & (1 << i) != 0).map(|i| i + 1).collect()
    }
}

impl fmt::Display for PartySubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.parties().iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Gathers the bits of `word` selected by `mask` into the low bits.
pub fn compress(word: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let bit = m.trailing_zeros();
        out |= ((word >> bit) & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Inverse of [`compress`]: scatters the low bits of `bits` onto `mask`.
pub fn expand(bits: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let bit = m.trailing_zeros();
        out |= ((bits >> k) & 1) << bit;
        k += 1;
        m &= m - 1;
    }
    out
}

/// `(-1)^(popcount(a & s))`, the product of the `±1` outcomes on `s`.
#[inline]
pub fn parity_sign(a: u32, s: u32) -> i32 {
    if (a & s).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub(crate) fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_PARTIES {
        Err(Error::CapacityExceeded { n, max: MAX_PARTIES })
    } else {
        Ok(())
    }
}

/// Outcome of the non-signaling check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NsReport {
    NonSignaling,
    Signaling(SignalingWitness),
}

impl NsReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, NsReport::NonSignaling)
    }
}

/// The marginal on `subset` at outputs `outputs` (compressed onto `subset`)
/// differs between the two full input words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignalingWitness {
    pub subset: PartySubset,
    pub inputs: (u32, u32),
    pub outputs: u32,
}

#[derive(Clone, Debug)]
pub struct Behavior {
    n: usize,
    table: Vec<Rational>,
    ns: OnceLock<NsReport>,
}

impl PartialEq for Behavior {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.table == other.table
    }
}

impl Eq for Behavior {}

impl Behavior {
    /// Validates length, nonnegativity and per-input normalization.
    pub fn new(n: usize, table: Vec<Rational>) -> Result<Self> {
        check_capacity(n)?;
        let expected = 1usize << (2 * n);
        if table.len() != expected {
            return Err(Error::LengthMismatch {
                n,
                expected,
                found: table.len(),
            });
        }
        if let Some(index) = table.iter().position(|p| p.is_negative()) {
            return Err(Error::NegativeEntry { index });
        }
        let outputs = 1usize << n;
        for (input, row) in table.chunks(outputs).enumerate() {
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(Error::NotNormalized { input });
            }
        }
        Ok(Self::from_valid(n, table))
    }

    pub(crate) fn from_valid(n: usize, table: Vec<Rational>) -> Self {
        debug_assert_eq!(table.len(), 1 << (2 * n));
        Behavior {
            n,
            table,
            ns: OnceLock::new(),
        }
    }

    /// Builds a table from `f(x, a)`, validating the result.
    pub fn from_fn(n: usize, mut f: impl FnMut(u32, u32) -> Rational) -> Result<Self> {
        check_capacity(n)?;
        let size = 1u32 << n;
        let mut table = Vec::with_capacity(1 << (2 * n));
        for x in 0..size {
            for a in 0..size {
                table.push(f(x, a));
            }
        }
        Behavior::new(n, table)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        let p = rational::pow2(-(n as i64));
        Behavior::from_fn(n, |_, _| p.clone())
    }

    /// Local deterministic box: party `i` answers `responses[i](x_i)`.
    /// Each response is encoded as two bits: bit 0 is the output on input 0,
    /// bit 1 the output on input 1.
    pub fn deterministic(responses: &[u8]) -> Result<Self> {
        let n = responses.len();
        Behavior::from_fn(n, |x, a| {
            let hit = (0..n).all(|i| {
                let xi = (x >> i) & 1;
                let out = (responses[i] as u32 >> xi) & 1;
                (a >> i) & 1 == out
            });
            if hit {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn into_table(self) -> Vec<Rational> {
        self.table
    }

    #[inline]
    pub fn index(&self, x: u32, a: u32) -> usize {
        ((x as usize) << self.n) | a as usize
    }

    #[inline]
    pub fn prob(&self, x: u32, a: u32) -> &Rational {
        &self.table[self.index(x, a)]
    }

    pub fn row(&self, x: u32) -> &[Rational] {
        let w = 1usize << self.n;
        let start = (x as usize) * w;
        &self.table[start..start + w]
    }

    /// Cached non-signaling check.
    pub fn ns_report(&self) -> &NsReport {
        self.ns.get_or_init(|| check_non_signaling(self))
    }

    pub fn is_non_signaling(&self) -> bool {
        self.ns_report().is_ok()
    }

    /// Marginal on `s` for inputs `x` (bits outside `s` are ignored).
    /// Entry `k` is the probability of the outputs `expand(k, s)`.
    pub fn marginal(&self, s: PartySubset, x: u32) -> Result<Vec<Rational>> {
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        if !s.fits(self.n) {
            return Err(Error::SubsetOutOfRange {
                mask: s.mask(),
                n: self.n,
            });
        }
        if let NsReport::Signaling(w) = self.ns_report() {
            return Err(Error::SignalingBehavior {
                subset: w.subset.to_string(),
                inputs: w.inputs,
            });
        }
        Ok(self.marginal_at(s.mask(), x & s.mask()))
    }

    fn marginal_at(&self, s: u32, x: u32) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); 1 << s.count_ones()];
        for (a, p) in self.row(x).iter().enumerate() {
            if !p.is_zero() {
                out[compress(a as u32, s) as usize] += p;
            }
        }
        out
    }

    /// Expectation of the product of the `±1` outcomes on `s` at input `x`.
    pub fn correlator(&self, s: PartySubset, x: u32) -> Rational {
        let mut plus = Rational::zero();
        let mut minus = Rational::zero();
        for (a, p) in self.row(x).iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if parity_sign(a as u32, s.mask()) > 0 {
                plus += p;
            } else {
                minus += p;
            }
        }
        plus - minus
    }

    pub fn full_correlator(&self, x: u32) -> Rational {
        self.correlator(PartySubset::full(self.n), x)
    }

    /// Correlators in the order of [`correlator_coordinates`]; inputs outside
    /// each subset are set to 0. For non-signaling behaviors this vector
    /// determines the table.
    pub fn correlator_vector(&self) -> Vec<Rational> {
        correlator_coordinates(self.n)
            .into_iter()
            .map(|(s, x)| self.correlator(PartySubset(s), x))
            .collect()
    }

    pub fn to_f64_table(&self) -> Vec<f64> {
        self.table.iter().map(rational::to_f64).collect()
    }

    pub fn to_document(&self) -> BehaviorDocument {
        BehaviorDocument {
            n: self.n,
            encoding: ENCODING.to_string(),
            table: self.table.iter().map(rational::to_text).collect(),
        }
    }

    pub fn from_document(doc: &BehaviorDocument) -> Result<Self> {
        if doc.encoding != ENCODING {
            return Err(Error::Parse(format!(
                "unsupported encoding {:?}, expected {ENCODING:?}",
                doc.encoding
            )));
        }
        let table = doc
            .table
            .iter()
            .map(|s| rational::parse(s))
            .collect::<Result<Vec<_>>>()?;
        Behavior::new(doc.n, table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("behavior serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BehaviorDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Behavior::from_document(&doc)
    }
}

/// Wire form of a [`Behavior`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorDocument {
    pub n: usize,
    pub encoding: String,
    pub table: Vec<String>,
}

impl Serialize for Behavior {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_document().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Behavior {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = BehaviorDocument::deserialize(deserializer)?;
        Behavior::from_document(&doc).map_err(serde::de::Error::custom)
    }
}

/// `(subset mask, input word)` pairs indexing the correlator representation:
/// every nonempty subset in increasing mask order, and for each, every input
/// word supported on it in increasing order. There are `3^n - 1` of them.
pub fn correlator_coordinates(n: usize) -> Vec<(u32, u32)> {
    let mut coords = Vec::new();
    for s in 1..=full_mask(n) {
        let k = s.count_ones();
        for bits in 0..(1u32 << k) {
            coords.push((s, expand(bits, s)));
        }
    }
    coords
}

fn check_non_signaling(b: &Behavior) -> NsReport {
    let n = b.n;
    let full = full_mask(n);
    for j in 0..n {
        let bit = 1u32 << j;
        let rest = full & !bit;
        for x in 0..=full {
            if x & bit != 0 {
                continue;
            }
            let flipped = x | bit;
            let m0 = b.marginal_at(rest, x);
            let m1 = b.marginal_at(rest, flipped);
            if let Some(k) = (0..m0.len()).find(|&k| m0[k] != m1[k]) {
                return NsReport::Signaling(SignalingWitness {
                    subset: PartySubset(rest),
                    inputs: (x, flipped),
                    outputs: k as u32,
                });
            }
        }
    }
    NsReport::NonSignaling
}

pub fn make_behavior(n: usize, table: Vec<Rational>) -> Result<Behavior> {
    Behavior::new(n, table)
}

pub fn is_non_signaling(b: &Behavior) -> NsReport {
    b.ns_report().clone()
}

pub fn marginal(b: &Behavior, s: PartySubset, x: u32) -> Result<Vec<Rational>> {
    b.marginal(s, x)
}

pub fn correlator(b: &Behavior, s: PartySubset, x: u32) -> Rational {
    b.correlator(s, x)
}

/// Checks that the subsets are disjoint, cover `[n]` and match the factor sizes.
fn check_partition<'a>(n: usize, parts: impl IntoIterator<Item = (PartySubset, &'a Behavior)>) -> Result<()> {
    let mut seen = 0u32;
    for (s, b) in parts {
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        if !s.fits(n) {
            return Err(Error::SubsetOutOfRange { mask: s.mask(), n });
        }
        if s.mask() & seen != 0 {
            return Err(Error::OverlappingSubsets {
                overlap: s.mask() & seen,
            });
        }
        if s.len() != b.n() {
            return Err(Error::SizeMismatch {
                subset_len: s.len(),
                behavior_n: b.n(),
            });
        }
        seen |= s.mask();
    }
    let missing = full_mask(n) & !seen;
    if missing != 0 {
        return Err(Error::IncompleteCover { missing });
    }
    Ok(())
}

/// Product behavior of independent boxes on disjoint groups covering `[n]`,
/// where `n` is the total number of parties.
pub fn tensor(parts: &[(PartySubset, Behavior)]) -> Result<Behavior> {
    let n: usize = parts.iter().map(|(s, _)| s.len()).sum();
    check_capacity(n)?;
    check_partition(n, parts.iter().map(|(s, b)| (*s, b)))?;
    Ok(Behavior::from_valid(n, tensor_table(n, parts)))
}

fn tensor_table(n: usize, parts: &[(PartySubset, Behavior)]) -> Vec<Rational> {
    let size = 1u32 << n;
    let mut table = Vec::with_capacity(1 << (2 * n));
    for x in 0..size {
        let local_x: Vec<u32> = parts.iter().map(|(s, _)| compress(x, s.mask())).collect();
        for a in 0..size {
            let mut value = Rational::one();
            for ((s, b), &lx) in parts.iter().zip(&local_x) {
                let p = b.prob(lx, compress(a, s.mask()));
                if p.is_zero() {
                    value = Rational::zero();
                    break;
                }
                value *= p;
            }
            table.push(value);
        }
    }
    table
}

/// One weighted product term of a [`Mixture`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureTerm {
    #[serde(with = "rational_text")]
    pub weight: Rational,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    #[serde(with = "subset_labels")]
    pub parties: PartySubset,
    pub behavior: Behavior,
}

/// Convex combination of product behaviors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMixture")]
pub struct Mixture {
    n: usize,
    terms: Vec<MixtureTerm>,
}

#[derive(Deserialize)]
struct RawMixture {
    n: usize,
    terms: Vec<MixtureTerm>,
}

impl TryFrom<RawMixture> for Mixture {
    type Error = Error;

    fn try_from(raw: RawMixture) -> Result<Self> {
        Mixture::new(raw.n, raw.terms)
    }
}

impl Mixture {
    pub fn new(n: usize, terms: Vec<MixtureTerm>) -> Result<Self> {
        check_capacity(n)?;
        if terms.is_empty() {
            return Err(Error::EmptyMixture);
        }
        let mut sum = Rational::zero();
        for t in &terms {
            if t.weight.is_negative() {
                return Err(Error::NegativeWeight {
                    weight: rational::to_text(&t.weight),
                });
            }
            sum += &t.weight;
            check_partition(n, t.factors.iter().map(|f| (f.parties, &f.behavior)))?;
        }
        if !sum.is_one() {
            return Err(Error::WeightSumNotOne {
                sum: rational::to_text(&sum),
            });
        }
        Ok(Mixture { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[MixtureTerm] {
        &self.terms
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("mixture serializes")
    }
}

/// Weighted sum of the products in `m`.
pub fn mix(m: &Mixture) -> Result<Behavior> {
    let n = m.n;
    let mut table = vec![Rational::zero(); 1 << (2 * n)];
    for term in &m.terms {
        if term.weight.is_zero() {
            continue;
        }
        let parts: Vec<(PartySubset, Behavior)> =
            term.factors.iter().map(|f| (f.parties, f.behavior.clone())).collect();
        check_partition(n, parts.iter().map(|(s, b)| (*s, b)))?;
        for (acc, p) in table.iter_mut().zip(tensor_table(n, &parts)) {
            if !p.is_zero() {
                *acc += p * &term.weight;
            }
        }
    }
    Behavior::new(n, table)
}

/// Inverse-CDF sampler over each input row, outputs in ascending order.
///
/// Cumulative sums are formed exactly and only then rounded, so an output of
/// probability zero shares its cumulative value with its predecessor and can
/// never be selected.
#[derive(Clone, Debug)]
pub struct Sampler {
    n: usize,
    cumulative: Vec<f64>,
}

impl Sampler {
    pub fn new(b: &Behavior) -> Self {
        let mut cumulative = Vec::with_capacity(b.table.len());
        for x in 0..(1u32 << b.n) {
            let mut acc = Rational::zero();
            for p in b.row(x) {
                acc += p;
                cumulative.push(rational::to_f64(&acc));
            }
        }
        Sampler { n: b.n, cumulative }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample<R: Rng + ?Sized>(&self, x: u32, rng: &mut R) -> u32 {
        let w = 1usize << self.n;
        let row = &self.cumulative[x as usize * w..(x as usize + 1) * w];
        let u: f64 = rng.random();
        let k = row.partition_point(|&c| c <= u);
        // u < 1 = row[w - 1], so k < w
        k.min(w - 1) as u32
    }
}

/// Draws one output word for input `x`.
pub fn sample<R: Rng + ?Sized>(b: &Behavior, x: u32, rng: &mut R) -> u32 {
    let mut acc = Rational::zero();
    let row: Vec<f64> = b
        .row(x)
        .iter()
        .map(|p| {
            acc += p;
            rational::to_f64(&acc)
        })
        .collect();
    let u: f64 = rng.random();
    row.partition_point(|&c| c <= u).min(row.len() - 1) as u32
}

mod rational_text {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational::to_text(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        rational::parse(&text).map_err(serde::de::Error::custom)
    }
}

mod subset_labels {
    use super::*;

    pub fn serialize<S: Serializer>(p: &PartySubset, s: S) -> std::result::Result<S::Ok, S::Error> {
        p.parties().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<PartySubset, D::Error> {
        let labels = Vec::<usize>::deserialize(d)?;
        PartySubset::from_parties(&labels).map_err(serde::de::Error::custom)
    }
}
