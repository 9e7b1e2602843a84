//! Problem instances and their randomness.
//!
//! An [`Instance`] is a list of cards, each carrying two distinct positive
//! values. Ranking the 2n values from largest to smallest induces the couple
//! structure: `couple(i)` is the rank written on the other side of `Y_i`'s
//! card, and `k` is the smallest rank whose couple sits above it in the
//! ranking. All outcome distributions in this crate are indexed by rank, so
//! algorithms work on rank indices and map back to raw values only at the
//! boundary.
//!
//! Randomness comes in two equivalent views:
//! * discrete — a fair coin per card picks the face-up side, and a uniform
//!   permutation of the cards fixes the order in which hidden sides are
//!   flipped;
//! * continuous — every value gets an arrival time in (-1, 1], with the two
//!   sides of a card offset by exactly one time unit; negative times are
//!   face up, positive times are flipped in increasing order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum `n` accepted by exhaustive enumeration (2^6 * 6! = 46080 draws).
pub const ENUMERATION_CAP: usize = 6;

/// One-based rank into the descending ordering Y_1 > ... > Y_2n.
pub type Rank = usize;

/// A validated instance: n cards with 2n pairwise-distinct positive values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pairs: Vec<(f64, f64)>,
}

impl Instance {
    /// Validates and builds an instance from card pairs.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::BadInstanceFile("no cards".into()));
        }
        let mut all: Vec<f64> = Vec::with_capacity(pairs.len() * 2);
        for &(a, b) in &pairs {
            for v in [a, b] {
                if !v.is_finite() || v <= 0.0 {
                    return Err(Error::NonPositiveValue(v));
                }
                all.push(v);
            }
        }
        all.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in all.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateValue(w[0]));
            }
        }
        Ok(Self { pairs })
    }

    /// Number of cards.
    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    /// The raw card pairs in input order.
    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Computes the ranking and couple structure.
    pub fn rank(&self) -> RankedView {
        RankedView::build(self)
    }

    /// FNV-1a digest of the card values, stable across runs.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |x: u64| {
            for byte in x.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(self.pairs.len() as u64);
        for &(a, b) in &self.pairs {
            eat(a.to_bits());
            eat(b.to_bits());
        }
        h
    }

    /// Parses the JSON instance format `{"pairs": [[a1,b1],[a2,b2],...]}`.
    ///
    /// Values may be JSON numbers or decimal strings. Two decimals that
    /// collapse to the same f64 are reported as duplicates rather than
    /// silently ranked in arbitrary order.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            pairs: Vec<(NumOrStr, NumOrStr)>,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum NumOrStr {
            Num(f64),
            Str(String),
        }
        let parsed: File =
            serde_json::from_str(text).map_err(|e| Error::BadInstanceFile(e.to_string()))?;
        let to_f64 = |v: NumOrStr| -> Result<f64> {
            match v {
                NumOrStr::Num(x) => Ok(x),
                NumOrStr::Str(s) => s
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::BadInstanceFile(format!("bad number `{s}`"))),
            }
        };
        let mut pairs = Vec::with_capacity(parsed.pairs.len());
        for (a, b) in parsed.pairs {
            pairs.push((to_f64(a)?, to_f64(b)?));
        }
        Self::new(pairs)
    }

    /// Serializes to the JSON instance format.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "pairs": self.pairs }).to_string()
    }
}

/// Deterministic builder for an instance with a prescribed couple structure.
///
/// Values are 2n, 2n-1, ..., 1; the top `k_target - 1` ranks land on
/// distinct cards and `Y_k` shares a card with `Y_k'`. Remaining ranks fill
/// the open slots in order, which cannot create an earlier collision.
pub fn structured_instance(n: usize, k_target: usize, k_prime: usize) -> Result<Instance> {
    if n == 0 || k_target < 2 || k_target > n + 1 {
        return Err(Error::InvalidTarget { k_target, n });
    }
    if k_prime == 0 || k_prime >= k_target {
        return Err(Error::InvalidTarget { k_target, n });
    }
    let value_of = |rank: Rank| (2 * n + 1 - rank) as f64;
    // slots[card] collects the ranks assigned to that card.
    let mut slots: Vec<Vec<Rank>> = vec![Vec::new(); n];
    for rank in 1..k_target {
        slots[rank - 1].push(rank);
    }
    slots[k_prime - 1].push(k_target);
    let mut next = k_target + 1;
    for card in slots.iter_mut() {
        while card.len() < 2 {
            card.push(next);
            next += 1;
        }
    }
    let pairs = slots
        .into_iter()
        .map(|ranks| (value_of(ranks[0]), value_of(ranks[1])))
        .collect();
    Instance::new(pairs)
}

/// Ranking, couple structure and sampling for one instance.
#[derive(Debug, Clone)]
pub struct RankedView {
    /// values[i] = Y_{i+1}, strictly decreasing.
    values: Vec<f64>,
    /// couple[i] = one-based rank of the value on the other side of Y_{i+1}'s card.
    couple: Vec<Rank>,
    /// card[i] = zero-based card index holding Y_{i+1}.
    card: Vec<usize>,
    /// card_ranks[c] = one-based ranks of (a_c, b_c).
    card_ranks: Vec<(Rank, Rank)>,
    k: Rank,
    k_prime: Rank,
}

impl RankedView {
    fn build(instance: &Instance) -> Self {
        let n = instance.n();
        let mut order: Vec<(f64, usize, bool)> = Vec::with_capacity(2 * n);
        for (c, &(a, b)) in instance.pairs.iter().enumerate() {
            order.push((a, c, true));
            order.push((b, c, false));
        }
        order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());

        let mut values = Vec::with_capacity(2 * n);
        let mut card = Vec::with_capacity(2 * n);
        let mut card_ranks = vec![(0usize, 0usize); n];
        for (i, &(v, c, is_a)) in order.iter().enumerate() {
            values.push(v);
            card.push(c);
            if is_a {
                card_ranks[c].0 = i + 1;
            } else {
                card_ranks[c].1 = i + 1;
            }
        }
        let mut couple = vec![0usize; 2 * n];
        for &(ra, rb) in &card_ranks {
            couple[ra - 1] = rb;
            couple[rb - 1] = ra;
        }
        // k = smallest rank whose couple ranks above it.
        let (mut k, mut k_prime) = (0, 0);
        for rank in 1..=2 * n {
            if couple[rank - 1] < rank {
                k = rank;
                k_prime = couple[rank - 1];
                break;
            }
        }
        debug_assert!(k >= 2 && k <= n + 1);
        Self {
            values,
            couple,
            card,
            card_ranks,
            k,
            k_prime,
        }
    }

    pub fn n(&self) -> usize {
        self.values.len() / 2
    }

    pub fn num_values(&self) -> usize {
        self.values.len()
    }

    /// Y_rank (one-based).
    pub fn value(&self, rank: Rank) -> f64 {
        self.values[rank - 1]
    }

    /// Rank of the value on the other side of Y_rank's card.
    pub fn couple(&self, rank: Rank) -> Rank {
        self.couple[rank - 1]
    }

    /// Zero-based card index holding Y_rank.
    pub fn card_of(&self, rank: Rank) -> usize {
        self.card[rank - 1]
    }

    /// Ranks of (a_c, b_c) for a zero-based card index.
    pub fn ranks_of_card(&self, c: usize) -> (Rank, Rank) {
        self.card_ranks[c]
    }

    /// Smallest rank whose couple ranks above it. Always in [2, n+1].
    pub fn k(&self) -> Rank {
        self.k
    }

    /// The couple of k; always below k.
    pub fn k_prime(&self) -> Rank {
        self.k_prime
    }

    /// Rank facing up on card `c` under the given coin.
    pub fn up_rank(&self, c: usize, a_up: bool) -> Rank {
        let (ra, rb) = self.card_ranks[c];
        if a_up {
            ra
        } else {
            rb
        }
    }

    /// Rank facing down on card `c` under the given coin.
    pub fn hidden_rank(&self, c: usize, a_up: bool) -> Rank {
        let (ra, rb) = self.card_ranks[c];
        if a_up {
            rb
        } else {
            ra
        }
    }

    /// Draws coins and a uniform flip order.
    pub fn sample_discrete<R: Rng + ?Sized>(&self, rng: &mut R) -> DiscreteRealization {
        let n = self.n();
        let face_up: Vec<bool> = (0..n).map(|_| rng.gen::<bool>()).collect();
        let mut hidden_order: Vec<usize> = (0..n).collect();
        hidden_order.shuffle(rng);
        let mixture_coin = rng.gen::<f64>();
        DiscreteRealization {
            face_up,
            hidden_order,
            mixture_coin,
        }
    }

    /// Draws arrival times: one uniform time in (-1, 1] per couple-minimal
    /// rank, the partner exactly opposite. Collisions (possible in finite
    /// precision) are resampled.
    pub fn sample_continuous<R: Rng + ?Sized>(&self, rng: &mut R) -> ContinuousRealization {
        let m = self.num_values();
        let mut theta = vec![0.0f64; m];
        loop {
            for rank in 1..=m {
                if rank < self.couple(rank) {
                    let t = 1.0 - 2.0 * rng.gen::<f64>(); // (-1, 1]
                    theta[rank - 1] = t;
                    theta[self.couple(rank) - 1] = fold_time(t);
                }
            }
            let mut sorted = theta.clone();
            sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
            if sorted.windows(2).all(|w| w[0] != w[1]) {
                break;
            }
        }
        ContinuousRealization { theta }
    }

    /// Maps a continuous realization to the discrete view: positive times
    /// are hidden, flipped in increasing order.
    pub fn discretize(&self, cont: &ContinuousRealization) -> DiscreteRealization {
        let n = self.n();
        let mut face_up = Vec::with_capacity(n);
        let mut flips: Vec<(f64, usize)> = Vec::with_capacity(n);
        for (c, &(ra, rb)) in self.card_ranks.iter().enumerate() {
            let a_hidden = cont.theta[ra - 1] > 0.0;
            face_up.push(!a_hidden);
            let hidden_rank = if a_hidden { ra } else { rb };
            flips.push((cont.theta[hidden_rank - 1], c));
        }
        flips.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        DiscreteRealization {
            face_up,
            hidden_order: flips.into_iter().map(|(_, c)| c).collect(),
            mixture_coin: 0.0,
        }
    }

    /// Rank of the largest hidden value. Always in {1, ..., k}.
    pub fn max_hidden_discrete(&self, real: &DiscreteRealization) -> Rank {
        (1..=self.num_values())
            .find(|&rank| {
                let c = self.card_of(rank);
                self.hidden_rank(c, real.face_up[c]) == rank
            })
            .expect("every card hides one side")
    }

    /// Rank of the largest value with a positive arrival time.
    pub fn max_hidden_continuous(&self, cont: &ContinuousRealization) -> Rank {
        (1..=self.num_values())
            .find(|&rank| cont.theta[rank - 1] > 0.0)
            .expect("one side of each card arrives after zero")
    }

    /// Exhaustively enumerates all 2^n * n! equally likely discrete
    /// realizations with the default size cap.
    pub fn enumerate_discrete(&self) -> Result<DiscreteEnumeration> {
        self.enumerate_discrete_capped(ENUMERATION_CAP)
    }

    /// Enumeration with an explicit cap.
    pub fn enumerate_discrete_capped(&self, cap: usize) -> Result<DiscreteEnumeration> {
        let n = self.n();
        if n > cap {
            return Err(Error::InstanceTooLarge { n, cap });
        }
        Ok(DiscreteEnumeration::new(n))
    }
}

/// The folding map pairing arrival times of the two sides of one card:
/// x - 1 for positive x, x + 1 otherwise.
pub fn fold_time(x: f64) -> f64 {
    if x > 0.0 {
        x - 1.0
    } else {
        x + 1.0
    }
}

/// One resolved draw of the discrete randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteRealization {
    /// Per card: true if the a-side faces up.
    pub face_up: Vec<bool>,
    /// Zero-based card indices in flip order.
    pub hidden_order: Vec<usize>,
    /// Uniform draw in [0, 1) reserved for randomized algorithm selection.
    /// Enumeration and discretization set it to 0; the mixture branch is
    /// integrated analytically there.
    pub mixture_coin: f64,
}

/// One resolved draw of arrival times, indexed by rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousRealization {
    /// theta[i] is the arrival time of Y_{i+1} in (-1, 1].
    pub theta: Vec<f64>,
}

/// Iterator over all discrete realizations of an instance, each carrying
/// the same exact weight 1 / (2^n * n!).
pub struct DiscreteEnumeration {
    n: usize,
    perms: Vec<Vec<usize>>,
    mask: usize,
    perm_idx: usize,
}

impl DiscreteEnumeration {
    fn new(n: usize) -> Self {
        let mut perms = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        permute(&mut current, 0, &mut perms);
        Self {
            n,
            perms,
            mask: 0,
            perm_idx: 0,
        }
    }

    /// Exact probability of each realization.
    pub fn weight(&self) -> BigRational {
        let total = BigInt::from(1u64 << self.n) * factorial(self.n);
        BigRational::new(BigInt::one(), total)
    }

    /// Total number of realizations: 2^n * n!.
    pub fn len(&self) -> usize {
        (1 << self.n) * self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Iterator for DiscreteEnumeration {
    type Item = DiscreteRealization;

    fn next(&mut self) -> Option<DiscreteRealization> {
        if self.mask == 1 << self.n {
            return None;
        }
        let real = DiscreteRealization {
            face_up: (0..self.n).map(|c| self.mask >> c & 1 == 1).collect(),
            hidden_order: self.perms[self.perm_idx].clone(),
            mixture_coin: 0.0,
        };
        self.perm_idx += 1;
        if self.perm_idx == self.perms.len() {
            self.perm_idx = 0;
            self.mask += 1;
        }
        Some(real)
    }
}

fn permute(items: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, out);
        items.swap(start, i);
    }
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{ToPrimitive, Zero};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constructs_valid_instance() {
        let inst = Instance::new(vec![(4.0, 3.0), (2.0, 1.0)]).unwrap();
        assert_eq!(inst.n(), 2);
    }

    #[test]
    fn rejects_duplicates_and_nonpositive() {
        assert_eq!(
            Instance::new(vec![(1.0, 1.0)]),
            Err(Error::DuplicateValue(1.0))
        );
        assert_eq!(
            Instance::new(vec![(1.0, 0.0)]),
            Err(Error::NonPositiveValue(0.0))
        );
        assert_eq!(
            Instance::new(vec![(1.0, -2.0)]),
            Err(Error::NonPositiveValue(-2.0))
        );
        assert!(Instance::new(vec![(1.0, f64::NAN)]).is_err());
    }

    #[test]
    fn accepts_adversarial_style_instance() {
        let inst = Instance::new(vec![(1.0, 0.999), (0.001, 0.0001)]).unwrap();
        assert_eq!(inst.rank().k(), 2);
    }

    #[test]
    fn ranks_shared_top_card() {
        let rv = Instance::new(vec![(4.0, 3.0), (2.0, 1.0)]).unwrap().rank();
        assert_eq!(
            (1..=4).map(|r| rv.value(r)).collect::<Vec<_>>(),
            vec![4.0, 3.0, 2.0, 1.0]
        );
        assert_eq!(rv.couple(1), 2);
        assert_eq!(rv.couple(3), 4);
        assert_eq!((rv.k(), rv.k_prime()), (2, 1));
    }

    #[test]
    fn ranks_distinct_top_cards() {
        let rv = Instance::new(vec![(4.0, 1.0), (3.0, 2.0)]).unwrap().rank();
        assert_eq!(rv.couple(1), 4);
        assert_eq!(rv.couple(2), 3);
        assert_eq!((rv.k(), rv.k_prime()), (3, 2));
    }

    #[test]
    fn single_card_always_k2() {
        let rv = Instance::new(vec![(2.0, 1.0)]).unwrap().rank();
        assert_eq!((rv.k(), rv.k_prime()), (2, 1));
    }

    #[test]
    fn enumeration_counts_and_weights() {
        for (n, expected) in [(1usize, 2usize), (2, 8), (3, 48)] {
            let inst = structured_instance(n, 2, 1).unwrap();
            let e = inst.rank().enumerate_discrete().unwrap();
            let w = e.weight();
            let count = e.count();
            assert_eq!(count, expected);
            let total: BigRational = (0..count).map(|_| w.clone()).sum();
            assert!(total.is_one());
        }
    }

    #[test]
    fn enumeration_cap_enforced() {
        let inst = structured_instance(7, 2, 1).unwrap();
        assert!(matches!(
            inst.rank().enumerate_discrete(),
            Err(Error::InstanceTooLarge { n: 7, cap: 6 })
        ));
    }

    #[test]
    fn max_hidden_follows_couple_constraint() {
        let rv = Instance::new(vec![(4.0, 3.0), (2.0, 1.0)]).unwrap().rank();
        // a-side of card 0 is 4 = Y_1; face_up[0] = false hides it.
        let hidden4 = DiscreteRealization {
            face_up: vec![false, true],
            hidden_order: vec![0, 1],
            mixture_coin: 0.0,
        };
        assert_eq!(rv.max_hidden_discrete(&hidden4), 1);
        // 4 face up forces 3 hidden on the same card.
        let up4 = DiscreteRealization {
            face_up: vec![true, true],
            hidden_order: vec![0, 1],
            mixture_coin: 0.0,
        };
        assert_eq!(rv.max_hidden_discrete(&up4), 2);
    }

    #[test]
    fn max_hidden_never_below_k() {
        for (n, k, kp) in [(3usize, 3usize, 2usize), (4, 5, 1), (4, 3, 1)] {
            let rv = structured_instance(n, k, kp).unwrap().rank();
            for real in rv.enumerate_discrete().unwrap() {
                assert!(rv.max_hidden_discrete(&real) <= rv.k());
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let rv = structured_instance(4, 3, 2).unwrap().rank();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(rv.sample_discrete(&mut a), rv.sample_discrete(&mut b));
        assert_eq!(rv.sample_continuous(&mut a), rv.sample_continuous(&mut b));
    }

    #[test]
    fn continuous_times_respect_folding() {
        let rv = structured_instance(5, 4, 2).unwrap().rank();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let cont = rv.sample_continuous(&mut rng);
            for rank in 1..=rv.num_values() {
                let partner = rv.couple(rank);
                if rank < partner {
                    assert_eq!(cont.theta[partner - 1], fold_time(cont.theta[rank - 1]));
                }
                let t = cont.theta[rank - 1];
                assert!(t > -1.0 && t <= 1.0);
            }
        }
    }

    #[test]
    fn discretize_maps_signs_and_order() {
        let rv = Instance::new(vec![(4.0, 3.0), (2.0, 1.0)]).unwrap().rank();
        // 4 arrives at -0.3 (face up), 3 at +0.7; 2 at +0.2, 1 at -0.8.
        let cont = ContinuousRealization {
            theta: vec![-0.3, 0.7, 0.2, -0.8],
        };
        let disc = rv.discretize(&cont);
        // Card 0 hides 3 (positive time), card 1 hides 2.
        assert_eq!(disc.face_up, vec![true, false]);
        // 2 (card 1, time 0.2) flips before 3 (card 0, time 0.7).
        assert_eq!(disc.hidden_order, vec![1, 0]);
        assert_eq!(rv.max_hidden_continuous(&cont), 2);
    }

    #[test]
    fn structured_instance_hits_targets() {
        for n in 1..=5usize {
            for k in 2..=n + 1 {
                for kp in 1..k {
                    let rv = structured_instance(n, k, kp).unwrap().rank();
                    assert_eq!((rv.k(), rv.k_prime()), (k, kp), "n={n} k={k} kp={kp}");
                }
            }
        }
        assert!(structured_instance(2, 4, 1).is_err());
        assert!(structured_instance(3, 2, 2).is_err());
    }

    #[test]
    fn json_round_trip_and_decimal_strings() {
        let inst = Instance::from_json(r#"{"pairs": [["4", 3.0], [2, "1.5"]]}"#).unwrap();
        assert_eq!(inst.pairs(), &[(4.0, 3.0), (2.0, 1.5)]);
        let again = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(again, inst);
        // Decimal strings that collide in f64 are duplicates, not reordered.
        let collide =
            Instance::from_json(r#"{"pairs": [["0.1000000000000000001", "0.1"], [2, 3]]}"#);
        assert!(matches!(collide, Err(Error::DuplicateValue(_))));
        assert!(Instance::from_json("{}").is_err());
    }

    #[test]
    fn digest_distinguishes_instances() {
        let a = Instance::new(vec![(4.0, 3.0), (2.0, 1.0)]).unwrap();
        let b = Instance::new(vec![(4.0, 3.0), (2.0, 1.5)]).unwrap();
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), a.clone().digest());
    }

    #[test]
    fn fair_coin_on_top_value() {
        // Empirical frequency of "Y_1 hidden" over 10^6 draws within 3 sigma.
        let rv = Instance::new(vec![(4.0, 3.0), (2.0, 1.0)]).unwrap().rank();
        let mut rng = ChaCha8Rng::seed_from_u64(20240917);
        let trials = 1_000_000u32;
        let hits = (0..trials)
            .filter(|_| rv.max_hidden_discrete(&rv.sample_discrete(&mut rng)) == 1)
            .count() as f64;
        let freq = hits / trials as f64;
        let sigma = (0.25f64 / trials as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * sigma, "freq={freq}");
    }

    #[test]
    fn discretize_matches_uniform_law_n2() {
        // Every one of the 2^2 * 2! = 8 outcomes within 4 sigma of 1/8.
        let rv = Instance::new(vec![(4.0, 3.0), (2.0, 1.0)]).unwrap().rank();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 1_000_000usize;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..trials {
            let d = rv.discretize(&rv.sample_continuous(&mut rng));
            *counts
                .entry((d.face_up.clone(), d.hidden_order.clone()))
                .or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 8);
        let p = 1.0 / 8.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for (_, c) in counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - p).abs() < 4.0 * sigma, "freq={freq}");
        }
    }

    fn arb_instance() -> impl Strategy<Value = Vec<(f64, f64)>> {
        // Distinct positive values built from a shuffled prefix of a grid.
        (1usize..5, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut vals: Vec<f64> = (1..=2 * n).map(|i| i as f64 / 3.0).collect();
            vals.shuffle(&mut rng);
            (0..n).map(|i| (vals[2 * i], vals[2 * i + 1])).collect()
        })
    }

    proptest! {
        #[test]
        fn rank_invariant_under_card_permutation_and_side_swap(
            pairs in arb_instance(),
            seed in any::<u64>(),
        ) {
            let base = Instance::new(pairs.clone()).unwrap().rank();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut shuffled = pairs;
            shuffled.shuffle(&mut rng);
            for p in shuffled.iter_mut() {
                if rng.gen::<bool>() {
                    *p = (p.1, p.0);
                }
            }
            let other = Instance::new(shuffled).unwrap().rank();
            prop_assert_eq!(base.num_values(), other.num_values());
            for rank in 1..=base.num_values() {
                prop_assert_eq!(base.value(rank), other.value(rank));
            }
            prop_assert_eq!(base.k(), other.k());
            prop_assert_eq!(base.k_prime(), other.k_prime());
        }

        #[test]
        fn enumeration_weights_sum_to_one(n in 1usize..5) {
            let inst = structured_instance(n, 2, 1).unwrap();
            let e = inst.rank().enumerate_discrete().unwrap();
            let w = e.weight();
            let mut total = BigRational::zero();
            let mut count = 0usize;
            for real in e {
                prop_assert_eq!(real.hidden_order.len(), n);
                total += w.clone();
                count += 1;
            }
            prop_assert_eq!(count, (1usize << n) * (1..=n).product::<usize>());
            prop_assert!(total.is_one());
            prop_assert_eq!(total.to_f64().unwrap(), 1.0);
        }
    }
}
