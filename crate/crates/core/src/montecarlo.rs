//! Seeded Monte Carlo estimation.
//!
//! Trials are split into fixed-size blocks; each block draws from its own
//! ChaCha stream derived from (master seed, block index), blocks are merged
//! in index order, and floats are summed deterministically, so a report is
//! a pure function of (instance, algorithm, trials, seed, z) regardless of
//! how many worker threads run the blocks. `GOOGOL_THREADS` caps the worker
//! count.
//!
//! The competitive-ratio estimator divides the sample mean of the selected
//! value by the sample mean of the hidden maximum from the same draws
//! (common random numbers), with a delta-method confidence interval.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{
    mixture_branch, run_window_t, AlgorithmSpec, MixtureBranch, Outcome, WindowSpec,
};
use crate::error::{Error, Result};
use crate::instance::{Instance, RankedView};

const BLOCK_TRIALS: u64 = 1 << 14;

/// Default confidence multiplier for pass/fail assertions: a false failure
/// rate of about 6e-5 per assertion keeps large suites stable.
pub const DEFAULT_Z: f64 = 4.0;

/// A Monte Carlo estimate with confidence intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub algorithm: String,
    pub trials: u64,
    pub seed: u64,
    /// Confidence multiplier used for every interval below.
    pub z: f64,
    pub instance_digest: u64,
    /// Per-outcome frequencies over all ranks 1..=2n plus NO_STOP.
    pub frequencies: BTreeMap<Outcome, f64>,
    /// Half-widths of the per-outcome binomial intervals.
    pub frequency_ci: BTreeMap<Outcome, f64>,
    pub stop_frequency: f64,
    /// Estimate of E[selected] / E[max hidden].
    pub ratio_estimate: f64,
    /// Delta-method half-width for the ratio.
    pub ratio_ci: f64,
}

#[derive(Clone)]
struct BlockStats {
    counts: Vec<u64>, // ranks 1..=2n at [rank-1], NO_STOP last
    sum_x: f64,
    sum_y: f64,
    sum_xx: f64,
    sum_yy: f64,
    sum_xy: f64,
}

impl BlockStats {
    fn new(num_values: usize) -> Self {
        BlockStats {
            counts: vec![0; num_values + 1],
            sum_x: 0.0,
            sum_y: 0.0,
            sum_xx: 0.0,
            sum_yy: 0.0,
            sum_xy: 0.0,
        }
    }

    fn record(&mut self, outcome: Outcome, selected: f64, max_hidden: f64) {
        let slot = match outcome {
            Outcome::Rank(r) => r - 1,
            Outcome::NoStop => self.counts.len() - 1,
        };
        self.counts[slot] += 1;
        self.sum_x += selected;
        self.sum_y += max_hidden;
        self.sum_xx += selected * selected;
        self.sum_yy += max_hidden * max_hidden;
        self.sum_xy += selected * max_hidden;
    }

    fn merge(&mut self, other: &BlockStats) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.sum_x += other.sum_x;
        self.sum_y += other.sum_y;
        self.sum_xx += other.sum_xx;
        self.sum_yy += other.sum_yy;
        self.sum_xy += other.sum_xy;
    }
}

enum Runner {
    Discrete(WindowSpec),
    MixtureOf(WindowSpec, WindowSpec, WindowSpec, f64),
    Window(f64),
}

fn runner_for(alg: &AlgorithmSpec, n: usize) -> Runner {
    match *alg {
        AlgorithmSpec::Open => Runner::Discrete(WindowSpec::open(n)),
        AlgorithmSpec::Closed => Runner::Discrete(WindowSpec::closed(n)),
        AlgorithmSpec::Full => Runner::Discrete(WindowSpec::full(n)),
        AlgorithmSpec::Mixture(r) => Runner::MixtureOf(
            WindowSpec::open(n),
            WindowSpec::closed(n),
            WindowSpec::full(n),
            r,
        ),
        AlgorithmSpec::WindowT(t) => Runner::Window(t),
    }
}

fn run_block(rv: &RankedView, runner: &Runner, seed: u64, block: u64, trials: u64) -> BlockStats {
    use crate::algorithms::run_moving_window;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut stats = BlockStats::new(rv.num_values());
    for _ in 0..trials {
        let (outcome, max_rank) = match runner {
            Runner::Discrete(spec) => {
                let real = rv.sample_discrete(&mut rng);
                (
                    run_moving_window(rv, &real, spec).outcome,
                    rv.max_hidden_discrete(&real),
                )
            }
            Runner::MixtureOf(open, closed, full, r) => {
                let real = rv.sample_discrete(&mut rng);
                let spec = match mixture_branch(real.mixture_coin, *r) {
                    MixtureBranch::Open => open,
                    MixtureBranch::Closed => closed,
                    MixtureBranch::Full => full,
                };
                (
                    run_moving_window(rv, &real, spec).outcome,
                    rv.max_hidden_discrete(&real),
                )
            }
            Runner::Window(t) => {
                let cont = rv.sample_continuous(&mut rng);
                (
                    run_window_t(rv, &cont, *t).outcome,
                    rv.max_hidden_continuous(&cont),
                )
            }
        };
        let selected = outcome.rank().map_or(0.0, |r| rv.value(r));
        stats.record(outcome, selected, rv.value(max_rank));
    }
    stats
}

fn thread_cap() -> Option<usize> {
    std::env::var("GOOGOL_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
}

/// Runs `trials` independent simulations of an algorithm on an instance.
/// Deterministic in (instance, algorithm, trials, seed, z).
pub fn estimate(
    instance: &Instance,
    alg: &AlgorithmSpec,
    trials: u64,
    seed: u64,
    z: f64,
) -> Result<EstimateReport> {
    estimate_with_threads(instance, alg, trials, seed, z, thread_cap())
}

/// As [`estimate`], with an explicit worker cap instead of the environment
/// variable. The report does not depend on the cap.
pub fn estimate_with_threads(
    instance: &Instance,
    alg: &AlgorithmSpec,
    trials: u64,
    seed: u64,
    z: f64,
    threads: Option<usize>,
) -> Result<EstimateReport> {
    if trials == 0 {
        return Err(Error::BadRange("trials must be at least 1".into()));
    }
    let rv = instance.rank();
    let runner = runner_for(alg, rv.n());

    let num_blocks = trials.div_ceil(BLOCK_TRIALS);
    let blocks: Vec<u64> = (0..num_blocks).collect();
    let work = || {
        blocks
            .par_iter()
            .map(|&b| {
                let in_block = BLOCK_TRIALS.min(trials - b * BLOCK_TRIALS);
                run_block(&rv, &runner, seed, b, in_block)
            })
            .collect::<Vec<_>>()
    };
    let partials = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    let mut total = BlockStats::new(rv.num_values());
    for p in &partials {
        total.merge(p);
    }

    let n = trials as f64;
    let mut frequencies = BTreeMap::new();
    let mut frequency_ci = BTreeMap::new();
    let mut stop_frequency = 0.0;
    for (slot, &count) in total.counts.iter().enumerate() {
        let outcome = if slot == rv.num_values() {
            Outcome::NoStop
        } else {
            Outcome::Rank(slot + 1)
        };
        let f = count as f64 / n;
        if outcome != Outcome::NoStop {
            stop_frequency += f;
        }
        frequencies.insert(outcome, f);
        frequency_ci.insert(outcome, z * (f * (1.0 - f) / n).sqrt());
    }

    let mean_x = total.sum_x / n;
    let mean_y = total.sum_y / n;
    let ratio = mean_x / mean_y;
    let ratio_ci = if trials > 1 {
        let denom = n - 1.0;
        let var_x = (total.sum_xx - n * mean_x * mean_x) / denom;
        let var_y = (total.sum_yy - n * mean_y * mean_y) / denom;
        let cov = (total.sum_xy - n * mean_x * mean_y) / denom;
        let var_ratio = (var_x - 2.0 * ratio * cov + ratio * ratio * var_y) / (n * mean_y * mean_y);
        z * var_ratio.max(0.0).sqrt()
    } else {
        f64::INFINITY
    };

    Ok(EstimateReport {
        algorithm: alg.to_string(),
        trials,
        seed,
        z,
        instance_digest: instance.digest(),
        frequencies,
        frequency_ci,
        stop_frequency,
        ratio_estimate: ratio,
        ratio_ci,
    })
}

/// Named worst-case families. The zero values that appear in the source
/// constructions are shifted to higher powers of epsilon so all values stay
/// positive; the O(epsilon) behavior is unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversarialPreset {
    /// {(1, eps^3), (eps, eps^2)}: the open rule earns about 1/4 of the
    /// hidden maximum's expectation of about 1/2.
    OpenBad,
    /// {(1, 1-eps), (eps, eps^2)}: closed and full earn about 1/2 of an
    /// expected maximum near 1.
    ClosedBad,
}

impl std::str::FromStr for AdversarialPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open-bad" => Ok(AdversarialPreset::OpenBad),
            "closed-bad" => Ok(AdversarialPreset::ClosedBad),
            _ => Err(Error::BadRange(format!("unknown preset `{s}`"))),
        }
    }
}

/// Builds one of the named adversarial instances; requires 0 < eps < 1/4.
pub fn adversarial_instance(preset: AdversarialPreset, eps: f64) -> Result<Instance> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::BadRange(format!("epsilon {eps} outside (0, 1/4)")));
    }
    match preset {
        AdversarialPreset::OpenBad => Instance::new(vec![(1.0, eps * eps * eps), (eps, eps * eps)]),
        AdversarialPreset::ClosedBad => Instance::new(vec![(1.0, 1.0 - eps), (eps, eps * eps)]),
    }
}

/// Builds a random n-card instance whose ranked couple structure collides
/// exactly at `k_target`: the top k_target - 1 values land on distinct
/// cards and Y_k shares a card with a random one of them.
pub fn synthetic_large_k_instance<R: Rng + ?Sized>(
    k_target: usize,
    n: usize,
    rng: &mut R,
) -> Result<Instance> {
    if n == 0 || k_target < 2 || k_target > n + 1 {
        return Err(Error::InvalidTarget { k_target, n });
    }
    // 2n distinct values, descending; rank i takes values[i-1].
    let values: Vec<f64> = loop {
        let mut vals: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(0.1..1000.0)).collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if vals.windows(2).all(|w| w[0] != w[1]) {
            break vals;
        }
    };
    let k_prime = rng.gen_range(1..k_target);
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); n];
    for rank in 1..k_target {
        slots[rank - 1].push(rank);
    }
    slots[k_prime - 1].push(k_target);
    // Scatter the remaining ranks over the open capacity.
    let mut open_slots: Vec<usize> = Vec::new();
    for (c, ranks) in slots.iter().enumerate() {
        for _ in ranks.len()..2 {
            open_slots.push(c);
        }
    }
    use rand::seq::SliceRandom;
    open_slots.shuffle(rng);
    for (rank, &c) in (k_target + 1..=2 * n).zip(&open_slots) {
        slots[c].push(rank);
    }
    let mut pairs: Vec<(f64, f64)> = slots
        .into_iter()
        .map(|ranks| (values[ranks[0] - 1], values[ranks[1] - 1]))
        .collect();
    pairs.shuffle(rng);
    for p in pairs.iter_mut() {
        if rng.gen::<bool>() {
            *p = (p.1, p.0);
        }
    }
    Instance::new(pairs)
}
