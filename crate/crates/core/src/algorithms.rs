//! Stopping rules on a realization.
//!
//! The discrete engine presents the 2n elements as a list: first the n
//! face-up values in flip order of their cards, then the n hidden values in
//! the same order. A moving-window rule observes the first n elements and
//! then accepts the first element that beats everything in its window, a
//! contiguous range of recent positions parameterized by per-step left
//! extremes. The three basic rules differ only in those extremes:
//!
//! * open   — window of the n-1 other currently visible values,
//! * closed — open plus the back of the card just flipped,
//! * full   — everything seen so far.
//!
//! The continuous engine scans hidden values by arrival time and accepts
//! the first one larger than every value arriving in the preceding 1 + t
//! time units; t = 0 and t = 1 reproduce closed and full exactly.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{ContinuousRealization, DiscreteRealization, Rank, RankedView};

/// Result of one run: selected rank (smaller is better) or no stop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    /// Selected the value of this rank.
    Rank(Rank),
    /// Rejected every hidden value; payoff 0 in expectations.
    NoStop,
}

impl Outcome {
    pub fn rank(self) -> Option<Rank> {
        match self {
            Outcome::Rank(r) => Some(r),
            Outcome::NoStop => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Rank(r) => write!(f, "Y{r}"),
            Outcome::NoStop => write!(f, "NO_STOP"),
        }
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "NO_STOP" {
            return Ok(Outcome::NoStop);
        }
        s.strip_prefix('Y')
            .and_then(|digits| digits.parse::<usize>().ok())
            .filter(|&r| r >= 1)
            .map(Outcome::Rank)
            .ok_or_else(|| Error::BadRange(format!("bad outcome `{s}`")))
    }
}

// Outcomes serialize as the strings "Y<rank>" / "NO_STOP" so they can key
// JSON objects directly.
impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Where and at what a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopResult {
    pub outcome: Outcome,
    /// Flip step in [1, n] at which the rule stopped.
    pub stop_step: Option<usize>,
    /// Rank of the largest element in the window at the stop moment;
    /// `None` when not stopped or when the window was empty.
    pub threshold_at_stop: Option<Rank>,
}

impl StopResult {
    fn no_stop() -> Self {
        StopResult {
            outcome: Outcome::NoStop,
            stop_step: None,
            threshold_at_stop: None,
        }
    }
}

/// Validated per-step left extremes for the discrete moving-window engine.
///
/// Entry j-1 is the left extreme of the window at overall position n + j,
/// one-based. Validity requires 1 <= l_{n+1} <= ... <= l_{2n} <= n + 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSpec {
    left_extremes: Vec<usize>,
}

impl WindowSpec {
    pub fn new(left_extremes: Vec<usize>) -> Result<Self> {
        let n = left_extremes.len();
        if n == 0 {
            return Err(Error::InvalidWindowSpec("no steps".into()));
        }
        if left_extremes[0] < 1 {
            return Err(Error::InvalidWindowSpec("left extreme below 1".into()));
        }
        if left_extremes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidWindowSpec(
                "left extremes must be nondecreasing".into(),
            ));
        }
        if left_extremes[n - 1] > n + 1 {
            return Err(Error::InvalidWindowSpec(format!(
                "last left extreme {} exceeds n+1 = {}",
                left_extremes[n - 1],
                n + 1
            )));
        }
        Ok(Self { left_extremes })
    }

    /// l_s = s - n + 1: the n-1 other currently visible values.
    pub fn open(n: usize) -> Self {
        Self {
            left_extremes: (1..=n).map(|j| j + 1).collect(),
        }
    }

    /// l_s = s - n: also covers the back of the card just flipped.
    pub fn closed(n: usize) -> Self {
        Self {
            left_extremes: (1..=n).collect(),
        }
    }

    /// l_s = 1: everything seen so far.
    pub fn full(n: usize) -> Self {
        Self {
            left_extremes: vec![1; n],
        }
    }

    pub fn steps(&self) -> usize {
        self.left_extremes.len()
    }

    /// Left extreme for overall position s in [n+1, 2n].
    pub fn left_extreme(&self, s: usize) -> usize {
        self.left_extremes[s - self.left_extremes.len() - 1]
    }
}

/// The element list (e_1, ..., e_2n) as rank indices: face-up values in flip
/// order of their cards, then hidden values in flip order.
pub fn element_list(rv: &RankedView, real: &DiscreteRealization) -> Vec<Rank> {
    let n = rv.n();
    let mut elems = Vec::with_capacity(2 * n);
    for &c in &real.hidden_order {
        elems.push(rv.up_rank(c, real.face_up[c]));
    }
    for &c in &real.hidden_order {
        elems.push(rv.hidden_rank(c, real.face_up[c]));
    }
    elems
}

/// Runs the generic moving-window rule: accept the first hidden element
/// larger than every element in its window (an empty window accepts
/// trivially).
pub fn run_moving_window(
    rv: &RankedView,
    real: &DiscreteRealization,
    spec: &WindowSpec,
) -> StopResult {
    debug_assert_eq!(spec.steps(), rv.n());
    let n = rv.n();
    let elems = element_list(rv, real);
    for s in n + 1..=2 * n {
        let lo = spec.left_extreme(s);
        let candidate = elems[s - 1];
        // Largest value = smallest rank in the window positions [lo, s-1].
        let threshold = elems[lo - 1..s - 1].iter().copied().min();
        if threshold.is_none_or(|best| candidate < best) {
            return StopResult {
                outcome: Outcome::Rank(candidate),
                stop_step: Some(s - n),
                threshold_at_stop: threshold,
            };
        }
    }
    StopResult::no_stop()
}

/// Open moving window: accept when larger than all currently visible values.
pub fn run_open(rv: &RankedView, real: &DiscreteRealization) -> StopResult {
    run_moving_window(rv, real, &WindowSpec::open(rv.n()))
}

/// Closed moving window: open, plus the just-flipped card's own back side.
pub fn run_closed(rv: &RankedView, real: &DiscreteRealization) -> StopResult {
    run_moving_window(rv, real, &WindowSpec::closed(rv.n()))
}

/// Full window: accept when larger than everything seen so far.
pub fn run_full(rv: &RankedView, real: &DiscreteRealization) -> StopResult {
    run_moving_window(rv, real, &WindowSpec::full(rv.n()))
}

/// Which basic rule a mixture coin selects at mixing probability r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixtureBranch {
    Open,
    Closed,
    Full,
}

/// Partitions [0, 1) into [0, (1-r)/2) -> open, [(1-r)/2, 1-r) -> closed,
/// [1-r, 1) -> full.
pub fn mixture_branch(coin: f64, r: f64) -> MixtureBranch {
    debug_assert!((0.0..=1.0).contains(&r));
    let half = (1.0 - r) / 2.0;
    if coin < half {
        MixtureBranch::Open
    } else if coin < 1.0 - r {
        MixtureBranch::Closed
    } else {
        MixtureBranch::Full
    }
}

/// Randomized mixture: runs open/closed each with probability (1-r)/2 and
/// full with probability r, resolved by the realization's mixture coin.
pub fn run_mixture(rv: &RankedView, real: &DiscreteRealization, r: f64) -> StopResult {
    match mixture_branch(real.mixture_coin, r) {
        MixtureBranch::Open => run_open(rv, real),
        MixtureBranch::Closed => run_closed(rv, real),
        MixtureBranch::Full => run_full(rv, real),
    }
}

/// Continuous moving window of time-length 1 + t: scans hidden values in
/// increasing arrival time and accepts the first one larger than every
/// value arriving in [max(theta - 1 - t, -1), theta).
pub fn run_window_t(rv: &RankedView, cont: &ContinuousRealization, t: f64) -> StopResult {
    assert!((0.0..=1.0).contains(&t), "window excess must be in [0, 1]");
    let m = rv.num_values();
    let mut order: Vec<Rank> = (1..=m).collect();
    order.sort_by(|&a, &b| cont.theta[a - 1].partial_cmp(&cont.theta[b - 1]).unwrap());

    // Monotonic deque of ranks with increasing arrival time and strictly
    // increasing rank (decreasing value); the front is the window maximum.
    let mut window: VecDeque<Rank> = VecDeque::with_capacity(m);
    let mut step = 0usize;
    for &rank in &order {
        let theta = cont.theta[rank - 1];
        if theta > 0.0 {
            step += 1;
            let left = theta - 1.0 - t;
            while let Some(&front) = window.front() {
                if cont.theta[front - 1] < left {
                    window.pop_front();
                } else {
                    break;
                }
            }
            let threshold = window.front().copied();
            if threshold.is_none_or(|best| rank < best) {
                return StopResult {
                    outcome: Outcome::Rank(rank),
                    stop_step: Some(step),
                    threshold_at_stop: threshold,
                };
            }
        }
        while let Some(&back) = window.back() {
            if back > rank {
                window.pop_back();
            } else {
                break;
            }
        }
        window.push_back(rank);
    }
    StopResult::no_stop()
}

/// Algorithm selector: `open | closed | full | mixture:<r> | window:<t>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmSpec {
    Open,
    Closed,
    Full,
    Mixture(f64),
    WindowT(f64),
}

impl AlgorithmSpec {
    /// True for the window algorithm, which runs on arrival times.
    pub fn is_continuous(&self) -> bool {
        matches!(self, AlgorithmSpec::WindowT(_))
    }

    /// Runs a discrete-engine algorithm. Panics on `WindowT`; callers
    /// dispatch continuous specs to [`run_window_t`].
    pub fn run_discrete(&self, rv: &RankedView, real: &DiscreteRealization) -> StopResult {
        match *self {
            AlgorithmSpec::Open => run_open(rv, real),
            AlgorithmSpec::Closed => run_closed(rv, real),
            AlgorithmSpec::Full => run_full(rv, real),
            AlgorithmSpec::Mixture(r) => run_mixture(rv, real, r),
            AlgorithmSpec::WindowT(_) => panic!("window algorithm needs a continuous realization"),
        }
    }
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadAlgorithmSpec(s.to_string());
        match s.trim() {
            "open" => Ok(AlgorithmSpec::Open),
            "closed" => Ok(AlgorithmSpec::Closed),
            "full" => Ok(AlgorithmSpec::Full),
            other => {
                let (name, arg) = other.split_once(':').ok_or_else(bad)?;
                let x: f64 = arg.trim().parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&x) {
                    return Err(bad());
                }
                match name.trim() {
                    "mixture" => Ok(AlgorithmSpec::Mixture(x)),
                    "window" => Ok(AlgorithmSpec::WindowT(x)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::Open => write!(f, "open"),
            AlgorithmSpec::Closed => write!(f, "closed"),
            AlgorithmSpec::Full => write!(f, "full"),
            AlgorithmSpec::Mixture(r) => write!(f, "mixture:{r}"),
            AlgorithmSpec::WindowT(t) => write!(f, "window:{t}"),
        }
    }
}
