//! Closed-form outcome probabilities and competitive ratios.
//!
//! Everything here is a function of the couple-collision rank `k` (and the
//! tuning parameters r, t), independent of any concrete instance: two
//! instances with the same couple structure have identical outcome
//! distributions over rank indices.
//!
//! Two backends are provided. This module evaluates in f64, which covers
//! the ratio functions and everything involving logarithms. The [`exact`]
//! submodule evaluates the purely rational formulas in `BigRational` for
//! bit-exact comparison against the enumeration oracle.

pub mod exact;

use std::f64::consts::LN_2;

/// A truncated series evaluation together with an analytic bound on the
/// discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub truncation_bound: f64,
}

/// Terms are cut once they drop below this threshold (with a floor on the
/// number of terms so the geometric tail bound is negligible too).
const TERM_CUTOFF: f64 = 1e-15;
const MIN_TERMS_TO: usize = 60;

/// H_s, the s-th harmonic number.
pub fn harmonic(s: usize) -> f64 {
    (1..=s).map(|i| 1.0 / i as f64).sum()
}

/// P(max hidden = Y_i): 1/2^i below the collision rank, 1/2^(k-1) at it,
/// zero beyond.
pub fn max_hidden_mass(i: usize, k: usize) -> f64 {
    assert!(i >= 1 && k >= 2);
    if i < k {
        0.5f64.powi(i as i32)
    } else if i == k {
        0.5f64.powi(k as i32 - 1)
    } else {
        0.0
    }
}

/// P(max hidden >= Y_i): 1 - 1/2^i below the collision rank, 1 from it on.
pub fn max_hidden_tail(i: usize, k: usize) -> f64 {
    assert!(i >= 1 && k >= 2);
    if i < k {
        1.0 - 0.5f64.powi(i as i32)
    } else {
        1.0
    }
}

/// Joint win mass for the closed rule: it selects Y_i, Y_i is the maximum
/// hidden value, and Y_j is the largest element in Y_i's window.
pub fn q_ij(i: usize, j: usize, k: usize) -> f64 {
    assert!(i >= 1 && i < k);
    if j == k {
        0.5f64.powi(k as i32 - 1) / i as f64
    } else if j > i && j < k {
        0.5f64.powi(j as i32) / i as f64 * (1.0 - 1.0 / j as f64)
    } else {
        0.0
    }
}

/// F(k): probability that the closed rule picks the maximum hidden value.
pub fn secretary_win_prob(k: usize) -> f64 {
    assert!(k >= 2);
    let mut total = harmonic(k - 1) * 0.5f64.powi(k as i32 - 1);
    for i in 1..=k.saturating_sub(2) {
        for j in i + 1..=k - 1 {
            total += 0.5f64.powi(j as i32) / i as f64 * (j as f64 - 1.0) / j as f64;
        }
    }
    total
}

/// Limit of F(k) as k grows: ln 2 (1 - ln 2 / 2).
pub fn secretary_limit() -> f64 {
    LN_2 * (1.0 - LN_2 / 2.0)
}

/// P(closed rule = Y_i) for i < k.
pub fn closed_mass(i: usize, k: usize) -> f64 {
    assert!(i >= 1 && i < k);
    let mut p = 0.5f64.powi(k as i32 - 1);
    for j in i + 1..=k - 1 {
        p += 0.5f64.powi(j as i32) * (1.0 - 1.0 / j as f64);
    }
    p
}

/// P(closed rule stops) = P(closed >= Y_k).
pub fn closed_stop(k: usize) -> f64 {
    assert!(k >= 2);
    (1..=k - 1).map(|j| 0.5f64.powi(j as i32) / j as f64).sum()
}

/// P(open rule = Y_i) for i < k; the mass depends on whether Y_i sits on
/// the collision card (i = k').
pub fn open_mass(i: usize, k: usize, i_is_k_prime: bool) -> f64 {
    assert!(i >= 1 && i < k);
    let indicator = if i_is_k_prime { 0.0 } else { 1.0 };
    let mut p = 0.5f64.powi(k as i32 - 1) * (1.0 - indicator / (k as f64 - 1.0));
    for j in i + 1..=k - 1 {
        p += 0.5f64.powi(j as i32) * (1.0 - 1.0 / j as f64);
    }
    p
}

/// P(open rule = Y_k) = 1/2^(k-1); the open rule is the only basic rule
/// with mass at the collision rank.
pub fn open_mass_at_k(k: usize) -> f64 {
    assert!(k >= 2);
    0.5f64.powi(k as i32 - 1)
}

/// P(open rule stops).
pub fn open_stop(k: usize) -> f64 {
    assert!(k >= 2);
    0.5f64.powi(k as i32 - 1) / (k as f64 - 1.0) + closed_stop(k)
}

/// P(full rule = Y_i) for i < k.
pub fn full_mass(i: usize, k: usize) -> f64 {
    assert!(i >= 1 && i < k);
    let mut p = 0.5f64.powi(k as i32 - 1) / (k as f64 - 1.0);
    for j in i + 1..=k - 1 {
        p += 0.5f64.powi(j as i32) / (j as f64 - 1.0);
    }
    p
}

/// P(full rule stops) = 1/2 for every instance.
pub fn full_stop(_k: usize) -> f64 {
    0.5
}

/// Exact mixture mass at Y_i: the open/closed/full combination weighted
/// (1-r)/2, (1-r)/2, r.
pub fn mixture_mass(i: usize, k: usize, r: f64, i_is_k_prime: bool) -> f64 {
    let half = (1.0 - r) / 2.0;
    half * open_mass(i, k, i_is_k_prime) + half * closed_mass(i, k) + r * full_mass(i, k)
}

/// Mixture mass at the collision rank Y_k (only the open branch lands there).
pub fn mixture_mass_at_k(k: usize, r: f64) -> f64 {
    (1.0 - r) / 2.0 * open_mass_at_k(k)
}

/// P(mixture stops).
pub fn mixture_stop(k: usize, r: f64) -> f64 {
    let half = (1.0 - r) / 2.0;
    half * open_stop(k) + half * closed_stop(k) + r * full_stop(k)
}

/// Lower bound on the mixture mass at Y_i obtained by discarding the
/// collision-card indicator (the certified-guarantee side of the pair;
/// [`mixture_mass`] is the exact side).
pub fn mixture_mass_lower(i: usize, k: usize, r: f64) -> f64 {
    assert!(i >= 1 && i < k);
    let mut p = (1.0 - r) * 0.5f64.powi(k as i32 - 1)
        + (r - (1.0 - r) / 2.0) * 0.5f64.powi(k as i32 - 1) / (k as f64 - 1.0);
    for j in i + 1..=k - 1 {
        p += mixture_term(j, r);
    }
    p
}

/// Summand of the mixture series: (1/2^j)((1-r) - (1-r)/j + r/(j-1)).
pub fn mixture_term(j: usize, r: f64) -> f64 {
    0.5f64.powi(j as i32) * ((1.0 - r) - (1.0 - r) / j as f64 + r / (j as f64 - 1.0))
}

/// a(r) = 1 - ln 2 + r (3 ln 2 - 2)/2, the closed form of the full mixture
/// series starting at j = 2.
pub fn a_of_r(r: f64) -> f64 {
    1.0 - LN_2 + r * (3.0 * LN_2 - 2.0) / 2.0
}

/// The mixture series evaluated by truncation, for cross-checking the
/// closed form.
pub fn a_of_r_series(r: f64) -> SeriesValue {
    let mut value = 0.0;
    let mut j = 2;
    loop {
        let term = mixture_term(j, r);
        value += term;
        if j >= MIN_TERMS_TO && term.abs() < TERM_CUTOFF {
            break;
        }
        j += 1;
    }
    SeriesValue {
        value,
        truncation_bound: geometric_tail_bound(j),
    }
}

/// Tail of the mixture series from j = k, in closed form via ln 2.
pub fn mixture_series_tail(k: usize, r: f64) -> f64 {
    assert!(k >= 2);
    // sum_{j>=k} 1/(2^j j) and sum_{j>=k} 1/(2^j (j-1)).
    let s1 = LN_2
        - (1..k)
            .map(|j| 0.5f64.powi(j as i32) / j as f64)
            .sum::<f64>();
    let s2 = 0.5
        * (LN_2
            - (1..k - 1)
                .map(|m| 0.5f64.powi(m as i32) / m as f64)
                .sum::<f64>());
    (1.0 - r) * 0.5f64.powi(k as i32 - 1) - (1.0 - r) * s1 + r * s2
}

/// Checks the tail-completion inequality: the series tail from k is at most
/// the k-dependent extra term of the mixture mass. Guaranteed for
/// r in [(3-4ln2)/(5-6ln2), 2/3]; outside that interval the result is
/// whatever the numbers say. Allows 1e-12 rounding slack (the k = 2 case
/// is an exact equality at the optimal r).
pub fn tail_series_check(k: usize, r: f64) -> bool {
    let lhs = mixture_series_tail(k, r);
    let rhs = (1.0 - r) * 0.5f64.powi(k as i32 - 1)
        + (r - (1.0 - r) / 2.0) * 0.5f64.powi(k as i32 - 1) / (k as f64 - 1.0);
    lhs <= rhs + 1e-12
}

/// Per-rank series coefficient of the timed window rule.
pub fn a_jt(j: usize, t: f64) -> f64 {
    assert!(j >= 2);
    assert!((0.0..=1.0).contains(&t));
    let jm1 = j as f64 - 1.0;
    let u = (1.0 - t).powi(j as i32 - 1) * (1.0 + t);
    (1.0 - u) / jm1 + u - (1.0 - t).powi(j as i32) / j as f64
}

/// Collision-rank coefficient of the timed window rule.
pub fn b_kt(k: usize, t: f64) -> f64 {
    assert!(k >= 2);
    assert!((0.0..=1.0).contains(&t));
    let km1 = k as f64 - 1.0;
    let u = (1.0 - t).powi(k as i32 - 1);
    0.5f64.powi(k as i32 - 1) * ((1.0 - u) / km1 + u)
}

/// P(window rule of excess t = Y_i) for i < k.
pub fn window_mass(i: usize, k: usize, t: f64) -> f64 {
    assert!(i >= 1 && i < k);
    let mut p = b_kt(k, t);
    for j in i + 1..=k - 1 {
        p += a_jt(j, t) * 0.5f64.powi(j as i32);
    }
    p
}

/// P(window rule of excess t stops) = R_k(t).
pub fn window_stop(k: usize, t: f64) -> f64 {
    assert!(k >= 2);
    assert!((0.0..=1.0).contains(&t));
    let mut p = 0.5;
    for j in 2..=k - 1 {
        p += (1.0 - t).powi(j as i32) * 0.5f64.powi(j as i32) / j as f64;
    }
    p
}

/// Limit mass P_i = sum_{j > i} a(j, t)/2^j of the window rule as k grows.
pub fn window_mass_limit(i: usize, t: f64) -> SeriesValue {
    assert!(i >= 1);
    let mut value = 0.0;
    let mut j = i + 1;
    loop {
        let term = a_jt(j, t) * 0.5f64.powi(j as i32);
        value += term;
        if j >= MIN_TERMS_TO + i && term.abs() < TERM_CUTOFF {
            break;
        }
        j += 1;
    }
    SeriesValue {
        value,
        truncation_bound: geometric_tail_bound(j),
    }
}

/// R_k(i, t): finite-k ratio P(window >= Y_i) / P(max hidden >= Y_i).
pub fn ratio_finite(i: usize, k: usize, t: f64) -> f64 {
    assert!(i >= 1 && i < k);
    let stopped_at_or_above: f64 = (1..=i).map(|l| window_mass(l, k, t)).sum();
    stopped_at_or_above / max_hidden_tail(i, k)
}

/// R_inf(i, t): the k -> infinity limit of [`ratio_finite`].
pub fn ratio_limit_i(i: usize, t: f64) -> SeriesValue {
    assert!(i >= 1);
    let mut value = 0.0;
    let mut bound = 0.0;
    for l in 1..=i {
        let m = window_mass_limit(l, t);
        value += m.value;
        bound += m.truncation_bound;
    }
    let denom = 1.0 - 0.5f64.powi(i as i32);
    SeriesValue {
        value: value / denom,
        truncation_bound: bound / denom,
    }
}

/// R_inf(t) = t/2 + ln(2/(1+t)), the limit stop probability.
pub fn ratio_limit(t: f64) -> f64 {
    assert!((0.0..=1.0).contains(&t));
    t / 2.0 + (2.0 / (1.0 + t)).ln()
}

/// Series form of [`ratio_limit`], for cross-checking the closed form.
pub fn ratio_limit_series(t: f64) -> SeriesValue {
    let mut value = 0.5;
    let mut j = 2;
    loop {
        let term = (1.0 - t).powi(j as i32) * 0.5f64.powi(j as i32) / j as f64;
        value += term;
        if j >= MIN_TERMS_TO && term.abs() < TERM_CUTOFF {
            break;
        }
        j += 1;
    }
    SeriesValue {
        value,
        truncation_bound: geometric_tail_bound(j),
    }
}

/// Finite-k correction bound 16 k / 2^k on the distance between R_k and
/// R_inf quantities.
pub fn large_k_error_bound(k: usize) -> f64 {
    assert!(k >= 3);
    16.0 * k as f64 * 0.5f64.powi(k as i32)
}

/// Lower bound 1 - l^2/(2n - l) on P(k > l) when 2n values are ranked
/// uniformly at random, clamped to [0, 1].
pub fn k_tail_bound(ell: usize, n: usize) -> f64 {
    assert!(ell <= n);
    (1.0 - (ell * ell) as f64 / (2 * n - ell) as f64).clamp(0.0, 1.0)
}

/// G(k) = 1/(2^k (k-1)) + sum_{j<k} 1/(2^j j); the stop-mass envelope of
/// the mixture, minimized at k = 3.
pub fn g_of_k(k: usize) -> f64 {
    assert!(k >= 2);
    0.5f64.powi(k as i32) / (k as f64 - 1.0) + closed_stop(k)
}

/// Tail bound for series with terms dominated by 2/2^j after the last
/// included index.
fn geometric_tail_bound(last_j: usize) -> f64 {
    4.0 * 0.5f64.powi(last_j as i32)
}
