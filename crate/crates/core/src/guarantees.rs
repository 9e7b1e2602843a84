//! Tuned constants and machine-checked certifications of the headline
//! guarantees.
//!
//! Three certifications are exposed, each as a [`GuaranteeReport`]:
//!
//! * secretary — the closed rule picks the hidden maximum with probability
//!   at least ln 2 (1 - ln 2 / 2) for every couple structure;
//! * dominance — the optimal mixture keeps, for every rank, at least a
//!   2 a(r*) fraction of the hidden maximum's upper tail, which implies the
//!   prophet guarantee of (4 - 5 ln 2)/(5 - 6 ln 2);
//! * large-k — the timed window at its tuned excess t* approaches a ratio
//!   of about 0.6426 as the collision rank grows, with an explicit 16k/2^k
//!   finite-k correction.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas;

/// Floating-point slack absorbing rounding in certified comparisons; any
/// real violation is orders of magnitude larger.
pub const CERT_SLACK: f64 = 1e-12;

/// Slack for limit-ratio checks involving the bisection root, which is
/// located to 1e-9.
const ROOT_SLACK: f64 = 1e-8;

/// Outcome of one certification sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GuaranteeReport {
    /// The constant being certified.
    pub target_constant: f64,
    /// Worst ratio seen for each rank index across the scanned range.
    pub per_i_ratios: Vec<(usize, f64)>,
    /// Overall minimum ratio.
    pub min_ratio: f64,
    /// Scanned k range; `None` means the k -> infinity limit regime.
    pub k_range: Option<(usize, usize)>,
    /// Slack allowed below the target.
    pub tolerance: f64,
    /// Named subchecks that feed into `pass`.
    pub checks: BTreeMap<String, bool>,
    pub pass: bool,
    /// The (i, k) or i achieving the minimum, or the first failure.
    pub witness: String,
}

/// r* = (3 - 4 ln 2)/(5 - 6 ln 2), the mixing probability that balances
/// the three basic rules.
pub fn r_star() -> f64 {
    (3.0 - 4.0 * LN_2) / (5.0 - 6.0 * LN_2)
}

/// The prophet guarantee alpha = (4 - 5 ln 2)/(5 - 6 ln 2) = 2 a(r*).
pub fn prophet_guarantee() -> f64 {
    (4.0 - 5.0 * LN_2) / (5.0 - 6.0 * LN_2)
}

/// Certifies the per-rank dominance of the mixture at probability r over
/// all couple structures k <= k_max: for every i <= k the certified lower
/// bound on P(mixture >= Y_i) stays above 2 a(r) times the hidden
/// maximum's tail. Passing at r = r* proves the prophet guarantee.
pub fn certify_dominance(k_max: usize, r: f64) -> GuaranteeReport {
    assert!(k_max >= 2);
    let target = 2.0 * formulas::a_of_r(r);
    let mut per_i: BTreeMap<usize, f64> = BTreeMap::new();
    let mut min_ratio = f64::INFINITY;
    let mut witness = String::new();
    for k in 2..=k_max {
        let mut cumulative = 0.0;
        for i in 1..=k {
            let ratio = if i < k {
                cumulative += formulas::mixture_mass_lower(i, k, r);
                cumulative / formulas::max_hidden_tail(i, k)
            } else {
                formulas::mixture_stop(k, r)
            };
            let slot = per_i.entry(i).or_insert(f64::INFINITY);
            *slot = slot.min(ratio);
            if ratio < min_ratio {
                min_ratio = ratio;
                witness = format!("(i={i}, k={k})");
            }
        }
    }
    let pass = min_ratio >= target - CERT_SLACK;
    GuaranteeReport {
        target_constant: target,
        per_i_ratios: per_i.into_iter().collect(),
        min_ratio,
        k_range: Some((2, k_max)),
        tolerance: CERT_SLACK,
        checks: BTreeMap::new(),
        pass,
        witness,
    }
}

/// Certifies the secretary guarantee: F(k) stays above its limit for every
/// k <= k_max and has essentially reached it by k_max.
pub fn certify_secretary(k_max: usize) -> GuaranteeReport {
    assert!(k_max >= 2);
    let target = formulas::secretary_limit();
    let mut per_k = Vec::new();
    let mut min_ratio = f64::INFINITY;
    let mut witness = String::new();
    for k in 2..=k_max {
        let f = formulas::secretary_win_prob(k);
        per_k.push((k, f));
        if f < min_ratio {
            min_ratio = f;
            witness = format!("(k={k})");
        }
    }
    let converged = per_k.last().is_some_and(|&(_, f)| f - target < 1e-4);
    let mut checks = BTreeMap::new();
    checks.insert("win_prob_above_limit".into(), min_ratio >= target);
    checks.insert("converged_within_1e-4".into(), converged);
    GuaranteeReport {
        target_constant: target,
        per_i_ratios: per_k,
        min_ratio,
        k_range: Some((2, k_max)),
        tolerance: 0.0,
        checks: checks.clone(),
        pass: checks.values().all(|&b| b),
        witness,
    }
}

/// Bisection root finding; errors out when the bracket endpoints share a
/// sign, which would indicate a transcribed-formula bug rather than a
/// numeric accident.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut left: f64, mut right: f64, tol: f64) -> Result<f64> {
    assert!(tol > 0.0);
    let (f_left, f_right) = (f(left), f(right));
    if f_left == 0.0 {
        return Ok(left);
    }
    if f_right == 0.0 {
        return Ok(right);
    }
    if f_left.signum() == f_right.signum() {
        return Err(Error::BracketFailure {
            left,
            right,
            f_left,
            f_right,
        });
    }
    let mut f_left = f_left;
    while right - left > tol {
        let mid = 0.5 * (left + right);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_left.signum() {
            left = mid;
            f_left = f_mid;
        } else {
            right = mid;
        }
    }
    Ok(0.5 * (left + right))
}

/// Finds the window excess t* in [0.05, 0.2] where the limit ratio for the
/// top rank meets the limit stop probability; the crossing pins the
/// maximin of the timed window's guarantee.
pub fn find_t_star(tol: f64) -> Result<f64> {
    bisect(
        |t| formulas::ratio_limit_i(1, t).value - formulas::ratio_limit(t),
        0.05,
        0.2,
        tol,
    )
}

/// Certifies the large-k guarantee of the timed window at excess t:
/// the limit ratios dominate the limit stop probability for every rank up
/// to i_max, the series coefficients decay monotonically, the top-rank
/// mass dominates eight times the rank-4 mass, and the finite-k ratios for
/// k <= k_max stay within 16k/2^k of their limits. The target is the value
/// the optimal excess achieves, so certifying a detuned t fails.
pub fn certify_large_k(t: f64, i_max: usize, k_max: usize) -> GuaranteeReport {
    assert!((0.0..=1.0).contains(&t));
    assert!(i_max >= 1);
    let t_star = find_t_star(1e-9).expect("fixed bracket holds the root");
    let target = formulas::ratio_limit(t_star);

    let stop_limit = formulas::ratio_limit(t);
    let mut per_i = Vec::new();
    let mut min_ratio = stop_limit;
    let mut witness = "(stop limit)".to_string();
    let mut ratios_dominate = true;
    for i in 1..=i_max {
        let ratio = formulas::ratio_limit_i(i, t).value;
        per_i.push((i, ratio));
        if ratio < stop_limit - ROOT_SLACK {
            ratios_dominate = false;
        }
        if ratio < min_ratio {
            min_ratio = ratio;
            witness = format!("(i={i})");
        }
    }

    let coeff_monotone =
        (3..200).all(|j| formulas::a_jt(j, t) >= formulas::a_jt(j + 1, t) - CERT_SLACK);

    let p1 = formulas::window_mass_limit(1, t).value;
    let p4 = formulas::window_mass_limit(4, t).value;
    let top_mass_dominates = p1 >= 8.0 * p4;

    let mut finite_k_bounded = true;
    for k in 3..=k_max {
        let bound = formulas::large_k_error_bound(k);
        if (formulas::window_stop(k, t) - stop_limit).abs() > bound {
            finite_k_bounded = false;
        }
        for i in 1..k.min(i_max + 1) {
            let gap = (formulas::ratio_finite(i, k, t) - formulas::ratio_limit_i(i, t).value).abs();
            if gap > bound {
                finite_k_bounded = false;
            }
        }
    }

    let mut checks = BTreeMap::new();
    checks.insert("limit_ratios_dominate_stop".into(), ratios_dominate);
    checks.insert("series_coeffs_monotone".into(), coeff_monotone);
    checks.insert("top_mass_dominates_8x_rank4".into(), top_mass_dominates);
    checks.insert("finite_k_within_16k_over_2k".into(), finite_k_bounded);
    let pass = checks.values().all(|&b| b) && min_ratio >= target - ROOT_SLACK;
    GuaranteeReport {
        target_constant: target,
        per_i_ratios: per_i,
        min_ratio,
        k_range: None,
        tolerance: ROOT_SLACK,
        checks,
        pass,
        witness,
    }
}

/// Checks that the enumeration oracle reproduces every rational formula
/// exactly over all couple structures with up to `max_n` cards, and that
/// the oracle expectation ratio of the tuned mixture clears the prophet
/// guarantee on each of them. Returns the first witness on failure.
pub fn verify_oracle_equality(max_n: usize) -> std::result::Result<(), String> {
    use crate::algorithms::{AlgorithmSpec, Outcome};
    use crate::formulas::exact;
    use crate::instance::structured_instance;
    use crate::oracle;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};

    let alpha = prophet_guarantee();
    for n in 1..=max_n {
        for k in 2..=n + 1 {
            for kp in 1..k {
                let inst = structured_instance(n, k, kp).map_err(|e| e.to_string())?;
                for alg in [
                    AlgorithmSpec::Open,
                    AlgorithmSpec::Closed,
                    AlgorithmSpec::Full,
                ] {
                    let dist =
                        oracle::enumerate_distribution(&inst, &alg).map_err(|e| e.to_string())?;
                    if !dist.total().is_one() {
                        return Err(format!("{alg}: total mass not 1 at k={k} kp={kp}"));
                    }
                    for i in 1..=k {
                        let expected = match (alg, i < k) {
                            (AlgorithmSpec::Open, true) => exact::open_mass(i, k, i == kp),
                            (AlgorithmSpec::Open, false) => exact::open_mass_at_k(k),
                            (AlgorithmSpec::Closed, true) => exact::closed_mass(i, k),
                            (AlgorithmSpec::Full, true) => exact::full_mass(i, k),
                            _ => BigRational::zero(),
                        };
                        if dist.mass_of(Outcome::Rank(i)) != expected {
                            return Err(format!("{alg}: mass at Y{i} differs, k={k} kp={kp}"));
                        }
                    }
                }
                let joint = oracle::enumerate_win_joint(&inst).map_err(|e| e.to_string())?;
                for i in 1..k {
                    for j in 1..=2 * n {
                        let got = joint
                            .get(&(i, j))
                            .cloned()
                            .unwrap_or_else(BigRational::zero);
                        if got != exact::q_ij(i, j, k) {
                            return Err(format!("joint win mass q({i},{j}) differs at k={k}"));
                        }
                    }
                }
                let win: BigRational = joint.values().sum();
                if win != exact::secretary_win_prob(k) {
                    return Err(format!("joint win masses do not sum to F({k})"));
                }
                let (e_alg, e_max) =
                    oracle::enumerate_expectation(&inst, &AlgorithmSpec::Mixture(r_star()))
                        .map_err(|e| e.to_string())?;
                let ratio = (e_alg / e_max).to_f64().unwrap();
                if ratio < alpha - 1e-9 {
                    return Err(format!("mixture oracle ratio {ratio} at k={k} kp={kp}"));
                }
            }
        }
    }
    Ok(())
}

/// Checks the worst-case families: each basic rule is pinned near half of
/// the expected hidden maximum on its adversarial instance while the tuned
/// mixture clears 0.63 on both.
pub fn verify_adversarial(eps: f64) -> std::result::Result<(), String> {
    use crate::algorithms::AlgorithmSpec;
    use crate::montecarlo::{adversarial_instance, AdversarialPreset};
    use crate::oracle;
    use num_traits::ToPrimitive;

    let open_bad =
        adversarial_instance(AdversarialPreset::OpenBad, eps).map_err(|e| e.to_string())?;
    let closed_bad =
        adversarial_instance(AdversarialPreset::ClosedBad, eps).map_err(|e| e.to_string())?;
    let ratio = |inst: &crate::instance::Instance,
                 alg: &AlgorithmSpec|
     -> std::result::Result<f64, String> {
        let (e_alg, e_max) = oracle::enumerate_expectation(inst, alg).map_err(|e| e.to_string())?;
        Ok((e_alg / e_max).to_f64().unwrap())
    };
    for (what, inst, alg) in [
        ("open on open-bad", &open_bad, AlgorithmSpec::Open),
        ("closed on closed-bad", &closed_bad, AlgorithmSpec::Closed),
        ("full on closed-bad", &closed_bad, AlgorithmSpec::Full),
    ] {
        let r = ratio(inst, &alg)?;
        if (r - 0.5).abs() > 5.0 * eps {
            return Err(format!("{what}: ratio {r} escapes 0.5 +- 5 eps"));
        }
    }
    for (name, inst) in [("open-bad", &open_bad), ("closed-bad", &closed_bad)] {
        let r = ratio(inst, &AlgorithmSpec::Mixture(r_star()))?;
        if r <= 0.63 {
            return Err(format!("mixture on {name}: ratio {r} <= 0.63"));
        }
    }
    Ok(())
}

/// Checks the tail-completion inequality on its guaranteed interval, the
/// window-coefficient monotonicity, the exact win-probability difference
/// identity, and the stop-mass envelope minimum at k = 3.
pub fn verify_inequalities() -> std::result::Result<(), String> {
    use crate::formulas::exact;
    use num_rational::BigRational;
    use num_traits::One;

    let t_star = find_t_star(1e-9).map_err(|e| e.to_string())?;
    for r in [r_star(), 0.4, 2.0 / 3.0] {
        for k in 2..=60 {
            if !formulas::tail_series_check(k, r) {
                return Err(format!("tail inequality fails at k={k} r={r}"));
            }
        }
    }
    for j in 3..=200 {
        if formulas::a_jt(j, t_star) < formulas::a_jt(j + 1, t_star) {
            return Err(format!("window coefficient increases at j={j}"));
        }
    }
    for k in 2..=40usize {
        let diff = exact::secretary_win_prob(k + 1) - exact::secretary_win_prob(k);
        let expected = (BigRational::one() - exact::harmonic(k - 1))
            * exact::half_pow(k)
            * exact::rat(1, k as u64);
        if diff != expected {
            return Err(format!(
                "win-probability difference identity fails at k={k}"
            ));
        }
    }
    if formulas::g_of_k(2) < formulas::g_of_k(3) {
        return Err("stop-mass envelope not decreasing from k=2 to 3".into());
    }
    for k in 3..=39 {
        if formulas::g_of_k(k) > formulas::g_of_k(k + 1) {
            return Err(format!("stop-mass envelope decreases at k={k}"));
        }
    }
    Ok(())
}

/// Checks the tuned window excess against its published location and value.
pub fn verify_t_star() -> std::result::Result<(), String> {
    let t = find_t_star(1e-9).map_err(|e| e.to_string())?;
    if (t - 0.1128904).abs() >= 1e-6 {
        return Err(format!("t* = {t}, expected 0.1128904 +- 1e-6"));
    }
    let r_inf = formulas::ratio_limit(t);
    if (r_inf - 0.6426317).abs() >= 1e-6 {
        return Err(format!("limit ratio {r_inf}, expected 0.6426317 +- 1e-6"));
    }
    let residual = (formulas::ratio_limit_i(1, t).value - r_inf).abs();
    if residual >= 1e-8 {
        return Err(format!("root residual {residual} too large"));
    }
    Ok(())
}
