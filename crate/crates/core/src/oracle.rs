//! Ground-truth engines.
//!
//! The discrete rules have a finite probability space: 2^n coin patterns
//! times n! flip orders, all equally likely. Exhausting it with exact
//! rational weights gives outcome distributions and expectations with no
//! rounding at all, which the closed-form layer must match bit for bit.
//! The mixture rule is integrated analytically as three weighted branches.
//!
//! The timed window rule has no finite discrete enumeration (its outcome
//! depends on arrival times beyond their ordering), so its ground truth is
//! numeric quadrature over the per-case integrals of its derivation, with
//! Monte Carlo as a second witness.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::algorithms::{
    run_closed, run_full, run_moving_window, AlgorithmSpec, Outcome, WindowSpec,
};
use crate::error::{Error, Result};
use crate::instance::{Instance, Rank, RankedView};
use crate::records::{OutcomeDistribution, Provenance};

/// An exact outcome distribution from exhaustive enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    /// Probability of each outcome; absent outcomes have mass zero.
    pub mass: BTreeMap<Outcome, BigRational>,
    /// Digest of the instance the distribution was computed for.
    pub instance_digest: u64,
}

impl ExactDistribution {
    pub fn mass_of(&self, outcome: Outcome) -> BigRational {
        self.mass
            .get(&outcome)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Total probability; exactly one for a complete enumeration.
    pub fn total(&self) -> BigRational {
        self.mass.values().sum()
    }

    /// Probability of stopping at all.
    pub fn stop_mass(&self) -> BigRational {
        self.mass
            .iter()
            .filter(|(o, _)| **o != Outcome::NoStop)
            .map(|(_, p)| p)
            .sum()
    }
}

fn mixture_rational(r: f64) -> Result<BigRational> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::BadAlgorithmSpec(format!("mixture:{r}")));
    }
    Ok(BigRational::from_float(r).expect("finite"))
}

fn enumerate_basic(rv: &RankedView, spec: &WindowSpec) -> Result<BTreeMap<Outcome, BigRational>> {
    let enumeration = rv.enumerate_discrete()?;
    let w = enumeration.weight();
    let mut mass: BTreeMap<Outcome, BigRational> = BTreeMap::new();
    for real in enumeration {
        let res = run_moving_window(rv, &real, spec);
        *mass.entry(res.outcome).or_insert_with(BigRational::zero) += &w;
    }
    Ok(mass)
}

fn scale(
    mass: &BTreeMap<Outcome, BigRational>,
    factor: &BigRational,
) -> BTreeMap<Outcome, BigRational> {
    mass.iter().map(|(o, p)| (*o, p * factor)).collect()
}

fn merge(into: &mut BTreeMap<Outcome, BigRational>, from: BTreeMap<Outcome, BigRational>) {
    for (o, p) in from {
        *into.entry(o).or_insert_with(BigRational::zero) += p;
    }
}

/// Exact outcome distribution of a discrete rule by exhausting all
/// realizations. The mixture rule uses three analytically weighted
/// branches; the timed window rule is rejected (see [`quadrature_window`]).
pub fn enumerate_distribution(
    instance: &Instance,
    alg: &AlgorithmSpec,
) -> Result<ExactDistribution> {
    let rv = instance.rank();
    let n = rv.n();
    let mass = match *alg {
        AlgorithmSpec::Open => enumerate_basic(&rv, &WindowSpec::open(n))?,
        AlgorithmSpec::Closed => enumerate_basic(&rv, &WindowSpec::closed(n))?,
        AlgorithmSpec::Full => enumerate_basic(&rv, &WindowSpec::full(n))?,
        AlgorithmSpec::Mixture(r) => {
            let r = mixture_rational(r)?;
            let half = (BigRational::one() - &r) / BigRational::from_integer(2.into());
            let mut mass = scale(&enumerate_basic(&rv, &WindowSpec::open(n))?, &half);
            merge(
                &mut mass,
                scale(&enumerate_basic(&rv, &WindowSpec::closed(n))?, &half),
            );
            merge(
                &mut mass,
                scale(&enumerate_basic(&rv, &WindowSpec::full(n))?, &r),
            );
            mass
        }
        AlgorithmSpec::WindowT(_) => {
            return Err(Error::BadAlgorithmSpec(
                "window:<t> has no finite discrete enumeration; use quadrature or Monte Carlo"
                    .into(),
            ))
        }
    };
    Ok(ExactDistribution {
        mass,
        instance_digest: instance.digest(),
    })
}

/// Exact expectations (E[selected value], E[max hidden]) over the same
/// probability space; a non-stop contributes zero value.
pub fn enumerate_expectation(
    instance: &Instance,
    alg: &AlgorithmSpec,
) -> Result<(BigRational, BigRational)> {
    let rv = instance.rank();
    let values: Vec<BigRational> = (1..=rv.num_values())
        .map(|rank| BigRational::from_float(rv.value(rank)).expect("finite positive value"))
        .collect();
    let dist = enumerate_distribution(instance, alg)?;
    let e_alg: BigRational = dist
        .mass
        .iter()
        .map(|(o, p)| match o {
            Outcome::Rank(r) => p * &values[r - 1],
            Outcome::NoStop => BigRational::zero(),
        })
        .sum();
    let e_max: BigRational = enumerate_max_hidden(instance)?
        .into_iter()
        .map(|(rank, p)| p * &values[rank - 1])
        .sum();
    Ok((e_alg, e_max))
}

/// Exact distribution of the rank of the maximum hidden value.
pub fn enumerate_max_hidden(instance: &Instance) -> Result<BTreeMap<Rank, BigRational>> {
    let rv = instance.rank();
    let enumeration = rv.enumerate_discrete()?;
    let w = enumeration.weight();
    let mut mass: BTreeMap<Rank, BigRational> = BTreeMap::new();
    for real in enumeration {
        *mass
            .entry(rv.max_hidden_discrete(&real))
            .or_insert_with(BigRational::zero) += &w;
    }
    Ok(mass)
}

/// Exact joint win masses of the closed rule: weight of the event that it
/// selects Y_i, Y_i is the hidden maximum, and Y_j tops Y_i's window.
pub fn enumerate_win_joint(instance: &Instance) -> Result<BTreeMap<(Rank, Rank), BigRational>> {
    let rv = instance.rank();
    let enumeration = rv.enumerate_discrete()?;
    let w = enumeration.weight();
    let mut mass: BTreeMap<(Rank, Rank), BigRational> = BTreeMap::new();
    for real in enumeration {
        let res = run_closed(&rv, &real);
        if let Outcome::Rank(i) = res.outcome {
            if rv.max_hidden_discrete(&real) == i {
                let j = res.threshold_at_stop.expect("closed window is never empty");
                *mass.entry((i, j)).or_insert_with(BigRational::zero) += &w;
            }
        }
    }
    Ok(mass)
}

/// Exact NO_STOP mass of the full rule; equal to 1/2 on every instance.
pub fn full_no_stop_mass(instance: &Instance) -> Result<BigRational> {
    let rv = instance.rank();
    let enumeration = rv.enumerate_discrete()?;
    let w = enumeration.weight();
    let mut no_stop = BigRational::zero();
    for real in enumeration {
        if run_full(&rv, &real).outcome == Outcome::NoStop {
            no_stop += &w;
        }
    }
    Ok(no_stop)
}

/// Quadrature evaluation of the timed window rule's outcome distribution.
#[derive(Debug, Clone)]
pub struct WindowQuadrature {
    pub k: usize,
    pub t: f64,
    /// mass[i-1] = P(select Y_i) for i in [1, k-1].
    pub mass: Vec<f64>,
    pub no_stop: f64,
    /// Richardson estimate of the worst per-mass quadrature error.
    pub error_bound: f64,
}

impl WindowQuadrature {
    pub fn mass_of(&self, i: usize) -> f64 {
        self.mass[i - 1]
    }

    pub fn stop_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Packs the masses into the shared distribution shape; the NO_STOP
    /// entry absorbs the remainder so the total is exactly one.
    pub fn to_distribution(&self) -> OutcomeDistribution {
        let mut mass: BTreeMap<Outcome, f64> = self
            .mass
            .iter()
            .enumerate()
            .map(|(idx, &p)| (Outcome::Rank(idx + 1), p))
            .collect();
        mass.insert(Outcome::NoStop, self.no_stop);
        OutcomeDistribution {
            mass,
            provenance: Provenance::Oracle,
            k: self.k,
        }
    }
}

/// Composite Simpson rule with `panels` subintervals (rounded up to even).
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = panels.max(2) + panels % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for m in 1..n {
        let x = a + h * m as f64;
        acc += f(x) * if m % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Integrates the per-rank case decomposition of the timed window rule for
/// one series index j: the four regions of (arrival of Y_i, arrival of the
/// window maximum Y_j), each with the 1/2 density per arrival time.
fn window_case_sum(j: usize, t: f64, panels: usize) -> f64 {
    let e = j as i32 - 2;
    // Y_i arrives in [0, t]; Y_j must arrive before time zero.
    let case1 = simpson(&|x: f64| 0.25 * ((1.0 - x) / 2.0).powi(e), 0.0, t, panels);
    // Y_i arrives in (t, 1]; Y_j before zero, inside the window.
    let case2 = simpson(
        &|x: f64| 0.5 * ((1.0 + t - x) / 2.0) * ((1.0 - t) / 2.0).powi(e),
        t,
        1.0,
        panels,
    );
    // Y_j arrives in [0, t): its own window reaches back to -1, so some
    // earlier value must land below the left edge of Y_i's window.
    let case3 = simpson(
        &|x: f64| 0.5 * (t / 2.0) * (((1.0 - t) / 2.0).powi(e) - ((1.0 - x) / 2.0).powi(e)),
        t,
        1.0,
        panels,
    );
    // Y_j arrives in [t, theta_i): nested integral over its arrival y.
    let case4 = simpson(
        &|x: f64| {
            0.25 * simpson(
                &|y: f64| ((1.0 - t) / 2.0).powi(e) - ((1.0 - x + y - t) / 2.0).powi(e),
                t,
                x,
                panels,
            )
        },
        t,
        1.0,
        panels,
    );
    case1 + case2 + case3 + case4
}

/// The collision-rank term: every other top value outside Y_i's window,
/// split by whether Y_i arrives before or after t.
fn window_collision_term(k: usize, t: f64, panels: usize) -> f64 {
    let e = k as i32 - 2;
    simpson(&|x: f64| 0.5 * ((1.0 - x) / 2.0).powi(e), 0.0, t, panels)
        + ((1.0 - t) / 2.0).powi(k as i32 - 1)
}

/// Numerically integrates the outcome distribution of the timed window
/// rule for couple structure k, independently of the closed forms it is
/// used to check.
///
/// `panels` controls the Simpson resolution; the result carries a
/// Richardson error estimate from comparing against half resolution and is
/// rejected when that bound exceeds `tol`.
pub fn quadrature_window(k: usize, t: f64, panels: usize, tol: f64) -> Result<WindowQuadrature> {
    assert!(
        (2..=8).contains(&k),
        "quadrature oracle supports k in [2, 8]"
    );
    assert!((0.0..=1.0).contains(&t));
    let eval = |p: usize| -> Vec<f64> {
        let case_sums: Vec<f64> = (2..k).map(|j| window_case_sum(j, t, p)).collect();
        let collision = window_collision_term(k, t, p);
        (1..k)
            .map(|i| collision + case_sums[i - 1..].iter().sum::<f64>())
            .collect()
    };
    let coarse = eval(panels / 2);
    let fine = eval(panels);
    let error_bound = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (c - f).abs() / 15.0)
        .fold(0.0f64, f64::max)
        + 1e-14;
    if error_bound > tol {
        return Err(Error::ResolutionTooCoarse {
            bound: error_bound,
            tol,
        });
    }
    let stop: f64 = fine.iter().sum();
    Ok(WindowQuadrature {
        k,
        t,
        mass: fine,
        no_stop: 1.0 - stop,
        error_bound,
    })
}

/// Converts an exact distribution to floats for reporting.
pub fn to_float_mass(dist: &ExactDistribution) -> BTreeMap<Outcome, f64> {
    dist.mass
        .iter()
        .map(|(o, p)| (*o, p.to_f64().unwrap()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{self, exact};
    use crate::instance::structured_instance;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn all_structures(max_n: usize) -> Vec<(Instance, usize, usize)> {
        let mut out = Vec::new();
        for n in 1..=max_n {
            for k in 2..=n + 1 {
                for kp in 1..k {
                    out.push((structured_instance(n, k, kp).unwrap(), k, kp));
                }
            }
        }
        out
    }

    #[test]
    fn single_card_distributions() {
        let inst = Instance::new(vec![(2.0, 1.0)]).unwrap();
        let closed = enumerate_distribution(&inst, &AlgorithmSpec::Closed).unwrap();
        assert_eq!(closed.mass_of(Outcome::Rank(1)), rat(1, 2));
        assert_eq!(closed.mass_of(Outcome::NoStop), rat(1, 2));
        assert!(closed.total().is_one());
        let open = enumerate_distribution(&inst, &AlgorithmSpec::Open).unwrap();
        assert_eq!(open.mass_of(Outcome::Rank(1)), rat(1, 2));
        assert_eq!(open.mass_of(Outcome::Rank(2)), rat(1, 2));
        assert_eq!(open.mass_of(Outcome::NoStop), BigRational::zero());
    }

    #[test]
    fn single_card_expectations() {
        let inst = Instance::new(vec![(2.0, 1.0)]).unwrap();
        let (e_open, e_max) = enumerate_expectation(&inst, &AlgorithmSpec::Open).unwrap();
        assert_eq!(e_open, rat(3, 2));
        assert_eq!(e_max, rat(3, 2));
        let (e_closed, e_max2) = enumerate_expectation(&inst, &AlgorithmSpec::Closed).unwrap();
        assert_eq!(e_closed, rat(1, 1));
        assert_eq!(e_closed / e_max2, rat(2, 3));
    }

    #[test]
    fn full_rule_no_stop_mass_is_exactly_half() {
        for inst in [
            Instance::new(vec![(4.0, 3.0), (2.0, 1.0)]).unwrap(),
            structured_instance(3, 4, 2).unwrap(),
            structured_instance(4, 3, 1).unwrap(),
        ] {
            assert_eq!(full_no_stop_mass(&inst).unwrap(), rat(1, 2));
            let full = enumerate_distribution(&inst, &AlgorithmSpec::Full).unwrap();
            assert_eq!(full.stop_mass(), rat(1, 2));
        }
    }

    #[test]
    fn oracle_matches_exact_formulas_small_n() {
        for (inst, k, kp) in all_structures(3) {
            for alg in [
                AlgorithmSpec::Open,
                AlgorithmSpec::Closed,
                AlgorithmSpec::Full,
            ] {
                let dist = enumerate_distribution(&inst, &alg).unwrap();
                assert!(dist.total().is_one());
                for i in 1..k {
                    let expected = match alg {
                        AlgorithmSpec::Open => exact::open_mass(i, k, i == kp),
                        AlgorithmSpec::Closed => exact::closed_mass(i, k),
                        _ => exact::full_mass(i, k),
                    };
                    assert_eq!(
                        dist.mass_of(Outcome::Rank(i)),
                        expected,
                        "{alg:?} i={i} k={k} kp={kp}"
                    );
                }
                let at_k = match alg {
                    AlgorithmSpec::Open => exact::open_mass_at_k(k),
                    _ => BigRational::zero(),
                };
                assert_eq!(dist.mass_of(Outcome::Rank(k)), at_k, "{alg:?} k={k}");
                let stop = match alg {
                    AlgorithmSpec::Open => exact::open_stop(k),
                    AlgorithmSpec::Closed => exact::closed_stop(k),
                    _ => exact::full_stop(k),
                };
                assert_eq!(dist.stop_mass(), stop, "{alg:?} k={k} kp={kp}");
            }
        }
    }

    #[test]
    fn oracle_matches_exact_mixture() {
        // The f64 mixing probability is converted to its exact dyadic value.
        let r = BigRational::from_float(0.27).unwrap();
        assert_ne!(r, rat(27, 100));
        for (inst, k, kp) in all_structures(3) {
            let dist = enumerate_distribution(&inst, &AlgorithmSpec::Mixture(0.27)).unwrap();
            assert!(dist.total().is_one());
            for i in 1..k {
                assert_eq!(
                    dist.mass_of(Outcome::Rank(i)),
                    exact::mixture_mass(i, k, &r, i == kp),
                    "i={i} k={k} kp={kp}"
                );
            }
            assert_eq!(
                dist.mass_of(Outcome::Rank(k)),
                exact::mixture_mass_at_k(k, &r)
            );
        }
    }

    #[test]
    fn max_hidden_matches_formula() {
        for (inst, k, _) in all_structures(4) {
            let mass = enumerate_max_hidden(&inst).unwrap();
            for i in 1..=k {
                assert_eq!(
                    mass.get(&i).cloned().unwrap_or_else(BigRational::zero),
                    exact::max_hidden_mass(i, k)
                );
            }
            assert!(mass.keys().all(|&i| i <= k));
        }
    }

    #[test]
    fn win_joint_matches_q_and_sums_to_win_prob() {
        for (inst, k, kp) in all_structures(3) {
            let joint = enumerate_win_joint(&inst).unwrap();
            for i in 1..k {
                for j in 1..=2 * inst.n() {
                    let got = joint
                        .get(&(i, j))
                        .cloned()
                        .unwrap_or_else(BigRational::zero);
                    assert_eq!(got, exact::q_ij(i, j, k), "i={i} j={j} k={k} kp={kp}");
                }
            }
            let total: BigRational = joint.values().sum();
            assert_eq!(total, exact::secretary_win_prob(k), "k={k}");
        }
    }

    #[test]
    fn distribution_depends_only_on_couple_structure() {
        // Same (n, k, k'), different values and different low-rank pairing.
        let a = Instance::new(vec![(40.0, 1.0), (30.0, 20.0), (7.0, 3.0)]).unwrap();
        let b = Instance::new(vec![(9.0, 0.25), (8.5, 8.0), (0.5, 0.125)]).unwrap();
        let (ka, kb) = (a.rank(), b.rank());
        assert_eq!((ka.k(), ka.k_prime()), (kb.k(), kb.k_prime()));
        for alg in [
            AlgorithmSpec::Open,
            AlgorithmSpec::Closed,
            AlgorithmSpec::Full,
            AlgorithmSpec::Mixture(0.5),
        ] {
            let da = enumerate_distribution(&a, &alg).unwrap();
            let db = enumerate_distribution(&b, &alg).unwrap();
            assert_eq!(da.mass, db.mass, "{alg:?}");
        }
    }

    #[test]
    fn window_rejected_and_cap_enforced() {
        let inst = Instance::new(vec![(2.0, 1.0)]).unwrap();
        assert!(matches!(
            enumerate_distribution(&inst, &AlgorithmSpec::WindowT(0.5)),
            Err(Error::BadAlgorithmSpec(_))
        ));
        let big = structured_instance(7, 2, 1).unwrap();
        assert!(matches!(
            enumerate_distribution(&big, &AlgorithmSpec::Open),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn quadrature_collapses_to_closed_and_full() {
        let q0 = quadrature_window(3, 0.0, 256, 1e-8).unwrap();
        let q1 = quadrature_window(3, 1.0, 256, 1e-8).unwrap();
        for i in 1..3 {
            assert!((q0.mass_of(i) - formulas::closed_mass(i, 3)).abs() < 1e-8);
            assert!((q1.mass_of(i) - formulas::full_mass(i, 3)).abs() < 1e-8);
        }
    }

    #[test]
    fn quadrature_matches_window_formula() {
        let t = 0.1128904;
        let q = quadrature_window(4, t, 256, 1e-8).unwrap();
        for i in 1..4 {
            assert!(
                (q.mass_of(i) - formulas::window_mass(i, 4, t)).abs() < 1e-8,
                "i={i}"
            );
        }
        assert!((q.stop_mass() - (1.0 - q.no_stop)).abs() < 1e-15);
        assert!(q.error_bound < 1e-8);
        let dist = q.to_distribution();
        assert!((dist.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(dist.provenance, crate::records::Provenance::Oracle);
        assert_eq!(dist.mass_of(Outcome::Rank(1)), q.mass_of(1));
    }

    #[test]
    fn quadrature_reports_coarse_resolution() {
        assert!(matches!(
            quadrature_window(6, 0.3, 4, 1e-12),
            Err(Error::ResolutionTooCoarse { .. })
        ));
    }
}
