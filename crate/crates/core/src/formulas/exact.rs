//! Exact-rational backend for the purely rational formulas.
//!
//! Every quantity here is a finite sum of dyadic rationals times harmonic
//! rationals, so `BigRational` evaluates it without rounding; the
//! enumeration oracle must reproduce these values bit for bit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// 1 / 2^e.
pub fn half_pow(e: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << e)
}

/// p / q as a rational.
pub fn rat(p: i64, q: u64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// H_s, the s-th harmonic number.
pub fn harmonic(s: usize) -> BigRational {
    (1..=s as i64).map(|i| rat(1, i as u64)).sum()
}

/// P(max hidden = Y_i).
pub fn max_hidden_mass(i: usize, k: usize) -> BigRational {
    assert!(i >= 1 && k >= 2);
    if i < k {
        half_pow(i)
    } else if i == k {
        half_pow(k - 1)
    } else {
        BigRational::zero()
    }
}

/// P(max hidden >= Y_i).
pub fn max_hidden_tail(i: usize, k: usize) -> BigRational {
    assert!(i >= 1 && k >= 2);
    if i < k {
        BigRational::one() - half_pow(i)
    } else {
        BigRational::one()
    }
}

/// Joint win mass for the closed rule (select Y_i, Y_i is the hidden
/// maximum, Y_j tops its window).
pub fn q_ij(i: usize, j: usize, k: usize) -> BigRational {
    assert!(i >= 1 && i < k);
    if j == k {
        half_pow(k - 1) * rat(1, i as u64)
    } else if j > i && j < k {
        half_pow(j) * rat(1, i as u64) * (BigRational::one() - rat(1, j as u64))
    } else {
        BigRational::zero()
    }
}

/// F(k) via the harmonic-number form.
pub fn secretary_win_prob(k: usize) -> BigRational {
    assert!(k >= 2);
    let mut total = harmonic(k - 1) * half_pow(k - 1);
    for i in 1..=k.saturating_sub(2) {
        for j in i + 1..=k - 1 {
            total += half_pow(j) * rat(1, i as u64) * rat(j as i64 - 1, j as u64);
        }
    }
    total
}

/// P(closed rule = Y_i) for i < k.
pub fn closed_mass(i: usize, k: usize) -> BigRational {
    assert!(i >= 1 && i < k);
    let mut p = half_pow(k - 1);
    for j in i + 1..=k - 1 {
        p += half_pow(j) * (BigRational::one() - rat(1, j as u64));
    }
    p
}

/// P(closed rule stops).
pub fn closed_stop(k: usize) -> BigRational {
    assert!(k >= 2);
    (1..k).map(|j| half_pow(j) * rat(1, j as u64)).sum()
}

/// P(open rule = Y_i) for i < k, with the collision-card indicator.
pub fn open_mass(i: usize, k: usize, i_is_k_prime: bool) -> BigRational {
    assert!(i >= 1 && i < k);
    let indicator = if i_is_k_prime {
        BigRational::zero()
    } else {
        rat(1, k as u64 - 1)
    };
    let mut p = half_pow(k - 1) * (BigRational::one() - indicator);
    for j in i + 1..=k - 1 {
        p += half_pow(j) * (BigRational::one() - rat(1, j as u64));
    }
    p
}

/// P(open rule = Y_k) = 1/2^(k-1).
pub fn open_mass_at_k(k: usize) -> BigRational {
    assert!(k >= 2);
    half_pow(k - 1)
}

/// P(open rule stops).
pub fn open_stop(k: usize) -> BigRational {
    assert!(k >= 2);
    half_pow(k - 1) * rat(1, k as u64 - 1) + closed_stop(k)
}

/// P(full rule = Y_i) for i < k.
pub fn full_mass(i: usize, k: usize) -> BigRational {
    assert!(i >= 1 && i < k);
    let mut p = half_pow(k - 1) * rat(1, k as u64 - 1);
    for j in i + 1..=k - 1 {
        p += half_pow(j) * rat(1, j as u64 - 1);
    }
    p
}

/// P(full rule stops) = 1/2.
pub fn full_stop(_k: usize) -> BigRational {
    rat(1, 2)
}

/// Exact mixture mass at Y_i for rational mixing probability r.
pub fn mixture_mass(i: usize, k: usize, r: &BigRational, i_is_k_prime: bool) -> BigRational {
    let half = (BigRational::one() - r) / rat(2, 1);
    half.clone() * open_mass(i, k, i_is_k_prime) + half * closed_mass(i, k) + r * full_mass(i, k)
}

/// Mixture mass at the collision rank Y_k.
pub fn mixture_mass_at_k(k: usize, r: &BigRational) -> BigRational {
    (BigRational::one() - r) / rat(2, 1) * open_mass_at_k(k)
}

/// P(mixture stops).
pub fn mixture_stop(k: usize, r: &BigRational) -> BigRational {
    let half = (BigRational::one() - r) / rat(2, 1);
    half.clone() * open_stop(k) + half * closed_stop(k) + r * full_stop(k)
}

/// Indicator-discarding lower bound on the mixture mass at Y_i.
pub fn mixture_mass_lower(i: usize, k: usize, r: &BigRational) -> BigRational {
    assert!(i >= 1 && i < k);
    let one = BigRational::one();
    let mut p = (one.clone() - r) * half_pow(k - 1)
        + (r - (one.clone() - r) / rat(2, 1)) * half_pow(k - 1) * rat(1, k as u64 - 1);
    for j in i + 1..=k - 1 {
        p += half_pow(j)
            * ((one.clone() - r) - (one.clone() - r) * rat(1, j as u64) + r * rat(1, j as u64 - 1));
    }
    p
}

/// G(k) = 1/(2^k (k-1)) + sum_{j<k} 1/(2^j j).
pub fn g_of_k(k: usize) -> BigRational {
    assert!(k >= 2);
    half_pow(k) * rat(1, k as u64 - 1) + closed_stop(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_exact() {
        assert_eq!(harmonic(4), rat(25, 12));
        assert_eq!(harmonic(1), rat(1, 1));
    }

    #[test]
    fn q_ij_exact_values() {
        assert_eq!(q_ij(1, 2, 2), rat(1, 2));
        assert_eq!(q_ij(1, 2, 3), rat(1, 8));
        assert_eq!(q_ij(2, 1, 4), BigRational::zero());
    }

    #[test]
    fn win_prob_exact_values_and_q_sum() {
        assert_eq!(secretary_win_prob(2), rat(1, 2));
        assert_eq!(secretary_win_prob(3), rat(1, 2));
        assert_eq!(secretary_win_prob(4), rat(1, 2) - rat(1, 48));
        for k in 2..=9 {
            let via_q: BigRational = (1..k)
                .flat_map(|i| (i + 1..=k).map(move |j| q_ij(i, j, k)))
                .sum();
            assert_eq!(secretary_win_prob(k), via_q, "k={k}");
        }
    }

    #[test]
    fn win_prob_difference_identity() {
        // F(k+1) - F(k) = (1 - H_{k-1}) / (k 2^k), exactly.
        for k in 2..=40usize {
            let diff = secretary_win_prob(k + 1) - secretary_win_prob(k);
            let expected = (BigRational::one() - harmonic(k - 1)) * half_pow(k) * rat(1, k as u64);
            assert_eq!(diff, expected, "k={k}");
        }
    }

    #[test]
    fn stop_probability_identities() {
        assert_eq!(closed_stop(2), rat(1, 2));
        assert_eq!(open_stop(2), rat(1, 1));
        for k in 2..=40usize {
            assert_eq!(
                open_stop(k) - closed_stop(k),
                half_pow(k - 1) * rat(1, k as u64 - 1),
                "k={k}"
            );
        }
    }

    #[test]
    fn mass_sums_are_exact() {
        for k in 2..=20usize {
            let closed_total: BigRational = (1..k).map(|i| closed_mass(i, k)).sum();
            assert_eq!(closed_total, closed_stop(k));
            let full_total: BigRational = (1..k).map(|i| full_mass(i, k)).sum();
            assert_eq!(full_total, full_stop(k));
            for kp in 1..k {
                let open_total: BigRational = (1..k)
                    .map(|i| open_mass(i, k, i == kp))
                    .sum::<BigRational>()
                    + open_mass_at_k(k);
                assert_eq!(open_total, open_stop(k), "k={k} kp={kp}");
            }
        }
    }

    #[test]
    fn mixture_matches_term_by_term_expansion() {
        // Second route to the mixture mass: the direct series expansion with
        // the indicator folded into the k-dependent term.
        let one = BigRational::one;
        for k in 2..=15usize {
            for r in [rat(0, 1), rat(27, 100), rat(2, 3), rat(1, 1)] {
                for kp in 1..k {
                    for i in 1..k {
                        let indicator = if i == kp { rat(0, 1) } else { rat(1, 1) };
                        let mut direct = (one() - &r) * half_pow(k - 1)
                            + (&r - indicator * (one() - &r) / rat(2, 1))
                                * half_pow(k - 1)
                                * rat(1, k as u64 - 1);
                        for j in i + 1..=k - 1 {
                            direct += half_pow(j)
                                * ((one() - &r) - (one() - &r) * rat(1, j as u64)
                                    + &r * rat(1, j as u64 - 1));
                        }
                        assert_eq!(
                            mixture_mass(i, k, &r, i == kp),
                            direct,
                            "i={i} k={k} kp={kp}"
                        );
                        assert!(mixture_mass(i, k, &r, i == kp) >= mixture_mass_lower(i, k, &r));
                    }
                }
            }
        }
    }

    #[test]
    fn g_exact_minimum() {
        assert_eq!(g_of_k(3), rat(11, 16));
        assert!(g_of_k(2) >= g_of_k(3));
        for k in 3..=40 {
            assert!(g_of_k(k) <= g_of_k(k + 1));
        }
    }

    #[test]
    fn max_hidden_exact() {
        assert_eq!(max_hidden_mass(1, 4), rat(1, 2));
        assert_eq!(max_hidden_mass(4, 4), rat(1, 8));
        assert_eq!(max_hidden_mass(5, 4), BigRational::zero());
        for k in 2..=12 {
            let total: BigRational = (1..=k).map(|i| max_hidden_mass(i, k)).sum();
            assert!(total.is_one());
        }
    }
}
