//! Poisson tail probabilities.

use crate::error::{invalid, Result};
use crate::scalar::{CompensatedSum, Scalar};

/// `ln(i!)`: exact product for small `i`, Stirling series beyond.
pub fn ln_factorial<T: Scalar>(i: u64) -> T {
    if i <= 30 {
        let mut p = T::one();
        for j in 2..=i {
            p *= T::from_u64(j).expect("small integer");
        }
        return p.ln();
    }
    let n = T::from_u64(i).expect("integer representable");
    let half = T::lit(0.5);
    let inv = T::one() / n;
    let inv2 = inv * inv;
    let series = inv
        * (T::lit(1.0 / 12.0)
            - inv2
                * (T::lit(1.0 / 360.0)
                    - inv2 * (T::lit(1.0 / 1260.0) - inv2 * T::lit(1.0 / 1680.0))));
    (n + half) * n.ln() - n + half * (T::TAU()).ln() + series
}

/// `P(Poi(lambda) = i)`.
pub fn poisson_pmf<T: Scalar>(i: u64, lambda: T) -> T {
    if lambda == T::zero() {
        return if i == 0 { T::one() } else { T::zero() };
    }
    let i_t = T::from_u64(i).expect("integer representable");
    (-lambda + i_t * lambda.ln() - ln_factorial::<T>(i)).exp()
}

/// `P(Poi(lambda) >= k)` for `lambda >= 0` (unchecked).
///
/// Sums whichever side of `k` is the tail away from the mode, starting from
/// the term nearest the mode and stopping once terms are negligible.
pub(crate) fn poisson_tail<T: Scalar>(k: u32, lambda: T) -> T {
    if k == 0 {
        return T::one();
    }
    if lambda == T::zero() {
        return T::zero();
    }
    let eps = T::epsilon() * T::lit(0.01);
    let kt = T::from_u32(k).expect("integer representable");
    let mut acc = CompensatedSum::new();
    if kt <= lambda {
        // Lower sum over i = k-1, k-2, ..., 0; terms shrink going down.
        let mut term = poisson_pmf(u64::from(k - 1), lambda);
        acc.add(term);
        for i in (1..k).rev() {
            term *= T::from_u32(i).expect("integer") / lambda;
            acc.add(term);
            if term <= eps * acc.value() {
                break;
            }
        }
        (T::one() - acc.value()).max(T::zero())
    } else {
        // Upper sum over i = k, k+1, ...; terms shrink going up since k > lambda.
        let mut term = poisson_pmf(u64::from(k), lambda);
        let mut i = u64::from(k);
        while term > T::zero() {
            acc.add(term);
            i += 1;
            term *= lambda / T::from_u64(i).expect("integer");
            if term <= eps * acc.value() {
                break;
            }
        }
        acc.value().min(T::one())
    }
}

/// `Psi_k(lambda) = P(Poi(lambda) >= k)`.
pub fn psi<T: Scalar>(k: u32, lambda: T) -> Result<T> {
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(invalid(format!(
            "Poisson mean must be finite and nonnegative, got {lambda}"
        )));
    }
    Ok(poisson_tail(k, lambda))
}

/// `psi_k(c) = sum_{l > k} e^{-c} c^l / l! = Psi_{k+1}(c)`.
pub fn psi_tail<T: Scalar>(k: u32, c: T) -> Result<T> {
    psi(k + 1, c)
}

/// `d/dc psi_k(c) = e^{-c} c^k / k!`.
pub fn psi_tail_derivative<T: Scalar>(k: u32, c: T) -> T {
    poisson_pmf(u64::from(k), c)
}

/// Smallest `K0 >= 1` with `psi_K(abar) < K^{-alpha}` for every `K` in `K0..=k_max`.
pub fn tightness_threshold(alpha: f64, abar: f64, k_max: u32) -> Option<u32> {
    let holds = |kk: u32| poisson_tail(kk + 1, abar) < (kk as f64).powf(-alpha);
    if !holds(k_max) {
        return None;
    }
    let mut k0 = k_max;
    while k0 > 1 && holds(k0 - 1) {
        k0 -= 1;
    }
    Some(k0)
}
