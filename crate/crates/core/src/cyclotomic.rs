//! Exact values of the homogenised cyclotomic polynomial `Phi_n(alpha, beta)`
//! and the part of `U_n` built from primes `= +-1 (mod n)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{arithmetic_profile, is_prime, primes_upto};
use crate::error::{domain, Error, Result};
use crate::interval::{Interval, DEFAULT_PRECISION_BITS};
use crate::lucas::{lucas_pair, LucasParams};

/// `Phi_n(alpha, beta) = prod_{d | n} U_{n/d}^{mu(d)}` for `n >= 2`.
pub fn cyclotomic_value(p: &LucasParams, n: u64) -> Result<BigInt> {
    if n < 2 {
        return Err(domain!("cyclotomic value needs n >= 2, got {n}"));
    }
    let prof = arithmetic_profile(n)?;
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (d, mu) in prof.squarefree_divisors() {
        let u = lucas_pair(p, n / d).0;
        if mu > 0 {
            num *= u;
        } else {
            den *= u;
        }
    }
    if den.is_zero() {
        return Err(Error::NonIntegerResult { n });
    }
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::NonIntegerResult { n });
    }
    Ok(q)
}

/// Enclosure of `ln(|Phi_n| / n)`, a lower bound for `ln M_n`.
pub fn primitive_part_lower(p: &LucasParams, n: u64) -> Result<Interval> {
    let phi = cyclotomic_value(p, n)?;
    Interval::from_ratio(phi.abs(), n, DEFAULT_PRECISION_BITS)?.ln()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitivePartResult {
    pub n: u64,
    pub phi_value: BigInt,
    /// `M_n`, present only when the trial division was certified complete.
    pub mn_value: Option<BigInt>,
    pub mn_lower_log: Interval,
}

/// `M_n`, the product of the prime powers `q^a || U_n` with `q = +-1 (mod n)`.
///
/// All primes up to `trial_bound` are divided out. A leftover cofactor is
/// accepted when it is provably prime (below `trial_bound^2`, or a `u64`
/// passing the deterministic test); otherwise `mn_value` is `None`.
pub fn m_n_exact(p: &LucasParams, n: u64, trial_bound: u64) -> Result<PrimitivePartResult> {
    if n < 2 || trial_bound < 2 {
        return Err(domain!("need n >= 2 and a trial bound >= 2, got n = {n}, bound = {trial_bound}"));
    }
    let phi_value = cyclotomic_value(p, n)?;
    let mn_lower_log = Interval::from_ratio(phi_value.abs(), n, DEFAULT_PRECISION_BITS)?.ln()?;
    let in_class = |q: &BigInt| {
        let r = q.mod_floor(&BigInt::from(n));
        r.is_one() || r == BigInt::from(n - 1)
    };
    let mut rest = lucas_pair(p, n).0.abs();
    let mut mn = BigInt::one();
    for q in primes_upto(trial_bound) {
        let qb = BigInt::from(q);
        loop {
            let (quo, rem) = rest.div_rem(&qb);
            if !rem.is_zero() {
                break;
            }
            rest = quo;
            if in_class(&qb) {
                mn *= &qb;
            }
        }
        if rest.is_one() {
            break;
        }
    }
    let certified_prime = rest > BigInt::one()
        && (rest < BigInt::from(trial_bound) * BigInt::from(trial_bound)
            || rest.to_u64().is_some_and(is_prime));
    let mn_value = if rest.is_one() {
        Some(mn)
    } else if certified_prime {
        if in_class(&rest) {
            mn *= &rest;
        }
        Some(mn)
    } else {
        None
    };
    Ok(PrimitivePartResult { n, phi_value, mn_value, mn_lower_log })
}

/// Whether the prime `q` avoids `Delta * n` and divides `Phi_n(alpha, beta)`.
///
/// Non-primes are never candidates and give `false`.
pub fn primitive_prime_filter(p: &LucasParams, n: u64, q: u64) -> bool {
    if !is_prime(q) || n < 2 {
        return false;
    }
    let dn = BigInt::from(p.delta()) * BigInt::from(n);
    if (dn % q).is_zero() {
        return false;
    }
    match cyclotomic_value(p, n) {
        Ok(v) => (v % q).is_zero(),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::arithmetic_profile;
    use crate::lucas::{u_at, validate_params};

    #[test]
    fn cyclotomic_examples() {
        let fib = validate_params(1, 1).unwrap();
        assert_eq!(cyclotomic_value(&fib, 12).unwrap(), BigInt::from(6));
        assert_eq!(cyclotomic_value(&fib, 5).unwrap(), BigInt::from(5));
        assert_eq!(cyclotomic_value(&fib, 2).unwrap(), BigInt::from(1));
        assert!(cyclotomic_value(&fib, 1).is_err());
        let m = validate_params(3, -2).unwrap();
        assert_eq!(cyclotomic_value(&m, 6).unwrap(), BigInt::from(3));
    }

    #[test]
    fn divisor_product_recovers_u() {
        for (r, s) in [(1, 1), (3, -2), (-2, 5), (1, -3)] {
            let p = validate_params(r, s).unwrap();
            for n in 2..120 {
                let prof = arithmetic_profile(n).unwrap();
                let prod: BigInt = prof
                    .divisors
                    .iter()
                    .filter(|&&d| d > 1)
                    .map(|&d| cyclotomic_value(&p, d).unwrap())
                    .product();
                assert_eq!(prod, u_at(&p, n).value, "({r},{s}) n={n}");
            }
        }
    }

    #[test]
    fn primitive_part_examples() {
        let fib = validate_params(1, 1).unwrap();
        let l = primitive_part_lower(&fib, 13).unwrap();
        assert!((l.mid_f64() - (233.0f64 / 13.0).ln()).abs() < 1e-12);
        let l = primitive_part_lower(&fib, 12).unwrap();
        assert!((l.mid_f64() + core::f64::consts::LN_2).abs() < 1e-15);
        let m = validate_params(3, -2).unwrap();
        let l = primitive_part_lower(&m, 6).unwrap();
        assert!((l.mid_f64() + core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn exact_primitive_parts() {
        let fib = validate_params(1, 1).unwrap();
        for (n, mn) in [(13, 233), (11, 89), (12, 1)] {
            let res = m_n_exact(&fib, n, 10_000).unwrap();
            assert_eq!(res.mn_value, Some(BigInt::from(mn)), "n={n}");
        }
        // F_89 = 1069 * 1665088321800481: the large cofactor is certified by primality,
        // but with a bound below 1069 the composite leftover cannot be certified
        let res = m_n_exact(&fib, 89, 2000).unwrap();
        assert_eq!(res.mn_value, Some(u_at(&fib, 89).value));
        assert_eq!(m_n_exact(&fib, 89, 100).unwrap().mn_value, None);
        assert!(m_n_exact(&fib, 1, 100).is_err());
    }

    #[test]
    fn exact_parts_dominate_the_cyclotomic_bound() {
        let fib = validate_params(1, 1).unwrap();
        for n in 5..80 {
            let res = m_n_exact(&fib, n, 100_000).unwrap();
            if let Some(mn) = res.mn_value {
                assert!(mn * BigInt::from(n) >= res.phi_value.abs(), "n={n}");
            }
        }
    }

    #[test]
    fn filter_examples() {
        let fib = validate_params(1, 1).unwrap();
        assert!(primitive_prime_filter(&fib, 11, 89));
        assert!(!primitive_prime_filter(&fib, 12, 2));
        assert!(primitive_prime_filter(&fib, 7, 13));
        assert!(!primitive_prime_filter(&fib, 7, 14));
    }
}
