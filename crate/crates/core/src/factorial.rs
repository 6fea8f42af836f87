//! Membership in the set of signed products of factorials `+-m_1! ... m_k!`
//! with `1 < m_1 <= ... <= m_k` (the empty product giving 1).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_prime, primes_upto};
use crate::error::{Error, Result};

/// `nu_p(k!)` by Legendre's digit-sum formula.
pub fn legendre_valuation(p: u64, k: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut digits = 0;
    let mut rest = k;
    while rest > 0 {
        digits += rest % p;
        rest /= p;
    }
    Ok((k - digits) / (p - 1))
}

/// A certificate `sign * prod args[i]!`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PFWitness {
    pub sign: i8,
    pub args: Vec<u64>,
}

impl PFWitness {
    pub fn value(&self) -> BigInt {
        let mag = self.args.iter().fold(BigUint::one(), |acc, &m| acc * factorial(m));
        BigInt::from_biguint(if self.sign < 0 { Sign::Minus } else { Sign::Plus }, mag)
    }

    /// The empty product, i.e. `|N| = 1`.
    pub fn is_trivial(&self) -> bool {
        self.args.is_empty()
    }
}

impl core::fmt::Display for PFWitness {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.sign < 0 {
            f.write_str("-")?;
        }
        if self.args.is_empty() {
            return f.write_str("1");
        }
        for (i, m) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{m}!")?;
        }
        Ok(())
    }
}

pub fn factorial(m: u64) -> BigUint {
    (2..=m).fold(BigUint::one(), |acc, k| acc * k)
}

/// Exact factorials `0! ..= max_arg!` with per-prime valuations.
#[derive(Clone, Debug)]
pub struct FactorialTable {
    max_arg: u64,
    factorials: Vec<BigUint>,
    valuations: Vec<(u64, Vec<u64>)>,
}

impl FactorialTable {
    pub fn new(max_arg: u64) -> Self {
        let mut factorials = Vec::with_capacity(max_arg as usize + 1);
        factorials.push(BigUint::one());
        for m in 1..=max_arg {
            let next = factorials[m as usize - 1].clone() * m;
            factorials.push(next);
        }
        let valuations = primes_upto(max_arg)
            .into_iter()
            .map(|p| {
                let mut acc = 0;
                let mut col = vec![0; max_arg as usize + 1];
                for m in 1..=max_arg {
                    let mut k = m;
                    while k % p == 0 {
                        k /= p;
                        acc += 1;
                    }
                    col[m as usize] = acc;
                }
                (p, col)
            })
            .collect();
        FactorialTable { max_arg, factorials, valuations }
    }

    pub fn max_arg(&self) -> u64 {
        self.max_arg
    }

    pub fn get(&self, m: u64) -> Option<&BigUint> {
        self.factorials.get(m as usize)
    }

    /// `nu_p(m!)` for a tabulated prime `p`.
    pub fn valuation(&self, p: u64, m: u64) -> Option<u64> {
        let (_, col) = self.valuations.iter().find(|(q, _)| *q == p)?;
        col.get(m as usize).copied()
    }
}

/// Why a number was rejected without a search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RejectReason {
    Odd,
    /// `|N|` exceeds `((2v+1)!)^v` where `v = nu_2(N)`.
    Size { v: u64 },
}

/// Cheap necessary conditions for membership; `None` when inconclusive.
pub fn pf_fast_reject(n: &BigInt) -> Option<RejectReason> {
    let mag = n.magnitude();
    if mag <= &BigUint::one() {
        return None;
    }
    let v = mag.trailing_zeros().unwrap_or(0);
    if v == 0 {
        return Some(RejectReason::Odd);
    }
    // every factor m! contributes at least (m-1)/2 twos, so k <= v and m <= 2v+1
    let f = factorial(2 * v + 1);
    let nbits = mag.bits();
    let fbits = f.bits();
    if nbits <= v.saturating_mul(fbits - 1) {
        return None;
    }
    if nbits > v.saturating_mul(fbits) {
        return Some(RejectReason::Size { v });
    }
    (mag > &num_traits::pow(f, v as usize)).then_some(RejectReason::Size { v })
}

const SMALL_FACTORIALS: [u64; 21] = {
    let mut t = [1u64; 21];
    let mut i = 1;
    while i < 21 {
        t[i] = t[i - 1] * i as u64;
        i += 1;
    }
    t
};

/// Largest `m` worth trying as a factor of `r`.
fn arg_ceiling(v2: u64) -> u64 {
    2 * v2 + 1
}

struct Decider {
    memo: BTreeMap<(u64, u64), bool>,
    vector_memo: BTreeMap<(Vec<u64>, u64), bool>,
}

impl Decider {
    fn new() -> Self {
        Decider { memo: BTreeMap::new(), vector_memo: BTreeMap::new() }
    }

    /// Can `r` be written with factorial arguments all `<= cap`?
    fn small(&mut self, r: u64, cap: u64) -> bool {
        if r == 1 {
            return true;
        }
        if r & 1 == 1 {
            return false;
        }
        let cap = cap.min(arg_ceiling(r.trailing_zeros() as u64)).min(20);
        if let Some(&hit) = self.memo.get(&(r, cap)) {
            return hit;
        }
        let mut found = false;
        for m in (2..=cap).rev() {
            let f = SMALL_FACTORIALS[m as usize];
            if r.is_multiple_of(f) && self.small(r / f, m) {
                found = true;
                break;
            }
        }
        self.memo.insert((r, cap), found);
        found
    }

    fn big(&mut self, r: &BigUint, cap: u64) -> bool {
        if let Some(small) = r.to_u64() {
            return self.small(small, cap);
        }
        let Some(v) = r.trailing_zeros() else {
            return false;
        };
        let cap = cap.min(arg_ceiling(v));
        let primes = primes_upto(cap);
        let mut rest = r.clone();
        let mut exps = Vec::with_capacity(primes.len());
        for &p in &primes {
            let mut e = 0;
            loop {
                let (q, rem) = num_integer::Integer::div_rem(&rest, &BigUint::from(p));
                if !rem.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            exps.push(e);
        }
        // a prime above every admissible argument can never be absorbed
        if !rest.is_one() {
            return false;
        }
        let nu: Vec<Vec<u64>> = (0..=cap)
            .map(|m| primes.iter().map(|&p| legendre_valuation(p, m).unwrap_or(0)).collect())
            .collect();
        self.solve(&primes, &nu, &mut exps, cap)
    }

    /// Exact cover of the exponent vector `exps` by factorial valuation vectors.
    ///
    /// If `P` is the largest prime present, the largest argument lies in
    /// `[P, P')` where `P'` is the next prime, which keeps the branching tiny.
    fn solve(&mut self, primes: &[u64], nu: &[Vec<u64>], exps: &mut Vec<u64>, cap: u64) -> bool {
        let Some(top) = exps.iter().rposition(|&e| e > 0) else {
            return true;
        };
        let key = (exps.clone(), cap);
        if let Some(&hit) = self.vector_memo.get(&key) {
            return hit;
        }
        let lo = primes[top];
        let hi = primes.get(top + 1).map_or(cap, |&q| q - 1).min(cap);
        let mut found = false;
        for m in (lo..=hi).rev() {
            let row = &nu[m as usize];
            if row.iter().zip(exps.iter()).all(|(a, b)| a <= b) {
                exps.iter_mut().zip(row).for_each(|(e, a)| *e -= a);
                found = self.solve(primes, nu, exps, m);
                exps.iter_mut().zip(row).for_each(|(e, a)| *e += a);
                if found {
                    break;
                }
            }
        }
        self.vector_memo.insert(key, found);
        found
    }
}

/// Is `N` a signed product of factorials?
pub fn pf_member(n: &BigInt) -> Result<bool> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    if pf_fast_reject(n).is_some() {
        return Ok(false);
    }
    Ok(Decider::new().big(n.magnitude(), u64::MAX))
}

/// `pf_member` specialised to machine integers.
pub fn pf_member_u64(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    Ok(Decider::new().small(n, u64::MAX))
}

/// Up to `limit` witnesses for `N`, in lexicographic order of `args`.
pub fn pf_decompose(n: &BigInt, limit: usize) -> Result<Vec<PFWitness>> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let sign = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mut out: Vec<Vec<u64>> = Vec::new();
    if limit == 0 || pf_fast_reject(n).is_some() {
        return Ok(Vec::new());
    }
    let mut decider = Decider::new();
    let mut stack = Vec::new();
    ascend(n.magnitude(), 2, &mut stack, &mut out, limit, &mut decider);
    let witnesses: Vec<PFWitness> = out.into_iter().map(|args| PFWitness { sign, args }).collect();
    debug_assert!(witnesses.iter().all(|w| &w.value() == n));
    Ok(witnesses)
}

/// Is `r` a product of factorials whose arguments are all `>= floor`?
fn feasible_from(r: &BigUint, floor: u64, decider: &mut Decider) -> bool {
    if r.is_one() {
        return true;
    }
    // the smallest argument's factorial divides r
    if !(r % factorial(floor)).is_zero() {
        return false;
    }
    decider.big(r, u64::MAX)
}

fn ascend(
    r: &BigUint,
    lo: u64,
    stack: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
    limit: usize,
    decider: &mut Decider,
) {
    if out.len() >= limit {
        return;
    }
    if r.is_one() {
        out.push(stack.clone());
        return;
    }
    let Some(v) = r.trailing_zeros() else {
        return;
    };
    let hi = arg_ceiling(v);
    if lo > hi {
        return;
    }
    let mut f = factorial(lo);
    for m in lo..=hi {
        if m > lo {
            f *= m;
        }
        if !(r % &f).is_zero() {
            // m! | r fails, so every larger factorial fails too
            break;
        }
        let q = r / &f;
        if !feasible_from(&q, m, decider) {
            continue;
        }
        stack.push(m);
        ascend(&q, m, stack, out, limit, decider);
        stack.pop();
        if out.len() >= limit {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_valuation(2, 10).unwrap(), 8);
        assert_eq!(legendre_valuation(7, 6).unwrap(), 0);
        assert_eq!(legendre_valuation(3, 9).unwrap(), 4);
        assert_eq!(legendre_valuation(4, 9), Err(Error::NotPrime(4)));
    }

    #[test]
    fn legendre_matches_repeated_division() {
        for p in primes_upto(50) {
            let mut count = 0;
            for k in 1..=5000u64 {
                let mut x = k;
                while x % p == 0 {
                    x /= p;
                    count += 1;
                }
                assert_eq!(legendre_valuation(p, k).unwrap(), count, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn membership_examples() {
        assert!(pf_member(&big(39_916_800)).unwrap());
        assert!(!pf_member(&big(5)).unwrap());
        assert!(pf_member(&big(-144)).unwrap());
        assert!(pf_member(&big(1)).unwrap());
        assert!(pf_member(&big(-1)).unwrap());
        assert_eq!(pf_member(&big(0)), Err(Error::ZeroInput));
        assert!(!pf_member(&big(10)).unwrap());
        let huge = BigInt::from(factorial(60)) * BigInt::from(factorial(41)) * BigInt::from(factorial(2));
        assert!(pf_member(&huge).unwrap());
        assert!(!pf_member(&(huge * 7)).unwrap());
    }

    #[test]
    fn decomposition_examples() {
        let w = pf_decompose(&big(4), 10).unwrap();
        assert_eq!(w, [PFWitness { sign: 1, args: vec![2, 2] }]);
        let w = pf_decompose(&big(144), 10).unwrap();
        let args: Vec<_> = w.iter().map(|w| w.args.clone()).collect();
        assert_eq!(args, [vec![2, 2, 3, 3], vec![3, 4]]);
        assert!(pf_decompose(&big(3), 10).unwrap().is_empty());
        let w = pf_decompose(&big(-1), 10).unwrap();
        assert_eq!(w, [PFWitness { sign: -1, args: vec![] }]);
        assert_eq!(pf_decompose(&big(144), 1).unwrap().len(), 1);
        let w = pf_decompose(&big(39_916_800), 100).unwrap();
        assert!(w.iter().any(|w| w.args == [11]));
        assert!(w.windows(2).all(|p| p[0].args < p[1].args));
        for x in &w {
            assert_eq!(x.value(), big(39_916_800));
        }
    }

    #[test]
    fn fast_reject_examples() {
        let odd = num_traits::pow(BigInt::from(10), 60) + 1;
        assert_eq!(pf_fast_reject(&odd), Some(RejectReason::Odd));
        assert_eq!(pf_fast_reject(&big(2 * 7)), Some(RejectReason::Size { v: 1 }));
        assert_eq!(pf_fast_reject(&big(6)), None);
        assert_eq!(pf_fast_reject(&big(24)), None);
        assert_eq!(pf_fast_reject(&big(-1)), None);
    }

    #[test]
    fn table_agrees_with_legendre() {
        let t = FactorialTable::new(60);
        assert_eq!(t.get(11).unwrap(), &BigUint::from(39_916_800u64));
        for p in primes_upto(60) {
            for m in 0..=60 {
                assert_eq!(t.valuation(p, m).unwrap(), legendre_valuation(p, m).unwrap());
            }
        }
        assert_eq!(t.valuation(4, 10), None);
    }

    #[test]
    fn display_witness() {
        assert_eq!(PFWitness { sign: -1, args: vec![3, 4] }.to_string(), "-3!*4!");
        assert_eq!(PFWitness { sign: 1, args: vec![] }.to_string(), "1");
    }
}
