//! Elementary arithmetic functions and prime enumeration on machine integers.

use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{domain, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic primality test for all of `u64`.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    // these twelve bases are a deterministic witness set below 3.3e24
    'bases: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Prime factorisation by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> u32 {
    factorize(n).len() as u32
}

/// The first `k` primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut c = 2u64;
    while out.len() < k {
        if is_prime(c) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Largest `w` such that some `n <= limit` of the given parity has `w` distinct
/// prime factors (products of the first primes, skipping 2 for odd `n`).
pub fn max_omega_upto(limit: u64, odd: bool) -> u32 {
    let mut prod: u64 = 1;
    let mut w = 0;
    for p in first_primes(20).into_iter().skip(odd as usize) {
        match prod.checked_mul(p) {
            Some(next) if next <= limit => {
                prod = next;
                w += 1;
            }
            _ => break,
        }
    }
    w
}

/// Standard arithmetic data of `n >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArithmeticProfile {
    pub n: u64,
    pub divisors: Vec<u64>,
    /// `(d, mu(d))` for every divisor `d`, sorted by `d`.
    pub mu: Vec<(u64, i8)>,
    pub phi: u64,
    pub omega: u32,
    pub radical: u64,
    pub largest_prime_factor: u64,
}

impl ArithmeticProfile {
    /// `mu(n)` itself.
    pub fn mu_n(&self) -> i8 {
        self.mu.last().map_or(1, |&(_, m)| m)
    }

    /// Divisors `d` with `mu(d) != 0`, with their signs.
    pub fn squarefree_divisors(&self) -> impl Iterator<Item = (u64, i8)> + '_ {
        self.mu.iter().copied().filter(|&(_, m)| m != 0)
    }
}

pub fn arithmetic_profile(n: u64) -> Result<ArithmeticProfile> {
    if n < 2 {
        return Err(domain!("arithmetic profile needs n >= 2, got {n}"));
    }
    let fac = factorize(n);
    let mut divisors: Vec<(u64, i8)> = vec![(1, 1)];
    for &(p, e) in &fac {
        let mut next = Vec::with_capacity(divisors.len() * (e as usize + 1));
        for &(d, m) in &divisors {
            let mut pk = 1;
            for k in 0..=e {
                let mu = match k {
                    0 => m,
                    1 => -m,
                    _ => 0,
                };
                next.push((d * pk, mu));
                pk *= p;
            }
        }
        divisors = next;
    }
    divisors.sort_unstable();
    Ok(ArithmeticProfile {
        n,
        divisors: divisors.iter().map(|&(d, _)| d).collect(),
        mu: divisors,
        phi: fac.iter().fold(n, |acc, &(p, _)| acc / p * (p - 1)),
        omega: fac.len() as u32,
        radical: fac.iter().map(|&(p, _)| p).product(),
        largest_prime_factor: fac.last().map_or(1, |&(p, _)| p),
    })
}

/// All primes `<= limit`, Eratosthenes over odd numbers.
pub fn primes_upto(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let half = ((limit - 1) / 2) as usize;
    let mut composite = vec![false; half + 1];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j <= half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend((1..=half).filter(|&i| !composite[i]).map(|i| (2 * i + 1) as u64));
    out
}

const SEGMENT: u64 = 1 << 18;

/// Primes in `[lo, hi]` by a segmented sieve, passed to `visit` in order.
pub fn for_each_prime_in(lo: u64, hi: u64, mut visit: impl FnMut(u64)) {
    if hi < 2 || lo > hi {
        return;
    }
    let root = isqrt(hi);
    let base = primes_upto(root);
    let mut seg_lo = lo.max(2);
    let mut marks = vec![false; SEGMENT as usize];
    while seg_lo <= hi {
        let seg_hi = hi.min(seg_lo + SEGMENT - 1);
        let len = (seg_hi - seg_lo + 1) as usize;
        marks[..len].fill(false);
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let mut m = (seg_lo.div_ceil(p) * p).max(p * p);
            while m <= seg_hi {
                marks[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        for (i, &c) in marks[..len].iter().enumerate() {
            if !c {
                visit(seg_lo + i as u64);
            }
        }
        if seg_hi == u64::MAX {
            break;
        }
        seg_lo = seg_hi + 1;
    }
}

/// Sorted primes `p <= x` with `p = +-1 (mod n)`.
pub fn sieve_primes_in_classes(n: u64, x: u64) -> Result<Vec<u64>> {
    if n < 3 || x < n {
        return Err(domain!("need x >= n >= 3, got n = {n}, x = {x}"));
    }
    let mut out = Vec::new();
    for_each_prime_in(2, x, |p| {
        let r = p % n;
        if r == 1 || r == n - 1 {
            out.push(p);
        }
    });
    Ok(out)
}

pub fn isqrt(n: u64) -> u64 {
    num_integer::Roots::sqrt(&n)
}
