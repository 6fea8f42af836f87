//! Outward-rounded interval arithmetic on dyadic fixed-point endpoints.
//!
//! An [`Interval`] stores two big-integer mantissas `lo` and `hi` sharing a
//! number of fractional bits `p`, and denotes the real interval
//! `[lo / 2^p, hi / 2^p]`. Every operation rounds the lower endpoint toward
//! negative infinity and the upper endpoint toward positive infinity, so the
//! true value of any expression built from these operations stays enclosed.
//!
//! Transcendental functions (`ln`, `exp`, `sqrt`) evaluate each endpoint with
//! guard bits and explicit truncation-error terms, then round outward.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Fractional bits used when a caller does not ask for anything else.
pub const DEFAULT_PRECISION_BITS: u32 = 64;

/// Last rung of the escalation ladder used by inequality deciders.
pub const MAX_PRECISION_BITS: u32 = 512;

const GUARD_BITS: u32 = 32;

/// Directed rounding mode for a single endpoint computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Round {
    Down,
    Up,
}

impl Round {
    fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

fn shr_round(x: &BigInt, k: u32, dir: Round) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    match dir {
        Round::Down => x >> k,
        Round::Up => -((-x) >> k),
    }
}

/// `x * 2^shift`, rounding in `dir` when `shift` is negative.
fn scale_pow2(x: &BigInt, shift: i64, dir: Round) -> BigInt {
    if shift >= 0 {
        x << shift as u64
    } else {
        shr_round(x, (-shift) as u32, dir)
    }
}

fn div_round(num: &BigInt, den: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => num.div_floor(den),
        Round::Up => -((-num).div_floor(den)),
    }
}

fn mul_shift(a: &BigInt, b: &BigInt, w: u32, dir: Round) -> BigInt {
    shr_round(&(a * b), w, dir)
}

fn sqrt_round(x: &BigInt, dir: Round) -> BigInt {
    let s = x.sqrt();
    if dir == Round::Up && &(&s * &s) < x {
        s + 1
    } else {
        s
    }
}

/// `atanh(t)` for `t = t_w / 2^w` in `[0, 1/3]`, as a `w`-bit mantissa.
fn atanh_series(t: &BigInt, w: u32, dir: Round) -> BigInt {
    let t2 = mul_shift(t, t, w, dir);
    let mut power = t.clone();
    let mut sum = BigInt::zero();
    let mut k = BigInt::one();
    loop {
        sum += div_round(&power, &k, dir);
        power = mul_shift(&power, &t2, w, dir);
        k += 2;
        match dir {
            Round::Down if power.is_zero() => break,
            // the neglected tail is at most 9/8 of the next (rounded-up) power
            Round::Up if power <= BigInt::one() => {
                sum += 2;
                break;
            }
            _ => {}
        }
    }
    sum
}

/// `floor(ln 2 * 2^704)`, little-endian 32-bit limbs.
const LN2_LIMBS: [u32; 22] = [
    0xb136603b, 0xb9ea9bc3, 0x317c387e, 0x1acbda11, 0x224ae8c5, 0x3e96ca16, 0x1169b825, 0x27573b29,
    0xc1382144, 0xed2eae35, 0x4afa1b10, 0x559552fb, 0x6debac98, 0xe7b87620, 0x8baafa2b, 0x8a0d175b,
    0x7298b62d, 0x40f34326, 0x03f2f6af, 0xc9e3b398, 0xd1cf79ab, 0xb17217f7,
];
const LN2_TABLE_BITS: u32 = 704;

fn ln2_mantissa(w: u32, dir: Round) -> BigInt {
    if w <= LN2_TABLE_BITS {
        let table = BigInt::from(num_bigint::BigUint::from_slice(&LN2_LIMBS));
        let m = table >> (LN2_TABLE_BITS - w);
        return match dir {
            Round::Down => m,
            Round::Up => m + 1,
        };
    }
    let third = div_round(&(BigInt::one() << w), &BigInt::from(3), dir);
    atanh_series(&third, w, dir) << 1
}

/// `ln(x / 2^f)` for a positive mantissa, returned with `f` fractional bits.
fn ln_mantissa(x: &BigInt, f: u32, dir: Round) -> BigInt {
    debug_assert!(x.is_positive());
    let w = f + GUARD_BITS;
    // x / 2^f lies in [2^k, 2^(k+1))
    let k = x.bits() as i64 - 1 - f as i64;
    let m = scale_pow2(x, w as i64 - f as i64 - k, dir);
    let one = BigInt::one() << w;
    let t = div_round(&((&m - &one) << w), &(&m + &one), dir);
    let series = atanh_series(&t, w, dir) << 1;
    let ln2 = ln2_mantissa(w, if k >= 0 { dir } else { dir.flip() });
    shr_round(&(series + ln2 * k), w - f, dir)
}

/// `exp(x / 2^f)` for `x >= 0`, returned as a `w`-bit mantissa.
fn exp_nonneg_mantissa(x: &BigInt, f: u32, w: u32, dir: Round) -> BigInt {
    debug_assert!(!x.is_negative());
    let k = x.bits() as i64 - f as i64;
    // halve the argument until it is at most 1/2
    let s = (k + 1).max(0) as u32;
    let r = scale_pow2(x, w as i64 - f as i64 - s as i64, dir);
    let mut sum = BigInt::one() << w;
    let mut term = sum.clone();
    let mut i = BigInt::one();
    loop {
        term = div_round(&mul_shift(&term, &r, w, dir), &i, dir);
        sum += &term;
        i += 1;
        match dir {
            Round::Down if term.is_zero() => break,
            Round::Up if term <= BigInt::one() => {
                sum += 2;
                break;
            }
            _ => {}
        }
    }
    for _ in 0..s {
        sum = mul_shift(&sum, &sum, w, dir);
    }
    sum
}

fn exp_mantissa(x: &BigInt, f: u32, dir: Round) -> BigInt {
    let magnitude = (x.bits() as i64 - f as i64).max(0) as u32;
    let w = f + GUARD_BITS + 2 * magnitude + 8;
    if x.is_negative() {
        let denom = exp_nonneg_mantissa(&-x, f, w, dir.flip());
        let q = div_round(&(BigInt::one() << (2 * w)), &denom, dir);
        shr_round(&q, w - f, dir)
    } else {
        shr_round(&exp_nonneg_mantissa(x, f, w, dir), w - f, dir)
    }
}

fn mantissa_to_f64(m: &BigInt, bits: u32) -> f64 {
    let excess = m.bits().saturating_sub(60) as u32;
    let head = (m >> excess).to_f64().unwrap_or(f64::NAN);
    let exp = excess as i32 - bits as i32;
    head * pow2_f64(exp)
}

fn pow2_f64(e: i32) -> f64 {
    if (-1022..=1023).contains(&e) {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e > 1023 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Exact dyadic decomposition `x = mant * 2^exp` of a finite f64.
fn f64_exact(x: f64) -> Option<(BigInt, i64)> {
    if !x.is_finite() {
        return None;
    }
    let raw = x.to_bits();
    let sign = if raw >> 63 == 1 { -1 } else { 1 };
    let exp_field = ((raw >> 52) & 0x7ff) as i64;
    let frac = raw & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_field == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_field - 1075)
    };
    Some((BigInt::from(mant) * sign, exp))
}

/// Closed real interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

impl Interval {
    fn from_mantissas(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi, bits }
    }

    /// Degenerate interval holding an integer exactly.
    pub fn from_int<T: Into<BigInt>>(v: T, bits: u32) -> Self {
        let m = v.into() << bits;
        Interval::from_mantissas(m.clone(), m, bits)
    }

    /// Tightest enclosure of `num / den` at `bits` fractional bits.
    pub fn from_ratio<A: Into<BigInt>, B: Into<BigInt>>(num: A, den: B, bits: u32) -> Result<Self> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(domain!("ratio with zero denominator"));
        }
        let scaled = num << bits;
        let (lo, hi) = if den.is_negative() {
            let (n, d) = (-scaled, -den);
            (div_round(&n, &d, Round::Down), div_round(&n, &d, Round::Up))
        } else {
            (div_round(&scaled, &den, Round::Down), div_round(&scaled, &den, Round::Up))
        };
        Ok(Interval::from_mantissas(lo, hi, bits))
    }

    /// Encloses a decimal literal such as `"2.50637"` exactly (rounded outward).
    pub fn from_decimal(lit: &str, bits: u32) -> Result<Self> {
        let (num, den) = parse_decimal(lit).ok_or_else(|| domain!("bad decimal literal {lit:?}"))?;
        Interval::from_ratio(num, den, bits)
    }

    /// Encloses the real numbers whose decimal expansion starts with `digits`
    /// (a truncated expansion, so the value lies within one final-digit unit above).
    pub fn from_truncated_decimal(digits: &str, bits: u32) -> Result<Self> {
        let (num, den) =
            parse_decimal(digits).ok_or_else(|| domain!("bad decimal literal {digits:?}"))?;
        if num.is_negative() {
            return Err(domain!("truncated expansion must be nonnegative"));
        }
        let lo = Interval::from_ratio(num.clone(), den.clone(), bits)?;
        let hi = Interval::from_ratio(num + 1, den, bits)?;
        Ok(Interval::from_mantissas(lo.lo, hi.hi, bits))
    }

    /// Smallest interval containing both endpoints.
    pub fn hull(&self, other: &Interval) -> Interval {
        let (a, b, bits) = align(self, other);
        Interval::from_mantissas(a.lo.min(b.lo), a.hi.max(b.hi), bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lo_mantissa(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_mantissa(&self) -> &BigInt {
        &self.hi
    }

    /// Approximate lower endpoint (for display and diagnostics only).
    pub fn lo_f64(&self) -> f64 {
        mantissa_to_f64(&self.lo, self.bits)
    }

    pub fn hi_f64(&self) -> f64 {
        mantissa_to_f64(&self.hi, self.bits)
    }

    pub fn mid_f64(&self) -> f64 {
        mantissa_to_f64(&(&self.lo + &self.hi), self.bits + 1)
    }

    /// Width `hi - lo`, exactly, as an interval of its own precision.
    pub fn width(&self) -> Interval {
        let w = &self.hi - &self.lo;
        Interval::from_mantissas(w.clone(), w, self.bits)
    }

    /// Width as a mantissa comparison-friendly value: `(hi - lo) / 2^bits`.
    pub fn width_f64(&self) -> f64 {
        mantissa_to_f64(&(&self.hi - &self.lo), self.bits)
    }

    /// Floor of the lower endpoint.
    pub fn floor_lo(&self) -> BigInt {
        &self.lo >> self.bits
    }

    /// Floor of the upper endpoint.
    pub fn floor_hi(&self) -> BigInt {
        &self.hi >> self.bits
    }

    /// Ceiling of the lower endpoint.
    pub fn ceil_lo(&self) -> BigInt {
        shr_round(&self.lo, self.bits, Round::Up)
    }

    pub fn contains_int<T: Into<BigInt>>(&self, v: T) -> bool {
        let m = v.into() << self.bits;
        self.lo <= m && m <= self.hi
    }

    /// Exact containment test for a finite f64.
    pub fn contains_f64(&self, x: f64) -> bool {
        let Some((mant, exp)) = f64_exact(x) else {
            return false;
        };
        // compare mant * 2^(exp + bits) with the endpoints
        let e = exp + self.bits as i64;
        if e >= 0 {
            let v = mant << e as u64;
            self.lo <= v && v <= self.hi
        } else {
            let k = (-e) as u64;
            let lo = &self.lo << k;
            let hi = &self.hi << k;
            lo <= mant && mant <= hi
        }
    }

    /// Exact containment test for a rational `num / den` (`den > 0`).
    pub fn contains_ratio(&self, num: &BigInt, den: &BigInt) -> bool {
        let v = num << self.bits;
        &self.lo * den <= v && v <= &self.hi * den
    }

    /// Re-express at another precision, rounding outward if bits are dropped.
    pub fn with_bits(&self, bits: u32) -> Interval {
        let shift = bits as i64 - self.bits as i64;
        Interval::from_mantissas(
            scale_pow2(&self.lo, shift, Round::Down),
            scale_pow2(&self.hi, shift, Round::Up),
            bits,
        )
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Decided ordering of the two enclosed values, if the enclosures separate.
    pub fn compare(&self, other: &Interval) -> Option<Ordering> {
        let (a, b, _) = align(self, other);
        if a.lo > b.hi {
            Some(Ordering::Greater)
        } else if a.hi < b.lo {
            Some(Ordering::Less)
        } else if a.lo == a.hi && b.lo == b.hi && a.lo == b.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Every point of `self` exceeds every point of `other`.
    pub fn certainly_gt(&self, other: &Interval) -> bool {
        self.compare(other) == Some(Ordering::Greater)
    }

    /// Every point of `self` is at most every point of `other`.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        let (a, b, _) = align(self, other);
        a.hi <= b.lo
    }

    pub fn max(&self, other: &Interval) -> Interval {
        let (a, b, bits) = align(self, other);
        Interval::from_mantissas(a.lo.max(b.lo), a.hi.max(b.hi), bits)
    }

    pub fn min(&self, other: &Interval) -> Interval {
        let (a, b, bits) = align(self, other);
        Interval::from_mantissas(a.lo.min(b.lo), a.hi.min(b.hi), bits)
    }

    /// Multiply by an exact integer.
    pub fn scale<T: Into<BigInt>>(&self, k: T) -> Interval {
        let k = k.into();
        let (a, b) = (&self.lo * &k, &self.hi * &k);
        if k.is_negative() {
            Interval::from_mantissas(b, a, self.bits)
        } else {
            Interval::from_mantissas(a, b, self.bits)
        }
    }

    pub fn div(&self, other: &Interval) -> Result<Interval> {
        let (a, b, bits) = align(self, other);
        if !b.lo.is_positive() && !b.hi.is_negative() {
            return Err(domain!("interval division by an enclosure containing zero"));
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in [&a.lo, &a.hi] {
            let scaled = n << bits;
            for d in [&b.lo, &b.hi] {
                let (f, c) = if d.is_negative() {
                    let (nn, dd) = (-&scaled, -d);
                    (div_round(&nn, &dd, Round::Down), div_round(&nn, &dd, Round::Up))
                } else {
                    (div_round(&scaled, d, Round::Down), div_round(&scaled, d, Round::Up))
                };
                lo = Some(lo.map_or(f.clone(), |x| x.min(f)));
                hi = Some(hi.map_or(c.clone(), |x| x.max(c)));
            }
        }
        Ok(Interval::from_mantissas(lo.unwrap(), hi.unwrap(), bits))
    }

    pub fn recip(&self) -> Result<Interval> {
        Interval::from_int(1, self.bits).div(self)
    }

    pub fn square(&self) -> Interval {
        self * self
    }

    pub fn powi(&self, k: u32) -> Interval {
        let mut acc = Interval::from_int(1, self.bits);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Natural logarithm; requires a strictly positive enclosure.
    pub fn ln(&self) -> Result<Interval> {
        if !self.lo.is_positive() {
            return Err(domain!("logarithm of an enclosure reaching {}", self.lo_f64()));
        }
        Ok(Interval::from_mantissas(
            ln_mantissa(&self.lo, self.bits, Round::Down),
            ln_mantissa(&self.hi, self.bits, Round::Up),
            self.bits,
        ))
    }

    pub fn exp(&self) -> Interval {
        Interval::from_mantissas(
            exp_mantissa(&self.lo, self.bits, Round::Down),
            exp_mantissa(&self.hi, self.bits, Round::Up),
            self.bits,
        )
    }

    /// Square root; negative parts of the enclosure are clipped to zero.
    pub fn sqrt(&self) -> Result<Interval> {
        if self.hi.is_negative() {
            return Err(domain!("square root of a negative enclosure"));
        }
        let lo = if self.lo.is_negative() { BigInt::zero() } else { self.lo.clone() };
        Ok(Interval::from_mantissas(
            sqrt_round(&(lo << self.bits), Round::Down),
            sqrt_round(&(&self.hi << self.bits), Round::Up),
            self.bits,
        ))
    }
}

fn parse_decimal(lit: &str) -> Option<(BigInt, BigInt)> {
    let lit = lit.trim();
    let (neg, body) = match lit.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, lit),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut num = BigInt::zero();
    for c in int_part.chars().chain(frac_part.chars()) {
        let d = c.to_digit(10)?;
        num = num * 10 + d;
    }
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    Some((if neg { -num } else { num }, den))
}

fn align<'a>(a: &'a Interval, b: &'a Interval) -> (Aligned, Aligned, u32) {
    let bits = a.bits.max(b.bits);
    let lift = |x: &Interval| Aligned {
        lo: &x.lo << (bits - x.bits),
        hi: &x.hi << (bits - x.bits),
    };
    (lift(a), lift(b), bits)
}

struct Aligned {
    lo: BigInt,
    hi: BigInt,
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        let (a, b, bits) = align(self, rhs);
        Interval::from_mantissas(a.lo + b.lo, a.hi + b.hi, bits)
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        let (a, b, bits) = align(self, rhs);
        Interval::from_mantissas(a.lo - b.hi, a.hi - b.lo, bits)
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let (a, b, bits) = align(self, rhs);
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let lo = products.iter().min().unwrap();
        let hi = products.iter().max().unwrap();
        Interval::from_mantissas(
            shr_round(lo, bits, Round::Down),
            shr_round(hi, bits, Round::Up),
            bits,
        )
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::from_mantissas(-&self.hi, -&self.lo, self.bits)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval { (&self).$m(&rhs) }
        }
        impl $tr<&Interval> for Interval {
            type Output = Interval;
            fn $m(self, rhs: &Interval) -> Interval { (&self).$m(rhs) }
        }
        impl $tr<Interval> for &Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo_f64(), self.hi_f64())
    }
}

/// The precision ladder `start, 2*start, ...` capped at [`MAX_PRECISION_BITS`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: DEFAULT_PRECISION_BITS,
            max_bits: MAX_PRECISION_BITS,
        }
    }
}

impl Precision {
    pub fn starting_at(start_bits: u32) -> Self {
        Precision {
            start_bits: start_bits.max(8),
            max_bits: MAX_PRECISION_BITS.max(start_bits),
        }
    }

    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let max = self.max_bits;
        core::iter::successors(Some(self.start_bits), move |b| {
            let next = b.saturating_mul(2);
            (next <= max).then_some(next)
        })
    }

    /// Decide `lhs > rhs`, escalating precision until the enclosures separate.
    ///
    /// `eval(bits)` must return enclosures of the two sides computed at `bits`.
    /// Returns `Ok(true)` for a certified `lhs > rhs`, `Ok(false)` for a
    /// certified `lhs <= rhs`.
    pub fn decide_gt<F>(&self, what: &dyn Fn() -> alloc::string::String, mut eval: F) -> Result<bool>
    where
        F: FnMut(u32) -> Result<(Interval, Interval)>,
    {
        let mut last = self.start_bits;
        for bits in self.ladder() {
            last = bits;
            let (lhs, rhs) = eval(bits)?;
            if lhs.certainly_gt(&rhs) {
                return Ok(true);
            }
            if lhs.certainly_le(&rhs) {
                return Ok(false);
            }
        }
        Err(crate::error::Error::Undecidable {
            context: what(),
            bits: last,
        })
    }
}

/// Euler's constant, first 50 decimals (truncated).
const EULER_GAMMA_DIGITS: &str = "0.57721566490153286060651209008240243104215933593992";

/// `e^gamma`, first 52 decimals (truncated).
const EXP_EULER_GAMMA_DIGITS: &str = "1.7810724179901979852365041031071795491696452143034302";

/// Enclosure of `e^gamma`.
pub fn exp_euler_gamma(bits: u32) -> Interval {
    if bits <= 160 {
        Interval::from_truncated_decimal(EXP_EULER_GAMMA_DIGITS, bits).expect("valid literal")
    } else {
        euler_gamma(bits).exp()
    }
}

/// Enclosure of Euler's constant.
pub fn euler_gamma(bits: u32) -> Interval {
    Interval::from_truncated_decimal(EULER_GAMMA_DIGITS, bits).expect("valid literal")
}

/// Enclosure of `ln 2`.
pub fn ln2(bits: u32) -> Interval {
    let w = bits + GUARD_BITS;
    Interval::from_mantissas(
        shr_round(&ln2_mantissa(w, Round::Down), GUARD_BITS, Round::Down),
        shr_round(&ln2_mantissa(w, Round::Up), GUARD_BITS, Round::Up),
        bits,
    )
}
