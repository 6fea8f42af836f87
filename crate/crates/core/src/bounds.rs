//! Interval enclosures of the explicit estimates: totient and `omega` bounds,
//! Brun-Titchmarsh, the sieve bound on `ln M_n`, and the lower bounds for
//! `ln M_n` coming from the cyclotomic factor.

use core::fmt;

use serde::Serialize;

use crate::arith::{first_primes, totient};
use crate::error::{domain, Result};
use crate::interval::{exp_euler_gamma, ln2, Interval};

fn int(v: u64, bits: u32) -> Interval {
    Interval::from_int(v, bits)
}

fn dec(lit: &str, bits: u32) -> Interval {
    Interval::from_decimal(lit, bits).expect("valid literal")
}

fn ratio(num: u64, den: u64, bits: u32) -> Interval {
    Interval::from_ratio(num, den, bits).expect("nonzero denominator")
}

/// `2^e` for a possibly negative exponent.
fn pow2(e: i32, bits: u32) -> Interval {
    if e >= 0 {
        int(1u64 << e, bits)
    } else {
        ratio(1, 1u64 << (-e), bits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u64) -> Parity {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Which lower bound for `ln M_n` is in force.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MnBoundVariant {
    RealEq5,
    UnitEq55,
    ComplexTrivialF,
    ComplexVoutier128,
    ComplexVoutier64,
    LemmaGw,
    LemmaHw,
}

impl fmt::Display for MnBoundVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MnBoundVariant::RealEq5 => "real_eq5",
            MnBoundVariant::UnitEq55 => "unit_eq55",
            MnBoundVariant::ComplexTrivialF => "complex_trivial_f",
            MnBoundVariant::ComplexVoutier128 => "complex_voutier128",
            MnBoundVariant::ComplexVoutier64 => "complex_voutier64",
            MnBoundVariant::LemmaGw => "lemma_gw",
            MnBoundVariant::LemmaHw => "lemma_hw",
        })
    }
}

/// Source of the lower bound for `phi(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiBound {
    RosserSchoenfeld,
    OmegaProduct,
    Exact,
}

impl fmt::Display for PhiBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhiBound::RosserSchoenfeld => "rosser_schoenfeld",
            PhiBound::OmegaProduct => "omega_product",
            PhiBound::Exact => "exact",
        })
    }
}

/// Worst-case lower bound used for `ln |alpha|` in terms of `ln n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogAlphaPolicy {
    #[default]
    HalfLogN,
    ThreeQuartersLogN,
}

impl LogAlphaPolicy {
    pub fn lower(self, logn: &Interval) -> Interval {
        let bits = logn.bits();
        match self {
            LogAlphaPolicy::HalfLogN => logn * &ratio(1, 2, bits),
            LogAlphaPolicy::ThreeQuartersLogN => logn * &ratio(3, 4, bits),
        }
    }
}

/// Whether the `ln M_n >= ln|Phi_n| - ln n` step is applied on top of the
/// cyclotomic lower bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CofactorTerm {
    #[default]
    DivideByN,
    Omitted,
}

/// `phi(n)` lower bound of the requested kind.
pub fn phi_lower(kind: PhiBound, n: u64, omega: u32, parity: Parity, bits: u32) -> Result<Interval> {
    match kind {
        PhiBound::RosserSchoenfeld => phi_lower_rs(n, bits),
        PhiBound::OmegaProduct => phi_lower_omega(n, omega, parity, bits),
        PhiBound::Exact => Ok(int(totient(n), bits)),
    }
}

/// Everything a bound evaluation needs to know about one `n`.
#[derive(Clone, Debug)]
pub struct BoundContext {
    pub n: u64,
    pub bits: u32,
    pub logn: Interval,
    pub loglogn: Interval,
    pub omega: u32,
    pub parity: Parity,
    /// Lower bound for `ln |alpha|` (the worst case of the argument).
    pub log_alpha: Interval,
    pub phi: Interval,
    pub unit_norm: bool,
    pub cofactor: CofactorTerm,
    ln2: Interval,
}

impl BoundContext {
    /// Context with an explicit `phi(n)` lower bound and `ln |alpha|` lower bound.
    pub fn new(n: u64, omega: u32, parity: Parity, phi: Interval, log_alpha: Interval, bits: u32) -> Result<Self> {
        if n < 150 {
            return Err(domain!("bound context needs n >= 150, got {n}"));
        }
        let logn = int(n, bits).ln()?;
        let loglogn = logn.ln()?;
        Ok(BoundContext {
            n,
            bits,
            logn,
            loglogn,
            omega,
            parity,
            log_alpha,
            phi,
            unit_norm: false,
            cofactor: CofactorTerm::DivideByN,
            ln2: ln2(bits),
        })
    }

    /// Context at the worst case `ln |alpha| = policy(ln n)`.
    pub fn worst_case(
        n: u64,
        omega: u32,
        parity: Parity,
        phi_kind: PhiBound,
        policy: LogAlphaPolicy,
        bits: u32,
    ) -> Result<Self> {
        let mut ctx = BoundContext::new(n, omega, parity, int(0, bits), int(0, bits), bits)?;
        ctx.log_alpha = policy.lower(&ctx.logn);
        ctx.phi = phi_lower(phi_kind, n, omega, parity, bits)?;
        Ok(ctx)
    }

    pub fn with_log_alpha(mut self, log_alpha: Interval) -> Self {
        self.log_alpha = log_alpha;
        self
    }

    pub fn with_unit_norm(mut self, unit: bool) -> Self {
        self.unit_norm = unit;
        self
    }

    pub fn with_cofactor(mut self, cofactor: CofactorTerm) -> Self {
        self.cofactor = cofactor;
        self
    }

    fn cofactor_log(&self) -> Interval {
        match self.cofactor {
            CofactorTerm::DivideByN => self.logn.clone(),
            CofactorTerm::Omitted => int(0, self.bits),
        }
    }
}

/// `n / (e^gamma ln ln n + 2.50637 / ln ln n)`, a lower bound for `phi(n)`.
pub fn phi_lower_rs(n: u64, bits: u32) -> Result<Interval> {
    if n < 3 {
        return Err(domain!("totient lower bound needs n >= 3, got {n}"));
    }
    let ll = int(n, bits).ln()?.ln()?;
    let denom = &exp_euler_gamma(bits) * &ll + dec("2.50637", bits).div(&ll)?;
    int(n, bits).div(&denom)
}

/// `n * prod (1 - 1/p)` over the first `omega` primes, skipping 2 when odd.
pub fn phi_lower_omega(n: u64, omega: u32, parity: Parity, bits: u32) -> Result<Interval> {
    if omega == 0 {
        return Err(domain!("omega must be at least 1"));
    }
    let skip = (parity == Parity::Odd) as usize;
    let (mut num, mut den) = (n as u128, 1u128);
    for p in first_primes(omega as usize + skip).into_iter().skip(skip) {
        num *= (p - 1) as u128;
        den *= p as u128;
    }
    Interval::from_ratio(num, den, bits)
}

/// Certified `omega(n) <= floor(1.3841 ln n / ln ln n)`.
pub fn omega_upper(n: u64) -> Result<u32> {
    if n < 16 {
        return Err(domain!("omega bound needs ln ln n > 1, got n = {n}"));
    }
    let bits = 64;
    let logn = int(n, bits).ln()?;
    let bound = (&dec("1.3841", bits) * &logn).div(&logn.ln()?)?;
    let f = bound.floor_hi();
    Ok(u32::try_from(f).unwrap_or(u32::MAX))
}

/// Brun-Titchmarsh: `2x / (phi(n) ln(x/n))` bounds `pi(x; n, a)` for `x > n`.
pub fn pi_ap_upper(x: u64, n: u64, bits: u32) -> Result<Interval> {
    if n == 0 || x <= n {
        return Err(domain!("Brun-Titchmarsh needs x > n >= 1, got x = {x}, n = {n}"));
    }
    let l = ratio(x, n, bits).ln()?;
    int(2 * x, bits).div(&(&int(totient(n), bits) * &l))
}

/// Upper bound for `sum_{p <= m, p = +-1 (mod n)} ln p / (p - 1)`.
///
/// Below `3n` only the listed small classes can occur; above, the
/// Abel-summation bound is used plus the small-prime contribution.
pub fn logp_sum_upper(m: u64, n: u64, parity: Parity, bits: u32) -> Result<Interval> {
    if n < 150 || m + 1 < n {
        return Err(domain!("sieve bound needs n >= 150 and m >= n - 1, got m = {m}, n = {n}"));
    }
    if Parity::of(n) != parity {
        return Err(domain!("parity {parity} does not match n = {n}"));
    }
    let log3n = int(3 * n, bits).ln()?;
    let small = match parity {
        Parity::Even => dec("10.1", bits),
        Parity::Odd => dec("3.1", bits),
    };
    let small_term = (&small * &log3n).div(&int(3 * n, bits))?;
    if m < 3 * n {
        return Ok(small_term);
    }
    let phi = int(totient(n), bits);
    let loglogn = int(n, bits).ln()?.ln()?;
    let head = (&int(m, bits).ln()? - &int(1, bits)).scale(4u32).div(&phi)?;
    let bracket = if (m as u128) < (n as u128) * (n as u128) {
        &int(1, bits) + &loglogn
    } else {
        &int(1, bits) + &(&loglogn * &ratio(1, 2, bits))
    };
    let extra = (&dec("11.1", bits) * &log3n).div(&phi.scale(6u32))?;
    Ok(&(&head * &bracket) + &extra)
}

/// Which of the two complex-case lower bounds for `ln|alpha^m - beta^m|` won.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VoutierBranch {
    /// `m ln|a| - (m / gcd(m,2) + ln 2 / 4 + 0.02) ln|a|`
    Linear,
    /// `m ln|a| - 73 ln|a| ln^2(m / gcd(m,2))`
    Quadratic,
}

/// The larger of the two lower bounds for `ln|alpha^m - beta^m|`, `m >= 3`.
pub fn voutier_pair_lower(log_alpha: &Interval, m: u64) -> Result<(Interval, VoutierBranch)> {
    if m < 3 {
        return Err(domain!("need m >= 3, got {m}"));
    }
    let bits = log_alpha.bits();
    let g = if m.is_multiple_of(2) { 2 } else { 1 };
    let mg = ratio(m, g, bits);
    let ml = log_alpha.scale(m);
    let linear_loss = &mg + &(&(&ln2(bits) * &ratio(1, 4, bits)) + &dec("0.02", bits));
    let b1 = &ml - &(&linear_loss * log_alpha);
    let b2 = &ml - &(&log_alpha.scale(73u32) * &mg.ln()?.square());
    let branch = if b1.lo_mantissa() >= b2.lo_mantissa() {
        VoutierBranch::Linear
    } else {
        VoutierBranch::Quadratic
    };
    Ok((b1.max(&b2), branch))
}

/// Lower bound for `ln M_n` under the given variant.
pub fn mn_lower(variant: MnBoundVariant, ctx: &BoundContext) -> Result<Interval> {
    let b = ctx.bits;
    let l = &ctx.log_alpha;
    let w = ctx.omega;
    if w == 0 {
        return Err(domain!("omega must be at least 1"));
    }
    let two_w1 = pow2(w as i32 - 1, b);
    let one = int(1, b);
    let ln_n = &ctx.logn;
    let phi_m1 = &ctx.phi - &one;
    let cof = ctx.cofactor_log();
    let voutier = |f: Interval| -> Interval {
        &(&(&phi_m1 * l) - &cof) - &(&(&two_w1 * &ctx.ln2) + &(&l.scale(73u32) * &f))
    };
    match variant {
        MnBoundVariant::RealEq5 => {
            Ok(&(&(&ctx.phi * l) - &cof) - &(&two_w1 * &(&ctx.ln2 + l)))
        }
        MnBoundVariant::UnitEq55 => {
            if !ctx.unit_norm {
                return Err(domain!("the unit-norm bound needs s = +-1"));
            }
            Ok(&(&(&ctx.phi * l) - &dec("1.28", b)) - &cof)
        }
        MnBoundVariant::ComplexTrivialF => {
            let f = &two_w1 * &ln_n.square();
            Ok(&(&(&phi_m1 * l) - &cof) - &(&(&two_w1 * &ctx.ln2) + &(&l.scale(73u32) * &f)))
        }
        MnBoundVariant::ComplexVoutier128 => {
            let f = &(&ln_n.square().scale(128u32) - &ln_n.scale(1886u32)) + &int(7913, b);
            Ok(voutier(f))
        }
        MnBoundVariant::ComplexVoutier64 => {
            if w > 7 {
                return Err(domain!("the 64 ln^2 n bound needs omega <= 7, got {w}"));
            }
            let f = &(&ln_n.square().scale(64u32) - &ln_n.scale(775u32)) + &int(2718, b);
            Ok(voutier(f))
        }
        MnBoundVariant::LemmaGw => {
            if ctx.parity != Parity::Odd {
                return Err(domain!("g_omega applies to odd n"));
            }
            mn_lower_lemma(ctx)
        }
        MnBoundVariant::LemmaHw => {
            if ctx.parity != Parity::Even {
                return Err(domain!("h_omega applies to even n"));
            }
            mn_lower_lemma(ctx)
        }
    }
}

/// `73 (a L^2 - b L + c)` with decimal coefficients.
fn quad73(l: &Interval, a: u32, b: &str, c: &str) -> Interval {
    let bits = l.bits();
    let q = &(&l.square().scale(a) - &(&dec(b, bits) * l)) + &dec(c, bits);
    q.scale(73u32)
}

/// The odd-`n` correction `g_omega`, `1 <= omega <= 6`.
pub fn g_omega(n: u64, omega: u32, bits: u32) -> Result<Interval> {
    if omega == 0 || omega > 6 {
        return Err(domain!("g_omega is tabulated for 1 <= omega <= 6, got {omega}"));
    }
    let l = int(n, bits).ln()?;
    Ok(match omega {
        6 => &(&quad73(&l, 11, "87.5", "194.1") + &(&dec("0.0027", bits) * &int(n, bits))) + &dec("3.1", bits),
        5 => &(&quad73(&l, 7, "49.1", "101.6") + &ratio(n, 1155, bits)) + &dec("0.2", bits),
        4 => quad73(&l, 4, "22.6", "43.1"),
        3 => quad73(&l, 2, "6.8", "11.6"),
        _ => l.square().scale(73u32),
    })
}

/// The even-`n` correction `h_omega`, `1 <= omega <= 7`, in `ln(n/2)`.
pub fn h_omega(n: u64, omega: u32, bits: u32) -> Result<Interval> {
    if omega == 0 || omega > 7 {
        return Err(domain!("h_omega is tabulated for 1 <= omega <= 7, got {omega}"));
    }
    let l = ratio(n, 2, bits).ln()?;
    let nn = int(n, bits);
    Ok(match omega {
        7 => &(&quad73(&l, 16, "139", "327") + &(&dec("0.0032", bits) * &nn)) + &dec("3.1", bits),
        6 => &(&quad73(&l, 11, "87.5", "194.1") + &(&dec("0.002", bits) * &nn)) + &dec("0.97", bits),
        5 => &(&quad73(&l, 7, "49.1", "101.6") + &(&dec("0.0005", bits) * &nn)) + &dec("0.2", bits),
        4 => quad73(&l, 4, "22.6", "43.1"),
        3 => quad73(&l, 2, "6.8", "11.6"),
        _ => l.square().scale(73u32),
    })
}

/// Lower bound for `ln M_n` from the sharper divisor-pairing argument.
///
/// Odd: `(phi-1)L - (1 + 2^w/(4w)) ln n - 2^(w-2) ln 2 - g_w L`.
/// Even: `(phi-1)L - ln n - 2^(w-2) ln 2 - h_w L`.
pub fn mn_lower_lemma(ctx: &BoundContext) -> Result<Interval> {
    let b = ctx.bits;
    let w = ctx.omega;
    let l = &ctx.log_alpha;
    let base = &(&ctx.phi - &int(1, b)) * l;
    let two_term = &pow2(w as i32 - 2, b) * &ctx.ln2;
    match ctx.parity {
        Parity::Odd => {
            let g = g_omega(ctx.n, w, b)?;
            let coef = &int(1, b) + &ratio(1u64 << w, 4 * w as u64, b);
            Ok(&(&(&base - &(&coef * &ctx.logn)) - &two_term) - &(&g * l))
        }
        Parity::Even => {
            let h = h_omega(ctx.n, w, b)?;
            Ok(&(&(&base - &ctx.logn) - &two_term) - &(&h * l))
        }
    }
}

/// Sieve upper bound `4 (1 + ln ln n) n L / phi` for `ln M_n` when `U_n` is a
/// product of factorials.
pub fn mn_upper_sieve(ctx: &BoundContext) -> Result<Interval> {
    let b = ctx.bits;
    let num = (&int(1, b) + &ctx.loglogn).scale(4u32) * &ctx.log_alpha.scale(ctx.n);
    num.div(&ctx.phi)
}

/// Enclosure of `prod_{d >= 1} (1 - q^d) / (1 + q^d)` with `q` the inverse
/// square of the golden ratio.
///
/// The first `terms` factors are multiplied out; the tail lies in
/// `[1 - 2 q^(terms+1) / (1 - q), 1]` since `(1-x)/(1+x) >= 1 - 2x`.
pub fn unit_product(terms: u32, bits: u32) -> Result<Interval> {
    // q = (3 - sqrt 5) / 2
    let q = (&int(3, bits) - &int(5, bits).sqrt()?) * ratio(1, 2, bits);
    let one = int(1, bits);
    let mut head = one.clone();
    let mut qd = one.clone();
    for _ in 0..terms {
        qd = &qd * &q;
        head = head * (&one - &qd).div(&(&one + &qd))?;
    }
    let tail = &one - &(&qd * &q).scale(2u32).div(&(&one - &q))?;
    Ok((&head * &tail).hull(&head))
}
