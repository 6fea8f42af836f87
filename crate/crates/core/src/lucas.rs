//! Lucas sequences `U_n = (a^n - b^n)/(a - b)` and `V_n = a^n + b^n` where
//! `a, b` are the roots of `x^2 - r x - s`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::interval::{Interval, DEFAULT_PRECISION_BITS};

/// Which of the two companion sequences a term belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SeqKind {
    U,
    V,
}

impl core::fmt::Display for SeqKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            SeqKind::U => "U",
            SeqKind::V => "V",
        })
    }
}

/// A validated, non-degenerate parameter pair `(r, s)`.
///
/// The roots are ordered so that `|alpha| >= |beta|`; `alpha_abs_log`
/// encloses `ln |alpha|` and is strictly positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LucasParams {
    r: i64,
    s: i64,
    delta: i64,
    alpha_abs_log: Interval,
}

impl LucasParams {
    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    /// Discriminant `r^2 + 4s`.
    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn roots_real(&self) -> bool {
        self.delta > 0
    }

    pub fn unit_norm(&self) -> bool {
        self.s.abs() == 1
    }

    /// `ln |alpha|` at the default precision.
    pub fn alpha_abs_log(&self) -> &Interval {
        &self.alpha_abs_log
    }
}

/// Checks the standing hypotheses on `(r, s)` and builds [`LucasParams`].
pub fn validate_params(r: i64, s: i64) -> Result<LucasParams> {
    let g = r.unsigned_abs().gcd(&s.unsigned_abs());
    if g != 1 {
        return Err(Error::NotCoprime { r, s, gcd: g });
    }
    let r2 = (r as i128) * (r as i128);
    let delta = r2 + 4 * s as i128;
    if delta == 0 {
        return Err(Error::ZeroDiscriminant { r, s });
    }
    if s == 0 {
        return Err(Error::Degenerate { r, s, rule: "s = 0 makes beta vanish" });
    }
    // alpha/beta is a root of unity iff r^2 / (-s) lies in {0, 1, 2, 3, 4}
    let neg_s = -(s as i128);
    if (0..=4).any(|k| r2 == k * neg_s) {
        return Err(Error::Degenerate {
            r,
            s,
            rule: "r^2 lies in {0, -s, -2s, -3s, -4s}, so alpha/beta is a root of unity",
        });
    }
    let delta = i64::try_from(delta).map_err(|_| domain!("discriminant of ({r}, {s}) overflows i64"))?;
    let mut params = LucasParams {
        r,
        s,
        delta,
        alpha_abs_log: Interval::from_int(0, 1),
    };
    params.alpha_abs_log = alpha_log(&params, DEFAULT_PRECISION_BITS);
    debug_assert!(params.alpha_abs_log.is_positive());
    Ok(params)
}

/// An exact term of `U` or `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqTerm {
    pub index: u64,
    pub value: BigInt,
    pub kind: SeqKind,
}

/// `(U_n, V_n)` by fast doubling.
///
/// With `Q = -s`: `U_2k = U_k V_k`, `V_2k = V_k^2 - 2 Q^k`,
/// `U_(k+1) = (r U_k + V_k)/2`, `V_(k+1) = (D U_k + r V_k)/2`.
pub fn lucas_pair(p: &LucasParams, n: u64) -> (BigInt, BigInt) {
    let r = BigInt::from(p.r);
    let q = BigInt::from(-p.s);
    let d = BigInt::from(p.delta);
    let mut u = BigInt::zero();
    let mut v = BigInt::from(2);
    let mut qk = BigInt::one();
    if n == 0 {
        return (u, v);
    }
    for i in (0..64 - n.leading_zeros()).rev() {
        let u2 = &u * &v;
        let v2 = &v * &v - (&qk << 1);
        qk = &qk * &qk;
        u = u2;
        v = v2;
        if (n >> i) & 1 == 1 {
            let u1 = (&r * &u + &v) >> 1;
            let v1 = (&d * &u + &r * &v) >> 1;
            u = u1;
            v = v1;
            qk *= &q;
        }
    }
    (u, v)
}

pub fn u_at(p: &LucasParams, n: u64) -> SeqTerm {
    SeqTerm {
        index: n,
        value: lucas_pair(p, n).0,
        kind: SeqKind::U,
    }
}

pub fn v_at(p: &LucasParams, n: u64) -> SeqTerm {
    SeqTerm {
        index: n,
        value: lucas_pair(p, n).1,
        kind: SeqKind::V,
    }
}

pub fn term_at(p: &LucasParams, kind: SeqKind, n: u64) -> SeqTerm {
    match kind {
        SeqKind::U => u_at(p, n),
        SeqKind::V => v_at(p, n),
    }
}

/// Iterator over consecutive terms `X_start, X_(start+1), ...` of one sequence.
#[derive(Clone, Debug)]
pub struct Terms {
    r: BigInt,
    s: BigInt,
    kind: SeqKind,
    index: u64,
    cur: BigInt,
    next: BigInt,
}

impl Terms {
    pub fn starting_at(p: &LucasParams, kind: SeqKind, start: u64) -> Self {
        let (cur, next) = match kind {
            SeqKind::U => (lucas_pair(p, start).0, lucas_pair(p, start + 1).0),
            SeqKind::V => (lucas_pair(p, start).1, lucas_pair(p, start + 1).1),
        };
        Terms {
            r: BigInt::from(p.r),
            s: BigInt::from(p.s),
            kind,
            index: start,
            cur,
            next,
        }
    }
}

impl Iterator for Terms {
    type Item = SeqTerm;

    fn next(&mut self) -> Option<SeqTerm> {
        let following = &self.r * &self.next + &self.s * &self.cur;
        let value = core::mem::replace(&mut self.cur, core::mem::replace(&mut self.next, following));
        let index = self.index;
        self.index += 1;
        Some(SeqTerm { index, value, kind: self.kind })
    }
}

/// Enclosure of `ln |alpha|` at `bits` fractional bits.
pub fn alpha_log(p: &LucasParams, bits: u32) -> Interval {
    if p.delta > 0 {
        // |alpha| = (|r| + sqrt(delta)) / 2
        let root = Interval::from_int(p.delta, bits).sqrt().expect("positive discriminant");
        let num = &Interval::from_int(p.r.unsigned_abs(), bits) + &root;
        let abs_alpha = num.div(&Interval::from_int(2, bits)).expect("nonzero");
        abs_alpha.ln().expect("|alpha| > 1 for valid params")
    } else {
        // complex conjugate roots: |alpha|^2 = |s|
        let l = Interval::from_int(p.s.unsigned_abs(), bits).ln().expect("|s| >= 2");
        l.div(&Interval::from_int(2, bits)).expect("nonzero")
    }
}

/// Enclosure of `ln 2 + m (ln m - 1)`, a lower bound for `ln(m!)`.
pub fn stirling_log_factorial_lower(m: u64, bits: u32) -> Result<Interval> {
    if m < 2 {
        return Err(domain!("Stirling lower bound needs m >= 2, got {m}"));
    }
    let lm = Interval::from_int(m, bits).ln()?;
    let inner = &lm - &Interval::from_int(1, bits);
    Ok(&crate::interval::ln2(bits) + &inner.scale(m))
}

/// Exact `|X_n|` as a sign-free big integer.
pub fn abs_value(t: &SeqTerm) -> BigInt {
    t.value.abs()
}
