//! Scanning concrete sequences for terms that are products of factorials.

use alloc::vec::Vec;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::factorial::{pf_decompose, pf_fast_reject, pf_member, FactorialTable, PFWitness, RejectReason};
use crate::lucas::{term_at, u_at, validate_params, LucasParams, SeqKind};
use crate::pipeline::{GENERAL_STATED, REAL_STATED, UNIT_STATED};

/// Witnesses inspected when picking the one reported for a hit.
const WITNESS_POOL: usize = 64;

/// Default upper end of a search range.
pub const DEFAULT_MAX_N: u64 = 5000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchHit {
    pub index: u64,
    pub kind: SeqKind,
    pub value_digits: u64,
    pub witness: PFWitness,
    pub trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub r: i64,
    pub s: i64,
    pub kind: SeqKind,
    pub n_min: u64,
    pub n_max: u64,
    pub workers: usize,
    /// Keep the reason for every index discarded by the fast filter.
    pub reject_log: bool,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<LucasParams> {
        if self.n_min == 0 {
            return Err(domain!("index 0 gives the term 0, which is never a product of factorials"));
        }
        if self.n_min > self.n_max {
            return Err(domain!("empty range: n_min = {} > n_max = {}", self.n_min, self.n_max));
        }
        if self.workers == 0 {
            return Err(domain!("need at least one worker"));
        }
        validate_params(self.r, self.s)
    }
}

/// What happened at one index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Examined {
    Hit(SearchHit),
    Rejected(RejectReason),
    NotMember,
}

/// Decimal digits of `|v|`, counting 0 as one digit.
pub fn decimal_digits(v: &BigInt) -> u64 {
    // bit length gives an estimate off by at most one
    let bits = v.magnitude().bits();
    if bits < 4 {
        return 1;
    }
    let est = ((bits - 1) as f64 * core::f64::consts::LOG10_2) as u64 + 1;
    let mut ten = BigInt::from(10u8).pow(est as u32);
    let mag = BigInt::from(v.magnitude().clone());
    let mut d = est;
    while mag >= ten {
        ten *= 10u8;
        d += 1;
    }
    d
}

/// The witness with the fewest factors, ties broken lexicographically.
fn best_witness(value: &BigInt) -> Result<Option<PFWitness>> {
    Ok(pf_decompose(value, WITNESS_POOL)?.into_iter().min_by(|a, b| (a.args.len(), &a.args).cmp(&(b.args.len(), &b.args))))
}

pub fn examine_index(p: &LucasParams, kind: SeqKind, n: u64) -> Result<Examined> {
    if n == 0 {
        return Err(domain!("index 0 is excluded from the search"));
    }
    let term = term_at(p, kind, n);
    if let Some(reason) = pf_fast_reject(&term.value) {
        return Ok(Examined::Rejected(reason));
    }
    if !pf_member(&term.value)? {
        return Ok(Examined::NotMember);
    }
    let witness = best_witness(&term.value)?.ok_or_else(|| domain!("member at n = {n} without a witness"))?;
    Ok(Examined::Hit(SearchHit {
        index: n,
        kind,
        value_digits: decimal_digits(&term.value),
        trivial: witness.is_trivial(),
        witness,
    }))
}

/// Whether a range reaches the proven bound on indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "coverage", rename_all = "lowercase")]
pub enum Coverage {
    Exhaustive { bound: u64 },
    Partial {
        #[serde(rename = "upTo")]
        up_to: u64,
        bound: u64,
    },
}

/// The proven bound on indices for these parameters.
pub fn index_bound(p: &LucasParams, kind: SeqKind) -> u64 {
    let b = if p.unit_norm() {
        UNIT_STATED
    } else if p.roots_real() {
        REAL_STATED
    } else {
        GENERAL_STATED
    };
    match kind {
        SeqKind::U => b,
        SeqKind::V => b / 2,
    }
}

pub fn coverage(p: &LucasParams, cfg: &SearchConfig) -> Coverage {
    let bound = index_bound(p, cfg.kind);
    if cfg.n_min <= 1 && cfg.n_max >= bound {
        Coverage::Exhaustive { bound }
    } else {
        Coverage::Partial { up_to: cfg.n_max, bound }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchReport {
    pub r: i64,
    pub s: i64,
    pub kind: SeqKind,
    pub n_min: u64,
    pub n_max: u64,
    #[serde(flatten)]
    pub coverage: Coverage,
    pub hits: Vec<SearchHit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected: Option<Vec<(u64, RejectReason)>>,
}

/// Collects per-index outcomes, given in index order, into a report.
pub fn assemble_report(p: &LucasParams, cfg: &SearchConfig, outcomes: Vec<(u64, Examined)>) -> SearchReport {
    let mut hits = Vec::new();
    let mut rejected = Vec::new();
    for (n, e) in outcomes {
        match e {
            Examined::Hit(h) => hits.push(h),
            Examined::Rejected(r) if cfg.reject_log => rejected.push((n, r)),
            _ => {}
        }
    }
    SearchReport {
        r: cfg.r,
        s: cfg.s,
        kind: cfg.kind,
        n_min: cfg.n_min,
        n_max: cfg.n_max,
        coverage: coverage(p, cfg),
        hits,
        rejected: cfg.reject_log.then_some(rejected),
    }
}

/// Single-threaded search over `[n_min, n_max]`.
pub fn search_pf_terms(cfg: &SearchConfig) -> Result<SearchReport> {
    let p = cfg.validate()?;
    let outcomes = (cfg.n_min..=cfg.n_max)
        .map(|n| examine_index(&p, cfg.kind, n).map(|e| (n, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_report(&p, cfg, outcomes))
}

/// `prod_{i in indices} F_i == m!`.
pub fn fibonacci_product_is_factorial(indices: &[u64], m: u64) -> bool {
    let fib = validate_params(1, 1).expect("(1, 1) is a valid pair");
    let prod: BigInt = indices.iter().map(|&i| u_at(&fib, i).value).product();
    let table = FactorialTable::new(m);
    table.get(m).is_some_and(|f| prod == BigInt::from(f.clone()))
}

/// `F_1 F_2 F_3 F_4 F_5 F_6 F_8 F_10 F_12 = 11!`.
pub fn verify_fibonacci_identity() -> bool {
    fibonacci_product_is_factorial(&[1, 2, 3, 4, 5, 6, 8, 10, 12], 11)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(r: i64, s: i64, kind: SeqKind, n_max: u64) -> SearchConfig {
        SearchConfig { r, s, kind, n_min: 1, n_max, workers: 1, reject_log: false }
    }

    fn indices(rep: &SearchReport) -> Vec<u64> {
        rep.hits.iter().map(|h| h.index).collect()
    }

    #[test]
    fn fibonacci_identity() {
        assert!(verify_fibonacci_identity());
        assert!(!fibonacci_product_is_factorial(&[1, 2, 3, 4, 5, 6, 8, 10, 11], 11));
        assert!(!fibonacci_product_is_factorial(&[1, 2, 3, 4, 5, 6, 8, 10, 12], 10));
    }

    #[test]
    fn fibonacci_and_lucas_hits() {
        let u = search_pf_terms(&cfg(1, 1, SeqKind::U, 150)).unwrap();
        assert_eq!(indices(&u), [1, 2, 3, 6, 12]);
        assert_eq!(u.coverage, Coverage::Exhaustive { bound: 150 });
        let h12 = &u.hits[4];
        assert_eq!((h12.value_digits, h12.witness.args.as_slice()), (3, &[3u64, 4][..]));
        assert!(u.hits[0].trivial && u.hits[1].trivial && !u.hits[2].trivial);
        let v = search_pf_terms(&cfg(1, 1, SeqKind::V, 150)).unwrap();
        assert_eq!(indices(&v), [1, 3]);
    }

    #[test]
    fn witnesses_reproduce_terms() {
        for (r, s) in [(1, 1), (3, -2), (2, 1), (-1, 3)] {
            let p = validate_params(r, s).unwrap();
            for kind in [SeqKind::U, SeqKind::V] {
                let rep = search_pf_terms(&cfg(r, s, kind, 200)).unwrap();
                for h in rep.hits {
                    assert_eq!(h.witness.value(), term_at(&p, kind, h.index).value);
                }
            }
        }
    }

    #[test]
    fn coverage_labels() {
        let rep = search_pf_terms(&cfg(1, 1, SeqKind::U, 100)).unwrap();
        assert_eq!(rep.coverage, Coverage::Partial { up_to: 100, bound: 150 });
        let rep = search_pf_terms(&cfg(1, 1, SeqKind::V, 75)).unwrap();
        assert_eq!(rep.coverage, Coverage::Exhaustive { bound: 75 });
        let rep = search_pf_terms(&cfg(1, 2, SeqKind::U, 300)).unwrap();
        assert_eq!(rep.coverage, Coverage::Exhaustive { bound: 210 });
        let rep = search_pf_terms(&cfg(1, -2, SeqKind::U, 300)).unwrap();
        assert_eq!(rep.coverage, Coverage::Partial { up_to: 300, bound: 300_000 });
    }

    #[test]
    fn invalid_configs() {
        let mut c = cfg(1, 1, SeqKind::U, 10);
        c.n_min = 0;
        assert!(search_pf_terms(&c).is_err());
        let c = SearchConfig { n_min: 11, ..cfg(1, 1, SeqKind::U, 10) };
        assert!(search_pf_terms(&c).is_err());
        assert!(search_pf_terms(&cfg(2, -1, SeqKind::U, 10)).is_err());
    }

    #[test]
    fn digit_counts() {
        for (v, d) in [(0i64, 1), (9, 1), (10, 2), (-99, 2), (100, 3), (999_999, 6), (1_000_000, 7)] {
            assert_eq!(decimal_digits(&BigInt::from(v)), d, "{v}");
        }
        assert_eq!(decimal_digits(&BigInt::from(10u8).pow(40)), 41);
        assert_eq!(decimal_digits(&(BigInt::from(10u8).pow(40) - 1)), 40);
    }
}
