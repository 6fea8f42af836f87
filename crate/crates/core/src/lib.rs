//! Lucas sequences whose terms are products of factorials: exact term
//! arithmetic, membership tests, cyclotomic values and the interval-certified
//! bound cascade that limits the index of such terms.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod bounds;
pub mod cyclotomic;
pub mod error;
pub mod factorial;
pub mod interval;
pub mod lucas;
pub mod pipeline;
pub mod search;

pub use error::{Error, Result};
pub use interval::{Interval, Precision};
pub use lucas::{validate_params, LucasParams, SeqKind, SeqTerm};
pub use factorial::{pf_decompose, pf_fast_reject, pf_member, PFWitness};
pub use pipeline::{run_general_cascade, run_real_cascade, run_unit_case, stage_violated, CascadeOptions, CascadeResult};
pub use search::{search_pf_terms, verify_fibonacci_identity, SearchConfig, SearchHit};
