//! Text tables, JSON documents and CSV hit lists.

use std::fmt::Write as _;
use std::io::Write;

use lucaspf_core::search::{Coverage, SearchReport};
use lucaspf_core::CascadeResult;
use serde::Serialize;

use crate::CliError;

pub fn cascade_table(c: &CascadeResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "case {}, sequence {}", c.case, c.kind);
    let _ = writeln!(
        out,
        "{:<28} {:<6} {:<18} {:<18} {:<20} {:>10} {:>10} {:>9}",
        "stage", "parity", "omega", "phi bound", "variant", "computed", "paper", "decisive"
    );
    for s in &c.stages {
        let _ = writeln!(
            out,
            "{:<28} {:<6} {:<18} {:<18} {:<20} {:>10} {:>10} {:>9}",
            s.name,
            s.parity.to_string(),
            s.omega.to_string(),
            s.phi_bound.to_string(),
            s.variant,
            s.computed,
            s.paper,
            if s.decisive { "yes" } else { "no" }
        );
    }
    let _ = writeln!(out, "final bound {} (stated {})", c.final_bound, c.stated_bound);
    out
}

pub fn search_table(rep: &SearchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "({}, {}) {} for n in [{}, {}]", rep.r, rep.s, rep.kind, rep.n_min, rep.n_max);
    match rep.coverage {
        Coverage::Exhaustive { bound } => {
            let _ = writeln!(out, "exhaustive: every admissible index is at most {bound}");
        }
        Coverage::Partial { up_to, bound } => {
            let _ = writeln!(out, "partial up to {up_to}: the proven index bound is {bound}");
        }
    }
    let _ = writeln!(out, "{:>8} {:>8} {:<8} witness", "index", "digits", "trivial");
    for h in &rep.hits {
        let _ = writeln!(out, "{:>8} {:>8} {:<8} {}", h.index, h.value_digits, h.trivial, h.witness);
    }
    let _ = writeln!(out, "{} hit(s)", rep.hits.len());
    if let Some(rej) = &rep.rejected {
        let _ = writeln!(out, "{} index(es) removed by the fast filter", rej.len());
    }
    out
}

/// Pretty JSON with a trailing newline; key order follows the type definitions.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct HitRow {
    index: u64,
    kind: String,
    digits: u64,
    witness: String,
    trivial: bool,
}

pub fn write_hits_csv<W: Write>(rep: &SearchReport, w: W) -> Result<(), CliError> {
    let mut wr = csv::Writer::from_writer(w);
    for h in &rep.hits {
        wr.serialize(HitRow {
            index: h.index,
            kind: h.kind.to_string(),
            digits: h.value_digits,
            witness: h.witness.to_string(),
            trivial: h.trivial,
        })?;
    }
    if rep.hits.is_empty() {
        wr.write_record(["index", "kind", "digits", "witness", "trivial"])?;
    }
    wr.flush()?;
    Ok(())
}
