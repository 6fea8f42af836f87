//! The staged reduction of the admissible index range. Each stage is data: a
//! lower bound for `ln M_n`, a totient bound, an `omega` assumption and a
//! parity class. A stage threshold is the largest `n` at which the lower bound
//! is not certified to exceed the sieve upper bound.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::arith::{max_omega_upto, omega};
use crate::bounds::{
    mn_lower, mn_upper_sieve, omega_upper, phi_lower, BoundContext, CofactorTerm, LogAlphaPolicy,
    MnBoundVariant, Parity, PhiBound,
};
use crate::error::{domain, Result};
use crate::interval::{Interval, Precision};
use crate::lucas::{alpha_log, LucasParams, SeqKind};

/// Smallest index the stage inequalities are evaluated at.
pub const FIRST_INDEX: u64 = 151;

/// Threshold reported when no index at or above [`FIRST_INDEX`] survives.
pub const EMPTY_THRESHOLD: u64 = 150;

const SCAN_DIVISOR: u64 = 1024;
const SCAN_BATCH: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityClass {
    Even,
    Odd,
    Both,
}

impl core::fmt::Display for ParityClass {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            ParityClass::Even => "even",
            ParityClass::Odd => "odd",
            ParityClass::Both => "both",
        })
    }
}

impl ParityClass {
    pub fn admits(self, n: u64) -> bool {
        match self {
            ParityClass::Even => n.is_multiple_of(2),
            ParityClass::Odd => n % 2 == 1,
            ParityClass::Both => true,
        }
    }
}

/// Range of `omega(n)` a stage has to cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaAssumption {
    /// `omega(n) <= floor(1.3841 ln n / ln ln n)`, evaluated at `n` itself.
    FromOmegaUpper,
    AtMost(u32),
    /// `lo <= omega(n) <= hi`.
    Range(u32, u32),
    /// The true `omega(n)`.
    Exact,
}

impl OmegaAssumption {
    fn label(self) -> OmegaLabel {
        match self {
            OmegaAssumption::FromOmegaUpper => OmegaLabel::Text("from omega_upper".into()),
            OmegaAssumption::AtMost(w) => OmegaLabel::Count(w),
            OmegaAssumption::Range(a, b) if a == b => OmegaLabel::Count(a),
            OmegaAssumption::Range(a, b) => OmegaLabel::Text(format!("{a}..={b}")),
            OmegaAssumption::Exact => OmegaLabel::Text("exact".into()),
        }
    }
}

/// Which primes the `omega`-product totient bound runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiForm {
    /// Always the first `omega` primes (valid for every `n`).
    FromTwo,
    /// Skip 2 for odd `n`.
    ByParity,
}

/// One stage of a cascade.
#[derive(Clone, Debug)]
pub struct StageConfig {
    pub name: String,
    pub parity: ParityClass,
    pub omega: OmegaAssumption,
    pub phi: PhiBound,
    pub phi_form: PhiForm,
    /// For the lemma variants the even/odd table is picked from `n`.
    pub variant: MnBoundVariant,
    pub cofactor: CofactorTerm,
    pub policy: LogAlphaPolicy,
    /// Concrete parameters: `ln|alpha|` is then at least their own value.
    pub params: Option<LucasParams>,
    pub paper: u64,
}

impl StageConfig {
    fn variant_for(&self, n: u64) -> MnBoundVariant {
        match self.variant {
            MnBoundVariant::LemmaGw | MnBoundVariant::LemmaHw => match Parity::of(n) {
                Parity::Even => MnBoundVariant::LemmaHw,
                Parity::Odd => MnBoundVariant::LemmaGw,
            },
            v => v,
        }
    }

    fn variant_label(&self) -> String {
        match self.variant {
            MnBoundVariant::LemmaGw | MnBoundVariant::LemmaHw => match self.parity {
                ParityClass::Even => "lemma_hw".into(),
                ParityClass::Odd => "lemma_gw".into(),
                ParityClass::Both => "lemma_hw/lemma_gw".into(),
            },
            v => format!("{v}"),
        }
    }

    /// The `omega` values to check at `n`, largest first.
    fn omegas(&self, n: u64) -> Result<Vec<u32>> {
        let cap = max_omega_upto(n, n % 2 == 1);
        let (lo, hi) = match self.omega {
            OmegaAssumption::FromOmegaUpper => (1, omega_upper(n)?.min(cap)),
            OmegaAssumption::AtMost(w) => (1, w.min(cap)),
            // rows are reported per omega; which n carry that omega is decided later
            OmegaAssumption::Range(a, b) => (a.max(1), b),
            OmegaAssumption::Exact => {
                let w = omega(n);
                (w, w)
            }
        };
        Ok((lo..=hi).rev().collect())
    }

    fn context(&self, n: u64, w: u32, log_alpha: Interval, bits: u32) -> Result<BoundContext> {
        let parity = Parity::of(n);
        let phi_parity = match self.phi_form {
            PhiForm::FromTwo => Parity::Even,
            PhiForm::ByParity => parity,
        };
        let phi = phi_lower(self.phi, n, w, phi_parity, bits)?;
        Ok(BoundContext::new(n, w, parity, phi, log_alpha, bits)?
            .with_cofactor(self.cofactor)
            .with_unit_norm(self.params.as_ref().is_some_and(|p| p.unit_norm())))
    }

    fn worst_log_alpha(&self, n: u64, bits: u32) -> Result<Interval> {
        let policy = self.policy.lower(&Interval::from_int(n, bits).ln()?);
        Ok(match &self.params {
            Some(p) => policy.max(&alpha_log(p, bits)),
            None => policy,
        })
    }
}

/// Evaluation options shared by all stages.
#[derive(Clone, Copy, Debug, Default)]
pub struct CascadeOptions {
    pub policy: LogAlphaPolicy,
    pub precision: Precision,
}

/// Is the stage inequality certified to fail at `n`, i.e. is `n` excluded?
///
/// Both bounds are affine in `ln|alpha|`, the upper one vanishing at 0 and the
/// lower one negative there, so a positive gap at the smallest admissible
/// `ln|alpha|` stays positive above it. Indices outside the stage's parity
/// class are vacuously excluded.
pub fn stage_violated(n: u64, cfg: &StageConfig, precision: &Precision) -> Result<bool> {
    if n < FIRST_INDEX {
        return Err(domain!("stage inequalities start at n = {FIRST_INDEX}, got {n}"));
    }
    if !cfg.parity.admits(n) {
        return Ok(true);
    }
    for w in cfg.omegas(n)? {
        let what = || format!("stage {} at n = {n}, omega = {w}", cfg.name);
        let positive = precision.decide_gt(&what, |bits| {
            stage_bounds(cfg, n, w, cfg.worst_log_alpha(n, bits)?, bits)
        })?;
        if !positive {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The stage's lower and upper bounds for `ln M_n` at a given `omega` and
/// `ln|alpha|`.
pub fn stage_bounds(cfg: &StageConfig, n: u64, w: u32, log_alpha: Interval, bits: u32) -> Result<(Interval, Interval)> {
    let ctx = cfg.context(n, w, log_alpha, bits)?;
    Ok((mn_lower(cfg.variant_for(n), &ctx)?, mn_upper_sieve(&ctx)?))
}

/// Maps a batch of indices through a predicate; implementations may run the
/// calls in parallel but must return results in input order.
pub trait BatchEval: Sync {
    fn eval(&self, ns: &[u64], f: &(dyn Fn(u64) -> Result<bool> + Sync)) -> Vec<Result<bool>>;
}

/// Evaluates one index after another.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl BatchEval for Sequential {
    fn eval(&self, ns: &[u64], f: &(dyn Fn(u64) -> Result<bool> + Sync)) -> Vec<Result<bool>> {
        ns.iter().map(|&n| f(n)).collect()
    }
}

/// Outcome of a threshold search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub value: u64,
    /// Every index above `value` is accounted for: either scanned here or
    /// already excluded by an earlier stage.
    pub decisive: bool,
}

/// Largest index in `[FIRST_INDEX, ceiling]` of the stage's parity class that
/// is not excluded, found by a descending geometric scan and bisection.
///
/// `covered_above` says indices beyond `ceiling` were excluded earlier; when
/// it is false and the ceiling survives, the result is not decisive.
pub fn find_threshold(
    cfg: &StageConfig,
    ceiling: u64,
    covered_above: bool,
    precision: &Precision,
    exec: &dyn BatchEval,
) -> Result<Threshold> {
    // work on k with n = step * k + offset so that only admitted n are probed
    let (step, offset) = match cfg.parity {
        ParityClass::Both => (1, 0),
        ParityClass::Even => (2, 0),
        ParityClass::Odd => (2, 1),
    };
    let to_n = |k: u64| step * k + offset;
    let k_min = (FIRST_INDEX - offset).div_ceil(step);
    if ceiling < FIRST_INDEX {
        return Ok(Threshold { value: EMPTY_THRESHOLD, decisive: true });
    }
    let k_max = (ceiling - offset) / step;
    let test = |k: u64| stage_violated(to_n(k), cfg, precision);
    if !test(k_max)? {
        return Ok(Threshold { value: to_n(k_max), decisive: covered_above });
    }
    let mut hi = k_max; // known excluded
    loop {
        let mut probes = Vec::with_capacity(SCAN_BATCH);
        let mut k = hi;
        while probes.len() < SCAN_BATCH && k > k_min {
            k = k.saturating_sub((k / SCAN_DIVISOR).max(1)).max(k_min);
            probes.push(k);
        }
        if probes.is_empty() {
            return Ok(Threshold { value: EMPTY_THRESHOLD, decisive: true });
        }
        let ns: Vec<u64> = probes.iter().map(|&k| to_n(k)).collect();
        let results = exec.eval(&ns, &|n| stage_violated(n, cfg, precision));
        for (&k, r) in probes.iter().zip(results) {
            if r? {
                hi = k;
                continue;
            }
            // bisect between the surviving k and the excluded hi
            let mut lo = k;
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if test(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Threshold { value: to_n(lo), decisive: true });
        }
        if hi == k_min {
            return Ok(Threshold { value: EMPTY_THRESHOLD, decisive: true });
        }
    }
}

/// Largest index in `[FIRST_INDEX, ceiling]` not excluded, checking every index.
pub fn exhaustive_threshold(cfg: &StageConfig, ceiling: u64, precision: &Precision, exec: &dyn BatchEval) -> Result<Threshold> {
    let ns: Vec<u64> = (FIRST_INDEX..=ceiling).filter(|&n| cfg.parity.admits(n)).collect();
    let results = exec.eval(&ns, &|n| stage_violated(n, cfg, precision));
    let mut value = EMPTY_THRESHOLD;
    for (&n, r) in ns.iter().zip(results) {
        if !r? {
            value = value.max(n);
        }
    }
    Ok(Threshold { value, decisive: true })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseLabel {
    General,
    Real,
    Unit,
}

impl core::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            CaseLabel::General => "general",
            CaseLabel::Real => "real",
            CaseLabel::Unit => "unit",
        })
    }
}

/// The `omega` assumption as reported: a cap, or a description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum OmegaLabel {
    Count(u32),
    Text(String),
}

impl core::fmt::Display for OmegaLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OmegaLabel::Count(w) => write!(f, "{w}"),
            OmegaLabel::Text(t) => f.write_str(t),
        }
    }
}

/// One reported stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundStageReport {
    pub name: String,
    pub parity: ParityClass,
    pub omega: OmegaLabel,
    pub phi_bound: PhiBound,
    pub variant: String,
    pub computed: u64,
    pub paper: u64,
    pub decisive: bool,
}

/// A finished cascade; serialises to the report document.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CascadeResult {
    pub case: CaseLabel,
    pub kind: SeqKind,
    pub stages: Vec<BoundStageReport>,
    pub final_bound: u64,
    pub stated_bound: u64,
    /// Configurations in stage order, at the level the inequalities were
    /// evaluated (`2n` for `V`).
    #[serde(skip)]
    pub configs: Vec<StageConfig>,
}

impl CascadeResult {
    pub fn all_decisive(&self) -> bool {
        self.stages.iter().all(|s| s.decisive)
    }
}

fn report(cfg: &StageConfig, t: Threshold) -> BoundStageReport {
    BoundStageReport {
        name: cfg.name.clone(),
        parity: cfg.parity,
        omega: cfg.omega.label(),
        phi_bound: cfg.phi,
        variant: cfg.variant_label(),
        computed: t.value,
        paper: cfg.paper,
        decisive: t.decisive,
    }
}

/// Ceiling for the first general stage.
pub const GENERAL_CEILING: u64 = 10_000_000_000;

/// Stated bounds of the three cases.
pub const GENERAL_STATED: u64 = 300_000;
pub const REAL_STATED: u64 = 210;
pub const UNIT_STATED: u64 = 150;

/// `omega(n)` cap valid for all `n <= t`.
pub fn omega_cap_below(t: u64) -> Result<u32> {
    let rs = if t >= 16 { omega_upper(t)? } else { u32::MAX };
    Ok(rs.min(max_omega_upto(t, false)))
}

#[allow(clippy::too_many_arguments)]
fn stage(
    name: &str,
    parity: ParityClass,
    omega: OmegaAssumption,
    phi: PhiBound,
    phi_form: PhiForm,
    variant: MnBoundVariant,
    paper: u64,
    opts: &CascadeOptions,
) -> StageConfig {
    StageConfig {
        name: name.into(),
        parity,
        omega,
        phi,
        phi_form,
        variant,
        cofactor: CofactorTerm::DivideByN,
        policy: opts.policy,
        params: None,
        paper,
    }
}

/// Stage `index` (0-based) of the general cascade, given the previous threshold.
pub fn general_stage(index: usize, prev: u64, opts: &CascadeOptions) -> Result<StageConfig> {
    use MnBoundVariant::*;
    use ParityClass::*;
    use PhiBound::*;
    let w = omega_cap_below(prev)?;
    Ok(match index {
        0 => stage("rosser-schoenfeld", Both, OmegaAssumption::FromOmegaUpper, RosserSchoenfeld, PhiForm::FromTwo, ComplexTrivialF, 18_000_000, opts),
        1 => stage("voutier-128", Both, OmegaAssumption::AtMost(w), OmegaProduct, PhiForm::FromTwo, ComplexVoutier128, 3_900_000, opts),
        2 => stage("voutier-64", Both, OmegaAssumption::AtMost(w), OmegaProduct, PhiForm::FromTwo, ComplexVoutier64, 1_852_000, opts),
        3 => stage("lemma", Both, OmegaAssumption::AtMost(w), OmegaProduct, PhiForm::ByParity, LemmaHw, 500_000, opts),
        4 => stage("lemma-even", Even, OmegaAssumption::AtMost(w), OmegaProduct, PhiForm::ByParity, LemmaHw, 270_000, opts),
        5 => stage("lemma-odd", Odd, OmegaAssumption::AtMost(w), OmegaProduct, PhiForm::ByParity, LemmaGw, 150_000, opts),
        _ => return Err(domain!("the general cascade has 6 stages")),
    })
}

pub const GENERAL_STAGES: usize = 6;

/// The general cascade for `U_n`; for `V_n` the same inequalities run at level
/// `2n` and every threshold is halved.
pub fn run_general_cascade(kind: SeqKind, opts: &CascadeOptions, exec: &dyn BatchEval) -> Result<CascadeResult> {
    let mut stages = Vec::new();
    let mut configs = Vec::new();
    let mut prev = GENERAL_CEILING;
    let mut ceiling = GENERAL_CEILING;
    let mut last_two = [0u64; 2];
    for i in 0..GENERAL_STAGES {
        let cfg = general_stage(i, prev, opts)?;
        let t = find_threshold(&cfg, ceiling, i > 0, &opts.precision, exec)?;
        stages.push(report(&cfg, t));
        configs.push(cfg);
        if i < 4 {
            prev = t.value;
            ceiling = t.value;
        } else {
            last_two[i - 4] = t.value;
        }
    }
    let result = CascadeResult {
        case: CaseLabel::General,
        kind: SeqKind::U,
        stages,
        final_bound: last_two[0].max(last_two[1]),
        stated_bound: GENERAL_STATED,
        configs,
    };
    Ok(at_kind(result, kind))
}

/// Rows of the real-root case: `(name, omega range, paper)`.
const REAL_ROWS: [(&str, u32, u32, u64); 3] = [
    ("real omega<=3", 1, 3, 167),
    ("real omega=4", 4, 4, 252),
    ("real omega>=5", 5, 7, 1000),
];

pub fn real_stage(row: usize, opts: &CascadeOptions) -> Result<StageConfig> {
    let &(name, lo, hi, paper) = REAL_ROWS.get(row).ok_or_else(|| domain!("the real case has 3 rows"))?;
    let mut cfg = stage(
        name,
        ParityClass::Both,
        OmegaAssumption::Range(lo, hi),
        PhiBound::OmegaProduct,
        PhiForm::FromTwo,
        MnBoundVariant::RealEq5,
        paper,
        opts,
    );
    cfg.cofactor = CofactorTerm::Omitted;
    Ok(cfg)
}

/// Real roots: per-`omega` thresholds, then the largest index below each row
/// threshold that actually has an admissible number of prime factors.
pub fn run_real_cascade(kind: SeqKind, opts: &CascadeOptions, exec: &dyn BatchEval) -> Result<CascadeResult> {
    let mut stages = Vec::new();
    let mut configs = Vec::new();
    let mut final_bound = EMPTY_THRESHOLD;
    for (row, &(_, lo, hi, _)) in REAL_ROWS.iter().enumerate() {
        let cfg = real_stage(row, opts)?;
        let t = find_threshold(&cfg, GENERAL_STATED, false, &opts.precision, exec)?;
        let survivor = (FIRST_INDEX..=t.value).rev().find(|&n| (lo..=hi).contains(&omega(n)));
        final_bound = final_bound.max(survivor.unwrap_or(EMPTY_THRESHOLD));
        stages.push(report(&cfg, t));
        configs.push(cfg);
    }
    let result = CascadeResult {
        case: CaseLabel::Real,
        kind: SeqKind::U,
        stages,
        final_bound,
        stated_bound: REAL_STATED,
        configs,
    };
    Ok(at_kind(result, kind))
}

pub fn unit_stage(p: &LucasParams, opts: &CascadeOptions) -> Result<StageConfig> {
    if !p.unit_norm() {
        return Err(domain!("the unit case needs s = +-1, got s = {}", p.s()));
    }
    let mut cfg = stage(
        "unit exhaustive",
        ParityClass::Both,
        OmegaAssumption::Exact,
        PhiBound::Exact,
        PhiForm::FromTwo,
        MnBoundVariant::UnitEq55,
        UNIT_STATED,
        opts,
    );
    cfg.cofactor = CofactorTerm::Omitted;
    cfg.params = Some(p.clone());
    Ok(cfg)
}

/// `s = +-1`: every index in `[151, 210]` is checked with exact `phi(n)`.
pub fn run_unit_case(p: &LucasParams, kind: SeqKind, opts: &CascadeOptions, exec: &dyn BatchEval) -> Result<CascadeResult> {
    let cfg = unit_stage(p, opts)?;
    let t = exhaustive_threshold(&cfg, REAL_STATED, &opts.precision, exec)?;
    let result = CascadeResult {
        case: CaseLabel::Unit,
        kind: SeqKind::U,
        stages: alloc::vec![report(&cfg, t)],
        final_bound: t.value,
        stated_bound: UNIT_STATED,
        configs: alloc::vec![cfg],
    };
    Ok(at_kind(result, kind))
}

/// Re-express a `U` cascade for `V`: an index `n` of `V` is excluded when `2n`
/// is excluded for `U`, so each threshold `T` becomes `floor(T / 2)`.
fn at_kind(mut c: CascadeResult, kind: SeqKind) -> CascadeResult {
    if kind == SeqKind::V {
        c.kind = SeqKind::V;
        for s in &mut c.stages {
            s.name = format!("{} (level 2n)", s.name);
            s.computed /= 2;
            s.paper /= 2;
        }
        c.final_bound /= 2;
        c.stated_bound /= 2;
    }
    c
}

/// Stage exclusion at index `n` of the given sequence.
pub fn stage_violated_for(kind: SeqKind, n: u64, cfg: &StageConfig, precision: &Precision) -> Result<bool> {
    match kind {
        SeqKind::U => stage_violated(n, cfg, precision),
        SeqKind::V => stage_violated(2 * n, cfg, precision),
    }
}

/// Validates a cascade before it is written out.
pub fn emit_report(c: &CascadeResult) -> Result<&CascadeResult> {
    if c.stages.is_empty() {
        return Err(domain!("a report must contain at least one stage"));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lucas::validate_params;

    fn opts() -> CascadeOptions {
        CascadeOptions::default()
    }

    #[test]
    fn unit_case_excludes_151_to_210() {
        let fib = validate_params(1, 1).unwrap();
        let cfg = unit_stage(&fib, &opts()).unwrap();
        for n in 151..=210 {
            assert!(stage_violated(n, &cfg, &Precision::default()).unwrap(), "n={n}");
        }
        let c = run_unit_case(&fib, SeqKind::U, &opts(), &Sequential).unwrap();
        assert_eq!(c.final_bound, 150);
        let v = run_unit_case(&fib, SeqKind::V, &opts(), &Sequential).unwrap();
        assert_eq!(v.final_bound, 75);
        assert!(unit_stage(&validate_params(1, 2).unwrap(), &opts()).is_err());
    }

    #[test]
    fn below_the_first_index_is_a_domain_error() {
        let cfg = real_stage(0, &opts()).unwrap();
        assert!(stage_violated(150, &cfg, &Precision::default()).is_err());
    }

    #[test]
    fn real_case_rows() {
        let c = run_real_cascade(SeqKind::U, &opts(), &Sequential).unwrap();
        let computed: Vec<u64> = c.stages.iter().map(|s| s.computed).collect();
        assert!(computed[0] <= 167 && computed[1] <= 252 && computed[2] <= 1000, "{computed:?}");
        assert_eq!(c.final_bound, 210);
        assert!(c.all_decisive());
    }

    #[test]
    fn parity_classes_are_vacuous_elsewhere() {
        let cfg = general_stage(4, 500_000, &opts()).unwrap();
        assert!(stage_violated(1001, &cfg, &Precision::default()).unwrap());
    }

    #[test]
    fn omega_caps() {
        assert_eq!(omega_cap_below(15_028_725).unwrap(), 8);
        assert_eq!(omega_cap_below(3_700_002).unwrap(), 7);
        assert_eq!(omega_cap_below(423_900).unwrap(), 6);
    }

    #[test]
    fn empty_report_is_rejected() {
        let c = CascadeResult {
            case: CaseLabel::General,
            kind: SeqKind::U,
            stages: Vec::new(),
            final_bound: 0,
            stated_bound: 0,
            configs: Vec::new(),
        };
        assert!(emit_report(&c).is_err());
    }
}
