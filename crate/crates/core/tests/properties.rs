use lucaspf_core::arith::{arithmetic_profile, omega, totient};
use lucaspf_core::bounds::{phi_lower, Parity, PhiBound};
use lucaspf_core::cyclotomic::cyclotomic_value;
use lucaspf_core::factorial::{factorial, pf_member_u64};
use lucaspf_core::lucas::{lucas_pair, u_at, v_at};
use lucaspf_core::pipeline::{general_stage, stage_bounds, stage_violated, CascadeOptions};
use lucaspf_core::{pf_decompose, pf_fast_reject, pf_member, validate_params, Interval, LucasParams, PFWitness, Precision};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = LucasParams> {
    (-12i64..=12, -12i64..=12).prop_filter_map("invalid pair", |(r, s)| validate_params(r, s).ok())
}

fn witness() -> impl Strategy<Value = PFWitness> {
    (prop::bool::ANY, prop::collection::vec(2u64..=14, 0..6)).prop_map(|(neg, mut args)| {
        args.sort_unstable();
        PFWitness { sign: if neg { -1 } else { 1 }, args }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn doubling_matches_recurrence(p in params(), n in 0u64..160) {
        let (r, s) = (BigInt::from(p.r()), BigInt::from(p.s()));
        let (mut u0, mut u1) = (BigInt::zero(), BigInt::one());
        let (mut v0, mut v1) = (BigInt::from(2), r.clone());
        for _ in 0..n {
            let u2 = &r * &u1 + &s * &u0;
            let v2 = &r * &v1 + &s * &v0;
            (u0, u1, v0, v1) = (u1, u2, v1, v2);
        }
        prop_assert_eq!(lucas_pair(&p, n), (u0, v0));
    }

    #[test]
    fn companion_is_a_quotient(p in params(), n in 1u64..120) {
        let u = u_at(&p, n).value;
        prop_assume!(!u.is_zero());
        prop_assert_eq!(u_at(&p, 2 * n).value, &u * v_at(&p, n).value);
    }

    #[test]
    fn witnesses_are_members(w in witness()) {
        let v = w.value();
        prop_assert!(pf_member(&v).unwrap());
        prop_assert!(pf_fast_reject(&v).is_none());
        let found = pf_decompose(&v, 4).unwrap();
        prop_assert!(!found.is_empty());
        for f in found {
            prop_assert_eq!(f.value(), v.clone());
        }
    }

    #[test]
    fn perturbed_witnesses(w in witness()) {
        // a factorial divisible by this prime dwarfs every generated witness
        let v = w.value() * 1_000_003u64;
        prop_assert!(!pf_member(&v).unwrap());
    }

    #[test]
    fn machine_and_big_paths_agree(n in 1u64..2_000_000) {
        prop_assert_eq!(pf_member_u64(n).unwrap(), pf_member(&BigInt::from(n)).unwrap());
    }

    #[test]
    fn products_of_two_factorials(a in 2u64..60, b in 2u64..60) {
        prop_assert!(pf_member(&BigInt::from(factorial(a) * factorial(b))).unwrap());
    }

    #[test]
    fn divisor_products_recover_terms(p in params(), n in 2u64..90) {
        let prod: BigInt = arithmetic_profile(n)
            .unwrap()
            .divisors
            .iter()
            .filter(|&&d| d > 1)
            .map(|&d| cyclotomic_value(&p, d).unwrap())
            .product();
        prop_assert_eq!(prod, u_at(&p, n).value);
    }

    #[test]
    fn rational_arithmetic_is_enclosed(a in -10_000i64..10_000, b in 1i64..10_000, c in -10_000i64..10_000, d in 1i64..10_000, bits in 16u32..200) {
        let x = Interval::from_ratio(a, b, bits).unwrap();
        let y = Interval::from_ratio(c, d, bits).unwrap();
        let (a, b, c, d) = (BigInt::from(a), BigInt::from(b), BigInt::from(c), BigInt::from(d));
        prop_assert!((&x + &y).contains_ratio(&(&a * &d + &c * &b), &(&b * &d)));
        prop_assert!((&x - &y).contains_ratio(&(&a * &d - &c * &b), &(&b * &d)));
        prop_assert!((&x * &y).contains_ratio(&(&a * &c), &(&b * &d)));
        if !c.is_zero() {
            let (num, den) = if c < BigInt::zero() { (-(&a * &d), -(&b * &c)) } else { (&a * &d, &b * &c) };
            prop_assert!(x.div(&y).unwrap().contains_ratio(&num, &den));
        }
    }

    #[test]
    fn refinement_never_flips_a_decision(num in 1u64..1_000_000, den in 1u64..1_000_000) {
        let cmp = |bits: u32| {
            let x = Interval::from_ratio(num, den, bits).unwrap().ln().unwrap();
            let y = Interval::from_ratio(den, num + 1, bits).unwrap().exp();
            x.compare(&y)
        };
        if let Some(o) = cmp(64) {
            prop_assert_eq!(cmp(256), Some(o));
        }
    }

    #[test]
    fn explicit_totient_bounds(n in 151u64..5_000_000) {
        let phi = totient(n) as f64;
        prop_assert!(phi_lower(PhiBound::RosserSchoenfeld, n, omega(n), Parity::of(n), 64).unwrap().lo_f64() <= phi);
        prop_assert!(phi_lower(PhiBound::OmegaProduct, n, omega(n), Parity::of(n), 64).unwrap().lo_f64() <= phi);
    }
}

// raising ln|alpha| above the worst case keeps an excluded index excluded
proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn larger_log_alpha_never_readmits(stage in 0usize..6, x in 0.0f64..1.0) {
        let prev = [10_000_000_000u64, 15_018_988, 3_446_084, 2_000_614, 267_190, 267_190][stage];
        // log-uniform in the range the stage scans
        let n = (151.0 * (prev as f64 / 151.0).powf(x)) as u64;
        let cfg = general_stage(stage, prev, &CascadeOptions::default()).unwrap();
        prop_assume!(cfg.parity.admits(n));
        prop_assume!(stage_violated(n, &cfg, &Precision::default()).unwrap());
        let w = omega(n).min(6);
        let logn = Interval::from_int(n, 64).ln().unwrap();
        for k in 1..=10u32 {
            // from 0.5 ln n up to 5 ln n
            let l = &logn * &Interval::from_ratio(k, 2, 64).unwrap();
            let (lo, up) = stage_bounds(&cfg, n, w, l, 64).unwrap();
            prop_assert!(lo.certainly_gt(&up), "stage {} n {} k {}", stage, n, k);
        }
    }
}

#[test]
fn stage_thresholds_are_sound_on_samples() {
    // thresholds of the shipped cascade, with the ceiling each stage scanned
    let opts = CascadeOptions::default();
    let runs = [
        (0, 10_000_000_000u64, 15_018_988u64, 10_000_000_000u64),
        (1, 15_018_988, 3_446_084, 15_018_988),
        (2, 3_446_084, 2_000_614, 3_446_084),
        (3, 2_000_614, 267_190, 2_000_614),
        (4, 267_190, 267_190, 267_190),
        (5, 267_190, 85_261, 267_190),
    ];
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    for (i, prev, threshold, ceiling) in runs {
        let cfg = general_stage(i, prev, &opts).unwrap();
        if threshold >= ceiling {
            continue;
        }
        for _ in 0..100 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let n = threshold + 1 + state % (ceiling - threshold);
            assert!(stage_violated(n, &cfg, &Precision::default()).unwrap(), "stage {i} n {n}");
        }
    }
}
