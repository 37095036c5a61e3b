//! Structural invariants checked over random inputs.

use hermult_core::hermite::{count_up_to, level_count};
use hermult_core::{
    classify_regime, enumerate_level, enumerate_up_to, eval_phi_1d, gl_condition, kappa_sum,
    kappa_weight, partition_cell_of, project_level, semigroup_trace_closed_form, CoefficientVector,
    Exponent, MultiIndex, Symbol,
};
use proptest::prelude::*;

fn exponent(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parity_is_exact(k in 0u32..400, x in -30.0f64..30.0) {
        let a = eval_phi_1d(k, x).unwrap();
        let b = eval_phi_1d(k, -x).unwrap();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(a.to_f64(), sign * b.to_f64());
        prop_assert_eq!(a.ln_abs(), b.ln_abs());
    }

    #[test]
    fn level_counts_match_brute_force(n in 1usize..5, k in 0u32..12) {
        let brute = (0..(k + 1).pow(n as u32))
            .filter(|&code| {
                let mut c = code;
                let mut total = 0;
                for _ in 0..n {
                    total += c % (k + 1);
                    c /= k + 1;
                }
                total == k
            })
            .count() as u64;
        prop_assert_eq!(level_count(n, u64::from(k)), Some(brute));
        prop_assert_eq!(enumerate_level(n, k).unwrap().len() as u64, brute);
        let cumulative: u64 = (0..=k).map(|j| level_count(n, u64::from(j)).unwrap()).sum();
        prop_assert_eq!(count_up_to(n, u64::from(k)), Some(cumulative));
    }

    #[test]
    fn enumeration_is_graded_lexicographic(n in 1usize..5, max in 0u32..8) {
        let all: Vec<MultiIndex> = enumerate_up_to(n, max).unwrap().collect();
        prop_assert_eq!(all.len() as u64, count_up_to(n, u64::from(max)).unwrap());
        for pair in all.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            prop_assert!(
                a.order() < b.order() || (a.order() == b.order() && a.entries() < b.entries())
            );
        }
    }

    #[test]
    fn kappa_partials_grow_with_truncation(t in 0.3f64..2.0, p1 in 1.1f64..8.0, p2 in 1.0f64..8.0, n in 1usize..3) {
        let m = Symbol::heat(t).unwrap();
        let case = classify_regime(exponent(p1), exponent(p2), 1.0, 10).unwrap();
        let lo = kappa_sum(&m, &case, n, 20, 1e-8).unwrap().partial_sum;
        let hi = kappa_sum(&m, &case, n, 40, 1e-8).unwrap().partial_sum;
        prop_assert!(hi >= lo);
    }

    #[test]
    fn weight_scales_with_power_off_log_branches(
        p1 in 1.1f64..8.0,
        p2 in 1.0f64..8.0,
        r in 0.1f64..=1.0,
        r2 in 0.1f64..=1.0,
        entries in prop::collection::vec(0u32..200, 1..4),
    ) {
        let a = classify_regime(exponent(p1), exponent(p2), r, 10).unwrap();
        prop_assume!(a.law().1 == 0.0);
        let b = classify_regime(exponent(p1), exponent(p2), r2, 10).unwrap();
        let nu = MultiIndex::new(entries).unwrap();
        let wa = kappa_weight(&a, &nu);
        let wb = kappa_weight(&b, &nu);
        prop_assert!((wb - wa.powf(r2 / r)).abs() <= 1e-10 * wb.abs().max(1.0));
    }

    #[test]
    fn weight_is_one_in_middle_band(p in 1.34f64..3.99, entries in prop::collection::vec(0u32..500, 1..4)) {
        let case = classify_regime(exponent(p), exponent(p), 1.0, 10).unwrap();
        let nu = MultiIndex::new(entries).unwrap();
        prop_assert!((kappa_weight(&case, &nu) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gl_order_peaks_at_two(a in 1.0f64..50.0, b in 1.0f64..50.0) {
        let ga = gl_condition(exponent(a));
        let gb = gl_condition(exponent(b));
        prop_assert!(ga <= gl_condition(exponent(2.0)));
        let (da, db) = ((1.0 / a - 0.5).abs(), (1.0 / b - 0.5).abs());
        if da < db - 1e-12 {
            prop_assert!(ga >= gb);
        }
    }

    #[test]
    fn level_projections_partition_a_vector(
        n in 1usize..4,
        max in 1u32..6,
        seed in prop::collection::vec(-1.0f64..1.0, 200),
    ) {
        let entries = enumerate_up_to(n, max)
            .unwrap()
            .zip(seed.iter().cycle())
            .map(|(nu, &v)| (nu, v));
        let c = CoefficientVector::from_entries(n, max, entries).unwrap();
        let mut total = vec![0.0; c.values().len()];
        for k in 0..=max {
            let p = project_level(&c, k).unwrap();
            let again = project_level(&p, k).unwrap();
            prop_assert_eq!(again.values(), p.values());
            for (acc, v) in total.iter_mut().zip(p.values()) {
                *acc += v;
            }
        }
        prop_assert_eq!(total.as_slice(), c.values());
    }

    #[test]
    fn semigroup_partial_sums_increase_to_closed_form(t in 0.2f64..3.0, n in 1usize..4) {
        let closed = semigroup_trace_closed_form(t, n).unwrap().value;
        let mut partial = 0.0;
        let mut last = 0.0;
        for k in 0..60u64 {
            partial += level_count(n, k).unwrap() as f64 * (-t * (2 * k + n as u64) as f64).exp();
            prop_assert!(partial >= last);
            prop_assert!(partial <= closed * (1.0 + 1e-12));
            last = partial;
        }
    }
}

#[test]
fn partition_cells_cover_small_boxes() {
    for n in 1..=3usize {
        for k in [1u32, 2, 3] {
            let side = 2 * k + 1;
            let mut counts = vec![0usize; n + 1];
            for code in 0..side.pow(n as u32) {
                let mut c = code;
                let entries = (0..n)
                    .map(|_| {
                        let v = c % side;
                        c /= side;
                        v
                    })
                    .collect();
                counts[partition_cell_of(&MultiIndex::new(entries).unwrap(), k)] += 1;
            }
            assert_eq!(counts.iter().sum::<usize>(), side.pow(n as u32) as usize);
            // Exactly `s` entries in 0..=k and the rest in k+1..=2k.
            for (s, &count) in counts.iter().enumerate() {
                let choose = (0..s).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
                let expected = choose * ((k + 1) as usize).pow(s as u32) * (k as usize).pow((n - s) as u32);
                assert_eq!(count, expected, "n={n} k={k} s={s}");
            }
        }
    }
}
