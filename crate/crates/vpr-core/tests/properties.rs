//! Property tests for the documented invariants of the core algorithms.

use proptest::prelude::*;

use vpr_core::cohog::{cohog_match, entropy_map, select_rois, RegionalDescriptorSet};
use vpr_core::hog::{hog_compare, hog_describe, GlobalDescriptor, HogParams};
use vpr_core::image::{GrayImage, Rect};
use vpr_core::matching::{
    evaluate_matches, similarity_matrix, Descriptor, GroundTruth, Metric, SimilarityMatrix,
};
use vpr_core::rmf::{compute_rmf, considered_indices};
use vpr_core::telemetry::{window_power, PowerSample, PowerTrace};

/// Brute-force frame-arrival replay, independent of the modular-arithmetic
/// loop in `compute_rmf`.
///
/// Frame 0 is in hand when the run starts; frame `i >= 1` arrives at tick
/// `i + 1` (one tick between arrivals at the incoming rate). The server takes
/// an arriving frame whenever it is idle and then stays busy for `interval`
/// ticks, the retrieval time expressed in arrival ticks.
fn simulate_real_time_matches(matches: &[u8], interval: u64) -> u64 {
    if matches.is_empty() {
        return 0;
    }
    let mut survived = u64::from(matches[0] == 1);
    let mut busy_until = interval;
    for (i, &m) in matches.iter().enumerate().skip(1) {
        let arrival = i as u64 + 1;
        if arrival >= busy_until {
            survived += u64::from(m == 1);
            busy_until = arrival + interval;
        }
    }
    survived
}

fn image_strategy(width: u32, height: u32) -> impl Strategy<Value = GrayImage> {
    prop::collection::vec(any::<u8>(), (width * height) as usize)
        .prop_map(move |data| GrayImage::from_raw(width, height, data).unwrap())
}

fn global_descriptors(
    count: core::ops::Range<usize>,
    dim: usize,
) -> impl Strategy<Value = Vec<Descriptor>> {
    prop::collection::vec(
        prop::collection::vec(0.01f64..1.0, dim)
            .prop_map(|v| Descriptor::Global(GlobalDescriptor::new(v))),
        count,
    )
}

fn regional_set(max_regions: usize) -> impl Strategy<Value = RegionalDescriptorSet> {
    prop::collection::vec(prop::collection::vec(0.1f64..1.0, 4), 1..=max_regions).prop_map(|vs| {
        RegionalDescriptorSet::new(
            vs.into_iter()
                .enumerate()
                .map(|(i, v)| {
                    (
                        Rect::new(i as u32 * 16, 0, 16, 16),
                        GlobalDescriptor::new(v),
                    )
                })
                .collect(),
        )
    })
}

proptest! {
    // --- imaging ---

    #[test]
    fn orientations_always_in_unsigned_range(img in image_strategy(12, 9)) {
        let field = img.gradients().unwrap();
        for &o in field.orientation() {
            prop_assert!((0.0..180.0).contains(&o));
        }
    }

    #[test]
    fn patch_entropy_bounded_and_permutation_invariant(
        mut data in prop::collection::vec(any::<u8>(), 64)
    ) {
        let rect = Rect::new(0, 0, 64, 1);
        let img = GrayImage::from_raw(64, 1, data.clone()).unwrap();
        let entropy = img.patch_entropy(rect).unwrap();
        prop_assert!((0.0..=8.0).contains(&entropy));
        // Sorting is a permutation; the histogram does not care.
        data.sort_unstable();
        let sorted = GrayImage::from_raw(64, 1, data).unwrap();
        prop_assert_eq!(sorted.patch_entropy(rect).unwrap(), entropy);
    }

    #[test]
    fn resize_to_same_dimensions_is_identity(img in image_strategy(9, 7)) {
        prop_assert_eq!(img.resize(9, 7).unwrap(), img);
    }

    // --- descriptor-hog ---

    #[test]
    fn hog_compare_is_scale_invariant(
        img_a in image_strategy(16, 16),
        img_b in image_strategy(16, 16),
        alpha in 1e-3f64..1e3,
    ) {
        let params = HogParams::default();
        let a = hog_describe(&img_a, &params).unwrap();
        let b = hog_describe(&img_b, &params).unwrap();
        let scaled = GlobalDescriptor::new(a.values().iter().map(|v| v * alpha).collect());
        let base = hog_compare(&a, &b).unwrap();
        let after = hog_compare(&scaled, &b).unwrap();
        prop_assert!((base - after).abs() < 1e-12, "{base} vs {after}");
    }

    #[test]
    fn hog_compare_is_symmetric(
        a in prop::collection::vec(-1.0f64..1.0, 8),
        b in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let da = GlobalDescriptor::new(a);
        let db = GlobalDescriptor::new(b);
        prop_assert_eq!(
            hog_compare(&da, &db).unwrap(),
            hog_compare(&db, &da).unwrap()
        );
    }

    #[test]
    fn hog_block_subvectors_normalized(img in image_strategy(24, 24)) {
        let desc = hog_describe(&img, &HogParams::default()).unwrap();
        for block in desc.values().chunks(36) {
            let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(norm <= 1.0 + 1e-9);
            if norm > 0.0 {
                prop_assert!((norm - 1.0).abs() < 1e-9);
            }
        }
    }

    // --- descriptor-cohog ---

    #[test]
    fn cohog_self_match_is_one(set in regional_set(5)) {
        prop_assert_eq!(cohog_match(&set, &set).unwrap(), 1.0);
    }

    #[test]
    fn cohog_match_invariant_under_reference_permutation(
        q in regional_set(4),
        r in regional_set(6),
    ) {
        let mut reversed = r.regions().to_vec();
        reversed.reverse();
        let reversed = RegionalDescriptorSet::new(reversed);
        prop_assert_eq!(
            cohog_match(&q, &r).unwrap(),
            cohog_match(&q, &reversed).unwrap()
        );
    }

    #[test]
    fn cohog_extra_reference_region_never_hurts(
        q in regional_set(4),
        r in regional_set(4),
        extra in prop::collection::vec(0.1f64..1.0, 4),
    ) {
        let base = cohog_match(&q, &r).unwrap();
        let mut grown = r.regions().to_vec();
        grown.push((Rect::new(96, 0, 16, 16), GlobalDescriptor::new(extra)));
        let grown = RegionalDescriptorSet::new(grown);
        prop_assert!(cohog_match(&q, &grown).unwrap() >= base);
    }

    #[test]
    fn cohog_region_count_monotone_in_threshold(
        img in image_strategy(48, 32),
        t1 in 0.0f64..8.0,
        t2 in 0.0f64..8.0,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let map = entropy_map(&img, 16).unwrap();
        prop_assert!(select_rois(&map, hi).len() <= select_rois(&map, lo).len());
    }

    // --- matching ---

    #[test]
    fn similarity_matrix_equals_naive_double_loop(
        queries in global_descriptors(1..5, 6),
        refs in global_descriptors(1..6, 6),
    ) {
        for metric in [Metric::Cosine, Metric::L1] {
            let m = similarity_matrix(&queries, &refs, metric).unwrap();
            for (i, q) in queries.iter().enumerate() {
                for (j, r) in refs.iter().enumerate() {
                    let expected =
                        vpr_core::matching::score_pair(q, r, metric).unwrap();
                    prop_assert_eq!(m.score(i, j), expected);
                }
            }
        }
    }

    #[test]
    fn best_indices_invariant_under_positive_scaling(
        queries in global_descriptors(1..5, 6),
        refs in global_descriptors(2..6, 6),
        alpha in 1e-3f64..1e3,
    ) {
        let gt_len = queries.len();
        let gt = GroundTruth::new(vec![0; gt_len], 0);
        let base = evaluate_matches(
            &similarity_matrix(&queries, &refs, Metric::Cosine).unwrap(),
            &gt,
        )
        .unwrap();
        let scaled: Vec<Descriptor> = queries
            .iter()
            .map(|d| match d {
                Descriptor::Global(g) => Descriptor::Global(GlobalDescriptor::new(
                    g.values().iter().map(|v| v * alpha).collect(),
                )),
                other => other.clone(),
            })
            .collect();
        let after = evaluate_matches(
            &similarity_matrix(&scaled, &refs, Metric::Cosine).unwrap(),
            &gt,
        )
        .unwrap();
        prop_assert_eq!(base.best_indices, after.best_indices);
    }

    #[test]
    fn row_argmax_invariant_under_constant_shift(
        row in prop::collection::vec(-1.0f64..1.0, 1..12),
        shift in -10.0f64..10.0,
    ) {
        let shifted: Vec<f64> = row.iter().map(|v| v + shift).collect();
        let m1 = SimilarityMatrix::from_rows(vec![row], Metric::Cosine).unwrap();
        let m2 = SimilarityMatrix::from_rows(vec![shifted], Metric::Cosine).unwrap();
        let gt = GroundTruth::new(vec![0], 0);
        prop_assert_eq!(
            evaluate_matches(&m1, &gt).unwrap().best_indices,
            evaluate_matches(&m2, &gt).unwrap().best_indices
        );
    }

    #[test]
    fn accuracy_bounds_and_determinism(
        rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 1..8)
    ) {
        let n = rows.len();
        let m = SimilarityMatrix::from_rows(rows, Metric::Cosine).unwrap();
        let gt = GroundTruth::new((0..n).map(|i| i % 4).collect(), 0);
        let a = evaluate_matches(&m, &gt).unwrap();
        let b = evaluate_matches(&m, &gt).unwrap();
        prop_assert!((0.0..=1.0).contains(&a.accuracy));
        let all_ones = a.matches_list.iter().all(|&v| v == 1);
        prop_assert_eq!(a.accuracy == 1.0, all_ones);
        prop_assert_eq!(a, b);
    }

    // --- rmf ---

    #[test]
    fn rmf_edge_laws(
        matches in prop::collection::vec(0u8..=1, 1..64),
        interval in 1u64..12,
    ) {
        let n = matches.len() as u64;
        let (m_q, rmf) = compute_rmf(&matches, interval).unwrap();
        prop_assert!(rmf <= m_q && m_q <= n);
        if interval == 1 {
            prop_assert_eq!(rmf, m_q);
        }
        if interval > n {
            prop_assert_eq!(rmf, u64::from(matches[0]));
        }
        let expected_considered = n / interval + u64::from(interval > 1);
        prop_assert_eq!(
            considered_indices(matches.len(), interval).len() as u64,
            expected_considered
        );
    }

    #[test]
    fn rmf_equals_frame_arrival_simulation(
        matches in prop::collection::vec(0u8..=1, 1..=64),
        interval in 1u64..=8,
    ) {
        let (_, rmf) = compute_rmf(&matches, interval).unwrap();
        prop_assert_eq!(rmf, simulate_real_time_matches(&matches, interval));
    }

    // --- telemetry ---

    #[test]
    fn energy_nonnegative_and_additive_under_splitting(
        powers in prop::collection::vec(0.0f64..5000.0, 2..12),
        cut in 0.1f64..0.9,
    ) {
        let samples: Vec<PowerSample> = powers
            .iter()
            .enumerate()
            .map(|(i, &p)| PowerSample { t_s: i as f64, power_mw: p })
            .collect();
        let end = (samples.len() - 1) as f64;
        let trace = PowerTrace::new(samples, 0.0).unwrap();
        let whole = window_power(&trace, 0.0, end).unwrap();
        prop_assert!(whole.energy_joules >= 0.0);
        let split = cut * end;
        let a = window_power(&trace, 0.0, split).unwrap();
        let b = window_power(&trace, split, end).unwrap();
        prop_assert!(a.energy_joules >= 0.0 && b.energy_joules >= 0.0);
        let total = a.energy_joules + b.energy_joules;
        let scale = whole.energy_joules.abs().max(1e-12);
        prop_assert!(
            (total - whole.energy_joules).abs() / scale < 1e-9,
            "{total} vs {}",
            whole.energy_joules
        );
    }
}

/// Exhaustive simulator equivalence over all list lengths up to 64 and
/// intervals up to 8, with pseudo-random matches patterns per case.
#[test]
fn rmf_simulator_equivalence_exhaustive() {
    let mut state = 0x853c49e6748fea9bu64;
    let mut next_bit = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 60) & 1) as u8
    };
    for n in 1..=64usize {
        for interval in 1..=8u64 {
            for _ in 0..4 {
                let matches: Vec<u8> = (0..n).map(|_| next_bit()).collect();
                let (_, rmf) = compute_rmf(&matches, interval).unwrap();
                assert_eq!(
                    rmf,
                    simulate_real_time_matches(&matches, interval),
                    "n={n} interval={interval} matches={matches:?}"
                );
            }
        }
    }
}
