mod common;

use maltmap::corpus::{filter_complete, partition_fermentation, Corpus, RejectReason};
use maltmap::eval::adjusted_rand_index;
use maltmap::gower::gower_matrix;
use maltmap::grist::percentize;
use maltmap::hops::{adf, ADF_MAX};
use maltmap::inference::{brown_forsythe, mann_whitney, trimmed_mean, welch_t, MwMode};
use maltmap::matrix::DissimilarityMatrix;
use maltmap::rng::SeededRng;
use maltmap::seriate::{agglomerate, optimal_leaf_order, path_cost, Linkage};
use maltmap::som::{random_prototypes, relational_distance, train, train_from, SomConfig, SomModel};
use maltmap::synth::corpus_with_incomplete;
use proptest::prelude::*;

fn permuted(d: &DissimilarityMatrix, p: &[usize]) -> DissimilarityMatrix {
    let n = d.len();
    let mut inv = vec![0; n];
    for (old, &new) in p.iter().enumerate() {
        inv[new] = old;
    }
    let labels = (0..n).map(|k| d.labels()[inv[k]].clone()).collect();
    DissimilarityMatrix::from_fn(labels, |a, b| d.get(inv[a], inv[b])).unwrap()
}

fn permutation(seed: u64, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut common::rng(seed));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gower_matches_naive_and_is_a_dissimilarity(seed in any::<u64>(), n in 2usize..25) {
        let table = common::random_table(&mut common::rng(seed), n);
        let naive = common::naive_gower(&table);
        match gower_matrix(&table) {
            Err(_) => prop_assert!(naive.iter().flatten().any(Option::is_none)),
            Ok(d) => {
                for i in 0..n {
                    prop_assert_eq!(d.get(i, i), 0.0);
                    for j in 0..n {
                        let v = d.get(i, j);
                        prop_assert!((0.0..=1.0).contains(&v));
                        prop_assert_eq!(v, d.get(j, i));
                        prop_assert!((v - naive[i][j].unwrap()).abs() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn olo_cost_matches_exhaustive_flips(seed in any::<u64>(), n in 2usize..8, ties in any::<bool>()) {
        let d = common::random_dissimilarity(&mut common::rng(seed), n, ties);
        for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
            let tree = agglomerate(&d, linkage).unwrap();
            let olo = optimal_leaf_order(&tree, &d).unwrap();
            prop_assert!((olo.cost - common::brute_force_olo(&tree, &d)).abs() <= 1e-12);
            let mut sorted = olo.order.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn merge_heights_ignore_input_order(seed in any::<u64>(), n in 2usize..12) {
        let d = common::random_dissimilarity(&mut common::rng(seed), n, false);
        let dp = permuted(&d, &permutation(seed ^ 1, n));
        for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
            let heights = |m: &DissimilarityMatrix| {
                let mut h: Vec<f64> = agglomerate(m, linkage).unwrap().merges.iter().map(|x| x.height).collect();
                h.sort_by(f64::total_cmp);
                h
            };
            for (a, b) in heights(&d).iter().zip(heights(&dp)) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn exact_mann_whitney_matches_enumeration(
        x in prop::collection::vec(0u8..5, 1..6),
        y in prop::collection::vec(0u8..5, 1..6),
    ) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let y: Vec<f64> = y.into_iter().map(f64::from).collect();
        let p = mann_whitney(&x, &y, MwMode::Exact).unwrap().p_value;
        prop_assert_eq!(p, common::enumerate_mw_p(&x, &y));
        prop_assert_eq!(p, mann_whitney(&y, &x, MwMode::Exact).unwrap().p_value);
    }

    #[test]
    fn welch_is_antisymmetric(
        x in prop::collection::vec(-100.0f64..100.0, 2..20),
        y in prop::collection::vec(-100.0f64..100.0, 2..20),
    ) {
        if let (Ok(a), Ok(b)) = (welch_t(&x, &y), welch_t(&y, &x)) {
            prop_assert!((a.statistic + b.statistic).abs() <= 1e-9 * (1.0 + a.statistic.abs()));
            prop_assert!((a.p_value - b.p_value).abs() <= 1e-12);
        }
    }

    #[test]
    fn trimmed_mean_is_translation_equivariant(x in prop::collection::vec(-1e3f64..1e3, 1..40), c in -1e3f64..1e3) {
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let a = trimmed_mean(&x, 0.2).unwrap();
        let b = trimmed_mean(&shifted, 0.2).unwrap();
        prop_assert!((a + c - b).abs() <= 1e-9);
    }

    #[test]
    fn percentize_is_a_monotone_ecdf(x in prop::collection::vec(-1e3f64..1e3, 1..40)) {
        let p = percentize(&x).unwrap();
        for i in 0..x.len() {
            prop_assert!(p[i] > 0.0 && p[i] <= 1.0);
            for j in 0..x.len() {
                if x[i] <= x[j] {
                    prop_assert!(p[i] <= p[j]);
                }
            }
        }
        let max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(x.iter().zip(&p).all(|(v, q)| *v != max || *q == 1.0));
    }

    #[test]
    fn adf_stays_in_range(og in 1.0001f64..1.2, drop in 0.0f64..0.3) {
        let v = adf(og, og - drop).unwrap();
        prop_assert!((0.0..=ADF_MAX).contains(&v));
    }

    #[test]
    fn ari_is_symmetric_and_label_free(a in prop::collection::vec(0usize..4, 2..40), shift in 1usize..10) {
        let relabelled: Vec<usize> = a.iter().map(|v| v * 7 + shift).collect();
        prop_assert!((adjusted_rand_index(&a, &relabelled).unwrap() - 1.0).abs() <= 1e-12
            || a.iter().all(|v| *v == a[0]));
        let b: Vec<usize> = a.iter().rev().cloned().collect();
        let ab = adjusted_rand_index(&a, &b).unwrap();
        let ba = adjusted_rand_index(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 || (ab.is_nan() && ba.is_nan()));
    }

    #[test]
    fn matrix_csv_round_trips_exactly(seed in any::<u64>(), n in 1usize..15) {
        let d = common::random_dissimilarity(&mut common::rng(seed), n, false);
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        prop_assert_eq!(DissimilarityMatrix::read_csv(buf.as_slice()).unwrap(), d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn filter_accounts_for_every_record_and_is_idempotent(seed in any::<u64>(), total in 1usize..120, frac in 0.0f64..1.0) {
        let complete = ((total as f64 * frac) as usize).max(1).min(total);
        let corpus = corpus_with_incomplete(total, complete, seed);
        let (kept, report) = filter_complete(&corpus);
        prop_assert_eq!(report.total_seen, total);
        prop_assert_eq!(kept.len(), complete);
        let by_reason: usize = [
            RejectReason::MissingVitals,
            RejectReason::MissingGrain,
            RejectReason::MissingHop,
            RejectReason::MissingMashOrHopUsage,
            RejectReason::MalformedField,
        ]
        .iter()
        .map(|r| report.count(*r))
        .sum();
        prop_assert_eq!(kept.len() + by_reason, report.total_seen);
        let (again, second) = filter_complete(&kept);
        prop_assert!(second.rejections.is_empty());
        prop_assert_eq!(again.recipes, kept.recipes);
    }

    #[test]
    fn partition_distributes_over_concatenation(seed in any::<u64>(), a in 1usize..40, b in 1usize..40) {
        let all = corpus_with_incomplete(a + b, a + b, seed);
        let first = Corpus::from_recipes(all.recipes[..a].to_vec());
        let second = Corpus::from_recipes(all.recipes[a..].to_vec());
        let (cold, hot) = partition_fermentation(&all);
        let (c1, h1) = partition_fermentation(&first);
        let (c2, h2) = partition_fermentation(&second);
        prop_assert_eq!(cold.recipes, [c1.recipes, c2.recipes].concat());
        prop_assert_eq!(hot.recipes, [h1.recipes, h2.recipes].concat());
    }

    #[test]
    fn tests_ignore_sample_order(
        x in prop::collection::vec(-50.0f64..50.0, 3..15),
        y in prop::collection::vec(-50.0f64..50.0, 3..15),
        seed in any::<u64>(),
    ) {
        let xr: Vec<f64> = x.iter().rev().cloned().collect();
        let mut yr = y.clone();
        use rand::seq::SliceRandom;
        yr.shuffle(&mut common::rng(seed));
        for mode in [MwMode::Exact, MwMode::NormalApprox] {
            let a = mann_whitney(&x, &y, mode).unwrap();
            let b = mann_whitney(&xr, &yr, mode).unwrap();
            prop_assert_eq!(a.statistic, b.statistic);
            prop_assert!((a.p_value - b.p_value).abs() <= 1e-12);
        }
        if let (Ok(a), Ok(b)) = (welch_t(&x, &y), welch_t(&xr, &yr)) {
            prop_assert!((a.statistic - b.statistic).abs() <= 1e-9 * (1.0 + a.statistic.abs()));
        }
        if let (Ok(a), Ok(b)) = (brown_forsythe(&[x.clone(), y.clone()]), brown_forsythe(&[xr, yr])) {
            prop_assert!((a.statistic - b.statistic).abs() <= 1e-9 * (1.0 + a.statistic.abs()));
        }
    }

    #[test]
    fn indicator_prototype_recovers_the_matrix(seed in any::<u64>(), n in 1usize..15) {
        let d = common::random_dissimilarity(&mut common::rng(seed), n, false);
        for j in 0..n {
            let mut beta = vec![0.0; n];
            beta[j] = 1.0;
            for i in 0..n {
                prop_assert_eq!(relational_distance(&d, &beta, i).unwrap(), d.get(i, j));
            }
        }
    }

    #[test]
    fn leaf_order_beats_input_order_and_reverses_freely(seed in any::<u64>(), n in 2usize..30) {
        let d = common::random_dissimilarity(&mut common::rng(seed), n, seed % 3 == 0);
        let tree = agglomerate(&d, Linkage::Average).unwrap();
        let olo = optimal_leaf_order(&tree, &d).unwrap();
        prop_assert!(olo.cost <= path_cost(&d, &tree.input_order()) + 1e-12);
        let reversed: Vec<usize> = olo.order.iter().rev().cloned().collect();
        prop_assert!((path_cost(&d, &reversed) - olo.cost).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn som_prototypes_stay_on_the_simplex(seed in any::<u64>(), n in 2usize..30) {
        let d = common::random_dissimilarity(&mut common::rng(seed), n, false);
        let mut cfg = SomConfig::new(seed);
        cfg.grid_w = 3;
        cfg.grid_h = 2;
        let model = train(&d, &cfg).unwrap();
        prop_assert!(model.simplex_violation() <= 1e-9);
        let back = SomModel::from_json(&model.to_json()).unwrap();
        prop_assert_eq!(back.beta, model.beta);
    }

    #[test]
    fn som_commutes_with_relabelling(seed in any::<u64>(), n in 3usize..20) {
        let d = common::random_dissimilarity(&mut common::rng(seed), n, false);
        let p = permutation(seed ^ 2, n);
        let dp = permuted(&d, &p);
        let mut cfg = SomConfig::new(seed);
        cfg.grid_w = 3;
        cfg.grid_h = 3;
        let units = cfg.units();
        let steps = cfg.iterations_for(n);

        let mut rng = SeededRng::new(seed);
        let init = random_prototypes(units, n, &mut rng);
        let draws: Vec<usize> = (0..steps).map(|_| rng.index(n)).collect();
        let mut init_p = vec![0.0; units * n];
        for u in 0..units {
            for j in 0..n {
                init_p[u * n + p[j]] = init[u * n + j];
            }
        }
        let draws_p: Vec<usize> = draws.iter().map(|&i| p[i]).collect();

        let a = train_from(&d, &cfg, init, draws, |_| {}).unwrap();
        let b = train_from(&dp, &cfg, init_p, draws_p, |_| {}).unwrap();
        for u in 0..units {
            for j in 0..n {
                prop_assert!((a.beta[u * n + j] - b.beta[u * n + p[j]]).abs() <= 1e-9);
            }
        }
    }
}
