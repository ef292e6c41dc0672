use gepup_core::bench::dorfler_mark;
use proptest::prelude::*;

/// Exhaustive answers over all subsets: the minimal-cardinality set reaching
/// `θ_R · total` (largest sum among those), then the maximal-cardinality
/// subset of the remaining elements within `θ_C · total` (smallest sum).
struct Oracle {
    refine_card: usize,
    refine_best: Vec<usize>,
    coarsen_card: usize,
    coarsen_best: Vec<usize>,
}

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

fn oracle(eta: &[f64], theta_r: f64, theta_c: f64, refine: &[usize]) -> Oracle {
    let n = eta.len();
    let total: f64 = eta.iter().sum();
    let sum = |m: u32| members(m, n).iter().map(|&i| eta[i]).sum::<f64>();
    let mut refine_card = usize::MAX;
    let mut refine_sum = f64::NEG_INFINITY;
    let mut refine_best = Vec::new();
    for m in 0u32..(1 << n) {
        let (c, s) = (m.count_ones() as usize, sum(m));
        if s >= theta_r * total && (c < refine_card || (c == refine_card && s > refine_sum)) {
            refine_card = c;
            refine_sum = s;
            refine_best = members(m, n);
        }
    }
    let forbidden: u32 = refine.iter().map(|&i| 1u32 << i).sum();
    let mut coarsen_card = 0;
    let mut coarsen_sum = 0.0;
    let mut coarsen_best = Vec::new();
    for m in 0u32..(1 << n) {
        if m & forbidden != 0 {
            continue;
        }
        let (c, s) = (m.count_ones() as usize, sum(m));
        if s <= theta_c * total && (c > coarsen_card || (c == coarsen_card && s < coarsen_sum)) {
            coarsen_card = c;
            coarsen_sum = s;
            coarsen_best = members(m, n);
        }
    }
    Oracle {
        refine_card,
        refine_best,
        coarsen_card,
        coarsen_best,
    }
}

fn distinct(eta: &[f64]) -> bool {
    let mut v = eta.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2).all(|w| w[0] != w[1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn greedy_marking_matches_subset_enumeration(
        eta in prop::collection::vec(0.0f64..1.0, 1..=12),
        theta_r in 0.05f64..0.95,
        theta_c in 0.05f64..0.95,
    ) {
        let got = dorfler_mark(&eta, theta_r, theta_c).unwrap();
        let o = oracle(&eta, theta_r, theta_c, &got.refine);
        prop_assert_eq!(got.refine.len(), o.refine_card);
        prop_assert_eq!(got.coarsen.len(), o.coarsen_card);
        prop_assert!(got.refine.iter().all(|i| !got.coarsen.contains(i)));
        if distinct(&eta) {
            prop_assert_eq!(&got.refine, &o.refine_best);
            prop_assert_eq!(&got.coarsen, &o.coarsen_best);
        }
    }

    #[test]
    fn integer_indicators_with_ties_keep_optimal_cardinality(
        eta in prop::collection::vec(0u8..4, 1..=10),
        theta_r in 0.05f64..0.95,
        theta_c in 0.05f64..0.95,
    ) {
        let eta: Vec<f64> = eta.into_iter().map(f64::from).collect();
        let got = dorfler_mark(&eta, theta_r, theta_c).unwrap();
        if eta.iter().sum::<f64>() == 0.0 {
            prop_assert!(got.refine.is_empty() && got.coarsen.is_empty());
        } else {
            let o = oracle(&eta, theta_r, theta_c, &got.refine);
            prop_assert_eq!(got.refine.len(), o.refine_card);
            prop_assert_eq!(got.coarsen.len(), o.coarsen_card);
        }
    }
}

#[test]
fn indicator_scaling_does_not_change_marking() {
    let eta = [0.3, 0.05, 0.9, 0.2, 0.45, 0.1];
    let a = dorfler_mark(&eta, 0.5, 0.2).unwrap();
    let scaled: Vec<f64> = eta.iter().map(|v| v * 1024.0).collect();
    assert_eq!(a, dorfler_mark(&scaled, 0.5, 0.2).unwrap());
}
