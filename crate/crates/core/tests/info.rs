use proptest::prelude::*;
use puppyflow_core::info::oracle::te_oracle;
use puppyflow_core::info::{
    discretize, entropy, joint_entropy, mutual_information, transfer_entropy, Discretization, SymbolSeries,
};
use puppyflow_core::TeConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn series(v: Vec<u32>, m: u32) -> SymbolSeries {
    SymbolSeries::new(v, m).unwrap()
}

fn random_series(rng: &mut ChaCha8Rng, n: usize, m: u32) -> SymbolSeries {
    series((0..n).map(|_| rng.random_range(0..m)).collect(), m)
}

#[test]
fn oracle_agrees_on_random_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let m = rng.random_range(2..=4);
        let k = rng.random_range(1..=2);
        let lag = rng.random_range(1..=2);
        let n = rng.random_range(20..=300);
        let cfg = TeConfig { bins: m, history_k: k, lag, ..TeConfig::default() };
        let src = random_series(&mut rng, n, m);
        // mix of independent and coupled destinations
        let dst = if case % 2 == 0 {
            random_series(&mut rng, n, m)
        } else {
            let s = src.symbols();
            series((0..n).map(|t| if t >= lag && rng.random_bool(0.7) { s[t - lag] } else { rng.random_range(0..m) }).collect(), m)
        };
        let fast = transfer_entropy(&src, &dst, &cfg).unwrap();
        let slow = te_oracle(&src, &dst, &cfg).unwrap();
        assert!((fast - slow).abs() <= 1e-12, "case {case}: {fast} vs {slow} (n={n} m={m} k={k} lag={lag})");
    }
}

#[test]
fn analytic_anchors() {
    let cyc = series((0..800).map(|i| i % 8).collect(), 8);
    assert_eq!(entropy(&cyc).unwrap(), 3.0);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_series(&mut rng, 100_000, 4);
    let mut b = vec![0; 100_000];
    b[1..].copy_from_slice(&a.symbols()[..99_999]);
    let b = series(b, 4);
    let te = transfer_entropy(&a, &b, &TeConfig { bins: 4, ..TeConfig::default() }).unwrap();
    assert!((1.95..=2.0).contains(&te), "{te}");
    assert_eq!(transfer_entropy(&a, &a.clone(), &TeConfig { bins: 4, ..TeConfig::default() }).unwrap(), 0.0);
}

fn symbols(max_m: u32) -> impl Strategy<Value = (Vec<u32>, Vec<u32>, u32)> {
    (2..=max_m).prop_flat_map(|m| {
        (20usize..200).prop_flat_map(move |n| (prop::collection::vec(0..m, n), prop::collection::vec(0..m, n), Just(m)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measures_are_bounded((x, y, m) in symbols(5), k in 1usize..=2) {
        let (x, y) = (series(x, m), series(y, m));
        let h = entropy(&x).unwrap();
        prop_assert!(h >= 0.0 && h <= (m as f64).log2() + 1e-12);
        let mi = mutual_information(&x, &y).unwrap();
        prop_assert!(mi >= 0.0 && mi <= h.min(entropy(&y).unwrap()) + 1e-9);
        let cfg = TeConfig { bins: m, history_k: k, ..TeConfig::default() };
        let te = transfer_entropy(&x, &y, &cfg).unwrap();
        prop_assert!(te >= 0.0 && te <= (m as f64).log2() + 1e-9);
    }

    #[test]
    fn mi_chain_identity((x, y, m) in symbols(5)) {
        let (x, y) = (series(x, m), series(y, m));
        let lhs = mutual_information(&x, &y).unwrap();
        let rhs = entropy(&x).unwrap() + entropy(&y).unwrap() - joint_entropy(&x, &y).unwrap();
        prop_assert!((lhs - rhs.max(0.0)).abs() <= 1e-12);
    }

    #[test]
    fn relabeling_leaves_measures_unchanged((x, y, m) in symbols(4), seed in any::<u64>()) {
        let (x, y) = (series(x, m), series(y, m));
        let mut perm: Vec<u32> = (0..m).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let (px, py) = (x.relabel(&perm).unwrap(), y.relabel(&perm).unwrap());
        prop_assert!((entropy(&x).unwrap() - entropy(&px).unwrap()).abs() < 1e-12);
        prop_assert!((mutual_information(&x, &y).unwrap() - mutual_information(&px, &py).unwrap()).abs() < 1e-12);
        let cfg = TeConfig { bins: m, ..TeConfig::default() };
        prop_assert!((transfer_entropy(&x, &y, &cfg).unwrap() - transfer_entropy(&px, &py, &cfg).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn equal_frequency_is_balanced(values in prop::collection::vec(-1e3f64..1e3, 10..300), m in 2u32..8) {
        let s = discretize(&values, m, Discretization::EqualFrequency).unwrap();
        let mut counts = vec![0usize; m as usize];
        for &v in s.symbols() {
            counts[v as usize] += 1;
        }
        let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
        prop_assert!(hi - lo <= 1);
    }

    #[test]
    fn equal_width_keeps_order(values in prop::collection::vec(-1e3f64..1e3, 2..300), m in 2u32..8) {
        let s = discretize(&values, m, Discretization::EqualWidth).unwrap();
        for i in 0..values.len() {
            for j in 0..values.len() {
                if values[i] < values[j] {
                    prop_assert!(s.symbols()[i] <= s.symbols()[j]);
                }
            }
        }
    }
}
