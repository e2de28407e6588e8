use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{te::JointHistogram, transfer_entropy, SymbolSeries, TeConfig};

/// Null-distribution summary for one source/destination pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub mean: f64,
    pub q95: f64,
}

/// Minimum number of surrogates accepted by [`surrogate_baseline`].
pub const MIN_SURROGATES: usize = 20;

/// Draws `count` circular-shift offsets in `[ceil(n/8), n - ceil(n/8)]`.
pub fn shift_offsets(n: usize, count: usize, seed: u64) -> Result<Vec<usize>> {
    let lo = n.div_ceil(8);
    if n < 2 || lo > n - lo {
        return Err(Error::SeriesTooShort { needed: 2, got: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| rng.random_range(lo..=n - lo)).collect())
}

/// `out[t] = series[(t + offset) mod n]`.
pub fn circular_shift(series: &SymbolSeries, offset: usize) -> SymbolSeries {
    let s = series.symbols();
    let n = s.len();
    let mut out = Vec::with_capacity(n);
    if n > 0 {
        let k = offset % n;
        out.extend_from_slice(&s[k..]);
        out.extend_from_slice(&s[..k]);
    }
    let shifted = SymbolSeries::new(out, series.alphabet()).expect("same alphabet");
    match series.origin() {
        Some(o) => shifted.with_origin(o),
        None => shifted,
    }
}

/// Nearest-rank 95th percentile of `values` (which it sorts).
pub(crate) fn q95(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let rank = (0.95 * values.len() as f64).ceil() as usize;
    values[rank.clamp(1, values.len()) - 1]
}

/// Transfer entropy under `n_surrogates` circular shifts of `src`.
///
/// Shifting the source destroys any coupling to `dst` while keeping both
/// marginals and the source's own dynamics, so the result estimates the
/// estimator's bias floor for this pair.
pub fn surrogate_baseline(
    src: &SymbolSeries,
    dst: &SymbolSeries,
    cfg: &TeConfig,
    n_surrogates: usize,
    seed: u64,
) -> Result<Baseline> {
    if n_surrogates < MIN_SURROGATES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SURROGATES} surrogates, got {n_surrogates}"
        )));
    }
    // validates lengths and config up front
    JointHistogram::build(src, dst, cfg)?;
    let offsets = shift_offsets(src.len(), n_surrogates, seed)?;
    let mut values = offsets
        .into_iter()
        .map(|off| transfer_entropy(&circular_shift(src, off), dst, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(Baseline { mean, q95: q95(&mut values) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize, m: u32, seed: u64) -> SymbolSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SymbolSeries::new((0..n).map(|_| rng.random_range(0..m)).collect(), m).unwrap()
    }

    #[test]
    fn offsets_in_range_and_deterministic() {
        let a = shift_offsets(100, 500, 9).unwrap();
        assert_eq!(a, shift_offsets(100, 500, 9).unwrap());
        assert!(a.iter().all(|&o| (13..=87).contains(&o)));
        assert!(a.contains(&13) && a.contains(&87));
        assert!(shift_offsets(1, 5, 0).is_err());
    }

    #[test]
    fn shift_rotates() {
        let s = SymbolSeries::new(vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(circular_shift(&s, 1).symbols(), &[1, 2, 3, 0]);
        assert_eq!(circular_shift(&s, 4).symbols(), s.symbols());
    }

    #[test]
    fn nearest_rank_quantile() {
        let mut v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(q95(&mut v), 95.0);
        let mut v: Vec<f64> = (1..=20).rev().map(|i| i as f64).collect();
        assert_eq!(q95(&mut v), 19.0);
    }

    #[test]
    fn constant_channels_have_zero_baseline() {
        let c = SymbolSeries::new(vec![0; 400], 5).unwrap();
        let b = surrogate_baseline(&c, &c, &TeConfig::default(), 50, 3).unwrap();
        assert_eq!(b, Baseline { mean: 0.0, q95: 0.0 });
    }

    #[test]
    fn iid_bias_reference_figure() {
        // frozen from a single run; guards the surrogate schedule and estimator
        let a = uniform(500, 3, 100);
        let b = uniform(500, 3, 200);
        let cfg = TeConfig { bins: 3, ..TeConfig::default() };
        let base = surrogate_baseline(&a, &b, &cfg, 100, 1).unwrap();
        assert!(base.q95 > 0.0);
        assert!(base.mean > 0.0);
        assert_eq!(base, surrogate_baseline(&a, &b, &cfg, 100, 1).unwrap());
        let expected = IID_Q95_REFERENCE;
        assert!((base.q95 - expected).abs() < 1e-12, "q95 = {:.17}", base.q95);
    }

    const IID_Q95_REFERENCE: f64 = 0.03170355458593305;

    #[test]
    fn too_few_surrogates() {
        let a = uniform(100, 3, 1);
        assert!(surrogate_baseline(&a, &a, &TeConfig::default(), 19, 0).is_err());
    }
}
