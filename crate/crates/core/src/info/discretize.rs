use crate::error::{Error, Result};

use super::{Discretization, SymbolSeries};

/// Maps a real series onto `bins` symbols.
///
/// Equal-frequency binning ranks samples by `(value, index)` and assigns
/// rank `r` to bin `r * bins / n`, so occupancies differ by at most one.
/// Equal-width binning splits `[min, max]` into uniform intervals with the
/// maximum in the top bin. A constant series maps to symbol 0 either way.
pub fn discretize(series: &[f64], bins: u32, method: Discretization) -> Result<SymbolSeries> {
    if bins < 2 {
        return Err(Error::InvalidArgument(format!("bins must be >= 2, got {bins}")));
    }
    if let Some(v) = series.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sample {v}")));
    }
    let n = series.len();
    match method {
        Discretization::EqualFrequency => {
            if n < bins as usize {
                return Err(Error::TooFewSamples { needed: bins as usize, got: n });
            }
            if is_constant(series) {
                return SymbolSeries::new(vec![0; n], bins);
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| series[a].total_cmp(&series[b]).then(a.cmp(&b)));
            let mut symbols = vec![0u32; n];
            for (rank, &idx) in order.iter().enumerate() {
                symbols[idx] = (rank as u64 * bins as u64 / n as u64) as u32;
            }
            SymbolSeries::new(symbols, bins)
        }
        Discretization::EqualWidth => {
            if n == 0 {
                return Err(Error::TooFewSamples { needed: 1, got: 0 });
            }
            let (lo, hi) = min_max(series);
            let edges = BinEdges::equal_width(lo, hi, bins);
            SymbolSeries::new(series.iter().map(|&x| edges.assign(x)).collect(), bins)
        }
    }
}

fn is_constant(series: &[f64]) -> bool {
    series.windows(2).all(|w| w[0] == w[1])
}

fn min_max(series: &[f64]) -> (f64, f64) {
    series.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Explicit interior bin boundaries, for binning several series identically.
///
/// A value `x` lands in the bin equal to the number of edges `<= x`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinEdges {
    bins: u32,
    edges: Vec<f64>,
}

impl BinEdges {
    /// Uniform intervals over `[lo, hi]`. A zero-width range sends every
    /// value to bin 0.
    pub fn equal_width(lo: f64, hi: f64, bins: u32) -> Self {
        assert!(bins >= 1);
        if !(hi > lo) {
            return BinEdges { bins, edges: Vec::new() };
        }
        let width = hi - lo;
        let edges = (1..bins).map(|j| lo + width * j as f64 / bins as f64).collect();
        BinEdges { bins, edges }
    }

    /// Quantile boundaries estimated from `values` (any order).
    pub fn equal_frequency(values: &[f64], bins: u32) -> Result<Self> {
        if bins < 2 {
            return Err(Error::InvalidArgument(format!("bins must be >= 2, got {bins}")));
        }
        if values.len() < bins as usize {
            return Err(Error::TooFewSamples { needed: bins as usize, got: values.len() });
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        if sorted[0] == sorted[n - 1] {
            return Ok(BinEdges { bins, edges: Vec::new() });
        }
        let edges = (1..bins as usize).map(|j| sorted[j * n / bins as usize]).collect();
        Ok(BinEdges { bins, edges })
    }

    pub fn bins(&self) -> u32 {
        self.bins
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn assign(&self, x: f64) -> u32 {
        self.edges.partition_point(|&e| e <= x) as u32
    }

    pub fn apply(&self, series: &[f64]) -> SymbolSeries {
        SymbolSeries::new(series.iter().map(|&x| self.assign(x)).collect(), self.bins)
            .expect("edge assignment stays inside the alphabet")
    }
}
