//! Brute-force transfer entropy used as a cross-check for the main
//! estimator. It shares no code with it: states are kept as explicit
//! symbol tuples in an ordered map and every conditional probability is
//! re-derived by scanning the table.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{SymbolSeries, TeConfig};

type Key = (u32, Vec<u32>, Vec<u32>);

/// Reference transfer entropy in bits. Quadratic in the number of distinct
/// joint states; meant for small inputs.
pub fn te_oracle(src: &SymbolSeries, dst: &SymbolSeries, cfg: &TeConfig) -> Result<f64> {
    if cfg.history_k == 0 || cfg.lag == 0 {
        return Err(Error::InvalidArgument("history_k and lag must be >= 1".into()));
    }
    if src.len() != dst.len() {
        return Err(Error::LengthMismatch(src.len(), dst.len()));
    }
    let n = src.len();
    let needed = cfg.lag + cfg.history_k + 1;
    if n < needed {
        return Err(Error::SeriesTooShort { needed, got: n });
    }
    let (a, b) = (src.symbols(), dst.symbols());
    let k = cfg.history_k;

    let mut table: BTreeMap<Key, f64> = BTreeMap::new();
    let mut total = 0.0;
    let mut t = k - 1;
    while t + cfg.lag < n {
        let key = (b[t + cfg.lag], b[t + 1 - k..=t].to_vec(), a[t + 1 - k..=t].to_vec());
        *table.entry(key).or_insert(0.0) += 1.0;
        total += 1.0;
        t += 1;
    }

    let mut sum = 0.0;
    for ((next, bh, ah), count) in &table {
        let p_joint = count / total;
        let mut p_hist_both = 0.0;
        let mut p_next_hist = 0.0;
        let mut p_hist = 0.0;
        for ((n2, bh2, ah2), c2) in &table {
            if bh2 == bh {
                p_hist += c2 / total;
                if ah2 == ah {
                    p_hist_both += c2 / total;
                }
                if n2 == next {
                    p_next_hist += c2 / total;
                }
            }
        }
        let cond_full = p_joint / p_hist_both;
        let cond_dst = p_next_hist / p_hist;
        sum += p_joint * (cond_full / cond_dst).log2();
    }
    Ok(sum.max(0.0))
}
