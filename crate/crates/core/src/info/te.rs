use crate::error::{Error, Result};

use super::{clamp_bits, SymbolSeries, TeConfig};

/// Counts over `(b_next, b_hist, a_hist)` where the histories are the
/// `history_k` most recent symbols packed into a single index.
#[derive(Debug, Clone)]
pub struct JointHistogram {
    next_states: usize,
    dst_states: usize,
    src_states: usize,
    counts: Vec<u64>,
    total: u64,
}

fn pack(window: &[u32], base: u64) -> usize {
    window.iter().fold(0u64, |acc, &s| acc * base + s as u64) as usize
}

impl JointHistogram {
    pub fn build(src: &SymbolSeries, dst: &SymbolSeries, cfg: &TeConfig) -> Result<Self> {
        cfg.validate()?;
        if src.len() != dst.len() {
            return Err(Error::LengthMismatch(src.len(), dst.len()));
        }
        let n = src.len();
        if n < cfg.min_len() {
            return Err(Error::SeriesTooShort { needed: cfg.min_len(), got: n });
        }
        let k = cfg.history_k;
        let mb = dst.alphabet() as u64;
        let ma = src.alphabet() as u64;
        let dst_states = checked_pow(mb, k)?;
        let src_states = checked_pow(ma, k)?;
        let next_states = mb as usize;
        let cells = next_states
            .checked_mul(dst_states)
            .and_then(|c| c.checked_mul(src_states))
            .filter(|&c| c <= 1 << 26)
            .ok_or_else(|| Error::InvalidArgument("joint state space too large".into()))?;
        let mut counts = vec![0u64; cells];
        let (a, b) = (src.symbols(), dst.symbols());
        let mut total = 0;
        for t in (k - 1)..(n - cfg.lag) {
            let bn = b[t + cfg.lag] as usize;
            let bh = pack(&b[t + 1 - k..=t], mb);
            let ah = pack(&a[t + 1 - k..=t], ma);
            counts[(bn * dst_states + bh) * src_states + ah] += 1;
            total += 1;
        }
        Ok(JointHistogram { next_states, dst_states, src_states, counts, total })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, b_next: usize, b_hist: usize, a_hist: usize) -> u64 {
        self.counts[(b_next * self.dst_states + b_hist) * self.src_states + a_hist]
    }

    /// Sums out the source history: counts over `(b_next, b_hist)`.
    pub fn next_and_dst(&self) -> Vec<u64> {
        self.counts.chunks(self.src_states).map(|c| c.iter().sum()).collect()
    }

    /// Sums out the future symbol: counts over `(b_hist, a_hist)`.
    pub fn dst_and_src(&self) -> Vec<u64> {
        let plane = self.dst_states * self.src_states;
        let mut out = vec![0u64; plane];
        for chunk in self.counts.chunks(plane) {
            for (o, c) in out.iter_mut().zip(chunk) {
                *o += c;
            }
        }
        out
    }

    /// Counts over `b_hist` alone.
    pub fn dst_only(&self) -> Vec<u64> {
        self.dst_and_src().chunks(self.src_states).map(|c| c.iter().sum()).collect()
    }

    /// Transfer entropy in bits, not clamped.
    pub fn transfer_entropy_raw(&self) -> f64 {
        let nb = self.next_and_dst();
        let ba = self.dst_and_src();
        let b = self.dst_only();
        let n = self.total as f64;
        let mut te = 0.0;
        for next in 0..self.next_states {
            for bh in 0..self.dst_states {
                let c_nb = nb[next * self.dst_states + bh];
                if c_nb == 0 {
                    continue;
                }
                for ah in 0..self.src_states {
                    let c = self.count(next, bh, ah);
                    if c == 0 {
                        continue;
                    }
                    let c_ba = ba[bh * self.src_states + ah];
                    let ratio = (c as f64 * b[bh] as f64) / (c_ba as f64 * c_nb as f64);
                    te += c as f64 * ratio.log2();
                }
            }
        }
        te / n
    }
}

fn checked_pow(base: u64, exp: usize) -> Result<usize> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| Error::InvalidArgument("history state space too large".into()))
}

/// Transfer entropy from `src` to `dst` in bits, clamped at zero.
pub fn transfer_entropy(src: &SymbolSeries, dst: &SymbolSeries, cfg: &TeConfig) -> Result<f64> {
    Ok(clamp_bits(JointHistogram::build(src, dst, cfg)?.transfer_entropy_raw()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize, m: u32, seed: u64) -> SymbolSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SymbolSeries::new((0..n).map(|_| rng.random_range(0..m)).collect(), m).unwrap()
    }

    #[test]
    fn self_transfer_is_exactly_zero() {
        let a = uniform(2000, 5, 1);
        for k in 1..=3 {
            let cfg = TeConfig { history_k: k, ..TeConfig::default() };
            assert_eq!(transfer_entropy(&a, &a, &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn delayed_copy_approaches_log2_alphabet() {
        let a = uniform(100_000, 4, 2);
        let mut b = vec![0u32; a.len()];
        b[1..].copy_from_slice(&a.symbols()[..a.len() - 1]);
        let b = SymbolSeries::new(b, 4).unwrap();
        let te = transfer_entropy(&a, &b, &TeConfig::default()).unwrap();
        assert!((1.95..=2.0).contains(&te), "te = {te}");
    }

    #[test]
    fn marginals_are_consistent() {
        let a = uniform(500, 3, 5);
        let b = uniform(500, 4, 6);
        let cfg = TeConfig { history_k: 2, lag: 2, ..TeConfig::default() };
        let h = JointHistogram::build(&a, &b, &cfg).unwrap();
        assert_eq!(h.total(), (500 - 2 - 1) as u64);
        assert_eq!(h.next_and_dst().iter().sum::<u64>(), h.total());
        assert_eq!(h.dst_and_src().iter().sum::<u64>(), h.total());
        assert_eq!(h.dst_only().iter().sum::<u64>(), h.total());
        assert_eq!(h.dst_only().len(), 16);
    }

    #[test]
    fn errors() {
        let a = uniform(10, 3, 1);
        let b = uniform(9, 3, 1);
        assert!(matches!(transfer_entropy(&a, &b, &TeConfig::default()), Err(Error::LengthMismatch(10, 9))));
        let short = uniform(2, 3, 1);
        assert!(matches!(
            transfer_entropy(&short, &short, &TeConfig::default()),
            Err(Error::SeriesTooShort { needed: 3, got: 2 })
        ));
        let bad = TeConfig { lag: 0, ..TeConfig::default() };
        assert!(transfer_entropy(&a, &a, &bad).is_err());
    }
}
