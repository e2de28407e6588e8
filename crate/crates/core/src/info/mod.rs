//! Plug-in information measures over discretized channels.
//!
//! All quantities are in bits. Estimators take [`SymbolSeries`] values,
//! which are produced from real-valued channels by [`discretize`].

mod discretize;
mod entropy;
pub mod oracle;
pub(crate) mod surrogate;
mod te;

use serde::{Deserialize, Serialize};

use crate::channels::ChannelId;
use crate::error::{Error, Result};

pub use discretize::{discretize, BinEdges};
pub use entropy::{entropy, joint_entropy, mutual_information};
pub use surrogate::{circular_shift, shift_offsets, surrogate_baseline, Baseline};
pub use te::{transfer_entropy, JointHistogram};

/// Negative values within this distance of zero are rounding noise.
pub const NEG_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discretization {
    #[default]
    EqualFrequency,
    EqualWidth,
}

/// A discretized channel: symbols in `[0, alphabet)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSeries {
    symbols: Vec<u32>,
    alphabet: u32,
    origin: Option<ChannelId>,
}

impl SymbolSeries {
    pub fn new(symbols: Vec<u32>, alphabet: u32) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidArgument("alphabet size must be positive".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= alphabet) {
            return Err(Error::SymbolOutOfRange { symbol: s, alphabet });
        }
        Ok(SymbolSeries { symbols, alphabet, origin: None })
    }

    pub fn with_origin(mut self, origin: ChannelId) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn origin(&self) -> Option<ChannelId> {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Applies a relabeling `map[s]` to every symbol.
    pub fn relabel(&self, map: &[u32]) -> Result<Self> {
        if map.len() != self.alphabet as usize {
            return Err(Error::LengthMismatch(self.alphabet as usize, map.len()));
        }
        let alphabet = map.iter().map(|&m| m + 1).max().unwrap_or(0).max(self.alphabet);
        let symbols = self.symbols.iter().map(|&s| map[s as usize]).collect();
        Ok(SymbolSeries { symbols, alphabet, origin: self.origin })
    }
}

/// Estimator settings for transfer entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeConfig {
    pub bins: u32,
    /// Embedding length used for both source and destination histories.
    pub history_k: usize,
    /// Prediction horizon in samples.
    pub lag: usize,
    pub discretization: Discretization,
}

impl Default for TeConfig {
    fn default() -> Self {
        TeConfig { bins: 5, history_k: 1, lag: 1, discretization: Discretization::EqualFrequency }
    }
}

impl TeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::InvalidArgument(format!("bins must be >= 2, got {}", self.bins)));
        }
        if self.history_k < 1 {
            return Err(Error::InvalidArgument("history_k must be >= 1".into()));
        }
        if self.lag < 1 {
            return Err(Error::InvalidArgument("lag must be >= 1".into()));
        }
        Ok(())
    }

    /// Shortest series the estimator accepts.
    pub fn min_len(&self) -> usize {
        self.lag + self.history_k + 1
    }
}

pub(crate) fn clamp_bits(v: f64) -> f64 {
    debug_assert!(v > -1e-9, "information estimate far below zero: {v}");
    v.max(0.0)
}
