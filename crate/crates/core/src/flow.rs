//! Directed transfer-entropy matrices over the 16 channels, dominant-flow
//! selection and DOT rendering.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelId, Kind, CHANNEL_COUNT};
use crate::error::{Error, Result};
use crate::info::{self, Baseline, SymbolSeries, TeConfig};
use crate::recording::{Meta, Recording};
use crate::seeds;

const N: usize = CHANNEL_COUNT;

/// Discretizes every channel once over the whole recording.
pub fn discretize_recording(rec: &Recording, cfg: &TeConfig) -> Result<Vec<SymbolSeries>> {
    cfg.validate()?;
    ChannelId::all()
        .into_iter()
        .map(|ch| Ok(info::discretize(rec.column(ch), cfg.bins, cfg.discretization)?.with_origin(ch)))
        .collect()
}

fn off_diagonal_pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..N).flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Transfer entropy for every ordered channel pair, indexed `(source,
/// destination)` in canonical order. The diagonal is undefined.
#[derive(Debug, Clone)]
pub struct FlowMatrix {
    te: Vec<f64>,
    cfg: TeConfig,
    provenance: Option<Meta>,
}

impl FlowMatrix {
    /// Builds a matrix from explicit values; diagonal entries are ignored.
    pub fn from_values(values: [[f64; N]; N], cfg: TeConfig, provenance: Option<Meta>) -> Result<Self> {
        let mut te = vec![f64::NAN; N * N];
        for (i, j) in off_diagonal_pairs() {
            let v = values[i][j];
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("entry ({i},{j}) = {v} is not a finite non-negative value")));
            }
            te[i * N + j] = v;
        }
        Ok(FlowMatrix { te, cfg, provenance })
    }

    pub fn get(&self, source: ChannelId, destination: ChannelId) -> Option<f64> {
        self.get_index(source.index(), destination.index())
    }

    pub fn get_index(&self, i: usize, j: usize) -> Option<f64> {
        (i != j).then(|| self.te[i * N + j])
    }

    pub fn cfg(&self) -> &TeConfig {
        &self.cfg
    }

    pub fn provenance(&self) -> Option<&Meta> {
        self.provenance.as_ref()
    }

    /// Sum over all 240 defined entries.
    pub fn total_mass(&self) -> f64 {
        off_diagonal_pairs().map(|(i, j)| self.te[i * N + j]).sum()
    }

    /// Destination with the largest flow out of `source`; ties go to the
    /// earlier channel.
    pub fn strongest_target(&self, source: ChannelId) -> ChannelId {
        let i = source.index();
        let mut best = None::<(usize, f64)>;
        for j in (0..N).filter(|&j| j != i) {
            let v = self.te[i * N + j];
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((j, v));
            }
        }
        ChannelId::from_index(best.expect("15 candidates").0)
    }

    /// 17x17 CSV: channel names on the first row and column, `NA` on the
    /// diagonal.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        let names: Vec<String> = ChannelId::all().iter().map(|c| c.name()).collect();
        writeln!(w, ",{}", names.join(","))?;
        for (i, name) in names.iter().enumerate() {
            let mut line = name.clone();
            for j in 0..N {
                line.push(',');
                match self.get_index(i, j) {
                    Some(v) => line.push_str(&v.to_string()),
                    None => line.push_str("NA"),
                }
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R, cfg: TeConfig) -> Result<Self> {
        let names: Vec<String> = ChannelId::all().iter().map(|c| c.name()).collect();
        let mut values = [[0.0; N]; N];
        let mut row = None::<usize>;
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse_err = |msg: String| Error::Parse { line: lineno, msg };
            if fields.len() != N + 1 {
                return Err(parse_err(format!("expected {} fields, got {}", N + 1, fields.len())));
            }
            match row {
                None => {
                    if !fields[0].is_empty() || fields[1..] != names.iter().map(String::as_str).collect::<Vec<_>>()[..] {
                        return Err(parse_err("unexpected flow matrix header".into()));
                    }
                    row = Some(0);
                }
                Some(i) if i < N => {
                    if fields[0] != names[i] {
                        return Err(parse_err(format!("expected row {}", names[i])));
                    }
                    for j in 0..N {
                        if i == j {
                            if fields[j + 1] != "NA" {
                                return Err(parse_err("diagonal must be NA".into()));
                            }
                        } else {
                            values[i][j] = fields[j + 1]
                                .parse()
                                .map_err(|_| parse_err(format!("bad number {:?}", fields[j + 1])))?;
                        }
                    }
                    row = Some(i + 1);
                }
                Some(_) => return Err(parse_err("too many rows".into())),
            }
        }
        if row != Some(N) {
            return Err(Error::Parse { line: 0, msg: "flow matrix needs 16 data rows".into() });
        }
        FlowMatrix::from_values(values, cfg, None)
    }
}

impl PartialEq for FlowMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.cfg == other.cfg
            && self.provenance == other.provenance
            && off_diagonal_pairs().all(|(i, j)| self.te[i * N + j].to_bits() == other.te[i * N + j].to_bits())
    }
}

/// Computes all 240 ordered-pair transfer entropies. Each entry is evaluated
/// independently, so the result does not depend on thread scheduling.
pub fn te_matrix(rec: &Recording, cfg: &TeConfig) -> Result<FlowMatrix> {
    let series = discretize_recording(rec, cfg)?;
    te_matrix_from_series(&series, cfg, Some(rec.meta().clone()))
}

pub fn te_matrix_from_series(series: &[SymbolSeries], cfg: &TeConfig, provenance: Option<Meta>) -> Result<FlowMatrix> {
    if series.len() != N {
        return Err(Error::BadChannelCount { expected: N, got: series.len() });
    }
    let pairs: Vec<(usize, usize)> = off_diagonal_pairs().collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| info::transfer_entropy(&series[i], &series[j], cfg))
        .collect::<Result<Vec<f64>>>()?;
    let mut te = vec![f64::NAN; N * N];
    for (&(i, j), v) in pairs.iter().zip(values) {
        te[i * N + j] = v;
    }
    Ok(FlowMatrix { te, cfg: *cfg, provenance })
}

/// How per-pair surrogate distributions turn into significance thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Correction {
    /// Each pair is compared with the 95th percentile of its own surrogates.
    PerPair,
    /// Each pair is compared with the 95th percentile of the per-round
    /// maximum over all pairs, which bounds the family-wise false-positive
    /// rate at 5% across the 240 tests.
    #[default]
    MaxStatistic,
}

/// Surrogate baselines for every ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineMatrix {
    pairs: Vec<Option<Baseline>>,
    family: Baseline,
    correction: Correction,
}

impl BaselineMatrix {
    pub fn pair(&self, source: ChannelId, destination: ChannelId) -> Option<Baseline> {
        self.pairs[source.index() * N + destination.index()]
    }

    /// Null distribution of the largest flow in the matrix.
    pub fn family(&self) -> Baseline {
        self.family
    }

    pub fn correction(&self) -> Correction {
        self.correction
    }

    /// Value a flow must exceed to count as significant.
    pub fn threshold(&self, source: ChannelId, destination: ChannelId) -> Option<f64> {
        match self.correction {
            Correction::PerPair => self.pair(source, destination).map(|b| b.q95),
            Correction::MaxStatistic => (source != destination).then_some(self.family.q95),
        }
    }
}

/// Circular-shift surrogates for every pair. Pair `(i, j)` draws its shift
/// offsets from the substream `surrogate/pair/i/j` of `root_seed`.
pub fn surrogate_matrix(
    rec: &Recording,
    cfg: &TeConfig,
    n_surrogates: usize,
    root_seed: u64,
    correction: Correction,
) -> Result<BaselineMatrix> {
    let series = discretize_recording(rec, cfg)?;
    surrogate_matrix_from_series(&series, cfg, n_surrogates, root_seed, correction)
}

pub fn surrogate_matrix_from_series(
    series: &[SymbolSeries],
    cfg: &TeConfig,
    n_surrogates: usize,
    root_seed: u64,
    correction: Correction,
) -> Result<BaselineMatrix> {
    if n_surrogates < info::surrogate::MIN_SURROGATES {
        return Err(Error::InvalidArgument(format!(
            "need at least {} surrogates, got {n_surrogates}",
            info::surrogate::MIN_SURROGATES
        )));
    }
    let pairs: Vec<(usize, usize)> = off_diagonal_pairs().collect();
    let draws = pairs
        .par_iter()
        .map(|&(i, j)| {
            let seed = seeds::substream(root_seed, &format!("surrogate/pair/{i}/{j}"));
            let offsets = info::shift_offsets(series[i].len(), n_surrogates, seed)?;
            offsets
                .into_iter()
                .map(|off| info::transfer_entropy(&info::circular_shift(&series[i], off), &series[j], cfg))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let mut baselines = vec![None; N * N];
    let mut round_max = vec![0.0f64; n_surrogates];
    for (&(i, j), values) in pairs.iter().zip(&draws) {
        for (m, &v) in round_max.iter_mut().zip(values) {
            *m = m.max(v);
        }
        baselines[i * N + j] = Some(summarize(values.clone()));
    }
    Ok(BaselineMatrix { pairs: baselines, family: summarize(round_max), correction })
}

fn summarize(mut values: Vec<f64>) -> Baseline {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Baseline { mean, q95: info::surrogate::q95(&mut values) }
}

/// Source-kind to destination-kind pattern used to hide flows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowPattern {
    pub source: Kind,
    pub destination: Kind,
    /// Only match when both channels belong to the same leg.
    pub same_leg: bool,
}

impl FlowPattern {
    pub fn matches(&self, source: ChannelId, destination: ChannelId) -> bool {
        source.kind == self.source
            && destination.kind == self.destination
            && (!self.same_leg || source.leg == destination.leg)
    }

    /// Same-leg motor-to-hip flows, which trivially dominate every gait.
    pub fn panel_cd() -> Vec<FlowPattern> {
        vec![FlowPattern { source: Kind::Motor, destination: Kind::Hip, same_leg: true }]
    }

    /// Resolves a named preset (`none` or `panel-CD`).
    pub fn preset(name: &str) -> Result<Vec<FlowPattern>> {
        match name {
            "none" => Ok(Vec::new()),
            "panel-CD" | "panel-cd" => Ok(FlowPattern::panel_cd()),
            other => Err(Error::InvalidArgument(format!("unknown exclusion preset {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub source: ChannelId,
    pub destination: ChannelId,
    pub bits: f64,
    pub significant: bool,
}

/// Top-`k` flows by size after dropping `exclude` matches. Ties keep
/// canonical `(source, destination)` order. With `baseline`, a flow is
/// significant iff it exceeds its threshold; without, every flow is.
pub fn select_flows(
    fm: &FlowMatrix,
    k: usize,
    exclude: &[FlowPattern],
    baseline: Option<&BaselineMatrix>,
) -> Vec<Flow> {
    let mut flows: Vec<Flow> = off_diagonal_pairs()
        .map(|(i, j)| (ChannelId::from_index(i), ChannelId::from_index(j)))
        .filter(|&(s, d)| !exclude.iter().any(|p| p.matches(s, d)))
        .map(|(source, destination)| {
            let bits = fm.get(source, destination).expect("off-diagonal");
            let significant = match baseline {
                Some(b) => b.threshold(source, destination).is_some_and(|q| bits > q),
                None => true,
            };
            Flow { source, destination, bits, significant }
        })
        .collect();
    // stable sort keeps canonical order among equal values
    flows.sort_by(|a, b| b.bits.total_cmp(&a.bits));
    flows.truncate(k);
    flows
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DotStyle {
    pub min_penwidth: f64,
    pub max_penwidth: f64,
}

impl Default for DotStyle {
    fn default() -> Self {
        DotStyle { min_penwidth: 1.0, max_penwidth: 8.0 }
    }
}

/// Renders flows as a DOT digraph. Every channel is declared as a node;
/// edge width and gray level scale linearly with bits across the list.
pub fn export_dot(flows: &[Flow], style: &DotStyle) -> String {
    export_dot_with_comments(flows, style, &[])
}

pub fn export_dot_with_comments(flows: &[Flow], style: &DotStyle, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "// {c}");
    }
    out.push_str("digraph flows {\n");
    for ch in ChannelId::all() {
        let _ = writeln!(out, "  \"{ch}\";");
    }
    let lo = flows.iter().map(|f| f.bits).fold(f64::INFINITY, f64::min);
    let hi = flows.iter().map(|f| f.bits).fold(f64::NEG_INFINITY, f64::max);
    for f in flows {
        // a single value (or all equal) maps to the top of the range
        let t = if hi > lo { (f.bits - lo) / (hi - lo) } else { 1.0 };
        let pen = style.min_penwidth + t * (style.max_penwidth - style.min_penwidth);
        let gray = (70.0 - 70.0 * t).round() as u32;
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{:.3}\", penwidth={:.3}, color=\"gray{}\"{}];",
            f.source,
            f.destination,
            f.bits,
            pen,
            gray,
            if f.significant { "" } else { ", style=dashed" }
        );
    }
    out.push_str("}\n");
    out
}
