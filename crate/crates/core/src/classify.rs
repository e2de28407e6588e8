//! Ground classification from sensorimotor epochs.
//!
//! Each example is a window of `history_n` consecutive epochs from one
//! episode. Every channel is discretized, histogrammed per epoch, and the
//! histograms are concatenated. A nearest-centroid classifier then either
//! sees every gait at once (pooled) or is trained per gait, with test
//! examples routed by their known gait (per-gait).
//!
//! Bin edges are fitted on the training episodes of each model, so absolute
//! signal levels survive discretization and test data never influences
//! the binning.

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelId, CHANNEL_COUNT};
use crate::error::{Error, Result};
use crate::info::BinEdges;
use crate::recording::{Epoch, Recording, DEFAULT_EPOCH_LEN};
use crate::seeds;
use crate::sim::{run_episode, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Pooled,
    PerGait,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Pooled => "pooled",
            Mode::PerGait => "per-gait",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pooled" => Ok(Mode::Pooled),
            "per-gait" => Ok(Mode::PerGait),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?}"))),
        }
    }
}

/// Where the histogram bin edges come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureBinning {
    /// Equal-frequency edges fitted on the training episodes of each model.
    #[default]
    Training,
    /// Equal-frequency edges of each episode on its own. Every episode then
    /// has near-uniform marginals, which hides level differences between
    /// grounds.
    Episode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    /// Histogram bins per channel.
    pub bins: u32,
    /// Samples per epoch.
    pub epoch_len: usize,
    pub folds: usize,
    pub fold_seed: u64,
    pub history_lengths: Vec<usize>,
    pub binning: FeatureBinning,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig { bins: 5, epoch_len: DEFAULT_EPOCH_LEN, folds: 5, fold_seed: 0, history_lengths: vec![1, 2, 4, 8], binning: FeatureBinning::Training }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::InvalidArgument("bins must be at least 2".into()));
        }
        if self.epoch_len == 0 || self.folds < 2 {
            return Err(Error::InvalidArgument("need epoch_len >= 1 and folds >= 2".into()));
        }
        if self.history_lengths.is_empty() || self.history_lengths.contains(&0) {
            return Err(Error::InvalidArgument("history lengths must be non-empty and positive".into()));
        }
        Ok(())
    }
}

/// Per-channel bin edges.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEdges(Vec<BinEdges>);

impl ChannelEdges {
    /// Equal-frequency edges over all samples of the given recordings.
    pub fn fit(recs: &[&Recording], bins: u32) -> Result<Self> {
        if recs.is_empty() {
            return Err(Error::EmptySeries);
        }
        let edges = ChannelId::all()
            .into_iter()
            .map(|ch| {
                let pooled: Vec<f64> = recs.iter().flat_map(|r| r.column(ch).iter().copied()).collect();
                BinEdges::equal_frequency(&pooled, bins)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelEdges(edges))
    }

    /// Edges from a single full episode.
    pub fn episode(rec: &Recording, bins: u32) -> Result<Self> {
        ChannelEdges::fit(&[rec], bins)
    }

    pub fn bins(&self) -> u32 {
        self.0[0].bins()
    }

    pub fn channel(&self, ch: ChannelId) -> &BinEdges {
        &self.0[ch.index()]
    }
}

/// Concatenated per-channel, per-epoch symbol histograms.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    /// Raw counts, laid out epoch-major, then channel, then bin.
    pub counts: Vec<u32>,
    pub history_n: usize,
    pub bins: u32,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Histogram of one channel in one of the concatenated epochs.
    pub fn histogram(&self, epoch: usize, ch: ChannelId) -> &[u32] {
        let m = self.bins as usize;
        let at = (epoch * CHANNEL_COUNT + ch.index()) * m;
        &self.counts[at..at + m]
    }

    /// L1-normalized copy.
    pub fn normalized(&self) -> Vec<f64> {
        let total: u64 = self.counts.iter().map(|&c| c as u64).sum();
        let total = total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// Features of `history_n` consecutive epochs starting with `epoch`.
pub fn epoch_features(epoch: &Epoch, edges: &ChannelEdges, history_n: usize) -> Result<FeatureVector> {
    let rec = epoch.source;
    let needed = history_n * epoch.length;
    if history_n == 0 || epoch.length == 0 {
        return Err(Error::InvalidArgument("history_n and epoch length must be positive".into()));
    }
    if epoch.start_index + needed > rec.rows() {
        return Err(Error::InsufficientHistory { needed, start: epoch.start_index, available: rec.rows() });
    }
    let m = edges.bins() as usize;
    let mut counts = vec![0u32; history_n * CHANNEL_COUNT * m];
    for e in 0..history_n {
        let from = epoch.start_index + e * epoch.length;
        for ch in ChannelId::all() {
            let be = edges.channel(ch);
            let base = (e * CHANNEL_COUNT + ch.index()) * m;
            for &x in &rec.column(ch)[from..from + epoch.length] {
                counts[base + be.assign(x) as usize] += 1;
            }
        }
    }
    Ok(FeatureVector { counts, history_n, bins: edges.bins() })
}

/// Labelled episodes with an episode-level fold plan.
#[derive(Debug, Clone)]
pub struct Corpus {
    episodes: Vec<Recording>,
    grounds: Vec<String>,
    gaits: Vec<String>,
    ground_of: Vec<usize>,
    gait_of: Vec<usize>,
    fold_of: Vec<usize>,
    folds: usize,
}

impl Corpus {
    /// Labels come from each recording's metadata. Folds are assigned per
    /// (ground, gait) cell: the cell's episodes are shuffled with
    /// `fold_seed` and dealt round-robin, so every fold sees every ground
    /// whenever a cell has at least `folds` episodes.
    pub fn new(episodes: Vec<Recording>, folds: usize, fold_seed: u64) -> Result<Corpus> {
        if folds < 2 {
            return Err(Error::InvalidArgument("need at least 2 folds".into()));
        }
        if episodes.is_empty() {
            return Err(Error::Corpus("no episodes".into()));
        }
        let grounds: Vec<String> =
            episodes.iter().map(|r| r.meta().ground.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let gaits: Vec<String> =
            episodes.iter().map(|r| r.meta().gait.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let ground_of: Vec<usize> =
            episodes.iter().map(|r| grounds.iter().position(|g| *g == r.meta().ground).unwrap()).collect();
        let gait_of: Vec<usize> =
            episodes.iter().map(|r| gaits.iter().position(|g| *g == r.meta().gait).unwrap()).collect();

        let mut fold_of = vec![0; episodes.len()];
        for (gi, ground) in grounds.iter().enumerate() {
            for (ai, gait) in gaits.iter().enumerate() {
                let mut cell: Vec<usize> =
                    (0..episodes.len()).filter(|&e| ground_of[e] == gi && gait_of[e] == ai).collect();
                let mut rng = seeds::substream_rng(fold_seed, &format!("folds/{gait}/{ground}"));
                cell.shuffle(&mut rng);
                for (i, e) in cell.into_iter().enumerate() {
                    fold_of[e] = i % folds;
                }
            }
        }
        Ok(Corpus { episodes, grounds, gaits, ground_of, gait_of, fold_of, folds })
    }

    pub fn episodes(&self) -> &[Recording] {
        &self.episodes
    }

    pub fn grounds(&self) -> &[String] {
        &self.grounds
    }

    pub fn gaits(&self) -> &[String] {
        &self.gaits
    }

    pub fn folds(&self) -> usize {
        self.folds
    }

    pub fn fold_of(&self, episode: usize) -> usize {
        self.fold_of[episode]
    }

    pub fn ground_of(&self, episode: usize) -> usize {
        self.ground_of[episode]
    }

    pub fn gait_of(&self, episode: usize) -> usize {
        self.gait_of[episode]
    }

    pub fn train_episodes(&self, fold: usize) -> Vec<usize> {
        (0..self.episodes.len()).filter(|&e| self.fold_of[e] != fold).collect()
    }

    pub fn test_episodes(&self, fold: usize) -> Vec<usize> {
        (0..self.episodes.len()).filter(|&e| self.fold_of[e] == fold).collect()
    }
}

/// Size of a generated corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSpec {
    pub gaits: Vec<String>,
    pub grounds: Vec<String>,
    pub episodes_per_cell: usize,
    pub duration_s: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            gaits: vec!["babble".into(), "turn-left".into(), "bound-right".into()],
            grounds: vec!["foil".into(), "styrofoam".into(), "rubber".into()],
            episodes_per_cell: 20,
            duration_s: 60.0,
        }
    }
}

/// Simulates every (gait, ground, episode) cell of `spec`. Episode seeds are
/// named substreams of `root_seed`, so any cell can be regenerated alone.
pub fn generate_corpus(spec: &CorpusSpec, root_seed: u64, body: &crate::sim::BodyParams) -> Result<Vec<Recording>> {
    let mut cells = Vec::new();
    for gait in &spec.gaits {
        for ground in &spec.grounds {
            for i in 0..spec.episodes_per_cell {
                cells.push((gait.as_str(), ground.as_str(), i));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(gait, ground, i)| {
            let seed = seeds::substream(root_seed, &format!("corpus/{gait}/{ground}/{i}"));
            let mut cfg = SimConfig::named(gait, ground, spec.duration_s, seed)?;
            cfg.body = body.clone();
            run_episode(&cfg)
        })
        .collect()
}

/// Nearest-centroid classifier over L1-normalized features, using squared
/// Euclidean distance. Ties go to the lowest label.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestCentroid {
    labels: Vec<usize>,
    centroids: Vec<Vec<f64>>,
}

impl NearestCentroid {
    pub fn fit(examples: &[(Vec<f64>, usize)]) -> Result<Self> {
        let Some(dim) = examples.first().map(|(x, _)| x.len()) else {
            return Err(Error::Corpus("no training examples".into()));
        };
        let labels: Vec<usize> = examples.iter().map(|(_, y)| *y).collect::<BTreeSet<_>>().into_iter().collect();
        let mut sums = vec![vec![0.0; dim]; labels.len()];
        let mut counts = vec![0usize; labels.len()];
        for (x, y) in examples {
            let li = labels.binary_search(y).unwrap();
            counts[li] += 1;
            for (s, v) in sums[li].iter_mut().zip(x) {
                *s += v;
            }
        }
        for (s, &c) in sums.iter_mut().zip(&counts) {
            s.iter_mut().for_each(|v| *v /= c as f64);
        }
        Ok(NearestCentroid { labels, centroids: sums })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// A model that saw a single class always predicts it.
    pub fn is_single_class(&self) -> bool {
        self.labels.len() == 1
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let mut best = (f64::INFINITY, self.labels[0]);
        for (c, &label) in self.centroids.iter().zip(&self.labels) {
            let d: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.0 {
                best = (d, label);
            }
        }
        best.1
    }
}

#[derive(Debug, Clone)]
struct SubModel {
    /// `None` when every episode is binned on its own.
    edges: Option<ChannelEdges>,
    bins: u32,
    classifier: NearestCentroid,
}

/// A trained ground classifier: one sub-model (pooled) or one per gait.
#[derive(Debug, Clone)]
pub struct Model {
    mode: Mode,
    history_n: usize,
    epoch_len: usize,
    /// Indexed by gait label; a pooled model has a single entry.
    subs: Vec<Option<SubModel>>,
}

impl Model {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn sub_models(&self) -> usize {
        self.subs.iter().flatten().count()
    }

    /// True when some sub-model only ever saw one ground.
    pub fn has_single_class(&self) -> bool {
        self.subs.iter().flatten().any(|s| s.classifier.is_single_class())
    }

    /// Predicts the ground label of the window starting at epoch number
    /// `start_epoch` of `rec`, whose gait label is `gait`.
    pub fn predict(&self, rec: &Recording, gait: usize, start_epoch: usize) -> Result<usize> {
        let sub = match self.mode {
            Mode::Pooled => self.subs[0].as_ref(),
            Mode::PerGait => self.subs.get(gait).and_then(|s| s.as_ref()),
        }
        .ok_or_else(|| Error::UnknownGait(format!("gait label {gait} has no sub-model")))?;
        let own;
        let edges = match &sub.edges {
            Some(e) => e,
            None => {
                own = ChannelEdges::episode(rec, sub.bins)?;
                &own
            }
        };
        let epoch = Epoch { source: rec, start_index: start_epoch * self.epoch_len, length: self.epoch_len };
        Ok(sub.classifier.predict(&epoch_features(&epoch, edges, self.history_n)?.normalized()))
    }
}

fn windows(rec: &Recording, epoch_len: usize, history_n: usize) -> usize {
    (rec.rows() / epoch_len + 1).saturating_sub(history_n)
}

/// Window labels for every episode: `labels[episode][window]`.
type Labels = Vec<Vec<usize>>;

fn true_labels(corpus: &Corpus, epoch_len: usize, history_n: usize) -> Labels {
    (0..corpus.episodes.len())
        .map(|e| vec![corpus.ground_of[e]; windows(&corpus.episodes[e], epoch_len, history_n)])
        .collect()
}

fn train_sub(corpus: &Corpus, episodes: &[usize], labels: &Labels, cfg: &ClassifyConfig, history_n: usize) -> Result<SubModel> {
    let recs: Vec<&Recording> = episodes.iter().map(|&e| &corpus.episodes[e]).collect();
    let edges = match cfg.binning {
        FeatureBinning::Training => Some(ChannelEdges::fit(&recs, cfg.bins)?),
        FeatureBinning::Episode => None,
    };
    let mut examples = Vec::new();
    for &e in episodes {
        let rec = &corpus.episodes[e];
        let own = match &edges {
            Some(_) => None,
            None => Some(ChannelEdges::episode(rec, cfg.bins)?),
        };
        let ep_edges = edges.as_ref().or(own.as_ref()).unwrap();
        for (w, &y) in labels[e].iter().enumerate() {
            let epoch = Epoch { source: rec, start_index: w * cfg.epoch_len, length: cfg.epoch_len };
            examples.push((epoch_features(&epoch, ep_edges, history_n)?.normalized(), y));
        }
    }
    Ok(SubModel { edges, bins: cfg.bins, classifier: NearestCentroid::fit(&examples)? })
}

fn train_with(corpus: &Corpus, mode: Mode, episodes: &[usize], labels: &Labels, cfg: &ClassifyConfig, history_n: usize) -> Result<Model> {
    let subs = match mode {
        Mode::Pooled => vec![Some(train_sub(corpus, episodes, labels, cfg, history_n)?)],
        Mode::PerGait => (0..corpus.gaits.len())
            .map(|g| {
                let mine: Vec<usize> = episodes.iter().copied().filter(|&e| corpus.gait_of[e] == g).collect();
                if mine.is_empty() {
                    Ok(None)
                } else {
                    train_sub(corpus, &mine, labels, cfg, history_n).map(Some)
                }
            })
            .collect::<Result<_>>()?,
    };
    Ok(Model { mode, history_n, epoch_len: cfg.epoch_len, subs })
}

/// Trains on the given episodes with their true ground labels.
pub fn train(corpus: &Corpus, mode: Mode, episodes: &[usize], cfg: &ClassifyConfig, history_n: usize) -> Result<Model> {
    cfg.validate()?;
    train_with(corpus, mode, episodes, &true_labels(corpus, cfg.epoch_len, history_n), cfg, history_n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub mode: Mode,
    pub history_n: usize,
    /// Mean over gaits of the per-gait test accuracy.
    pub mean_acc: f64,
    pub best_acc: f64,
    pub best_gait: String,
    pub n_test: usize,
    /// Test accuracy per gait, in corpus gait order.
    pub per_gait: Vec<(String, f64)>,
    /// Test accuracy per fold over all gaits.
    pub per_fold: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AccuracyReport {
    pub rows: Vec<ReportRow>,
}

impl AccuracyReport {
    pub fn row(&self, mode: Mode, history_n: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.mode == mode && r.history_n == history_n)
    }

    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "mode,history_n,mean_acc,best_acc,best_gait,n_test")?;
        for r in &self.rows {
            writeln!(w, "{},{},{:.6},{:.6},{},{}", r.mode.name(), r.history_n, r.mean_acc, r.best_acc, r.best_gait, r.n_test)?;
        }
        Ok(())
    }
}

fn evaluate_with(corpus: &Corpus, mode: Mode, history_n: usize, labels: &Labels, cfg: &ClassifyConfig) -> Result<ReportRow> {
    // (correct, total) per fold and gait
    let per_fold: Vec<Vec<(usize, usize)>> = (0..corpus.folds)
        .into_par_iter()
        .map(|fold| {
            let model = train_with(corpus, mode, &corpus.train_episodes(fold), labels, cfg, history_n)?;
            let mut tally = vec![(0, 0); corpus.gaits.len()];
            for e in corpus.test_episodes(fold) {
                let g = corpus.gait_of[e];
                for (w, &y) in labels[e].iter().enumerate() {
                    let hit = model.predict(&corpus.episodes[e], g, w)? == y;
                    tally[g].0 += hit as usize;
                    tally[g].1 += 1;
                }
            }
            Ok(tally)
        })
        .collect::<Result<_>>()?;

    let acc = |(c, t): (usize, usize)| if t == 0 { f64::NAN } else { c as f64 / t as f64 };
    let per_gait: Vec<(String, f64)> = (0..corpus.gaits.len())
        .map(|g| {
            let sum = per_fold.iter().fold((0, 0), |a, f| (a.0 + f[g].0, a.1 + f[g].1));
            (corpus.gaits[g].clone(), acc(sum))
        })
        .collect();
    let defined: Vec<&(String, f64)> = per_gait.iter().filter(|(_, a)| !a.is_nan()).collect();
    if defined.is_empty() {
        return Err(Error::Corpus("no test examples".into()));
    }
    let mean_acc = defined.iter().map(|(_, a)| a).sum::<f64>() / defined.len() as f64;
    let (best_gait, best_acc) = defined.iter().fold((String::new(), f64::NEG_INFINITY), |b, (g, a)| if *a > b.1 { (g.clone(), *a) } else { b });
    let n_test = per_fold.iter().flatten().map(|t| t.1).sum();
    let per_fold = per_fold.iter().map(|f| acc(f.iter().fold((0, 0), |a, t| (a.0 + t.0, a.1 + t.1)))).collect();
    Ok(ReportRow { mode, history_n, mean_acc, best_acc, best_gait, n_test, per_gait, per_fold })
}

/// Cross-validated accuracy for each history length. "Mean" averages the
/// per-gait accuracies; "best" is the gait with the highest accuracy. For
/// the pooled mode both are computed from the single model's predictions
/// split by gait.
pub fn evaluate(corpus: &Corpus, mode: Mode, cfg: &ClassifyConfig) -> Result<AccuracyReport> {
    cfg.validate()?;
    let rows = cfg
        .history_lengths
        .iter()
        .map(|&n| evaluate_with(corpus, mode, n, &true_labels(corpus, cfg.epoch_len, n), cfg))
        .collect::<Result<_>>()?;
    Ok(AccuracyReport { rows })
}

/// Negative control: ground labels are permuted across all examples before
/// cross-validation, so any accuracy away from chance is an artefact.
pub fn shuffled_control(corpus: &Corpus, mode: Mode, history_n: usize, cfg: &ClassifyConfig, seed: u64) -> Result<ReportRow> {
    cfg.validate()?;
    let mut labels = true_labels(corpus, cfg.epoch_len, history_n);
    let mut flat: Vec<usize> = labels.iter().flatten().copied().collect();
    flat.shuffle(&mut seeds::substream_rng(seed, "classify/shuffle"));
    let mut it = flat.into_iter();
    for l in labels.iter_mut().flatten() {
        *l = it.next().unwrap();
    }
    evaluate_with(corpus, mode, history_n, &labels, cfg)
}

/// Spearman rank correlation with average ranks for ties. Returns NaN when
/// either input is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
