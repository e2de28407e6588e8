use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use puppyflow_core::classify::{evaluate, generate_corpus, shuffled_control, AccuracyReport, Corpus, Mode};
use puppyflow_core::flow::{
    export_dot_with_comments, select_flows, surrogate_matrix, te_matrix, BaselineMatrix, FlowMatrix, FlowPattern,
};
use puppyflow_core::recording::sidecar_path;
use puppyflow_core::seeds::substream;
use puppyflow_core::sim::{run_episode, GaitSpec, Ground, SimConfig};
use puppyflow_core::tracking::{tracking_demo, write_demo_csv};
use puppyflow_core::{Recording, TeConfig, CHANNEL_COUNT};
use rayon::prelude::*;

use crate::output::{provenance, Outputs};
use crate::{display, CliError, Command, ExperimentConfig};

pub fn dispatch(command: Command, mut cfg: ExperimentConfig) -> Result<(), CliError> {
    match command {
        Command::Simulate { gait, ground, duration, out } => {
            set(&mut cfg.sim.gait, gait);
            set(&mut cfg.sim.ground, ground);
            set(&mut cfg.sim.duration_s, duration);
            simulate(&cfg, &out)
        }
        Command::Te { input, bins, history_k, lag, out } => {
            set(&mut cfg.te.bins, bins);
            set(&mut cfg.te.history_k, history_k);
            set(&mut cfg.te.lag, lag);
            te(&cfg, &input, &out)
        }
        Command::Flows { input, top, exclude, surrogates, bins, dot } => {
            set(&mut cfg.te.top_k, top);
            set(&mut cfg.te.exclude, exclude);
            set(&mut cfg.te.surrogates, surrogates);
            set(&mut cfg.te.bins, bins);
            flows(&cfg, &input, &dot)
        }
        Command::Classify { corpus, mode, history, folds, out } => {
            set(&mut cfg.classify.history, history);
            set(&mut cfg.classify.folds, folds);
            classify(&cfg, corpus.as_deref(), &mode, &out)
        }
        Command::TrackDemo { seeds, gain, steps, out } => {
            set(&mut cfg.tracking.seeds, seeds);
            set(&mut cfg.tracking.gain, gain);
            set(&mut cfg.tracking.steps, steps);
            track_demo(&cfg, &out)
        }
        Command::GenCorpus { episodes, duration, out } => {
            set(&mut cfg.classify.episodes_per_cell, episodes);
            set(&mut cfg.classify.duration_s, duration);
            gen_corpus(&cfg, &out)
        }
        Command::ReproduceBox1 { episodes, duration, out } => {
            set(&mut cfg.classify.episodes_per_cell, episodes);
            set(&mut cfg.classify.duration_s, duration);
            set(&mut cfg.out_dir, out);
            reproduce_box1(&cfg)
        }
    }
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn sim_config(cfg: &ExperimentConfig) -> Result<SimConfig, CliError> {
    let s = &cfg.sim;
    let mut sim = SimConfig::new(GaitSpec::named(&s.gait)?, Ground::named(&s.ground)?, s.duration_s, cfg.seed);
    sim.dt = s.dt;
    sim.body = s.body.clone();
    Ok(sim)
}

fn te_config(cfg: &ExperimentConfig) -> Result<TeConfig, CliError> {
    let te = cfg.te.te_config();
    te.validate()?;
    Ok(te)
}

fn recording_csv(rec: &Recording, comments: &[String]) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    rec.write_csv(&mut out, comments)?;
    Ok(out)
}

fn sidecar_json(rec: &Recording) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(&rec.sidecar()).expect("sidecar serializes");
    v.push(b'\n');
    v
}

fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let rec = run_episode(&sim_config(cfg)?)?;
    let mut comments = provenance(cfg, "simulate");
    comments.push(format!("gait {} ground {}", cfg.sim.gait, cfg.sim.ground));
    let mut files = Outputs::new();
    files.add(out, recording_csv(&rec, &comments)?);
    files.add(sidecar_path(out), sidecar_json(&rec));
    files.commit()
}

fn load_recording(path: &Path) -> Result<Recording, CliError> {
    Recording::load(path).map_err(|e| CliError::Data(format!("{}: {e}", display(path))))
}

fn te(cfg: &ExperimentConfig, input: &Path, out: &Path) -> Result<(), CliError> {
    let te_cfg = te_config(cfg)?;
    let rec = load_recording(input)?;
    let fm = te_matrix(&rec, &te_cfg)?;
    let mut comments = provenance(cfg, "te");
    comments.push(format!("input {}", display(input)));
    comments.push(format!("bins {} history_k {} lag {}", te_cfg.bins, te_cfg.history_k, te_cfg.lag));
    let mut bytes = Vec::new();
    fm.write_csv(&mut bytes, &comments)?;
    let mut files = Outputs::new();
    files.add(out, bytes);
    files.commit()
}

/// True when the first non-comment line is a recording header.
fn is_recording(path: &Path) -> Result<bool, CliError> {
    let f = fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", display(path))))?;
    for line in BufReader::new(f).lines() {
        let line = line.map_err(|e| CliError::Data(format!("{}: {e}", display(path))))?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        return Ok(line.starts_with("t,"));
    }
    Err(CliError::Data(format!("{}: empty file", display(path))))
}

fn flows(cfg: &ExperimentConfig, input: &Path, dot: &Path) -> Result<(), CliError> {
    let te_cfg = te_config(cfg)?;
    let exclude = FlowPattern::preset(&cfg.te.exclude)?;
    let (fm, baseline) = if is_recording(input)? {
        let rec = load_recording(input)?;
        let fm = te_matrix(&rec, &te_cfg)?;
        let baseline = significance(cfg, &rec, &te_cfg, "flows/surrogates")?;
        (fm, baseline)
    } else {
        let f = fs::File::open(input).map_err(|e| CliError::Data(format!("{}: {e}", display(input))))?;
        (FlowMatrix::read_csv(BufReader::new(f), te_cfg)?, None)
    };
    let selected = select_flows(&fm, cfg.te.top_k, &exclude, baseline.as_ref());
    let mut comments = provenance(cfg, "flows");
    comments.push(format!("input {}", display(input)));
    comments.push(format!("top {} exclude {}", cfg.te.top_k, cfg.te.exclude));
    let mut files = Outputs::new();
    files.add(dot, export_dot_with_comments(&selected, &cfg.te.dot_style(), &comments).into_bytes());
    files.commit()
}

fn significance(cfg: &ExperimentConfig, rec: &Recording, te_cfg: &TeConfig, stream: &str) -> Result<Option<BaselineMatrix>, CliError> {
    if cfg.te.surrogates == 0 {
        return Ok(None);
    }
    let seed = substream(cfg.seed, stream);
    Ok(Some(surrogate_matrix(rec, te_cfg, cfg.te.surrogates, seed, cfg.te.correction)?))
}

fn load_corpus_dir(dir: &Path) -> Result<Vec<Recording>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Data(format!("{}: {e}", display(dir))))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Data(format!("{}: no recordings", display(dir))));
    }
    paths.par_iter().map(|p| load_recording(p)).collect()
}

fn corpus_for(cfg: &ExperimentConfig, dir: Option<&Path>) -> Result<Corpus, CliError> {
    let recs = match dir {
        Some(d) => load_corpus_dir(d)?,
        None => generate_corpus(&cfg.classify.corpus_spec(), cfg.seed, &cfg.sim.body)?,
    };
    let ccfg = cfg.classify.classify_config(cfg.seed);
    let corpus = Corpus::new(recs, ccfg.folds, ccfg.fold_seed)?;
    if corpus.grounds().len() < 2 {
        eprintln!("warning: corpus has a single ground label; the classifier will always predict it");
    }
    Ok(corpus)
}

fn modes(mode: &str) -> Vec<Mode> {
    match mode {
        "pooled" => vec![Mode::Pooled],
        "per-gait" => vec![Mode::PerGait],
        _ => vec![Mode::Pooled, Mode::PerGait],
    }
}

fn report(corpus: &Corpus, cfg: &ExperimentConfig, modes: &[Mode]) -> Result<AccuracyReport, CliError> {
    let ccfg = cfg.classify.classify_config(cfg.seed);
    let mut rep = AccuracyReport::default();
    for &m in modes {
        rep.rows.extend(evaluate(corpus, m, &ccfg)?.rows);
    }
    Ok(rep)
}

fn classify(cfg: &ExperimentConfig, corpus_dir: Option<&Path>, mode: &str, out: &Path) -> Result<(), CliError> {
    let corpus = corpus_for(cfg, corpus_dir)?;
    let rep = report(&corpus, cfg, &modes(mode))?;
    let mut comments = provenance(cfg, "classify");
    comments.push(match corpus_dir {
        Some(d) => format!("corpus {}", display(d)),
        None => "corpus generated".to_string(),
    });
    let mut bytes = Vec::new();
    rep.write_csv(&mut bytes, &comments)?;
    let mut files = Outputs::new();
    files.add(out, bytes);
    files.commit()
}

fn track_demo(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let seeds: Vec<u64> = (0..cfg.tracking.seeds).map(|i| substream(cfg.seed, &format!("tracking/run/{i}"))).collect();
    let rows = tracking_demo(&cfg.tracking.base(), &seeds)?;
    let mut bytes = Vec::new();
    write_demo_csv(&rows, &mut bytes, &provenance(cfg, "track-demo"))?;
    let mut files = Outputs::new();
    files.add(out, bytes);
    files.commit()
}

/// File stem of corpus episode `i` of a cell.
fn episode_stem(gait: &str, ground: &str, i: usize) -> String {
    format!("{gait}_{ground}_{i:03}")
}

fn gen_corpus(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let spec = cfg.classify.corpus_spec();
    let recs = generate_corpus(&spec, cfg.seed, &cfg.sim.body)?;
    let comments = provenance(cfg, "gen-corpus");
    let mut files = Outputs::new();
    let mut it = recs.iter();
    for gait in &spec.gaits {
        for ground in &spec.grounds {
            for i in 0..spec.episodes_per_cell {
                let rec = it.next().expect("one recording per cell episode");
                let path = out.join(format!("{}.csv", episode_stem(gait, ground, i)));
                files.add(sidecar_path(&path), sidecar_json(rec));
                files.add(path, recording_csv(rec, &comments)?);
            }
        }
    }
    files.commit()
}

/// Mean of the TE matrices of several recordings.
fn mean_matrix(recs: &[&Recording], te_cfg: &TeConfig) -> Result<FlowMatrix, CliError> {
    let matrices = recs.par_iter().map(|r| te_matrix(r, te_cfg)).collect::<Result<Vec<_>, _>>()?;
    let mut values = [[0.0; CHANNEL_COUNT]; CHANNEL_COUNT];
    for (i, row) in values.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j {
                *v = matrices.iter().map(|m| m.get_index(i, j).unwrap()).sum::<f64>() / matrices.len() as f64;
            }
        }
    }
    Ok(FlowMatrix::from_values(values, *te_cfg, None)?)
}

/// Runs the standard corpus through flow analysis and classification.
///
/// Each (gait, ground) cell yields the mean TE matrix over its episodes and
/// a DOT graph of its top flows: all flows for babble (panel B), motor→hip
/// excluded for the gaits (panels C–F). Significance is judged against the
/// surrogates of the cell's first episode.
fn reproduce_box1(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let te_cfg = te_config(cfg)?;
    let spec = cfg.classify.corpus_spec();
    let recs = generate_corpus(&spec, cfg.seed, &cfg.sim.body)?;
    let out = &cfg.out_dir;
    let base_comments = provenance(cfg, "reproduce-box1");
    let mut files = Outputs::new();

    let per_cell = spec.episodes_per_cell;
    let mut cell = 0;
    for gait in &spec.gaits {
        for ground in &spec.grounds {
            let members: Vec<&Recording> = recs[cell * per_cell..(cell + 1) * per_cell].iter().collect();
            cell += 1;
            let fm = mean_matrix(&members, &te_cfg)?;
            let stream = format!("box1/surrogates/{gait}/{ground}");
            let baseline = match members.first() {
                Some(first) => significance(cfg, first, &te_cfg, &stream)?,
                None => None,
            };
            let (preset, exclude) = if gait == "babble" {
                ("none", Vec::new())
            } else {
                ("panel-CD", FlowPattern::panel_cd())
            };
            let selected = select_flows(&fm, cfg.te.top_k, &exclude, baseline.as_ref());
            let mut comments = base_comments.clone();
            comments.push(format!("gait {gait} ground {ground} episodes {per_cell} top {} exclude {preset}", cfg.te.top_k));
            files.add(
                out.join(format!("{gait}_{ground}.dot")),
                export_dot_with_comments(&selected, &cfg.te.dot_style(), &comments).into_bytes(),
            );
            let mut csv = Vec::new();
            fm.write_csv(&mut csv, &comments)?;
            files.add(out.join(format!("te_{gait}_{ground}.csv")), csv);
        }
    }

    let ccfg = cfg.classify.classify_config(cfg.seed);
    let corpus = Corpus::new(recs, ccfg.folds, ccfg.fold_seed)?;
    let rep = report(&corpus, cfg, &[Mode::Pooled, Mode::PerGait])?;
    let mut csv = Vec::new();
    rep.write_csv(&mut csv, &base_comments)?;
    files.add(out.join("panelG.csv"), csv);

    let control = shuffled_control(&corpus, Mode::PerGait, 1, &ccfg, substream(cfg.seed, "classify/shuffle"))?;
    let mut comments = base_comments.clone();
    comments.push("negative control: ground labels permuted across examples".into());
    let mut csv = Vec::new();
    AccuracyReport { rows: vec![control] }.write_csv(&mut csv, &comments)?;
    files.add(out.join("panelG_control.csv"), csv);

    let manifest = serde_json::json!({
        "tool": "puppyflow",
        "version": crate::VERSION,
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "config": cfg,
        "files": files.paths().map(|p| p.strip_prefix(out).unwrap_or(p).display().to_string()).collect::<Vec<_>>(),
    });
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    files.add(out.join("manifest.json"), bytes);
    files.commit()
}
