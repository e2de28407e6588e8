//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use puppyflow_core::classify::{evaluate, generate_corpus, shuffled_control, spearman, ClassifyConfig, Corpus, CorpusSpec, Mode};
use puppyflow_core::flow::{select_flows, surrogate_matrix, te_matrix, Correction, FlowPattern};
use puppyflow_core::info::oracle::te_oracle;
use puppyflow_core::info::{entropy, transfer_entropy};
use puppyflow_core::seeds::substream;
use puppyflow_core::sim::{noise_episode, run_episode, BodyParams, SimConfig};
use puppyflow_core::tracking::{entropy_comparison, tracking_demo, CameraMode, TargetMotion, TrackingConfig};
use puppyflow_core::{ChannelId, FlowMatrix, Kind, Leg, SymbolSeries, TeConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const ROOT: u64 = 20_240_601;
const SEEDS: usize = 20;

type Check = fn() -> (bool, String);

fn main() {
    let checks: [(u32, &str, Check); 9] = [
        (1, "estimator correctness (analytic)", c1_analytic),
        (2, "oracle equivalence", c2_oracle),
        (3, "babble: motor->own hip, hind > front knee", c3_babble),
        (4, "gait magnitude and discrimination", c4_gaits),
        (5, "rubber attenuates bound-right flow", c5_ground),
        (6, "terrain classification (panel G)", c6_classify),
        (7, "tracking lowers visual entropy", c7_tracking),
        (8, "negative control on i.i.d. noise", c8_noise),
        (9, "reproduce-box1 byte-identical", c9_reproduce),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        let t = Instant::now();
        let (pass, detail) = match std::panic::catch_unwind(check) {
            Ok(r) => r,
            Err(_) => (false, "panicked".to_string()),
        };
        failed += !pass as usize;
        println!(
            "criterion {id} [{name}]: {} ({detail}; {:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn seed(tag: &str, i: usize) -> u64 {
    substream(ROOT, &format!("acceptance/{tag}/{i}"))
}

fn episode(gait: &str, ground: &str, seed: u64) -> FlowMatrix {
    let cfg = SimConfig::named(gait, ground, 60.0, seed).unwrap();
    te_matrix(&run_episode(&cfg).unwrap(), &TeConfig::default()).unwrap()
}

fn ch(leg: Leg, kind: Kind) -> ChannelId {
    ChannelId::new(leg, kind)
}

fn c1_analytic() -> (bool, String) {
    let uniform = SymbolSeries::new((0..8000).map(|i| i % 8).collect(), 8).unwrap();
    let h = entropy(&uniform).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(ROOT);
    let a: Vec<u32> = (0..100_000).map(|_| rng.random_range(0..4)).collect();
    let mut b = vec![0; a.len()];
    b[1..].copy_from_slice(&a[..a.len() - 1]);
    let cfg = TeConfig { bins: 4, ..TeConfig::default() };
    let (sa, sb) = (SymbolSeries::new(a, 4).unwrap(), SymbolSeries::new(b, 4).unwrap());
    let te = transfer_entropy(&sa, &sb, &cfg).unwrap();
    let copy = transfer_entropy(&sa, &sa.clone(), &cfg).unwrap();

    let pass = h == 3.0 && (1.95..=2.0).contains(&te) && copy == 0.0;
    (pass, format!("H(uniform8) = {h}, TE(delayed copy) = {te:.4}, TE(A->A) = {copy}"))
}

fn c2_oracle() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(substream(ROOT, "acceptance/oracle"));
    let mut worst = 0.0f64;
    for case in 0..200 {
        let m = rng.random_range(2..=4u32);
        let cfg = TeConfig { bins: m, history_k: rng.random_range(1..=2), lag: rng.random_range(1..=3), ..TeConfig::default() };
        let n = rng.random_range(cfg.min_len() + 1..=300);
        let src: Vec<u32> = (0..n).map(|_| rng.random_range(0..m)).collect();
        let dst: Vec<u32> = (0..n)
            .map(|t| if case % 2 == 1 && t >= cfg.lag && rng.random_bool(0.6) { src[t - cfg.lag] } else { rng.random_range(0..m) })
            .collect();
        let (s, d) = (SymbolSeries::new(src, m).unwrap(), SymbolSeries::new(dst, m).unwrap());
        let diff = (transfer_entropy(&s, &d, &cfg).unwrap() - te_oracle(&s, &d, &cfg).unwrap()).abs();
        worst = worst.max(diff);
    }
    (worst <= 1e-12, format!("200 instances, max |fast - oracle| = {worst:.2e}"))
}

fn c3_babble() -> (bool, String) {
    let results: Vec<(bool, bool)> = (0..SEEDS)
        .into_par_iter()
        .map(|i| {
            let fm = episode("babble", "foil", seed("c3", i));
            let hips = Leg::ALL.iter().all(|&l| fm.strongest_target(ch(l, Kind::Motor)) == ch(l, Kind::Hip));
            let mk = |l| fm.get(ch(l, Kind::Motor), ch(l, Kind::Knee)).unwrap();
            let hind = (mk(Leg::HL) + mk(Leg::HR)) / 2.0;
            let front = (mk(Leg::FL) + mk(Leg::FR)) / 2.0;
            (hips, hind > front)
        })
        .collect();
    let hips = results.iter().filter(|r| r.0).count();
    let hind = results.iter().filter(|r| r.1).count();
    let pass = hips * 100 >= 95 * SEEDS && hind * 100 >= 90 * SEEDS;
    (pass, format!("motor->own hip strongest for all legs in {hips}/{SEEDS}, hind > front motor->knee in {hind}/{SEEDS}"))
}

fn c4_gaits() -> (bool, String) {
    let ex = FlowPattern::panel_cd();
    let results: Vec<(bool, bool, bool)> = (0..SEEDS)
        .into_par_iter()
        .map(|i| {
            let s = seed("c4", i);
            let top = |fm: &FlowMatrix| {
                let f = select_flows(fm, 12, &ex, None);
                (f.iter().map(|f| f.bits).sum::<f64>() / f.len() as f64, (f[0].source, f[0].destination))
            };
            let (bab, _) = top(&episode("babble", "foil", s));
            let (br, br_top) = top(&episode("bound-right", "foil", s));
            let (tl, tl_top) = top(&episode("turn-left", "foil", s));
            (br > bab, tl > bab, br_top != tl_top)
        })
        .collect();
    let br = results.iter().filter(|r| r.0).count();
    let tl = results.iter().filter(|r| r.1).count();
    let differ = results.iter().filter(|r| r.2).count();
    let ok = |c: usize| c * 100 >= 90 * SEEDS;
    (
        ok(br) && ok(tl) && ok(differ),
        format!("top-12 mean > babble: bound-right {br}/{SEEDS}, turn-left {tl}/{SEEDS}; top flow differs {differ}/{SEEDS}"),
    )
}

fn c5_ground() -> (bool, String) {
    let drops = (0..SEEDS)
        .into_par_iter()
        .filter(|&i| {
            let s = seed("c5", i);
            episode("bound-right", "rubber", s).total_mass() < episode("bound-right", "foil", s).total_mass()
        })
        .count();
    (drops * 100 >= 90 * SEEDS, format!("total TE rubber < foil in {drops}/{SEEDS}"))
}

fn c6_classify() -> (bool, String) {
    let recs = generate_corpus(&CorpusSpec::default(), substream(ROOT, "acceptance/corpus"), &BodyParams::default()).unwrap();
    let cfg = ClassifyConfig { fold_seed: substream(ROOT, "acceptance/folds"), ..ClassifyConfig::default() };
    let corpus = Corpus::new(recs, cfg.folds, cfg.fold_seed).unwrap();
    let pooled = evaluate(&corpus, Mode::Pooled, &cfg).unwrap();
    let per_gait = evaluate(&corpus, Mode::PerGait, &cfg).unwrap();
    let control = shuffled_control(&corpus, Mode::PerGait, 1, &cfg, substream(ROOT, "acceptance/shuffle")).unwrap();

    let gap = per_gait.row(Mode::PerGait, 1).unwrap().mean_acc - pooled.row(Mode::Pooled, 1).unwrap().mean_acc;
    let hist: Vec<f64> = per_gait.rows.iter().map(|r| r.history_n as f64).collect();
    let acc: Vec<f64> = per_gait.rows.iter().map(|r| r.mean_acc).collect();
    let rho = spearman(&hist, &acc);
    let best_ok = pooled.rows.iter().chain(&per_gait.rows).all(|r| r.best_acc >= r.mean_acc);
    let chance = 1.0 / corpus.grounds().len() as f64;
    let control_ok = (control.mean_acc - chance).abs() <= 0.1;

    let table: Vec<String> = pooled
        .rows
        .iter()
        .zip(&per_gait.rows)
        .map(|(p, g)| format!("n={}: pooled {:.3} per-gait {:.3}", p.history_n, p.mean_acc, g.mean_acc))
        .collect();
    (
        gap >= 0.05 && rho >= 0.8 && best_ok && control_ok,
        format!(
            "per-gait - pooled at n=1 = {:.1} pp, spearman = {rho:.2}, best >= mean: {best_ok}, shuffled = {:.3}; {}",
            gap * 100.0,
            control.mean_acc,
            table.join(", ")
        ),
    )
}

fn c7_tracking() -> (bool, String) {
    let seeds: Vec<u64> = (0..SEEDS).map(|i| seed("c7", i)).collect();
    let rows = tracking_demo(&TrackingConfig::default(), &seeds).unwrap();
    let wins = rows.iter().filter(|r| r.h_tracking < r.h_uncorrelated).count();
    let gap = rows.iter().map(|r| r.gap_bits).sum::<f64>() / rows.len() as f64;

    let still = TrackingConfig { motion: TargetMotion::Sinusoid { amp: 0.0, freq: 0.0 }, gain: 1.0, ..TrackingConfig::default() };
    let perfect = entropy_comparison(&still, &still.with_mode(CameraMode::Uncorrelated)).unwrap().h_tracking;

    let pass = wins * 100 >= 95 * SEEDS && gap >= 0.5 && perfect == 0.0;
    (pass, format!("h_tracking < h_uncorrelated in {wins}/{SEEDS}, mean gap {gap:.3} bits, perfect tracking {perfect} bits"))
}

fn c8_noise() -> (bool, String) {
    let cfg = TeConfig::default();
    let clean = (0..SEEDS)
        .into_par_iter()
        .filter(|&i| {
            let s = seed("c8", i);
            let rec = noise_episode(3000, 0.02, s).unwrap();
            let fm = te_matrix(&rec, &cfg).unwrap();
            let base = surrogate_matrix(&rec, &cfg, 100, s, Correction::MaxStatistic).unwrap();
            select_flows(&fm, 240, &[], Some(&base)).iter().all(|f| !f.significant)
        })
        .count();
    (clean * 100 >= 90 * SEEDS, format!("no significant flow in {clean}/{SEEDS} noise recordings"))
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn c9_reproduce() -> (bool, String) {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let dir = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_puppyflow"))
            .args(["reproduce-box1", "--seed", &ROOT.to_string(), "--out"])
            .arg(&dir)
            .status()
            .unwrap();
        assert!(status.success(), "reproduce-box1 exited with {status}");
        tree(&dir)
    };
    let (a, b) = (run("a"), run("b"));
    let dots = a.keys().filter(|k| k.ends_with(".dot")).count();
    let panel_g = a.contains_key("panelG.csv");
    let pass = a == b && dots == 9 && panel_g;
    (pass, format!("{} files, {dots} DOT graphs, panelG.csv present: {panel_g}, identical: {}", a.len(), a == b))
}
