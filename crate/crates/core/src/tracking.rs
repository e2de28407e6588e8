//! One-dimensional active-perception demo.
//!
//! A camera looks at a moving target; the "visual" variable is the target's
//! offset from the camera centre. With closed-loop tracking the camera
//! corrects a fraction `gain` of the offset each step, so the visual
//! variable stays small and ordered. With an uncorrelated camera that
//! moves independently, it wanders over a much wider range.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{entropy, BinEdges};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum TargetMotion {
    /// Gaussian increments with standard deviation `sigma` per step.
    RandomWalk { sigma: f64 },
    /// `amp * sin(2π freq t + φ)` with `freq` in cycles per step and a
    /// phase φ drawn from the motion's own stream.
    Sinusoid { amp: f64, freq: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CameraMode {
    Tracking,
    Uncorrelated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackingConfig {
    pub steps: usize,
    pub motion: TargetMotion,
    pub gain: f64,
    pub mode: CameraMode,
    /// Equal-width bins for the visual variable.
    pub bins: u32,
    pub seed: u64,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        TrackingConfig {
            steps: 2000,
            motion: TargetMotion::RandomWalk { sigma: 0.1 },
            gain: 0.8,
            mode: CameraMode::Tracking,
            bins: 8,
            seed: 0,
        }
    }
}

impl TrackingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.steps < 100 {
            return bad("tracking needs at least 100 steps");
        }
        if !(self.gain >= 0.0 && self.gain.is_finite()) {
            return bad("gain must be finite and >= 0");
        }
        if self.bins < 2 {
            return bad("bins must be at least 2");
        }
        match self.motion {
            TargetMotion::RandomWalk { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => bad("sigma must be >= 0"),
            TargetMotion::Sinusoid { amp, freq } if !(amp >= 0.0 && amp.is_finite() && freq.is_finite()) => {
                bad("amp must be >= 0 and freq finite")
            }
            _ => Ok(()),
        }
    }

    /// Same configuration with a different camera mode.
    pub fn with_mode(&self, mode: CameraMode) -> Self {
        TrackingConfig { mode, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingRun {
    pub visual: Vec<f64>,
    pub camera: Vec<f64>,
    pub target: Vec<f64>,
}

/// Samples `steps` positions of `motion`, starting at 0 for a random walk.
fn trajectory(motion: TargetMotion, steps: usize, mut rng: ChaCha8Rng) -> Vec<f64> {
    match motion {
        TargetMotion::RandomWalk { sigma } => {
            let mut x = 0.0;
            (0..steps)
                .map(|t| {
                    if t > 0 {
                        let z: f64 = rng.sample(StandardNormal);
                        x += sigma * z;
                    }
                    x
                })
                .collect()
        }
        TargetMotion::Sinusoid { amp, freq } => {
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            (0..steps).map(|t| amp * (std::f64::consts::TAU * freq * t as f64 + phase).sin()).collect()
        }
    }
}

/// Runs the 1-D world. The camera starts at 0. In tracking mode
/// `camera[t+1] = camera[t] + gain * visual[t]`; in uncorrelated mode the
/// camera follows an independent draw of the target's motion model.
pub fn run_tracking(cfg: &TrackingConfig) -> Result<TrackingRun> {
    cfg.validate()?;
    let target = trajectory(cfg.motion, cfg.steps, seeds::substream_rng(cfg.seed, "tracking/target"));
    let camera = match cfg.mode {
        CameraMode::Uncorrelated => trajectory(cfg.motion, cfg.steps, seeds::substream_rng(cfg.seed, "tracking/camera")),
        CameraMode::Tracking => {
            let mut cam = Vec::with_capacity(cfg.steps);
            let mut c = 0.0;
            for &x in &target {
                cam.push(c);
                c += cfg.gain * (x - c);
            }
            cam
        }
    };
    let visual = target.iter().zip(&camera).map(|(t, c)| t - c).collect();
    Ok(TrackingRun { visual, camera, target })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyComparison {
    pub h_tracking: f64,
    pub h_uncorrelated: f64,
    /// Bin edges shared by both visual sequences.
    pub edges: BinEdges,
}

impl EntropyComparison {
    pub fn gap_bits(&self) -> f64 {
        self.h_uncorrelated - self.h_tracking
    }
}

/// Entropy of the visual variable under the two camera modes, binned with
/// equal-width bins over the pooled range of both runs.
pub fn entropy_comparison(tracking: &TrackingConfig, uncorrelated: &TrackingConfig) -> Result<EntropyComparison> {
    if tracking.mode != CameraMode::Tracking || uncorrelated.mode != CameraMode::Uncorrelated {
        return Err(Error::InvalidArgument("expected a tracking and an uncorrelated config".into()));
    }
    if *tracking != uncorrelated.with_mode(CameraMode::Tracking) {
        return Err(Error::InvalidArgument("paired configs may differ only in mode".into()));
    }
    let a = run_tracking(tracking)?.visual;
    let b = run_tracking(uncorrelated)?.visual;
    let (lo, hi) = a.iter().chain(&b).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let edges = BinEdges::equal_width(lo, hi, tracking.bins);
    Ok(EntropyComparison { h_tracking: entropy(&edges.apply(&a))?, h_uncorrelated: entropy(&edges.apply(&b))?, edges })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemoRow {
    pub seed: u64,
    pub h_tracking: f64,
    pub h_uncorrelated: f64,
    pub gap_bits: f64,
}

/// Paired comparison for each seed, using `base` with its seed replaced.
pub fn tracking_demo(base: &TrackingConfig, seeds: &[u64]) -> Result<Vec<DemoRow>> {
    seeds
        .iter()
        .map(|&seed| {
            let cfg = TrackingConfig { seed, ..base.clone() };
            let c = entropy_comparison(&cfg.with_mode(CameraMode::Tracking), &cfg.with_mode(CameraMode::Uncorrelated))?;
            Ok(DemoRow { seed, h_tracking: c.h_tracking, h_uncorrelated: c.h_uncorrelated, gap_bits: c.gap_bits() })
        })
        .collect()
}

pub fn write_demo_csv<W: Write>(rows: &[DemoRow], mut w: W, comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "seed,h_tracking,h_uncorrelated,gap_bits")?;
    for r in rows {
        writeln!(w, "{},{:.6},{:.6},{:.6}", r.seed, r.h_tracking, r.h_uncorrelated, r.gap_bits)?;
    }
    Ok(())
}
