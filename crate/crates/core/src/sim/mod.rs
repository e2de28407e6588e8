//! Deterministic surrogate of the quadruped.
//!
//! This is a phenomenological model, not rigid-body dynamics. It wires in
//! the causal pathways the analysis is expected to recover:
//!
//! * each motor command drives its own hip through a first-order servo;
//! * each passive knee is a spring-damper excited by its hip's angular
//!   acceleration and, during stance, by a contact load proportional to
//!   ground friction (hind knees are softer and driven harder);
//! * foot pressure is zero in swing and, in stance, follows the load share,
//!   knee flexion and friction;
//! * ground roughness adds high-frequency perturbation to knee and pressure.

mod body;
mod gait;
mod ground;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::CHANNEL_COUNT;
use crate::error::{Error, Result};
use crate::recording::{Meta, Recording, DEFAULT_EPOCH_LEN};
use crate::seeds;

pub use body::{step, LegState, RobotState};
pub use gait::{in_stance, motor_targets, GaitMode, GaitSpec, LegGait, GAIT_NAMES};
pub use ground::{Ground, GROUND_NAMES};

/// Body and noise parameters. All values are invented configuration; only
/// their orderings matter to the analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BodyParams {
    /// First-order servo tracking gain per step.
    pub servo_alpha: f64,
    /// Knee spring stiffness (1/s^2), front legs.
    pub front_stiffness: f64,
    /// Knee spring stiffness (1/s^2), hind legs. Must be below the front value.
    pub hind_stiffness: f64,
    pub damping_ratio: f64,
    /// Mechanical stop for knee flexion (rad); extension stop is 0.
    pub knee_max: f64,
    /// Knee acceleration per unit hip acceleration, front legs.
    pub front_hip_coupling: f64,
    /// Knee acceleration per unit hip acceleration, hind legs.
    pub hind_hip_coupling: f64,
    /// Knee acceleration per unit friction during stance.
    pub contact_gain: f64,
    /// Static part of the stance load.
    pub static_load: f64,
    /// Push-off load per rad/s of backward hip sweep.
    pub push_gain: f64,
    /// Extra knee drive of the hind legs, which do most of the pushing.
    pub hind_drive: f64,
    /// Swing-phase knee fold per rad/s of forward hip sweep.
    pub swing_gain: f64,
    /// Extra left-knee flexion per unit of `left_unload * friction_mu`.
    pub left_posture_gain: f64,
    /// Relative pressure increase per radian of knee flexion.
    pub pressure_knee_gain: f64,
    /// Servo jitter std-dev on the hip (rad).
    pub servo_noise: f64,
    /// Knee and pressure sensor noise std-dev.
    pub sensor_noise: f64,
    /// Std-dev of the slowly drifting load multiplier (uneven terrain).
    pub load_drift_sigma: f64,
    /// Correlation time of the load drift (s).
    pub load_drift_tau: f64,
    /// Scale applied to the ground roughness on the knee channel.
    pub knee_roughness_gain: f64,
    /// Scale applied to the ground roughness on the pressure channel.
    pub pressure_roughness_gain: f64,
}

impl Default for BodyParams {
    fn default() -> Self {
        BodyParams {
            servo_alpha: 0.2,
            front_stiffness: 400.0,
            hind_stiffness: 350.0,
            damping_ratio: 0.5,
            knee_max: 1.5,
            front_hip_coupling: 0.01,
            hind_hip_coupling: 0.02,
            contact_gain: 40.0,
            static_load: 0.3,
            push_gain: 0.5,
            hind_drive: 2.0,
            swing_gain: 8.0,
            left_posture_gain: 3.0,
            pressure_knee_gain: 2.0,
            servo_noise: 0.02,
            sensor_noise: 0.0005,
            load_drift_sigma: 0.1,
            load_drift_tau: 2.0,
            knee_roughness_gain: 1.0,
            pressure_roughness_gain: 1.0,
        }
    }
}

impl BodyParams {
    /// Same body with every stochastic term switched off.
    pub fn noiseless(mut self) -> Self {
        self.servo_noise = 0.0;
        self.sensor_noise = 0.0;
        self.load_drift_sigma = 0.0;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub gait: GaitSpec,
    pub ground: Ground,
    /// Seconds per step.
    pub dt: f64,
    pub duration_s: f64,
    pub seed: u64,
    pub body: BodyParams,
}

impl SimConfig {
    pub fn new(gait: GaitSpec, ground: Ground, duration_s: f64, seed: u64) -> Self {
        SimConfig { gait, ground, dt: 0.02, duration_s, seed, body: BodyParams::default() }
    }

    /// Config for named gait and ground with default body parameters.
    pub fn named(gait: &str, ground: &str, duration_s: f64, seed: u64) -> Result<Self> {
        Ok(SimConfig::new(GaitSpec::named(gait)?, Ground::named(ground)?, duration_s, seed))
    }

    pub fn steps(&self) -> usize {
        (self.duration_s / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.gait.validate()?;
        self.ground.validate()?;
        let b = &self.body;
        let invalid = |m: String| Err(Error::InvalidArgument(m));
        if !(self.dt > 0.0) {
            return Err(Error::NonPositiveDt(self.dt));
        }
        let min_duration = 2.0 * DEFAULT_EPOCH_LEN as f64 * self.dt;
        if !(self.duration_s >= min_duration - 1e-9) {
            return invalid(format!("duration_s must be at least {min_duration} s"));
        }
        if !(b.servo_alpha > 0.0 && b.servo_alpha <= 1.0) {
            return invalid("servo_alpha must be in (0, 1]".into());
        }
        if !(b.hind_stiffness > 0.0 && b.hind_stiffness < b.front_stiffness) {
            return invalid("need 0 < hind_stiffness < front_stiffness".into());
        }
        if !(b.knee_max > 0.0) || !(b.damping_ratio >= 0.0) {
            return invalid("knee_max must be > 0 and damping_ratio >= 0".into());
        }
        let sigmas = [b.left_posture_gain, b.servo_noise, b.sensor_noise, b.load_drift_sigma, b.knee_roughness_gain, b.pressure_roughness_gain];
        if sigmas.iter().any(|s| !(*s >= 0.0)) || !(b.load_drift_tau > 0.0) {
            return invalid("noise and posture parameters must be non-negative and load_drift_tau positive".into());
        }
        Ok(())
    }
}

/// Simulates `cfg.duration_s` seconds from the rest state.
pub fn run_episode(cfg: &SimConfig) -> Result<Recording> {
    cfg.validate()?;
    let steps = cfg.steps();
    let motor_seed = seeds::substream(cfg.seed, "sim/motor");
    let mut rng = seeds::substream_rng(cfg.seed, "sim/noise");
    let mut state = RobotState::rest(cfg);
    let mut columns: Vec<Vec<f64>> = (0..CHANNEL_COUNT).map(|_| Vec::with_capacity(steps)).collect();
    for k in 0..steps {
        // exact clock, so stance phases do not drift with accumulated rounding
        state.time = k as f64 * cfg.dt;
        let targets = motor_targets(&cfg.gait, state.time, motor_seed);
        let (next, sample) = step(&state, targets, &cfg.ground, cfg, &mut rng).map_err(|e| match e {
            Error::NumericalBlowup { what, value, .. } => Error::NumericalBlowup { step: k, what, value },
            other => other,
        })?;
        for (col, v) in columns.iter_mut().zip(sample) {
            col.push(v);
        }
        state = next;
    }
    let meta = Meta { gait: cfg.gait.name.clone(), ground: cfg.ground.name.clone(), seed: cfg.seed };
    Recording::new(columns, cfg.dt, meta)
}

/// Sixteen independent standard-normal channels: a recording with no flows
/// at all, for negative controls. Meta gait and ground are both "noise".
pub fn noise_episode(steps: usize, dt: f64, seed: u64) -> Result<Recording> {
    let mut columns = Vec::with_capacity(CHANNEL_COUNT);
    for c in 0..CHANNEL_COUNT {
        let mut rng = seeds::substream_rng(seed, &format!("noise/{c}"));
        // pressure columns must stay non-negative
        let shift = if c % 4 == 3 { 10.0 } else { 0.0 };
        columns.push((0..steps).map(|_| shift + rng.sample::<f64, _>(rand_distr::StandardNormal)).collect());
    }
    Recording::new(columns, dt, Meta { gait: "noise".into(), ground: "noise".into(), seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_seconds_is_500_rows() {
        let rec = run_episode(&SimConfig::named("turn-left", "foil", 10.0, 1).unwrap()).unwrap();
        assert_eq!(rec.rows(), 500);
        assert_eq!(rec.columns().len(), 16);
        assert!((rec.duration_s() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_stand_stays_at_rest() {
        let mut cfg = SimConfig::named("stand", "styrofoam", 4.0, 3).unwrap();
        cfg.ground.roughness_sigma = 0.0;
        cfg.body = cfg.body.noiseless();
        let rec = run_episode(&cfg).unwrap();
        for col in rec.columns() {
            assert!(col.iter().all(|v| v.to_bits() == col[0].to_bits()));
        }
    }

    #[test]
    fn hip_follows_servo_law() {
        let mut cfg = SimConfig::named("turn-left", "foil", 4.0, 0).unwrap();
        cfg.body = cfg.body.noiseless();
        let state = RobotState::rest(&cfg);
        let mut rng = seeds::substream_rng(0, "test");
        let (next, sample) = step(&state, [1.0; 4], &cfg.ground, &cfg, &mut rng).unwrap();
        for i in 0..4 {
            assert!((next.legs[i].hip_angle - 0.2).abs() < 1e-12);
            assert!((sample[4 * i + 1] - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = SimConfig::named("babble", "foil", 60.0, 0).unwrap();
        cfg.dt = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::NonPositiveDt(_))));
        let mut cfg = SimConfig::named("babble", "foil", 1.0, 0).unwrap();
        assert!(cfg.validate().is_err());
        cfg.duration_s = 60.0;
        cfg.body.hind_stiffness = cfg.body.front_stiffness;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn runaway_state_is_reported() {
        let mut cfg = SimConfig::named("babble", "foil", 4.0, 0).unwrap();
        cfg.body.servo_alpha = 1.0;
        let state = RobotState::rest(&cfg);
        let mut rng = seeds::substream_rng(0, "test");
        let err = step(&state, [f64::NAN; 4], &cfg.ground, &cfg, &mut rng).unwrap_err();
        assert!(err.is_numerical());
    }
}
