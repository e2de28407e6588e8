use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::Leg;
use crate::error::{Error, Result};

use super::gait::in_stance;
use super::{Ground, SimConfig};

const SUBSTEPS: usize = 4;
const STATE_BOUND: f64 = 1e4;
const BASE_LOAD_SHARE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LegState {
    pub hip_angle: f64,
    /// Hip angular velocity over the last step (rad/s).
    pub hip_rate: f64,
    pub knee_angle: f64,
    pub knee_rate: f64,
    pub in_stance: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub legs: [LegState; 4],
    /// Multiplicative deviation of the body load from nominal.
    pub load_drift: f64,
    pub time: f64,
}

impl RobotState {
    /// Hips at zero and every knee at its static deflection for the stance
    /// state at `t = 0`, so a robot that never moves stays exactly still.
    pub fn rest(cfg: &SimConfig) -> RobotState {
        let legs = std::array::from_fn(|i| {
            let leg = Leg::ALL[i];
            let stance = in_stance(&cfg.gait, leg, 0.0, 0.0);
            let knee_angle = knee_setpoint(cfg, leg, stance, 0.0, 0.0).clamp(0.0, cfg.body.knee_max);
            LegState { in_stance: stance, knee_angle, ..LegState::default() }
        });
        RobotState { legs, load_drift: 0.0, time: 0.0 }
    }
}

fn stiffness(cfg: &SimConfig, leg: Leg) -> f64 {
    if leg.is_hind() {
        cfg.body.hind_stiffness
    } else {
        cfg.body.front_stiffness
    }
}

/// Body weight share of one foot. Load lifted off a tilted left foot moves
/// to the right foot of the same pair, so the shares always sum to one.
fn load_share(cfg: &SimConfig, leg: Leg) -> f64 {
    let shift = (cfg.gait.left_unload * cfg.ground.friction_mu).min(1.0);
    if leg.is_left() {
        BASE_LOAD_SHARE * (1.0 - shift)
    } else {
        BASE_LOAD_SHARE * (1.0 + shift)
    }
}

/// Knee deflection the knee would settle to under the current drive. In
/// stance the contact load has a static part and a push-off part that
/// grows with the backward sweep speed of the hip; both scale with
/// friction. In swing the knee folds for clearance while the hip swings
/// forward. A tilted left foot (`left_unload`) bends the left knee further
/// in both phases.
fn knee_setpoint(cfg: &SimConfig, leg: Leg, stance: bool, load_drift: f64, hip_rate: f64) -> f64 {
    let b = &cfg.body;
    let mut drive = if leg.is_hind() { b.hind_drive } else { 1.0 };
    if leg.is_left() {
        drive *= 1.0 + b.left_posture_gain * cfg.gait.left_unload * cfg.ground.friction_mu;
    }
    if !stance {
        return drive * b.swing_gain * hip_rate.max(0.0) / stiffness(cfg, leg);
    }
    let push = b.static_load + b.push_gain * (-hip_rate).max(0.0);
    let force = b.contact_gain * cfg.ground.friction_mu * (1.0 + load_drift) * push;
    drive * force / stiffness(cfg, leg)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn check(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value.abs() <= STATE_BOUND {
        Ok(value)
    } else {
        Err(Error::NumericalBlowup { step: 0, what, value })
    }
}

/// Advances the robot by one `cfg.dt` and emits the 16-channel sample
/// `(targets, hips, knees, pressures)`, grouped per leg in canonical order.
///
/// Noise is drawn from `rng` in a fixed order that does not depend on the
/// noise amplitudes, so runs differing only in an amplitude share their
/// random numbers.
pub fn step<R: Rng + ?Sized>(
    state: &RobotState,
    targets: [f64; 4],
    ground: &Ground,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<(RobotState, [f64; 16])> {
    let b = &cfg.body;
    let dt = cfg.dt;
    let noise = b.sensor_noise;

    let decay = dt / b.load_drift_tau;
    let drift = state.load_drift * (1.0 - decay) + b.load_drift_sigma * (2.0 * decay).sqrt() * normal(rng);

    let mut next = RobotState { legs: state.legs, load_drift: drift, time: state.time + dt };
    let mut sample = [0.0; 16];
    for leg in Leg::ALL {
        let i = leg.index();
        let prev = &state.legs[i];
        let ls = &mut next.legs[i];

        // hip: first-order servo towards the motor command
        let hip = check("hip_angle", prev.hip_angle + b.servo_alpha * (targets[i] - prev.hip_angle))?;
        let hip_reading = hip + b.servo_noise * normal(rng);
        let hip_rate = (hip - prev.hip_angle) / dt;
        let hip_acc = (hip_rate - prev.hip_rate) / dt;
        ls.hip_angle = hip;
        ls.hip_rate = hip_rate;
        ls.in_stance = in_stance(&cfg.gait, leg, state.time, hip);

        // knee: spring-damper around the contact setpoint, excited by the hip
        let k = stiffness(cfg, leg);
        let damping = 2.0 * b.damping_ratio * k.sqrt();
        let coupling = if leg.is_hind() { b.hind_hip_coupling } else { b.front_hip_coupling };
        let setpoint = knee_setpoint(cfg, leg, ls.in_stance, drift, hip_rate);
        let h = dt / SUBSTEPS as f64;
        let (mut q, mut w) = (prev.knee_angle, prev.knee_rate);
        for _ in 0..SUBSTEPS {
            let acc = -k * (q - setpoint) - damping * w - coupling * hip_acc;
            w += h * acc;
            q += h * w;
            if q < 0.0 {
                q = 0.0;
                w = w.max(0.0);
            } else if q > b.knee_max {
                q = b.knee_max;
                w = w.min(0.0);
            }
        }
        let bump = ground.roughness_sigma * b.knee_roughness_gain;
        q = (q + bump * normal(rng)).clamp(0.0, b.knee_max);
        ls.knee_angle = check("knee_angle", q)?;
        ls.knee_rate = check("knee_rate", w)?;

        // pressure: contact only
        let pressure = if ls.in_stance {
            let share = load_share(cfg, leg) / BASE_LOAD_SHARE;
            let clean = share * (1.0 + b.pressure_knee_gain * q) * (1.0 + ground.friction_mu) * (1.0 + drift);
            let rough = ground.roughness_sigma * b.pressure_roughness_gain;
            (clean + (noise + rough) * normal(rng)).max(0.0)
        } else {
            0.0
        };

        let knee_reading = (q + noise * normal(rng)).clamp(0.0, b.knee_max);
        sample[4 * i] = targets[i];
        sample[4 * i + 1] = hip_reading;
        sample[4 * i + 2] = knee_reading;
        sample[4 * i + 3] = check("pressure", pressure)?;
    }
    Ok((next, sample))
}
