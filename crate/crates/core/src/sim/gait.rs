use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::Leg;
use crate::error::{Error, Result};

/// Per-leg oscillator parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegGait {
    /// rad
    pub amplitude: f64,
    /// Hz
    pub frequency: f64,
    /// rad
    pub phase: f64,
    /// rad
    pub offset: f64,
    /// Fraction of the period spent in stance.
    pub duty_cycle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GaitMode {
    Sinusoid,
    /// Piecewise-constant uniform targets, redrawn every `hold_s` seconds.
    RandomBabble { hold_s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitSpec {
    pub name: String,
    pub legs: [LegGait; 4],
    pub mode: GaitMode,
    /// Fraction by which left-foot load share drops per unit friction
    /// (posture tilt of an asymmetric gait). Zero for symmetric gaits.
    pub left_unload: f64,
}

pub const GAIT_NAMES: [&str; 4] = ["babble", "turn-left", "bound-right", "stand"];

const BASE_AMPLITUDE: f64 = 0.3;
const BASE_FREQUENCY: f64 = 1.0;

fn leg(amplitude: f64, phase: f64, duty_cycle: f64) -> LegGait {
    LegGait { amplitude, frequency: BASE_FREQUENCY, phase, offset: 0.0, duty_cycle }
}

impl GaitSpec {
    pub fn named(name: &str) -> Result<GaitSpec> {
        let a = BASE_AMPLITUDE;
        let spec = match name {
            "babble" => GaitSpec {
                name: name.into(),
                legs: [leg(2.0 * a, 0.0, 0.5); 4],
                mode: GaitMode::RandomBabble { hold_s: 0.25 },
                left_unload: 0.0,
            },
            // walking sequence FL, HR, FR, HL with the right hind leg doing
            // most of the pushing
            "turn-left" => GaitSpec {
                name: name.into(),
                legs: [leg(a, 0.0, 0.6), leg(a, PI, 0.6), leg(a, 1.5 * PI, 0.6), leg(2.0 * a, 0.5 * PI, 0.6)],
                mode: GaitMode::Sinusoid,
                left_unload: 0.0,
            },
            // front pair and hind pair each in phase, pairs half a period
            // apart; weaker left legs turn the robot right
            "bound-right" => GaitSpec {
                name: name.into(),
                legs: [leg(0.9 * a, 0.0, 0.5), leg(a, 0.0, 0.5), leg(0.9 * a, PI, 0.5), leg(a, PI, 0.5)],
                mode: GaitMode::Sinusoid,
                left_unload: 0.9,
            },
            "stand" => GaitSpec {
                name: name.into(),
                legs: [leg(0.0, 0.0, 0.5); 4],
                mode: GaitMode::Sinusoid,
                left_unload: 0.0,
            },
            other => return Err(Error::UnknownGait(other.to_string())),
        };
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, l) in self.legs.iter().enumerate() {
            let bad = |what: &str| Err(Error::InvalidArgument(format!("gait {}: leg {i} {what}", self.name)));
            if !(l.amplitude >= 0.0) {
                return bad("amplitude must be >= 0");
            }
            if !(l.duty_cycle > 0.0 && l.duty_cycle < 1.0) {
                return bad("duty_cycle must be in (0, 1)");
            }
            if matches!(self.mode, GaitMode::Sinusoid) && !(l.frequency > 0.0) {
                return bad("frequency must be > 0");
            }
        }
        if let GaitMode::RandomBabble { hold_s } = self.mode {
            if !(hold_s > 0.0) {
                return Err(Error::InvalidArgument("babble hold_s must be > 0".into()));
            }
        }
        Ok(())
    }

    pub fn leg(&self, leg: Leg) -> &LegGait {
        &self.legs[leg.index()]
    }
}

/// Motor targets (rad) for the four hips at time `t`.
///
/// Sinusoid gaits are pure functions of `t`. Babble targets depend on `t`
/// only through the hold interval index and are drawn from a stream keyed
/// by `(seed, interval)`, so they are reproducible without carried state.
pub fn motor_targets(gait: &GaitSpec, t: f64, seed: u64) -> [f64; 4] {
    match gait.mode {
        GaitMode::Sinusoid => std::array::from_fn(|i| {
            let l = &gait.legs[i];
            l.offset + l.amplitude * (TAU * l.frequency * t + l.phase).sin()
        }),
        GaitMode::RandomBabble { hold_s } => {
            // tolerance keeps t = j * hold_s on the right side of the boundary
            let interval = (t / hold_s + 1e-9).floor().max(0.0) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(interval);
            std::array::from_fn(|i| {
                let a = gait.legs[i].amplitude;
                let u: f64 = rng.random_range(-1.0..=1.0);
                a * u
            })
        }
    }
}

/// Stance/swing for one leg. Legs with zero amplitude never lift. Sinusoid
/// legs are in stance for a `duty_cycle` fraction of the period centred on
/// the backward sweep; babbling legs are in stance while the hip sits in
/// the rearmost `duty_cycle` fraction of the babble range.
pub fn in_stance(gait: &GaitSpec, leg: Leg, t: f64, hip_angle: f64) -> bool {
    let l = gait.leg(leg);
    if l.amplitude == 0.0 {
        return true;
    }
    match gait.mode {
        GaitMode::Sinusoid => {
            let cycle = l.frequency * t + l.phase / TAU;
            let phase = cycle - cycle.floor();
            (phase - 0.5).abs() < 0.5 * l.duty_cycle
        }
        GaitMode::RandomBabble { .. } => hip_angle <= l.amplitude * (2.0 * l.duty_cycle - 1.0),
    }
}
