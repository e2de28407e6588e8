//! Channel taxonomy of the quadruped: four legs, each with a hip servo
//! command, a hip encoder, a passive-knee encoder and a foot pressure sensor.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const CHANNEL_COUNT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Leg {
    FL,
    FR,
    HL,
    HR,
}

impl Leg {
    pub const ALL: [Leg; 4] = [Leg::FL, Leg::FR, Leg::HL, Leg::HR];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_hind(self) -> bool {
        matches!(self, Leg::HL | Leg::HR)
    }

    pub fn is_left(self) -> bool {
        matches!(self, Leg::FL | Leg::HL)
    }

    pub fn name(self) -> &'static str {
        match self {
            Leg::FL => "FL",
            Leg::FR => "FR",
            Leg::HL => "HL",
            Leg::HR => "HR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    Motor,
    Hip,
    Knee,
    Pressure,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::Motor, Kind::Hip, Kind::Knee, Kind::Pressure];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Motor => "motor",
            Kind::Hip => "hip",
            Kind::Knee => "knee",
            Kind::Pressure => "pressure",
        }
    }
}

/// One of the 16 recorded channels. The derived ordering is the canonical
/// one: legs FL, FR, HL, HR and, within a leg, motor, hip, knee, pressure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChannelId {
    pub leg: Leg,
    pub kind: Kind,
}

impl ChannelId {
    pub const fn new(leg: Leg, kind: Kind) -> Self {
        ChannelId { leg, kind }
    }

    /// All channels in canonical order.
    pub fn all() -> [ChannelId; CHANNEL_COUNT] {
        let mut out = [ChannelId::new(Leg::FL, Kind::Motor); CHANNEL_COUNT];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = ChannelId::from_index(i);
        }
        out
    }

    /// Column index in canonical order.
    pub fn index(self) -> usize {
        self.leg as usize * 4 + self.kind as usize
    }

    pub fn from_index(i: usize) -> ChannelId {
        assert!(i < CHANNEL_COUNT, "channel index {i} out of range");
        ChannelId::new(Leg::ALL[i / 4], Kind::ALL[i % 4])
    }

    pub fn name(self) -> String {
        format!("{}_{}", self.leg.name(), self.kind.name())
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.leg.name(), self.kind.name())
    }
}

impl FromStr for ChannelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChannelId::all()
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown channel name {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn sixteen_distinct_channels() {
        let all = ChannelId::all();
        let set: HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 16);
        for (i, c) in all.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
    }

    #[test]
    fn canonical_names() {
        let names: Vec<String> = ChannelId::all().iter().map(|c| c.name()).collect();
        assert_eq!(names[0], "FL_motor");
        assert_eq!(names[3], "FL_pressure");
        assert_eq!(names[4], "FR_motor");
        assert_eq!(names[15], "HR_pressure");
        for n in &names {
            assert_eq!(n.parse::<ChannelId>().unwrap().name(), *n);
        }
        assert!("XX_motor".parse::<ChannelId>().is_err());
    }

    #[test]
    fn sorting_any_permutation_is_canonical() {
        let mut v = ChannelId::all().to_vec();
        v.reverse();
        v.swap(3, 11);
        v.sort();
        assert_eq!(v, ChannelId::all().to_vec());
    }
}
