use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ground {
    pub name: String,
    /// Dimensionless friction coefficient.
    pub friction_mu: f64,
    /// Std-dev of the high-frequency perturbation added to knee and pressure.
    pub roughness_sigma: f64,
}

pub const GROUND_NAMES: [&str; 3] = ["foil", "styrofoam", "rubber"];

impl Ground {
    pub fn named(name: &str) -> Result<Ground> {
        let (friction_mu, roughness_sigma) = match name {
            "foil" => (0.2, 0.002),
            "styrofoam" => (0.5, 0.006),
            "rubber" => (0.8, 0.012),
            other => return Err(Error::UnknownGround(other.to_string())),
        };
        Ok(Ground { name: name.to_string(), friction_mu, roughness_sigma })
    }

    pub fn custom(name: &str, friction_mu: f64, roughness_sigma: f64) -> Result<Ground> {
        let g = Ground { name: name.to_string(), friction_mu, roughness_sigma };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.friction_mu > 0.0) {
            return Err(Error::InvalidArgument(format!("ground {}: friction_mu must be > 0", self.name)));
        }
        if !(self.roughness_sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!("ground {}: roughness_sigma must be >= 0", self.name)));
        }
        Ok(())
    }
}
