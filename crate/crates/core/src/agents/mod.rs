//! Ownship kinematics and intruder playback.

mod intruder;
mod ownship;

pub use intruder::{
    intruder_state_at, EncounterTag, IntruderAgent, IntruderKind, IntruderBehavior, IntruderRecord,
    IntruderSource, IntruderState, ScriptMode, ScriptedBehavior, SpawnClock, Trajectory,
};
pub use ownship::{ownship_step, ActiveManeuver, FlightMode, FlightPlan, OwnshipState};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("maneuver {0} is infeasible for this performance model")]
    InfeasibleManeuver(String),
    #[error("trajectory error: {0}")]
    Trajectory(String),
    #[error("intruder {0} follows a pursuit script; its state depends on history")]
    StatefulBehavior(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("time step must be positive, got {0}")]
    BadTimeStep(f64),
}

/// The four ownship configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OwnshipConfig {
    Multicopter = 1,
    LiftCruise = 2,
    TiltRotor = 3,
    VectoredThrust = 4,
}

impl OwnshipConfig {
    pub const ALL: [OwnshipConfig; 4] = [
        OwnshipConfig::Multicopter,
        OwnshipConfig::LiftCruise,
        OwnshipConfig::TiltRotor,
        OwnshipConfig::VectoredThrust,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            OwnshipConfig::Multicopter => "MULTICOPTER",
            OwnshipConfig::LiftCruise => "LIFT_CRUISE",
            OwnshipConfig::TiltRotor => "TILT_ROTOR",
            OwnshipConfig::VectoredThrust => "VECTORED_THRUST",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.to_ascii_uppercase().replace('-', "_");
        Self::ALL.into_iter().find(|c| c.keyword() == s || (*c as u8).to_string() == s)
    }

    /// Descending is the head-on answer for configurations 1 and 2, turning right for 3 and 4.
    pub fn head_on_strategy(self) -> HeadOnStrategy {
        match self {
            OwnshipConfig::Multicopter | OwnshipConfig::LiftCruise => HeadOnStrategy::Descend,
            OwnshipConfig::TiltRotor | OwnshipConfig::VectoredThrust => HeadOnStrategy::TurnRight,
        }
    }
}

impl fmt::Display for OwnshipConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeadOnStrategy {
    Descend,
    TurnRight,
}

/// Point-mass performance of one ownship configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceModel {
    /// m/s
    pub cruise_speed: f64,
    /// m/s
    pub climb_rate: f64,
    /// m/s
    pub descent_rate: f64,
    /// m above ground
    pub cruise_alt: f64,
    /// deg/s
    pub turn_rate: f64,
    pub hover_capable: bool,
    pub head_on_strategy: HeadOnStrategy,
    /// Waypoint capture radius, m.
    pub capture_radius: f64,
}

/// 1000 ft.
pub const DEFAULT_CRUISE_ALT_M: f64 = 304.8;

impl PerformanceModel {
    /// Default table. Only the vectored-thrust figures are published values; the
    /// other three cruise speeds are editable stand-ins.
    pub fn default_for(config: OwnshipConfig) -> Self {
        let cruise_speed = match config {
            OwnshipConfig::Multicopter => 28.0,
            OwnshipConfig::LiftCruise => 50.0,
            OwnshipConfig::TiltRotor => 75.0,
            OwnshipConfig::VectoredThrust => 78.0,
        };
        Self {
            cruise_speed,
            climb_rate: 1.7,
            descent_rate: 1.7,
            cruise_alt: DEFAULT_CRUISE_ALT_M,
            turn_rate: 10.0,
            hover_capable: true,
            head_on_strategy: config.head_on_strategy(),
            capture_radius: 50.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("cruise_speed", self.cruise_speed),
            ("climb_rate", self.climb_rate),
            ("descent_rate", self.descent_rate),
            ("cruise_alt", self.cruise_alt),
            ("turn_rate", self.turn_rate),
            ("capture_radius", self.capture_radius),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }

    /// Radius of a coordinated turn at cruise speed.
    pub fn turn_radius(&self) -> f64 {
        self.cruise_speed / self.turn_rate.to_radians()
    }

    /// Largest distance any part of the model can cover per second.
    pub fn max_speed(&self) -> f64 {
        self.cruise_speed.max(self.climb_rate).max(self.descent_rate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn head_on_strategy_by_config() {
        for c in OwnshipConfig::ALL {
            let p = PerformanceModel::default_for(c);
            let expected = if (c as u8) <= 2 { HeadOnStrategy::Descend } else { HeadOnStrategy::TurnRight };
            assert_eq!(p.head_on_strategy, expected);
            p.validate().unwrap();
        }
    }

    #[test]
    fn config_keywords_parse() {
        for c in OwnshipConfig::ALL {
            assert_eq!(OwnshipConfig::parse(c.keyword()), Some(c));
        }
        assert_eq!(OwnshipConfig::parse("4"), Some(OwnshipConfig::VectoredThrust));
        assert_eq!(OwnshipConfig::parse("WARPDRIVE"), None);
    }
}
