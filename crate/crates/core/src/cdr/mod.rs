//! Decision tree: strategic take-off check on the ground, then detect, avoid,
//! emergency and de-escalation in the air.

mod ground;
mod machine;
mod rules;

pub use ground::{heading_threat, takeoff_delay_check, GroundCheckParams, GroundDecision, ThreatClass};
pub use machine::{CdrMachine, CdrObservation, CdrOutput};
pub use rules::{
    approach_direction, de_escalated, diversion_target, emergency_maneuver, relative_position,
    tactical_maneuver, HistorySample,
};

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::envelopes::Zone;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TurnDirection {
    Left,
    Right,
}

impl TurnDirection {
    pub fn keyword(self) -> &'static str {
        match self {
            TurnDirection::Left => "LEFT",
            TurnDirection::Right => "RIGHT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ManeuverAction {
    ContinueFlight,
    /// Hold position, forward speed zero.
    Hover,
    /// Hover and descend to the given altitude, m.
    HoverAndDescendTo(f64),
    TurnBy { degrees: f64, direction: TurnDirection },
    /// Divert to a vertiport id.
    RerouteTo(String),
    /// Fly a parallel path this many metres to starboard.
    LateralOffset(f64),
    /// Parallel path at the configured default offset.
    ChangePath,
}

impl fmt::Display for ManeuverAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManeuverAction::ContinueFlight => f.write_str("CONTINUE"),
            ManeuverAction::Hover => f.write_str("HOVER"),
            ManeuverAction::HoverAndDescendTo(alt) => write!(f, "HOVER_DESCEND {alt}"),
            ManeuverAction::TurnBy { degrees, direction } => write!(f, "TURN {} {degrees}", direction.keyword()),
            ManeuverAction::RerouteTo(id) => write!(f, "REROUTE {id}"),
            ManeuverAction::LateralOffset(m) => write!(f, "OFFSET {m}"),
            ManeuverAction::ChangePath => f.write_str("CHANGE_PATH"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IssuedBy {
    Automated,
    Pilot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManeuverCommand {
    pub action: ManeuverAction,
    pub issued_by: IssuedBy,
    pub issued_at: f64,
}

impl ManeuverCommand {
    pub fn automated(action: ManeuverAction, t: f64) -> Self {
        Self { action, issued_by: IssuedBy::Automated, issued_at: t }
    }

    pub fn pilot(action: ManeuverAction, t: f64) -> Self {
        Self { action, issued_by: IssuedBy::Pilot, issued_at: t }
    }
}

impl fmt::Display for ManeuverCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let who = match self.issued_by {
            IssuedBy::Automated => "auto",
            IssuedBy::Pilot => "pilot",
        };
        write!(f, "{} ({who})", self.action)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ApproachDirection {
    Right,
    Left,
    HeadOn,
    SameDirection,
}

impl ApproachDirection {
    pub const ALL: [ApproachDirection; 4] = [
        ApproachDirection::Right,
        ApproachDirection::Left,
        ApproachDirection::HeadOn,
        ApproachDirection::SameDirection,
    ];
}

/// Where the intruder sits along the ownship's track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelativePosition {
    Ahead,
    Behind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CdrPhase {
    Monitoring,
    Detect { started_at: f64 },
    Avoid,
    Emergency,
    DeEscalated,
    Collided,
}

impl CdrPhase {
    pub fn keyword(self) -> &'static str {
        match self {
            CdrPhase::Monitoring => "MONITORING",
            CdrPhase::Detect { .. } => "DETECT",
            CdrPhase::Avoid => "AVOID",
            CdrPhase::Emergency => "EMERGENCY",
            CdrPhase::DeEscalated => "DEESCALATED",
            CdrPhase::Collided => "COLLIDED",
        }
    }

    /// Position in the escalation order of one encounter.
    pub fn rank(self) -> u8 {
        match self {
            CdrPhase::Monitoring => 0,
            CdrPhase::Detect { .. } => 1,
            CdrPhase::Avoid => 2,
            CdrPhase::Emergency => 3,
            CdrPhase::DeEscalated => 4,
            CdrPhase::Collided => 5,
        }
    }
}

impl fmt::Display for CdrPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// 800 ft.
pub const DEFAULT_DESCENT_ALT_M: f64 = 243.84;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdrParams {
    pub detect_duration: f64,
    pub hold_duration: f64,
    pub tactical_trigger_zone: Zone,
    pub head_on_half_angle: f64,
    pub same_dir_half_angle: f64,
    pub turn_angle: f64,
    /// Parallel-path offset for a tactical path change, m.
    pub lateral_offset: f64,
    /// Multiplier on `lateral_offset` when an emergency asks for more room.
    pub emergency_offset_factor: f64,
    pub descent_altitude: f64,
}

impl Default for CdrParams {
    fn default() -> Self {
        Self {
            detect_duration: 3.0,
            hold_duration: 5.0,
            tactical_trigger_zone: Zone::Caution,
            head_on_half_angle: 45.0,
            same_dir_half_angle: 45.0,
            turn_angle: 45.0,
            lateral_offset: 1200.0,
            emergency_offset_factor: 2.0,
            descent_altitude: DEFAULT_DESCENT_ALT_M,
        }
    }
}

impl CdrParams {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("detect_duration", self.detect_duration),
            ("hold_duration", self.hold_duration),
            ("turn_angle", self.turn_angle),
            ("lateral_offset", self.lateral_offset),
            ("emergency_offset_factor", self.emergency_offset_factor),
            ("descent_altitude", self.descent_altitude),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0..=90.0).contains(&self.head_on_half_angle) || !(0.0..=90.0).contains(&self.same_dir_half_angle) {
            return Err("direction half-angles must lie in [0, 90]".into());
        }
        if self.tactical_trigger_zone == Zone::Clear {
            return Err("tactical trigger zone cannot be CLEAR".into());
        }
        Ok(())
    }
}
