//! Concentric caution / warning / collision envelopes and zone classification.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::agents::{FlightMode, OwnshipConfig, PerformanceModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSet {
    pub caution_radius: f64,
    pub warning_radius: f64,
    pub collision_radius: f64,
}

impl EnvelopeSet {
    pub fn validate(&self) -> Result<(), String> {
        if 0.0 < self.collision_radius
            && self.collision_radius < self.warning_radius
            && self.warning_radius < self.caution_radius
            && self.caution_radius.is_finite()
        {
            Ok(())
        } else {
            Err(format!(
                "envelope radii must satisfy 0 < collision < warning < caution, got {}/{}/{}",
                self.collision_radius, self.warning_radius, self.caution_radius
            ))
        }
    }
}

/// Zone of an intruder relative to the ownship, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Zone {
    Clear,
    Caution,
    Warning,
    Collision,
}

impl Zone {
    pub fn keyword(self) -> &'static str {
        match self {
            Zone::Clear => "CLEAR",
            Zone::Caution => "CAUTION",
            Zone::Warning => "WARNING",
            Zone::Collision => "COLLISION",
        }
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Time budget behind the default radii: the warning ring must give the
/// ownship `detect_s + avoid_s` seconds at the assumed closure speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeBudget {
    pub detect_s: f64,
    pub avoid_s: f64,
    pub intruder_speed: f64,
    /// Warning radius is rounded to this grid, m.
    pub grid_m: f64,
    pub forward_collision_m: f64,
    pub vertical_collision_m: f64,
}

impl Default for EnvelopeBudget {
    fn default() -> Self {
        Self {
            detect_s: 3.0,
            avoid_s: 8.0,
            intruder_speed: 20.0,
            grid_m: 250.0,
            forward_collision_m: 150.0,
            vertical_collision_m: 75.0,
        }
    }
}

impl EnvelopeBudget {
    pub fn envelope(&self, own_speed: f64, collision_radius: f64) -> EnvelopeSet {
        let raw = (self.detect_s + self.avoid_s) * (own_speed + self.intruder_speed);
        let warning = ((raw / self.grid_m).round() * self.grid_m).max(self.grid_m);
        EnvelopeSet {
            caution_radius: 2.0 * warning,
            warning_radius: warning,
            collision_radius,
        }
    }
}

/// Envelopes of one configuration for forward flight (cruise, hover at
/// altitude) and vertical flight (take-off climb, landing descent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeProfile {
    pub forward: EnvelopeSet,
    pub vertical: EnvelopeSet,
}

impl EnvelopeProfile {
    pub fn from_performance(perf: &PerformanceModel) -> Self {
        let b = EnvelopeBudget::default();
        Self {
            forward: b.envelope(perf.cruise_speed, b.forward_collision_m),
            vertical: b.envelope(perf.climb_rate.max(perf.descent_rate), b.vertical_collision_m),
        }
    }

    pub fn default_for(config: OwnshipConfig) -> Self {
        Self::from_performance(&PerformanceModel::default_for(config))
    }

    pub fn for_mode(&self, mode: FlightMode) -> EnvelopeSet {
        if mode.is_forward() {
            self.forward
        } else {
            self.vertical
        }
    }
}

/// Default envelope set for a configuration in a given flight mode.
pub fn envelopes_for(config: OwnshipConfig, mode: FlightMode) -> EnvelopeSet {
    EnvelopeProfile::default_for(config).for_mode(mode)
}

/// Zone of an intruder at `separation`; a separation exactly on a ring
/// belongs to the more severe zone.
pub fn classify(separation: f64, env: &EnvelopeSet) -> Zone {
    if separation <= env.collision_radius {
        Zone::Collision
    } else if separation <= env.warning_radius {
        Zone::Warning
    } else if separation <= env.caution_radius {
        Zone::Caution
    } else {
        Zone::Clear
    }
}

/// Zone changes along a time series of separations, starting from Clear.
pub fn zone_transitions(series: &[(f64, f64)], env: &EnvelopeSet) -> Vec<(f64, Zone)> {
    let mut current = Zone::Clear;
    let mut events = Vec::new();
    for &(t, sep) in series {
        let z = classify(sep, env);
        if z != current {
            events.push((t, z));
            current = z;
        }
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vt_cruise() -> EnvelopeSet {
        envelopes_for(OwnshipConfig::VectoredThrust, FlightMode::Cruise)
    }

    #[test]
    fn vectored_thrust_cruise_defaults() {
        assert_eq!(
            vt_cruise(),
            EnvelopeSet { caution_radius: 2000.0, warning_radius: 1000.0, collision_radius: 150.0 }
        );
    }

    #[test]
    fn every_default_is_ordered() {
        let modes = [
            FlightMode::Ground,
            FlightMode::VerticalClimb,
            FlightMode::Cruise,
            FlightMode::Hover,
            FlightMode::VerticalDescent,
        ];
        for c in OwnshipConfig::ALL {
            for m in modes {
                envelopes_for(c, m).validate().unwrap();
            }
        }
    }

    #[test]
    fn hover_multicopter_not_larger_than_cruise_vectored_thrust() {
        let small = envelopes_for(OwnshipConfig::Multicopter, FlightMode::Hover);
        let big = vt_cruise();
        assert!(small.caution_radius <= big.caution_radius);
        assert!(small.warning_radius <= big.warning_radius);
        assert!(small.collision_radius <= big.collision_radius);
    }

    #[test]
    fn budget_is_monotone_in_speed() {
        let b = EnvelopeBudget::default();
        let mut last = 0.0;
        for v in 0..200 {
            let w = b.envelope(v as f64, 150.0).warning_radius;
            assert!(w >= last);
            last = w;
        }
    }

    #[test]
    fn boundaries() {
        let env = vt_cruise();
        assert_eq!(classify(0.0, &env), Zone::Collision);
        assert_eq!(classify(env.caution_radius + 1.0, &env), Zone::Clear);
        assert_eq!(classify(env.warning_radius, &env), Zone::Warning);
        assert_eq!(classify(env.caution_radius, &env), Zone::Caution);
        assert_eq!(classify(env.collision_radius, &env), Zone::Collision);
    }

    #[test]
    fn transitions_simple() {
        let env = vt_cruise();
        assert!(zone_transitions(&[(0.0, 5000.0), (1.0, 4000.0)], &env).is_empty());
        let ev = zone_transitions(&[(0.0, 3000.0), (1.0, 1900.0), (2.0, 1500.0), (3.0, 900.0)], &env);
        assert_eq!(ev, vec![(1.0, Zone::Caution), (3.0, Zone::Warning)]);
    }

    #[test]
    fn transitions_match_per_tick_reclassification_for_straight_line_agents() {
        let env = vt_cruise();
        // Ownship north at 78 m/s, intruder south at 20 m/s, 400 m lateral offset.
        let series: Vec<(f64, f64)> = (0..600)
            .map(|k| {
                let t = k as f64 * 0.1;
                let own = (0.0, 78.0 * t);
                let intr = (400.0, 5000.0 - 20.0 * t);
                (t, ((own.0 - intr.0) as f64).hypot(own.1 - intr.1))
            })
            .collect();
        let events = zone_transitions(&series, &env);
        // Oracle: reclassify every tick, keep changes.
        let mut oracle = Vec::new();
        let mut prev = Zone::Clear;
        for &(t, s) in &series {
            let z = classify(s, &env);
            if z != prev {
                oracle.push((t, z));
            }
            prev = z;
        }
        assert_eq!(events, oracle);
        assert!(events.iter().any(|e| e.1 == Zone::Warning));
    }

    proptest! {
        #[test]
        fn classify_is_monotone(a in 0.0f64..5000.0, b in 0.0f64..5000.0) {
            let env = vt_cruise();
            let (near, far) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(classify(near, &env) >= classify(far, &env));
        }

        #[test]
        fn replay_reconstructs_zone_sequence(seps in proptest::collection::vec(0.0f64..4000.0, 1..60)) {
            let env = vt_cruise();
            let series: Vec<(f64, f64)> = seps.iter().enumerate().map(|(i, s)| (i as f64, *s)).collect();
            let events = zone_transitions(&series, &env);
            let mut zone = Zone::Clear;
            let mut ev = events.iter().peekable();
            for &(t, s) in &series {
                if let Some(&&(et, ez)) = ev.peek() {
                    if et == t {
                        zone = ez;
                        ev.next();
                    }
                }
                prop_assert_eq!(zone, classify(s, &env));
            }
        }
    }
}
