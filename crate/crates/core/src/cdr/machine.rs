use std::collections::VecDeque;

use super::rules::{approach_direction, de_escalated, diversion_target, emergency_maneuver, relative_position, tactical_maneuver, HistorySample};
use super::{ApproachDirection, CdrParams, CdrPhase, ManeuverAction, ManeuverCommand};
use crate::agents::{IntruderKind, OwnshipConfig, OwnshipState};
use crate::envelopes::Zone;
use crate::geo::{EnuPoint, Vec3};

/// What the machine sees of one intruder on one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct CdrObservation {
    pub id: String,
    pub kind: IntruderKind,
    pub pos: EnuPoint,
    pub velocity: Vec3,
    pub separation: f64,
    pub zone: Zone,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CdrOutput {
    pub commands: Vec<ManeuverCommand>,
    /// Drop any active maneuver and fly the (possibly rerouted) plan again.
    pub resume_route: bool,
}

/// Airborne phase machine. Owns the encounter history of the intruder that
/// drives it.
#[derive(Debug, Clone)]
pub struct CdrMachine {
    phase: CdrPhase,
    params: CdrParams,
    config: OwnshipConfig,
    encounter: Option<(String, IntruderKind)>,
    direction: Option<ApproachDirection>,
    history: VecDeque<HistorySample>,
    escalated: bool,
    pending_reroute: Option<String>,
}

impl CdrMachine {
    pub fn new(config: OwnshipConfig, params: CdrParams) -> Self {
        Self {
            phase: CdrPhase::Monitoring,
            params,
            config,
            encounter: None,
            direction: None,
            history: VecDeque::new(),
            escalated: false,
            pending_reroute: None,
        }
    }

    pub fn phase(&self) -> CdrPhase {
        self.phase
    }

    pub fn encounter_id(&self) -> Option<&str> {
        self.encounter.as_ref().map(|(id, _)| id.as_str())
    }

    pub fn direction(&self) -> Option<ApproachDirection> {
        self.direction
    }

    fn end_encounter(&mut self) {
        self.phase = CdrPhase::Monitoring;
        self.encounter = None;
        self.direction = None;
        self.history.clear();
        self.escalated = false;
        self.pending_reroute = None;
    }

    fn begin_encounter(&mut self, obs: &CdrObservation, t: f64) {
        self.end_encounter();
        self.encounter = Some((obs.id.clone(), obs.kind));
        self.phase = CdrPhase::Detect { started_at: t };
        self.history.push_back(HistorySample { t, separation: Some(obs.separation), zone: obs.zone });
    }

    fn record(&mut self, t: f64, obs: Option<&CdrObservation>) {
        self.history.push_back(HistorySample {
            t,
            separation: obs.map(|o| o.separation),
            zone: obs.map_or(Zone::Clear, |o| o.zone),
        });
        let from = t - self.params.hold_duration;
        while self.history.len() >= 2 && self.history[1].t <= from + 1e-9 {
            self.history.pop_front();
        }
    }

    /// Advance one tick at time `t`.
    pub fn step(
        &mut self,
        t: f64,
        own: &OwnshipState,
        observations: &[CdrObservation],
        vertiports: &[(String, EnuPoint)],
    ) -> CdrOutput {
        let mut out = CdrOutput::default();
        if self.phase == CdrPhase::Collided {
            return out;
        }
        if observations.iter().any(|o| o.zone == Zone::Collision) {
            self.phase = CdrPhase::Collided;
            return out;
        }

        let driver = match &self.encounter {
            Some((id, _)) => observations.iter().find(|o| &o.id == id),
            None => observations
                .iter()
                .filter(|o| o.zone != Zone::Clear)
                .min_by(|a, b| a.separation.total_cmp(&b.separation).then_with(|| a.id.cmp(&b.id))),
        };
        let zone = driver.map_or(Zone::Clear, |o| o.zone);

        match self.phase {
            CdrPhase::Monitoring => {
                if let Some(o) = driver {
                    if zone >= self.params.tactical_trigger_zone {
                        let o = o.clone();
                        self.begin_encounter(&o, t);
                    }
                }
            }
            CdrPhase::Detect { started_at } => {
                self.record(t, driver);
                if zone == Zone::Clear {
                    self.end_encounter();
                } else if t - started_at >= self.params.detect_duration - 1e-9 {
                    let o = driver.expect("non-clear zone implies an observation");
                    let dir = approach_direction(own, o.pos, o.velocity, &self.params);
                    let rel = relative_position(own, o.pos);
                    self.direction = Some(dir);
                    self.phase = CdrPhase::Avoid;
                    out.commands.push(tactical_maneuver(self.config, o.kind, dir, rel, &self.params, t));
                }
            }
            CdrPhase::Avoid => {
                self.record(t, driver);
                if zone >= Zone::Warning {
                    let (_, kind) = self.encounter.clone().expect("encounter locked in Avoid");
                    let dir = self.direction.expect("direction fixed in Avoid");
                    self.phase = CdrPhase::Emergency;
                    self.escalated = true;
                    for c in emergency_maneuver(kind, dir, own, vertiports, &self.params, t) {
                        match c.action {
                            ManeuverAction::RerouteTo(id) => self.pending_reroute = Some(id),
                            _ => out.commands.push(c),
                        }
                    }
                } else if self.is_de_escalated() {
                    self.phase = CdrPhase::DeEscalated;
                    out.resume_route = true;
                }
            }
            CdrPhase::Emergency => {
                self.record(t, driver);
                if self.is_de_escalated() {
                    self.phase = CdrPhase::DeEscalated;
                    out.resume_route = true;
                    self.push_diversion(t, own, vertiports, &mut out);
                }
            }
            CdrPhase::DeEscalated => {
                self.record(t, driver);
                if zone == Zone::Clear {
                    self.end_encounter();
                } else if zone >= Zone::Warning {
                    let o = driver.expect("non-clear zone implies an observation").clone();
                    self.begin_encounter(&o, t);
                }
            }
            CdrPhase::Collided => unreachable!(),
        }
        out
    }

    fn is_de_escalated(&self) -> bool {
        let h: Vec<HistorySample> = self.history.iter().copied().collect();
        de_escalated(&h, self.params.hold_duration)
    }

    fn push_diversion(&mut self, t: f64, own: &OwnshipState, vertiports: &[(String, EnuPoint)], out: &mut CdrOutput) {
        if !self.escalated {
            return;
        }
        let target = self
            .pending_reroute
            .take()
            .or_else(|| diversion_target(own.pos, vertiports).map(|(id, _)| id.clone()));
        if let Some(id) = target {
            out.commands.push(ManeuverCommand::pilot(ManeuverAction::RerouteTo(id), t));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{FlightMode, FlightPlan};
    use crate::cdr::{IssuedBy, TurnDirection};
    use crate::geo::RouteId;
    use proptest::prelude::*;

    fn own() -> OwnshipState {
        let plan = FlightPlan {
            route_id: RouteId::Route1,
            waypoints: vec![EnuPoint::ORIGIN, EnuPoint::new(0.0, 20_000.0, 0.0)],
            destination: "V2".into(),
        };
        let mut s = OwnshipState::on_ground(0.0, &plan);
        s.pos = EnuPoint::new(0.0, 10_000.0, 304.8);
        s.flight_mode = FlightMode::Cruise;
        s.ground_speed = 78.0;
        s
    }

    fn ports() -> Vec<(String, EnuPoint)> {
        vec![
            ("V1".into(), EnuPoint::ORIGIN),
            ("V2".into(), EnuPoint::new(0.0, 20_000.0, 0.0)),
            ("V3".into(), EnuPoint::new(8_000.0, 9_000.0, 0.0)),
        ]
    }

    fn obs(sep: f64, zone: Zone) -> CdrObservation {
        // East of the ownship flying west: a right-hand encounter.
        CdrObservation {
            id: "d1".into(),
            kind: IntruderKind::Drone,
            pos: EnuPoint::new(sep, 10_000.0, 304.8),
            velocity: Vec3::from_heading(270.0).scale(20.0),
            separation: sep,
            zone,
        }
    }

    #[test]
    fn detect_lasts_three_seconds_then_tactical() {
        let mut m = CdrMachine::new(OwnshipConfig::VectoredThrust, CdrParams::default());
        let o = own();
        let v = ports();
        let mut issued = None;
        for k in 0..=40 {
            let t = 100.0 + k as f64 * 0.1;
            let out = m.step(t, &o, &[obs(1900.0, Zone::Caution)], &v);
            if !out.commands.is_empty() {
                issued = Some((t, out.commands[0].clone()));
                break;
            }
            if k == 0 {
                assert_eq!(m.phase(), CdrPhase::Detect { started_at: 100.0 });
            }
        }
        let (t, cmd) = issued.expect("tactical command");
        assert!((t - 103.0).abs() < 1e-9);
        assert_eq!(cmd.action, ManeuverAction::Hover);
        assert_eq!(cmd.issued_by, IssuedBy::Automated);
        assert_eq!(m.phase(), CdrPhase::Avoid);
    }

    #[test]
    fn warning_entry_escalates_and_diverts_after_recession() {
        let mut m = CdrMachine::new(OwnshipConfig::VectoredThrust, CdrParams::default());
        let o = own();
        let v = ports();
        let mut t = 0.0;
        for _ in 0..31 {
            m.step(t, &o, &[obs(1500.0, Zone::Caution)], &v);
            t += 0.1;
        }
        assert_eq!(m.phase(), CdrPhase::Avoid);
        let out = m.step(t, &o, &[obs(900.0, Zone::Warning)], &v);
        assert_eq!(m.phase(), CdrPhase::Emergency);
        assert_eq!(
            out.commands.iter().map(|c| c.action.clone()).collect::<Vec<_>>(),
            vec![ManeuverAction::TurnBy { degrees: 45.0, direction: TurnDirection::Left }]
        );
        let mut sep = 1100.0;
        let mut last = CdrOutput::default();
        for _ in 0..60 {
            t += 0.1;
            sep += 2.0;
            last = m.step(t, &o, &[obs(sep, Zone::Caution)], &v);
            if m.phase() == CdrPhase::DeEscalated {
                break;
            }
        }
        assert_eq!(m.phase(), CdrPhase::DeEscalated);
        assert!(last.resume_route);
        assert_eq!(last.commands[0].action, ManeuverAction::RerouteTo("V3".into()));
        m.step(t + 0.1, &o, &[], &v);
        assert_eq!(m.phase(), CdrPhase::Monitoring);
    }

    #[test]
    fn collision_is_absorbing() {
        let mut m = CdrMachine::new(OwnshipConfig::VectoredThrust, CdrParams::default());
        m.step(0.0, &own(), &[obs(100.0, Zone::Collision)], &ports());
        assert_eq!(m.phase(), CdrPhase::Collided);
        let out = m.step(0.1, &own(), &[], &ports());
        assert_eq!(m.phase(), CdrPhase::Collided);
        assert!(out.commands.is_empty());
    }

    fn zone_of(sep: f64) -> Zone {
        crate::envelopes::classify(sep, &crate::envelopes::envelopes_for(OwnshipConfig::VectoredThrust, FlightMode::Cruise))
    }

    proptest! {
        #[test]
        fn phases_escalate_within_an_encounter(seps in proptest::collection::vec(proptest::option::of(100.0f64..4000.0), 1..300)) {
            let mut m = CdrMachine::new(OwnshipConfig::VectoredThrust, CdrParams::default());
            let o = own();
            let v = ports();
            let mut prev = m.phase();
            for (k, s) in seps.iter().enumerate() {
                let t = k as f64 * 0.5;
                let ob: Vec<_> = s.iter().map(|&s| obs(s, zone_of(s))).collect();
                m.step(t, &o, &ob, &v);
                let cur = m.phase();
                let ok = match (prev, cur) {
                    (CdrPhase::Collided, c) => c == CdrPhase::Collided,
                    (_, CdrPhase::Collided) => true,
                    (_, CdrPhase::Monitoring) => true,
                    (CdrPhase::DeEscalated, CdrPhase::Detect { .. }) => true,
                    (_, CdrPhase::DeEscalated) => matches!(prev, CdrPhase::Avoid | CdrPhase::Emergency | CdrPhase::DeEscalated),
                    (a, b) => b.rank() >= a.rank(),
                };
                prop_assert!(ok, "{:?} -> {:?}", prev, cur);
                prev = cur;
            }
        }
    }
}
