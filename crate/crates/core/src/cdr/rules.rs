use super::{
    ApproachDirection, CdrParams, ManeuverAction, ManeuverCommand, RelativePosition, TurnDirection,
};
use crate::agents::{HeadOnStrategy, IntruderKind, OwnshipConfig, OwnshipState};
use crate::envelopes::Zone;
use crate::geo::{signed_angle_diff, EnuPoint, Vec3};

/// Classify how an intruder approaches the ownship.
pub fn approach_direction(
    own: &OwnshipState,
    intr_pos: EnuPoint,
    intr_vel: Vec3,
    params: &CdrParams,
) -> ApproachDirection {
    let rel = intr_pos.sub(own.pos);
    if let Some(track) = intr_vel.heading() {
        let delta = signed_angle_diff(own.track, track).abs();
        if delta >= 180.0 - params.head_on_half_angle {
            return ApproachDirection::HeadOn;
        }
        if delta <= params.same_dir_half_angle {
            return ApproachDirection::SameDirection;
        }
    }
    // Stationary intruders have no track and fall through to the bearing test.
    // Starboard when the intruder lies to the right of the track line.
    let fwd = Vec3::from_heading(own.track);
    let cross = fwd.east * rel.north - fwd.north * rel.east;
    if cross <= 0.0 {
        ApproachDirection::Right
    } else {
        ApproachDirection::Left
    }
}

pub fn relative_position(own: &OwnshipState, intr_pos: EnuPoint) -> RelativePosition {
    let rel = intr_pos.sub(own.pos);
    if Vec3::from_heading(own.track).dot(Vec3::new(rel.east, rel.north, 0.0)) >= 0.0 {
        RelativePosition::Ahead
    } else {
        RelativePosition::Behind
    }
}

/// Right-of-way table for the automated avoid maneuver.
pub fn tactical_maneuver(
    config: OwnshipConfig,
    kind: IntruderKind,
    dir: ApproachDirection,
    rel: RelativePosition,
    params: &CdrParams,
    t: f64,
) -> ManeuverCommand {
    let descend = ManeuverAction::HoverAndDescendTo(params.descent_altitude);
    let action = match (kind, dir) {
        (IntruderKind::Bird, _) => descend,
        (IntruderKind::Drone, ApproachDirection::Right) => ManeuverAction::Hover,
        (IntruderKind::Drone, ApproachDirection::Left) => ManeuverAction::ContinueFlight,
        (IntruderKind::Drone, ApproachDirection::HeadOn) => match config.head_on_strategy() {
            HeadOnStrategy::Descend => descend,
            HeadOnStrategy::TurnRight => {
                ManeuverAction::TurnBy { degrees: params.turn_angle, direction: TurnDirection::Right }
            }
        },
        (IntruderKind::Drone, ApproachDirection::SameDirection) => match rel {
            RelativePosition::Ahead => ManeuverAction::ChangePath,
            RelativePosition::Behind => ManeuverAction::ContinueFlight,
        },
    };
    ManeuverCommand::automated(action, t)
}

/// Pilot input once the intruder reaches the warning ring. Commands are
/// applied in order; a `RerouteTo` takes effect at de-escalation.
pub fn emergency_maneuver(
    kind: IntruderKind,
    dir: ApproachDirection,
    own: &OwnshipState,
    vertiports: &[(String, EnuPoint)],
    params: &CdrParams,
    t: f64,
) -> Vec<ManeuverCommand> {
    let turn = |direction| ManeuverCommand::pilot(ManeuverAction::TurnBy { degrees: params.turn_angle, direction }, t);
    let reroute = || {
        diversion_target(own.pos, vertiports)
            .map(|(id, _)| ManeuverCommand::pilot(ManeuverAction::RerouteTo(id.clone()), t))
    };
    let mut out = Vec::new();
    match (kind, dir) {
        (IntruderKind::Bird, _) => {
            out.push(turn(TurnDirection::Right));
            out.extend(reroute());
        }
        (IntruderKind::Drone, ApproachDirection::Right) => out.push(turn(TurnDirection::Left)),
        (IntruderKind::Drone, ApproachDirection::Left) => {
            out.push(turn(TurnDirection::Right));
            out.extend(reroute());
        }
        (IntruderKind::Drone, ApproachDirection::HeadOn) => out.extend(reroute()),
        (IntruderKind::Drone, ApproachDirection::SameDirection) => out.push(ManeuverCommand::pilot(
            ManeuverAction::LateralOffset(params.lateral_offset * params.emergency_offset_factor),
            t,
        )),
    }
    out
}

fn priority(id: &str) -> u8 {
    match id {
        "V2" => 0,
        "V3" => 1,
        "V1" => 2,
        _ => 3,
    }
}

/// Nearest vertiport by horizontal distance; near-ties go to V2, then V3, then V1.
pub fn diversion_target(pos: EnuPoint, vertiports: &[(String, EnuPoint)]) -> Option<&(String, EnuPoint)> {
    const TIE_M: f64 = 1e-6;
    let best = vertiports
        .iter()
        .map(|v| pos.horizontal_distance(v.1))
        .fold(f64::INFINITY, f64::min);
    vertiports
        .iter()
        .filter(|v| pos.horizontal_distance(v.1) <= best + TIE_M)
        .min_by_key(|v| (priority(&v.0), v.0.clone()))
}

/// One tick of encounter history. `separation` is `None` when the intruder is absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistorySample {
    pub t: f64,
    pub separation: Option<f64>,
    pub zone: Zone,
}

/// True when the intruder has stayed outside the warning ring with strictly
/// growing separation over the last `hold` seconds.
pub fn de_escalated(recent: &[HistorySample], hold: f64) -> bool {
    let Some(last) = recent.last() else {
        return false;
    };
    let from = last.t - hold;
    let Some(start) = recent.iter().rposition(|s| s.t <= from + 1e-9) else {
        return false;
    };
    let window = &recent[start..];
    if window.iter().any(|s| s.zone >= Zone::Warning) {
        return false;
    }
    window.windows(2).all(|w| match (w[0].separation, w[1].separation) {
        (Some(a), Some(b)) => b > a,
        (_, None) => true,
        (None, Some(_)) => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{FlightMode, FlightPlan};
    use crate::geo::RouteId;

    fn own_north() -> OwnshipState {
        let plan = FlightPlan {
            route_id: RouteId::Route1,
            waypoints: vec![EnuPoint::ORIGIN, EnuPoint::new(0.0, 10_000.0, 0.0)],
            destination: "V2".into(),
        };
        let mut s = OwnshipState::on_ground(0.0, &plan);
        s.pos = EnuPoint::new(0.0, 0.0, 304.8);
        s.track = 0.0;
        s.ground_speed = 78.0;
        s.flight_mode = FlightMode::Cruise;
        s
    }

    #[test]
    fn direction_examples() {
        let p = CdrParams::default();
        let own = own_north();
        let ahead = EnuPoint::new(0.0, 1500.0, 304.8);
        assert_eq!(approach_direction(&own, ahead, Vec3::from_heading(180.0), &p), ApproachDirection::HeadOn);
        assert_eq!(approach_direction(&own, ahead, Vec3::from_heading(5.0), &p), ApproachDirection::SameDirection);
        let east = EnuPoint::new(1000.0, 500.0, 304.8);
        assert_eq!(approach_direction(&own, east, Vec3::from_heading(270.0), &p), ApproachDirection::Right);
        let west = EnuPoint::new(-1000.0, 500.0, 304.8);
        assert_eq!(approach_direction(&own, west, Vec3::from_heading(90.0), &p), ApproachDirection::Left);
        // A hovering intruder is classified by which side it is on.
        assert_eq!(approach_direction(&own, ahead, Vec3::ZERO, &p), ApproachDirection::Right);
        assert_eq!(approach_direction(&own, west, Vec3::ZERO, &p), ApproachDirection::Left);
        assert_eq!(approach_direction(&own, east, Vec3::ZERO, &p), ApproachDirection::Right);
    }

    #[test]
    fn right_of_way_table_is_total() {
        let p = CdrParams::default();
        for c in OwnshipConfig::ALL {
            for k in [IntruderKind::Drone, IntruderKind::Bird] {
                for d in ApproachDirection::ALL {
                    for r in [RelativePosition::Ahead, RelativePosition::Behind] {
                        let cmd = tactical_maneuver(c, k, d, r, &p, 10.0);
                        assert_eq!(cmd.issued_by, super::super::IssuedBy::Automated);
                        assert_eq!(cmd.issued_at, 10.0);
                        if let ManeuverAction::HoverAndDescendTo(a) = cmd.action {
                            assert!(a < crate::agents::DEFAULT_CRUISE_ALT_M);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tactical_cells() {
        let p = CdrParams::default();
        let t = |c, k, d| tactical_maneuver(c, k, d, RelativePosition::Ahead, &p, 0.0).action;
        use ApproachDirection::*;
        use IntruderKind::*;
        use OwnshipConfig::*;
        assert_eq!(t(VectoredThrust, Drone, Right), ManeuverAction::Hover);
        assert_eq!(t(VectoredThrust, Drone, Left), ManeuverAction::ContinueFlight);
        assert_eq!(
            t(VectoredThrust, Drone, HeadOn),
            ManeuverAction::TurnBy { degrees: 45.0, direction: TurnDirection::Right }
        );
        assert_eq!(t(Multicopter, Drone, HeadOn), ManeuverAction::HoverAndDescendTo(243.84));
        assert_eq!(t(VectoredThrust, Drone, SameDirection), ManeuverAction::ChangePath);
        assert_eq!(t(VectoredThrust, Bird, HeadOn), ManeuverAction::HoverAndDescendTo(243.84));
    }

    fn ports() -> Vec<(String, EnuPoint)> {
        vec![
            ("V1".into(), EnuPoint::ORIGIN),
            ("V2".into(), EnuPoint::new(0.0, 20_000.0, 0.0)),
            ("V3".into(), EnuPoint::new(10_000.0, 10_000.0, 0.0)),
        ]
    }

    #[test]
    fn emergency_cells() {
        let p = CdrParams::default();
        let mut own = own_north();
        own.pos = EnuPoint::new(5_000.0, 12_000.0, 304.8);
        let e = |k, d| emergency_maneuver(k, d, &own, &ports(), &p, 1.0);
        let actions = |v: Vec<ManeuverCommand>| v.into_iter().map(|c| c.action).collect::<Vec<_>>();
        assert_eq!(
            actions(e(IntruderKind::Drone, ApproachDirection::Right)),
            vec![ManeuverAction::TurnBy { degrees: 45.0, direction: TurnDirection::Left }]
        );
        assert_eq!(
            actions(e(IntruderKind::Drone, ApproachDirection::Left)),
            vec![
                ManeuverAction::TurnBy { degrees: 45.0, direction: TurnDirection::Right },
                ManeuverAction::RerouteTo("V3".into())
            ]
        );
        assert_eq!(actions(e(IntruderKind::Drone, ApproachDirection::HeadOn)), vec![ManeuverAction::RerouteTo("V3".into())]);
        assert_eq!(
            actions(e(IntruderKind::Drone, ApproachDirection::SameDirection)),
            vec![ManeuverAction::LateralOffset(2400.0)]
        );
        assert!(e(IntruderKind::Bird, ApproachDirection::HeadOn).iter().all(|c| c.issued_by == super::super::IssuedBy::Pilot));
    }

    #[test]
    fn diversion_nearest_and_ties() {
        let v = ports();
        assert_eq!(diversion_target(EnuPoint::new(0.0, 20_000.0, 300.0), &v).unwrap().0, "V2");
        // Equidistant from V2 and V3.
        let mid = EnuPoint::new(5_000.0, 15_000.0, 0.0);
        assert_eq!(diversion_target(mid, &v).unwrap().0, "V2");
        for i in 0..50 {
            let p = EnuPoint::new(i as f64 * 311.0 - 3000.0, i as f64 * 457.0, 0.0);
            let (_, chosen) = diversion_target(p, &v).unwrap();
            for (_, other) in &v {
                assert!(p.horizontal_distance(*chosen) <= p.horizontal_distance(*other) + 1e-6);
            }
        }
        assert!(diversion_target(mid, &[]).is_none());
    }

    fn series(seps: &[Option<f64>], zone: Zone) -> Vec<HistorySample> {
        seps.iter()
            .enumerate()
            .map(|(i, s)| HistorySample { t: i as f64, separation: *s, zone })
            .collect()
    }

    #[test]
    fn de_escalation_predicate() {
        let absent = series(&[None; 6], Zone::Clear);
        assert!(de_escalated(&absent, 5.0));
        let warning = series(&[Some(900.0), Some(910.0), Some(920.0), Some(930.0), Some(940.0), Some(950.0)], Zone::Warning);
        assert!(!de_escalated(&warning, 5.0));
        let receding: Vec<_> = (0..=5).map(|i| Some(1500.0 + 2.0 * i as f64)).collect();
        assert!(de_escalated(&series(&receding, Zone::Caution), 5.0));
        // Too short.
        assert!(!de_escalated(&series(&receding[..4], Zone::Caution), 5.0));
        let mut flat = receding.clone();
        flat[3] = flat[2];
        assert!(!de_escalated(&series(&flat, Zone::Caution), 5.0));
    }
}
