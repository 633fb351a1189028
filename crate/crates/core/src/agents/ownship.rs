use serde::{Deserialize, Serialize};

use super::{AgentError, PerformanceModel};
use crate::cdr::{ManeuverAction, ManeuverCommand, TurnDirection};
use crate::geo::{bearing, distance_point_to_segment, signed_angle_diff, normalize_deg, EnuPoint, RouteId, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlightMode {
    Ground,
    VerticalClimb,
    Cruise,
    Hover,
    VerticalDescent,
}

impl FlightMode {
    pub fn is_forward(self) -> bool {
        matches!(self, FlightMode::Cruise | FlightMode::Hover)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OwnshipState {
    pub t: f64,
    pub pos: EnuPoint,
    /// Compass track, degrees.
    pub track: f64,
    pub ground_speed: f64,
    pub vertical_speed: f64,
    pub flight_mode: FlightMode,
    pub active_route: RouteId,
    pub next_waypoint_index: usize,
}

impl OwnshipState {
    /// Parked at the first waypoint of `plan`, ready for take-off.
    pub fn on_ground(t: f64, plan: &FlightPlan) -> Self {
        let pos = plan.waypoints[0].with_up(0.0);
        let track = plan
            .waypoints
            .get(1)
            .and_then(|w| bearing(pos, *w).ok())
            .unwrap_or(0.0);
        Self {
            t,
            pos,
            track,
            ground_speed: 0.0,
            vertical_speed: 0.0,
            flight_mode: FlightMode::Ground,
            active_route: plan.route_id,
            next_waypoint_index: 1,
        }
    }

    pub fn velocity(&self) -> Vec3 {
        Vec3::from_heading(self.track)
            .scale(self.ground_speed)
            .add(Vec3::new(0.0, 0.0, self.vertical_speed))
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        if !self.pos.is_finite() || self.pos.up < -1e-9 {
            return Err(AgentError::InvalidState(format!("position {:?}", self.pos)));
        }
        if self.ground_speed < 0.0 {
            return Err(AgentError::InvalidState("negative ground speed".into()));
        }
        if self.flight_mode == FlightMode::Hover && self.ground_speed != 0.0 {
            return Err(AgentError::InvalidState("hovering with forward speed".into()));
        }
        if self.flight_mode == FlightMode::Ground && self.pos.up != 0.0 {
            return Err(AgentError::InvalidState("on ground above ground level".into()));
        }
        Ok(())
    }
}

/// Waypoints the ownship is currently flying, in the scenario frame. The last
/// waypoint is the landing vertiport.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightPlan {
    pub route_id: RouteId,
    pub waypoints: Vec<EnuPoint>,
    pub destination: String,
}

impl FlightPlan {
    /// Straight leg from the current position to a vertiport.
    pub fn direct(from: EnuPoint, to: EnuPoint, destination: impl Into<String>) -> Self {
        Self {
            route_id: RouteId::Diversion,
            waypoints: vec![from.with_up(0.0), to.with_up(0.0)],
            destination: destination.into(),
        }
    }

    pub fn last_index(&self) -> usize {
        self.waypoints.len() - 1
    }

    pub fn destination_point(&self) -> EnuPoint {
        self.waypoints[self.last_index()]
    }
}

/// A command the ownship is executing, with the values fixed at issue time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveManeuver {
    pub command: ManeuverCommand,
    /// Track when the command was issued; turns are relative to it.
    pub reference_track: f64,
    /// Resolved parallel-path offset for `ChangePath`/`LateralOffset`, m to starboard.
    pub offset_m: f64,
}

impl ActiveManeuver {
    pub fn new(command: ManeuverCommand, reference_track: f64, offset_m: f64) -> Self {
        Self { command, reference_track, offset_m }
    }
}

/// Lookahead distance along a parallel path when steering onto it.
const OFFSET_LOOKAHEAD_M: f64 = 1000.0;

/// Advance the ownship by `dt`. A command overrides route following; `None`,
/// `ContinueFlight` and `RerouteTo` (already applied to `plan`) fly the plan.
pub fn ownship_step(
    state: &OwnshipState,
    perf: &PerformanceModel,
    plan: &FlightPlan,
    cmd: Option<&ActiveManeuver>,
    dt: f64,
) -> Result<OwnshipState, AgentError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(AgentError::BadTimeStep(dt));
    }
    let mut next = *state;
    next.t = state.t + dt;
    next.active_route = plan.route_id;

    let action = cmd.map(|c| &c.command.action);
    match action {
        Some(ManeuverAction::Hover) | Some(ManeuverAction::HoverAndDescendTo(_)) => {
            if !perf.hover_capable {
                return Err(AgentError::InfeasibleManeuver(action.unwrap().to_string()));
            }
            if state.flight_mode == FlightMode::Ground {
                // Nothing to hold on the ground.
                next.vertical_speed = 0.0;
                next.ground_speed = 0.0;
                return Ok(next);
            }
            let target = match action {
                Some(ManeuverAction::HoverAndDescendTo(alt)) => alt.min(state.pos.up),
                _ => state.pos.up,
            };
            next.flight_mode = FlightMode::Hover;
            next.ground_speed = 0.0;
            vertical_toward(&mut next, state.pos.up, target, perf, dt);
            return Ok(next);
        }
        Some(ManeuverAction::TurnBy { degrees, direction }) if is_airborne(state) => {
            let sign = match direction {
                TurnDirection::Right => 1.0,
                TurnDirection::Left => -1.0,
            };
            let heading = normalize_deg(cmd.unwrap().reference_track + sign * degrees);
            fly_heading(&mut next, state, perf, heading, false, dt);
            return Ok(next);
        }
        Some(ManeuverAction::LateralOffset(_)) | Some(ManeuverAction::ChangePath) if is_airborne(state) => {
            let offset = cmd.unwrap().offset_m;
            follow_offset_path(&mut next, state, perf, plan, offset, dt);
            return Ok(next);
        }
        _ => {}
    }

    match state.flight_mode {
        FlightMode::Ground | FlightMode::VerticalClimb => {
            let up = (state.pos.up + perf.climb_rate * dt).min(perf.cruise_alt);
            next.pos.up = up;
            next.ground_speed = 0.0;
            next.vertical_speed = (up - state.pos.up) / dt;
            if up >= perf.cruise_alt {
                next.flight_mode = FlightMode::Cruise;
                if let Some(w) = plan.waypoints.get(state.next_waypoint_index) {
                    if let Ok(b) = bearing(next.pos, *w) {
                        next.track = b;
                    }
                }
            } else {
                next.flight_mode = FlightMode::VerticalClimb;
            }
        }
        FlightMode::Cruise | FlightMode::Hover => follow_plan(&mut next, state, perf, plan, dt),
        FlightMode::VerticalDescent => {
            let up = (state.pos.up - perf.descent_rate * dt).max(0.0);
            next.pos.up = up;
            next.ground_speed = 0.0;
            next.vertical_speed = (up - state.pos.up) / dt;
            if up == 0.0 {
                next.flight_mode = FlightMode::Ground;
                next.vertical_speed = 0.0;
            }
        }
    }
    Ok(next)
}

fn is_airborne(s: &OwnshipState) -> bool {
    matches!(s.flight_mode, FlightMode::Cruise | FlightMode::Hover)
}

fn vertical_toward(next: &mut OwnshipState, from: f64, target: f64, perf: &PerformanceModel, dt: f64) {
    let up = if target < from {
        (from - perf.descent_rate * dt).max(target)
    } else {
        (from + perf.climb_rate * dt).min(target)
    };
    next.pos.up = up;
    next.vertical_speed = (up - from) / dt;
}

/// Horizontal speed left after an altitude correction, so the 3-D speed never
/// exceeds cruise speed.
fn horizontal_budget(perf: &PerformanceModel, vertical_speed: f64) -> f64 {
    (perf.cruise_speed.powi(2) - vertical_speed.powi(2)).max(0.0).sqrt()
}

/// Climb back toward cruise altitude while in forward flight.
fn restore_altitude(next: &mut OwnshipState, state: &OwnshipState, perf: &PerformanceModel, dt: f64) {
    if state.pos.up < perf.cruise_alt {
        vertical_toward(next, state.pos.up, perf.cruise_alt, perf, dt);
    } else {
        next.pos.up = state.pos.up;
        next.vertical_speed = 0.0;
    }
}

/// Slew toward `desired` at the turn-rate limit, then move. With `pivot` the
/// ownship turns on the spot while the heading error exceeds 90 degrees.
fn fly_heading(next: &mut OwnshipState, state: &OwnshipState, perf: &PerformanceModel, desired: f64, pivot: bool, dt: f64) {
    let err = signed_angle_diff(state.track, desired);
    let max_turn = perf.turn_rate * dt;
    let turn = err.clamp(-max_turn, max_turn);
    next.track = normalize_deg(state.track + turn);
    next.flight_mode = FlightMode::Cruise;
    restore_altitude(next, state, perf, dt);
    let speed = if pivot && (err - turn).abs() > 90.0 { 0.0 } else { horizontal_budget(perf, next.vertical_speed) };
    next.ground_speed = speed;
    let step = Vec3::from_heading(next.track).scale(speed * dt);
    next.pos.east = state.pos.east + step.east;
    next.pos.north = state.pos.north + step.north;
}

fn follow_plan(next: &mut OwnshipState, state: &OwnshipState, perf: &PerformanceModel, plan: &FlightPlan, dt: f64) {
    let last = plan.last_index();
    let mut idx = state.next_waypoint_index.min(last);
    while idx < last && state.pos.horizontal_distance(plan.waypoints[idx]) <= perf.capture_radius {
        idx += 1;
    }
    next.next_waypoint_index = idx;
    let target = plan.waypoints[idx];
    let dist = state.pos.horizontal_distance(target);

    if idx == last && dist <= perf.cruise_speed * dt {
        // Final approach: stop over the pad and begin the vertical descent.
        next.pos.east = target.east;
        next.pos.north = target.north;
        next.ground_speed = dist / dt;
        next.vertical_speed = 0.0;
        next.flight_mode = FlightMode::VerticalDescent;
        return;
    }

    let desired = bearing(state.pos, target).unwrap_or(state.track);
    let near = dist < 2.0 * perf.turn_radius();
    fly_heading(next, state, perf, desired, near, dt);

    // A waypoint slipping past abeam inside the capture zone counts as captured.
    if idx < last {
        let behind = signed_angle_diff(next.track, bearing(next.pos, target).unwrap_or(next.track)).abs() > 90.0;
        if behind && next.pos.horizontal_distance(target) <= 2.0 * perf.capture_radius {
            next.next_waypoint_index = idx + 1;
        }
    }
}

/// Fly a line parallel to the active leg, `offset` metres to starboard of it.
fn follow_offset_path(
    next: &mut OwnshipState,
    state: &OwnshipState,
    perf: &PerformanceModel,
    plan: &FlightPlan,
    offset: f64,
    dt: f64,
) {
    let last = plan.last_index();
    let mut idx = state.next_waypoint_index.clamp(1, last);
    loop {
        let (a, b) = (plan.waypoints[idx - 1], plan.waypoints[idx]);
        let (_, s) = distance_point_to_segment(state.pos, a, b);
        if s >= 1.0 && idx < last {
            idx += 1;
        } else {
            break;
        }
    }
    next.next_waypoint_index = idx;
    let (a, b) = (plan.waypoints[idx - 1], plan.waypoints[idx]);
    let dir = b.sub(a);
    let len = dir.horizontal_norm();
    let desired = if len > 0.0 {
        let u = dir.scale(1.0 / len);
        let right = Vec3::new(u.north, -u.east, 0.0);
        let (_, s) = distance_point_to_segment(state.pos, a, b);
        let foot = a.lerp(b, s);
        let aim = foot.add(right.scale(offset)).add(u.scale(OFFSET_LOOKAHEAD_M));
        bearing(state.pos, aim).unwrap_or(state.track)
    } else {
        state.track
    };
    fly_heading(next, state, perf, desired, false, dt);
}
