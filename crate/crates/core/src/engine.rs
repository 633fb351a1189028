//! Fixed-step fast-time loop.
//!
//! Each tick at `t = t0 + k·dt` runs, in order: intruder playback, separation,
//! zone classification, the decision machine (CAS on, ownship off the ground),
//! then ownship motion to `t + dt`.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io;
use thiserror::Error;

use crate::agents::{
    ownship_step, ActiveManeuver, AgentError, FlightMode, FlightPlan, IntruderAgent, OwnshipState, SpawnClock,
};
use crate::cdr::{
    takeoff_delay_check, CdrMachine, CdrObservation, CdrPhase, GroundDecision, ManeuverAction, ManeuverCommand,
};
use crate::envelopes::{classify, Zone};
use crate::geo::{EnuPoint, GeoError, RouteId, Vec3};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub dt: f64,
    /// Airborne time limit after departure, s.
    pub max_sim_time: f64,
    pub cas_enabled: bool,
    /// Separation counted as physical contact, m.
    pub contact_distance: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self { dt: 0.1, max_sim_time: 3600.0, cas_enabled: true, contact_distance: 5.0 }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.max_sim_time > 0.0 && self.max_sim_time.is_finite()) {
            return Err(format!("max_sim_time must be positive, got {}", self.max_sim_time));
        }
        if !(self.contact_distance >= 0.0) {
            return Err(format!("contact_distance must be non-negative, got {}", self.contact_distance));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid scenario: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Geo(#[from] GeoError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntruderTick {
    pub id: String,
    pub pos: EnuPoint,
    pub velocity: Vec3,
    pub separation: f64,
    pub zone: Zone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub t: f64,
    pub own: OwnshipState,
    pub intruders: Vec<IntruderTick>,
    pub phase: CdrPhase,
    pub command: Option<ManeuverCommand>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Terminal {
    LandedAt(String),
    Collided,
    TimedOut,
    PostponedOnGround,
}

impl Terminal {
    pub fn keyword(&self) -> String {
        match self {
            Terminal::LandedAt(v) => format!("LANDED {v}"),
            Terminal::Collided => "COLLIDED".into(),
            Terminal::TimedOut => "TIMED_OUT".into(),
            Terminal::PostponedOnGround => "POSTPONED".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub scenario_id: String,
    pub cas_enabled: bool,
    pub ticks: Vec<TickRecord>,
    pub terminal: Terminal,
    pub ground_decision: GroundDecision,
    /// Route the ownship took off on.
    pub route_departed: Option<RouteId>,
    /// Mission time of take-off.
    pub departure_time: Option<f64>,
    /// Mission time of the terminal event.
    pub end_time: Option<f64>,
}

impl RunResult {
    /// Airborne time from take-off to landing.
    pub fn flight_time(&self) -> Option<f64> {
        match self.terminal {
            Terminal::LandedAt(_) => Some(self.end_time? - self.departure_time?),
            _ => None,
        }
    }

    pub fn min_separation(&self) -> Option<f64> {
        self.ticks
            .iter()
            .flat_map(|t| t.intruders.iter().map(|i| i.separation))
            .fold(None, |m, s| Some(m.map_or(s, |m: f64| m.min(s))))
    }

    /// Plain CSV trace, one row per tick and present intruder.
    pub fn write_trace<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut w = io::BufWriter::new(out);
        io::Write::write_all(&mut w, trace_csv(self).as_bytes())?;
        io::Write::flush(&mut w)
    }
}

pub const TRACE_HEADER: &str = "t_s,own_east_m,own_north_m,own_up_m,own_track_deg,phase,intruder_id,sep_m,zone,command";

pub fn trace_csv(result: &RunResult) -> String {
    let mut s = String::with_capacity(result.ticks.len() * 80);
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for tick in &result.ticks {
        let cmd = tick.command.as_ref().map(|c| c.action.to_string()).unwrap_or_default();
        let head = format!(
            "{:.3},{:.3},{:.3},{:.3},{:.3},{}",
            tick.t, tick.own.pos.east, tick.own.pos.north, tick.own.pos.up, tick.own.track, tick.phase
        );
        if tick.intruders.is_empty() {
            let _ = writeln!(s, "{head},,,,{cmd}");
        }
        for i in &tick.intruders {
            let _ = writeln!(s, "{head},{},{:.3},{},{cmd}", i.id, i.separation, i.zone);
        }
    }
    s
}

fn on_ground_observations(
    scenario: &Scenario,
    v1: EnuPoint,
    until: f64,
    dt: f64,
) -> Result<Vec<Vec<(f64, EnuPoint, Vec3)>>, AgentError> {
    // Mission-clock intruders played against a parked ownship.
    let mut tracks = Vec::new();
    for rec in scenario.intruders.iter().filter(|r| r.spawn_clock == SpawnClock::Mission) {
        let mut agent = IntruderAgent::new(rec.clone(), 0.0);
        let mut track = Vec::new();
        let steps = (until / dt).round() as usize;
        for k in 0..=steps {
            let t = k as f64 * dt;
            if let Some(s) = agent.advance(t, v1)? {
                track.push((t, s.pos, s.velocity));
            }
        }
        tracks.push(track);
    }
    Ok(tracks)
}

/// Take-off decision: the ground check against mission-clock intruders, or
/// an immediate departure on the planned route when CAS is off.
pub fn ground_decision(scenario: &Scenario, params: &SimParams) -> Result<GroundDecision, EngineError> {
    let planned = scenario.planned_route;
    if !params.cas_enabled {
        return Ok(GroundDecision::Depart { route: planned, delay_s: 0.0 });
    }
    let primary = scenario.route_enu(planned)?;
    let alternate_id = scenario.alternate_route();
    let alternate = match alternate_id {
        Some(id) => scenario.route_enu(id)?,
        None => Vec::new(),
    };
    let g = &scenario.ground;
    let horizon = g.wait_step * g.max_waits as f64;
    let tracks = on_ground_observations(scenario, EnuPoint::ORIGIN, horizon, params.dt)?;
    let observe = |t: f64| {
        tracks
            .iter()
            .filter_map(|tr| tr.iter().find(|s| (s.0 - t).abs() < params.dt * 0.5))
            .map(|s| (s.1, s.2))
            .collect::<Vec<_>>()
    };
    let decision = takeoff_delay_check(observe, EnuPoint::ORIGIN, &primary, &alternate, g);
    // The check names the planned route Route1 and the alternate Route2.
    Ok(match decision {
        GroundDecision::Depart { route: RouteId::Route2, delay_s } => match alternate_id {
            Some(alt) => GroundDecision::Depart { route: alt, delay_s },
            None => GroundDecision::Postponed,
        },
        GroundDecision::Depart { delay_s, .. } => GroundDecision::Depart { route: planned, delay_s },
        GroundDecision::Postponed => GroundDecision::Postponed,
    })
}

/// Mutable state of one run between ticks.
#[derive(Debug, Clone)]
pub struct World {
    pub t: f64,
    pub k: u64,
    pub t0: f64,
    pub own: OwnshipState,
    pub plan: FlightPlan,
    pub active: Option<ActiveManeuver>,
    pub machine: CdrMachine,
    pub intruders: Vec<IntruderAgent>,
    pub vertiports: Vec<(String, EnuPoint)>,
    /// Diversion candidates: every vertiport except the departure pad.
    pub landing_sites: Vec<(String, EnuPoint)>,
    pub terminal: Option<Terminal>,
    departed: bool,
}

impl World {
    /// World parked at V1, ready to take off at `t0` on `route`.
    pub fn new(scenario: &Scenario, route: RouteId, t0: f64) -> Result<Self, EngineError> {
        let waypoints = scenario.route_enu(route)?;
        let destination = scenario
            .destination_of(route)
            .ok_or_else(|| EngineError::Invalid(vec![format!("route {route} does not end at a vertiport")]))?;
        let plan = FlightPlan { route_id: route, waypoints, destination };
        let own = OwnshipState::on_ground(t0, &plan);
        let vertiports = scenario.vertiports_enu()?;
        let landing_sites = vertiports
            .iter()
            .filter(|(_, p)| p.horizontal_distance(own.pos) > scenario.perf.capture_radius)
            .cloned()
            .collect();
        Ok(Self {
            t: t0,
            k: 0,
            t0,
            own,
            plan,
            active: None,
            machine: CdrMachine::new(scenario.ownship_config, scenario.cdr),
            intruders: scenario.intruders.iter().map(|r| IntruderAgent::new(r.clone(), t0)).collect(),
            vertiports,
            landing_sites,
            terminal: None,
            departed: false,
        })
    }

    fn apply(&mut self, cmd: &ManeuverCommand, scenario: &Scenario) {
        match &cmd.action {
            ManeuverAction::ContinueFlight => self.active = None,
            ManeuverAction::RerouteTo(id) => {
                if let Some((_, p)) = self.vertiports.iter().find(|(v, _)| v == id) {
                    self.plan = FlightPlan::direct(self.own.pos, *p, id.clone());
                    self.own.next_waypoint_index = 1;
                    self.active = None;
                }
            }
            action => {
                let offset = match action {
                    ManeuverAction::LateralOffset(m) => *m,
                    _ => scenario.cdr.lateral_offset,
                };
                self.active = Some(ActiveManeuver::new(cmd.clone(), self.own.track, offset));
            }
        }
    }

    /// One tick. Returns the record of the state at the start of the tick, or
    /// `None` when the run has already ended.
    pub fn step(&mut self, scenario: &Scenario, params: &SimParams) -> Result<Option<TickRecord>, EngineError> {
        if self.terminal.is_some() {
            return Ok(None);
        }
        let t = self.t;
        let env = scenario.envelopes.for_mode(self.own.flight_mode);

        let mut seen = Vec::with_capacity(self.intruders.len());
        let mut kinds = Vec::with_capacity(self.intruders.len());
        for agent in &mut self.intruders {
            if let Some(s) = agent.advance(t, self.own.pos)? {
                let separation = s.pos.distance(self.own.pos);
                kinds.push(agent.record.kind);
                seen.push(IntruderTick {
                    id: agent.id().to_string(),
                    pos: s.pos,
                    velocity: s.velocity,
                    separation,
                    zone: classify(separation, &env),
                });
            }
        }

        if params.cas_enabled && self.own.flight_mode != FlightMode::Ground {
            let obs: Vec<CdrObservation> = seen
                .iter()
                .zip(&kinds)
                .map(|(i, kind)| CdrObservation {
                    id: i.id.clone(),
                    kind: *kind,
                    pos: i.pos,
                    velocity: i.velocity,
                    separation: i.separation,
                    zone: i.zone,
                })
                .collect();
            let out = self.machine.step(t, &self.own, &obs, &self.landing_sites);
            if out.resume_route {
                self.active = None;
            }
            for c in &out.commands {
                self.apply(c, scenario);
            }
        }

        let record = TickRecord {
            t,
            own: self.own,
            intruders: seen,
            phase: self.machine.phase(),
            command: self.active.as_ref().map(|a| a.command.clone()),
        };

        if record.intruders.iter().any(|i| i.separation <= params.contact_distance) {
            self.terminal = Some(Terminal::Collided);
            return Ok(Some(record));
        }
        if self.departed && self.own.flight_mode == FlightMode::Ground {
            let landed_on = self.own.pos.horizontal_distance(self.plan.destination_point()) <= scenario.perf.capture_radius;
            self.terminal = Some(if landed_on { Terminal::LandedAt(self.plan.destination.clone()) } else { Terminal::TimedOut });
            return Ok(Some(record));
        }
        if t - self.t0 >= params.max_sim_time - 1e-9 {
            self.terminal = Some(Terminal::TimedOut);
            return Ok(Some(record));
        }

        self.own = ownship_step(&self.own, &scenario.perf, &self.plan, self.active.as_ref(), params.dt)?;
        self.departed |= self.own.flight_mode != FlightMode::Ground;
        self.k += 1;
        // Integer tick count keeps the time axis free of accumulated rounding.
        self.t = self.t0 + self.k as f64 * params.dt;
        self.own.t = self.t;
        Ok(Some(record))
    }
}

/// Run a scenario to its terminal event.
pub fn run(scenario: &Scenario, params: &SimParams) -> Result<RunResult, EngineError> {
    scenario.validate().map_err(EngineError::Invalid)?;
    params.validate().map_err(|e| EngineError::Invalid(vec![e]))?;

    let decision = ground_decision(scenario, params)?;
    let (route, delay) = match decision {
        GroundDecision::Depart { route, delay_s } => (route, delay_s),
        GroundDecision::Postponed => {
            return Ok(RunResult {
                scenario_id: scenario.id.clone(),
                cas_enabled: params.cas_enabled,
                ticks: Vec::new(),
                terminal: Terminal::PostponedOnGround,
                ground_decision: decision,
                route_departed: None,
                departure_time: None,
                end_time: None,
            });
        }
    };

    let mut world = World::new(scenario, route, delay)?;
    let mut ticks = Vec::new();
    while let Some(rec) = world.step(scenario, params)? {
        ticks.push(rec);
    }
    let end_time = ticks.last().map(|t| t.t);
    Ok(RunResult {
        scenario_id: scenario.id.clone(),
        cas_enabled: params.cas_enabled,
        ticks,
        terminal: world.terminal.expect("loop ends on a terminal"),
        ground_decision: decision,
        route_departed: Some(route),
        departure_time: Some(delay),
        end_time,
    })
}

/// Run with the scenario's own sim parameters, overriding CAS on/off.
pub fn run_with_cas(scenario: &Scenario, cas_enabled: bool) -> Result<RunResult, EngineError> {
    let params = SimParams { cas_enabled, ..scenario.sim };
    run(scenario, &params)
}
