//! Line-oriented scenario format.
//!
//! ```text
//! SCENARIO sc01
//! OWNSHIP VECTORED_THRUST
//! VERTIPORT V1 48.3538 11.7861 EDDM
//! ROUTE ROUTE1 V1 48.24335,11.72789 V2
//! PLAN ROUTE1
//! INTRUDER d1 DRONE PREDICTABLE SCRIPT LINGER start=600,9000,304.8 heading=90 speed=20 linger=500
//! SPAWN d1 AT 120 DEPARTURE
//! SET warning_radius 1000
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use super::{load_trajectory_csv, Scenario};
use crate::agents::{
    EncounterTag, HeadOnStrategy, IntruderBehavior, IntruderKind, IntruderRecord, IntruderSource, OwnshipConfig,
    ScriptMode, ScriptedBehavior, SpawnClock,
};
use crate::envelopes::{EnvelopeProfile, Zone};
use crate::geo::{EnuPoint, GeoPoint, Route, RouteId, Vertiport, FEET_TO_METERS};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// 1-based line (or data row); 0 when not tied to a line.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

impl std::error::Error for ParseError {}

/// Every error found in one file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioErrors(pub Vec<ParseError>);

impl fmt::Display for ScenarioErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ScenarioErrors {}

fn num(line: usize, s: &str, errs: &mut Vec<ParseError>) -> Option<f64> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => {
            errs.push(ParseError::new(line, format!("malformed number {s:?}")));
            None
        }
    }
}

/// Length with an optional `ft` suffix, in metres.
fn length(line: usize, s: &str, errs: &mut Vec<ParseError>) -> Option<f64> {
    match s.strip_suffix("ft") {
        Some(v) => num(line, v, errs).map(|x| x * FEET_TO_METERS),
        None => num(line, s.strip_suffix('m').unwrap_or(s), errs),
    }
}

fn triple(line: usize, s: &str, errs: &mut Vec<ParseError>) -> Option<EnuPoint> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        errs.push(ParseError::new(line, format!("expected east,north,up, got {s:?}")));
        return None;
    }
    let e = num(line, parts[0], errs)?;
    let n = num(line, parts[1], errs)?;
    let u = num(line, parts[2], errs)?;
    Some(EnuPoint::new(e, n, u))
}

fn boolean(line: usize, s: &str, errs: &mut Vec<ParseError>) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Some(true),
        "false" | "off" | "no" | "0" => Some(false),
        _ => {
            errs.push(ParseError::new(line, format!("expected a boolean, got {s:?}")));
            None
        }
    }
}

enum Waypoint {
    Port(String),
    Point(f64, f64),
}

struct RawRoute {
    line: usize,
    id: RouteId,
    points: Vec<Waypoint>,
}

struct RawSet {
    line: usize,
    key: String,
    value: String,
}

enum RawSource {
    Csv(String),
    Script(ScriptedBehavior),
}

struct RawIntruder {
    line: usize,
    id: String,
    kind: IntruderKind,
    behavior: IntruderBehavior,
    source: RawSource,
}

const PERF_KEYS: &[&str] = &[
    "cruise_speed",
    "climb_rate",
    "descent_rate",
    "cruise_alt",
    "turn_rate",
    "hover_capable",
    "head_on_strategy",
    "capture_radius",
];

fn parse_script(line: usize, args: &[&str], errs: &mut Vec<ParseError>) -> Option<ScriptedBehavior> {
    let Some((mode, rest)) = args.split_first() else {
        errs.push(ParseError::new(line, "SCRIPT needs a mode"));
        return None;
    };
    let mode = match mode.to_ascii_uppercase().as_str() {
        "PASSBY" => ScriptMode::PassBy,
        "LINGER" => ScriptMode::Linger,
        "PURSUIT" => ScriptMode::Pursuit,
        other => {
            errs.push(ParseError::new(line, format!("unknown script mode {other:?}")));
            return None;
        }
    };
    let mut s = ScriptedBehavior {
        mode,
        start: EnuPoint::ORIGIN,
        heading_deg: 0.0,
        speed: 0.0,
        linger_duration: 0.0,
        offset: 0.0,
        pursuit_duration: None,
        lifetime: None,
    };
    let (mut has_start, mut has_speed) = (false, false);
    let before = errs.len();
    for arg in rest {
        let Some((k, v)) = arg.split_once('=') else {
            errs.push(ParseError::new(line, format!("script argument {arg:?} is not key=value")));
            continue;
        };
        match k {
            "start" => {
                if let Some(p) = triple(line, v, errs) {
                    s.start = p;
                    has_start = true;
                }
            }
            "heading" => s.heading_deg = num(line, v, errs).unwrap_or(0.0),
            "speed" => {
                s.speed = num(line, v, errs).unwrap_or(0.0);
                has_speed = true;
            }
            "offset" => s.offset = length(line, v, errs).unwrap_or(0.0),
            "linger" => s.linger_duration = num(line, v, errs).unwrap_or(0.0),
            "chase" => s.pursuit_duration = num(line, v, errs),
            "lifetime" => s.lifetime = num(line, v, errs),
            other => errs.push(ParseError::new(line, format!("unknown script argument {other:?}"))),
        }
    }
    if !has_start {
        errs.push(ParseError::new(line, "script needs start=east,north,up"));
    }
    if !has_speed {
        errs.push(ParseError::new(line, "script needs speed="));
    }
    if errs.len() > before {
        return None;
    }
    if let Err(e) = s.validate() {
        errs.push(ParseError::new(line, e));
        return None;
    }
    Some(s)
}

/// Parse a scenario. CSV trajectory paths resolve against `base_dir`.
pub fn parse_scenario(text: &str, base_dir: Option<&Path>) -> Result<Scenario, ScenarioErrors> {
    let mut errs = Vec::new();
    let mut id: Option<String> = None;
    let mut config: Option<(usize, OwnshipConfig)> = None;
    let mut plan: Option<RouteId> = None;
    let mut vertiports: Vec<Vertiport> = Vec::new();
    let mut routes: Vec<RawRoute> = Vec::new();
    let mut sets: Vec<RawSet> = Vec::new();
    let mut intruders: Vec<RawIntruder> = Vec::new();
    let mut spawns: Vec<(usize, String, f64, SpawnClock)> = Vec::new();
    let mut encounters: Vec<(usize, String, EncounterTag)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tok: Vec<&str> = content.split_whitespace().collect();
        let args = &tok[1..];
        match tok[0].to_ascii_uppercase().as_str() {
            "SCENARIO" => match args {
                [name] => id = Some(name.to_string()),
                _ => errs.push(ParseError::new(line, "SCENARIO takes one id")),
            },
            "OWNSHIP" => match args {
                [c] => match OwnshipConfig::parse(c) {
                    Some(c) => config = Some((line, c)),
                    None => errs.push(ParseError::new(line, format!("unknown config {c:?}"))),
                },
                _ => errs.push(ParseError::new(line, "OWNSHIP takes one configuration")),
            },
            "VERTIPORT" => {
                if args.len() < 3 {
                    errs.push(ParseError::new(line, "VERTIPORT <id> <lat> <lon> [name]"));
                    continue;
                }
                let (Some(lat), Some(lon)) = (num(line, args[1], &mut errs), num(line, args[2], &mut errs)) else {
                    continue;
                };
                match GeoPoint::new(lat, lon, 0.0) {
                    Ok(position) => vertiports.push(Vertiport {
                        id: args[0].to_string(),
                        name: args[3..].join(" "),
                        position,
                    }),
                    Err(e) => errs.push(ParseError::new(line, e.to_string())),
                }
            }
            "ROUTE" => {
                let Some((rid, pts)) = args.split_first() else {
                    errs.push(ParseError::new(line, "ROUTE <id> <waypoint>..."));
                    continue;
                };
                let Some(rid) = RouteId::parse(rid) else {
                    errs.push(ParseError::new(line, format!("unknown route {rid:?}")));
                    continue;
                };
                let mut points = Vec::new();
                for p in pts {
                    match p.split_once(',') {
                        Some((a, b)) => {
                            if let (Some(lat), Some(lon)) = (num(line, a, &mut errs), num(line, b, &mut errs)) {
                                points.push(Waypoint::Point(lat, lon));
                            }
                        }
                        None => points.push(Waypoint::Port(p.to_string())),
                    }
                }
                routes.push(RawRoute { line, id: rid, points });
            }
            "PLAN" => match args {
                [r] => match RouteId::parse(r) {
                    Some(r) => plan = Some(r),
                    None => errs.push(ParseError::new(line, format!("unknown route {r:?}"))),
                },
                _ => errs.push(ParseError::new(line, "PLAN takes one route id")),
            },
            "INTRUDER" => {
                if args.len() < 5 {
                    errs.push(ParseError::new(line, "INTRUDER <id> <kind> <behavior> <CSV path | SCRIPT ...>"));
                    continue;
                }
                let kind = match args[1].to_ascii_uppercase().as_str() {
                    "DRONE" => Some(IntruderKind::Drone),
                    "BIRD" => Some(IntruderKind::Bird),
                    k => {
                        errs.push(ParseError::new(line, format!("unknown intruder kind {k:?}")));
                        None
                    }
                };
                let behavior = match args[2].to_ascii_uppercase().as_str() {
                    "PREDICTABLE" => Some(IntruderBehavior::Predictable),
                    "UNPREDICTABLE" => Some(IntruderBehavior::Unpredictable),
                    b => {
                        errs.push(ParseError::new(line, format!("unknown behavior {b:?}")));
                        None
                    }
                };
                let source = match args[3].to_ascii_uppercase().as_str() {
                    "CSV" => match &args[4..] {
                        [p] => Some(RawSource::Csv(p.to_string())),
                        _ => {
                            errs.push(ParseError::new(line, "CSV takes one path"));
                            None
                        }
                    },
                    "SCRIPT" => parse_script(line, &args[4..], &mut errs).map(RawSource::Script),
                    s => {
                        errs.push(ParseError::new(line, format!("unknown intruder source {s:?}")));
                        None
                    }
                };
                if let (Some(kind), Some(behavior), Some(source)) = (kind, behavior, source) {
                    intruders.push(RawIntruder { line, id: args[0].to_string(), kind, behavior, source });
                }
            }
            "SPAWN" => match args {
                [iid, at, t, rest @ ..] if at.eq_ignore_ascii_case("AT") => {
                    let clock = match rest {
                        [] => Some(SpawnClock::Mission),
                        [c] if c.eq_ignore_ascii_case("DEPARTURE") => Some(SpawnClock::Departure),
                        [c] if c.eq_ignore_ascii_case("MISSION") => Some(SpawnClock::Mission),
                        _ => {
                            errs.push(ParseError::new(line, "SPAWN clock must be MISSION or DEPARTURE"));
                            None
                        }
                    };
                    if let (Some(t), Some(clock)) = (num(line, t, &mut errs), clock) {
                        spawns.push((line, iid.to_string(), t, clock));
                    }
                }
                _ => errs.push(ParseError::new(line, "SPAWN <id> AT <t> [DEPARTURE]")),
            },
            "ENCOUNTER" => match args {
                [iid, l, n, d, dir] if l.eq_ignore_ascii_case("LOCATION") && d.eq_ignore_ascii_case("DIRECTION") => {
                    match n.parse::<u8>() {
                        Ok(location) => encounters.push((
                            line,
                            iid.to_string(),
                            EncounterTag { location, direction: dir.to_ascii_lowercase() },
                        )),
                        Err(_) => errs.push(ParseError::new(line, format!("malformed location {n:?}"))),
                    }
                }
                _ => errs.push(ParseError::new(line, "ENCOUNTER <id> LOCATION <n> DIRECTION <dir>")),
            },
            "SET" => match args {
                [k, v] => sets.push(RawSet { line, key: k.to_ascii_lowercase(), value: v.to_string() }),
                _ => errs.push(ParseError::new(line, "SET <key> <value>")),
            },
            other => errs.push(ParseError::new(line, format!("unknown directive {other:?}"))),
        }
    }

    if config.is_none() {
        errs.push(ParseError::new(0, "missing OWNSHIP directive"));
    }
    if plan.is_none() {
        errs.push(ParseError::new(0, "missing PLAN directive"));
    }
    if vertiports.len() < 2 {
        errs.push(ParseError::new(0, "at least two VERTIPORT directives are required"));
    }
    let config = config.map(|c| c.1).unwrap_or(OwnshipConfig::VectoredThrust);
    let mut sc = Scenario::empty(id.unwrap_or_else(|| "unnamed".into()), config);
    sc.vertiports = vertiports;
    sc.planned_route = plan.unwrap_or(RouteId::Route1);

    // Performance first: the envelope defaults follow from it.
    for s in sets.iter().filter(|s| PERF_KEYS.contains(&s.key.as_str())) {
        apply_set(&mut sc, s, &mut errs);
    }
    sc.envelopes = EnvelopeProfile::from_performance(&sc.perf);
    for s in sets.iter().filter(|s| !PERF_KEYS.contains(&s.key.as_str())) {
        apply_set(&mut sc, s, &mut errs);
    }

    for r in routes {
        let mut waypoints = Vec::new();
        for w in &r.points {
            match w {
                Waypoint::Port(pid) => match sc.vertiport(pid) {
                    Some(v) => waypoints.push(v.position),
                    None => errs.push(ParseError::new(r.line, format!("unknown vertiport {pid:?}"))),
                },
                Waypoint::Point(lat, lon) => match GeoPoint::new(*lat, *lon, 0.0) {
                    Ok(p) => waypoints.push(p),
                    Err(e) => errs.push(ParseError::new(r.line, e.to_string())),
                },
            }
        }
        if sc.routes.iter().any(|x| x.id == r.id) {
            errs.push(ParseError::new(r.line, format!("route {} defined twice", r.id)));
        }
        sc.routes.push(Route { id: r.id, waypoints, cruise_alt: sc.perf.cruise_alt });
    }
    sc.routes.sort_by_key(|r| r.id);

    let origin = sc.origin();
    for ri in intruders {
        let source = match ri.source {
            RawSource::Script(s) => IntruderSource::Scripted(s),
            RawSource::Csv(p) => {
                let full: PathBuf = match base_dir {
                    Some(b) => b.join(&p),
                    None => PathBuf::from(&p),
                };
                let Some(o) = origin else { continue };
                match load_trajectory_csv(&full, o) {
                    Ok(trajectory) => IntruderSource::CsvTrajectory { path: p, trajectory },
                    Err(e) => {
                        errs.push(ParseError::new(ri.line, format!("{}: {}", full.display(), e)));
                        continue;
                    }
                }
            }
        };
        sc.intruders.push(IntruderRecord {
            id: ri.id,
            kind: ri.kind,
            behavior: ri.behavior,
            source,
            spawn_time: 0.0,
            spawn_clock: SpawnClock::Mission,
            encounter: None,
        });
    }
    for (line, iid, t, clock) in spawns {
        match sc.intruders.iter_mut().find(|r| r.id == iid) {
            Some(r) => {
                r.spawn_time = t;
                r.spawn_clock = clock;
            }
            None => errs.push(ParseError::new(line, format!("SPAWN for unknown intruder {iid:?}"))),
        }
    }
    for (line, iid, tag) in encounters {
        match sc.intruders.iter_mut().find(|r| r.id == iid) {
            Some(r) => r.encounter = Some(tag),
            None => errs.push(ParseError::new(line, format!("ENCOUNTER for unknown intruder {iid:?}"))),
        }
    }

    if errs.is_empty() {
        Ok(sc)
    } else {
        errs.sort_by_key(|e| e.line);
        Err(ScenarioErrors(errs))
    }
}

pub fn parse_scenario_file(path: &Path) -> Result<Scenario, ScenarioErrors> {
    let text = fs::read_to_string(path)
        .map_err(|e| ScenarioErrors(vec![ParseError::new(0, format!("cannot read {}: {e}", path.display()))]))?;
    parse_scenario(&text, path.parent())
}

/// Apply an override file (`SET` lines and comments only) on top of a parsed
/// scenario. Radii are not recomputed from changed performance values.
pub fn apply_overrides(sc: &mut Scenario, text: &str) -> Result<(), ScenarioErrors> {
    let mut errs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks.as_slice() {
            [d, k, v] if d.eq_ignore_ascii_case("SET") => {
                apply_set(sc, &RawSet { line, key: k.to_ascii_lowercase(), value: v.to_string() }, &mut errs)
            }
            _ => errs.push(ParseError::new(line, "override files accept only SET <key> <value>")),
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(ScenarioErrors(errs))
    }
}

fn apply_set(sc: &mut Scenario, s: &RawSet, errs: &mut Vec<ParseError>) {
    let line = s.line;
    let v = s.value.as_str();
    macro_rules! len {
        ($field:expr) => {
            if let Some(x) = length(line, v, errs) {
                $field = x;
            }
        };
    }
    macro_rules! plain {
        ($field:expr) => {
            if let Some(x) = num(line, v, errs) {
                $field = x;
            }
        };
    }
    match s.key.as_str() {
        "cruise_speed" => plain!(sc.perf.cruise_speed),
        "climb_rate" => plain!(sc.perf.climb_rate),
        "descent_rate" => plain!(sc.perf.descent_rate),
        "cruise_alt" => len!(sc.perf.cruise_alt),
        "turn_rate" => plain!(sc.perf.turn_rate),
        "capture_radius" => len!(sc.perf.capture_radius),
        "hover_capable" => {
            if let Some(b) = boolean(line, v, errs) {
                sc.perf.hover_capable = b;
            }
        }
        "head_on_strategy" => match v.to_ascii_uppercase().as_str() {
            "DESCEND" => sc.perf.head_on_strategy = HeadOnStrategy::Descend,
            "TURN_RIGHT" => sc.perf.head_on_strategy = HeadOnStrategy::TurnRight,
            _ => errs.push(ParseError::new(line, format!("unknown head-on strategy {v:?}"))),
        },
        "caution_radius" => len!(sc.envelopes.forward.caution_radius),
        "warning_radius" => len!(sc.envelopes.forward.warning_radius),
        "collision_radius" => len!(sc.envelopes.forward.collision_radius),
        "vertical_caution_radius" => len!(sc.envelopes.vertical.caution_radius),
        "vertical_warning_radius" => len!(sc.envelopes.vertical.warning_radius),
        "vertical_collision_radius" => len!(sc.envelopes.vertical.collision_radius),
        "detect_duration" => plain!(sc.cdr.detect_duration),
        "hold_duration" => plain!(sc.cdr.hold_duration),
        "tactical_trigger_zone" => match v.to_ascii_uppercase().as_str() {
            "CAUTION" => sc.cdr.tactical_trigger_zone = Zone::Caution,
            "WARNING" => sc.cdr.tactical_trigger_zone = Zone::Warning,
            "COLLISION" => sc.cdr.tactical_trigger_zone = Zone::Collision,
            _ => errs.push(ParseError::new(line, format!("invalid trigger zone {v:?}"))),
        },
        "head_on_half_angle" => plain!(sc.cdr.head_on_half_angle),
        "same_dir_half_angle" => plain!(sc.cdr.same_dir_half_angle),
        "turn_angle" => plain!(sc.cdr.turn_angle),
        "lateral_offset" => len!(sc.cdr.lateral_offset),
        "emergency_offset_factor" => plain!(sc.cdr.emergency_offset_factor),
        "descent_altitude" => len!(sc.cdr.descent_altitude),
        "overhead_radius" => len!(sc.ground.overhead_radius),
        "corridor_half_width" => len!(sc.ground.corridor_half_width),
        "lookahead" => plain!(sc.ground.lookahead),
        "wait_step" => plain!(sc.ground.wait_step),
        "reroute_buffer" => plain!(sc.ground.reroute_buffer),
        "max_waits" => match v.parse::<u32>() {
            Ok(n) => sc.ground.max_waits = n,
            Err(_) => errs.push(ParseError::new(line, format!("malformed integer {v:?}"))),
        },
        "dt" => plain!(sc.sim.dt),
        "max_sim_time" => plain!(sc.sim.max_sim_time),
        "contact_distance" => len!(sc.sim.contact_distance),
        "cas_enabled" => {
            if let Some(b) = boolean(line, v, errs) {
                sc.sim.cas_enabled = b;
            }
        }
        other => errs.push(ParseError::new(line, format!("unknown parameter {other:?}"))),
    }
}

fn waypoint_token(sc: &Scenario, p: &GeoPoint) -> String {
    match sc.vertiports.iter().find(|v| v.position.lat == p.lat && v.position.lon == p.lon) {
        Some(v) => v.id.clone(),
        None => format!("{},{}", p.lat, p.lon),
    }
}

/// Inverse of [`parse_scenario`]: every tunable is written out.
pub fn serialize_scenario(sc: &Scenario) -> String {
    let mut out = Vec::new();
    out.push(format!("SCENARIO {}", sc.id));
    out.push(format!("OWNSHIP {}", sc.ownship_config.keyword()));
    for v in &sc.vertiports {
        let name = if v.name.is_empty() { String::new() } else { format!(" {}", v.name) };
        out.push(format!("VERTIPORT {} {} {}{}", v.id, v.position.lat, v.position.lon, name));
    }
    for r in &sc.routes {
        let pts: Vec<String> = r.waypoints.iter().map(|p| waypoint_token(sc, p)).collect();
        out.push(format!("ROUTE {} {}", r.id.keyword(), pts.join(" ")));
    }
    out.push(format!("PLAN {}", sc.planned_route.keyword()));

    let p = &sc.perf;
    let strategy = match p.head_on_strategy {
        HeadOnStrategy::Descend => "DESCEND",
        HeadOnStrategy::TurnRight => "TURN_RIGHT",
    };
    let e = &sc.envelopes;
    let c = &sc.cdr;
    let g = &sc.ground;
    let s = &sc.sim;
    let sets: Vec<(&str, String)> = vec![
        ("cruise_speed", p.cruise_speed.to_string()),
        ("climb_rate", p.climb_rate.to_string()),
        ("descent_rate", p.descent_rate.to_string()),
        ("cruise_alt", p.cruise_alt.to_string()),
        ("turn_rate", p.turn_rate.to_string()),
        ("hover_capable", p.hover_capable.to_string()),
        ("head_on_strategy", strategy.to_string()),
        ("capture_radius", p.capture_radius.to_string()),
        ("caution_radius", e.forward.caution_radius.to_string()),
        ("warning_radius", e.forward.warning_radius.to_string()),
        ("collision_radius", e.forward.collision_radius.to_string()),
        ("vertical_caution_radius", e.vertical.caution_radius.to_string()),
        ("vertical_warning_radius", e.vertical.warning_radius.to_string()),
        ("vertical_collision_radius", e.vertical.collision_radius.to_string()),
        ("detect_duration", c.detect_duration.to_string()),
        ("hold_duration", c.hold_duration.to_string()),
        ("tactical_trigger_zone", c.tactical_trigger_zone.keyword().to_string()),
        ("head_on_half_angle", c.head_on_half_angle.to_string()),
        ("same_dir_half_angle", c.same_dir_half_angle.to_string()),
        ("turn_angle", c.turn_angle.to_string()),
        ("lateral_offset", c.lateral_offset.to_string()),
        ("emergency_offset_factor", c.emergency_offset_factor.to_string()),
        ("descent_altitude", c.descent_altitude.to_string()),
        ("overhead_radius", g.overhead_radius.to_string()),
        ("corridor_half_width", g.corridor_half_width.to_string()),
        ("lookahead", g.lookahead.to_string()),
        ("wait_step", g.wait_step.to_string()),
        ("reroute_buffer", g.reroute_buffer.to_string()),
        ("max_waits", g.max_waits.to_string()),
        ("dt", s.dt.to_string()),
        ("max_sim_time", s.max_sim_time.to_string()),
        ("cas_enabled", s.cas_enabled.to_string()),
        ("contact_distance", s.contact_distance.to_string()),
    ];
    for (k, v) in sets {
        out.push(format!("SET {k} {v}"));
    }

    for r in &sc.intruders {
        let src = match &r.source {
            IntruderSource::CsvTrajectory { path, .. } => format!("CSV {path}"),
            IntruderSource::Scripted(s) => {
                let mut a = format!(
                    "SCRIPT {} start={},{},{} heading={} speed={}",
                    s.mode.keyword(),
                    s.start.east,
                    s.start.north,
                    s.start.up,
                    s.heading_deg,
                    s.speed
                );
                if s.offset != 0.0 {
                    a.push_str(&format!(" offset={}", s.offset));
                }
                if s.linger_duration != 0.0 {
                    a.push_str(&format!(" linger={}", s.linger_duration));
                }
                if let Some(c) = s.pursuit_duration {
                    a.push_str(&format!(" chase={c}"));
                }
                if let Some(l) = s.lifetime {
                    a.push_str(&format!(" lifetime={l}"));
                }
                a
            }
        };
        out.push(format!("INTRUDER {} {} {} {}", r.id, r.kind.keyword(), r.behavior.keyword(), src));
        let clock = match r.spawn_clock {
            SpawnClock::Mission => "",
            SpawnClock::Departure => " DEPARTURE",
        };
        out.push(format!("SPAWN {} AT {}{}", r.id, r.spawn_time, clock));
        if let Some(tag) = &r.encounter {
            out.push(format!("ENCOUNTER {} LOCATION {} DIRECTION {}", r.id, tag.location, tag.direction));
        }
    }
    let mut s = out.join("\n");
    s.push('\n');
    s
}
