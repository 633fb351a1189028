//! The shipped pack: two reference flights, five ground-phase setups and
//! fourteen airborne encounters.

use std::fs;
use std::io;
use std::path::Path;

use super::{serialize_scenario, Scenario};
use crate::agents::{
    EncounterTag, IntruderBehavior, IntruderKind, IntruderRecord, IntruderSource, OwnshipConfig, ScriptMode,
    ScriptedBehavior, SpawnClock, Trajectory,
};
use crate::geo::{normalize_deg, point_along_path, EnuPoint, GeoPoint, Route, RouteId, Vec3, Vertiport};

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPack {
    pub scenarios: Vec<Scenario>,
}

impl ScenarioPack {
    pub fn get(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.scenarios.iter().map(|s| s.id.as_str()).collect()
    }

    /// Write every scenario as `<id>.scn` plus any trajectory CSVs it uses.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for sc in &self.scenarios {
            fs::write(dir.join(format!("{}.scn", sc.id)), serialize_scenario(sc))?;
            for r in &sc.intruders {
                if let IntruderSource::CsvTrajectory { path, trajectory } = &r.source {
                    fs::write(dir.join(path), trajectory_csv_text(trajectory))?;
                }
            }
        }
        Ok(())
    }
}

pub fn trajectory_csv_text(t: &Trajectory) -> String {
    let mut s = String::from("t_s,east_m,north_m,up_m\n");
    for (time, p) in t.samples() {
        s.push_str(&format!("{},{},{},{}\n", time, p.east, p.north, p.up));
    }
    s
}

/// Encounter locations as (route, fraction of route length).
pub const LOCATION_FRACTIONS: [(RouteId, f64); 4] =
    [(RouteId::Route1, 0.35), (RouteId::Route1, 0.65), (RouteId::Route2, 0.40), (RouteId::Route2, 0.75)];

const V1: (f64, f64) = (48.3537, 11.7860);
const V2: (f64, f64) = (48.16205, 11.60146);
const V3: (f64, f64) = (48.2394, 11.5614);
const ROUTE1_SHAPING: (f64, f64) = (48.24335, 11.72789);

fn geo(p: (f64, f64)) -> GeoPoint {
    GeoPoint { lat: p.0, lon: p.1, alt: 0.0 }
}

fn base(id: &str, plan: RouteId) -> Scenario {
    let mut sc = Scenario::empty(id, OwnshipConfig::VectoredThrust);
    sc.vertiports = vec![
        Vertiport { id: "V1".into(), name: "EDDM".into(), position: geo(V1) },
        Vertiport { id: "V2".into(), name: "MUC HBF".into(), position: geo(V2) },
        Vertiport { id: "V3".into(), name: "EDNX".into(), position: geo(V3) },
    ];
    let alt = sc.perf.cruise_alt;
    sc.routes = vec![
        Route { id: RouteId::Route1, waypoints: vec![geo(V1), geo(ROUTE1_SHAPING), geo(V2)], cruise_alt: alt },
        Route { id: RouteId::Route2, waypoints: vec![geo(V1), geo(V3), geo(V2)], cruise_alt: alt },
    ];
    sc.planned_route = plan;
    sc
}

/// Point on a route at `along` metres, at cruise altitude, with the route
/// heading there.
fn on_route(sc: &Scenario, route: RouteId, along: f64) -> (EnuPoint, f64) {
    let path = sc.route_enu(route).expect("pack routes project");
    let (p, dir) = point_along_path(&path, along).expect("non-empty route");
    (p.with_up(sc.perf.cruise_alt), dir.heading().expect("route segment has a heading"))
}

fn route_len(sc: &Scenario, route: RouteId) -> f64 {
    crate::geo::path_length(&sc.route_enu(route).expect("pack routes project"))
}

/// Encounter location `n` (1-based) of the pack geometry.
pub fn pack_locations(sc: &Scenario) -> Vec<(RouteId, f64, EnuPoint, f64)> {
    LOCATION_FRACTIONS
        .iter()
        .map(|&(r, f)| {
            let along = f * route_len(sc, r);
            let (p, h) = on_route(sc, r, along);
            (r, along, p, h)
        })
        .collect()
}

/// Departure-relative time at which the ownship reaches `along` metres.
fn reach_time(sc: &Scenario, along: f64) -> f64 {
    sc.perf.cruise_alt / sc.perf.climb_rate + along / sc.perf.cruise_speed
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// `p` shifted `fwd` metres along heading `h` and `right` metres to starboard.
fn shifted(p: EnuPoint, h: f64, fwd: f64, right: f64) -> EnuPoint {
    let f = Vec3::from_heading(h);
    let r = Vec3::from_heading(h + 90.0);
    let q = p.add(f.scale(fwd)).add(r.scale(right));
    EnuPoint::new(round1(q.east), round1(q.north), round1(q.up))
}

struct Script {
    mode: ScriptMode,
    start: EnuPoint,
    heading: f64,
    speed: f64,
    linger: f64,
    chase: Option<f64>,
    lifetime: Option<f64>,
}

fn scripted(s: Script) -> IntruderSource {
    IntruderSource::Scripted(ScriptedBehavior {
        mode: s.mode,
        start: s.start,
        heading_deg: round1(normalize_deg(s.heading)),
        speed: s.speed,
        linger_duration: s.linger,
        offset: 0.0,
        pursuit_duration: s.chase,
        lifetime: s.lifetime,
    })
}

fn intruder(
    id: &str,
    kind: IntruderKind,
    behavior: IntruderBehavior,
    source: IntruderSource,
    spawn_time: f64,
    spawn_clock: SpawnClock,
    encounter: Option<(u8, &str)>,
) -> IntruderRecord {
    IntruderRecord {
        id: id.into(),
        kind,
        behavior,
        source,
        spawn_time: round1(spawn_time),
        spawn_clock,
        encounter: encounter.map(|(location, d)| EncounterTag { location, direction: d.into() }),
    }
}

/// Hovering drone parked beside a route on the mission clock.
fn ground_blocker(sc: &Scenario, id: &str, route: RouteId, along: f64, lifetime: Option<f64>) -> IntruderRecord {
    let (p, h) = on_route(sc, route, along);
    let start = shifted(p.with_up(100.0), h, 0.0, 500.0);
    intruder(
        id,
        IntruderKind::Drone,
        IntruderBehavior::Predictable,
        scripted(Script {
            mode: ScriptMode::Linger,
            start,
            heading: h + 90.0,
            speed: 20.0,
            linger: 100_000.0,
            chase: None,
            lifetime,
        }),
        0.0,
        SpawnClock::Mission,
        None,
    )
}

const BLOCKER_ALONG_M: f64 = 8_000.0;
/// Route-2 blocker sits far enough out that a flight departing at once passes
/// it after it has gone.
const ROUTE2_BLOCKER_ALONG_M: f64 = 19_000.0;

/// Ground intruders giving a 300 s delay on route 1.
fn delay_300(sc: &mut Scenario) {
    let b = ground_blocker(sc, "g1", RouteId::Route1, BLOCKER_ALONG_M, Some(250.0));
    sc.intruders.push(b);
}

/// Ground intruders giving a 660 s delay and a switch to route 2.
fn delay_660(sc: &mut Scenario) {
    let a = ground_blocker(sc, "g1", RouteId::Route1, BLOCKER_ALONG_M, Some(620.0));
    let b = ground_blocker(sc, "g2", RouteId::Route2, ROUTE2_BLOCKER_ALONG_M, Some(400.0));
    sc.intruders.extend([a, b]);
}

fn reference(id: &str, route: RouteId) -> Scenario {
    base(id, route)
}

fn ground_setups() -> Vec<Scenario> {
    let mut g1 = base("ground-1", RouteId::Route1);
    g1.intruders.push(intruder(
        "g1",
        IntruderKind::Drone,
        IntruderBehavior::Predictable,
        scripted(Script {
            mode: ScriptMode::PassBy,
            start: EnuPoint::new(0.0, 5_000.0, 150.0),
            heading: 20.0,
            speed: 20.0,
            linger: 0.0,
            chase: None,
            lifetime: Some(900.0),
        }),
        0.0,
        SpawnClock::Mission,
        None,
    ));

    let mut g2 = base("ground-2", RouteId::Route1);
    delay_300(&mut g2);

    let mut g3 = base("ground-3", RouteId::Route1);
    let b = ground_blocker(&g3, "g1", RouteId::Route1, BLOCKER_ALONG_M, None);
    g3.intruders.push(b);

    let mut g4 = base("ground-4", RouteId::Route1);
    delay_660(&mut g4);

    let mut g5 = base("ground-5", RouteId::Route1);
    g5.intruders.push(intruder(
        "g1",
        IntruderKind::Drone,
        IntruderBehavior::Predictable,
        scripted(Script {
            mode: ScriptMode::Linger,
            start: EnuPoint::new(300.0, 0.0, 100.0),
            heading: 0.0,
            speed: 20.0,
            linger: 100_000.0,
            chase: None,
            lifetime: None,
        }),
        0.0,
        SpawnClock::Mission,
        None,
    ));
    vec![g1, g2, g3, g4, g5]
}

const SC14_GAP_M: f64 = 400.0;

/// Linger duration of the right-approach drones, s.
pub const LINGER_S: f64 = 500.0;

/// Same-direction drone that drifts toward the ownship's parallel path after
/// `straight_s`, sampled every second.
fn drifting_drone(start: EnuPoint, h: f64, straight_s: f64, drift_s: f64, total_s: f64) -> Trajectory {
    let fwd = Vec3::from_heading(h).scale(20.0);
    let drift = Vec3::from_heading(h + 60.0).scale(20.0);
    let mut samples = Vec::new();
    let mut p = start;
    let mut t = 0.0;
    while t <= total_s {
        samples.push((t, EnuPoint::new(round1(p.east), round1(p.north), round1(p.up))));
        let v = if t >= straight_s && t < straight_s + drift_s { drift } else { fwd };
        p = p.add(v);
        t += 1.0;
    }
    Trajectory::new(samples).expect("monotonic samples")
}

fn airborne(n: u8) -> Scenario {
    use IntruderBehavior::{Predictable as Pred, Unpredictable as Unpred};
    use IntruderKind::{Bird, Drone};

    let id = format!("sc{n:02}");
    let (location, route) = match n {
        11 => (2u8, RouteId::Route1),
        12 => (3, RouteId::Route2),
        13 => (4, RouteId::Route2),
        _ => (1, RouteId::Route1),
    };
    let mut sc = base(&id, route);
    if route == RouteId::Route2 {
        // Route 2 is reached through the ground check, not planned.
        sc.planned_route = RouteId::Route1;
        delay_660(&mut sc);
    } else {
        delay_300(&mut sc);
    }
    let (_, along, p, h) = pack_locations(&sc)[location as usize - 1];
    let tag = |d| Some((location, d));
    let dep = SpawnClock::Departure;

    let rec = match n {
        // Hovering drone off the starboard side.
        1 | 2 => {
            let spawn = reach_time(&sc, along - 1800.0);
            let (mode, behavior, heading, chase) = if n == 1 {
                (ScriptMode::Linger, Pred, h + 90.0, None)
            } else {
                (ScriptMode::Pursuit, Unpred, h + 150.0, Some(60.0))
            };
            intruder(
                "d1",
                Drone,
                behavior,
                scripted(Script {
                    mode,
                    start: shifted(p, h, 0.0, 600.0),
                    heading,
                    speed: 20.0,
                    linger: LINGER_S,
                    chase,
                    lifetime: None,
                }),
                spawn,
                dep,
                tag("right"),
            )
        }
        // Crossing from port, well clear of the ownship's path.
        3 => {
            let spawn = reach_time(&sc, along) - 60.0;
            intruder(
                "d1",
                Drone,
                Pred,
                scripted(Script {
                    mode: ScriptMode::PassBy,
                    start: shifted(p, h, 0.0, -2700.0),
                    heading: h + 90.0,
                    speed: 20.0,
                    linger: 0.0,
                    chase: None,
                    lifetime: Some(400.0),
                }),
                spawn,
                dep,
                tag("left"),
            )
        }
        // Port-side drone that closes in.
        4 => {
            let spawn = reach_time(&sc, along - 1200.0);
            intruder(
                "d1",
                Drone,
                Unpred,
                scripted(Script {
                    mode: ScriptMode::Pursuit,
                    start: shifted(p, h, 0.0, -1100.0),
                    heading: h - 90.0,
                    speed: 20.0,
                    linger: 0.0,
                    chase: Some(90.0),
                    lifetime: None,
                }),
                spawn,
                dep,
                tag("left"),
            )
        }
        5 => {
            let spawn = reach_time(&sc, along) - 150.0;
            let meet = 150.0 * 20.0;
            intruder(
                "d1",
                Drone,
                Pred,
                scripted(Script {
                    mode: ScriptMode::PassBy,
                    start: shifted(p, h, meet, -700.0),
                    heading: h + 180.0,
                    speed: 20.0,
                    linger: 0.0,
                    chase: None,
                    lifetime: Some(600.0),
                }),
                spawn,
                dep,
                tag("head-on"),
            )
        }
        6 | 11 | 12 | 13 => {
            let spawn = reach_time(&sc, along - 1200.0);
            intruder(
                "d1",
                Drone,
                Unpred,
                scripted(Script {
                    mode: ScriptMode::Pursuit,
                    start: shifted(p, h, 800.0, -100.0),
                    heading: h - 90.0,
                    speed: 20.0,
                    linger: 0.0,
                    chase: Some(40.0),
                    lifetime: Some(300.0),
                }),
                spawn,
                dep,
                tag("head-on"),
            )
        }
        7 => {
            let spawn = reach_time(&sc, along - 2500.0);
            intruder(
                "d1",
                Drone,
                Pred,
                scripted(Script {
                    mode: ScriptMode::PassBy,
                    start: shifted(p, h, 0.0, -50.0),
                    heading: h,
                    speed: 20.0,
                    linger: 0.0,
                    chase: None,
                    lifetime: Some(600.0),
                }),
                spawn,
                dep,
                tag("same-direction"),
            )
        }
        8 => {
            let spawn = reach_time(&sc, along - 2500.0);
            let traj = drifting_drone(shifted(p, h, 0.0, -50.0), h, 40.0, 40.0, 600.0);
            intruder(
                "d1",
                Drone,
                Unpred,
                IntruderSource::CsvTrajectory { path: "sc08_d1.csv".into(), trajectory: traj },
                spawn,
                dep,
                tag("same-direction"),
            )
        }
        9 => {
            let spawn = reach_time(&sc, along) - 150.0;
            let meet = 150.0 * 15.0;
            intruder(
                "b1",
                Bird,
                Pred,
                scripted(Script {
                    mode: ScriptMode::PassBy,
                    start: shifted(p, h, meet, -1100.0),
                    heading: h + 180.0,
                    speed: 15.0,
                    linger: 0.0,
                    chase: None,
                    lifetime: Some(600.0),
                }),
                spawn,
                dep,
                tag("head-on"),
            )
        }
        10 => {
            let spawn = reach_time(&sc, along - 2500.0);
            intruder(
                "b1",
                Bird,
                Unpred,
                scripted(Script {
                    mode: ScriptMode::Pursuit,
                    start: shifted(p, h, 0.0, -100.0),
                    heading: h + 180.0,
                    speed: 15.0,
                    linger: 0.0,
                    chase: Some(120.0),
                    lifetime: Some(600.0),
                }),
                spawn,
                dep,
                tag("head-on"),
            )
        }
        14 => {
            let spawn = reach_time(&sc, along - SC14_GAP_M);
            intruder(
                "b1",
                Bird,
                Unpred,
                scripted(Script {
                    mode: ScriptMode::Pursuit,
                    start: p.with_up(round1(p.up)),
                    heading: h + 180.0,
                    speed: 15.0,
                    linger: 0.0,
                    chase: None,
                    lifetime: None,
                }),
                spawn,
                dep,
                tag("head-on"),
            )
        }
        _ => unreachable!("pack has fourteen airborne scenarios"),
    };
    sc.intruders.push(rec);
    sc
}

/// The shipped scenario pack, sorted by id.
pub fn default_pack() -> ScenarioPack {
    let mut scenarios = vec![reference("ref-route1", RouteId::Route1), reference("ref-route2", RouteId::Route2)];
    scenarios.extend(ground_setups());
    scenarios.extend((1..=14).map(airborne));
    scenarios.sort_by(|a, b| a.id.cmp(&b.id));
    ScenarioPack { scenarios }
}
