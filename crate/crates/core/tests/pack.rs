use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use uamcas::agents::{IntruderBehavior, IntruderKind, IntruderSource, ScriptMode};
use uamcas::engine::ground_decision;
use uamcas::geo::RouteId;
use uamcas::cdr::GroundDecision;
use uamcas::scenario::{default_pack, parse_scenario, parse_scenario_file, serialize_scenario, trajectory_csv_text};

fn shipped_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("pack")
}

#[test]
fn pack_has_twenty_one_unique_valid_scenarios() {
    let pack = default_pack();
    assert_eq!(pack.scenarios.len(), 21);
    let ids: HashSet<&str> = pack.ids().into_iter().collect();
    assert_eq!(ids.len(), 21);
    for sc in &pack.scenarios {
        assert_eq!(sc.validate(), Ok(()), "{}", sc.id);
    }
}

#[test]
fn shipped_files_match_the_generator() {
    let dir = shipped_dir();
    for sc in &default_pack().scenarios {
        let text = fs::read_to_string(dir.join(format!("{}.scn", sc.id))).unwrap();
        assert_eq!(text, serialize_scenario(sc), "{} is stale; regenerate with `uamcas pack --out pack`", sc.id);
        for r in &sc.intruders {
            if let IntruderSource::CsvTrajectory { path, trajectory } = &r.source {
                assert_eq!(fs::read_to_string(dir.join(path)).unwrap(), trajectory_csv_text(trajectory));
            }
        }
    }
}

#[test]
fn parse_of_serialize_is_identity() {
    let dir = shipped_dir();
    for sc in &default_pack().scenarios {
        let back = parse_scenario(&serialize_scenario(sc), Some(&dir)).unwrap();
        assert_eq!(&back, sc, "{}", sc.id);
        let from_file = parse_scenario_file(&dir.join(format!("{}.scn", sc.id))).unwrap();
        assert_eq!(&from_file, sc, "{}", sc.id);
    }
}

#[test]
fn airborne_rows_carry_kind_behavior_location_direction() {
    use IntruderBehavior::{Predictable as P, Unpredictable as U};
    use IntruderKind::{Bird as B, Drone as D};
    let table = [
        (D, P, 1, "right"),
        (D, U, 1, "right"),
        (D, P, 1, "left"),
        (D, U, 1, "left"),
        (D, P, 1, "head-on"),
        (D, U, 1, "head-on"),
        (D, P, 1, "same-direction"),
        (D, U, 1, "same-direction"),
        (B, P, 1, "head-on"),
        (B, U, 1, "head-on"),
        (D, U, 2, "head-on"),
        (D, U, 3, "head-on"),
        (D, U, 4, "head-on"),
        (B, U, 1, "head-on"),
    ];
    let pack = default_pack();
    for (n, (kind, behavior, loc, dir)) in table.into_iter().enumerate() {
        let id = format!("sc{:02}", n + 1);
        let sc = pack.get(&id).unwrap();
        let r = sc.intruders.iter().find(|r| r.encounter.is_some()).unwrap();
        let tag = r.encounter.as_ref().unwrap();
        assert_eq!((r.kind, r.behavior, tag.location, tag.direction.as_str()), (kind, behavior, loc, dir), "{id}");
    }
    let lingering = |id: &str| {
        pack.get(id).unwrap().intruders.iter().any(|r| {
            matches!(&r.source, IntruderSource::Scripted(s) if r.encounter.is_some()
                && (s.mode == ScriptMode::Linger || s.mode == ScriptMode::Pursuit) && s.linger_duration == 500.0)
        })
    };
    assert!(lingering("sc01") && lingering("sc02"));
    let sc14 = pack.get("sc14").unwrap();
    assert!(sc14
        .intruders
        .iter()
        .any(|r| r.kind == IntruderKind::Bird && matches!(&r.source, IntruderSource::Scripted(s) if s.mode == ScriptMode::Pursuit)));
}

#[test]
fn scenario_twelve_departs_route_two_after_660() {
    let sc = default_pack().get("sc12").unwrap().clone();
    let d = ground_decision(&sc, &sc.sim).unwrap();
    assert_eq!(d, GroundDecision::Depart { route: RouteId::Route2, delay_s: 660.0 });
}
