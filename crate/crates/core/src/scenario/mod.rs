//! Scenario files, trajectory CSVs and the shipped scenario pack.

mod pack;
mod parse;
mod trajectory_csv;

pub use pack::{default_pack, pack_locations, trajectory_csv_text, ScenarioPack, LOCATION_FRACTIONS};
pub use parse::{apply_overrides, parse_scenario, parse_scenario_file, serialize_scenario, ParseError, ScenarioErrors};
pub use trajectory_csv::{load_trajectory_csv, parse_trajectory_csv};

use serde::{Deserialize, Serialize};

use crate::agents::{IntruderRecord, IntruderSource, OwnshipConfig, PerformanceModel};
use crate::cdr::{CdrParams, GroundCheckParams};
use crate::engine::SimParams;
use crate::envelopes::EnvelopeProfile;
use crate::geo::{to_enu, EnuPoint, GeoError, GeoPoint, Route, RouteId, Vertiport};

/// Everything one run needs: ownship, airspace, intruders and tunables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub ownship_config: OwnshipConfig,
    pub perf: PerformanceModel,
    pub vertiports: Vec<Vertiport>,
    pub routes: Vec<Route>,
    pub planned_route: RouteId,
    pub intruders: Vec<IntruderRecord>,
    pub envelopes: EnvelopeProfile,
    pub cdr: CdrParams,
    pub ground: GroundCheckParams,
    pub sim: SimParams,
}

/// Horizontal slack when matching a route end to a vertiport, m.
const PAD_MATCH_M: f64 = 1.0;

impl Scenario {
    /// Scenario with the default tables for `config` and nothing else.
    pub fn empty(id: impl Into<String>, config: OwnshipConfig) -> Self {
        Self {
            id: id.into(),
            ownship_config: config,
            perf: PerformanceModel::default_for(config),
            vertiports: Vec::new(),
            routes: Vec::new(),
            planned_route: RouteId::Route1,
            intruders: Vec::new(),
            envelopes: EnvelopeProfile::default_for(config),
            cdr: CdrParams::default(),
            ground: GroundCheckParams::default(),
            sim: SimParams::default(),
        }
    }

    pub fn vertiport(&self, id: &str) -> Option<&Vertiport> {
        self.vertiports.iter().find(|v| v.id == id)
    }

    /// Projection origin: V1, or the first vertiport declared.
    pub fn origin(&self) -> Option<GeoPoint> {
        self.vertiport("V1").or(self.vertiports.first()).map(|v| v.position)
    }

    pub fn route(&self, id: RouteId) -> Option<&Route> {
        self.routes.iter().find(|r| r.id == id)
    }

    pub fn route_enu(&self, id: RouteId) -> Result<Vec<EnuPoint>, GeoError> {
        let origin = self.origin().ok_or_else(|| GeoError::InvalidPoint("no vertiports".into()))?;
        let route = self.route(id).ok_or(GeoError::DegenerateRoute(id))?;
        route.project(origin)
    }

    pub fn vertiports_enu(&self) -> Result<Vec<(String, EnuPoint)>, GeoError> {
        let origin = self.origin().ok_or_else(|| GeoError::InvalidPoint("no vertiports".into()))?;
        self.vertiports
            .iter()
            .map(|v| Ok((v.id.clone(), to_enu(origin, v.position)?)))
            .collect()
    }

    /// Vertiport at the end of a route.
    pub fn destination_of(&self, id: RouteId) -> Option<String> {
        let end = *self.route_enu(id).ok()?.last()?;
        self.vertiports_enu()
            .ok()?
            .into_iter()
            .find(|(_, p)| p.horizontal_distance(end) <= PAD_MATCH_M)
            .map(|(id, _)| id)
    }

    /// The other route, used when the ground check reroutes.
    pub fn alternate_route(&self) -> Option<RouteId> {
        self.routes
            .iter()
            .map(|r| r.id)
            .find(|r| *r != self.planned_route && *r != RouteId::Diversion)
    }

    /// Semantic checks. Returns every problem found.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if self.id.trim().is_empty() {
            errs.push("scenario id is empty".to_string());
        }
        if let Err(e) = self.perf.validate() {
            errs.push(format!("performance: {e}"));
        }
        for (name, env) in [("forward", self.envelopes.forward), ("vertical", self.envelopes.vertical)] {
            if let Err(e) = env.validate() {
                errs.push(format!("{name} envelope: {e}"));
            }
        }
        if let Err(e) = self.cdr.validate() {
            errs.push(format!("cdr: {e}"));
        }
        if let Err(e) = self.ground.validate() {
            errs.push(format!("ground check: {e}"));
        }
        if let Err(e) = self.sim.validate() {
            errs.push(format!("sim: {e}"));
        }
        if self.vertiports.len() < 2 {
            errs.push(format!("need at least 2 vertiports, got {}", self.vertiports.len()));
        }
        for (i, v) in self.vertiports.iter().enumerate() {
            if self.vertiports[..i].iter().any(|w| w.id == v.id) {
                errs.push(format!("duplicate vertiport {}", v.id));
            }
            if let Err(e) = v.position.validate() {
                errs.push(format!("vertiport {}: {e}", v.id));
            }
        }
        let origin = self.origin();
        for r in &self.routes {
            if let Err(e) = r.validate() {
                errs.push(format!("route {}: {e}", r.id));
            }
            if let Some(o) = origin {
                match r.project(o) {
                    Ok(pts) => {
                        if pts.first().map_or(true, |p| p.horizontal_distance(EnuPoint::ORIGIN) > PAD_MATCH_M) {
                            errs.push(format!("route {} must start at the departure vertiport", r.id));
                        }
                    }
                    Err(e) => errs.push(format!("route {}: {e}", r.id)),
                }
            }
            if self.destination_of(r.id).is_none() && r.validate().is_ok() {
                errs.push(format!("route {} does not end at a vertiport", r.id));
            }
        }
        if self.route(self.planned_route).is_none() {
            errs.push(format!("planned route {} is not defined", self.planned_route));
        }
        for (i, intr) in self.intruders.iter().enumerate() {
            if self.intruders[..i].iter().any(|o| o.id == intr.id) {
                errs.push(format!("duplicate intruder {}", intr.id));
            }
            if !(intr.spawn_time.is_finite() && intr.spawn_time >= 0.0) {
                errs.push(format!("intruder {}: spawn time must be non-negative", intr.id));
            }
            match &intr.source {
                IntruderSource::Scripted(s) => {
                    if let Err(e) = s.validate() {
                        errs.push(format!("intruder {}: {e}", intr.id));
                    }
                }
                IntruderSource::CsvTrajectory { trajectory, .. } => {
                    if trajectory.samples().len() < 2 {
                        errs.push(format!("intruder {}: trajectory needs 2 samples", intr.id));
                    }
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}
