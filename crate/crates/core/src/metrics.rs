//! Theoretical flight times, closest point of approach and delay decomposition.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::agents::PerformanceModel;
use crate::cdr::GroundDecision;
use crate::engine::{RunResult, Terminal};
use crate::envelopes::Zone;
use crate::geo::{path_length, EnuPoint, RouteId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("intruder {0} never appears in the trace")]
    NoEncounter(String),
    #[error("scenario {0} has no paired {1} run")]
    Unpaired(String, &'static str),
}

/// Cruise leg plus vertical climb and descent at the configured rates.
pub fn theoretical_flight_time(horizontal_length_m: f64, perf: &PerformanceModel) -> f64 {
    horizontal_length_m / perf.cruise_speed + perf.cruise_alt / perf.climb_rate + perf.cruise_alt / perf.descent_rate
}

pub fn theoretical_path_time(path: &[EnuPoint], perf: &PerformanceModel) -> f64 {
    theoretical_flight_time(path_length(path), perf)
}

/// Minimum distance between two agents moving linearly from `a0`/`b0` to
/// `a1`/`b1` over the same interval.
pub fn segment_cpa(a0: EnuPoint, a1: EnuPoint, b0: EnuPoint, b1: EnuPoint) -> f64 {
    let d0 = b0.sub(a0);
    let dv = b1.sub(a1).sub(d0);
    let vv = dv.dot(dv);
    let s = if vv > 0.0 { (-d0.dot(dv) / vv).clamp(0.0, 1.0) } else { 0.0 };
    d0.add(dv.scale(s)).norm()
}

/// Analytic closest approach to one intruder over a run.
pub fn cpa(result: &RunResult, intruder_id: &str) -> Result<f64, MetricsError> {
    let mut best = f64::INFINITY;
    let mut prev: Option<(EnuPoint, EnuPoint)> = None;
    for tick in &result.ticks {
        let cur = tick.intruders.iter().find(|i| i.id == intruder_id).map(|i| (tick.own.pos, i.pos));
        match (prev, cur) {
            (Some((a0, b0)), Some((a1, b1))) => best = best.min(segment_cpa(a0, a1, b0, b1)),
            (None, Some((a, b))) => best = best.min(a.distance(b)),
            _ => {}
        }
        prev = cur;
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(MetricsError::NoEncounter(intruder_id.to_string()))
    }
}

/// Smallest CPA over every intruder in the run.
pub fn min_cpa(result: &RunResult) -> Option<f64> {
    let mut ids: Vec<&str> = result
        .ticks
        .iter()
        .flat_map(|t| t.intruders.iter().map(|i| i.id.as_str()))
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter().filter_map(|id| cpa(result, id).ok()).fold(None, |m, c| Some(m.map_or(c, |m: f64| m.min(c))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scenario_id: String,
    pub cas_enabled: bool,
    pub cpa: Option<f64>,
    pub t_sim: Option<f64>,
    /// `None` when the departure was postponed indefinitely.
    pub d_ground: Option<f64>,
    pub d_air: Option<f64>,
    pub d_total: Option<f64>,
    pub route_flown: Option<RouteId>,
    pub terminal: Terminal,
    /// Some intruder came inside the caution ring while airborne.
    pub encounter: bool,
}

/// `D_T = D_G + D_A`; `None` propagates.
pub fn total_delay(d_ground: Option<f64>, d_air: Option<f64>) -> Option<f64> {
    Some(d_ground? + d_air?)
}

/// Delay decomposition of a run. `baseline(route)` gives the theoretical
/// flight time of the route the ownship departed on.
pub fn delays(result: &RunResult, baseline: impl Fn(RouteId) -> f64) -> MetricsReport {
    let d_ground = match result.ground_decision {
        GroundDecision::Depart { delay_s, .. } => Some(delay_s),
        GroundDecision::Postponed => None,
    };
    let t_sim = result.flight_time();
    let d_air = match (t_sim, result.route_departed) {
        (Some(t), Some(route)) => Some((t - baseline(route)).max(0.0)),
        _ => None,
    };
    let encounter = result
        .ticks
        .iter()
        .any(|t| t.own.pos.up > 0.0 && t.intruders.iter().any(|i| i.zone >= Zone::Caution));
    MetricsReport {
        scenario_id: result.scenario_id.clone(),
        cas_enabled: result.cas_enabled,
        cpa: min_cpa(result),
        t_sim,
        d_ground,
        d_air,
        d_total: total_delay(d_ground, d_air),
        route_flown: result.route_departed,
        terminal: result.terminal.clone(),
        encounter,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub scenario_id: String,
    pub cpa_with: Option<f64>,
    pub cpa_without: Option<f64>,
    pub t_sim: Option<f64>,
    pub d_ground: Option<f64>,
    pub d_air: Option<f64>,
    pub d_total: Option<f64>,
    pub terminal_with: Terminal,
    pub terminal_without: Option<Terminal>,
    pub encounter: bool,
}

impl BatchRow {
    pub fn postponed(&self) -> bool {
        self.d_ground.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchTable {
    pub rows: Vec<BatchRow>,
    /// Mean airborne delay over rows with an airborne encounter.
    pub mean_d_air: Option<f64>,
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// One report row; `off` is the paired CAS-off run when there is one.
pub fn pair_row(on: &MetricsReport, off: Option<&MetricsReport>) -> BatchRow {
    BatchRow {
        scenario_id: on.scenario_id.clone(),
        cpa_with: on.cpa,
        cpa_without: off.and_then(|o| o.cpa),
        t_sim: on.t_sim,
        d_ground: on.d_ground,
        d_air: on.d_air,
        d_total: on.d_total,
        terminal_with: on.terminal.clone(),
        terminal_without: off.map(|o| o.terminal.clone()),
        encounter: on.encounter,
    }
}

/// Pair CAS-on and CAS-off reports by scenario id; rows come out sorted by id.
pub fn summarize_batch(reports: &[MetricsReport]) -> Result<BatchTable, MetricsError> {
    let mut pairs: BTreeMap<&str, (Option<&MetricsReport>, Option<&MetricsReport>)> = BTreeMap::new();
    for r in reports {
        let e = pairs.entry(r.scenario_id.as_str()).or_default();
        if r.cas_enabled {
            e.0 = Some(r);
        } else {
            e.1 = Some(r);
        }
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for (id, (on, off)) in pairs {
        let on = on.ok_or_else(|| MetricsError::Unpaired(id.to_string(), "CAS-on"))?;
        let off = off.ok_or_else(|| MetricsError::Unpaired(id.to_string(), "CAS-off"))?;
        rows.push(pair_row(on, Some(off)));
    }
    let mean_d_air = mean(rows.iter().filter(|r| r.encounter).filter_map(|r| r.d_air));
    Ok(BatchTable { rows, mean_d_air })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::OwnshipConfig;

    #[test]
    fn theoretical_times() {
        let p = PerformanceModel::default_for(OwnshipConfig::VectoredThrust);
        assert!((theoretical_flight_time(26_000.0, &p) - 692.0).abs() <= 1.0);
        assert!((theoretical_flight_time(30_000.0, &p) - 744.0).abs() <= 1.0);
        assert!((theoretical_flight_time(0.0, &p) - 2.0 * 304.8 / 1.7).abs() < 1e-9);
    }

    #[test]
    fn segment_cpa_perpendicular_offset() {
        let o = EnuPoint::ORIGIN;
        let d = segment_cpa(o, o, EnuPoint::new(-1000.0, 250.0, 0.0), EnuPoint::new(1000.0, 250.0, 0.0));
        assert!((d - 250.0).abs() < 1e-9);
        assert_eq!(segment_cpa(o, o, o, EnuPoint::new(5.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn delay_identity() {
        assert_eq!(total_delay(Some(300.0), Some(531.0)), Some(831.0));
        assert_eq!(total_delay(Some(660.0), Some(42.0)), Some(702.0));
        assert_eq!(total_delay(None, Some(1.0)), None);
    }

    #[test]
    fn summarize_empty_and_unpaired() {
        assert_eq!(summarize_batch(&[]).unwrap().rows.len(), 0);
        let r = MetricsReport {
            scenario_id: "a".into(),
            cas_enabled: true,
            cpa: None,
            t_sim: None,
            d_ground: Some(0.0),
            d_air: None,
            d_total: None,
            route_flown: None,
            terminal: Terminal::TimedOut,
            encounter: false,
        };
        assert!(matches!(summarize_batch(&[r]), Err(MetricsError::Unpaired(_, _))));
    }
}
