//! Paired CAS-on / CAS-off runs over a set of scenarios.

use thiserror::Error;

use crate::engine::{run, EngineError, RunResult, SimParams};
use crate::geo::RouteId;
use crate::metrics::{delays, summarize_batch, theoretical_path_time, BatchTable, MetricsError, MetricsReport};
use crate::scenario::Scenario;

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("scenario {id}: {source}")]
    Engine {
        id: String,
        #[source]
        source: EngineError,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone)]
pub struct PairResult {
    pub with_cas: RunResult,
    pub without_cas: RunResult,
    pub report_with: MetricsReport,
    pub report_without: MetricsReport,
}

#[derive(Debug, Clone)]
pub struct BatchOutput {
    pub pairs: Vec<PairResult>,
    pub table: BatchTable,
}

/// Theoretical flight time of each route in the scenario.
pub fn baseline(scenario: &Scenario) -> impl Fn(RouteId) -> f64 + '_ {
    move |r| {
        let path = scenario.route_enu(r).unwrap_or_default();
        theoretical_path_time(&path, &scenario.perf)
    }
}

/// Run one scenario with and without CAS. The CAS-off run flies the route
/// the CAS-on run departed on, straight away.
pub fn run_pair(scenario: &Scenario, dt: Option<f64>) -> Result<PairResult, BatchError> {
    let params = SimParams { dt: dt.unwrap_or(scenario.sim.dt), ..scenario.sim };
    let engine_err = |source| BatchError::Engine { id: scenario.id.clone(), source };

    let on = run(scenario, &SimParams { cas_enabled: true, ..params }).map_err(engine_err)?;
    let mut off_sc = scenario.clone();
    if let Some(r) = on.route_departed {
        off_sc.planned_route = r;
    }
    let off = run(&off_sc, &SimParams { cas_enabled: false, ..params }).map_err(engine_err)?;

    let report_with = delays(&on, baseline(scenario));
    let report_without = delays(&off, baseline(scenario));
    Ok(PairResult { with_cas: on, without_cas: off, report_with, report_without })
}

#[cfg(feature = "parallel")]
fn run_all(scenarios: &[Scenario], dt: Option<f64>) -> Vec<Result<PairResult, BatchError>> {
    use rayon::prelude::*;
    scenarios.par_iter().map(|s| run_pair(s, dt)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_all(scenarios: &[Scenario], dt: Option<f64>) -> Vec<Result<PairResult, BatchError>> {
    run_batch_sequential_inner(scenarios, dt)
}

fn run_batch_sequential_inner(scenarios: &[Scenario], dt: Option<f64>) -> Vec<Result<PairResult, BatchError>> {
    scenarios.iter().map(|s| run_pair(s, dt)).collect()
}

fn collect(results: Vec<Result<PairResult, BatchError>>) -> Result<BatchOutput, BatchError> {
    let pairs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<MetricsReport> =
        pairs.iter().flat_map(|p| [p.report_with.clone(), p.report_without.clone()]).collect();
    let table = summarize_batch(&reports)?;
    Ok(BatchOutput { pairs, table })
}

/// Run every scenario in pairs. Uses rayon when the `parallel` feature is on;
/// output does not depend on scheduling.
pub fn run_batch(scenarios: &[Scenario], dt: Option<f64>) -> Result<BatchOutput, BatchError> {
    collect(run_all(scenarios, dt))
}

/// Single-threaded reference path.
pub fn run_batch_sequential(scenarios: &[Scenario], dt: Option<f64>) -> Result<BatchOutput, BatchError> {
    collect(run_batch_sequential_inner(scenarios, dt))
}
