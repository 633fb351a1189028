//! Report files: a Table-4-shaped CSV, a structured JSON file and plot-ready
//! CSVs. Output bytes depend only on the table contents.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::engine::Terminal;
use crate::metrics::{BatchRow, BatchTable};

pub const REPORT_HEADER: &str = "scenario_id,cpa_with_m,cpa_without_m,t_sim_s,d_ground_s,d_air_s,d_total_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Structured,
    Both,
}

impl ReportFormat {
    fn csv(self) -> bool {
        matches!(self, ReportFormat::Csv | ReportFormat::Both)
    }

    fn structured(self) -> bool {
        matches!(self, ReportFormat::Structured | ReportFormat::Both)
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_default()
}

/// One CSV line (no newline) for a row. Postponed flights print `inf` for the
/// ground delay and leave the airborne cells empty.
pub fn csv_line(r: &BatchRow) -> String {
    let d_ground = if r.postponed() { "inf".to_string() } else { cell(r.d_ground) };
    format!(
        "{},{},{},{},{},{},{}",
        r.scenario_id,
        cell(r.cpa_with),
        cell(r.cpa_without),
        cell(r.t_sim),
        d_ground,
        cell(r.d_air),
        cell(r.d_total)
    )
}

pub fn report_csv(table: &BatchTable) -> String {
    let mut s = String::from(REPORT_HEADER);
    s.push('\n');
    for r in &table.rows {
        s.push_str(&csv_line(r));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct JsonRow<'a> {
    scenario_id: &'a str,
    cpa_with_m: Option<f64>,
    cpa_without_m: Option<f64>,
    t_sim_s: Option<f64>,
    d_ground_s: Option<f64>,
    d_air_s: Option<f64>,
    d_total_s: Option<f64>,
    postponed: bool,
    encounter: bool,
    terminal_with: String,
    terminal_without: Option<String>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    scenarios: Vec<JsonRow<'a>>,
    mean_d_air_s: Option<f64>,
}

pub fn report_json(table: &BatchTable) -> String {
    let scenarios = table
        .rows
        .iter()
        .map(|r| JsonRow {
            scenario_id: &r.scenario_id,
            cpa_with_m: r.cpa_with,
            cpa_without_m: r.cpa_without,
            t_sim_s: r.t_sim,
            d_ground_s: r.d_ground,
            d_air_s: r.d_air,
            d_total_s: r.d_total,
            postponed: r.postponed(),
            encounter: r.encounter,
            terminal_with: r.terminal_with.keyword(),
            terminal_without: r.terminal_without.as_ref().map(Terminal::keyword),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&JsonReport { scenarios, mean_d_air_s: table.mean_d_air })
        .expect("report serializes");
    s.push('\n');
    s
}

/// Delay bars: one row per scenario.
pub fn delay_plot_csv(table: &BatchTable) -> String {
    let mut s = String::from("scenario_id,d_ground_s,d_air_s,d_total_s\n");
    for r in &table.rows {
        let g = if r.postponed() { "inf".to_string() } else { cell(r.d_ground) };
        s.push_str(&format!("{},{},{},{}\n", r.scenario_id, g, cell(r.d_air), cell(r.d_total)));
    }
    s
}

/// CPA comparison with and without CAS.
pub fn cpa_plot_csv(table: &BatchTable) -> String {
    let mut s = String::from("scenario_id,cpa_with_m,cpa_without_m\n");
    for r in &table.rows {
        s.push_str(&format!("{},{},{}\n", r.scenario_id, cell(r.cpa_with), cell(r.cpa_without)));
    }
    s
}

/// Write `report.csv` and/or `report.json` into `dir`; returns what was written.
pub fn write_report(table: &BatchTable, dir: &Path, format: ReportFormat) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format.csv() {
        let p = dir.join("report.csv");
        fs::write(&p, report_csv(table))?;
        written.push(p);
    }
    if format.structured() {
        let p = dir.join("report.json");
        fs::write(&p, report_json(table))?;
        written.push(p);
    }
    Ok(written)
}

pub fn write_plot_data(table: &BatchTable, dir: &Path) -> io::Result<Vec<PathBuf>> {
    let plot = dir.join("plot");
    fs::create_dir_all(&plot)?;
    let delays = plot.join("delays.csv");
    fs::write(&delays, delay_plot_csv(table))?;
    let cpa = plot.join("cpa.csv");
    fs::write(&cpa, cpa_plot_csv(table))?;
    Ok(vec![delays, cpa])
}
