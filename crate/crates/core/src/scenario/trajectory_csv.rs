use std::path::Path;

use super::ParseError;
use crate::agents::Trajectory;
use crate::geo::{to_enu, EnuPoint, GeoPoint};

const ENU_HEADER: [&str; 4] = ["t_s", "east_m", "north_m", "up_m"];
const GEO_HEADER: [&str; 4] = ["t_s", "lat_deg", "lon_deg", "alt_m"];

/// Parse a trajectory CSV. Geodetic rows are projected around `origin`.
/// Row numbers in errors count data rows from 1.
pub fn parse_trajectory_csv(text: &str, origin: GeoPoint) -> Result<Trajectory, ParseError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| ParseError::new(0, format!("unreadable header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let geodetic = if header == ENU_HEADER {
        false
    } else if header == GEO_HEADER {
        true
    } else {
        return Err(ParseError::new(
            0,
            format!("bad header {:?}; expected {} or {}", header.join(","), ENU_HEADER.join(","), GEO_HEADER.join(",")),
        ));
    };

    let mut samples: Vec<(f64, EnuPoint)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| ParseError::new(row, format!("{e}")))?;
        if rec.len() != 4 {
            return Err(ParseError::new(row, format!("expected 4 cells, got {}", rec.len())));
        }
        let mut v = [0.0; 4];
        for (j, cell) in rec.iter().enumerate() {
            v[j] = cell
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| ParseError::new(row, format!("non-numeric cell {cell:?} in column {}", header[j])))?;
        }
        let p = if geodetic {
            let g = GeoPoint::new(v[1], v[2], v[3]).map_err(|e| ParseError::new(row, e.to_string()))?;
            to_enu(origin, g).map_err(|e| ParseError::new(row, e.to_string()))?
        } else {
            EnuPoint::new(v[1], v[2], v[3])
        };
        if let Some(&(prev, _)) = samples.last() {
            if v[0] <= prev {
                return Err(ParseError::new(row, format!("time {} does not increase (previous {prev})", v[0])));
            }
        }
        samples.push((v[0], p));
    }
    Trajectory::new(samples).map_err(|e| ParseError::new(0, e.to_string()))
}

pub fn load_trajectory_csv(path: &Path, origin: GeoPoint) -> Result<Trajectory, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseError::new(0, format!("cannot read {}: {e}", path.display())))?;
    parse_trajectory_csv(&text, origin)
}
