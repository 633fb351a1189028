//! Geodetic positions, the local east/north/up frame and route polylines.
//!
//! All geometry downstream of parsing happens in a single equirectangular
//! tangent plane anchored at the take-off vertiport. Routes are at most a few
//! tens of kilometres long, so the flat-plane error stays far below any
//! envelope radius.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Mean earth radius used by the local projection.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Horizontal range beyond which the flat-plane projection is refused.
pub const MAX_PROJECTION_RANGE_M: f64 = 100_000.0;

pub const FEET_TO_METERS: f64 = 0.3048;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("point is {0:.0} m from the projection origin (limit {MAX_PROJECTION_RANGE_M} m)")]
    OutOfRange(f64),
    #[error("invalid geodetic point: {0}")]
    InvalidPoint(String),
    #[error("bearing undefined between coincident points")]
    UndefinedBearing,
    #[error("route {0} needs at least two distinct waypoints")]
    DegenerateRoute(RouteId),
}

/// WGS-84 latitude/longitude in degrees, altitude in metres above the ground reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
    pub alt: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64, alt: f64) -> Result<Self, GeoError> {
        let p = Self { lat, lon, alt };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GeoError> {
        if !(self.lat.is_finite() && self.lon.is_finite() && self.alt.is_finite()) {
            return Err(GeoError::InvalidPoint(format!("{self:?} is not finite")));
        }
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(GeoError::InvalidPoint(format!("latitude {} outside [-90, 90]", self.lat)));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return Err(GeoError::InvalidPoint(format!("longitude {} outside [-180, 180]", self.lon)));
        }
        if self.alt < 0.0 {
            return Err(GeoError::InvalidPoint(format!("altitude {} below ground", self.alt)));
        }
        Ok(())
    }
}

/// Position in the local tangent plane, metres.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnuPoint {
    pub east: f64,
    pub north: f64,
    pub up: f64,
}

impl EnuPoint {
    pub const ORIGIN: EnuPoint = EnuPoint { east: 0.0, north: 0.0, up: 0.0 };

    pub const fn new(east: f64, north: f64, up: f64) -> Self {
        Self { east, north, up }
    }

    pub fn with_up(self, up: f64) -> Self {
        Self { up, ..self }
    }

    pub fn add(self, v: Vec3) -> Self {
        Self::new(self.east + v.east, self.north + v.north, self.up + v.up)
    }

    pub fn sub(self, other: EnuPoint) -> Vec3 {
        Vec3::new(self.east - other.east, self.north - other.north, self.up - other.up)
    }

    pub fn distance(self, other: EnuPoint) -> f64 {
        self.sub(other).norm()
    }

    pub fn horizontal_distance(self, other: EnuPoint) -> f64 {
        self.sub(other).horizontal_norm()
    }

    pub fn lerp(self, other: EnuPoint, f: f64) -> Self {
        self.add(other.sub(self).scale(f))
    }

    pub fn is_finite(&self) -> bool {
        self.east.is_finite() && self.north.is_finite() && self.up.is_finite()
    }
}

/// Displacement or velocity in the local frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub east: f64,
    pub north: f64,
    pub up: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { east: 0.0, north: 0.0, up: 0.0 };

    pub const fn new(east: f64, north: f64, up: f64) -> Self {
        Self { east, north, up }
    }

    /// Horizontal unit vector along a compass heading (0 = north, 90 = east).
    pub fn from_heading(heading_deg: f64) -> Self {
        let r = heading_deg.to_radians();
        Self::new(r.sin(), r.cos(), 0.0)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.east * k, self.north * k, self.up * k)
    }

    pub fn add(self, o: Vec3) -> Self {
        Self::new(self.east + o.east, self.north + o.north, self.up + o.up)
    }

    pub fn sub(self, o: Vec3) -> Self {
        Self::new(self.east - o.east, self.north - o.north, self.up - o.up)
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.east * o.east + self.north * o.north + self.up * o.up
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn horizontal_norm(self) -> f64 {
        self.east.hypot(self.north)
    }

    /// Compass heading of the horizontal component, `None` when it vanishes.
    pub fn heading(self) -> Option<f64> {
        if self.horizontal_norm() < 1e-12 {
            None
        } else {
            Some(normalize_deg(self.east.atan2(self.north).to_degrees()))
        }
    }
}

/// Wraps an angle into `[0, 360)`.
pub fn normalize_deg(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Signed smallest rotation from `from` to `to`, in `(-180, 180]`.
pub fn signed_angle_diff(from: f64, to: f64) -> f64 {
    let d = normalize_deg(to - from);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}

/// Equirectangular projection of `p` into the tangent plane at `origin`.
pub fn to_enu(origin: GeoPoint, p: GeoPoint) -> Result<EnuPoint, GeoError> {
    let coslat = origin.lat.to_radians().cos();
    let east = EARTH_RADIUS_M * coslat * (p.lon - origin.lon).to_radians();
    let north = EARTH_RADIUS_M * (p.lat - origin.lat).to_radians();
    let range = east.hypot(north);
    if range > MAX_PROJECTION_RANGE_M {
        return Err(GeoError::OutOfRange(range));
    }
    Ok(EnuPoint::new(east, north, p.alt - origin.alt))
}

/// Inverse of [`to_enu`].
pub fn from_enu(origin: GeoPoint, p: EnuPoint) -> Result<GeoPoint, GeoError> {
    let range = p.east.hypot(p.north);
    if range > MAX_PROJECTION_RANGE_M {
        return Err(GeoError::OutOfRange(range));
    }
    let coslat = origin.lat.to_radians().cos();
    Ok(GeoPoint {
        lat: origin.lat + (p.north / EARTH_RADIUS_M).to_degrees(),
        lon: origin.lon + (p.east / (EARTH_RADIUS_M * coslat)).to_degrees(),
        alt: origin.alt + p.up,
    })
}

/// Compass bearing from `from` to `to` in `[0, 360)`.
pub fn bearing(from: EnuPoint, to: EnuPoint) -> Result<f64, GeoError> {
    to.sub(from).heading().ok_or(GeoError::UndefinedBearing)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertiport {
    pub id: String,
    pub name: String,
    pub position: GeoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RouteId {
    Route1,
    Route2,
    /// Direct leg to a vertiport after an emergency diversion.
    Diversion,
}

impl RouteId {
    pub fn keyword(self) -> &'static str {
        match self {
            RouteId::Route1 => "ROUTE1",
            RouteId::Route2 => "ROUTE2",
            RouteId::Diversion => "DIVERSION",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ROUTE1" | "ROUTE-1" | "R1" => Some(RouteId::Route1),
            "ROUTE2" | "ROUTE-2" | "R2" => Some(RouteId::Route2),
            _ => None,
        }
    }
}

impl fmt::Display for RouteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Planned route between two vertiports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub id: RouteId,
    pub waypoints: Vec<GeoPoint>,
    pub cruise_alt: f64,
}

impl Route {
    /// Waypoints projected into the plane anchored at the first waypoint.
    pub fn enu_waypoints(&self) -> Result<Vec<EnuPoint>, GeoError> {
        let origin = *self.waypoints.first().ok_or(GeoError::DegenerateRoute(self.id))?;
        self.project(origin)
    }

    pub fn project(&self, origin: GeoPoint) -> Result<Vec<EnuPoint>, GeoError> {
        self.waypoints.iter().map(|w| to_enu(origin, *w)).collect()
    }

    pub fn validate(&self) -> Result<(), GeoError> {
        if self.waypoints.len() < 2 {
            return Err(GeoError::DegenerateRoute(self.id));
        }
        for w in &self.waypoints {
            w.validate()?;
        }
        let pts = self.enu_waypoints()?;
        if pts.windows(2).any(|s| s[0].horizontal_distance(s[1]) == 0.0) {
            return Err(GeoError::DegenerateRoute(self.id));
        }
        Ok(())
    }
}

/// Horizontal length of a route measured in its own tangent plane.
pub fn polyline_length(route: &Route) -> Result<f64, GeoError> {
    Ok(path_length(&route.enu_waypoints()?))
}

pub fn path_length(points: &[EnuPoint]) -> f64 {
    points.windows(2).map(|s| s[0].horizontal_distance(s[1])).sum()
}

/// Closest horizontal distance from `p` to segment `a`–`b`, plus the clamped
/// segment parameter of the foot point.
pub fn distance_point_to_segment(p: EnuPoint, a: EnuPoint, b: EnuPoint) -> (f64, f64) {
    let ab = b.sub(a);
    let ap = p.sub(a);
    let len2 = ab.east * ab.east + ab.north * ab.north;
    let s = if len2 == 0.0 {
        0.0
    } else {
        ((ap.east * ab.east + ap.north * ab.north) / len2).clamp(0.0, 1.0)
    };
    let foot = a.lerp(b, s);
    (p.horizontal_distance(foot), s)
}

/// Minimum horizontal distance from `p` to any segment of a projected path.
pub fn distance_point_to_path(p: EnuPoint, path: &[EnuPoint]) -> f64 {
    match path {
        [] => f64::INFINITY,
        [only] => p.horizontal_distance(*only),
        _ => path
            .windows(2)
            .map(|s| distance_point_to_segment(p, s[0], s[1]).0)
            .fold(f64::INFINITY, f64::min),
    }
}

/// Minimum horizontal distance from `p` (in the route's own plane) to the route.
pub fn distance_point_to_polyline(p: EnuPoint, route: &Route) -> Result<f64, GeoError> {
    Ok(distance_point_to_path(p, &route.enu_waypoints()?))
}

/// Point at arc length `s` along a projected path (clamped to the ends), with
/// the unit direction of the segment it falls on.
pub fn point_along_path(path: &[EnuPoint], s: f64) -> Option<(EnuPoint, Vec3)> {
    let mut remaining = s.max(0.0);
    let mut last = None;
    for seg in path.windows(2) {
        let len = seg[0].horizontal_distance(seg[1]);
        if len == 0.0 {
            continue;
        }
        let dir = seg[1].sub(seg[0]).scale(1.0 / len);
        if remaining <= len {
            return Some((seg[0].lerp(seg[1], remaining / len), dir));
        }
        remaining -= len;
        last = Some((seg[1], dir));
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v1() -> GeoPoint {
        GeoPoint { lat: 48.3537, lon: 11.7860, alt: 0.0 }
    }

    fn haversine(a: GeoPoint, b: GeoPoint) -> f64 {
        let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
        let dp = p2 - p1;
        let dl = (b.lon - a.lon).to_radians();
        let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
        2.0 * EARTH_RADIUS_M * h.sqrt().asin()
    }

    #[test]
    fn identity_projection() {
        assert_eq!(to_enu(v1(), v1()).unwrap(), EnuPoint::ORIGIN);
    }

    #[test]
    fn latitude_shift_matches_haversine() {
        let p = GeoPoint { lat: v1().lat + 0.01, ..v1() };
        let e = to_enu(v1(), p).unwrap();
        let oracle = haversine(v1(), p);
        assert!((oracle - 1111.9).abs() < 0.1);
        assert!((e.north - oracle).abs() < 0.5);
        assert_eq!(e.east, 0.0);
    }

    #[test]
    fn projection_refuses_far_points() {
        let far = GeoPoint { lat: v1().lat + 1.5, ..v1() };
        assert!(matches!(to_enu(v1(), far), Err(GeoError::OutOfRange(_))));
    }

    #[test]
    fn round_trip_at_30km() {
        let p = EnuPoint::new(-21_000.0, 21_000.0, 304.8);
        let g = from_enu(v1(), p).unwrap();
        let back = to_enu(v1(), g).unwrap();
        assert!(back.distance(p) < 1e-6);
    }

    #[test]
    fn compass_bearings() {
        let o = EnuPoint::ORIGIN;
        assert_eq!(bearing(o, EnuPoint::new(0.0, 100.0, 0.0)).unwrap(), 0.0);
        assert_eq!(bearing(o, EnuPoint::new(100.0, 0.0, 0.0)).unwrap(), 90.0);
        assert!((bearing(o, EnuPoint::new(-100.0, -100.0, 0.0)).unwrap() - 225.0).abs() < 1e-12);
        assert_eq!(bearing(o, o), Err(GeoError::UndefinedBearing));
    }

    #[test]
    fn perpendicular_offset_distance() {
        let path = [EnuPoint::ORIGIN, EnuPoint::new(0.0, 10_000.0, 0.0)];
        assert!((distance_point_to_path(EnuPoint::new(500.0, 5_000.0, 0.0), &path) - 500.0).abs() < 1e-9);
        assert_eq!(distance_point_to_path(path[1], &path), 0.0);
    }

    #[test]
    fn near_coincident_route_is_short() {
        let a = v1();
        let b = GeoPoint { lat: a.lat + 1e-9, ..a };
        let r = Route { id: RouteId::Route1, waypoints: vec![a, b], cruise_alt: 304.8 };
        assert!(polyline_length(&r).unwrap() < 1e-3);
    }

    #[test]
    fn signed_diff_wraps() {
        assert_eq!(signed_angle_diff(350.0, 10.0), 20.0);
        assert_eq!(signed_angle_diff(10.0, 350.0), -20.0);
        assert_eq!(signed_angle_diff(0.0, 180.0), 180.0);
    }

    #[test]
    fn point_along_clamps() {
        let path = [EnuPoint::ORIGIN, EnuPoint::new(100.0, 0.0, 0.0), EnuPoint::new(100.0, 100.0, 0.0)];
        let (p, d) = point_along_path(&path, 150.0).unwrap();
        assert_eq!(p, EnuPoint::new(100.0, 50.0, 0.0));
        assert_eq!(d, Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(point_along_path(&path, 1e6).unwrap().0, path[2]);
    }
}
