use serde::{Deserialize, Serialize};

use crate::geo::{distance_point_to_segment, EnuPoint, RouteId, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundCheckParams {
    /// Any intruder this close to the departure pad blocks both routes, m.
    pub overhead_radius: f64,
    pub corridor_half_width: f64,
    /// Straight-line projection horizon, s.
    pub lookahead: f64,
    pub wait_step: f64,
    pub reroute_buffer: f64,
    pub max_waits: u32,
}

impl Default for GroundCheckParams {
    fn default() -> Self {
        Self {
            overhead_radius: 500.0,
            corridor_half_width: 1000.0,
            lookahead: 600.0,
            wait_step: 300.0,
            reroute_buffer: 60.0,
            max_waits: 2,
        }
    }
}

impl GroundCheckParams {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("overhead_radius", self.overhead_radius),
            ("corridor_half_width", self.corridor_half_width),
            ("lookahead", self.lookahead),
            ("wait_step", self.wait_step),
            ("reroute_buffer", self.reroute_buffer),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.max_waits == 0 {
            return Err("max_waits must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThreatClass {
    None,
    Overhead,
    Route1Threat,
    Route2Threat,
    BothRoutesThreat,
}

impl ThreatClass {
    pub fn blocks(self, route: RouteId) -> bool {
        match self {
            ThreatClass::None => false,
            ThreatClass::Overhead | ThreatClass::BothRoutesThreat => true,
            ThreatClass::Route1Threat => route == RouteId::Route1,
            ThreatClass::Route2Threat => route == RouteId::Route2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GroundDecision {
    Depart { route: RouteId, delay_s: f64 },
    Postponed,
}

impl GroundDecision {
    pub fn delay(&self) -> Option<f64> {
        match self {
            GroundDecision::Depart { delay_s, .. } => Some(*delay_s),
            GroundDecision::Postponed => None,
        }
    }
}

fn flat(p: EnuPoint) -> EnuPoint {
    p.with_up(0.0)
}

fn segments_intersect(a: EnuPoint, b: EnuPoint, c: EnuPoint, d: EnuPoint) -> bool {
    let cross = |o: EnuPoint, p: EnuPoint, q: EnuPoint| {
        (p.east - o.east) * (q.north - o.north) - (p.north - o.north) * (q.east - o.east)
    };
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Horizontal distance between segments `ab` and `cd`.
fn segment_distance(a: EnuPoint, b: EnuPoint, c: EnuPoint, d: EnuPoint) -> f64 {
    let (a, b, c, d) = (flat(a), flat(b), flat(c), flat(d));
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    [
        distance_point_to_segment(a, c, d).0,
        distance_point_to_segment(b, c, d).0,
        distance_point_to_segment(c, a, b).0,
        distance_point_to_segment(d, a, b).0,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

fn ray_hits_corridor(start: EnuPoint, end: EnuPoint, route: &[EnuPoint], half_width: f64) -> bool {
    route.windows(2).any(|w| segment_distance(start, end, w[0], w[1]) <= half_width)
}

/// Classify one intruder seen from the departure pad `v1`.
pub fn heading_threat(
    pos: EnuPoint,
    velocity: Vec3,
    v1: EnuPoint,
    route1: &[EnuPoint],
    route2: &[EnuPoint],
    params: &GroundCheckParams,
) -> ThreatClass {
    if pos.horizontal_distance(v1) <= params.overhead_radius {
        return ThreatClass::Overhead;
    }
    let horizontal = Vec3::new(velocity.east, velocity.north, 0.0);
    let end = pos.add(horizontal.scale(params.lookahead));
    let r1 = ray_hits_corridor(pos, end, route1, params.corridor_half_width);
    let r2 = ray_hits_corridor(pos, end, route2, params.corridor_half_width);
    match (r1, r2) {
        (true, true) => ThreatClass::BothRoutesThreat,
        (true, false) => ThreatClass::Route1Threat,
        (false, true) => ThreatClass::Route2Threat,
        (false, false) => ThreatClass::None,
    }
}

/// Strategic take-off check. `observe(t)` returns the (position, velocity)
/// of every intruder present at mission time `t`.
pub fn takeoff_delay_check<F>(
    mut observe: F,
    v1: EnuPoint,
    route1: &[EnuPoint],
    route2: &[EnuPoint],
    params: &GroundCheckParams,
) -> GroundDecision
where
    F: FnMut(f64) -> Vec<(EnuPoint, Vec3)>,
{
    let mut blocked_at = |t: f64| {
        let threats: Vec<ThreatClass> = observe(t)
            .into_iter()
            .map(|(p, v)| heading_threat(p, v, v1, route1, route2, params))
            .collect();
        let r1 = threats.iter().any(|c| c.blocks(RouteId::Route1));
        let r2 = threats.iter().any(|c| c.blocks(RouteId::Route2));
        (r1, r2)
    };

    if !blocked_at(0.0).0 {
        return GroundDecision::Depart { route: RouteId::Route1, delay_s: 0.0 };
    }
    for k in 1..=params.max_waits {
        let t = k as f64 * params.wait_step;
        let (r1, r2) = blocked_at(t);
        if k == 1 && !r1 {
            return GroundDecision::Depart { route: RouteId::Route1, delay_s: t };
        }
        if !r2 {
            return GroundDecision::Depart { route: RouteId::Route2, delay_s: t + params.reroute_buffer };
        }
    }
    GroundDecision::Postponed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn routes() -> (Vec<EnuPoint>, Vec<EnuPoint>) {
        // Route 1 due north, route 2 north-east then north.
        let r1 = vec![EnuPoint::ORIGIN, EnuPoint::new(0.0, 20_000.0, 0.0)];
        let r2 = vec![
            EnuPoint::ORIGIN,
            EnuPoint::new(10_000.0, 5_000.0, 0.0),
            EnuPoint::new(10_000.0, 20_000.0, 0.0),
        ];
        (r1, r2)
    }

    #[test]
    fn overhead_regardless_of_heading() {
        let (r1, r2) = routes();
        let p = GroundCheckParams::default();
        for h in [0.0, 90.0, 180.0, 270.0] {
            let v = Vec3::from_heading(h).scale(20.0);
            let c = heading_threat(EnuPoint::new(300.0, 0.0, 100.0), v, EnuPoint::ORIGIN, &r1, &r2, &p);
            assert_eq!(c, ThreatClass::Overhead);
        }
    }

    #[test]
    fn receding_intruder_is_no_threat() {
        let (r1, r2) = routes();
        let p = GroundCheckParams::default();
        let c = heading_threat(
            EnuPoint::new(-5_000.0, -2_000.0, 300.0),
            Vec3::from_heading(225.0).scale(20.0),
            EnuPoint::ORIGIN,
            &r1,
            &r2,
            &p,
        );
        assert_eq!(c, ThreatClass::None);
    }

    #[test]
    fn crossing_ray_matches_sampled_oracle() {
        let (r1, r2) = routes();
        let p = GroundCheckParams::default();
        // West of route 1 flying east: reaches route 1 at t = 4000/20 = 200 s.
        let pos = EnuPoint::new(-4_000.0, 10_000.0, 300.0);
        let v = Vec3::from_heading(90.0).scale(20.0);
        let c = heading_threat(pos, v, EnuPoint::ORIGIN, &r1, &r2, &p);
        // Dense sampling oracle.
        let near = |route: &[EnuPoint]| {
            (0..=6000).any(|i| {
                let t = i as f64 * 0.1;
                let q = pos.add(v.scale(t)).with_up(0.0);
                route
                    .windows(2)
                    .any(|w| distance_point_to_segment(q, w[0], w[1]).0 <= p.corridor_half_width)
            })
        };
        let expected = match (near(&r1), near(&r2)) {
            (true, true) => ThreatClass::BothRoutesThreat,
            (true, false) => ThreatClass::Route1Threat,
            (false, true) => ThreatClass::Route2Threat,
            _ => ThreatClass::None,
        };
        assert_eq!(c, expected);
        assert!(c.blocks(RouteId::Route1));
    }

    fn decide(blocks: impl Fn(f64) -> Vec<(EnuPoint, Vec3)>) -> GroundDecision {
        let (r1, r2) = routes();
        takeoff_delay_check(blocks, EnuPoint::ORIGIN, &r1, &r2, &GroundCheckParams::default())
    }

    fn hovering_at(p: EnuPoint) -> Vec<(EnuPoint, Vec3)> {
        vec![(p, Vec3::ZERO)]
    }

    #[test]
    fn delay_outcomes() {
        let near_r1 = EnuPoint::new(-300.0, 8_000.0, 300.0);
        let near_r2 = EnuPoint::new(10_500.0, 12_000.0, 300.0);
        let v1 = EnuPoint::new(100.0, 100.0, 50.0);

        assert_eq!(decide(|_| vec![]), GroundDecision::Depart { route: RouteId::Route1, delay_s: 0.0 });
        assert_eq!(
            decide(|t| if t < 250.0 { hovering_at(near_r1) } else { vec![] }),
            GroundDecision::Depart { route: RouteId::Route1, delay_s: 300.0 }
        );
        assert_eq!(
            decide(|_| hovering_at(near_r1)),
            GroundDecision::Depart { route: RouteId::Route2, delay_s: 360.0 }
        );
        assert_eq!(
            decide(|t| {
                let mut v = hovering_at(near_r1);
                if t < 400.0 {
                    v.extend(hovering_at(near_r2));
                }
                v
            }),
            GroundDecision::Depart { route: RouteId::Route2, delay_s: 660.0 }
        );
        assert_eq!(decide(|_| hovering_at(v1)), GroundDecision::Postponed);
    }
}
