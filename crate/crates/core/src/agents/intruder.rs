use serde::{Deserialize, Serialize};
use std::fmt;

use super::AgentError;
use crate::geo::{EnuPoint, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntruderKind {
    Drone,
    Bird,
}

impl IntruderKind {
    pub fn keyword(self) -> &'static str {
        match self {
            IntruderKind::Drone => "DRONE",
            IntruderKind::Bird => "BIRD",
        }
    }

    /// Pack default cruise speed, m/s.
    pub fn default_speed(self) -> f64 {
        match self {
            IntruderKind::Drone => 20.0,
            IntruderKind::Bird => 15.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntruderBehavior {
    Predictable,
    Unpredictable,
}

impl IntruderBehavior {
    pub fn keyword(self) -> &'static str {
        match self {
            IntruderBehavior::Predictable => "PREDICTABLE",
            IntruderBehavior::Unpredictable => "UNPREDICTABLE",
        }
    }
}

/// Which clock an intruder's spawn time is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpawnClock {
    /// Seconds after the scheduled departure time.
    Mission,
    /// Seconds after the ownship's effective departure.
    Departure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScriptMode {
    PassBy,
    Linger,
    Pursuit,
}

impl ScriptMode {
    pub fn keyword(self) -> &'static str {
        match self {
            ScriptMode::PassBy => "PASSBY",
            ScriptMode::Linger => "LINGER",
            ScriptMode::Pursuit => "PURSUIT",
        }
    }
}

/// Closed-form (or, for pursuit, reactive) intruder motion.
///
/// * `PassBy`: straight line from `start` shifted `offset` m to the right of
///   `heading`, flown at `speed`.
/// * `Linger`: holds at `start` for `linger_duration`, then departs on `heading`.
/// * `Pursuit`: holds at `start` for `linger_duration`, then steers toward the
///   ownship's current position; after `pursuit_duration` of chasing (when
///   set) it gives up and flies `heading`.
///
/// With a `lifetime` the intruder disappears that many seconds after spawning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScriptedBehavior {
    pub mode: ScriptMode,
    pub start: EnuPoint,
    pub heading_deg: f64,
    pub speed: f64,
    pub linger_duration: f64,
    pub offset: f64,
    pub pursuit_duration: Option<f64>,
    pub lifetime: Option<f64>,
}

impl ScriptedBehavior {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(format!("script speed must be positive, got {}", self.speed));
        }
        if !(self.linger_duration >= 0.0) {
            return Err(format!("linger duration must be non-negative, got {}", self.linger_duration));
        }
        if !self.start.is_finite() || self.start.up < 0.0 {
            return Err(format!("invalid script start {:?}", self.start));
        }
        if let Some(p) = self.pursuit_duration {
            if !(p >= 0.0) {
                return Err(format!("pursuit duration must be non-negative, got {p}"));
            }
        }
        if let Some(l) = self.lifetime {
            if !(l > 0.0) {
                return Err(format!("lifetime must be positive, got {l}"));
            }
        }
        Ok(())
    }

    fn direction(&self) -> Vec3 {
        Vec3::from_heading(self.heading_deg)
    }

    fn alive(&self, local_t: f64) -> bool {
        local_t >= 0.0 && self.lifetime.map_or(true, |l| local_t <= l)
    }
}

/// Timed position samples, times relative to the intruder's spawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    samples: Vec<(f64, EnuPoint)>,
}

impl Trajectory {
    pub fn new(samples: Vec<(f64, EnuPoint)>) -> Result<Self, AgentError> {
        if samples.len() < 2 {
            return Err(AgentError::Trajectory(format!("need at least 2 samples, got {}", samples.len())));
        }
        for (i, w) in samples.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(AgentError::Trajectory(format!(
                    "time not strictly increasing at sample {} ({} -> {})",
                    i + 2,
                    w[0].0,
                    w[1].0
                )));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, EnuPoint)] {
        &self.samples
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].0
    }

    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    /// Linear interpolation; `None` outside the sampled interval.
    pub fn state_at(&self, t: f64) -> Option<IntruderState> {
        if t < self.start_time() || t > self.end_time() {
            return None;
        }
        let i = self.samples.partition_point(|(st, _)| *st <= t).clamp(1, self.samples.len() - 1);
        let (t0, p0) = self.samples[i - 1];
        let (t1, p1) = self.samples[i];
        let f = (t - t0) / (t1 - t0);
        let pos = if f == 0.0 { p0 } else if f == 1.0 { p1 } else { p0.lerp(p1, f) };
        Some(IntruderState { pos, velocity: p1.sub(p0).scale(1.0 / (t1 - t0)) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum IntruderSource {
    CsvTrajectory { path: String, trajectory: Trajectory },
    Scripted(ScriptedBehavior),
}

/// Scenario annotation: the encounter a scripted intruder is meant to produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncounterTag {
    pub location: u8,
    pub direction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntruderRecord {
    pub id: String,
    pub kind: IntruderKind,
    pub behavior: IntruderBehavior,
    pub source: IntruderSource,
    pub spawn_time: f64,
    pub spawn_clock: SpawnClock,
    pub encounter: Option<EncounterTag>,
}

impl IntruderRecord {
    pub fn script(&self) -> Option<&ScriptedBehavior> {
        match &self.source {
            IntruderSource::Scripted(s) => Some(s),
            IntruderSource::CsvTrajectory { .. } => None,
        }
    }

    pub fn trajectory(&self) -> Option<&Trajectory> {
        match &self.source {
            IntruderSource::CsvTrajectory { trajectory, .. } => Some(trajectory),
            IntruderSource::Scripted(_) => None,
        }
    }

    pub fn max_speed(&self) -> f64 {
        match &self.source {
            IntruderSource::Scripted(s) => s.speed,
            IntruderSource::CsvTrajectory { trajectory, .. } => trajectory
                .samples()
                .windows(2)
                .map(|w| w[1].1.distance(w[0].1) / (w[1].0 - w[0].0))
                .fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntruderState {
    pub pos: EnuPoint,
    pub velocity: Vec3,
}

/// State of a history-free intruder at mission time `t`, with its clock
/// starting at `clock_origin` (0 for the mission clock, the effective departure
/// time for the departure clock).
///
/// Pursuit scripts depend on the ownship's past path; for them only the spawn
/// instant is answerable here and later times return `StatefulBehavior`. Use
/// [`IntruderAgent`] to play them.
pub fn intruder_state_at(
    rec: &IntruderRecord,
    ownship: EnuPoint,
    t: f64,
    clock_origin: f64,
) -> Result<Option<IntruderState>, AgentError> {
    let local = t - clock_origin - rec.spawn_time;
    if local < 0.0 {
        return Ok(None);
    }
    match &rec.source {
        IntruderSource::CsvTrajectory { trajectory, .. } => Ok(trajectory.state_at(local)),
        IntruderSource::Scripted(s) => {
            if !s.alive(local) {
                return Ok(None);
            }
            match s.mode {
                ScriptMode::PassBy => {
                    let dir = s.direction();
                    let right = Vec3::new(dir.north, -dir.east, 0.0);
                    let velocity = dir.scale(s.speed);
                    let pos = s.start.add(right.scale(s.offset)).add(velocity.scale(local));
                    Ok(Some(IntruderState { pos, velocity }))
                }
                ScriptMode::Linger => {
                    if local <= s.linger_duration {
                        Ok(Some(IntruderState { pos: s.start, velocity: Vec3::ZERO }))
                    } else {
                        let velocity = s.direction().scale(s.speed);
                        Ok(Some(IntruderState {
                            pos: s.start.add(velocity.scale(local - s.linger_duration)),
                            velocity,
                        }))
                    }
                }
                ScriptMode::Pursuit if local < s.linger_duration => {
                    Ok(Some(IntruderState { pos: s.start, velocity: Vec3::ZERO }))
                }
                ScriptMode::Pursuit if local == 0.0 => Ok(Some(IntruderState {
                    pos: s.start,
                    velocity: pursuit_direction(s.start, ownship, s).scale(s.speed),
                })),
                ScriptMode::Pursuit => Err(AgentError::StatefulBehavior(rec.id.clone())),
            }
        }
    }
}

fn pursuit_direction(from: EnuPoint, target: EnuPoint, s: &ScriptedBehavior) -> Vec3 {
    let d = target.sub(from);
    let n = d.norm();
    if n > 0.0 {
        d.scale(1.0 / n)
    } else {
        s.direction()
    }
}

/// Per-run playback of one intruder, carrying pursuit state between ticks.
#[derive(Debug, Clone)]
pub struct IntruderAgent {
    pub record: IntruderRecord,
    clock_origin: f64,
    pursuit: Option<(f64, EnuPoint)>,
}

impl IntruderAgent {
    pub fn new(record: IntruderRecord, departure_time: f64) -> Self {
        let clock_origin = match record.spawn_clock {
            SpawnClock::Mission => 0.0,
            SpawnClock::Departure => departure_time,
        };
        Self { record, clock_origin, pursuit: None }
    }

    pub fn id(&self) -> &str {
        &self.record.id
    }

    /// Absolute mission time at which this intruder appears.
    pub fn spawn_at(&self) -> f64 {
        self.clock_origin + self.record.spawn_time
    }

    /// Advance to mission time `t` given the ownship's current position.
    /// Calls must use non-decreasing `t`.
    pub fn advance(&mut self, t: f64, ownship: EnuPoint) -> Result<Option<IntruderState>, AgentError> {
        let script = match &self.record.source {
            IntruderSource::Scripted(s) if s.mode == ScriptMode::Pursuit => *s,
            _ => return intruder_state_at(&self.record, ownship, t, self.clock_origin),
        };
        let local = t - self.spawn_at();
        if !script.alive(local) {
            return Ok(None);
        }
        let (prev_t, prev_pos) = match self.pursuit {
            None => {
                self.pursuit = Some((t, script.start));
                let velocity = if local < script.linger_duration {
                    Vec3::ZERO
                } else {
                    pursuit_direction(script.start, ownship, &script).scale(script.speed)
                };
                return Ok(Some(IntruderState { pos: script.start, velocity }));
            }
            Some(p) => p,
        };
        let dt = t - prev_t;
        if dt <= 0.0 {
            return Ok(Some(IntruderState { pos: prev_pos, velocity: Vec3::ZERO }));
        }
        if local < script.linger_duration {
            self.pursuit = Some((t, prev_pos));
            return Ok(Some(IntruderState { pos: prev_pos, velocity: Vec3::ZERO }));
        }
        let chase_time = local - script.linger_duration;
        let chasing = script.pursuit_duration.map_or(true, |p| chase_time <= p);
        let step = if chasing {
            let to_target = ownship.sub(prev_pos);
            let dist = to_target.norm();
            let reach = script.speed * dt;
            if dist <= reach {
                to_target
            } else {
                to_target.scale(reach / dist)
            }
        } else {
            script.direction().scale(script.speed * dt)
        };
        let mut pos = prev_pos.add(step);
        pos.up = pos.up.max(0.0);
        self.pursuit = Some((t, pos));
        Ok(Some(IntruderState { pos, velocity: pos.sub(prev_pos).scale(1.0 / dt) }))
    }
}

impl fmt::Display for IntruderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(source: IntruderSource, spawn: f64) -> IntruderRecord {
        IntruderRecord {
            id: "i1".into(),
            kind: IntruderKind::Drone,
            behavior: IntruderBehavior::Predictable,
            source,
            spawn_time: spawn,
            spawn_clock: SpawnClock::Mission,
            encounter: None,
        }
    }

    fn script(mode: ScriptMode, speed: f64) -> ScriptedBehavior {
        ScriptedBehavior {
            mode,
            start: EnuPoint::new(1000.0, 0.0, 300.0),
            heading_deg: 90.0,
            speed,
            linger_duration: 0.0,
            offset: 0.0,
            pursuit_duration: None,
            lifetime: None,
        }
    }

    #[test]
    fn csv_playback_interpolates() {
        let traj = Trajectory::new(vec![
            (0.0, EnuPoint::new(0.0, 0.0, 300.0)),
            (10.0, EnuPoint::new(100.0, 0.0, 300.0)),
        ])
        .unwrap();
        let rec = record(IntruderSource::CsvTrajectory { path: "x.csv".into(), trajectory: traj }, 0.0);
        let s = intruder_state_at(&rec, EnuPoint::ORIGIN, 5.0, 0.0).unwrap().unwrap();
        assert_eq!(s.pos, EnuPoint::new(50.0, 0.0, 300.0));
        assert_eq!(s.velocity, Vec3::new(10.0, 0.0, 0.0));
        assert!(intruder_state_at(&rec, EnuPoint::ORIGIN, 10.5, 0.0).unwrap().is_none());
    }

    #[test]
    fn absent_before_spawn() {
        let rec = record(IntruderSource::Scripted(script(ScriptMode::PassBy, 20.0)), 30.0);
        assert!(intruder_state_at(&rec, EnuPoint::ORIGIN, 29.9, 0.0).unwrap().is_none());
        assert!(intruder_state_at(&rec, EnuPoint::ORIGIN, 30.0, 0.0).unwrap().is_some());
        // Departure clock shifts the whole script.
        assert!(intruder_state_at(&rec, EnuPoint::ORIGIN, 30.0, 300.0).unwrap().is_none());
    }

    #[test]
    fn non_monotonic_trajectory_rejected() {
        let err = Trajectory::new(vec![(5.0, EnuPoint::ORIGIN), (5.0, EnuPoint::ORIGIN)]);
        assert!(matches!(err, Err(AgentError::Trajectory(_))));
    }

    #[test]
    fn linger_holds_then_departs() {
        let mut s = script(ScriptMode::Linger, 20.0);
        s.linger_duration = 100.0;
        let rec = record(IntruderSource::Scripted(s), 0.0);
        let held = intruder_state_at(&rec, EnuPoint::ORIGIN, 100.0, 0.0).unwrap().unwrap();
        assert_eq!(held.pos, s.start);
        assert_eq!(held.velocity, Vec3::ZERO);
        let gone = intruder_state_at(&rec, EnuPoint::ORIGIN, 110.0, 0.0).unwrap().unwrap();
        assert!((gone.pos.east - 1200.0).abs() < 1e-9);
    }

    #[test]
    fn pursuit_closes_at_its_speed_on_a_fixed_target() {
        let s = script(ScriptMode::Pursuit, 15.0);
        let mut agent = IntruderAgent::new(record(IntruderSource::Scripted(s), 0.0), 0.0);
        let target = EnuPoint::new(0.0, 0.0, 300.0);
        let dt = 0.1;
        let mut prev = agent.advance(0.0, target).unwrap().unwrap().pos.distance(target);
        for k in 1..100 {
            let d = agent.advance(k as f64 * dt, target).unwrap().unwrap().pos.distance(target);
            assert!((prev - d - 15.0 * dt).abs() < 1e-9);
            prev = d;
        }
    }

    #[test]
    fn pursuit_is_stateful_for_pure_query() {
        let rec = record(IntruderSource::Scripted(script(ScriptMode::Pursuit, 15.0)), 0.0);
        assert!(matches!(
            intruder_state_at(&rec, EnuPoint::ORIGIN, 1.0, 0.0),
            Err(AgentError::StatefulBehavior(_))
        ));
    }

    #[test]
    fn lifetime_ends_presence() {
        let mut s = script(ScriptMode::PassBy, 20.0);
        s.lifetime = Some(50.0);
        let rec = record(IntruderSource::Scripted(s), 10.0);
        assert!(intruder_state_at(&rec, EnuPoint::ORIGIN, 60.0, 0.0).unwrap().is_some());
        assert!(intruder_state_at(&rec, EnuPoint::ORIGIN, 60.1, 0.0).unwrap().is_none());
    }
}
