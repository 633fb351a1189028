//! Fast-time simulator for collision avoidance of urban air mobility ownships
//! against non-cooperative drones and birds.

pub mod agents;
pub mod batch;
pub mod cdr;
pub mod cli;
pub mod envelopes;
pub mod engine;
pub mod geo;
pub mod metrics;
pub mod report;
pub mod scenario;
