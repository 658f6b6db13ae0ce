//! Discrete-event simulation of a WiSense multihop mesh.
//!
//! RFDs originate encrypted readings on their sensor schedules, FFDs relay
//! frames unmodified along minimum-hop routes, and the coordinator deframes,
//! decrypts and hands plaintext readings to an in-process gateway. Each hop
//! takes one second and passes through a bit-flip channel. Passive nodes
//! listen only during the first `duty` fraction of every listen period and
//! drop frames that arrive outside it. Battery nodes pay for every byte sent
//! and received and for time spent listening.
//!
//! Runs are fully determined by the configuration, datasets and seed.

mod config;
mod endpoint;
mod engine;
mod report;
mod routing;

pub use config::{EnergyCosts, RadioParams, SimConfig, DEFAULT_CONFIG};
pub use endpoint::{coordinator_receive, originate_reading, receive_frame, transmit, Reading, ReceiveFailure};
pub use engine::{run, schedule_start, EventKind, SimEvent, Simulation, HOP_DELAY};
pub use report::SimReport;
pub use routing::{build_routes, Routes, Topology};
