//! Single-byte link encryption for WiSense sensor meshes.
//!
//! Each reading is pushed through the AES S-Box and XORed with a single key
//! byte taken from the sender's MAC address, its name, or a timestamp field.
//! Around that cipher the crate provides the wire frame, dataset ingestion
//! for the node table and sensor schedule, a discrete-event mesh simulator,
//! and an analysis harness that measures what the cipher actually resists.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod framing;
pub mod keying;
pub mod meshsim;
pub mod registry;
pub mod sbox;

pub use error::{Error, Result};
pub use framing::{decode_frame, encode_frame, Frame};
pub use keying::{decode_flags, derive_key, encode_flags, KeySpec, Timestamp, TsField};
pub use registry::{load_nodes, load_schedule, Duty, NodeDescriptor, Registry, Role, RolePlan, SensorSchedule};
pub use sbox::{decrypt_byte, encrypt_byte, encrypt_payload, inverse_substitute, substitute, KeyByte, SBOX};
