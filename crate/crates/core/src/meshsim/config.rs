//! Simulation configuration and its `key = value` file format.
//!
//! ```text
//! [network]
//! coordinator = 0000
//! coordinator_mac = DEADBEEFFEEDDADD
//! relays = 0002, 0003
//! passive = 0003
//! duty_cycle_default = 0.5
//!
//! [topology]
//! 0000: 0002, 0003
//! 0002: 000D, 000F
//! ```
//!
//! Sections: `network`, `crypto`, `channel`, `sim`, `radio`, `energy`,
//! `topology`. Omitted keys keep their defaults; unknown keys are errors.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::keying::KeySpec;
use crate::registry::{Registry, RolePlan};

use super::routing::{build_routes, Routes, Topology};

/// Shipped configuration for the shipped node table.
pub const DEFAULT_CONFIG: &str = include_str!("../../data/default.conf");

/// Carried for reporting only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadioParams {
    pub frequency_mhz: f64,
    pub tx_power_dbm: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            frequency_mhz: 2405.0,
            tx_power_dbm: 5.0,
        }
    }
}

/// Energy prices in millijoules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyCosts {
    pub per_byte_tx: f64,
    pub per_byte_rx: f64,
    /// Charged per second spent listening.
    pub idle_per_second: f64,
}

impl Default for EnergyCosts {
    fn default() -> Self {
        EnergyCosts {
            per_byte_tx: 0.2,
            per_byte_rx: 0.1,
            idle_per_second: 0.001,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub topology: Topology,
    pub roles: RolePlan,
    pub key_spec: KeySpec,
    pub noise_bit_flip_prob: f64,
    pub rng_seed: u64,
    /// Seconds of simulated time during which readings are originated.
    pub sim_duration: f64,
    /// Period in seconds for sensors without a scheduled next update.
    pub default_period: u64,
    /// Length in seconds of one passive listen cycle.
    pub listen_period: f64,
    pub radio_params: RadioParams,
    pub energy_costs: EnergyCosts,
    /// Battery per node in joules. The coordinator is mains powered.
    pub initial_energy: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            topology: Topology::new(),
            roles: RolePlan::default(),
            key_spec: KeySpec::MacTail,
            noise_bit_flip_prob: 0.0,
            rng_seed: 0,
            sim_duration: 3600.0,
            default_period: 3600,
            listen_period: 60.0,
            radio_params: RadioParams::default(),
            energy_costs: EnergyCosts::default(),
            initial_energy: 25.0,
        }
    }
}

impl SimConfig {
    /// The shipped default configuration.
    pub fn shipped() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("shipped config parses")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let perr = |reason: String| Error::Parse { line: line_no, reason };
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_owned();
                if !matches!(
                    section.as_str(),
                    "network" | "crypto" | "channel" | "sim" | "radio" | "energy" | "topology"
                ) {
                    return Err(perr(format!("unknown section [{section}]")));
                }
                continue;
            }
            if section == "topology" {
                let (node, neighbors) = line
                    .split_once(':')
                    .ok_or_else(|| perr("expected `name: neighbor, ...`".into()))?;
                let node = node.trim();
                if node.is_empty() {
                    return Err(perr("empty node name".into()));
                }
                cfg.topology.add_node(node);
                for n in names(neighbors) {
                    cfg.topology.add_edge(node, &n);
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| perr("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| perr(format!("{key}: {v:?} is not a number")))
            };
            let int = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| perr(format!("{key}: {v:?} is not an integer")))
            };
            match (section.as_str(), key) {
                ("network", "coordinator") => cfg.roles.coordinator_name = value.to_owned(),
                ("network", "coordinator_mac") => {
                    let hex = value.trim_start_matches("0x").trim_start_matches("0X");
                    cfg.roles.coordinator_mac =
                        u64::from_str_radix(hex, 16).map_err(|_| perr(format!("bad MAC {value:?}")))?;
                }
                ("network", "relays") => cfg.roles.relays = names(value),
                ("network", "passive") => cfg.roles.passive = names(value),
                ("network", "duty_cycle_default") => cfg.roles.duty_cycle = num(value)?,
                ("crypto", "key_mode") => cfg.key_spec = value.parse().map_err(perr)?,
                ("channel", "noise_bit_flip_prob") => cfg.noise_bit_flip_prob = num(value)?,
                ("sim", "rng_seed") => cfg.rng_seed = int(value)?,
                ("sim", "sim_duration") => cfg.sim_duration = num(value)?,
                ("sim", "default_period") => cfg.default_period = int(value)?,
                ("sim", "listen_period") => cfg.listen_period = num(value)?,
                ("radio", "frequency_mhz") => cfg.radio_params.frequency_mhz = num(value)?,
                ("radio", "tx_power_dbm") => cfg.radio_params.tx_power_dbm = num(value)?,
                ("energy", "per_byte_tx_mj") => cfg.energy_costs.per_byte_tx = num(value)?,
                ("energy", "per_byte_rx_mj") => cfg.energy_costs.per_byte_rx = num(value)?,
                ("energy", "idle_per_second_mj") => cfg.energy_costs.idle_per_second = num(value)?,
                ("energy", "initial_energy_j") => cfg.initial_energy = num(value)?,
                ("", _) => return Err(perr(format!("`{key}` appears before any section"))),
                (s, k) => return Err(perr(format!("unknown key `{k}` in [{s}]"))),
            }
        }
        Ok(cfg)
    }

    /// Checks numeric ranges and that the topology covers exactly the
    /// registry with a relay path from every node to the coordinator.
    pub fn validate(&self, registry: &Registry) -> Result<Routes> {
        let invalid = |m: String| Error::ConfigInvalid(m);
        if !(0.0..=1.0).contains(&self.noise_bit_flip_prob) {
            return Err(invalid(format!(
                "noise_bit_flip_prob {} is outside [0, 1]",
                self.noise_bit_flip_prob
            )));
        }
        if !(self.roles.duty_cycle > 0.0 && self.roles.duty_cycle <= 1.0) {
            return Err(invalid(format!(
                "duty_cycle_default {} is outside (0, 1]",
                self.roles.duty_cycle
            )));
        }
        if !(self.sim_duration.is_finite() && self.sim_duration > 0.0) {
            return Err(invalid(format!("sim_duration {} must be positive", self.sim_duration)));
        }
        if self.default_period == 0 {
            return Err(invalid("default_period must be positive".into()));
        }
        if !(self.listen_period.is_finite() && self.listen_period > 0.0) {
            return Err(invalid("listen_period must be positive".into()));
        }
        let costs = self.energy_costs;
        if [
            costs.per_byte_tx,
            costs.per_byte_rx,
            costs.idle_per_second,
            self.initial_energy,
        ]
        .iter()
        .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(invalid("energy figures must be finite and non-negative".into()));
        }
        for name in self.topology.nodes() {
            if registry.get(name).is_none() {
                return Err(invalid(format!("topology names unknown node {name}")));
            }
        }
        if let Some(missing) = registry.nodes().iter().find(|n| !self.topology.contains(&n.name)) {
            return Err(invalid(format!("node {} is missing from the topology", missing.name)));
        }
        let relays: BTreeSet<String> = registry
            .nodes()
            .iter()
            .filter(|n| n.role.relays())
            .map(|n| n.name.clone())
            .collect();
        build_routes(&self.topology, &relays, &registry.coordinator().name).map_err(|e| invalid(e.to_string()))
    }
}

fn names(list: &str) -> BTreeSet<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}
