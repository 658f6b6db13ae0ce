//! A sleepy relay trades delivered readings for battery life.

use wisense::meshsim::{run, EnergyCosts, SimConfig, Topology};
use wisense::registry::{load_nodes, DEFAULT_NODES};
use wisense::{RolePlan, SensorSchedule, Timestamp};

fn main() -> wisense::Result<()> {
    let first: Timestamp = "2015-10-16 00:00:00".parse()?;
    let schedule = [SensorSchedule {
        node_name: "0008".into(),
        sensor_id: 1,
        last_update: Timestamp::from_epoch(first.epoch() - 37),
        next_update: Some(first),
    }];
    println!("duty  delivered  dropped  relay J left");
    for duty in [1.0, 0.75, 0.5, 0.25, 0.1] {
        let roles = RolePlan {
            relays: ["0004".to_string()].into(),
            passive: ["0004".to_string()].into(),
            duty_cycle: duty,
            ..RolePlan::default()
        };
        let nodes = load_nodes(DEFAULT_NODES)?
            .into_iter()
            .filter(|n| n.name == "0004" || n.name == "0008")
            .collect();
        let registry = roles.apply(nodes)?;
        let cfg = SimConfig {
            topology: Topology::from_edges([("0008", "0004"), ("0004", "0000")]),
            roles,
            sim_duration: 86_400.0,
            energy_costs: EnergyCosts {
                idle_per_second: 0.1,
                ..EnergyCosts::default()
            },
            ..SimConfig::default()
        };
        let r = run(&cfg, &registry, &schedule)?;
        println!(
            "{duty:>4.2}  {:>9}  {:>7}  {:>12.3}",
            r.readings_delivered_intact, r.frames_dropped_duty_cycle, r.per_node_energy_remaining["0004"]
        );
    }
    Ok(())
}
