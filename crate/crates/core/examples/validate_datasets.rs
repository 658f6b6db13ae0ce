//! Loads the shipped node table and sensor schedule and summarizes them.

use std::collections::BTreeMap;

use wisense::registry::{load_nodes, load_schedule, DEFAULT_NODES, DEFAULT_SCHEDULE};
use wisense::Registry;

fn main() -> wisense::Result<()> {
    let nodes = load_nodes(DEFAULT_NODES)?;
    let schedule = load_schedule(DEFAULT_SCHEDULE, &nodes)?;
    let registry = Registry::default_dataset()?;

    println!("{} node descriptors, {} in registry", nodes.len(), registry.len());
    let c = registry.coordinator();
    println!("coordinator {} mac {:016X} role {:?}", c.name, c.mac, c.role);

    let mut per_node: BTreeMap<&str, usize> = BTreeMap::new();
    let mut intervals: BTreeMap<i64, usize> = BTreeMap::new();
    for s in &schedule {
        *per_node.entry(s.node_name.as_str()).or_default() += 1;
        if let Some(i) = s.interval() {
            *intervals.entry(i).or_default() += 1;
        }
    }
    println!("{} sensors on {} nodes", schedule.len(), per_node.len());
    for (secs, n) in intervals {
        println!("  every {secs:>5} s: {n} sensors");
    }
    let silent: Vec<&str> = nodes
        .iter()
        .map(|n| n.name.as_str())
        .filter(|n| !per_node.contains_key(n))
        .collect();
    println!("no sensors: {}", silent.join(" "));
    Ok(())
}
