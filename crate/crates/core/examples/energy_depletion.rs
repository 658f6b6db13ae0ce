//! Steps the shipped network with small batteries and logs each node that dies.

use wisense::meshsim::{EventKind, SimConfig, Simulation};
use wisense::registry::{load_nodes, load_schedule, DEFAULT_NODES, DEFAULT_SCHEDULE};

fn main() -> wisense::Result<()> {
    let mut cfg = SimConfig::shipped();
    cfg.initial_energy = 0.5;
    cfg.sim_duration = 3.0 * 86_400.0;
    let nodes = load_nodes(DEFAULT_NODES)?;
    let schedule = load_schedule(DEFAULT_SCHEDULE, &nodes)?;
    let registry = cfg.roles.apply(nodes)?;

    let mut sim = Simulation::new(&cfg, &registry, &schedule)?;
    while let Some(ev) = sim.step() {
        if ev.kind == EventKind::NodeDepleted {
            let hops = sim.routes().hops(&ev.subject).unwrap_or(0);
            println!("{:>10.1} s  {} ({hops} hops) depleted", ev.time, ev.subject);
        }
    }
    let r = sim.finish();
    println!(
        "{} originated, {} intact, {} lost to dead nodes",
        r.readings_originated, r.readings_delivered_intact, r.frames_dropped_depleted
    );
    Ok(())
}
