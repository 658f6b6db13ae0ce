//! Runs the shipped network for a day in each key mode, then once more with a
//! noisy channel.

use wisense::keying::KeySpec;
use wisense::meshsim::{run, SimConfig};
use wisense::registry::{load_nodes, load_schedule, DEFAULT_NODES, DEFAULT_SCHEDULE};

fn main() -> wisense::Result<()> {
    let mut cfg = SimConfig::shipped();
    let nodes = load_nodes(DEFAULT_NODES)?;
    let schedule = load_schedule(DEFAULT_SCHEDULE, &nodes)?;
    let registry = cfg.roles.apply(nodes)?;

    for spec in KeySpec::ALL {
        cfg.key_spec = spec;
        let r = run(&cfg, &registry, &schedule)?;
        println!(
            "{spec:<11} {} of {} intact",
            r.readings_delivered_intact, r.readings_originated
        );
    }

    cfg.key_spec = KeySpec::MacTail;
    cfg.noise_bit_flip_prob = 0.002;
    let r = run(&cfg, &registry, &schedule)?;
    println!();
    print!("{}", r.render_text());
    assert!(r.is_conserved());
    Ok(())
}
