#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wisense::meshsim::{SimConfig, Topology};
use wisense::registry::{load_nodes, load_schedule, Registry, SensorSchedule, DEFAULT_NODES, DEFAULT_SCHEDULE};

/// A small random network: topology, relay set and coordinator name.
pub struct Case {
    pub topology: Topology,
    pub relays: BTreeSet<String>,
    pub coordinator: String,
}

/// Minimum hop count and smallest first hop over every simple path from
/// `from` to the coordinator whose interior nodes are all relays.
pub fn brute_force_route(case: &Case, from: &str) -> Option<(u32, String)> {
    fn walk<'a>(case: &'a Case, at: &'a str, path: &mut Vec<&'a str>, best: &mut Option<(u32, String)>) {
        if at == case.coordinator {
            let hops = (path.len() - 1) as u32;
            let first = path[1].to_owned();
            let better = match best {
                None => true,
                Some((h, f)) => hops < *h || (hops == *h && first < *f),
            };
            if better {
                *best = Some((hops, first));
            }
            return;
        }
        if path.len() > 1 && !case.relays.contains(at) {
            return;
        }
        for next in case.topology.neighbors(at) {
            if !path.contains(&next) {
                path.push(next);
                walk(case, next, path, best);
                path.pop();
            }
        }
    }
    if from == case.coordinator {
        return Some((0, String::new()));
    }
    let mut best = None;
    walk(case, from, &mut vec![from], &mut best);
    best
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            let v = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// `count` connected graphs of 2 to 8 nodes with random relay sets and
/// shuffled names, so tie-breaking sees varied name orders.
pub fn random_cases(count: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k"];
    let mut cases = Vec::with_capacity(count);
    while cases.len() < count {
        let n = rng.random_range(2..=8);
        let density = [0.25, 0.4, 0.6, 0.9][rng.random_range(0..4)];
        let mut edges = vec![];
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(density) {
                    edges.push((a, b));
                }
            }
        }
        if !connected(n, &edges) {
            continue;
        }
        let mut names: Vec<&str> = pool.to_vec();
        names.shuffle(&mut rng);
        let names = &names[..n];
        let mut topology = Topology::new();
        for name in names {
            topology.add_node(name);
        }
        for (a, b) in edges {
            topology.add_edge(names[a], names[b]);
        }
        let relay_prob = rng.random_range(0.3..1.0);
        let relays = names[1..]
            .iter()
            .filter(|_| rng.random_bool(relay_prob))
            .map(|s| s.to_string())
            .collect();
        cases.push(Case {
            topology,
            relays,
            coordinator: names[0].to_owned(),
        });
    }
    cases
}

/// Shipped config, registry and schedule.
pub fn shipped() -> (SimConfig, Registry, Vec<SensorSchedule>) {
    let cfg = SimConfig::shipped();
    let nodes = load_nodes(DEFAULT_NODES).unwrap();
    let schedule = load_schedule(DEFAULT_SCHEDULE, &nodes).unwrap();
    let registry = cfg.roles.apply(nodes).unwrap();
    (cfg, registry, schedule)
}

/// How many nodes sit at each hop depth across the generated cases.
pub fn depth_histogram(cases: &[Case]) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for c in cases {
        for n in c.topology.nodes() {
            if let Some((d, _)) = brute_force_route(c, n) {
                *h.entry(d).or_default() += 1;
            }
        }
    }
    h
}
