use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// Undirected adjacency over node names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Topology {
    adjacency: BTreeMap<String, BTreeSet<String>>,
}

impl Topology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: &str) {
        self.adjacency.entry(name.to_owned()).or_default();
    }

    /// Adds `a - b`. Self loops are ignored.
    pub fn add_edge(&mut self, a: &str, b: &str) {
        self.add_node(a);
        self.add_node(b);
        if a != b {
            self.adjacency.get_mut(a).unwrap().insert(b.to_owned());
            self.adjacency.get_mut(b).unwrap().insert(a.to_owned());
        }
    }

    pub fn from_edges<'a>(edges: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut t = Self::new();
        for (a, b) in edges {
            t.add_edge(a, b);
        }
        t
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.adjacency.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.adjacency.contains_key(name)
    }

    pub fn neighbors(&self, name: &str) -> impl Iterator<Item = &str> {
        self.adjacency.get(name).into_iter().flatten().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }
}

/// Next hop and hop count toward the coordinator for every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Routes {
    coordinator: String,
    next_hop: BTreeMap<String, String>,
    hops: BTreeMap<String, u32>,
}

impl Routes {
    pub fn coordinator(&self) -> &str {
        &self.coordinator
    }

    pub fn next_hop(&self, node: &str) -> Option<&str> {
        self.next_hop.get(node).map(String::as_str)
    }

    pub fn hops(&self, node: &str) -> Option<u32> {
        self.hops.get(node).copied()
    }

    pub fn hop_counts(&self) -> &BTreeMap<String, u32> {
        &self.hops
    }

    /// Full path from `node` to the coordinator, both ends included.
    pub fn path(&self, node: &str) -> Vec<&str> {
        let mut path = vec![];
        let mut cur = self.hops.get_key_value(node).map(|(k, _)| k.as_str());
        while let Some(n) = cur {
            path.push(n);
            cur = self.next_hop(n);
        }
        path
    }
}

/// Minimum-hop routes to `coordinator` where every intermediate node is a
/// relay. Among equally short routes the lexicographically smallest next hop
/// wins.
pub fn build_routes(topology: &Topology, relays: &BTreeSet<String>, coordinator: &str) -> Result<Routes> {
    if !topology.contains(coordinator) {
        return Err(Error::Unreachable(coordinator.to_owned()));
    }
    let forwards = |n: &str| n == coordinator || relays.contains(n);

    let mut hops: BTreeMap<String, u32> = BTreeMap::new();
    hops.insert(coordinator.to_owned(), 0);
    let mut queue = VecDeque::from([coordinator]);
    while let Some(u) = queue.pop_front() {
        if !forwards(u) {
            continue;
        }
        let d = hops[u];
        for v in topology.neighbors(u) {
            if !hops.contains_key(v) {
                hops.insert(v.to_owned(), d + 1);
                queue.push_back(v);
            }
        }
    }
    if let Some(lost) = topology.nodes().find(|n| !hops.contains_key(*n)) {
        return Err(Error::Unreachable(lost.to_owned()));
    }

    let mut next_hop = BTreeMap::new();
    for (node, &d) in &hops {
        if node == coordinator {
            continue;
        }
        // Neighbors iterate in name order, so the first match is the smallest.
        let hop = topology
            .neighbors(node)
            .find(|n| forwards(n) && hops[*n] + 1 == d)
            .expect("BFS parent exists");
        next_hop.insert(node.clone(), hop.to_owned());
    }
    Ok(Routes {
        coordinator: coordinator.to_owned(),
        next_hop,
        hops,
    })
}
