//! Node table and sensor schedule ingestion.
//!
//! Both files are tab separated with one header line. Blank lines and lines
//! starting with `#` are ignored anywhere in the file.
//!
//! ```text
//! Name  Location  MAC Address          Short Address
//! 0008  Car Park  0x0008000800080008   0x0008
//! ```
//!
//! ```text
//! Name  Id  Last Update           Next Update
//! 0002  1   2015-10-18 04:04:57   -
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::keying::Timestamp;

/// Node table shipped with the crate.
pub const DEFAULT_NODES: &str = include_str!("../data/nodes.tsv");
/// Sensor schedule shipped with the crate.
pub const DEFAULT_SCHEDULE: &str = include_str!("../data/schedule.tsv");

pub const DEFAULT_COORDINATOR_NAME: &str = "0000";
pub const DEFAULT_COORDINATOR_MAC: u64 = 0xDEAD_BEEF_FEED_DADD;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// Leaf mote; originates readings, never relays.
    Rfd,
    /// Originates readings and relays toward the coordinator.
    Ffd,
    Coordinator,
    Gateway,
}

impl Role {
    /// Whether frames may pass through a node of this role on the way to the
    /// coordinator.
    pub fn relays(self) -> bool {
        matches!(self, Role::Ffd | Role::Coordinator)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Rfd => "RFD",
            Role::Ffd => "FFD",
            Role::Coordinator => "COORD",
            Role::Gateway => "GATEWAY",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Duty {
    Active,
    /// Listens only during this fraction of each listen period.
    Passive(f64),
}

impl Duty {
    pub fn fraction(self) -> f64 {
        match self {
            Duty::Active => 1.0,
            Duty::Passive(d) => d,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeDescriptor {
    pub name: String,
    pub location: String,
    pub mac: u64,
    pub short_addr: u16,
    pub role: Role,
    pub duty: Duty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SensorSchedule {
    pub node_name: String,
    pub sensor_id: u8,
    pub last_update: Timestamp,
    pub next_update: Option<Timestamp>,
}

impl SensorSchedule {
    /// Observed update interval in seconds, when the row has a next update.
    pub fn interval(&self) -> Option<i64> {
        self.next_update.map(|next| self.last_update.seconds_until(next))
    }
}

/// Data rows with their 1-based line numbers; the first non-comment line is
/// the header and is skipped.
fn data_rows(source: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .skip(1)
        .map(|(n, l)| (n, l.split('\t').map(str::trim).collect()))
}

fn parse_hex(field: &str, digits: usize, line: usize, what: &str) -> Result<u64> {
    let hex = field
        .strip_prefix("0x")
        .or_else(|| field.strip_prefix("0X"))
        .unwrap_or(field);
    if hex.len() != digits || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::Parse {
            line,
            reason: format!("{what} {field:?} is not {digits} hex digits"),
        });
    }
    Ok(u64::from_str_radix(hex, 16).unwrap())
}

fn check_name(name: &str, line: usize) -> Result<u16> {
    parse_hex(name, 4, line, "node name").map(|v| v as u16)
}

/// Parses the node table. Every row becomes an active RFD; roles and duty
/// cycles are assigned afterwards by a [`RolePlan`].
pub fn load_nodes(source: &str) -> Result<Vec<NodeDescriptor>> {
    let mut seen = BTreeSet::new();
    let mut nodes = Vec::new();
    for (line, cols) in data_rows(source) {
        let [name, location, mac, short] = cols[..] else {
            return Err(Error::Parse {
                line,
                reason: format!("expected 4 columns, got {}", cols.len()),
            });
        };
        if name.starts_with("0x") || name.starts_with("0X") {
            return Err(Error::Parse {
                line,
                reason: format!("node name {name:?} is not 4 hex digits"),
            });
        }
        let name_value = check_name(name, line)?;
        let mac = parse_hex(mac, 16, line, "MAC address")?;
        let short_addr = parse_hex(short, 4, line, "short address")? as u16;

        let violation = |which: &str| Error::InvariantViolation {
            name: name.to_owned(),
            which: which.to_owned(),
        };
        if short_addr != name_value {
            return Err(violation("short address differs from node name"));
        }
        if (0..4).any(|g| (mac >> (16 * g)) as u16 != short_addr) {
            return Err(violation("MAC address groups do not all equal the short address"));
        }
        if !seen.insert(name.to_ascii_uppercase()) {
            return Err(Error::DuplicateName(name.to_owned()));
        }
        nodes.push(NodeDescriptor {
            name: name.to_owned(),
            location: location.to_owned(),
            mac,
            short_addr,
            role: Role::Rfd,
            duty: Duty::Active,
        });
    }
    Ok(nodes)
}

pub fn load_schedule(source: &str, nodes: &[NodeDescriptor]) -> Result<Vec<SensorSchedule>> {
    let known: BTreeSet<&str> = nodes.iter().map(|n| n.name.as_str()).collect();
    let mut rows = Vec::new();
    for (line, cols) in data_rows(source) {
        let [name, id, last, next] = cols[..] else {
            return Err(Error::Parse {
                line,
                reason: format!("expected 4 columns, got {}", cols.len()),
            });
        };
        check_name(name, line)?;
        if !known.contains(name) {
            return Err(Error::UnknownNode(name.to_owned()));
        }
        let sensor_id: u8 = id.parse().ok().filter(|&v| v > 0).ok_or_else(|| Error::Parse {
            line,
            reason: format!("sensor id {id:?} is not a small positive integer"),
        })?;
        let stamp = |s: &str| {
            s.parse::<Timestamp>().map_err(|e| Error::Parse {
                line,
                reason: e.to_string(),
            })
        };
        let last_update = stamp(last)?;
        let next_update = match next {
            "-" => None,
            s => Some(stamp(s)?),
        };
        if next_update.is_some_and(|n| n <= last_update) {
            return Err(Error::NonMonotoneUpdate { line });
        }
        rows.push(SensorSchedule {
            node_name: name.to_owned(),
            sensor_id,
            last_update,
            next_update,
        });
    }
    Ok(rows)
}

/// Role and duty assignment applied on top of the node table.
#[derive(Clone, Debug, PartialEq)]
pub struct RolePlan {
    pub coordinator_name: String,
    pub coordinator_mac: u64,
    /// Nodes that act as FFDs; every other table node is an RFD.
    pub relays: BTreeSet<String>,
    /// Nodes that run duty-cycled with `duty_cycle`.
    pub passive: BTreeSet<String>,
    pub duty_cycle: f64,
}

impl Default for RolePlan {
    fn default() -> Self {
        RolePlan {
            coordinator_name: DEFAULT_COORDINATOR_NAME.into(),
            coordinator_mac: DEFAULT_COORDINATOR_MAC,
            relays: BTreeSet::new(),
            passive: BTreeSet::new(),
            duty_cycle: 1.0,
        }
    }
}

impl RolePlan {
    /// Assigns roles to the table nodes and adds the coordinator.
    pub fn apply(&self, mut nodes: Vec<NodeDescriptor>) -> Result<Registry> {
        let names: BTreeSet<&str> = nodes.iter().map(|n| n.name.as_str()).collect();
        if let Some(unknown) = self
            .relays
            .iter()
            .chain(&self.passive)
            .find(|n| !names.contains(n.as_str()))
        {
            return Err(Error::UnknownNode(unknown.clone()));
        }
        if !(self.duty_cycle > 0.0 && self.duty_cycle <= 1.0) {
            return Err(Error::ConfigInvalid(format!(
                "duty cycle {} is outside (0, 1]",
                self.duty_cycle
            )));
        }
        for node in &mut nodes {
            if self.relays.contains(&node.name) {
                node.role = Role::Ffd;
            }
            if self.passive.contains(&node.name) {
                node.duty = Duty::Passive(self.duty_cycle);
            }
        }
        nodes.push(NodeDescriptor {
            name: self.coordinator_name.clone(),
            location: "PAN coordinator".into(),
            mac: self.coordinator_mac,
            short_addr: 0x0000,
            role: Role::Coordinator,
            duty: Duty::Active,
        });
        Registry::new(nodes)
    }
}

/// Immutable, validated set of nodes with lookups by name and MAC.
#[derive(Clone, Debug, PartialEq)]
pub struct Registry {
    nodes: Vec<NodeDescriptor>,
    by_name: BTreeMap<String, usize>,
    by_mac: BTreeMap<u64, usize>,
    coordinator: usize,
}

impl Registry {
    /// Requires unique names, unique MACs and exactly one coordinator.
    pub fn new(nodes: Vec<NodeDescriptor>) -> Result<Self> {
        let mut by_name = BTreeMap::new();
        let mut by_mac = BTreeMap::new();
        let mut coordinators = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            if by_name.insert(n.name.clone(), i).is_some() {
                return Err(Error::DuplicateName(n.name.clone()));
            }
            if by_mac.insert(n.mac, i).is_some() {
                return Err(Error::InvariantViolation {
                    name: n.name.clone(),
                    which: "duplicate MAC address".into(),
                });
            }
            if n.role == Role::Coordinator {
                coordinators.push(i);
            }
        }
        let [coordinator] = coordinators[..] else {
            let name = coordinators.get(1).map_or_else(String::new, |&i| nodes[i].name.clone());
            return Err(Error::InvariantViolation {
                name,
                which: format!(
                    "network must have exactly one coordinator, found {}",
                    coordinators.len()
                ),
            });
        };
        Ok(Registry {
            nodes,
            by_name,
            by_mac,
            coordinator,
        })
    }

    /// The shipped node table with the default coordinator and no relays.
    pub fn default_dataset() -> Result<Self> {
        RolePlan::default().apply(load_nodes(DEFAULT_NODES)?)
    }

    pub fn nodes(&self) -> &[NodeDescriptor] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&NodeDescriptor> {
        self.by_name.get(name).map(|&i| &self.nodes[i])
    }

    pub fn by_mac(&self, mac: u64) -> Option<&NodeDescriptor> {
        self.by_mac.get(&mac).map(|&i| &self.nodes[i])
    }

    pub fn coordinator(&self) -> &NodeDescriptor {
        &self.nodes[self.coordinator]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_shipped_node_table() {
        let nodes = load_nodes(DEFAULT_NODES).unwrap();
        assert_eq!(nodes.len(), 24);
        let car_park = nodes.iter().find(|n| n.name == "0008").unwrap();
        assert_eq!(car_park.location, "Car Park");
        assert_eq!(car_park.mac, 0x0008_0008_0008_0008);
        assert_eq!(car_park.short_addr, 0x0008);
        for n in &nodes {
            assert_eq!(n.mac as u8, n.short_addr as u8);
        }
    }

    #[test]
    fn empty_input_is_empty_list() {
        assert!(load_nodes("").unwrap().is_empty());
        assert!(load_nodes("Name\tLocation\tMAC\tShort\n").unwrap().is_empty());
    }

    #[test]
    fn node_invariants() {
        let bad_mac = "h\n0008\tX\t0x0008000900080008\t0x0008\n";
        assert!(matches!(load_nodes(bad_mac), Err(Error::InvariantViolation { name, .. }) if name == "0008"));
        let bad_short = "h\n0008\tX\t0x0008000800080008\t0x0009\n";
        assert!(matches!(load_nodes(bad_short), Err(Error::InvariantViolation { .. })));
        let dup = "h\n0008\tX\t0x0008000800080008\t0x0008\n0008\tY\t0x0008000800080008\t0x0008\n";
        assert_eq!(load_nodes(dup), Err(Error::DuplicateName("0008".into())));
        let short_row = "h\n0008\tX\n";
        assert!(matches!(load_nodes(short_row), Err(Error::Parse { line: 2, .. })));
        let bad_hex = "h\n\n# c\n0008\tX\t0x00080008000800ZZ\t0x0008\n";
        assert!(matches!(load_nodes(bad_hex), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn loads_shipped_schedule() {
        let nodes = load_nodes(DEFAULT_NODES).unwrap();
        let rows = load_schedule(DEFAULT_SCHEDULE, &nodes).unwrap();
        // Counted from the data file with `grep -v '^#' | tail -n +2 | wc -l`.
        assert_eq!(rows.len(), 72);
        let pairs: BTreeSet<_> = rows.iter().map(|r| (r.node_name.clone(), r.sensor_id)).collect();
        assert_eq!(pairs.len(), 72);
        assert_eq!(rows.iter().filter(|r| r.next_update.is_none()).count(), 25);

        let first = &rows[0];
        assert_eq!((first.node_name.as_str(), first.sensor_id), ("0002", 1));
        assert_eq!(first.last_update.to_string(), "2015-10-18 04:04:57");
        assert_eq!(first.next_update, None);

        let third = &rows[2];
        assert_eq!((third.node_name.as_str(), third.sensor_id), ("0019", 4));
        assert_eq!(third.interval(), Some(3 * 3600));

        let silent: BTreeSet<&str> = ["0015", "000A", "000B"].into();
        assert!(rows.iter().all(|r| !silent.contains(r.node_name.as_str())));
    }

    #[test]
    fn schedule_errors() {
        let nodes = load_nodes(DEFAULT_NODES).unwrap();
        let unknown = "h\n00FF\t1\t2015-10-18 04:04:57\t-\n";
        assert_eq!(load_schedule(unknown, &nodes), Err(Error::UnknownNode("00FF".into())));
        let backwards = "h\n0005\t4\t2015-10-15 13:00:01\t2015-10-15 05:00:01\n";
        assert_eq!(
            load_schedule(backwards, &nodes),
            Err(Error::NonMonotoneUpdate { line: 2 })
        );
        let equal = "h\n0005\t4\t2015-10-15 13:00:01\t2015-10-15 13:00:01\n";
        assert_eq!(load_schedule(equal, &nodes), Err(Error::NonMonotoneUpdate { line: 2 }));
        let bad_time = "h\n0005\t4\t2015-10-15\t-\n";
        assert!(matches!(
            load_schedule(bad_time, &nodes),
            Err(Error::Parse { line: 2, .. })
        ));
        let bad_id = "h\n0005\t0\t2015-10-15 13:00:01\t-\n";
        assert!(matches!(
            load_schedule(bad_id, &nodes),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn deterministic_ingestion() {
        let a = load_nodes(DEFAULT_NODES).unwrap();
        let b = load_nodes(DEFAULT_NODES).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            load_schedule(DEFAULT_SCHEDULE, &a).unwrap(),
            load_schedule(DEFAULT_SCHEDULE, &b).unwrap()
        );
    }

    #[test]
    fn role_plan_injects_single_coordinator() {
        let nodes = load_nodes(DEFAULT_NODES).unwrap();
        let plan = RolePlan {
            relays: ["0004".to_string()].into(),
            passive: ["0004".to_string()].into(),
            duty_cycle: 0.25,
            ..RolePlan::default()
        };
        let reg = plan.apply(nodes.clone()).unwrap();
        assert_eq!(reg.len(), 25);
        assert_eq!(reg.coordinator().mac, 0xDEAD_BEEF_FEED_DADD);
        assert_eq!(reg.get("0004").unwrap().role, Role::Ffd);
        assert_eq!(reg.get("0004").unwrap().duty, Duty::Passive(0.25));
        assert_eq!(reg.by_mac(0x0008_0008_0008_0008).unwrap().name, "0008");

        let bad = RolePlan {
            relays: ["0099".to_string()].into(),
            ..RolePlan::default()
        };
        assert_eq!(bad.apply(nodes.clone()), Err(Error::UnknownNode("0099".into())));

        let mut two = nodes;
        two[0].role = Role::Coordinator;
        assert!(matches!(
            RolePlan::default().apply(two),
            Err(Error::InvariantViolation { .. })
        ));
    }
}
