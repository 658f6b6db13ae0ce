use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::framing::encode_frame;
use crate::keying::Timestamp;
use crate::registry::{Duty, Registry, Role, SensorSchedule};

use super::config::SimConfig;
use super::endpoint::{coordinator_receive, originate_reading, transmit, Reading};
use super::report::SimReport;
use super::routing::Routes;

/// Seconds a frame spends on one hop.
pub const HOP_DELAY: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    ReadingDue,
    FrameArrival,
    ListenWindowOpen,
    ListenWindowClose,
    NodeDepleted,
}

impl EventKind {
    /// Processing order among events at the same instant. Window edges come
    /// first so a frame arriving exactly on an edge sees the new state.
    fn rank(self) -> u8 {
        match self {
            EventKind::ListenWindowOpen => 0,
            EventKind::ListenWindowClose => 1,
            EventKind::NodeDepleted => 2,
            EventKind::FrameArrival => 3,
            EventKind::ReadingDue => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimEvent {
    /// Seconds since simulation start.
    pub time: f64,
    pub kind: EventKind,
    pub subject: String,
    pub payload: Option<Vec<u8>>,
}

#[derive(Clone, Copy, Debug)]
enum Tag {
    None,
    Sensor(usize),
    Reading(usize),
}

#[derive(Debug)]
struct Queued {
    event: SimEvent,
    seq: u64,
    tag: Tag,
}

impl Queued {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.event
            .time
            .total_cmp(&other.event.time)
            .then(self.event.kind.rank().cmp(&other.event.kind.rank()))
            .then_with(|| self.event.subject.cmp(&other.event.subject))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_key(other)
    }
}

#[derive(Debug)]
struct NodeState {
    /// Millijoules; `None` for the mains-powered coordinator.
    energy: Option<f64>,
    listening: bool,
    duty: f64,
    last_charge: f64,
    depleted: bool,
}

struct Origin {
    node: String,
    value: u8,
    timestamp: Timestamp,
}

#[derive(Default)]
struct Counters {
    originated: u64,
    intact: u64,
    detected: u64,
    undetected: u64,
    dropped_duty: u64,
    dropped_depleted: u64,
    failure_classes: BTreeMap<String, u64>,
    depleted_at: BTreeMap<String, f64>,
}

/// Single-threaded event loop over one configured network.
pub struct Simulation<'a> {
    config: &'a SimConfig,
    registry: &'a Registry,
    schedule: &'a [SensorSchedule],
    routes: Routes,
    rng: ChaCha8Rng,
    queue: BinaryHeap<Reverse<Queued>>,
    seq: u64,
    start: Timestamp,
    clock: f64,
    periods: Vec<f64>,
    nodes: BTreeMap<String, NodeState>,
    origins: Vec<Origin>,
    in_flight: usize,
    gateway: Vec<Reading>,
    counters: Counters,
}

/// Epoch second that simulation time zero corresponds to: the earliest
/// scheduled next update.
pub fn schedule_start(schedule: &[SensorSchedule], default_period: u64) -> Timestamp {
    let next = schedule.iter().filter_map(|s| s.next_update).min();
    next.or_else(|| {
        schedule
            .iter()
            .map(|s| Timestamp::from_epoch(s.last_update.epoch().saturating_add(default_period as u32)))
            .min()
    })
    .unwrap_or(Timestamp::from_epoch(0))
}

impl<'a> Simulation<'a> {
    pub fn new(config: &'a SimConfig, registry: &'a Registry, schedule: &'a [SensorSchedule]) -> Result<Self> {
        let routes = config.validate(registry)?;
        for s in schedule {
            if registry.get(&s.node_name).is_none() {
                return Err(crate::Error::UnknownNode(s.node_name.clone()));
            }
        }
        let start = schedule_start(schedule, config.default_period);
        let initial_mj = config.initial_energy * 1000.0;
        let nodes = registry
            .nodes()
            .iter()
            .map(|n| {
                let duty = n.duty.fraction();
                let state = NodeState {
                    energy: (n.role != Role::Coordinator).then_some(initial_mj),
                    listening: duty >= 1.0,
                    duty,
                    last_charge: 0.0,
                    depleted: false,
                };
                (n.name.clone(), state)
            })
            .collect();

        let mut sim = Simulation {
            config,
            registry,
            schedule,
            routes,
            rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
            queue: BinaryHeap::new(),
            seq: 0,
            start,
            clock: 0.0,
            periods: Vec::with_capacity(schedule.len()),
            nodes,
            origins: Vec::new(),
            in_flight: 0,
            gateway: Vec::new(),
            counters: Counters::default(),
        };

        for (i, s) in schedule.iter().enumerate() {
            let period = s.interval().unwrap_or(config.default_period as i64) as f64;
            let first = match s.next_update {
                Some(next) => start.seconds_until(next) as f64,
                None => start.seconds_until(s.last_update) as f64 + period,
            };
            // Catch up sensors whose first firing precedes the clock start.
            let first = if first < 0.0 {
                first + period * (-first / period).ceil()
            } else {
                first
            };
            sim.periods.push(period);
            if first < config.sim_duration {
                sim.push(first, EventKind::ReadingDue, &s.node_name, None, Tag::Sensor(i));
            }
        }
        for n in registry.nodes() {
            if matches!(n.duty, Duty::Passive(d) if d < 1.0) {
                sim.push(0.0, EventKind::ListenWindowOpen, &n.name, None, Tag::None);
            }
        }
        Ok(sim)
    }

    fn push(&mut self, time: f64, kind: EventKind, subject: &str, payload: Option<Vec<u8>>, tag: Tag) {
        self.seq += 1;
        let event = SimEvent {
            time,
            kind,
            subject: subject.to_owned(),
            payload,
        };
        self.queue.push(Reverse(Queued {
            event,
            seq: self.seq,
            tag,
        }));
    }

    pub fn routes(&self) -> &Routes {
        &self.routes
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    /// Remaining joules as of the node's last event; `None` for the
    /// coordinator or unknown names.
    pub fn energy_remaining(&self, name: &str) -> Option<f64> {
        self.nodes.get(name).and_then(|s| s.energy).map(|mj| mj / 1000.0)
    }

    /// Readings handed to the gateway so far.
    pub fn gateway(&self) -> &[Reading] {
        &self.gateway
    }

    /// Processes the next event and returns it, or `None` once origination
    /// has ended and no frame is in flight.
    pub fn step(&mut self) -> Option<SimEvent> {
        let next_time = self.queue.peek()?.0.event.time;
        if next_time >= self.config.sim_duration && self.in_flight == 0 {
            return None;
        }
        let Reverse(Queued { event, tag, .. }) = self.queue.pop()?;
        self.clock = event.time;
        match event.kind {
            EventKind::ReadingDue => {
                if let Tag::Sensor(i) = tag {
                    self.on_reading_due(i, event.time);
                }
            }
            EventKind::FrameArrival => {
                if let (Tag::Reading(r), Some(bytes)) = (tag, event.payload.as_deref()) {
                    self.in_flight -= 1;
                    self.on_arrival(&event.subject, r, bytes, event.time);
                }
            }
            EventKind::ListenWindowOpen => self.on_window(&event.subject, event.time, true),
            EventKind::ListenWindowClose => self.on_window(&event.subject, event.time, false),
            EventKind::NodeDepleted => {}
        }
        Some(event)
    }

    /// Charges listening time up to `now`; returns false if the node is (or
    /// just became) depleted.
    fn charge_idle(&mut self, name: &str, now: f64) -> bool {
        let rate = self.config.energy_costs.idle_per_second;
        let state = self.nodes.get_mut(name).expect("registered node");
        if state.depleted {
            return false;
        }
        let elapsed = (now - state.last_charge).max(0.0);
        state.last_charge = state.last_charge.max(now);
        let listening = state.listening;
        let Some(energy) = state.energy.as_mut() else {
            return true;
        };
        if !listening || elapsed == 0.0 || rate == 0.0 {
            return true;
        }
        let cost = rate * elapsed;
        if cost < *energy {
            *energy -= cost;
            return true;
        }
        let died = now - elapsed + *energy / rate;
        *energy = 0.0;
        self.mark_depleted(name, died, now);
        false
    }

    /// Charges a radio operation; returns false if the node ran dry.
    fn charge(&mut self, name: &str, mj: f64, now: f64) -> bool {
        let state = self.nodes.get_mut(name).expect("registered node");
        let Some(energy) = state.energy.as_mut() else {
            return true;
        };
        *energy = (*energy - mj).max(0.0);
        if *energy > 0.0 {
            return true;
        }
        self.mark_depleted(name, now, now);
        false
    }

    fn mark_depleted(&mut self, name: &str, died: f64, now: f64) {
        let state = self.nodes.get_mut(name).expect("registered node");
        if !state.depleted {
            state.depleted = true;
            state.listening = false;
            self.counters.depleted_at.insert(name.to_owned(), died);
            self.push(now, EventKind::NodeDepleted, name, None, Tag::None);
        }
    }

    fn tx_cost(&self, len: usize) -> f64 {
        self.config.energy_costs.per_byte_tx * len as f64
    }

    /// Puts bytes on the air from `from` toward its next hop.
    fn send(&mut self, from: &str, reading: usize, bytes: &[u8], now: f64) {
        let hop = self.routes.next_hop(from).expect("validated route").to_owned();
        let on_air = transmit(bytes, self.config.noise_bit_flip_prob, &mut self.rng);
        self.in_flight += 1;
        self.push(
            now + HOP_DELAY,
            EventKind::FrameArrival,
            &hop,
            Some(on_air),
            Tag::Reading(reading),
        );
    }

    fn on_reading_due(&mut self, sensor_idx: usize, now: f64) {
        let schedule = self.schedule;
        let sensor = &schedule[sensor_idx];
        let name = sensor.node_name.clone();
        let next = now + self.periods[sensor_idx];
        if !self.charge_idle(&name, now) {
            return;
        }
        if next < self.config.sim_duration {
            self.push(next, EventKind::ReadingDue, &name, None, Tag::Sensor(sensor_idx));
        }
        let registry = self.registry;
        let node = registry.get(&name).expect("validated schedule");
        let timestamp = Timestamp::from_epoch(self.start.epoch().saturating_add(now as u32));
        let value: u8 = self.rng.random();
        let frame = originate_reading(node, sensor, value, timestamp, self.config.key_spec)
            .and_then(|f| encode_frame(&f))
            .expect("table nodes always produce valid frames");

        self.counters.originated += 1;
        let reading = self.origins.len();
        self.origins.push(Origin {
            node: name.clone(),
            value,
            timestamp,
        });
        // The radio is powered for this transmission even if it drains the battery.
        let cost = self.tx_cost(frame.len());
        self.charge(&name, cost, now);
        self.send(&name, reading, &frame, now);
    }

    fn on_arrival(&mut self, at: &str, reading: usize, bytes: &[u8], now: f64) {
        if at == self.routes.coordinator() {
            self.on_coordinator(reading, bytes);
            return;
        }
        if !self.charge_idle(at, now) {
            self.counters.dropped_depleted += 1;
            return;
        }
        if !self.nodes[at].listening {
            self.counters.dropped_duty += 1;
            return;
        }
        let rx = self.config.energy_costs.per_byte_rx * bytes.len() as f64;
        if !self.charge(at, rx, now) {
            self.counters.dropped_depleted += 1;
            return;
        }
        let tx = self.tx_cost(bytes.len());
        self.charge(at, tx, now);
        self.send(at, reading, bytes, now);
    }

    fn on_coordinator(&mut self, reading: usize, bytes: &[u8]) {
        let origin = &self.origins[reading];
        match coordinator_receive(bytes, self.registry) {
            Ok(r) => {
                let intact = r.node == origin.node && r.plain == [origin.value] && r.timestamp == origin.timestamp;
                if intact {
                    self.counters.intact += 1;
                } else {
                    self.counters.undetected += 1;
                }
                self.gateway.push(r);
            }
            Err(failure) => {
                self.counters.detected += 1;
                *self
                    .counters
                    .failure_classes
                    .entry(failure.class().to_owned())
                    .or_default() += 1;
            }
        }
    }

    fn on_window(&mut self, name: &str, now: f64, open: bool) {
        if !self.charge_idle(name, now) {
            return;
        }
        let period = self.config.listen_period;
        let state = self.nodes.get_mut(name).expect("registered node");
        state.listening = open;
        let duty = state.duty;
        if open {
            self.push(now + duty * period, EventKind::ListenWindowClose, name, None, Tag::None);
            self.push(now + period, EventKind::ListenWindowOpen, name, None, Tag::None);
        }
    }

    /// Drains remaining events and produces the report.
    pub fn finish(mut self) -> SimReport {
        while self.step().is_some() {}
        let end = self.clock.max(self.config.sim_duration);
        let names: Vec<String> = self.nodes.keys().cloned().collect();
        for name in &names {
            self.charge_idle(name, end);
        }
        let c = self.counters;
        SimReport {
            key_spec: self.config.key_spec,
            rng_seed: self.config.rng_seed,
            start: self.start,
            end_time: end,
            readings_originated: c.originated,
            readings_delivered_intact: c.intact,
            readings_corrupted_detected: c.detected,
            readings_corrupted_undetected: c.undetected,
            frames_dropped_duty_cycle: c.dropped_duty,
            frames_dropped_depleted: c.dropped_depleted,
            failure_classes: c.failure_classes,
            per_node_energy_remaining: self
                .nodes
                .iter()
                .filter_map(|(n, s)| s.energy.map(|mj| (n.clone(), mj / 1000.0)))
                .collect(),
            per_node_hop_counts: self.routes.hop_counts().clone(),
            depleted_at: c.depleted_at,
        }
    }
}

/// Runs one simulation to completion.
pub fn run(config: &SimConfig, registry: &Registry, schedule: &[SensorSchedule]) -> Result<SimReport> {
    Ok(Simulation::new(config, registry, schedule)?.finish())
}
