use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::keying::{KeySpec, Timestamp};

/// Outcome counts and per-node state at the end of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub key_spec: KeySpec,
    pub rng_seed: u64,
    pub start: Timestamp,
    /// Simulated seconds elapsed when the last frame settled.
    pub end_time: f64,
    pub readings_originated: u64,
    pub readings_delivered_intact: u64,
    pub readings_corrupted_detected: u64,
    pub readings_corrupted_undetected: u64,
    pub frames_dropped_duty_cycle: u64,
    pub frames_dropped_depleted: u64,
    /// Detected corruptions by failure class.
    pub failure_classes: BTreeMap<String, u64>,
    /// Joules left per battery node.
    pub per_node_energy_remaining: BTreeMap<String, f64>,
    pub per_node_hop_counts: BTreeMap<String, u32>,
    /// Simulated second at which each exhausted node ran out.
    pub depleted_at: BTreeMap<String, f64>,
}

impl SimReport {
    pub fn dropped(&self) -> u64 {
        self.frames_dropped_duty_cycle + self.frames_dropped_depleted
    }

    /// Every originated reading ended in exactly one outcome.
    pub fn is_conserved(&self) -> bool {
        self.readings_originated
            == self.readings_delivered_intact
                + self.readings_corrupted_detected
                + self.readings_corrupted_undetected
                + self.dropped()
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let pct = |n: u64| {
            if self.readings_originated == 0 {
                0.0
            } else {
                100.0 * n as f64 / self.readings_originated as f64
            }
        };
        let _ = writeln!(s, "simulation report");
        let _ = writeln!(s, "  key mode               {}", self.key_spec);
        let _ = writeln!(s, "  seed                   {}", self.rng_seed);
        let _ = writeln!(s, "  start                  {}", self.start);
        let _ = writeln!(s, "  end time               {:.3} s", self.end_time);
        let _ = writeln!(s, "readings");
        let _ = writeln!(s, "  originated             {}", self.readings_originated);
        for (label, n) in [
            ("delivered intact", self.readings_delivered_intact),
            ("corrupted, detected", self.readings_corrupted_detected),
            ("corrupted, undetected", self.readings_corrupted_undetected),
            ("dropped, duty cycle", self.frames_dropped_duty_cycle),
            ("dropped, depleted", self.frames_dropped_depleted),
        ] {
            let _ = writeln!(s, "  {label:<23}{n} ({:.2}%)", pct(n));
        }
        if !self.failure_classes.is_empty() {
            let _ = writeln!(s, "detected failures");
            for (class, n) in &self.failure_classes {
                let _ = writeln!(s, "  {class:<23}{n}");
            }
        }
        let _ = writeln!(s, "nodes");
        let _ = writeln!(
            s,
            "  {:<6} {:>4} {:>12} {:>12}",
            "name", "hops", "energy J", "depleted s"
        );
        for (name, hops) in &self.per_node_hop_counts {
            let energy = self
                .per_node_energy_remaining
                .get(name)
                .map_or("mains".to_string(), |e| format!("{e:.6}"));
            let depleted = self
                .depleted_at
                .get(name)
                .map_or("-".to_string(), |t| format!("{t:.3}"));
            let _ = writeln!(s, "  {name:<6} {hops:>4} {energy:>12} {depleted:>12}");
        }
        s
    }

    pub fn render_tsv(&self) -> String {
        let mut s = String::from("metric\tvalue\n");
        let rows: [(&str, String); 10] = [
            ("key_mode", self.key_spec.to_string()),
            ("rng_seed", self.rng_seed.to_string()),
            ("start", self.start.to_string()),
            ("end_time", format!("{:.3}", self.end_time)),
            ("readings_originated", self.readings_originated.to_string()),
            ("readings_delivered_intact", self.readings_delivered_intact.to_string()),
            (
                "readings_corrupted_detected",
                self.readings_corrupted_detected.to_string(),
            ),
            (
                "readings_corrupted_undetected",
                self.readings_corrupted_undetected.to_string(),
            ),
            ("frames_dropped_duty_cycle", self.frames_dropped_duty_cycle.to_string()),
            ("frames_dropped_depleted", self.frames_dropped_depleted.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k}\t{v}");
        }
        for (class, n) in &self.failure_classes {
            let _ = writeln!(s, "failure.{class}\t{n}");
        }
        s.push_str("\nnode\thops\tenergy_j\tdepleted_at\n");
        for (name, hops) in &self.per_node_hop_counts {
            let energy = self
                .per_node_energy_remaining
                .get(name)
                .map_or("-".to_string(), |e| format!("{e:.6}"));
            let depleted = self
                .depleted_at
                .get(name)
                .map_or("-".to_string(), |t| format!("{t:.3}"));
            let _ = writeln!(s, "{name}\t{hops}\t{energy}\t{depleted}");
        }
        s
    }
}
