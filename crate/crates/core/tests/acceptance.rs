//! One pass/fail line per acceptance criterion. Run with `--nocapture` to see them.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wisense::analysis::{flag_corruption_study, recover_key_known_plaintext, Mutation, Verdict};
use wisense::keying::{KeySpec, Timestamp, TsField};
use wisense::meshsim::{originate_reading, run, Simulation};
use wisense::registry::{load_nodes, load_schedule, DEFAULT_NODES, DEFAULT_SCHEDULE};
use wisense::{decode_frame, decrypt_byte, encode_frame, encrypt_byte, Frame, KeyByte, Registry, SBOX};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(limit: Duration, started: Instant) -> Result<Duration, String> {
    let took = started.elapsed();
    if took < limit {
        Ok(took)
    } else {
        Err(format!("took {took:?}, limit {limit:?}"))
    }
}

fn golden_vector() -> Outcome {
    let t = Instant::now();
    let c = encrypt_byte(0xD5, KeyByte(0x08));
    let p = decrypt_byte(0x0B, KeyByte(0x08));
    let took = within(Duration::from_millis(1), t)?;
    ensure!(c == 0x0B, "encrypt gave {c:02X}");
    ensure!(p == 0xD5, "decrypt gave {p:02X}");
    Ok(format!("D5 -k08-> 0B -k08-> D5 in {took:?}"))
}

fn sbox_fidelity() -> Outcome {
    let spots = [
        (0x00, 0x63),
        (0x01, 0x7C),
        (0xD5, 0x03),
        (0xFF, 0x16),
        (0x10, 0xCA),
        (0xA0, 0xE0),
        (0x4C, 0x29),
        (0x7F, 0xD2),
    ];
    for (i, o) in spots {
        ensure!(SBOX.forward()[i] == o, "S[{i:02X}] = {:02X}", SBOX.forward()[i]);
    }
    ensure!(SBOX.is_bijection(), "forward table is not a bijection");
    for b in 0..=255u8 {
        ensure!(
            SBOX.inverse()[usize::from(SBOX.forward()[usize::from(b)])] == b,
            "inverse fails at {b:02X}"
        );
    }
    Ok("8 spot checks, bijection, inverse of forward is identity".into())
}

fn exhaustive_round_trip() -> Outcome {
    let t = Instant::now();
    let mut n = 0u32;
    for k in 0..=255u8 {
        for p in 0..=255u8 {
            ensure!(
                decrypt_byte(encrypt_byte(p, KeyByte(k)), KeyByte(k)) == p,
                "p={p:02X} k={k:02X}"
            );
            n += 1;
        }
    }
    let took = within(Duration::from_secs(1), t)?;
    Ok(format!("{n} pairs in {took:?}"))
}

fn table_storage() -> Outcome {
    let bytes = SBOX.to_bytes();
    ensure!(bytes.len() == 256, "{} bytes", bytes.len());
    ensure!(SBOX.storage_bits() == 2048, "{} bits", SBOX.storage_bits());
    Ok("forward table serializes to 256 bytes = 2048 bits".into())
}

fn dataset_ingestion() -> Outcome {
    let nodes = load_nodes(DEFAULT_NODES).map_err(|e| e.to_string())?;
    ensure!(nodes.len() == 24, "{} nodes", nodes.len());
    let schedule = load_schedule(DEFAULT_SCHEDULE, &nodes).map_err(|e| e.to_string())?;
    for s in &schedule {
        if let Some(next) = s.next_update {
            ensure!(next > s.last_update, "{}/{} not monotone", s.node_name, s.sensor_id);
        }
        ensure!(
            nodes.iter().any(|n| n.name == s.node_name),
            "{} unresolved",
            s.node_name
        );
    }
    let registry = Registry::default_dataset().map_err(|e| e.to_string())?;
    Ok(format!(
        "{} descriptors, {} schedule rows, {} nodes with coordinator",
        nodes.len(),
        schedule.len(),
        registry.len()
    ))
}

fn end_to_end() -> Outcome {
    let (mut cfg, registry, schedule) = common::shipped();
    ensure!(
        cfg.noise_bit_flip_prob == 0.0 && cfg.roles.passive.is_empty(),
        "shipped config is not noiseless and all-active"
    );
    let mut parts = vec![];
    for spec in [
        KeySpec::MacTail,
        KeySpec::NodeName,
        KeySpec::Timestamp(TsField::Seconds),
    ] {
        cfg.key_spec = spec;
        let t = Instant::now();
        let mut sim = Simulation::new(&cfg, &registry, &schedule).map_err(|e| e.to_string())?;
        while sim.step().is_some() {}
        let delivered = sim.gateway().len() as u64;
        let report = sim.finish();
        let took = within(Duration::from_secs(5), t)?;
        let n = report.readings_originated;
        ensure!(n >= 1000, "{spec}: only {n} readings");
        ensure!(
            report.readings_delivered_intact == n && delivered == n,
            "{spec}: {} of {n} intact",
            report.readings_delivered_intact
        );
        parts.push(format!("{spec} {n}/{n} in {took:.0?}"));
    }
    Ok(parts.join(", "))
}

fn determinism() -> Outcome {
    let (mut cfg, registry, schedule) = common::shipped();
    cfg.noise_bit_flip_prob = 0.002;
    let a = run(&cfg, &registry, &schedule).map_err(|e| e.to_string())?;
    let b = run(&cfg, &registry, &schedule).map_err(|e| e.to_string())?;
    ensure!(a.render_tsv() == b.render_tsv(), "tsv reports differ");
    ensure!(a.render_text() == b.render_text(), "text reports differ");
    Ok(format!(
        "seed {} with noise, {} report bytes identical",
        cfg.rng_seed,
        a.render_tsv().len()
    ))
}

fn routing_oracle() -> Outcome {
    let t = Instant::now();
    let cases = common::random_cases(1500, 0xACCE);
    let mut checked = 0;
    for case in &cases {
        let Ok(routes) = wisense::meshsim::build_routes(&case.topology, &case.relays, &case.coordinator) else {
            ensure!(
                case.topology
                    .nodes()
                    .any(|n| common::brute_force_route(case, n).is_none()),
                "routing failed on a connected case"
            );
            continue;
        };
        for node in case.topology.nodes() {
            let expected = common::brute_force_route(case, node).map(|(h, _)| h);
            ensure!(
                routes.hops(node) == expected,
                "{node}: {:?} vs {expected:?}",
                routes.hops(node)
            );
        }
        checked += 1;
    }
    let took = within(Duration::from_secs(10), t)?;
    Ok(format!("{checked} connected topologies of at most 8 nodes in {took:?}"))
}

fn known_plaintext() -> Outcome {
    let t = Instant::now();
    for k in 0..=255u8 {
        for p in 0..=255u8 {
            let c = encrypt_byte(p, KeyByte(k));
            let got = recover_key_known_plaintext(&[(p, c)])
                .map_err(|e| e.to_string())?
                .recovered_key;
            ensure!(got == Some(KeyByte(k)), "p={p:02X} k={k:02X} recovered {got:?}");
        }
    }
    let took = within(Duration::from_secs(1), t)?;
    Ok(format!("65536 single-pair recoveries in {took:?}"))
}

fn flag_corruption() -> Outcome {
    let registry = Registry::default_dataset().map_err(|e| e.to_string())?;
    let node = registry.get("0002").ok_or("node 0002 missing")?;
    let sensor = load_schedule(DEFAULT_SCHEDULE, &load_nodes(DEFAULT_NODES).unwrap())
        .unwrap()
        .into_iter()
        .find(|s| s.node_name == "0002" && s.sensor_id == 1)
        .ok_or("schedule row 0002/1 missing")?;
    let when: Timestamp = "2015-10-18 04:04:57".parse().unwrap();
    ensure!(sensor.last_update == when, "row 0002/1 is {}", sensor.last_update);

    let study_for = |field| {
        let spec = KeySpec::Timestamp(field);
        let frame = originate_reading(node, &sensor, 0x20, when, spec).map_err(|e| e.to_string())?;
        flag_corruption_study(&frame, spec, &registry).map_err(|e| e.to_string())
    };
    let mut rows = 0;
    for field in TsField::ALL {
        let study = study_for(field)?;
        for row in &study.rows {
            if let Verdict::Accepted { .. } = row.verdict {
                ensure!(
                    row.key_changed == row.value_changed,
                    "{}: key/value change disagree",
                    row.mutation
                );
            }
            rows += 1;
        }
    }
    let swap = |from, to| -> Result<bool, String> {
        let study = study_for(from)?;
        let row = study.row(Mutation::FieldSwap { from, to }).ok_or("swap row missing")?;
        match row.verdict {
            Verdict::Accepted { .. } => Ok(row.value_changed),
            Verdict::Rejected(ref f) => Err(format!("swap rejected: {f}")),
        }
    };
    ensure!(
        swap(TsField::Seconds, TsField::Minutes)?,
        "Seconds->Minutes kept the value"
    );
    ensure!(
        !swap(TsField::Hours, TsField::Minutes)?,
        "Hours->Minutes changed the value"
    );
    ensure!(
        !swap(TsField::Minutes, TsField::Hours)?,
        "Minutes->Hours changed the value"
    );
    Ok(format!(
        "{rows} mutations consistent; Seconds->Minutes wrong, Hours<->Minutes unchanged"
    ))
}

fn tamper_detection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7A3E);
    let (mut rejected, mut accepted) = (0u32, 0u32);
    for _ in 0..10_000 {
        let len = rng.random_range(0..=255usize);
        let frame = Frame {
            version: wisense::framing::VERSION,
            flags: rng.random(),
            source_mac: rng.random(),
            source_short: rng.random(),
            timestamp: rng.random(),
            payload: (0..len).map(|_| rng.random()).collect(),
        };
        let mut bytes = encode_frame(&frame).map_err(|e| e.to_string())?;
        let bit = rng.random_range(0..bytes.len() * 8);
        bytes[bit / 8] ^= 1 << (bit % 8);
        match decode_frame(&bytes) {
            Ok(f) if f == frame => return Err(format!("flip of bit {bit} accepted as original")),
            Ok(_) => accepted += 1,
            Err(_) => rejected += 1,
        }
    }
    Ok(format!(
        "10000 flips: {rejected} rejected, {accepted} accepted as a different frame, 0 silent"
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("golden vector", golden_vector),
        ("S-Box fidelity", sbox_fidelity),
        ("exhaustive round-trip", exhaustive_round_trip),
        ("table storage", table_storage),
        ("dataset ingestion", dataset_ingestion),
        ("end-to-end integrity", end_to_end),
        ("determinism", determinism),
        ("routing oracle", routing_oracle),
        ("known-plaintext recovery", known_plaintext),
        ("flag corruption", flag_corruption),
        ("frame tamper detection", tamper_detection),
    ];
    let mut failed = vec![];
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                println!("FAIL criterion {:>2} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
