//! Command-line driver behind the `wisense` binary.
//!
//! Exit codes: 0 success, 1 domain error (one `error:` line on stderr),
//! 2 usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{exhaustive_search, flag_corruption_study, recover_key_known_plaintext, ValueRange};
use crate::keying::{derive_key, encode_flags, KeySpec, Timestamp, TsField};
use crate::meshsim::{originate_reading, run as run_sim, SimConfig, DEFAULT_CONFIG};
use crate::registry::{
    load_nodes, load_schedule, NodeDescriptor, Registry, RolePlan, SensorSchedule, DEFAULT_NODES, DEFAULT_SCHEDULE,
};
use crate::sbox::{decrypt_byte, encrypt_byte, Direction, SBOX};
use crate::Frame;

#[derive(Parser, Debug)]
#[command(
    name = "wisense",
    version,
    about = "S-Box + XOR sensor link cipher, mesh simulator and attack harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encrypt one byte as a node would before framing it.
    Encrypt(CipherArgs),
    /// Decrypt one received byte.
    Decrypt(CipherArgs),
    /// Print the forward and inverse S-Box as 16x16 hex grids.
    DumpSbox {
        #[arg(long, value_enum, default_value_t = Which::Both)]
        table: Which,
    },
    /// Load the node table and sensor schedule and report what was found.
    Validate {
        #[arg(long)]
        nodes: Option<PathBuf>,
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Run the mesh simulation.
    Simulate(SimulateArgs),
    /// Run one of the cryptanalysis attacks.
    Attack {
        #[command(subcommand)]
        mode: AttackMode,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Forward,
    Inverse,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Args, Debug)]
struct CipherArgs {
    /// Byte in hex, e.g. D5.
    #[arg(long, value_parser = parse_hex_byte)]
    value: u8,
    /// Sending node name, e.g. 0008.
    #[arg(long)]
    node: String,
    /// Key source: mac, name, ts-hours, ts-minutes or ts-seconds.
    #[arg(long, default_value = "mac")]
    mode: KeySpec,
    /// "YYYY-MM-DD HH:MM:SS"; required for timestamp modes.
    #[arg(long, value_parser = parse_timestamp,
          required_if_eq_any = [("mode", "ts-hours"), ("mode", "ts-minutes"), ("mode", "ts-seconds")])]
    timestamp: Option<Timestamp>,
    #[arg(long)]
    nodes: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Configuration file; the shipped default when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<PathBuf>,
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured bit-flip probability.
    #[arg(long)]
    noise: Option<f64>,
    /// Overrides the configured key mode.
    #[arg(long)]
    mode: Option<KeySpec>,
    /// Overrides the configured duration in seconds.
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum AttackMode {
    /// Recover the key from known plain:cipher pairs.
    KnownPlaintext {
        /// Pair as PLAIN:CIPHER in hex, e.g. D5:0B. Repeatable.
        #[arg(long = "pair", required = true, value_parser = parse_pair)]
        pairs: Vec<(u8, u8)>,
    },
    /// Try all 256 keys and rank them by plausibility of the decryption.
    Exhaustive {
        /// Comma-separated ciphertext bytes in hex.
        #[arg(long, value_parser = parse_hex_list)]
        cipher: HexList,
        /// Plausible plaintext range LO-HI in hex, e.g. 10-30.
        #[arg(long, value_parser = parse_range, conflicts_with = "preset")]
        range: Option<ValueRange>,
        /// any, temperature, humidity or uv.
        #[arg(long)]
        preset: Option<String>,
        /// Number of candidates to print.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Corrupt the flags and timestamp of a timestamp-keyed frame.
    FlagStudy {
        #[arg(long, value_parser = parse_hex_byte)]
        value: u8,
        #[arg(long)]
        node: String,
        #[arg(long, value_enum)]
        field: FieldArg,
        #[arg(long, value_parser = parse_timestamp)]
        timestamp: Timestamp,
        #[arg(long)]
        nodes: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FieldArg {
    Hours,
    Minutes,
    Seconds,
}

impl From<FieldArg> for TsField {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Hours => TsField::Hours,
            FieldArg::Minutes => TsField::Minutes,
            FieldArg::Seconds => TsField::Seconds,
        }
    }
}

#[derive(Clone, Debug)]
struct HexList(Vec<u8>);

/// Parses a byte written in hex without prefix, any case.
pub fn parse_hex_byte(s: &str) -> Result<u8, String> {
    let t = s.trim();
    if t.is_empty() || t.len() > 2 || !t.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(format!("{s:?} is not a hex byte"));
    }
    u8::from_str_radix(t, 16).map_err(|e| e.to_string())
}

fn parse_timestamp(s: &str) -> Result<Timestamp, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_pair(s: &str) -> Result<(u8, u8), String> {
    let (p, c) = s.split_once(':').ok_or_else(|| format!("{s:?} is not PLAIN:CIPHER"))?;
    Ok((parse_hex_byte(p)?, parse_hex_byte(c)?))
}

fn parse_hex_list(s: &str) -> Result<HexList, String> {
    s.split(',').map(parse_hex_byte).collect::<Result<_, _>>().map(HexList)
}

fn parse_range(s: &str) -> Result<ValueRange, String> {
    let (lo, hi) = s.split_once('-').ok_or_else(|| format!("{s:?} is not LO-HI"))?;
    let (lo, hi) = (parse_hex_byte(lo)?, parse_hex_byte(hi)?);
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(ValueRange { lo, hi })
}

type Outcome = Result<(), String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn source(path: &Option<PathBuf>, default: &str) -> Result<(String, String), String> {
    match path {
        Some(p) => Ok((p.display().to_string(), read(p)?)),
        None => Ok(("<built-in>".into(), default.to_owned())),
    }
}

fn nodes_from(path: &Option<PathBuf>) -> Result<Vec<NodeDescriptor>, String> {
    let (name, text) = source(path, DEFAULT_NODES)?;
    load_nodes(&text).map_err(|e| format!("{name}: {e}"))
}

fn schedule_from(path: &Option<PathBuf>, nodes: &[NodeDescriptor]) -> Result<Vec<SensorSchedule>, String> {
    let (name, text) = source(path, DEFAULT_SCHEDULE)?;
    load_schedule(&text, nodes).map_err(|e| format!("{name}: {e}"))
}

fn find_node(nodes: &[NodeDescriptor], name: &str) -> Result<NodeDescriptor, String> {
    nodes
        .iter()
        .find(|n| n.name.eq_ignore_ascii_case(name))
        .cloned()
        .ok_or_else(|| format!("unknown node {name}"))
}

fn cipher_cmd(args: &CipherArgs, encrypt: bool, out: &mut dyn Write) -> Outcome {
    let nodes = nodes_from(&args.nodes)?;
    let node = find_node(&nodes, &args.node)?;
    let ts = args.timestamp.unwrap_or(Timestamp::from_epoch(0));
    let key = derive_key(args.mode, &node, ts).map_err(|e| e.to_string())?;
    let result = if encrypt {
        encrypt_byte(args.value, key)
    } else {
        decrypt_byte(args.value, key)
    };
    writeln!(out, "{result:02X}")
        .and_then(|_| writeln!(out, "flags {:02X}", encode_flags(args.mode)))
        .map_err(io)
}

fn dump_sbox(which: Which, out: &mut dyn Write) -> Outcome {
    let s = match which {
        Which::Forward => SBOX.grid(Direction::Forward),
        Which::Inverse => SBOX.grid(Direction::Inverse),
        Which::Both => format!(
            "forward\n{}\ninverse\n{}",
            SBOX.grid(Direction::Forward),
            SBOX.grid(Direction::Inverse)
        ),
    };
    out.write_all(s.as_bytes()).map_err(io)
}

fn validate(nodes: &Option<PathBuf>, schedule: &Option<PathBuf>, out: &mut dyn Write) -> Outcome {
    let table = nodes_from(nodes)?;
    let rows = schedule_from(schedule, &table)?;
    let registry = RolePlan::default().apply(table.clone()).map_err(|e| e.to_string())?;
    let pairs: std::collections::BTreeSet<_> = rows.iter().map(|r| (&r.node_name, r.sensor_id)).collect();
    let reporting: std::collections::BTreeSet<_> = rows.iter().map(|r| r.node_name.as_str()).collect();
    let silent: Vec<&str> = table
        .iter()
        .map(|n| n.name.as_str())
        .filter(|n| !reporting.contains(n))
        .collect();
    let coord = registry.coordinator();
    let s = format!(
        "nodes        {} from table, {} with coordinator {} ({:016X})\n\
         schedule     {} rows, {} distinct sensors, {} without next update\n\
         reporting    {} nodes\n\
         silent       {}\n\
         status       ok\n",
        table.len(),
        registry.len(),
        coord.name,
        coord.mac,
        rows.len(),
        pairs.len(),
        rows.iter().filter(|r| r.next_update.is_none()).count(),
        reporting.len(),
        if silent.is_empty() {
            "-".to_string()
        } else {
            silent.join(" ")
        },
    );
    out.write_all(s.as_bytes()).map_err(io)
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Outcome {
    let (cfg_name, cfg_text) = source(&args.config, DEFAULT_CONFIG)?;
    let mut cfg = SimConfig::parse(&cfg_text).map_err(|e| format!("{cfg_name}: {e}"))?;
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    if let Some(p) = args.noise {
        cfg.noise_bit_flip_prob = p;
    }
    if let Some(mode) = args.mode {
        cfg.key_spec = mode;
    }
    if let Some(d) = args.duration {
        cfg.sim_duration = d;
    }
    let table = nodes_from(&args.nodes)?;
    let rows = schedule_from(&args.schedule, &table)?;
    let registry = cfg.roles.apply(table).map_err(|e| format!("{cfg_name}: {e}"))?;
    let report = run_sim(&cfg, &registry, &rows).map_err(|e| format!("{cfg_name}: {e}"))?;
    let text = match args.format {
        Format::Text => report.render_text(),
        Format::Tsv => report.render_tsv(),
    };
    out.write_all(text.as_bytes()).map_err(io)
}

fn attack(mode: &AttackMode, out: &mut dyn Write) -> Outcome {
    match mode {
        AttackMode::KnownPlaintext { pairs } => {
            let r = recover_key_known_plaintext(pairs).map_err(|e| e.to_string())?;
            let key = r.recovered_key.expect("known plaintext always recovers");
            writeln!(out, "key {key}\npairs {}", r.trials).map_err(io)
        }
        AttackMode::Exhaustive {
            cipher,
            range,
            preset,
            top,
        } => {
            let range = match (range, preset) {
                (Some(r), _) => *r,
                (None, Some(p)) => ValueRange::preset(p).ok_or_else(|| format!("unknown preset {p:?}"))?,
                (None, None) => ValueRange::ANY,
            };
            let r = exhaustive_search(&cipher.0, |b| range.contains(b)).map_err(|e| e.to_string())?;
            let mut s = format!(
                "trials {}\nrecovered {}\nkey\tscore\tplaintext\n",
                r.trials,
                r.recovered_key.map_or("-".into(), |k| k.to_string())
            );
            for (k, score) in r.candidates.iter().take(*top) {
                let plain: String = cipher
                    .0
                    .iter()
                    .map(|&c| format!("{:02X}", decrypt_byte(c, *k)))
                    .collect();
                s.push_str(&format!("{k}\t{score:.4}\t{plain}\n"));
            }
            out.write_all(s.as_bytes()).map_err(io)
        }
        AttackMode::FlagStudy {
            value,
            node,
            field,
            timestamp,
            nodes,
        } => {
            let table = nodes_from(nodes)?;
            let sender = find_node(&table, node)?;
            let registry: Registry = RolePlan::default().apply(table).map_err(|e| e.to_string())?;
            let spec = KeySpec::Timestamp((*field).into());
            let sensor = SensorSchedule {
                node_name: sender.name.clone(),
                sensor_id: 1,
                last_update: *timestamp,
                next_update: None,
            };
            let frame: Frame =
                originate_reading(&sender, &sensor, *value, *timestamp, spec).map_err(|e| e.to_string())?;
            let study = flag_corruption_study(&frame, spec, &registry).map_err(|e| e.to_string())?;
            out.write_all(study.render_tsv().as_bytes()).map_err(io)
        }
    }
}

fn io(e: std::io::Error) -> String {
    format!("write failed: {e}")
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Encrypt(a) => cipher_cmd(a, true, out),
        Command::Decrypt(a) => cipher_cmd(a, false, out),
        Command::DumpSbox { table } => dump_sbox(*table, out),
        Command::Validate { nodes, schedule } => validate(nodes, schedule, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Attack { mode } => attack(mode, out),
    };
    match outcome {
        Ok(()) => 0,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}
