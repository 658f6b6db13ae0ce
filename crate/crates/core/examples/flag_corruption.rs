//! Corrupts the header of a timestamp-keyed frame before the checksum is
//! computed and reports what the coordinator decrypts.

use wisense::analysis::{flag_corruption_study, Mutation, Verdict};
use wisense::meshsim::originate_reading;
use wisense::{KeySpec, Registry, SensorSchedule, Timestamp, TsField};

fn main() -> wisense::Result<()> {
    let registry = Registry::default_dataset()?;
    let node = registry.get("0002").expect("node 0002");
    let at: Timestamp = "2015-10-18 04:04:57".parse()?;
    let sensor = SensorSchedule {
        node_name: "0002".into(),
        sensor_id: 1,
        last_update: at,
        next_update: None,
    };

    for field in TsField::ALL {
        let spec = KeySpec::Timestamp(field);
        let frame = originate_reading(node, &sensor, 0x20, at, spec)?;
        let study = flag_corruption_study(&frame, spec, &registry)?;
        println!(
            "{spec:<11} key {:02X}: {} rejected, {} accepted unchanged, {} accepted wrong ({:.1}%)",
            study.original_key.0,
            study.rejected(),
            study.accepted_unchanged(),
            study.accepted_wrong(),
            100.0 * study.undetected_wrong_rate()
        );
        for to in TsField::ALL.into_iter().filter(|&t| t != field) {
            let row = study.row(Mutation::FieldSwap { from: field, to }).expect("swap row");
            if let Verdict::Accepted { key, ref plain } = row.verdict {
                println!("  -> {to:?}: key {:02X}, value {:02X}", key.0, plain[0]);
            }
        }
    }
    Ok(())
}
