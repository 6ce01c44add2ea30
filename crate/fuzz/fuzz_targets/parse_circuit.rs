#![no_main]

use atomqec::circuit::{parse_circuit, schedule_moments, validate, write_circuit, Tier};
use atomqec::compiler::lower;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(c) = parse_circuit(text) else { return };
    let out = write_circuit(&c);
    let again = parse_circuit(&out).expect("written circuit parses");
    assert_eq!(write_circuit(&again), out);
    if !validate(&c).is_empty() {
        return;
    }
    // Valid circuits must schedule and lower without panicking; errors are fine.
    let _ = schedule_moments(&c);
    if c.tier == Tier::Logical && c.gates.len() <= 256 {
        let _ = lower(&c);
    }
});
