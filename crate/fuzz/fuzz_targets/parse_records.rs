#![no_main]

use atomqec::sim::{parse_records, write_records};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(set) = parse_records(text) {
        let out = write_records(&set);
        assert_eq!(parse_records(&out).expect("written records parse"), set);
    }
});
