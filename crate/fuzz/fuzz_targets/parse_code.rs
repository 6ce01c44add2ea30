#![no_main]

use atomqec::codes::{parse_code, write_code};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(code) = parse_code(text) {
        // Anything accepted must survive a write/parse cycle unchanged.
        let out = write_code(&code);
        let again = parse_code(&out).expect("written code parses");
        assert_eq!(write_code(&again), out);
    }
});
