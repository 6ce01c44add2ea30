#![no_main]

use atomqec_cli::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Err(e) = parse_config(&text) {
        let _ = e.to_string();
    }
});
