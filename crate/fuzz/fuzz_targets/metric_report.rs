#![no_main]

use atomqec::analysis::MetricReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = MetricReport::parse(text) {
        let out = m.to_text();
        let again = MetricReport::parse(&out).expect("written report parses");
        // NaN fields compare unequal, so compare the text.
        assert_eq!(again.to_text(), out);
        let _ = m.csv_row();
    }
});
