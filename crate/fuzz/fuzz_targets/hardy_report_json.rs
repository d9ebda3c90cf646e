#![no_main]

use epistemic_core::hardy::HardyReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = HardyReport::from_json(text) {
        assert_eq!(HardyReport::from_json(&report.to_json()).unwrap(), report);
    }
});
