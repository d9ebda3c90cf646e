#![no_main]

use epistemic_core::report::ReportDocument;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = ReportDocument::from_json(text) {
        let again = ReportDocument::from_json(&serde_json::to_string(&report).unwrap()).unwrap();
        assert_eq!(again, report);
        let _ = report.exit_code();
    }
});
