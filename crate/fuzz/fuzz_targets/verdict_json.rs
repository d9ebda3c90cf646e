#![no_main]

use epistemic_core::pbr::VerdictDocument;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = VerdictDocument::from_json(text) {
        let again = VerdictDocument::from_json(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(again, doc);
    }
});
