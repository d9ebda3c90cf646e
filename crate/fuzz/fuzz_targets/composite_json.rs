#![no_main]

use epistemic_core::toy::CompositeToyState;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(state) = serde_json::from_slice::<CompositeToyState>(data) {
        let text = serde_json::to_string(&state).unwrap();
        assert_eq!(serde_json::from_str::<CompositeToyState>(&text).unwrap(), state);
    }
});
