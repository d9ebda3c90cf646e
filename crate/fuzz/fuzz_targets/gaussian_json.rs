#![no_main]

use epistemic_core::gaussian::GaussianEpistemicState;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(state) = GaussianEpistemicState::from_json(text) {
        let again = GaussianEpistemicState::from_json(&state.to_json()).unwrap();
        assert_eq!(again.dimension(), state.dimension());
        let _ = state.validity_check();
        let _ = state.entropy();
    }
});
