#![no_main]

use epistemic_core::om::OntologicalModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(model) = OntologicalModel::from_json(text) {
        assert_eq!(OntologicalModel::from_json(&model.to_json()).unwrap(), model);
        let _ = model.classify();
    }
});
