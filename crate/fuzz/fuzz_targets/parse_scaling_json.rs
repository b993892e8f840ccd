#![no_main]

use libfuzzer_sys::fuzz_target;
use qcat_core::io::{scaling_from_json, scaling_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(study) = scaling_from_json(text) {
        let once = scaling_to_json(&study).expect("parsed study serializes");
        assert_eq!(once, scaling_to_json(&scaling_from_json(&once).unwrap()).unwrap());
    }
});
