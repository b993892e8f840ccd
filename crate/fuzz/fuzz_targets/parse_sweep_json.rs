#![no_main]

use libfuzzer_sys::fuzz_target;
use qcat_core::io::{sweep_from_json, sweep_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sr) = sweep_from_json(text) {
        let once = sweep_to_json(&sr).expect("parsed sweep serializes");
        let again = sweep_from_json(&once).expect("serialized sweep parses");
        assert_eq!(once, sweep_to_json(&again).unwrap());
    }
});
