#![no_main]

use libfuzzer_sys::fuzz_target;
use qcat_core::io::{fit_from_json, fit_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(fit) = fit_from_json(text) {
        let once = fit_to_json(&fit).expect("parsed fit serializes");
        assert_eq!(once, fit_to_json(&fit_from_json(&once).unwrap()).unwrap());
    }
});
