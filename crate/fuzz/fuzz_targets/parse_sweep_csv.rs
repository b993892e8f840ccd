#![no_main]

use libfuzzer_sys::fuzz_target;
use qcat_core::io::{sweep_from_csv, sweep_to_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sr) = sweep_from_csv(text) {
        let once = sweep_to_csv(&sr).expect("parsed sweep serializes");
        let again = sweep_from_csv(&once).expect("serialized sweep parses");
        assert_eq!(once, sweep_to_csv(&again).unwrap());
    }
});
