#![no_main]

use libfuzzer_sys::fuzz_target;
use qcat_core::config::parse_mu_list;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(list) = parse_mu_list(text) {
        assert!(!list.is_empty());
        assert!(list.iter().all(|m| m.is_finite() && *m > 0.0));
    }
});
