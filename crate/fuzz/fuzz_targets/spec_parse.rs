#![no_main]

use g2cone::cli::{FnSpec, ProfileSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = text.parse::<FnSpec>() {
        let again: FnSpec = spec.to_string().parse().expect("display round-trips");
        assert_eq!(spec.to_string(), again.to_string());
        let _ = spec.build();
    }
    let _ = text.parse::<ProfileSpec>();
});
