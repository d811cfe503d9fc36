#![no_main]

use eigenscale::matcore::RowScale;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(r) = s.parse::<RowScale>() {
            assert!(r.factor > 0.0 && r.factor.is_finite());
        }
    }
});
