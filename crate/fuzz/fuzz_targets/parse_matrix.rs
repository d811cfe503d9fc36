#![no_main]

use eigenscale::matcore::{parse_matrix, write_matrix};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(m) = parse_matrix(text) else {
        return;
    };
    // Anything accepted must survive a write/read round trip.
    let mut out = Vec::new();
    write_matrix(&m, &mut out).unwrap();
    let again = parse_matrix(std::str::from_utf8(&out).unwrap()).unwrap();
    assert_eq!(m.dim(), again.dim());
    m.for_each_lower(|i, j, v| assert_eq!(again.get(i, j).to_bits(), v.to_bits()));
});
