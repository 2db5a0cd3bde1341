#![no_main]

use asg1_core::geometry::{parse_geometry, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(m) = parse_geometry(s) {
            let text = to_json(&m);
            let back = parse_geometry(&text).expect("serialized geometry parses");
            assert_eq!(to_json(&back), text);
        }
    }
});
