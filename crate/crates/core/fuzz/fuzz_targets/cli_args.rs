#![no_main]

use asg1_core::harness::parse_args;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let argv = std::iter::once("asg1").chain(s.split(|c| c == '\0' || c == '\n'));
        let _ = parse_args(argv);
    }
});
