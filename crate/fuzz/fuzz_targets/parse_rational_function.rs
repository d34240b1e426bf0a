#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = pglab_core::wronskian::parse_rational_function(data);
});
