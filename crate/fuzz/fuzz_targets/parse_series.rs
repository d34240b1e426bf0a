#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    for p in [2, 3, 5] {
        let _ = pglab_core::series::parse_series(data, p);
    }
});
