#![no_main]

use libfuzzer_sys::fuzz_target;

use pglab_core::Context;

fuzz_target!(|data: &str| {
    let ctx = Context::new(3, 16, 16).unwrap();
    let _ = pglab_core::series::parse_tsum(data, &ctx);
});
