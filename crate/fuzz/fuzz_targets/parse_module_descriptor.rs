#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = pglab_core::pgmod::parse_module_descriptor(data);
});
