#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = pglab::input::parse_wronskian_input(data);
});
