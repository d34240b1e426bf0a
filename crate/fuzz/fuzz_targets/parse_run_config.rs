#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(cfg) = pglab::parse_run_config(data) {
        let _ = cfg.context();
    }
});
