#![no_main]

use libfuzzer_sys::fuzz_target;

use pglab_core::Padic;

fuzz_target!(|data: &str| {
    if let Ok(x) = serde_json::from_str::<Padic>(data) {
        let back = serde_json::to_string(&x).unwrap();
        let again: Padic = serde_json::from_str(&back).unwrap();
        assert_eq!(x, again);
    }
});
