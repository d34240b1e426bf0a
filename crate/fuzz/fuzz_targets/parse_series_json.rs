#![no_main]

use libfuzzer_sys::fuzz_target;

use pglab_core::LaurentSeries;

fuzz_target!(|data: &str| {
    if let Ok(f) = serde_json::from_str::<LaurentSeries>(data) {
        let back = serde_json::to_string(&f).unwrap();
        let again: LaurentSeries = serde_json::from_str(&back).unwrap();
        assert_eq!(f, again);
    }
});
