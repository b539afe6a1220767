#![no_main]

use hypiso_core::endspace::EndSpace;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(e) = EndSpace::from_json(s) {
        assert_eq!(EndSpace::from_json(&e.to_json()).unwrap(), e);
        let _ = e.trichotomy();
        let _ = e.star_decomposition();
    }
});
