#![no_main]

use hypiso_core::ordinal::Ordinal;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(a) = s.parse::<Ordinal>() {
        let printed = a.to_string();
        assert_eq!(printed.parse::<Ordinal>().unwrap(), a);
        if a.is_limit() {
            assert!(a.fundamental(1).unwrap() < a);
        }
    }
});
