#![no_main]

use hypiso_core::grouptable::FiniteGroup;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Associativity checking is cubic; keep inputs small.
    if data.len() > 4096 {
        return;
    }
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = FiniteGroup::from_csv(s) {
        assert_eq!(FiniteGroup::from_csv(&g.to_csv()).unwrap(), g);
    }
});
