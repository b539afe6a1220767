#![no_main]

use hypiso_core::grouptable::FiniteGroup;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 8192 {
        return;
    }
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = FiniteGroup::from_json(s) {
        assert_eq!(FiniteGroup::from_json(&g.to_json()).unwrap(), g);
    }
});
