#![no_main]

use hypiso_core::endspace::{CharSystem, EndSpace};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cs) = CharSystem::parse_shorthand(s) {
        assert_eq!(CharSystem::parse_shorthand(&cs.shorthand()).unwrap(), cs);
        assert_eq!(cs.canonical().countable_system(), Some(cs));
    }
    if let Ok(e) = EndSpace::parse_cli(s) {
        let c = e.canonical();
        assert_eq!(c.canonical(), c);
    }
});
