#![no_main]

use hypiso_core::grouptable::VcGroup;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 8192 {
        return;
    }
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = VcGroup::from_json(s) {
        let ball = g.ball(2);
        assert_eq!(ball[0].0, g.identity());
        for &(x, _) in &ball {
            assert_eq!(g.mul(x, g.inv(x)), g.identity());
        }
    }
});
