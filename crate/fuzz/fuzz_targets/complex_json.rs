#![no_main]

use hypiso_core::synth::GluingComplex;
use hypiso_core::verify::verify;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 16384 {
        return;
    }
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = GluingComplex::from_json(s) {
        // Verification must report, never panic.
        let _ = verify(&c, 1);
        assert_eq!(GluingComplex::from_json(&c.to_json()).unwrap(), c);
    }
});
