#![no_main]

use libfuzzer_sys::fuzz_target;
use maxcomplex_core::Certificate;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cert) = text.parse::<Certificate>() else {
        return;
    };
    let _ = cert.verify();
    let back: Certificate = cert.to_string().parse().unwrap();
    assert_eq!(back, cert);
});
