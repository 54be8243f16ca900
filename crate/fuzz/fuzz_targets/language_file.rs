#![no_main]

use libfuzzer_sys::fuzz_target;
use maxcomplex_cli::LanguageFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(lf) = text.parse::<LanguageFile>() else {
        return;
    };
    if let Ok(f) = lf.to_function() {
        let back: LanguageFile = LanguageFile::from_function(&f).to_string().parse().unwrap();
        assert_eq!(back.to_function().unwrap(), f);
    }
});
