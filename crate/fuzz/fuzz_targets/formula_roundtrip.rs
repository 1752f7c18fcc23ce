#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(f) = cjkit::parse_formula(text) {
        let rendered = cjkit::render_formula(&f);
        assert_eq!(cjkit::parse_formula(&rendered).as_ref(), Ok(&f), "{rendered}");
    }
});
