#![no_main]
use cmono_core::families::parse_family_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_family_json(s) {
        let _ = f.instance.classify();
    }
});
