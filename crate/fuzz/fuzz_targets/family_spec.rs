#![no_main]
use cmono_core::exprlang::parse_family_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok((inst, _)) = parse_family_spec(s) {
        if inst.validate().is_ok() {
            let _ = inst.classify();
            let _ = inst.natural_domain();
        }
    }
});
