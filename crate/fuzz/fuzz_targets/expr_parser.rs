#![no_main]
use cmono_core::exprlang::{parse, parse_expr, print};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let _ = parse(s);
    if let Ok(e) = parse_expr(s) {
        let text = print(&e);
        let back = parse_expr(&text).expect("printed form must parse");
        assert_eq!(back, e, "{text}");
    }
});
