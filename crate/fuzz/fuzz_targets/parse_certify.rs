#![no_main]
use cmono_core::exprlang::{certify, parse, Interval};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 200 {
        return;
    }
    if let Ok(p) = parse(s) {
        let i = p.interval.unwrap_or_else(Interval::positive);
        if let Ok(c) = certify(&p.expr, &i) {
            for node in c.nodes() {
                assert!(!node.citation.is_empty() || !node.rule.is_empty());
            }
        }
    }
});
