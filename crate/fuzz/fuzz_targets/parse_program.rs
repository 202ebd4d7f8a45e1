#![no_main]

mod simple;

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let g = &simple::simple().analysis.grammars["simple"];
    if let Ok(p) = g.parse_program(text, "Pgm", "fuzz") {
        assert_eq!(p.source_text(g), text);
    }
});
