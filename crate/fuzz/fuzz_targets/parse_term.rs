#![no_main]

use cbs_core::parse_term;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_term(text, "fuzz") {
        let printed = t.to_string();
        let back = parse_term(&printed, "printed").expect("printed term parses");
        assert_eq!(back.to_string(), printed);
    }
});
