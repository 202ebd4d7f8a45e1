#![no_main]

use cbs_core::printer::print_spec;
use cbs_core::{analysis::analyze, parse_cbs};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_cbs(text, "fuzz.cbs") else { return };
    let printed = print_spec(&spec);
    let back = parse_cbs(&printed, "printed.cbs").expect("printed spec parses");
    assert_eq!(back.without_spans(), spec.without_spans());
    let _ = analyze(&spec);
});
