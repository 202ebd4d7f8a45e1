#![no_main]

use cbs_core::grammar::compile_grammar;
use cbs_core::parse_cbs;
use libfuzzer_sys::fuzz_target;

// Grammars with arbitrary productions must compile or be rejected with
// diagnostics, and compiled ones must survive parsing arbitrary input.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (grammar_text, input) = text.split_once("\n%%\n").unwrap_or((text, "x"));
    let Ok(spec) = parse_cbs(grammar_text, "fuzz.cbs") else {
        return;
    };
    for lang in &spec.language_specs {
        if let Ok(g) = compile_grammar(lang) {
            for sort in g.cf_sorts() {
                let _ = g.parse_program(input, &sort, "input");
            }
        }
    }
});
